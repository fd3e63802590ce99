"""Receiver chain: ZF equalization followed by per-sub-block sparse recovery.

The practical receiver works in two steps.  Zero-forcing equalization
restores the compressed transmit vector, which is then split into
sub-blocks; each sub-block is matched against the exhaustive candidate
dictionary through the compression matrix.  Because every sub-block is
exactly 1-sparse over that dictionary, the l0 problem is solved exactly by
a minimum-residual scan over all columns.  OMP is kept as the generic
greedy solver, and a one-shot mode performs the joint search directly on
the received vector without equalizing first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .csmux import MeasurementMatrix, MuxConfig, transmit_gain
from .dictionary import SubblockDictionary
from .errors import DictionaryTooLarge, DimensionMismatch, RankDeficientChannel

RANK_TOL = 1e-12

SOLVERS = ("ml", "omp", "oneshot")


@dataclass(frozen=True)
class EqualizerOutput:
    """Equalized vector plus the channel condition number as a diagnostic."""

    z_hat: np.ndarray
    condition_number: float


@dataclass(frozen=True)
class RecoveryResult:
    """Recovered sub-block indices and the reassembled symbol vector.

    ``residuals`` holds one value per sub-block for the two-step solvers;
    the one-shot solver reports a single joint residual instead, and has no
    equalizer condition number (``nan``).
    """

    s_indices: np.ndarray
    x_hat: np.ndarray
    residuals: np.ndarray
    condition_number: float


def zf_equalize(
    y: np.ndarray, h: ChannelRealization, gain: float = 1.0
) -> EqualizerOutput:
    """Zero-forcing equalizer: pseudo-inverse of a full-column-rank channel.

    Solves ``min ||h z - y||`` and divides out ``gain`` (the transmit power
    normalization).  Raises :class:`RankDeficientChannel` when the smallest
    singular value falls below ``RANK_TOL`` times the largest, or when the
    system is underdetermined.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    if y.size != h.nr:
        raise DimensionMismatch(f"received vector length {y.size} != nr {h.nr}")
    if h.m_tx > h.nr:
        raise RankDeficientChannel(
            f"channel with {h.m_tx} inputs and {h.nr} outputs cannot be column rank"
        )
    u, s, vh = np.linalg.svd(h.h, full_matrices=False)
    if s[-1] <= RANK_TOL * s[0]:
        raise RankDeficientChannel(
            f"singular value ratio {s[-1]:.3e}/{s[0]:.3e} below tolerance"
        )
    z_hat = vh.conj().T @ ((u.conj().T @ y) / s)
    return EqualizerOutput(z_hat / gain, float(s[0] / s[-1]))


def channel_is_usable(h: ChannelRealization) -> bool:
    """True when ZF equalization of ``h`` would not raise."""
    if h.m_tx > h.nr:
        return False
    s = np.linalg.svd(h.h, compute_uv=False)
    return bool(s[-1] > RANK_TOL * s[0])


def sensing_matrix(
    phi: MeasurementMatrix, dictionary: SubblockDictionary
) -> np.ndarray:
    """Per-sub-block candidate matrix: compression applied to every column."""
    return phi.phi @ dictionary.psi


def _resolve_sensing(phi, dictionary, sensing):
    if sensing is not None:
        return np.asarray(sensing, dtype=np.complex128)
    if phi is None or dictionary is None:
        raise ValueError("either a sensing matrix or (phi, dictionary) is required")
    return sensing_matrix(phi, dictionary)


def _ml_scan(z: np.ndarray, a: np.ndarray, colnorm2: np.ndarray) -> tuple[int, float]:
    # ||z - a_k||^2 = ||z||^2 - 2 Re<a_k, z> + ||a_k||^2, scanned over all k.
    res2 = float(z.real @ z.real + z.imag @ z.imag) - 2.0 * np.real(z.conj() @ a) + colnorm2
    k = int(np.argmin(res2))
    return k, float(np.sqrt(max(res2[k], 0.0)))


def recover_subblock_ml(
    z_hat_j: np.ndarray,
    phi: MeasurementMatrix | None = None,
    dictionary: SubblockDictionary | None = None,
    sensing: np.ndarray | None = None,
) -> tuple[int, float]:
    """Exact l0 recovery of a 1-sparse sub-block by exhaustive residual scan.

    Returns ``(k, residual)`` where ``k`` minimizes the Euclidean distance
    between ``z_hat_j`` and the candidate columns; ties go to the lowest
    index.  Cost is O(d * m/j), exact for the exhaustive dictionary where
    every valid sub-block is one column.
    """
    a = _resolve_sensing(phi, dictionary, sensing)
    z = np.asarray(z_hat_j, dtype=np.complex128).ravel()
    if z.size != a.shape[0]:
        raise DimensionMismatch(
            f"sub-block length {z.size} != sensing rows {a.shape[0]}"
        )
    colnorm2 = np.einsum("ij,ij->j", a.real, a.real) + np.einsum(
        "ij,ij->j", a.imag, a.imag
    )
    return _ml_scan(z, a, colnorm2)


def recover_subblock_omp(
    z_hat_j: np.ndarray,
    phi: MeasurementMatrix | None = None,
    dictionary: SubblockDictionary | None = None,
    k_max: int = 1,
    tol: float = 0.0,
    sensing: np.ndarray | None = None,
) -> tuple[list[int], np.ndarray]:
    """Orthogonal matching pursuit on the sub-block candidate matrix.

    Atoms are selected by normalized correlation ``|<a_k, r>| / ||a_k||``;
    coefficients are refit by least squares on the selected columns after
    every pick.  Stops after ``k_max`` atoms or when the residual norm drops
    to ``tol``.  Returns the selected column indices (in pick order) and the
    matching coefficients; both are empty when ``||z|| <= tol``.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    a = _resolve_sensing(phi, dictionary, sensing)
    z = np.asarray(z_hat_j, dtype=np.complex128).ravel()
    if z.size != a.shape[0]:
        raise DimensionMismatch(
            f"sub-block length {z.size} != sensing rows {a.shape[0]}"
        )
    norms = np.linalg.norm(a, axis=0)
    safe_norms = np.where(norms > 0, norms, np.inf)

    support: list[int] = []
    coeffs = np.empty(0, dtype=np.complex128)
    residual = z.copy()
    if np.linalg.norm(residual) <= tol:
        return support, coeffs
    for _ in range(k_max):
        corr = np.abs(a.conj().T @ residual) / safe_norms
        corr[support] = -1.0
        pick = int(np.argmax(corr))
        support.append(pick)
        coeffs = np.linalg.lstsq(a[:, support], z, rcond=None)[0]
        residual = z - a[:, support] @ coeffs
        if np.linalg.norm(residual) <= tol:
            break
    return support, coeffs


def demux(
    y: np.ndarray,
    h: ChannelRealization,
    phi: MeasurementMatrix,
    dictionary: SubblockDictionary,
    cfg: MuxConfig,
    solver: str = "ml",
    sensing: np.ndarray | None = None,
    omp_tol: float = 0.0,
    oneshot_cap: int = 1 << 20,
) -> RecoveryResult:
    """Full receiver: equalize, split into sub-blocks, recover, reassemble.

    ``solver`` picks the per-sub-block recovery: exact scan (``ml``), greedy
    (``omp`` with one atom), or the joint search on the unequalized receive
    vector (``oneshot``).  Note that for phase-symmetric alphabets the
    dictionary contains every column's complex rotations, which OMP's
    absolute-correlation rule cannot tell apart; the exact scan is the
    production detector and OMP remains a generic cross-check.
    """
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    if solver == "oneshot":
        return _demux_oneshot(y, h, phi, dictionary, cfg, cap=oneshot_cap)

    eq = zf_equalize(y, h, gain=transmit_gain(phi, cfg))
    blocks = eq.z_hat.reshape(cfg.j, cfg.subblock_rows)
    a = _resolve_sensing(phi, dictionary, sensing)
    colnorm2 = np.einsum("ij,ij->j", a.real, a.real) + np.einsum(
        "ij,ij->j", a.imag, a.imag
    )

    indices = np.empty(cfg.j, dtype=np.int64)
    residuals = np.empty(cfg.j)
    for jj in range(cfg.j):
        if solver == "ml":
            k, res = _ml_scan(blocks[jj], a, colnorm2)
        else:
            support, _ = recover_subblock_omp(
                blocks[jj], sensing=a, k_max=1, tol=omp_tol
            )
            k = support[0] if support else 0
            res = float(np.linalg.norm(blocks[jj] - a[:, k]))
        indices[jj] = k
        residuals[jj] = res
    x_hat = dictionary.psi[:, indices].T.ravel()
    return RecoveryResult(indices, x_hat, residuals, eq.condition_number)


def _demux_oneshot(y, h, phi, dictionary, cfg, cap):
    """Joint exact search over all per-block index combinations.

    Works on the raw receive vector with the composed channel, compression
    and dictionary, so no equalization (or channel invertibility) is
    needed.  The candidate count d**j grows exponentially with the number
    of sub-blocks and is rejected above ``cap``.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    if y.size != h.nr:
        raise DimensionMismatch(f"received vector length {y.size} != nr {h.nr}")
    d = dictionary.d
    total = d**cfg.j
    if total > cap:
        raise DictionaryTooLarge(
            f"joint search over {d}^{cfg.j} = {total} candidates exceeds cap {cap}"
        )
    g = transmit_gain(phi, cfg)
    # Per-block contribution of each candidate column to the received vector.
    contrib = []
    for jj in range(cfg.j):
        h_block = h.h[:, jj * cfg.subblock_rows : (jj + 1) * cfg.subblock_rows]
        contrib.append((h_block @ phi.phi * g) @ dictionary.psi)
    # Expand sums over blocks; block jj contributes with stride d**jj, so the
    # joint index decodes as k_jj = (k // d**jj) % d.
    s = contrib[0]
    for jj in range(1, cfg.j):
        s = (contrib[jj][:, :, None] + s[:, None, :]).reshape(h.nr, -1)
    colnorm2 = np.einsum("ij,ij->j", s.real, s.real) + np.einsum(
        "ij,ij->j", s.imag, s.imag
    )
    res2 = float(y.real @ y.real + y.imag @ y.imag) - 2.0 * np.real(y.conj() @ s) + colnorm2
    k = int(np.argmin(res2))
    indices = np.array([(k // d**jj) % d for jj in range(cfg.j)], dtype=np.int64)
    x_hat = dictionary.psi[:, indices].T.ravel()
    residual = float(np.sqrt(max(res2[k], 0.0)))
    return RecoveryResult(indices, x_hat, np.array([residual]), float("nan"))
