"""Desk-scale uniqueness diagnostics: spark, restricted isometry, distinctness.

The spark of a matrix is the smallest number of linearly dependent columns;
a 1-sparse representation is unique whenever no two columns coincide.  The
restricted isometry constant of order k measures the worst deviation of any
k-column submatrix from an isometry.  Both are combinatorial quantities, so
the implementations here enumerate subsets outright and are intentionally
capped to small matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .csmux import MeasurementMatrix
from .dictionary import SubblockDictionary
from .errors import TooManyColumns

DEPENDENCE_TOL = 1e-10


@dataclass(frozen=True)
class RipEstimate:
    """Restricted isometry constant of order ``k``.

    ``exhaustive`` is True when every size-k support was enumerated, making
    the value exact for the given matrix rather than a sampled lower bound.
    """

    k: int
    delta: float
    exhaustive: bool
    n_supports: int


@dataclass(frozen=True)
class UniquenessReport:
    """Pairwise distinctness of the composed candidate columns."""

    unique: bool
    min_distance: float
    d: int
    threshold: float


def _rank(s: np.ndarray) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > DEPENDENCE_TOL * s[0]))


def spark(a: np.ndarray, max_columns: int = 20) -> int:
    """Smallest number of linearly dependent columns, by exhaustive search.

    A subset counts as dependent when its smallest singular value is at most
    ``DEPENDENCE_TOL`` times its largest.  If every subset of size up to
    ``rank(a)`` is independent the spark is ``rank(a) + 1``, which for a
    full-column-rank matrix is the conventional ``columns + 1``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[1] == 0:
        raise ValueError("spark needs a 2-D matrix with at least one column")
    cols = a.shape[1]
    if cols > max_columns:
        raise TooManyColumns(
            f"{cols} columns exceed the combinatorial search cap {max_columns}"
        )
    rank = _rank(np.linalg.svd(a, compute_uv=False))
    for size in range(1, rank + 1):
        for subset in combinations(range(cols), size):
            s = np.linalg.svd(a[:, subset], compute_uv=False)
            if s[-1] <= DEPENDENCE_TOL * s[0]:
                return size
    return rank + 1


def _delta_two_columns(gram: np.ndarray) -> float:
    # Exact singular values of every 2-column submatrix from its Gram matrix.
    diag = gram.diagonal().real
    i, j = np.triu_indices(gram.shape[0], k=1)
    mid = (diag[i] + diag[j]) / 2.0
    off = np.sqrt(((diag[i] - diag[j]) / 2.0) ** 2 + np.abs(gram[i, j]) ** 2)
    lam_hi = mid + off
    lam_lo = mid - off
    return float(max(np.max(lam_hi - 1.0), np.max(1.0 - lam_lo)))


def rip_constant(
    a: np.ndarray,
    k: int,
    normalize: bool = True,
    max_supports: int = 200_000,
    rng: np.random.Generator | None = None,
) -> RipEstimate:
    """Restricted isometry constant of order ``k`` by support enumeration.

    Columns are scaled to unit norm first unless ``normalize`` is False (the
    raw-scale variant).  All ``C(cols, k)`` supports are enumerated when
    that count is at most ``max_supports``; otherwise that many random
    supports are sampled and the estimate is a lower bound.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("rip_constant needs a 2-D matrix")
    cols = a.shape[1]
    if not 1 <= k <= cols:
        raise ValueError(f"order k={k} must be in [1, {cols}]")
    if normalize:
        norms = np.linalg.norm(a, axis=0)
        if np.any(norms == 0):
            raise ValueError("cannot column-normalize a matrix with a zero column")
        a = a / norms

    n_total = comb(cols, k)
    if n_total <= max_supports:
        if k == 1:
            delta = float(np.max(np.abs(np.linalg.norm(a, axis=0) ** 2 - 1.0)))
            return RipEstimate(k, delta, True, cols)
        if k == 2:
            return RipEstimate(k, _delta_two_columns(a.conj().T @ a), True, n_total)
        supports = combinations(range(cols), k)
        n_eval = n_total
        exhaustive = True
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        supports = (
            rng.choice(cols, size=k, replace=False) for _ in range(max_supports)
        )
        n_eval = max_supports
        exhaustive = False

    delta = 0.0
    for sup in supports:
        sub = a[:, list(sup)]
        lam = np.linalg.eigvalsh(sub.conj().T @ sub)
        delta = max(delta, float(lam[-1] - 1.0), float(1.0 - lam[0]))
    return RipEstimate(k, delta, exhaustive, n_eval)


def verify_uniqueness(
    phi: MeasurementMatrix,
    dictionary: SubblockDictionary,
    tol: float = DEPENDENCE_TOL,
    max_columns: int = 4096,
) -> UniquenessReport:
    """Check that all compressed candidate columns are pairwise distinct.

    Distinct columns mean every noiseless sub-block pins down a unique
    candidate index, so exact recovery has no ties.  Reports the minimum
    pairwise distance; the distinctness threshold is ``tol`` times the
    largest column norm.
    """
    a = phi.phi @ dictionary.psi
    d = a.shape[1]
    if d > max_columns:
        raise TooManyColumns(f"{d} columns exceed the pairwise scan cap {max_columns}")
    norms2 = np.einsum("ij,ij->j", a.real, a.real) + np.einsum(
        "ij,ij->j", a.imag, a.imag
    )
    min_d2 = np.inf
    chunk = 512
    for lo in range(0, d, chunk):
        hi = min(lo + chunk, d)
        gram = a[:, lo:hi].conj().T @ a
        d2 = norms2[lo:hi, None] + norms2[None, :] - 2.0 * gram.real
        # mask the diagonal and the already-scanned half
        for row in range(hi - lo):
            d2[row, : lo + row + 1] = np.inf
        min_d2 = min(min_d2, float(d2.min()))
    min_distance = float(np.sqrt(max(min_d2, 0.0))) if d > 1 else float("inf")
    threshold = tol * float(np.sqrt(np.max(norms2)))
    return UniquenessReport(
        unique=bool(min_distance > threshold),
        min_distance=min_distance,
        d=d,
        threshold=threshold,
    )
