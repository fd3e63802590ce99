"""Gaussian measurement matrix generation and sub-block multiplexing.

``l`` modulated symbols are split into ``j`` consecutive groups and each
group is compressed by the same real Gaussian matrix ``phi`` of shape
``(m/j, l/j)``, stacking the results into an ``m``-dimensional transmit
vector.  The output is rescaled so its average energy per complex dimension
is one regardless of the compression ratio, which keeps SNR comparisons
against an uncompressed system fair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadSubblockShape, DictionaryTooLarge, DimensionMismatch
from .modem import get_constellation


@dataclass(frozen=True)
class MuxConfig:
    """Physical-layer configuration of one multiplexing setup.

    ``m = min(nt, nr)`` spatial streams carry ``l >= m`` modulated streams,
    so the compression ratio is ``rho = m / l``.  ``j`` must divide both
    ``l`` and ``m`` so the sub-blocks have integral shape, and the per-block
    candidate count ``order**(l/j)`` must stay under ``dictionary_cap``.
    """

    nt: int
    nr: int
    l: int
    j: int
    phi_seed: int = 0
    constellation: str = "qpsk"
    dictionary_cap: int = 65536

    def __post_init__(self) -> None:
        if self.nt < 1 or self.nr < 1:
            raise ValueError("antenna counts must be positive")
        if self.l < 1 or self.j < 1:
            raise ValueError("stream and sub-block counts must be positive")
        m = self.m
        if self.l < m:
            raise ValueError(
                f"l={self.l} is smaller than m={m}; compression ratio must be in (0, 1]"
            )
        if self.l % self.j or m % self.j:
            raise BadSubblockShape(
                f"j={self.j} must divide both l={self.l} and m={m}"
            )
        order = get_constellation(self.constellation).order
        width = order ** (self.l // self.j)
        if width > self.dictionary_cap:
            raise DictionaryTooLarge(
                f"per-block dictionary width {order}^{self.l // self.j} = {width} "
                f"exceeds cap {self.dictionary_cap}"
            )

    @property
    def m(self) -> int:
        return min(self.nt, self.nr)

    @property
    def rho(self) -> float:
        return self.m / self.l

    @property
    def subblock_rows(self) -> int:
        return self.m // self.j

    @property
    def subblock_cols(self) -> int:
        return self.l // self.j


@dataclass(frozen=True)
class MeasurementMatrix:
    """Real compression matrix shared by all sub-blocks.

    ``scale`` records the target entry standard deviation; Gaussian draws
    use ``scale = 1/sqrt(rows)`` so each column has unit expected norm.
    """

    phi: np.ndarray
    scale: float

    def __post_init__(self) -> None:
        phi = np.asarray(self.phi, dtype=np.float64)
        if phi.ndim != 2:
            raise DimensionMismatch(f"phi must be 2-D, got shape {phi.shape}")
        object.__setattr__(self, "phi", phi)


def gen_phi(cfg: MuxConfig, rng: np.random.Generator | None = None) -> MeasurementMatrix:
    """Draw the i.i.d. Gaussian sub-block matrix for ``cfg``.

    Deterministic given ``cfg.phi_seed``; pass ``rng`` to draw from an
    existing stream instead.  Transmitter and receiver share the result.
    """
    rows, cols = cfg.subblock_rows, cfg.subblock_cols
    scale = 1.0 / np.sqrt(rows)
    if rng is None:
        rng = np.random.default_rng(cfg.phi_seed)
    return MeasurementMatrix(rng.standard_normal((rows, cols)) * scale, scale)


def identity_phi(cfg: MuxConfig) -> MeasurementMatrix:
    """Identity sub-block matrix (no compression); useful with rho = 1."""
    rows, cols = cfg.subblock_rows, cfg.subblock_cols
    return MeasurementMatrix(np.eye(rows, cols), 1.0 / np.sqrt(rows))


def transmit_gain(phi: MeasurementMatrix, cfg: MuxConfig) -> float:
    """Scalar applied after compression so E||z||^2 = m for unit-energy symbols.

    Equals ``sqrt(m / (j * ||phi||_F^2))``; deterministic given ``phi``, so
    the receiver can undo it exactly.
    """
    fro2 = float(np.sum(phi.phi * phi.phi))
    if fro2 == 0.0:
        raise ValueError("zero measurement matrix has no transmit gain")
    return float(np.sqrt(cfg.m / (cfg.j * fro2)))


def phi_to_text(phi: MeasurementMatrix) -> str:
    """Plain-text dump: one line per row, decimal floats, row-major.

    The format is meant for reproducing the exact matrix elsewhere, so
    entries are written with full round-trip precision.
    """
    return "\n".join(
        " ".join(repr(float(v)) for v in row) for row in phi.phi
    ) + "\n"


def phi_from_text(text: str) -> MeasurementMatrix:
    """Parse a :func:`phi_to_text` dump back into a matrix."""
    rows = [
        [float(tok) for tok in line.split()]
        for line in text.strip().splitlines()
        if line.strip()
    ]
    phi = np.array(rows, dtype=np.float64)
    if phi.ndim != 2 or phi.size == 0:
        raise ValueError("dump does not contain a matrix")
    return MeasurementMatrix(phi, 1.0 / np.sqrt(phi.shape[0]))


def multiplex(x: np.ndarray, phi: MeasurementMatrix, cfg: MuxConfig) -> np.ndarray:
    """Compress ``l`` symbols into ``m`` transmit dimensions, sub-block-wise.

    The real matrix acts identically on real and imaginary parts.  Output is
    the concatenation of ``phi @ x_group`` over the ``j`` groups, scaled by
    :func:`transmit_gain`.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    if x.size != cfg.l:
        raise DimensionMismatch(f"expected {cfg.l} symbols, got {x.size}")
    if phi.phi.shape != (cfg.subblock_rows, cfg.subblock_cols):
        raise DimensionMismatch(
            f"phi shape {phi.phi.shape} does not match "
            f"({cfg.subblock_rows}, {cfg.subblock_cols})"
        )
    groups = x.reshape(cfg.j, cfg.subblock_cols)
    z = groups @ phi.phi.T
    return z.ravel() * transmit_gain(phi, cfg)
