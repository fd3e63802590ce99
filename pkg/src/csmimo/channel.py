"""Rayleigh flat-fading MIMO channel, AWGN, and the complex/real conversion.

The SNR convention used throughout: ``snr_db`` is the ratio of average
received signal energy per receive antenna to the complex noise variance
``sigma2``.  With every transmit vector normalized to unit average energy
per complex dimension and i.i.d. unit-variance channel gains, the received
signal energy per antenna equals the number of transmitted complex
dimensions, so ``sigma2 = m_tx / 10**(snr_db/10)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of an ``nr x m_tx`` complex channel matrix."""

    h: np.ndarray

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=np.complex128)
        if h.ndim != 2:
            raise DimensionMismatch(f"channel matrix must be 2-D, got shape {h.shape}")
        object.__setattr__(self, "h", h)

    @property
    def nr(self) -> int:
        return self.h.shape[0]

    @property
    def m_tx(self) -> int:
        return self.h.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Complex noise variance per receive antenna, tied to an SNR in dB."""

    snr_db: float
    sigma2: float

    def __post_init__(self) -> None:
        if not self.sigma2 >= 0.0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2!r}")

    @classmethod
    def from_snr(cls, snr_db: float, rx_energy: float) -> "NoiseSpec":
        """Derive sigma2 from the SNR given the received energy per antenna.

        ``rx_energy`` equals the number of unit-energy transmit dimensions
        under the convention described in the module docstring.  An infinite
        ``snr_db`` yields sigma2 = 0 (noiseless).
        """
        return cls(float(snr_db), float(rx_energy) / 10.0 ** (float(snr_db) / 10.0))


def sample_channel(nr: int, m_tx: int, rng: np.random.Generator) -> ChannelRealization:
    """Draw an nr x m_tx matrix of i.i.d. circularly-symmetric CN(0, 1) gains."""
    if nr < 1 or m_tx < 1:
        raise ValueError("channel dimensions must be positive")
    re = rng.standard_normal((nr, m_tx))
    im = rng.standard_normal((nr, m_tx))
    return ChannelRealization((re + 1j * im) * np.sqrt(0.5))


def apply_channel(
    h: ChannelRealization,
    z: np.ndarray,
    noise: NoiseSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Return ``h @ z + v`` with ``v`` i.i.d. CN(0, sigma2) per receive antenna."""
    z = np.asarray(z, dtype=np.complex128).ravel()
    if z.size != h.m_tx:
        raise DimensionMismatch(
            f"transmit vector length {z.size} does not match channel columns {h.m_tx}"
        )
    scale = np.sqrt(noise.sigma2 / 2.0)
    v = scale * (rng.standard_normal(h.nr) + 1j * rng.standard_normal(h.nr))
    return h.h @ z + v


def realify(a: np.ndarray) -> np.ndarray:
    """Map a complex matrix/vector to its real-valued equivalent.

    A complex ``n x m`` matrix becomes the real ``2n x 2m`` block matrix
    ``[[Re, -Im], [Im, Re]]``; a complex vector becomes ``[Re; Im]``.
    Matrix-vector products commute with this embedding.
    """
    a = np.asarray(a)
    if a.ndim == 1:
        return np.concatenate([a.real, a.imag]).astype(np.float64)
    if a.ndim == 2:
        return np.block([[a.real, -a.imag], [a.imag, a.real]]).astype(np.float64)
    raise DimensionMismatch(f"expected 1-D or 2-D input, got shape {a.shape}")


def complexify(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`realify` for stacked real vectors."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size % 2:
        raise DimensionMismatch(f"stacked real vector must have even length, got {v.size}")
    n = v.size // 2
    return v[:n] + 1j * v[n:]
