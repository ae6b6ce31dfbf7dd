"""Block Rayleigh fading in the frequency domain plus AWGN.

The cyclic prefix is assumed to cover the channel, so transmission reduces
to ``Y = H * X + Z`` per subcarrier.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import fsum

import numpy as np

from .core import SystemConfig
from .errors import InvalidInputError, InvalidTapsError


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    H: np.ndarray
    N0: float


def sample_channel(taps: int, N: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Frequency response of an equal-power ``taps``-tap Rayleigh channel.

    Each tap is ``CN(0, 1/taps)``, so ``E|H_f|^2 = 1``. ``size`` prepends
    batch dimensions.
    """
    if not 1 <= taps <= N:
        raise InvalidTapsError(f"taps={taps} outside [1, {N}]")
    shape = (() if size is None else tuple(np.atleast_1d(size))) + (taps,)
    h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2 * taps)
    return np.fft.fft(h, n=N, axis=-1)


def cmul(a, b) -> np.ndarray:
    """Elementwise complex product from real operations.

    NumPy's SIMD complex multiply may fuse operations differently depending
    on memory alignment; this form gives identical bits for identical inputs.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    out.real = a.real * b.real - a.imag * b.imag
    out.imag = a.real * b.imag + a.imag * b.real
    return out


def complex_noise(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circular complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def apply_channel(X_tx, ch: ChannelRealization, rng: np.random.Generator | None = None,
                  noise: np.ndarray | None = None) -> np.ndarray:
    """``Y = H * X_tx + Z`` with ``Z ~ CN(0, N0)``.

    ``noise`` may supply pre-drawn unit-variance samples instead of ``rng``.
    """
    X_tx = np.asarray(X_tx, dtype=complex)
    H = np.asarray(ch.H)
    if H.shape[-1] != X_tx.shape[-1]:
        raise InvalidInputError("channel and symbol lengths differ")
    Y = cmul(H, X_tx)
    if ch.N0 > 0:
        if noise is None:
            if rng is None:
                raise InvalidInputError("need rng or noise samples when N0 > 0")
            noise = complex_noise(rng, Y.shape)
        Y = Y + np.sqrt(ch.N0) * noise
    return Y


def energy_per_bit(X_tx, cfg: SystemConfig) -> float:
    """Mean total frequency-domain energy per transmitted symbol, divided by ``m``."""
    X_tx = np.atleast_2d(np.asarray(X_tx))
    per_symbol = np.sum(X_tx.real ** 2 + X_tx.imag ** 2, axis=-1)
    return fsum(per_symbol.tolist()) / len(per_symbol) / cfg.m


def calibrate_noise(EbN0_dB: float, X_tx, cfg: SystemConfig) -> float:
    """Noise power ``N0`` giving the requested Eb/N0 for the ensemble ``X_tx``.

    Dither energy on idle subcarriers counts towards ``E_b``.
    """
    return noise_for_eb(EbN0_dB, energy_per_bit(X_tx, cfg))


def noise_for_eb(EbN0_dB: float, Eb: float) -> float:
    return Eb / 10 ** (EbN0_dB / 10)
