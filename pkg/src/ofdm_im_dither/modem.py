"""OFDM-IM bit mapping, interleaved concatenation, transforms and PAPR.

Transforms are unitary: ``idft`` zero-pads the spectrum at its centre to
``L*N`` bins and applies an orthonormal inverse DFT, so the sample energy
always equals the spectral energy. Every function accepts a single symbol
or a leading batch axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Subblock,
    SystemConfig,
    amp_floor,
    bits_to_int,
    int_to_bits,
    pattern_to_sap_index,
    qam_constellation,
    sap_index_to_pattern,
    symbol_label,
)
from .errors import InvalidInputError, InvalidLengthError, UndefinedPaprError, UnusedPatternError


@dataclass(frozen=True, eq=False)
class TimeSignal:
    samples: np.ndarray
    oversample: int = 1

    @property
    def N(self) -> int:
        return self.samples.shape[-1] // self.oversample

    @property
    def mean_power(self):
        return np.mean(np.abs(self.samples) ** 2, axis=-1)

    @property
    def energy(self):
        return np.sum(np.abs(self.samples) ** 2, axis=-1)


@dataclass(frozen=True, eq=False)
class ModulatedBatch:
    """Frequency-domain symbols plus the transmit-side labels used to make them.

    ``X`` has shape ``(B, N)``; ``sap`` is ``(B, g)``; ``labels`` is
    ``(B, g, k)`` constellation labels in ascending active-index order.
    ``active`` is a boolean ``(B, N)`` mask of active subcarriers.
    """

    X: np.ndarray
    sap: np.ndarray
    labels: np.ndarray
    active: np.ndarray
    amp_floor: np.ndarray  # (B, g)


def build_subblock(bits, cfg: SystemConfig) -> Subblock:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (cfg.p,):
        raise InvalidInputError(f"expected {cfg.p} bits, got shape {bits.shape}")
    pattern = sap_index_to_pattern(bits_to_int(bits[: cfg.p1]), cfg.n, cfg.k)
    const = cfg.constellation
    b = cfg.bits_per_symbol
    symbols = tuple(
        complex(const.points[bits_to_int(bits[cfg.p1 + j * b: cfg.p1 + (j + 1) * b])])
        for j in range(cfg.k)
    )
    values = np.zeros(cfg.n, dtype=complex)
    values[list(pattern)] = symbols
    return Subblock(pattern, symbols, values, amp_floor(symbols))


def demap_subblock(sb: Subblock, cfg: SystemConfig) -> np.ndarray:
    idx = pattern_to_sap_index(sb.active_set, cfg.n, cfg.k)
    if idx is None:
        raise UnusedPatternError(f"activation pattern {sb.active_set} is not in the codebook")
    parts = [int_to_bits(idx, cfg.p1)]
    parts += [qam_constellation(cfg.M).bit_map[symbol_label(s, cfg.M)] for s in sb.symbols]
    return np.concatenate(parts)


def interleave_concat(subblocks) -> np.ndarray:
    """Place element ``i`` of subblock ``beta`` on subcarrier ``i*g + beta``.

    Accepts a sequence of :class:`Subblock` or an array ``(..., g, n)``.
    """
    if not isinstance(subblocks, np.ndarray):
        subblocks = np.stack([sb.values if isinstance(sb, Subblock) else np.asarray(sb)
                              for sb in subblocks])
    g, n = subblocks.shape[-2:]
    return np.swapaxes(subblocks, -1, -2).reshape(*subblocks.shape[:-2], g * n)


def deinterleave(X: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Inverse of :func:`interleave_concat`; returns ``(..., g, n)``."""
    X = np.asarray(X)
    if X.shape[-1] != cfg.N:
        raise InvalidLengthError(f"expected length {cfg.N}, got {X.shape[-1]}")
    return np.swapaxes(X.reshape(*X.shape[:-1], cfg.n, cfg.g), -1, -2)


def modulate(bits: np.ndarray, cfg: SystemConfig) -> ModulatedBatch:
    """Vectorised bits -> OFDM-IM symbols for a batch of shape ``(B, m)``."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim == 1:
        bits = bits[None]
    B = bits.shape[0]
    if bits.shape[1] != cfg.m:
        raise InvalidInputError(f"expected {cfg.m} bits per symbol, got {bits.shape[1]}")
    blk = bits.reshape(B, cfg.g, cfg.p).astype(np.int64)
    sap = blk[..., : cfg.p1] @ (1 << np.arange(cfg.p1 - 1, -1, -1))
    b = cfg.bits_per_symbol
    sym_bits = blk[..., cfg.p1:].reshape(B, cfg.g, cfg.k, b)
    labels = sym_bits @ (1 << np.arange(b - 1, -1, -1))
    const = cfg.constellation
    patterns = cfg.codebook[sap]  # (B, g, k)
    sub = np.zeros((B, cfg.g, cfg.n), dtype=complex)
    np.put_along_axis(sub, patterns, const.points[labels], axis=-1)
    mask = np.zeros((B, cfg.g, cfg.n), dtype=bool)
    np.put_along_axis(mask, patterns, True, axis=-1)
    floor = np.abs(const.points[labels]).min(axis=-1)
    return ModulatedBatch(interleave_concat(sub), sap, labels, interleave_concat(mask), floor)


def labels_to_bits(sap: np.ndarray, labels: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Inverse of the bit packing in :func:`modulate`; returns ``(..., m)`` bits."""
    sap_bits = (sap[..., None] >> np.arange(cfg.p1 - 1, -1, -1)) & 1
    b = cfg.bits_per_symbol
    sym_bits = (labels[..., None] >> np.arange(b - 1, -1, -1)) & 1
    sym_bits = sym_bits.reshape(*labels.shape[:-1], cfg.k * b)
    out = np.concatenate([sap_bits, sym_bits], axis=-1)
    return out.reshape(*out.shape[:-2], cfg.m).astype(np.uint8)


def _split(N: int) -> int:
    return (N + 1) // 2


def idft(X: np.ndarray, L: int = 1) -> TimeSignal:
    X = np.asarray(X, dtype=complex)
    if L < 1:
        raise InvalidInputError("oversampling factor must be >= 1")
    N = X.shape[-1]
    if L > 1:
        h = _split(N)
        pad = np.zeros(X.shape[:-1] + ((L - 1) * N,), dtype=complex)
        X = np.concatenate([X[..., :h], pad, X[..., h:]], axis=-1)
    return TimeSignal(np.fft.ifft(X, norm="ortho"), L)


def dft(x: TimeSignal, full: bool = False) -> np.ndarray:
    """Forward transform; drops the pad bins unless ``full`` is set."""
    spec = np.fft.fft(x.samples, norm="ortho")
    if full or x.oversample == 1:
        return spec
    N = x.N
    h = _split(N)
    return np.concatenate([spec[..., :h], spec[..., spec.shape[-1] - (N - h):]], axis=-1)


def papr(x: TimeSignal):
    """PAPR in dB, normalised by each symbol's own mean sample power."""
    power = np.abs(x.samples) ** 2
    mean = power.mean(axis=-1)
    if np.any(mean == 0):
        raise UndefinedPaprError("PAPR of an all-zero signal")
    out = 10 * np.log10(power.max(axis=-1) / mean)
    return float(out) if np.ndim(out) == 0 else out
