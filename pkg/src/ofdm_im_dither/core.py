"""Constellation, activation-pattern combinatorics and subblock types.

Everything here is a pure function of its arguments. Constellations are
kept unnormalized (16-QAM points are ``{±1±1j, ±1±3j, ±3±1j, ±3±3j}``);
SNR calibration happens in :mod:`ofdm_im_dither.channel`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, isqrt, log2
from typing import Sequence

import numpy as np

from .errors import (
    InvalidConfigError,
    InvalidIndexError,
    InvalidInputError,
    InvalidPatternError,
    InvalidSymbolError,
)

SCHEMES = ("none", "equivalent", "awgn_variable", "proposed")


@dataclass(frozen=True)
class SystemConfig:
    N: int = 128
    n: int = 4
    k: int = 2
    M: int = 16
    oversample: int = 4
    taps: int = 8
    icf_iterations: int = 5
    clip_ratio: float = 1.6
    scheme: str = "none"
    R_levels: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "R_levels", tuple(float(r) for r in self.R_levels))
        if self.n < 2 or self.N % self.n:
            raise InvalidConfigError(f"N={self.N} is not a multiple of n={self.n}")
        if not 1 <= self.k < self.n:
            raise InvalidConfigError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        side = isqrt(self.M)
        if self.M < 4 or side * side != self.M or side & (side - 1):
            raise InvalidConfigError(f"M={self.M} is not a square power-of-4 QAM order")
        if self.oversample < 1:
            raise InvalidConfigError("oversample must be >= 1")
        if not 1 <= self.taps <= self.N:
            raise InvalidConfigError(f"taps={self.taps} outside [1, N]")
        if self.icf_iterations < 0:
            raise InvalidConfigError("icf_iterations must be >= 0")
        if not self.clip_ratio > 0:
            raise InvalidConfigError("clip_ratio must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidConfigError(f"unknown scheme {self.scheme!r}")
        if any(r < 0 for r in self.R_levels):
            raise InvalidConfigError("dither radii must be non-negative")

    @property
    def g(self) -> int:
        return self.N // self.n

    @property
    def p1(self) -> int:
        return int(log2(comb(self.n, self.k)))

    @property
    def p2(self) -> int:
        return self.k * self.bits_per_symbol

    @property
    def p(self) -> int:
        return self.p1 + self.p2

    @property
    def m(self) -> int:
        return self.p * self.g

    @property
    def bits_per_symbol(self) -> int:
        return int(log2(self.M))

    @property
    def constellation(self) -> "Constellation":
        return qam_constellation(self.M)

    @property
    def codebook(self) -> np.ndarray:
        """Active index sets of the ``2**p1`` codebook SAPs, shape ``(2**p1, k)``."""
        return sap_codebook(self.n, self.k)


@dataclass(frozen=True, eq=False)
class Constellation:
    """Square Gray-labelled QAM.

    ``points[label]`` is the point whose bit label, read MSB first, is the
    integer ``label``; ``bit_map[label]`` holds those bits.
    """

    points: np.ndarray
    bit_map: np.ndarray
    amplitude_levels: np.ndarray

    @property
    def M(self) -> int:
        return len(self.points)

    @property
    def bits_per_symbol(self) -> int:
        return self.bit_map.shape[1]

    @property
    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


@dataclass(frozen=True, eq=False)
class Subblock:
    active_set: tuple[int, ...]
    symbols: tuple[complex, ...]
    values: np.ndarray
    amp_floor: float


def _gray_axis_levels(bits_per_axis: int) -> np.ndarray:
    # level for each axis label: reflected Gray decode, then odd-integer grid
    side = 1 << bits_per_axis
    levels = np.empty(side)
    for label in range(side):
        idx, shift = label, label >> 1
        while shift:
            idx ^= shift
            shift >>= 1
        levels[label] = 2 * idx - (side - 1)
    return levels


@lru_cache(maxsize=None)
def qam_constellation(M: int) -> Constellation:
    side = isqrt(M)
    if M < 4 or side * side != M or side & (side - 1):
        raise InvalidConfigError(f"M={M} is not a square power-of-4 QAM order")
    b = int(log2(M))
    half = b // 2
    axis = _gray_axis_levels(half)
    labels = np.arange(M)
    points = axis[labels >> half] + 1j * axis[labels & (side - 1)]
    bit_map = ((labels[:, None] >> np.arange(b - 1, -1, -1)) & 1).astype(np.uint8)
    levels = np.unique(np.round(np.abs(points) ** 2).astype(np.int64))
    for arr in (points, bit_map):
        arr.setflags(write=False)
    return Constellation(points, bit_map, np.sqrt(levels.astype(float)))


@lru_cache(maxsize=None)
def sap_codebook(n: int, k: int) -> np.ndarray:
    size = 1 << int(log2(comb(n, k)))
    book = np.array(list(combinations(range(n), k))[:size], dtype=np.intp)
    book.setflags(write=False)
    return book


def bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> s) & 1 for s in range(width - 1, -1, -1)], dtype=np.uint8)


def _combination_rank(pattern: Sequence[int], n: int) -> int:
    # lexicographic rank among all k-subsets of range(n)
    k = len(pattern)
    rank, prev = 0, -1
    for pos, c in enumerate(pattern):
        for skipped in range(prev + 1, c):
            rank += comb(n - 1 - skipped, k - 1 - pos)
        prev = c
    return rank


def sap_index_to_pattern(idx: int, n: int, k: int) -> tuple[int, ...]:
    """Return the ``idx``-th k-subset of ``range(n)`` in lexicographic order."""
    limit = 1 << int(log2(comb(n, k)))
    if not 0 <= idx < limit:
        raise InvalidIndexError(f"SAP index {idx} outside [0, {limit})")
    out, r, start = [], idx, 0
    for pos in range(k):
        c = start
        while True:
            block = comb(n - 1 - c, k - 1 - pos)
            if r < block:
                break
            r -= block
            c += 1
        out.append(c)
        start = c + 1
    return tuple(out)


def pattern_to_sap_index(pattern: Sequence[int], n: int, k: int) -> int | None:
    """Inverse of :func:`sap_index_to_pattern`.

    Returns ``None`` for a valid k-subset that is not in the codebook.
    """
    pat = tuple(int(i) for i in pattern)
    if len(pat) != k or len(set(pat)) != k or any(not 0 <= i < n for i in pat):
        raise InvalidPatternError(f"{pattern!r} is not a {k}-subset of range({n})")
    rank = _combination_rank(sorted(pat), n)
    return rank if rank < (1 << int(log2(comb(n, k)))) else None


def qam_map(bits: Sequence[int], M: int = 16) -> complex:
    const = qam_constellation(M)
    if len(bits) != const.bits_per_symbol:
        raise InvalidInputError(f"expected {const.bits_per_symbol} bits, got {len(bits)}")
    return complex(const.points[bits_to_int(bits)])


def symbol_label(point: complex, M: int = 16) -> int:
    const = qam_constellation(M)
    hit = np.flatnonzero(const.points == complex(point))
    if hit.size != 1:
        raise InvalidSymbolError(f"{point!r} is not a {M}-QAM point")
    return int(hit[0])


def qam_demap(point: complex, M: int = 16) -> np.ndarray:
    return qam_constellation(M).bit_map[symbol_label(point, M)].copy()


def amp_floor(symbols: Sequence[complex]) -> float:
    if len(symbols) == 0:
        raise InvalidInputError("amplitude floor of an empty symbol list")
    return float(min(abs(complex(s)) for s in symbols))
