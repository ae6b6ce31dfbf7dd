"""Dither constraints for idle subcarriers and ICF dither generation.

A constraint is one of three regions for a single idle subcarrier value:

* ``zero``    -- the value must be 0 (always used on active subcarriers),
* ``disk``    -- ``|d| <= R``,
* ``diamond`` -- ``|Re d| + |Im d| <= sqrt(2) * R``.

Regions are closed. Internally a batch of constraints is carried as a pair
of arrays ``(kind, bound)`` where ``bound`` is the threshold on the
region's own size measure (``R`` for disks, ``sqrt(2)*R`` for diamonds).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import _backend
from .analysis import solve_constraint_levels
from .core import Subblock, SystemConfig, qam_constellation
from .errors import InvalidConfigError, InvalidSubblockError
from .modem import ModulatedBatch, TimeSignal, dft, idft

KIND_CODES = {"zero": 0, "disk": 1, "diamond": 2}


@dataclass(frozen=True)
class DitherConstraint:
    kind: str = "zero"
    radius: float = 0.0

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise InvalidConfigError(f"unknown constraint kind {self.kind!r}")
        if self.radius < 0:
            raise InvalidConfigError("constraint radius must be non-negative")

    @property
    def bound(self) -> float:
        return sqrt(2) * self.radius if self.kind == "diamond" else self.radius

    def size(self, d: complex) -> float:
        if self.kind == "diamond":
            return abs(d.real) + abs(d.imag)
        return abs(d)

    def contains(self, d: complex, tol: float = 0.0) -> bool:
        if self.kind == "zero":
            return d == 0
        return self.size(d) <= self.bound + tol


@dataclass(frozen=True)
class ConstraintScheme:
    """Which dither region every idle subcarrier gets.

    ``radii`` holds ``(R,)`` for ``equivalent`` and one radius per amplitude
    level (ascending) for the two variable schemes.
    """

    tag: str = "none"
    radii: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if self.tag not in ("none", "equivalent", "awgn_variable", "proposed"):
            raise InvalidConfigError(f"unknown scheme {self.tag!r}")
        if any(r < 0 for r in self.radii):
            raise InvalidConfigError("dither radii must be non-negative")
        if self.tag == "equivalent" and len(self.radii) != 1:
            raise InvalidConfigError("equivalent scheme takes exactly one radius")
        if self.tag in ("awgn_variable", "proposed") and not self.radii:
            raise InvalidConfigError(f"{self.tag} scheme needs one radius per amplitude level")
        if self.tag == "proposed":
            metric = [(sqrt(2) - 2 * r) * a for r, a in zip(self.radii, _levels_for(len(self.radii)))]
            if max(metric) - min(metric) > 1e-9:
                raise InvalidConfigError(
                    f"radii {self.radii} do not equalise (sqrt(2) - 2R) * A across levels"
                )

    @classmethod
    def none(cls) -> "ConstraintScheme":
        return cls("none")

    @classmethod
    def equivalent(cls, R: float) -> "ConstraintScheme":
        return cls("equivalent", (R,))

    @classmethod
    def awgn_variable(cls, radii) -> "ConstraintScheme":
        return cls("awgn_variable", tuple(radii))

    @classmethod
    def proposed(cls, R0: float, M: int = 16) -> "ConstraintScheme":
        return cls("proposed", tuple(solve_constraint_levels(R0, qam_constellation(M).amplitude_levels)))

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "ConstraintScheme":
        return cls(cfg.scheme, cfg.R_levels)

    def region(self, level_index: int) -> DitherConstraint:
        if self.tag == "none":
            return DitherConstraint()
        if self.tag == "equivalent":
            return DitherConstraint("disk", self.radii[0])
        kind = "diamond" if self.tag == "proposed" else "disk"
        return DitherConstraint(kind, self.radii[level_index])


def _levels_for(count: int) -> np.ndarray:
    # amplitude levels of the smallest square QAM with `count` distinct levels
    M = 4
    while len(qam_constellation(M).amplitude_levels) < count:
        M *= 4
    return qam_constellation(M).amplitude_levels[:count]


def _level_index(amps: np.ndarray, levels: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(levels, amps - 1e-9)
    ok = (idx < len(levels)) & np.isclose(levels[np.minimum(idx, len(levels) - 1)], amps)
    if not np.all(ok):
        raise InvalidSubblockError(f"amplitude floor not an amplitude level: {amps[~ok]}")
    return idx


def _check_levels(scheme: ConstraintScheme, levels: np.ndarray):
    if scheme.tag in ("awgn_variable", "proposed") and len(scheme.radii) != len(levels):
        raise InvalidConfigError(
            f"{scheme.tag} scheme has {len(scheme.radii)} radii for {len(levels)} amplitude levels"
        )


def constraints_for(sb: Subblock, scheme: ConstraintScheme, M: int = 16) -> list[DitherConstraint]:
    levels = qam_constellation(M).amplitude_levels
    _check_levels(scheme, levels)
    level = int(_level_index(np.array([sb.amp_floor]), levels)[0])
    idle = scheme.region(level)
    return [DitherConstraint() if i in sb.active_set else idle for i in range(len(sb.values))]


def constraint_arrays(batch: ModulatedBatch, scheme: ConstraintScheme, cfg: SystemConfig):
    """Vectorised :func:`constraints_for` over a modulated batch.

    Returns ``(kind, bound)`` arrays shaped like ``batch.X``.
    """
    B, N = batch.X.shape
    kind = np.zeros((B, N), dtype=np.int8)
    bound = np.zeros((B, N))
    if scheme.tag == "none":
        return kind, bound
    levels = cfg.constellation.amplitude_levels
    _check_levels(scheme, levels)
    regions = [scheme.region(j) for j in range(len(levels))] if scheme.tag != "equivalent" else None
    if regions is None:
        reg = scheme.region(0)
        kind[:] = KIND_CODES[reg.kind]
        bound[:] = reg.bound
    else:
        lvl = _level_index(batch.amp_floor, levels)  # (B, g)
        kinds = np.array([KIND_CODES[r.kind] for r in regions], dtype=np.int8)
        bounds = np.array([r.bound for r in regions])
        # subcarrier i*g + beta belongs to subblock beta
        lvl_sc = np.tile(lvl, (1, cfg.n))
        kind[:] = kinds[lvl_sc]
        bound[:] = bounds[lvl_sc]
    kind[batch.active] = 0
    bound[batch.active] = 0.0
    return kind, bound


def as_arrays(constraints) -> tuple[np.ndarray, np.ndarray]:
    """Turn a sequence of :class:`DitherConstraint` into ``(kind, bound)``."""
    if isinstance(constraints, tuple) and len(constraints) == 2 and isinstance(constraints[0], np.ndarray):
        return constraints
    kind = np.array([KIND_CODES[c.kind] for c in constraints], dtype=np.int8)
    bound = np.array([c.bound for c in constraints], dtype=float)
    return kind, bound


def trim(d, c):
    """Scale ``d`` radially onto the region ``c`` when it lies outside it.

    ``c`` is a :class:`DitherConstraint`, or a ``(kind, bound)`` array pair
    for elementwise trimming of an array ``d``.
    """
    if isinstance(c, DitherConstraint):
        out = _backend.trim_batch(np.array([complex(d)]), np.array([c.bound]),
                                  np.array([KIND_CODES[c.kind]], dtype=np.int8))
        return complex(out[0])
    kind, bound = c
    d = np.asarray(d, dtype=np.complex128)
    flat = _backend.trim_batch(np.ascontiguousarray(d.ravel()),
                               np.ascontiguousarray(np.broadcast_to(bound, d.shape).ravel(), dtype=float),
                               np.ascontiguousarray(np.broadcast_to(kind, d.shape).ravel(), dtype=np.int8))
    return flat.reshape(d.shape)


def generate_dither_icf(X: np.ndarray, constraints, cfg: SystemConfig) -> np.ndarray:
    """Dither for the idle subcarriers of ``X`` by clipping and filtering.

    ``X`` is one symbol ``(N,)`` or a batch ``(B, N)``. Each iteration clips
    the oversampled time signal of ``X + D`` at ``clip_ratio`` times the RMS
    of the undithered signal, transforms back, discards the out-of-band bins,
    keeps the data bins at their original values and trims what lands on the
    idle bins into the allowed regions.
    """
    X = np.asarray(X, dtype=complex)
    kind, bound = as_arrays(constraints)
    kind = np.broadcast_to(kind, X.shape)
    bound = np.broadcast_to(bound, X.shape)
    D = np.zeros_like(X)
    if cfg.icf_iterations == 0 or not np.any(kind):
        return D
    free = kind != 0
    L = cfg.oversample
    ref = idft(X, L).mean_power
    thresh = cfg.clip_ratio * np.sqrt(ref)
    if thresh.ndim:
        thresh = thresh[..., None]
    for _ in range(cfg.icf_iterations):
        x = idft(X + D, L).samples
        mag = np.abs(x)
        over = mag > thresh
        x = np.where(over, x * (thresh / np.where(over, mag, 1.0)), x)
        spec = dft(TimeSignal(x, L))
        D = np.where(free, trim(spec, (kind, bound)), 0)
    return D
