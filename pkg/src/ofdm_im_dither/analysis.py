"""Pairwise error probability of the fundamental index-demodulation error.

The scenario: subcarrier ``u`` is idle but carries dither ``D_u``; subcarrier
``v`` is active with symbol ``X_v``. The competing hypothesis swaps the two,
putting ``X_hat_u`` on ``u`` and leaving ``v`` idle. Channels on ``u`` and
``v`` are independent unit-power Rayleigh, noise is ``CN(0, N0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod, sqrt
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import erfc

from .errors import (
    DegenerateCaseError,
    InvalidCaseError,
    InvalidDistanceError,
    InvalidInputError,
    NonPositiveMetricError,
)

SQRT2 = sqrt(2.0)


@dataclass(frozen=True)
class PepCase:
    Xu_hat_abs: float
    Xv_abs: float
    R: float
    N0: float

    def __post_init__(self):
        if min(self.Xu_hat_abs, self.Xv_abs, self.R, self.N0) < 0:
            raise InvalidCaseError(f"negative quantity in {self}")


@dataclass(frozen=True)
class PairwiseDistance:
    """Per-subcarrier squared distances ``|X_i - X_hat_i|**2`` between two hypotheses."""

    eta: tuple[float, ...]

    @classmethod
    def between(cls, X, X_hat) -> "PairwiseDistance":
        d = np.asarray(X, dtype=complex) - np.asarray(X_hat, dtype=complex)
        return cls(tuple(float(v) for v in np.abs(d) ** 2))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.eta) if e != 0)

    @property
    def order(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class MonteCarloEstimate:
    errors: int
    trials: int

    @property
    def p(self) -> float:
        return self.errors / self.trials

    @property
    def stderr(self) -> float:
        p = self.p
        return sqrt(p * (1 - p) / self.trials)


def q_function(x):
    """Standard normal tail probability."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / SQRT2)
    return float(out) if np.ndim(out) == 0 else out


def _gains(case: PepCase, Hu, Hv):
    a = np.abs(Hu) ** 2 * case.Xu_hat_abs ** 2
    b = np.abs(Hv) ** 2 * case.Xv_abs ** 2
    return a, b


def conditional_pep_exact(case: PepCase, Hu, Hv):
    """Conditional PEP given the two channel coefficients, dither on the boundary."""
    if case.N0 <= 0:
        raise InvalidCaseError("N0 must be positive")
    a, b = _gains(case, Hu, Hv)
    total = a + b
    if np.any(total == 0):
        raise DegenerateCaseError("both |Hu X_hat_u| and |Hv X_v| are zero")
    num = total - 2 * case.R * np.abs(Hu) ** 2 * case.Xu_hat_abs
    return q_function(num / (sqrt(2 * case.N0) * np.sqrt(total)))


def conditional_pep_approx(case: PepCase, Hu, Hv):
    """Conditional PEP with the dither folded into a shortened ``|X_hat_u|``."""
    if case.N0 <= 0:
        raise InvalidCaseError("N0 must be positive")
    eff = case.Xu_hat_abs - 2 * case.R
    if eff < 0:
        raise InvalidCaseError(f"|X_hat_u| - 2R = {eff} is negative")
    dist = np.abs(Hu) ** 2 * eff ** 2 + np.abs(Hv) ** 2 * case.Xv_abs ** 2
    return q_function(np.sqrt(dist) / sqrt(2 * case.N0))


def average_conditional_pep(case: PepCase, rtol: float = 1e-8) -> float:
    """Mean of :func:`conditional_pep_exact` over independent unit-power Rayleigh ``Hu, Hv``.

    Integrates over the exponential gains ``|Hu|**2`` and ``|Hv|**2``. At high
    SNR the mass sits in deep fades, so each axis is split at a breakpoint
    that scales with ``N0``.
    """
    if case.N0 <= 0:
        raise InvalidCaseError("N0 must be positive")
    xu, xv = case.Xu_hat_abs, case.Xv_abs
    if xu == 0 and xv == 0:
        raise DegenerateCaseError("both |X_hat_u| and |X_v| are zero")
    scale = sqrt(2 * case.N0)

    def integrand(v, u):
        total = u * xu * xu + v * xv * xv
        if total == 0:
            return 0.0
        num = total - 2 * case.R * u * xu
        return 0.5 * float(erfc(num / (scale * sqrt(total)) / SQRT2)) * np.exp(-u - v)

    s = min(1.0, 50 * case.N0)
    edges = [(0.0, s), (s, 1.0), (1.0, 40.0)] if s < 1 else [(0.0, 1.0), (1.0, 40.0)]
    return sum(integrate.dblquad(integrand, a, b, c, d, epsabs=0, epsrel=rtol)[0]
               for a, b in edges for c, d in edges)


def unconditional_pep(dist: PairwiseDistance, N0: float) -> float:
    """High-SNR Rayleigh PEP ``(4 N0)**order / (2 * prod(eta))``."""
    if N0 <= 0:
        raise InvalidCaseError("N0 must be positive")
    if dist.order == 0:
        raise InvalidDistanceError("identical hypotheses have no pairwise error")
    if any(dist.eta[i] < 0 for i in dist.support):
        raise InvalidDistanceError("squared distances must be non-negative")
    return (4 * N0) ** dist.order / (2 * prod(dist.eta[i] for i in dist.support))


def dither_pep(case: PepCase) -> float:
    eff = case.Xu_hat_abs - 2 * case.R
    if eff <= 0:
        raise InvalidCaseError(
            f"|X_hat_u| - 2R = {eff:g} <= 0: constraint too loose for the high-SNR expression"
        )
    if case.Xv_abs <= 0 or case.N0 <= 0:
        raise InvalidCaseError("|X_v| and N0 must be positive")
    return (4 * case.N0) ** 2 / (2 * eff ** 2 * case.Xv_abs ** 2)


def robustness_metric(A: float, R: float, min_amp: float = SQRT2) -> float:
    """Worst-case index-error metric ``(min_amp - 2R) * A`` of a subblock with floor ``A``."""
    if R < 0:
        raise InvalidInputError("R must be non-negative")
    return (min_amp - 2 * R) * A


def solve_constraint_levels(R0: float, levels: Sequence[float]) -> list[float]:
    """Radii that equalise :func:`robustness_metric` across amplitude levels.

    ``levels`` is ascending; ``levels[0]`` is both the smallest amplitude
    floor and the smallest constellation magnitude.
    """
    levels = [float(a) for a in levels]
    base = levels[0]
    if not 0 <= R0 < base / 2:
        raise NonPositiveMetricError(f"R0={R0} must lie in [0, {base / 2:.6f})")
    target = robustness_metric(base, R0, base)
    return [float(R0)] + [(base - target / a) / 2 for a in levels[1:]]


def solve_awgn_constraint_levels(R0: float, levels: Sequence[float]) -> list[float]:
    """Radii with equal margin ``A - R`` across levels (AWGN, power detection)."""
    if R0 < 0:
        raise InvalidInputError("R0 must be non-negative")
    levels = [float(a) for a in levels]
    margin = levels[0] - R0
    return [float(R0)] + [a - margin for a in levels[1:]]


def mc_pep_oracle(case: PepCase, trials: int, rng: np.random.Generator,
                  chunk: int = 1_000_000) -> MonteCarloEstimate:
    """Monte Carlo estimate of the dithered fundamental index-error PEP.

    Simulates the received pair ``(Y_u, Y_v)`` and compares the two ML
    metrics directly; nothing from the closed forms above is reused.
    ``X_hat_u`` sits on the diagonal of the first quadrant and ``D_u`` lies
    on the same diagonal with ``|Re| + |Im| = sqrt(2) R``.
    """
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    x_hat_u = case.Xu_hat_abs * (1 + 1j) / SQRT2
    d_u = case.R * (1 + 1j) / SQRT2
    x_v = case.Xv_abs * (1 + 1j) / SQRT2
    sigma = sqrt(case.N0 / 2)
    errors, left = 0, trials
    while left:
        t = min(chunk, left)
        g = rng.standard_normal((4, t)) / SQRT2
        hu, hv = g[0] + 1j * g[1], g[2] + 1j * g[3]
        z = rng.standard_normal((4, t)) * sigma
        yu = hu * d_u + (z[0] + 1j * z[1])
        yv = hv * x_v + (z[2] + 1j * z[3])
        right = np.abs(yu) ** 2 + np.abs(yv - hv * x_v) ** 2
        wrong = np.abs(yu - hu * x_hat_u) ** 2 + np.abs(yv) ** 2
        errors += int(np.count_nonzero(wrong < right))
        left -= t
    return MonteCarloEstimate(errors, trials)
