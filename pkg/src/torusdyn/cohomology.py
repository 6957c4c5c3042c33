"""Solver for the additive cohomological equation over an irrational rotation.

Solves u(theta + alpha) - u(theta) = g(theta) for zero-mean g by dividing
Fourier modes by e^{2 pi i k alpha} - 1.  The divisors are reported so that
near-resonant rotation numbers fail loudly instead of amplifying noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonzeroMean, SmallDivisorBreakdown
from .loops import AlphaLike, Loop, as_angle, circle_mean, rotate

MEAN_TOL = 1e-10
DIVISOR_FLOOR = 1e-8


@dataclass(frozen=True)
class CohomologySolution:
    """Zero-mean solution u plus the diagnostics of the mode division."""

    u: Loop
    residual_sup: float
    smallest_divisor: float
    modes_used: int

    def __post_init__(self):
        # zero mean is part of the contract, not merely a convention
        assert abs(circle_mean(self.u)) < 1e-12


def divisors(alpha: AlphaLike, k_max: int) -> np.ndarray:
    """|e^{2 pi i k alpha} - 1| for k = 1..k_max."""
    a = as_angle(alpha)
    k = np.arange(1, k_max + 1)
    return np.abs(np.exp(2j * np.pi * k * a) - 1.0)


def small_divisor_profile(alpha: AlphaLike, k_max: int) -> list[tuple[int, float]]:
    """(k, divisor) table for k = 1..k_max; minima sit at convergent denominators."""
    d = divisors(alpha, k_max)
    return [(int(k + 1), float(d[k])) for k in range(k_max)]


def solve_cohomological(g: Loop, alpha: AlphaLike, k_max: int | None = None) -> CohomologySolution:
    """Solve u(theta+alpha) - u(theta) = g(theta), g of zero mean.

    Modes with |k| <= k_max are divided (default N/4); the rest are dropped
    and show up in residual_sup, which is recomputed from the returned u.
    """
    mean = circle_mean(g)
    if abs(mean) >= MEAN_TOL:
        raise NonzeroMean(f"|mean g| = {abs(mean):.3e} >= {MEAN_TOL}")
    if k_max is None:
        k_max = g.n // 4
    k_max = min(int(k_max), g.n // 2 - 1)
    if k_max < 1:
        raise ValueError("k_max must be at least 1")

    a = as_angle(alpha)
    k = g.modes()
    div = np.exp(2j * np.pi * k * a) - 1.0
    use = (k != 0) & (np.abs(k) <= k_max)
    smallest = float(np.min(np.abs(div[use])))
    if smallest < DIVISOR_FLOOR:
        raise SmallDivisorBreakdown(
            f"divisor {smallest:.3e} below {DIVISOR_FLOOR} within |k| <= {k_max}"
        )

    u_coeffs = np.zeros(g.n, dtype=complex)
    u_coeffs[use] = g.coeffs[use] / div[use]
    u = Loop.from_coeff_array(u_coeffs)

    residual = rotate(u, a).samples - u.samples - g.samples
    return CohomologySolution(
        u=u,
        residual_sup=float(np.max(np.abs(residual))),
        smallest_divisor=smallest,
        modes_used=int(np.count_nonzero(use)),
    )
