"""Cohomological equation u(t + alpha) - u(t) = g(t) over the golden rotation."""

import numpy as np
import pytest

from torusdyn import Loop, divisors, rotate, solve_cohomological
from torusdyn.cohomology import DIVISOR_FLOOR, MEAN_TOL
from torusdyn.errors import NonzeroMean, SmallDivisorBreakdown


def test_single_mode_closed_form(golden):
    # g = e(t): u_1 = 1 / (e(alpha) - 1), all other modes zero
    g = Loop.from_modes({1: 1.0}, 256)
    sol = solve_cohomological(g, golden)
    expected = 1.0 / (np.exp(2j * np.pi * float(golden)) - 1.0)
    assert abs(sol.u.coeff(1) - expected) < 1e-14
    assert abs(sol.u.coeff(0)) == 0.0
    assert sol.residual_sup < 1e-13


def test_residual_identity(golden, rng):
    modes = {k: 0.05 * (rng.normal() + 1j * rng.normal()) for k in range(1, 33)}
    modes.update({-k: 0.05 * (rng.normal() + 1j * rng.normal()) for k in range(1, 33)})
    g = Loop.from_modes(modes, 256)
    sol = solve_cohomological(g, golden, k_max=64)
    lhs = rotate(sol.u, float(golden)) - sol.u
    assert (lhs - g).abs_max() < 1e-12
    assert sol.residual_sup < 1e-12


def test_mean_must_vanish(golden):
    g = Loop.from_modes({0: 1e-3, 1: 0.1}, 128)
    with pytest.raises(NonzeroMean):
        solve_cohomological(g, golden)
    # just under the gate passes; the tiny mean is dropped, not integrated
    g_ok = Loop.from_modes({0: MEAN_TOL / 3, 1: 0.1}, 128)
    sol = solve_cohomological(g_ok, golden)
    assert abs(sol.u.coeff(0)) == 0.0


def test_golden_divisor_records_at_fibonacci(golden):
    d = divisors(golden, 64)
    assert d.shape == (64,)
    records, best = [], np.inf
    for k in range(1, 65):
        if d[k - 1] < best:
            best = d[k - 1]
            records.append(k)
    assert records == [1, 2, 3, 5, 8, 13, 21, 34, 55]


def test_divisor_floor_enforced():
    # alpha almost exactly 1/2 drives the k = 2 divisor under the floor
    alpha = 0.5 + 1e-12
    g = Loop.from_modes({2: 1.0}, 64)
    with pytest.raises(SmallDivisorBreakdown):
        solve_cohomological(g, alpha)
    assert DIVISOR_FLOOR == 1e-8


def test_default_mode_cutoff(golden):
    g = Loop.from_modes({1: 0.3}, 256)
    sol = solve_cohomological(g, golden)
    # default cutoff is a quarter of the sampling resolution
    assert sol.modes_used == 2 * (256 // 4)
    assert sol.smallest_divisor > 0


def test_solution_mean_is_zero(golden, rng):
    modes = {k: 0.02 * rng.normal() for k in (1, -1, 5, -7)}
    g = Loop.from_modes(modes, 128)
    sol = solve_cohomological(g, golden)
    assert abs(sol.u.coeff(0)) == 0.0
