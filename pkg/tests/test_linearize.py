"""Straightening coordinates near an attracting invariant curve."""

import numpy as np
import pytest

from torusdyn import (
    Loop,
    RotationNumber,
    build_linearizer,
    evaluate_linearizer,
    find_invariant_curve,
    linearizer_index,
    make_quadratic,
)
from torusdyn.errors import KoenigsStall, OutsideTube, PositiveLyapunov
from torusdyn.linearize import transported_multiplier

from conftest import band_loop


@pytest.fixture(scope="module")
def lin_const():
    alpha = RotationNumber.golden()
    p = make_quadratic(Loop.constant(0.5, 256), alpha)
    gamma = find_invariant_curve(p)
    return p, build_linearizer(p, gamma)


def test_constant_half_frozen_values(lin_const):
    _, lin = lin_const
    # worked example: remainder sup 1, critical gap 1/4, tube radius
    # min(1, 1/4, (1 - 1/2) / 2) = 1/4
    assert lin.remainder_sup == pytest.approx(1.0, abs=1e-9)
    assert lin.critical_distance == pytest.approx(0.25, abs=1e-9)
    assert lin.tube_radius == pytest.approx(0.25, abs=1e-9)
    assert lin.data.kappa == pytest.approx(0.5)
    assert lin.data.m == 0
    assert lin.u.abs_max() < 1e-12  # constant derivative needs no straightening
    assert lin.conj_residual < 1e-6


def test_index_vanishes_on_small_perturbations(rng):
    alpha = RotationNumber.golden()
    lam = band_loop(rng, base=0.5, amp=0.08)
    p = make_quadratic(lam, alpha)
    lin = build_linearizer(p, find_invariant_curve(p))
    assert linearizer_index(lin) == 0
    assert lin.conj_residual < 1e-6


def test_koenigs_functional_equation(lin_const, rng):
    p, lin = lin_const
    theta = rng.uniform(0, 1, 30)
    z = lin.gamma(theta) + 0.4 * lin.tube_radius * np.exp(2j * np.pi * rng.uniform(0, 1, 30))
    chi = evaluate_linearizer(lin, theta, z)
    chi_next = evaluate_linearizer(lin, theta + float(lin.alpha), p.fiber(theta, z))
    target = lin.data.kappa * np.exp(2j * np.pi * lin.data.m * theta) * chi
    assert np.max(np.abs(chi_next - target)) < 1e-9


def test_forward_inverse_round_trip(lin_const, rng):
    _, lin = lin_const
    theta = rng.uniform(0, 1, 25)
    z = lin.gamma(theta) + 0.45 * lin.tube_radius * np.exp(2j * np.pi * rng.uniform(0, 1, 25))
    w = lin.forward(theta, z)
    back = lin.inverse(theta, w)
    assert np.max(np.abs(back - z)) < 1e-9


def test_points_outside_tube_are_rejected(lin_const):
    _, lin = lin_const
    with pytest.raises(OutsideTube):
        lin.forward(0.2, lin.gamma(0.2) + 2.0 * lin.tube_radius)
    # inverse of a far-away target diverges instead of silently extrapolating
    with pytest.raises(KoenigsStall):
        lin.inverse(0.2, 10.0 + 0j)


def test_expanding_curve_is_rejected():
    alpha = RotationNumber.golden()
    p = make_quadratic(Loop.constant(2.5, 128), alpha)
    with pytest.raises(PositiveLyapunov):
        build_linearizer(p, Loop.constant(0.0, 128))


def test_transported_multiplier_consistency(lin_const):
    p, lin = lin_const
    data = transported_multiplier(lin, p)
    assert abs(data.kappa - lin.data.kappa) < 1e-9
    assert data.m == lin.data.m
