"""Loop calculus: transforms, winding, continuous logs, rotation numbers."""

import math

import numpy as np
import pytest

from torusdyn import Loop, RotationNumber, circle_dist, circle_mean, continuous_log, rotate, winding_number
from torusdyn.errors import (
    AliasingSuspected,
    BadDescriptor,
    NonVanishingViolation,
    NonzeroWinding,
)
from torusdyn.loops import GOLDEN_MEAN


def test_sample_coeff_round_trip(rng):
    s = rng.normal(size=64) + 1j * rng.normal(size=64)
    loop = Loop.from_samples(s)
    assert np.allclose(loop.samples, s, atol=1e-14)
    back = Loop.from_coeff_array(loop.coeffs)
    assert np.allclose(back.samples, s, atol=1e-13)


def test_from_modes_and_coeff():
    loop = Loop.from_modes({0: 0.5, 3: 0.25j, -2: -0.125}, 64)
    assert loop.coeff(0) == 0.5
    assert loop.coeff(3) == 0.25j
    assert loop.coeff(-2) == -0.125
    assert loop.coeff(17) == 0
    # out-of-band modes read as zero rather than aliasing
    assert loop.coeff(40) == 0


def test_call_matches_samples():
    loop = Loop.from_modes({0: 1.0, 1: 0.3, -1: 0.2j}, 32)
    grid = np.arange(32) / 32
    assert np.max(np.abs(loop(grid) - loop.samples)) < 1e-13
    # interpolation at an off-grid point agrees with the explicit trig poly
    t = 0.137
    expect = 1.0 + 0.3 * np.exp(2j * np.pi * t) + 0.2j * np.exp(-2j * np.pi * t)
    assert abs(loop(t) - expect) < 1e-14


def test_arithmetic_and_exp(rng):
    f = Loop.from_modes({0: 1.0, 1: 0.1}, 64)
    g = Loop.from_modes({0: 0.5, -1: 0.2}, 64)
    assert np.allclose((f + g).samples, f.samples + g.samples)
    assert np.allclose((f * g).samples, f.samples * g.samples)
    assert np.allclose((f - 0.5).samples, f.samples - 0.5)
    assert np.allclose((f / 2.0).samples, f.samples / 2.0)
    assert np.allclose(f.exp().samples, np.exp(f.samples))
    assert abs(f.conj().coeff(-1) - np.conj(f.coeff(1))) < 1e-15


def test_resolution_change_is_spectral():
    loop = Loop.from_modes({0: 1.0, 2: 0.25}, 32)
    up = loop.with_resolution(128)
    assert up.n == 128
    assert up.coeff(2) == pytest.approx(0.25)
    down = up.with_resolution(32)
    assert np.max(np.abs(down.samples - loop.samples)) < 1e-14


def test_refined_matches_interpolant():
    loop = Loop.from_modes({0: 0.5, 1: 0.25, -3: 0.1}, 16)
    fine = loop.refined(4)
    grid = np.arange(64) / 64
    assert np.max(np.abs(fine - loop(grid))) < 1e-12


def test_winding_numbers():
    n = 256
    assert winding_number(Loop.constant(2.0, n)) == 0
    e1 = Loop.from_function(lambda t: np.exp(2j * np.pi * t), n)
    assert winding_number(e1) == 1
    assert winding_number(e1 * e1) == 2
    # large non-winding loop: 3 + e^{2 pi i t}
    assert winding_number(Loop.from_modes({0: 3.0, 1: 1.0}, n)) == 0
    inv = Loop.from_function(lambda t: np.exp(-2j * np.pi * t) * 0.7, n)
    assert winding_number(inv) == -1


def test_winding_rejects_vanishing():
    loop = Loop.from_modes({0: 1.0, 1: 1.0}, 64)  # hits zero at t = 1/2
    with pytest.raises(NonVanishingViolation):
        winding_number(loop)


def test_continuous_log_round_trip(rng):
    g = Loop.from_modes({0: 0.2, 1: 0.3 + 0.1j, -2: 0.15}, 256)
    back = continuous_log(g.exp())
    assert (back - g).abs_max() < 1e-10


def test_continuous_log_needs_zero_winding():
    e1 = Loop.from_function(lambda t: np.exp(2j * np.pi * t), 128)
    with pytest.raises(NonzeroWinding):
        continuous_log(e1)


def test_continuous_log_flags_undersampling():
    # two stacked near-cancellations swing the phase by more than pi/2
    # between refined grid points; the same loop resolved at 256 is fine
    tight = Loop.from_modes({0: 1.05, -4: 1.0}, 16)
    with pytest.raises(AliasingSuspected):
        continuous_log(tight * tight)
    fine = Loop.from_modes({0: 1.05, -4: 1.0}, 256)
    log = continuous_log(fine * fine)
    assert (log.exp() - fine * fine).abs_max() < 1e-10


def test_rotate_shifts_grid():
    loop = Loop.from_modes({1: 1.0}, 64)
    alpha = 0.25
    rot = rotate(loop, alpha)
    assert abs(rot.coeff(1) - np.exp(2j * np.pi * alpha)) < 1e-14
    assert abs(circle_mean(rot) - circle_mean(loop)) < 1e-14
    back = rotate(rot, -alpha)
    assert (back - loop).abs_max() < 1e-13


def test_circle_dist_wraps():
    assert circle_dist(0.9, 0.1) == pytest.approx(0.2, abs=1e-15)
    assert circle_dist(0.3, 0.3) == 0.0
    assert circle_dist(0.0, 0.5) == pytest.approx(0.5)


def test_golden_rotation_number():
    golden = RotationNumber.golden()
    assert float(golden) == pytest.approx(GOLDEN_MEAN)
    qs = [q for _, q in golden.convergents[:9]]
    assert qs == [1, 2, 3, 5, 8, 13, 21, 34, 55]
    delta, tau = golden.dioph
    assert delta > 0 and tau >= 2
    for p, q in golden.convergents[:10]:
        assert abs(float(golden) - p / q) >= delta / q**tau * (1 - 1e-12)


def test_named_rotation_numbers():
    assert float(RotationNumber.named("golden")) == pytest.approx(GOLDEN_MEAN)
    assert float(RotationNumber.named("silver")) == pytest.approx(math.sqrt(2) - 1)
    with pytest.raises(BadDescriptor):
        RotationNumber.named("plastic")
