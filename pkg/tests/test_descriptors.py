"""JSON wire formats for loops, rotation numbers, and maps."""

import numpy as np
import pytest

from torusdyn import Loop
from torusdyn.descriptors import (
    alpha_from_descriptor,
    loop_from_descriptor,
    loop_to_descriptor,
    map_from_descriptor,
    map_to_descriptor,
)
from torusdyn.dynamics import make_quadratic
from torusdyn.errors import BadDescriptor
from torusdyn.loops import GOLDEN_MEAN


def test_fourier_round_trip(rng):
    loop = Loop.from_modes({0: 0.5, 3: 0.1 - 0.2j, -5: 0.02j}, 128)
    desc = loop_to_descriptor(loop)
    assert desc["kind"] == "fourier"
    assert [c[0] for c in desc["coeffs"]] == [-5, 0, 3]  # sorted by mode
    back = loop_from_descriptor(desc)
    assert (back - loop).abs_max() < 1e-14


def test_samples_round_trip(rng):
    vals = rng.normal(size=64) + 1j * rng.normal(size=64)
    loop = Loop.from_samples(vals)
    back = loop_from_descriptor(loop_to_descriptor(loop, kind="samples"), n=64)
    assert (back - loop).abs_max() < 1e-12


def test_fourier_auto_grows_resolution():
    desc = {"kind": "fourier", "coeffs": [[100, 1.0, 0.0]]}
    loop = loop_from_descriptor(desc, n=64)
    assert loop.n >= 2 * 100 + 2
    assert abs(loop.coeff(100) - 1.0) < 1e-14


def test_zero_loop_round_trips():
    desc = loop_to_descriptor(Loop.constant(0.0, 32))
    assert desc["coeffs"] == []
    back = loop_from_descriptor(desc)
    assert back.abs_max() == 0.0


def test_malformed_loops_are_rejected():
    for junk in (
        {"kind": "fourier"},
        {"kind": "fourier", "coeffs": [[1, 0.5]]},
        {"kind": "fourier", "coeffs": 7},
        {"kind": "fourier", "coeffs": [["a", "b", "c"]]},
        {"kind": "samples", "values": []},
        {"kind": "wavelet"},
        {"no": "kind"},
        [],
    ):
        with pytest.raises(BadDescriptor):
            loop_from_descriptor(junk)


def test_alpha_descriptor_forms():
    assert float(alpha_from_descriptor("golden")) == pytest.approx(GOLDEN_MEAN)
    assert float(alpha_from_descriptor({"named": "golden"})) == pytest.approx(GOLDEN_MEAN)
    assert float(alpha_from_descriptor(0.37)) == pytest.approx(0.37)
    assert float(alpha_from_descriptor({"alpha": 0.37})) == pytest.approx(0.37)
    with pytest.raises(BadDescriptor):
        alpha_from_descriptor({"x": 1})


def test_map_round_trip():
    lam = Loop.from_modes({0: 0.5, 1: 0.1}, 64)
    p = make_quadratic(lam, GOLDEN_MEAN)
    desc = map_to_descriptor(p)
    assert desc["family"] == "q_lambda"
    q = map_from_descriptor(desc)
    theta = np.linspace(0, 1, 17)
    z = 0.3 + 0.1j
    assert np.max(np.abs(q.fiber(theta, z) - p.fiber(theta, z))) < 1e-12


def test_map_family_arity_enforced():
    good_loop = {"kind": "fourier", "coeffs": [[0, 0.5, 0]]}
    with pytest.raises(BadDescriptor):
        map_from_descriptor({"family": "q_lambda", "alpha": 0.5, "coeffs": [good_loop, good_loop]})
    with pytest.raises(BadDescriptor):
        map_from_descriptor({"family": "general", "alpha": 0.5, "coeffs": [good_loop]})
    with pytest.raises(BadDescriptor):
        map_from_descriptor({"family": "q_lambda", "alpha": 0.5, "coeffs": []})
