"""Acceptance gate: each criterion below must hold for a release.

Every test runs one named check from torusdyn.verify (the same suite
behind ``torusdyn verify``) and reports a single pass/fail line.  The
checks own their tolerances; the time budgets live here.
"""

import pytest

from torusdyn import verify


@pytest.fixture(scope="module")
def outcomes():
    names = [name for name, _ in verify.ACCEPTANCE_CHECKS]
    return {name: verify.run_check(name) for name in names}


def _require(outcomes, name, budget=None):
    o = outcomes[name]
    assert o.passed, f"{name}: {o.detail}"
    if budget is not None:
        assert o.seconds < budget, f"{name} took {o.seconds:.1f}s, budget {budget}s"
    return o


def test_affine_conjugation_invariance(outcomes):
    # 50 random affine conjugacies: index equal, exponent to 1e-9,
    # rotation part to 1e-8 after the predicted shift
    _require(outcomes, "conjugacy-invariance", budget=30.0)


def test_cohomology_solver_batch(outcomes):
    # 100 band-limited right-hand sides at the golden rotation: residual
    # sup below 1e-8 each; the zero-mean gate fires at 1e-10
    _require(outcomes, "cohomology-solver", budget=10.0)


def test_linearization_residuals(outcomes):
    # pinned parameter loops: half-tube conjugacy residual below 1e-6
    # with vanishing twist index
    _require(outcomes, "linearization")


def test_surgery_model_and_retargeting(outcomes):
    # coefficient identity exact, model conjugation to 1e-12, eight
    # retarget targets measured to 1e-6, holomorphy probe to 1e-6
    _require(outcomes, "surgery-model")


def test_multiplier_map_derivatives(outcomes):
    # analytic directional derivative vs finite differences to 1e-6
    # relative, section round trip to 1e-10, contour residuals below
    # 1e-8 of the contour radius
    _require(outcomes, "multiplier-map", budget=60.0)


def test_julia_rendering_quality(outcomes):
    # unforced disk area within 2% of pi at 512^2, Hausdorff probe
    # decreasing within one pixel diagonal, budgets nest exactly
    _require(outcomes, "julia-rendering")


def test_deterministic_artifacts(outcomes):
    # byte-identical rasters, cache hits identical to fresh computes on
    # 20 random configs, hashing independent of key order
    _require(outcomes, "determinism")


def test_total_acceptance_runtime(outcomes):
    total = sum(o.seconds for o in outcomes.values())
    assert total < 600.0, f"acceptance checks took {total:.0f}s"
