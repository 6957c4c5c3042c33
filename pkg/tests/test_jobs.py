"""Job configs: parsing, hashing, runner output contracts."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from torusdyn.cache import ArtifactCache, content_hash
from torusdyn.errors import ShapeMismatch, VanishingLambda
from torusdyn.jobs import (
    ClassifyJob,
    CohomologyJob,
    JuliaFiberJob,
    MultiplierJob,
    ParamSliceJob,
    SliceModel,
    SurgeryJob,
    parse_job,
    run_cached,
    run_job,
)

QMAP = {
    "family": "q_lambda",
    "alpha": {"named": "golden"},
    "coeffs": [{"kind": "fourier", "coeffs": [[0, 0.5, 0.0]]}],
}
FC0 = {
    "family": "f_c",
    "alpha": {"named": "golden"},
    "coeffs": [{"kind": "fourier", "coeffs": [[0, 0.0, 0.0]]}],
}


def test_parse_job_discriminates_on_task():
    cfg = parse_job({"task": "multiplier", "lambda": {"kind": "fourier", "coeffs": [[0, 0.5, 0]]}})
    assert isinstance(cfg, MultiplierJob)
    with pytest.raises(ValidationError):
        parse_job({"task": "no-such-task"})
    with pytest.raises(ValidationError):
        parse_job({"task": "classify"})  # map is required


def test_cache_config_round_trips_through_json():
    cfg = parse_job({"task": "multiplier", "lambda": {"kind": "fourier", "coeffs": [[0, 0.5, 0]]}})
    wire = json.loads(json.dumps(cfg.cache_config()))
    again = parse_job(wire)
    assert again.key() == cfg.key()
    assert "lambda" in wire and "lam" not in wire  # alias survives the dump


def test_multiplier_job_requires_one_source():
    with pytest.raises(ValidationError):
        parse_job({"task": "multiplier"})
    with pytest.raises(ValidationError):
        parse_job(
            {
                "task": "multiplier",
                "lambda": {"kind": "fourier", "coeffs": [[0, 0.5, 0]]},
                "map": QMAP,
            }
        )
    with pytest.raises(ValidationError):
        parse_job({"task": "multiplier", "curve": {"kind": "fourier", "coeffs": [[0, 0, 0]]}})


def test_unknown_fields_are_rejected():
    with pytest.raises(ValidationError):
        parse_job({"task": "classify", "map": QMAP, "bogus": 1})


def test_multiplier_runner_pinned_result():
    out = run_job(parse_job({"task": "multiplier", "lambda": {"kind": "fourier", "coeffs": [[0, 0.5, 0]]}}))
    assert out.result["m"] == 0
    assert out.result["kappa"] == [0.5, 0.0]
    assert out.result["Lambda"] == pytest.approx(np.log(0.5))
    assert out.result["rho"] == 0.0
    assert out.artifacts == {}


def test_classify_runner_contract():
    out = run_job(ClassifyJob(map=QMAP))
    r = out.result
    assert r["winding"] == 0
    assert r["in_H0star"] is True
    assert r["critical_orbit_bounded"] is True
    assert r["critical_orbit_converges_to_zero"] is True
    assert r["kappa_hat"] == [pytest.approx(0.5), pytest.approx(0.0)]
    assert r["lyapunov"] == pytest.approx(np.log(0.5))
    assert r["rho"] == 0.0
    assert r["map_hash"] == content_hash(QMAP)
    assert set(r["diagnostics"]) == {
        "escape_radius",
        "first_escape_iter",
        "final_sup",
        "n_iter",
        "n_theta",
    }
    json.dumps(r)  # no stray non-JSON values


def test_classify_winding_map_has_no_kappa_hat():
    spun = {
        "family": "q_lambda",
        "alpha": {"named": "golden"},
        "coeffs": [{"kind": "fourier", "coeffs": [[1, 1.2, 0.0]]}],
    }
    r = run_job(ClassifyJob(map=spun)).result
    assert r["winding"] == 1
    assert r["in_H0star"] is False
    assert r["kappa_hat"] is None


def test_classify_requires_quadratic_family():
    r = {"family": "f_c", "alpha": {"named": "golden"}, "coeffs": [{"kind": "fourier", "coeffs": [[0, 0.1, 0]]}]}
    with pytest.raises(ShapeMismatch):
        run_job(ClassifyJob(map=r))


def test_julia_runner_artifact():
    out = run_job(JuliaFiberJob(map=FC0, width=64, height=64, budget=50))
    assert out.result["bounded_fraction"] * 16.0 == pytest.approx(np.pi, rel=0.05)
    assert out.artifacts["julia.png"].startswith(b"\x89PNG")
    assert out.result["map_hash"] == content_hash(FC0)


def test_param_slice_runner_counts():
    slice_model = SliceModel(
        lambda0={"kind": "fourier", "coeffs": [[0, 0.5, 0]]},
        v1={"kind": "fourier", "coeffs": [[0, 1.0, 0]]},
        v2={"kind": "fourier", "coeffs": [[0, 0.0, 1.0]]},
        alpha="golden",
        rect=(-0.1, 0.1, -0.1, 0.1),
    )
    out = run_job(ParamSliceJob(slice=slice_model, ns=6, nt=6, n_iter=120, n_theta=64))
    counts = out.result["counts"]
    assert counts["member"] == 36
    assert out.result["member_fraction"] == 1.0
    assert out.artifacts["classes.png"].startswith(b"\x89PNG")


def test_cohomology_runner_contract(golden):
    cfg = CohomologyJob(rhs={"kind": "fourier", "coeffs": [[1, 0.2, 0.0]]})
    r = run_job(cfg).result
    assert r["residual_sup"] < 1e-12
    assert r["smallest_divisor"] > 0
    expect = 0.2 / (np.exp(2j * np.pi * float(golden)) - 1)
    got = {tuple(c[:1])[0]: complex(c[1], c[2]) for c in r["u"]["coeffs"]}
    assert abs(got[1] - expect) < 1e-12


def test_surgery_runner_contract():
    cfg = SurgeryJob(map=QMAP, kappa=(0.25, 0.0))
    r = run_job(cfg).result
    assert r["a_k"] == [pytest.approx(1.5), pytest.approx(0.0, abs=1e-12)]
    assert r["b_k"] == [pytest.approx(0.5), pytest.approx(0.0, abs=1e-12)]
    assert r["dilatation"] == pytest.approx(2.0)
    assert abs(complex(*r["measured_multiplier"]) - 0.25) < 1e-6
    assert r["residuals"]["retarget"] < 1e-6


def test_vanishing_lambda_surfaces_as_domain_error():
    bad = {
        "family": "q_lambda",
        "alpha": {"named": "golden"},
        "coeffs": [{"kind": "fourier", "coeffs": [[0, 0.0, 0.0]]}],
    }
    with pytest.raises(VanishingLambda):
        run_job(ClassifyJob(map=bad))


def test_run_cached_reuses_results(tmp_path):
    cache = ArtifactCache(tmp_path)
    cfg = ClassifyJob(map=QMAP)
    r1, e1, fresh1 = run_cached(cache, cfg)
    r2, e2, fresh2 = run_cached(cache, cfg)
    assert fresh1 and not fresh2
    assert r1 == r2
    assert e1.key == e2.key == cfg.key()


def test_out_path_participates_in_key():
    a = ClassifyJob(map=QMAP)
    b = ClassifyJob(map=QMAP, out="/tmp/somewhere.json")
    assert a.key() != b.key()
