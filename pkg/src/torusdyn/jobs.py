"""Job configs and their execution.

Every unit of work the service or CLI can run is a pydantic config with a
``task`` discriminator.  A config is pure data (descriptors, numbers), so
its canonical JSON is a stable cache key.  ``run_job`` turns a config into
a JSON-able result plus named binary artifacts; ``run_cached`` memoizes
through an :class:`ArtifactCache`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from .cache import ArtifactCache, CacheEntry, content_hash
from .cohomology import solve_cohomological
from .descriptors import (
    alpha_from_descriptor,
    loop_from_descriptor,
    loop_to_descriptor,
    map_from_descriptor,
)
from .dynamics import fibered_multiplier, find_invariant_curve, multiplier_from_derivative_loop
from .errors import ShapeMismatch
from .linearize import build_linearizer, linearizer_index
from .multiplier import membership_H0star
from .render import (
    SliceSpec,
    classification_png_bytes,
    escape_png_bytes,
    fiber_filled_julia,
    param_slice,
)
from .surgery import tube_local_surgery

RESULT_NAME = "result.json"


class _JobBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out: str | None = None  # artifact destination; honored by the CLI, ignored by runners

    def cache_config(self) -> dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)

    def key(self) -> str:
        return content_hash(self.cache_config())


def _ordered_box(value):
    v = tuple(float(x) for x in value)
    if len(v) != 4 or not all(np.isfinite(v)):
        raise ValueError("expected four finite numbers (min_x, max_x, min_y, max_y)")
    if not (v[0] < v[1] and v[2] < v[3]):
        raise ValueError("box must satisfy min_x < max_x and min_y < max_y")
    return v


class JuliaFiberJob(_JobBase):
    task: Literal["julia-fiber"] = "julia-fiber"
    map: dict[str, Any]
    theta: float = 0.0
    bounds: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    width: int = Field(512, ge=16, le=4096)
    height: int = Field(512, ge=16, le=4096)
    budget: int = Field(200, ge=1, le=100_000)

    @field_validator("bounds")
    @classmethod
    def _check_bounds(cls, v):
        return _ordered_box(v)


class SliceModel(BaseModel):
    """Affine 2-parameter slice through loop space."""

    model_config = ConfigDict(extra="forbid")

    lambda0: dict[str, Any]
    v1: dict[str, Any]
    v2: dict[str, Any]
    alpha: Union[float, str, dict[str, Any]] = "golden"
    rect: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)

    @field_validator("rect")
    @classmethod
    def _check_rect(cls, v):
        return _ordered_box(v)

    def to_spec(self) -> SliceSpec:
        return SliceSpec(
            lambda0=loop_from_descriptor(self.lambda0),
            v1=loop_from_descriptor(self.v1),
            v2=loop_from_descriptor(self.v2),
            alpha=alpha_from_descriptor(self.alpha),
            rect=tuple(self.rect),
        )


class ParamSliceJob(_JobBase):
    task: Literal["param-slice"] = "param-slice"
    slice: SliceModel
    ns: int = Field(256, ge=4, le=4096)
    nt: int = Field(256, ge=4, le=4096)
    n_iter: int = Field(500, ge=1, le=100_000)
    n_theta: int = Field(256, ge=8, le=8192)
    window: tuple[float, float, float, float] | None = None

    @field_validator("window")
    @classmethod
    def _check_window(cls, v):
        return None if v is None else _ordered_box(v)


class ClassifyJob(_JobBase):
    task: Literal["classify"] = "classify"
    map: dict[str, Any]
    n_iter: int = Field(500, ge=1, le=100_000)
    n_theta: int = Field(256, ge=8, le=8192)
    conv_tol: float = Field(1e-6, gt=0.0, le=1.0)


class MultiplierJob(_JobBase):
    """Multiplier data of a derivative loop (via ``lambda``) or of a curve of a map."""

    task: Literal["multiplier"] = "multiplier"
    lam: dict[str, Any] | None = Field(None, alias="lambda")
    alpha: Union[float, str, dict[str, Any]] = "golden"
    map: dict[str, Any] | None = None
    curve: dict[str, Any] | None = None

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.lam is None) == (self.map is None):
            raise ValueError("provide exactly one of 'lambda' or 'map'")
        if self.curve is not None and self.map is None:
            raise ValueError("'curve' only applies together with 'map'")
        return self


class LinearizeJob(_JobBase):
    task: Literal["linearize"] = "linearize"
    map: dict[str, Any]
    curve: dict[str, Any] | None = None
    k_max: int | None = Field(None, ge=1)


class SurgeryJob(_JobBase):
    task: Literal["surgery"] = "surgery"
    map: dict[str, Any]
    kappa: tuple[float, float]
    curve: dict[str, Any] | None = None


class CohomologyJob(_JobBase):
    task: Literal["cohomology"] = "cohomology"
    rhs: dict[str, Any]
    alpha: Union[float, str, dict[str, Any]] = "golden"
    k_max: int | None = Field(None, ge=1)


Job = Annotated[
    Union[
        JuliaFiberJob,
        ParamSliceJob,
        ClassifyJob,
        MultiplierJob,
        LinearizeJob,
        SurgeryJob,
        CohomologyJob,
    ],
    Field(discriminator="task"),
]

JOB_ADAPTER: TypeAdapter = TypeAdapter(Job)


def parse_job(data: dict[str, Any]):
    return JOB_ADAPTER.validate_python(data)


@dataclass
class JobOutcome:
    result: dict[str, Any]
    artifacts: dict[str, bytes]


def _c2pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _quadratic_lambda(desc: dict[str, Any]):
    p = map_from_descriptor(desc)
    if p.family != "q_lambda":
        raise ShapeMismatch("membership probes need the z^2 + lambda(theta) z family")
    return p, p.coeffs[1]


def _resolve_curve(p, curve_desc):
    if curve_desc is not None:
        return loop_from_descriptor(curve_desc)
    return find_invariant_curve(p)


def _run_julia(cfg: JuliaFiberJob) -> JobOutcome:
    p = map_from_descriptor(cfg.map)
    raster = fiber_filled_julia(
        p, cfg.theta, cfg.bounds, (cfg.width, cfg.height), budget=cfg.budget
    )
    result = {
        "task": cfg.task,
        "theta": cfg.theta % 1.0,
        "bounds": list(cfg.bounds),
        "width": cfg.width,
        "height": cfg.height,
        "budget": cfg.budget,
        "escape_radius": raster.escape_radius,
        "bounded_fraction": raster.bounded_fraction(),
        "map_hash": content_hash(cfg.map),
    }
    return JobOutcome(result, {"julia.png": escape_png_bytes(raster)})


def _run_param_slice(cfg: ParamSliceJob) -> JobOutcome:
    spec = cfg.slice.to_spec()
    raster = param_slice(
        spec, cfg.ns, cfg.nt, n_iter=cfg.n_iter, n_theta=cfg.n_theta, rect=cfg.window
    )
    counts = np.bincount(raster.classes.ravel(), minlength=4)
    result = {
        "task": cfg.task,
        "rect": list(raster.rect),
        "ns": cfg.ns,
        "nt": cfg.nt,
        "n_iter": cfg.n_iter,
        "n_theta": cfg.n_theta,
        "counts": {
            "invalid": int(counts[0]),
            "winding": int(counts[1]),
            "nonmember": int(counts[2]),
            "member": int(counts[3]),
        },
        "member_fraction": float(counts[3] / raster.classes.size),
        "slice_hash": content_hash(cfg.slice.model_dump(mode="json")),
    }
    return JobOutcome(result, {"classes.png": classification_png_bytes(raster.classes)})


def _run_classify(cfg: ClassifyJob) -> JobOutcome:
    p, lam = _quadratic_lambda(cfg.map)
    report = membership_H0star(
        lam, p.alpha, n_iter=cfg.n_iter, n_theta=cfg.n_theta, conv_tol=cfg.conv_tol
    )
    diagnostics = dict(report.diagnostics)
    if not math.isfinite(diagnostics.get("final_sup", 0.0)):
        diagnostics["final_sup"] = None  # every probe escaped; sup is meaningless
    result = {
        "task": cfg.task,
        "winding": report.winding,
        "lyapunov": report.lyapunov,
        "critical_orbit_bounded": report.critical_orbit_bounded,
        "critical_orbit_converges_to_zero": report.critical_orbit_converges_to_zero,
        "in_H0star": report.in_H0star,
        "diagnostics": diagnostics,
        "map_hash": content_hash(cfg.map),
    }
    if report.winding == 0:
        data = multiplier_from_derivative_loop(lam)
        result["kappa_hat"] = _c2pair(data.kappa)
        result["rho"] = data.rho
    else:
        result["kappa_hat"] = None
        result["rho"] = None
    return JobOutcome(result, {})


def _run_multiplier(cfg: MultiplierJob) -> JobOutcome:
    if cfg.lam is not None:
        lam = loop_from_descriptor(cfg.lam)
        alpha_from_descriptor(cfg.alpha)  # validated; the circle average is alpha-free
        data = multiplier_from_derivative_loop(lam)
    else:
        p = map_from_descriptor(cfg.map)
        gamma = _resolve_curve(p, cfg.curve)
        data = fibered_multiplier(p, gamma)
    result = {
        "task": cfg.task,
        "m": data.m,
        "kappa": _c2pair(data.kappa),
        "Lambda": data.lyapunov,
        "rho": data.rho,
    }
    return JobOutcome(result, {})


def _run_linearize(cfg: LinearizeJob) -> JobOutcome:
    p = map_from_descriptor(cfg.map)
    gamma = _resolve_curve(p, cfg.curve)
    lin = build_linearizer(p, gamma, k_max=cfg.k_max)
    result = {
        "task": cfg.task,
        "m": lin.data.m,
        "kappa": _c2pair(lin.data.kappa),
        "Lambda": lin.data.lyapunov,
        "rho": lin.data.rho,
        "R": lin.tube_radius,
        "conj_residual": lin.conj_residual,
        "koenigs_depth": lin.koenigs_depth,
        "critical_distance": lin.critical_distance,
        "remainder_sup": lin.remainder_sup,
        "index": linearizer_index(lin),
        "curve": loop_to_descriptor(gamma),
        "straightening": loop_to_descriptor(lin.u),
        "map_hash": content_hash(cfg.map),
    }
    return JobOutcome(result, {})


def _run_surgery(cfg: SurgeryJob) -> JobOutcome:
    p = map_from_descriptor(cfg.map)
    gamma = _resolve_curve(p, cfg.curve)
    kappa = complex(cfg.kappa[0], cfg.kappa[1])
    retargeted, measured = tube_local_surgery(p, gamma, kappa)
    model = retargeted.model
    result = {
        "task": cfg.task,
        "a_k": _c2pair(model.a_k),
        "b_k": _c2pair(model.b_k),
        "dilatation": model.dilatation,
        "measured_multiplier": _c2pair(measured.kappa),
        "residuals": {"retarget": float(abs(measured.kappa - kappa))},
        "kappa_requested": _c2pair(kappa),
        "kappa0": _c2pair(model.kappa0),
        "m": measured.m,
        "Lambda": measured.lyapunov,
        "rho": measured.rho,
        "map_hash": content_hash(cfg.map),
    }
    return JobOutcome(result, {})


def _run_cohomology(cfg: CohomologyJob) -> JobOutcome:
    g = loop_from_descriptor(cfg.rhs)
    alpha = alpha_from_descriptor(cfg.alpha)
    sol = solve_cohomological(g, alpha, k_max=cfg.k_max)
    result = {
        "task": cfg.task,
        "u": loop_to_descriptor(sol.u),
        "residual_sup": sol.residual_sup,
        "smallest_divisor": sol.smallest_divisor,
        "modes_used": sol.modes_used,
    }
    return JobOutcome(result, {})


_RUNNERS = {
    "julia-fiber": _run_julia,
    "param-slice": _run_param_slice,
    "classify": _run_classify,
    "multiplier": _run_multiplier,
    "linearize": _run_linearize,
    "surgery": _run_surgery,
    "cohomology": _run_cohomology,
}


def run_job(cfg) -> JobOutcome:
    return _RUNNERS[cfg.task](cfg)


def run_cached(cache: ArtifactCache, cfg) -> tuple[dict[str, Any], CacheEntry, bool]:
    """Execute through the cache; identical configs compute once."""

    def compute(config_dict) -> dict[str, bytes]:
        outcome = run_job(cfg)
        blobs = dict(outcome.artifacts)
        blobs[RESULT_NAME] = json.dumps(outcome.result, sort_keys=True).encode()
        return blobs

    entry, fresh = cache.get_or_compute(cfg.cache_config(), compute)
    result = json.loads(cache.read_artifact(entry, RESULT_NAME))
    return result, entry, fresh
