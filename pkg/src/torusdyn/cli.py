"""Command-line front end.

A thin client over the job layer: flags (or a --config JSON) become a
job config, the config runs through the artifact cache, and the result
is printed as JSON on standard output.

Exit codes: 0 success, 1 verification failure, 2 bad arguments,
3 domain error (machine-readable code in the JSON body).

Two-word forms used in module docs (``cohomology solve``,
``dynamics multiplier``, ``surgery retarget``, ``param classify``,
``param section``) collapse onto the flat subcommands.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .cache import ArtifactCache
from .descriptors import alpha_from_descriptor, loop_from_descriptor, loop_to_descriptor
from .errors import TorusDynError
from .jobs import (
    ClassifyJob,
    CohomologyJob,
    JuliaFiberJob,
    LinearizeJob,
    MultiplierJob,
    ParamSliceJob,
    SliceModel,
    SurgeryJob,
    parse_job,
    run_cached,
)
from .loops import ALPHA_PRESETS
from .multiplier import scaling_section

_ALIASES = {
    ("cohomology", "solve"): "cohomology",
    ("dynamics", "multiplier"): "multiplier",
    ("surgery", "retarget"): "surgery",
    ("param", "classify"): "classify",
    ("param", "section"): "section",
}


def _collapse_alias(argv: list[str]) -> list[str]:
    if len(argv) >= 2 and (argv[0], argv[1]) in _ALIASES:
        return [_ALIASES[(argv[0], argv[1])]] + argv[2:]
    return argv


class UsageError(Exception):
    """Bad flag values discovered after argparse (still exit code 2)."""


def _load_json_arg(text: str) -> Any:
    s = text.strip()
    if s.startswith("{") or s.startswith("["):
        try:
            return json.loads(s)
        except json.JSONDecodeError as exc:
            raise UsageError(f"inline JSON does not parse: {exc}") from exc
    path = Path(text)
    if not path.is_file():
        raise UsageError(f"no such file: {text}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{text} does not parse as JSON: {exc}") from exc


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return float(parts[0]), 0.0
        if len(parts) == 2:
            return float(parts[0]), float(parts[1])
    except ValueError:
        pass
    raise UsageError(f"expected 're' or 're,im', got {text!r}")


def _loop_descriptor(text: str) -> dict[str, Any]:
    if text.startswith("const:"):
        re_, im_ = _pair(text[len("const:") :])
        return {"kind": "fourier", "coeffs": [[0, re_, im_]]}
    desc = _load_json_arg(text)
    if not isinstance(desc, dict):
        raise UsageError("loop descriptor must be a JSON object")
    return desc


def _alpha_spec(text: str) -> Any:
    if text in ALPHA_PRESETS:
        return {"named": text}
    try:
        return {"alpha": float(text)}
    except ValueError:
        return _load_json_arg(text)


def _map_descriptor(ns: argparse.Namespace) -> dict[str, Any]:
    if getattr(ns, "map", None):
        desc = _load_json_arg(ns.map)
        if not isinstance(desc, dict):
            raise UsageError("map descriptor must be a JSON object")
        return desc
    if getattr(ns, "lam", None):
        return {
            "family": "q_lambda",
            "alpha": _alpha_spec(ns.alpha),
            "coeffs": [_loop_descriptor(ns.lam)],
        }
    raise UsageError("provide --map or --lambda")


def _bounds(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"expected 're0,re1,im0,im1', got {text!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise UsageError(f"bounds must be numbers: {text!r}") from exc


def _resolution(text: str) -> tuple[int, int]:
    for sep in ("x", "X", ","):
        if sep in text:
            w, _, h = text.partition(sep)
            try:
                return int(w), int(h)
            except ValueError:
                break
    try:
        side = int(text)
        return side, side
    except ValueError:
        raise UsageError(f"expected WxH or a single side length, got {text!r}") from None


def _emit(payload: dict[str, Any]) -> None:
    payload = {k: v for k, v in payload.items() if k != "task"}
    print(json.dumps(payload))


def _config_override(ns: argparse.Namespace, expected_task: str):
    if not getattr(ns, "config", None):
        return None
    data = _load_json_arg(ns.config)
    if not isinstance(data, dict):
        raise UsageError("--config must contain a JSON object")
    data.setdefault("task", expected_task)
    cfg = parse_job(data)
    if cfg.task != expected_task:
        raise UsageError(f"--config is a {cfg.task!r} job, expected {expected_task!r}")
    return cfg


def _run(ns: argparse.Namespace, cfg) -> dict[str, Any]:
    cache = ArtifactCache(getattr(ns, "cache", None))
    result, entry, _ = run_cached(cache, cfg)
    out = getattr(ns, "out", None) or cfg.out
    if out:
        _write_artifacts(cache, entry, cfg, result, out)
    return result


def _write_artifacts(cache, entry, cfg, result: dict[str, Any], out: str) -> None:
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    binary = [name for name in entry.artifacts if name != "result.json"]
    if binary:
        # single binary artifact: write it at the requested path + JSON sidecar
        target.write_bytes(cache.read_artifact(entry, binary[0]))
        sidecar = {k: v for k, v in result.items() if k != "task"}
        sidecar["content_hash"] = entry.key
        sidecar["config"] = cfg.cache_config()
        target.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    else:
        target.write_text(json.dumps(result, indent=2, sort_keys=True))


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--cache", help="cache directory (default: TORUSDYN_CACHE or tmp)")
    sub.add_argument("--config", help="full job config as JSON (file or inline)")
    sub.add_argument("--out", help="write the primary artifact (or result JSON) here")


def _cmd_render_julia(ns) -> int:
    cfg = _config_override(ns, "julia-fiber")
    if cfg is None:
        cfg = JuliaFiberJob(
            map=_map_descriptor(ns),
            theta=ns.theta,
            bounds=_bounds(ns.bounds),
            width=_resolution(ns.res)[0],
            height=_resolution(ns.res)[1],
            budget=ns.budget,
        )
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _slice_model(ns) -> SliceModel:
    if getattr(ns, "slice", None):
        data = _load_json_arg(ns.slice)
        return SliceModel.model_validate(data)
    if ns.lambda0 and ns.v1 and ns.v2:
        return SliceModel(
            lambda0=_loop_descriptor(ns.lambda0),
            v1=_loop_descriptor(ns.v1),
            v2=_loop_descriptor(ns.v2),
            alpha=_alpha_spec(ns.alpha),
            rect=_bounds(ns.rect),
        )
    raise UsageError("provide --slice or all of --lambda0/--v1/--v2")


def _cmd_render_param(ns) -> int:
    cfg = _config_override(ns, "param-slice")
    if cfg is None:
        ns_res = _resolution(ns.res)
        cfg = ParamSliceJob(
            slice=_slice_model(ns),
            ns=ns_res[0],
            nt=ns_res[1],
            n_iter=ns.n_iter,
            n_theta=ns.n_theta,
            window=_bounds(ns.window) if ns.window else None,
        )
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _cmd_classify(ns) -> int:
    cfg = _config_override(ns, "classify")
    if cfg is None:
        cfg = ClassifyJob(
            map=_map_descriptor(ns),
            n_iter=ns.n_iter,
            n_theta=ns.n_theta,
            conv_tol=ns.conv_tol,
        )
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _cmd_multiplier(ns) -> int:
    cfg = _config_override(ns, "multiplier")
    if cfg is None:
        if ns.map:
            cfg = MultiplierJob(
                map=_load_json_arg(ns.map),
                curve=_loop_descriptor(ns.curve) if ns.curve else None,
                alpha=_alpha_spec(ns.alpha),
            )
        else:
            if not ns.lam:
                raise UsageError("provide --lambda or --map")
            cfg = MultiplierJob(lam=_loop_descriptor(ns.lam), alpha=_alpha_spec(ns.alpha))
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _cmd_linearize(ns) -> int:
    cfg = _config_override(ns, "linearize")
    if cfg is None:
        cfg = LinearizeJob(
            map=_map_descriptor(ns),
            curve=_loop_descriptor(ns.curve) if ns.curve else None,
            k_max=ns.kmax,
        )
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _cmd_surgery(ns) -> int:
    cfg = _config_override(ns, "surgery")
    if cfg is None:
        if not ns.kappa:
            raise UsageError("--kappa is required")
        cfg = SurgeryJob(
            map=_map_descriptor(ns),
            curve=_loop_descriptor(ns.curve) if ns.curve else None,
            kappa=_pair(ns.kappa),
        )
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _cmd_cohomology(ns) -> int:
    cfg = _config_override(ns, "cohomology")
    if cfg is None:
        if not ns.g:
            raise UsageError("--g is required")
        cfg = CohomologyJob(
            rhs=_loop_descriptor(ns.g),
            alpha=_alpha_spec(ns.alpha),
            k_max=ns.kmax,
        )
    result = _run(ns, cfg)
    _emit(result)
    return 0


def _cmd_section(ns) -> int:
    # not a cached job: a direct loop-space computation printed as a loop descriptor
    if not ns.lam or not ns.kappa:
        raise UsageError("--lambda and --kappa are required")
    lam = loop_from_descriptor(_loop_descriptor(ns.lam))
    alpha = alpha_from_descriptor(_alpha_spec(ns.alpha))
    re_, im_ = _pair(ns.kappa)
    section = scaling_section(lam, complex(re_, im_), alpha, n_iter=ns.n_iter, n_theta=ns.n_theta)
    desc = loop_to_descriptor(section)
    if ns.out:
        Path(ns.out).write_text(json.dumps(desc, indent=2, sort_keys=True))
    print(json.dumps(desc))
    return 0


def _cmd_serve(ns) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(
        cache_root=ns.cache,
        max_inflight=ns.max_inflight,
        static_dir=ns.static,
    )
    uvicorn.run(app, host=ns.host, port=ns.port, log_level=ns.log_level)
    return 0


def _cmd_verify(ns) -> int:
    from . import verify

    names = None
    if ns.only:
        names = [n.strip() for n in ns.only.split(",") if n.strip()]
        known = {name for name, _ in verify.ALL_CHECKS}
        unknown = [n for n in names if n not in known]
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(unknown)}")
    outcomes = verify.run_all(names, emit=lambda line: print(line, file=sys.stderr))
    summary = {
        "passed": sum(1 for o in outcomes if o.passed),
        "failed": sum(1 for o in outcomes if not o.passed),
        "seconds": round(sum(o.seconds for o in outcomes), 3),
        "checks": [
            {"name": o.name, "passed": o.passed, "seconds": round(o.seconds, 3), "detail": o.detail}
            for o in outcomes
        ],
    }
    print(json.dumps(summary))
    return 0 if summary["failed"] == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusdyn",
        description="Quasiperiodically forced polynomial dynamics: render, classify, retarget.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("render-julia", help="escape-time raster of one Julia fiber")
    p.add_argument("--map", help="map descriptor (JSON or file)")
    p.add_argument("--lambda", dest="lam", help="lambda loop (const:<re[,im]>, JSON, or file)")
    p.add_argument("--alpha", default="golden", help="rotation number (preset, float, or JSON)")
    p.add_argument("--theta", type=float, default=0.0, help="base angle in turns")
    p.add_argument("--bounds", default="-2,2,-2,2", help="re0,re1,im0,im1")
    p.add_argument("--res", default="512x512", help="raster size WxH")
    p.add_argument("--budget", type=int, default=200, help="iteration budget")
    _common_flags(p)
    p.set_defaults(func=_cmd_render_julia)

    p = subs.add_parser("render-param", help="classification raster of a parameter slice")
    p.add_argument("--slice", help="slice definition (JSON or file)")
    p.add_argument("--lambda0", help="base loop of the slice")
    p.add_argument("--v1", help="first direction loop")
    p.add_argument("--v2", help="second direction loop")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--rect", default="-1,1,-1,1", help="slice rectangle s0,s1,t0,t1")
    p.add_argument("--window", help="sub-rectangle to rasterize")
    p.add_argument("--res", default="256x256", help="cells WxH")
    p.add_argument("--n-iter", dest="n_iter", type=int, default=500)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=256)
    _common_flags(p)
    p.set_defaults(func=_cmd_render_param)

    p = subs.add_parser("classify", help="membership probe for one parameter")
    p.add_argument("--map", help="map descriptor (JSON or file)")
    p.add_argument("--lambda", dest="lam", help="lambda loop (const:<re[,im]>, JSON, or file)")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--n-iter", dest="n_iter", type=int, default=500)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=256)
    p.add_argument("--conv-tol", dest="conv_tol", type=float, default=1e-6)
    _common_flags(p)
    p.set_defaults(func=_cmd_classify)

    p = subs.add_parser("multiplier", help="fibered multiplier data of a loop or curve")
    p.add_argument("--lambda", dest="lam", help="derivative loop (const:<re[,im]>, JSON, or file)")
    p.add_argument("--map", help="map descriptor; multiplier measured along --curve")
    p.add_argument("--curve", help="invariant curve loop (found by iteration when omitted)")
    p.add_argument("--alpha", default="golden")
    _common_flags(p)
    p.set_defaults(func=_cmd_multiplier)

    p = subs.add_parser("linearize", help="straighten an attracting curve (Koenigs data)")
    p.add_argument("--map", help="map descriptor (JSON or file)")
    p.add_argument("--lambda", dest="lam", help="shorthand: quadratic family from this loop")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--curve", help="invariant curve loop (found by iteration when omitted)")
    p.add_argument("--kmax", type=int, default=None, help="mode cutoff for the straightening")
    _common_flags(p)
    p.set_defaults(func=_cmd_linearize)

    p = subs.add_parser("surgery", help="retarget the multiplier of an attracting curve")
    p.add_argument("--map", help="map descriptor (JSON or file)")
    p.add_argument("--lambda", dest="lam", help="shorthand: quadratic family from this loop")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--curve", help="invariant curve loop (found by iteration when omitted)")
    p.add_argument("--kappa", help="target multiplier re,im")
    _common_flags(p)
    p.set_defaults(func=_cmd_surgery)

    p = subs.add_parser("cohomology", help="solve u(t+alpha) - u(t) = g(t)")
    p.add_argument("--g", help="right-hand side loop (JSON or file)")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--kmax", type=int, default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_cohomology)

    p = subs.add_parser("section", help="loop with prescribed multiplier via scaling")
    p.add_argument("--lambda", dest="lam", help="base member loop")
    p.add_argument("--kappa", help="target multiplier re,im")
    p.add_argument("--alpha", default="golden")
    p.add_argument("--n-iter", dest="n_iter", type=int, default=500)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=256)
    p.add_argument("--out", help="also write the loop descriptor here")
    p.set_defaults(func=_cmd_section)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--cache", default=None)
    p.add_argument("--static", default=None, help="directory with the explorer build")
    p.add_argument("--max-inflight", dest="max_inflight", type=int, default=8)
    p.add_argument("--log-level", dest="log_level", default="warning")
    p.set_defaults(func=_cmd_serve)

    p = subs.add_parser("verify", help="run the executable invariant suite")
    p.add_argument("--only", help="comma-separated check names")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    args = _collapse_alias(args)
    parser = build_parser()
    try:
        ns = parser.parse_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return ns.func(ns)
    except UsageError as exc:
        print(f"torusdyn: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"torusdyn: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except TorusDynError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}))
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
