"""JSON wire formats for loops, rotation numbers, and map descriptors.

Loop descriptors:
    {"kind": "fourier", "coeffs": [[k, re, im], ...]}
    {"kind": "samples", "values": [[re, im], ...]}
Rotation specs:
    {"alpha": 0.5477}   or   {"named": "golden"}
Map descriptors:
    {"family": "q_lambda" | "f_c" | "general", "alpha": <spec>, "coeffs": [<loop>, ...]}
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .dynamics import QpfPolynomial, make_fc, make_quadratic
from .errors import BadDescriptor
from .loops import DEFAULT_N, Loop, RotationNumber

COEFF_EMIT_TOL = 1e-15


def loop_to_descriptor(loop: Loop, kind: str = "fourier") -> dict[str, Any]:
    if kind == "fourier":
        ks = loop.modes()
        order = np.argsort(ks)
        coeffs = []
        for i in order:
            c = loop.coeffs[i]
            if abs(c) > COEFF_EMIT_TOL:
                coeffs.append([int(ks[i]), float(c.real), float(c.imag)])
        return {"kind": "fourier", "coeffs": coeffs}
    if kind == "samples":
        return {"kind": "samples", "values": [[float(v.real), float(v.imag)] for v in loop.samples]}
    raise BadDescriptor(f"unknown loop descriptor kind {kind!r}")


def loop_from_descriptor(desc: dict[str, Any], n: int = DEFAULT_N) -> Loop:
    if not isinstance(desc, dict) or "kind" not in desc:
        raise BadDescriptor("loop descriptor must be an object with a 'kind' field")
    kind = desc["kind"]
    if kind == "fourier":
        if "coeffs" not in desc:
            raise BadDescriptor("fourier descriptor needs a 'coeffs' list (empty = zero loop)")
        modes: dict[int, complex] = {}
        try:
            for entry in desc["coeffs"]:
                if len(entry) != 3:
                    raise BadDescriptor("fourier coefficients are [k, re, im] triples")
                k, re, im = entry
                modes[int(k)] = complex(float(re), float(im))
        except (TypeError, ValueError) as exc:
            raise BadDescriptor(f"fourier coefficients do not parse: {exc}") from exc
        need = 2 * max((abs(k) for k in modes), default=0) + 2
        size = n
        while size < need:
            size *= 2
        return Loop.from_modes(modes, size)
    if kind == "samples":
        values = [complex(float(re), float(im)) for re, im in desc.get("values", [])]
        if not values:
            raise BadDescriptor("samples descriptor is empty")
        try:
            return Loop.from_samples(values)
        except ValueError as exc:
            raise BadDescriptor(str(exc)) from exc
    raise BadDescriptor(f"unknown loop descriptor kind {kind!r}")


def alpha_to_descriptor(alpha: RotationNumber) -> dict[str, Any]:
    return {"alpha": float(alpha)}


def alpha_from_descriptor(desc: Any) -> RotationNumber:
    if isinstance(desc, (int, float)):
        return RotationNumber.from_float(float(desc))
    if isinstance(desc, str):
        return RotationNumber.named(desc)
    if isinstance(desc, dict):
        if "named" in desc:
            return RotationNumber.named(str(desc["named"]))
        if "alpha" in desc:
            return RotationNumber.from_float(float(desc["alpha"]))
    raise BadDescriptor("rotation spec needs {'alpha': x} or {'named': preset}")


def map_to_descriptor(p: QpfPolynomial) -> dict[str, Any]:
    family = p.family
    if family == "q_lambda":
        coeffs = [loop_to_descriptor(p.coeffs[1])]
    elif family == "f_c":
        coeffs = [loop_to_descriptor(p.coeffs[0])]
    else:
        family = "general"
        coeffs = [loop_to_descriptor(c) for c in p.coeffs]
    return {"family": family, "alpha": alpha_to_descriptor(p.alpha), "coeffs": coeffs}


def map_from_descriptor(desc: dict[str, Any]) -> QpfPolynomial:
    if not isinstance(desc, dict) or "family" not in desc:
        raise BadDescriptor("map descriptor must be an object with a 'family' field")
    alpha = alpha_from_descriptor(desc.get("alpha"))
    family = desc["family"]
    raw = desc.get("coeffs", [])
    if not raw:
        raise BadDescriptor("map descriptor carries no coefficient loops")
    loops = [loop_from_descriptor(c) for c in raw]
    if family == "q_lambda":
        if len(loops) != 1:
            raise BadDescriptor("q_lambda takes exactly one loop (lambda)")
        return make_quadratic(loops[0], alpha)
    if family == "f_c":
        if len(loops) != 1:
            raise BadDescriptor("f_c takes exactly one loop (c)")
        return make_fc(loops[0], alpha)
    if family == "general":
        if len(loops) < 3:
            raise BadDescriptor("general maps need degree >= 2 (at least three loops)")
        return QpfPolynomial(loops, alpha, family="general")
    raise BadDescriptor(f"unknown family {family!r}")
