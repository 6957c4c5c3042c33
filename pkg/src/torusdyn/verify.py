"""Executable invariant suite.

Every check below exercises one verifiable contract of the package at a
fixed seed and fixed tolerances, raising :class:`VerificationFailure`
with a diagnostic when the contract does not hold.  ``run_all`` backs
the ``verify`` CLI subcommand, and the acceptance tests call the same
functions, so the numbers asserted here are the numbers shipped.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cache import ArtifactCache, content_hash
from .cohomology import divisors, solve_cohomological
from .descriptors import (
    alpha_from_descriptor,
    alpha_to_descriptor,
    loop_from_descriptor,
    loop_to_descriptor,
    map_from_descriptor,
    map_to_descriptor,
)
from .dynamics import (
    FiberedConformalMap,
    conjugate_by,
    fibered_multiplier,
    invariance_residual,
    make_fc,
    make_quadratic,
    multiplier_from_derivative_loop,
    to_standard_form,
)
from .errors import BadDescriptor, LeftHyperbolicRegion, NonzeroMean, SmallDivisorBreakdown
from .jobs import (
    ClassifyJob,
    CohomologyJob,
    JuliaFiberJob,
    MultiplierJob,
    ParamSliceJob,
    SliceModel,
    run_cached,
    run_job,
)
from .linearize import build_linearizer, linearizer_index
from .loops import GOLDEN_MEAN, Loop, RotationNumber, circle_dist, circle_mean, continuous_log, rotate, winding_number
from .multiplier import (
    directional_derivative,
    holomorphy_residual,
    kappa_hat,
    membership_H0star,
    scaling_section,
)
from .render import fiber_filled_julia, hausdorff_distance
from .surgery import (
    kappa_holomorphy_residual,
    model_beltrami,
    model_inverse,
    model_map,
    surgery_coefficients,
    tube_local_surgery,
)

FIBONACCI_DIVISOR_MINIMA = [1, 2, 3, 5, 8, 13, 21, 34, 55]


class VerificationFailure(AssertionError):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise VerificationFailure(msg)


def _cnum(rng) -> complex:
    return complex(rng.standard_normal(), rng.standard_normal())


def _winding_loop(rng, m: int, scale: float, n: int = 256) -> Loop:
    """Non-vanishing loop with prescribed winding m: scale * e^{2 pi i m t} * e^{band}."""
    band = Loop.from_modes(
        {1: 0.15 * _cnum(rng), -1: 0.15 * _cnum(rng), 2: 0.08 * _cnum(rng), -2: 0.08 * _cnum(rng)},
        n,
    )
    tw = Loop.from_function(lambda t: np.exp(2j * np.pi * m * t), n)
    return tw * band.exp() * scale


def _member_loop(rng, n: int = 256) -> Loop:
    """Winding-zero loop with |lambda| bounded within [~0.2, ~1.1]."""
    c = rng.uniform(0.3, 0.7) * np.exp(2j * np.pi * rng.uniform())
    band = Loop.from_modes(
        {1: 0.2 * _cnum(rng), -1: 0.2 * _cnum(rng), 2: 0.1 * _cnum(rng)}, n
    )
    return band.exp() * c


# --------------------------------------------------------------------------
# acceptance criteria


def check_conjugacy_invariance() -> str:
    """Fibered-multiplier data transforms as (m, L, rho + eta*alpha - m*nu)."""
    rng = np.random.default_rng(20260819)
    alpha = RotationNumber.golden()
    worst_l = 0.0
    worst_r = 0.0
    for case in range(50):
        m = int(rng.integers(-2, 3))
        eta = int(rng.integers(-2, 3))
        lam = _winding_loop(rng, m, rng.uniform(0.3, 1.2))
        a_loop = _winding_loop(rng, eta, rng.uniform(0.5, 1.8))
        b_loop = Loop.from_modes(
            {0: 0.2 * _cnum(rng), 1: 0.1 * _cnum(rng), -2: 0.1 * _cnum(rng)}, lam.n
        )
        nu = float(rng.uniform())
        p = make_quadratic(lam, alpha)
        gamma0 = Loop.constant(0.0, lam.n)
        base = fibered_multiplier(p, gamma0)
        h = FiberedConformalMap(a_loop, b_loop, nu)
        p2 = conjugate_by(p, h)
        gamma2 = h.transport_curve(gamma0)
        got = fibered_multiplier(p2, gamma2)
        _check(got.m == base.m, f"case {case}: index changed {base.m} -> {got.m}")
        dl = abs(got.lyapunov - base.lyapunov)
        _check(dl < 1e-9, f"case {case}: |dLyapunov| = {dl:.3e} >= 1e-9")
        dr = circle_dist(got.rho, base.rho + eta * alpha.alpha - base.m * nu)
        _check(dr < 1e-8, f"case {case}: rho law violated by {dr:.3e} >= 1e-8")
        worst_l = max(worst_l, dl)
        worst_r = max(worst_r, dr)
    return f"50 conjugacies: max |dLyapunov| {worst_l:.2e}, max rho defect {worst_r:.2e}"


def check_cohomology_solver() -> str:
    """100 band-limited golden-mean solves below 1e-8; mean gate enforced."""
    rng = np.random.default_rng(97)
    alpha = RotationNumber.golden()
    worst = 0.0
    for case in range(100):
        modes: dict[int, complex] = {}
        for k in range(1, 65):
            modes[k] = 0.1 * _cnum(rng)
            modes[-k] = 0.1 * _cnum(rng)
        g = Loop.from_modes(modes, 1024)
        sol = solve_cohomological(g, alpha, k_max=64)
        worst = max(worst, sol.residual_sup)
        _check(sol.residual_sup < 1e-8, f"case {case}: residual {sol.residual_sup:.3e} >= 1e-8")
    try:
        solve_cohomological(Loop.from_modes({0: 2e-10, 1: 0.1}, 256), alpha)
        raised = False
    except NonzeroMean:
        raised = True
    _check(raised, "mean 2e-10 must raise NonzeroMean")
    solve_cohomological(Loop.from_modes({0: 0.4e-10, 1: 0.1}, 256), alpha)
    return f"100 solves, worst residual {worst:.2e}; mean gate at 1e-10 honoured"


def check_linearization() -> str:
    """Half-tube conjugacy residual < 1e-6 and index 0 on the three pinned loops."""
    alpha = RotationNumber.golden()
    cases = [
        Loop.constant(0.5, 256),
        Loop.from_modes({0: 0.5, 1: 0.1}, 256),
        Loop.from_modes({0: 0.3, 1: 0.05, -1: 0.05}, 256),
    ]
    residuals = []
    for i, lam in enumerate(cases):
        p = make_quadratic(lam, alpha)
        lin = build_linearizer(p, Loop.constant(0.0, lam.n))
        _check(
            lin.conj_residual < 1e-6,
            f"case {i}: conjugacy residual {lin.conj_residual:.3e} >= 1e-6",
        )
        idx = linearizer_index(lin)
        _check(idx == 0, f"case {i}: linearizer index {idx} != 0")
        residuals.append(f"{lin.conj_residual:.1e}")
    return "conjugacy residuals " + ", ".join(residuals) + "; all indices 0"


def check_surgery_model() -> str:
    """Coefficient identity, model conjugation, 8 retargets, holomorphy in kappa."""
    rng = np.random.default_rng(411)
    worst_id = 0.0
    for _ in range(10):
        k0 = rng.uniform(0.15, 0.85) * np.exp(2j * np.pi * rng.uniform())
        kt = rng.uniform(0.15, 0.85) * np.exp(2j * np.pi * rng.uniform())
        model = surgery_coefficients(complex(k0), complex(kt))
        _check(model.a_k - model.b_k == 1.0 + 0.0j, "a_k - b_k must equal 1 exactly")
        z = rng.uniform(0.1, 1.0, 100) * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
        tw = np.exp(2j * np.pi * rng.uniform(0, 1, 100))
        lhs = model_map(model, complex(k0) * tw * z)
        rhs = complex(kt) * tw * model_map(model, z)
        worst_id = max(worst_id, float(np.max(np.abs(lhs - rhs))))
    _check(worst_id < 1e-12, f"model conjugation identity residual {worst_id:.3e} >= 1e-12")

    alpha = RotationNumber.golden()
    lam = Loop.from_modes({0: 0.5, 1: 0.1}, 256)
    p = make_quadratic(lam, alpha)
    gamma = Loop.constant(0.0, 256)
    lin = build_linearizer(p, gamma)
    targets = [0.25, 0.4j, -0.35, 0.3 + 0.3j, -0.2 - 0.45j, 0.6, 0.15 - 0.2j, -0.5j]
    worst_ret = 0.0
    for kt in targets:
        _, measured = tube_local_surgery(p, gamma, complex(kt), lin=lin)
        worst_ret = max(worst_ret, abs(measured.kappa - complex(kt)))
    _check(worst_ret < 1e-6, f"retarget error {worst_ret:.3e} >= 1e-6")

    worst_cauchy = 0.0
    for theta, frac in [(0.1, 0.2 + 0.1j), (0.37, -0.15 + 0.2j), (0.73, 0.1 - 0.25j)]:
        z = complex(gamma(theta)) + frac * lin.tube_radius
        res = kappa_holomorphy_residual(lin, theta, z)
        worst_cauchy = max(worst_cauchy, res)
    _check(worst_cauchy < 1e-6, f"kappa-holomorphy residual {worst_cauchy:.3e} >= 1e-6")
    return (
        f"identity {worst_id:.1e}, retarget {worst_ret:.1e}, "
        f"kappa-contour {worst_cauchy:.1e}"
    )


def check_multiplier_map() -> str:
    """Derivative, surjectivity witness, scaling section, contour holomorphy."""
    rng = np.random.default_rng(555)
    worst_fd = 0.0
    for case in range(100):
        lam = _member_loop(rng)
        w = Loop.from_modes(
            {0: rng.uniform(0.3, 1.0), 1: 0.2 * _cnum(rng), -1: 0.2 * _cnum(rng), 3: 0.1 * _cnum(rng)},
            lam.n,
        )
        v = lam * w
        analytic = directional_derivative(lam, v)
        h = 1e-5
        fd = (kappa_hat(lam + v * h) - kappa_hat(lam - v * h)) / (2 * h)
        rel = abs(fd - analytic) / abs(analytic)
        worst_fd = max(worst_fd, rel)
        _check(rel < 1e-6, f"case {case}: derivative mismatch rel {rel:.3e} >= 1e-6")
        witness = directional_derivative(lam, lam)
        k0 = kappa_hat(lam)
        _check(
            abs(witness - k0) < 1e-12 * max(1.0, abs(k0)) and abs(k0) > 0.0,
            f"case {case}: surjectivity witness D[lam] != kappa_hat",
        )

    alpha = RotationNumber.golden()
    lam_star = Loop.from_modes({0: 0.5, 1: 0.1}, 256)
    worst_sec = 0.0
    for r in (0.25, 0.35, 0.45, 0.55):
        for phase in (0.0, 0.25, 0.5, 0.75):
            kappa = r * np.exp(2j * np.pi * phase)
            section = scaling_section(lam_star, complex(kappa), alpha)
            worst_sec = max(worst_sec, abs(kappa_hat(section) - kappa))
    _check(worst_sec < 1e-10, f"section round trip error {worst_sec:.3e} >= 1e-10")

    lam_c = _member_loop(rng)
    worst_ct = 0.0
    for _ in range(20):
        v = Loop.from_modes(
            {0: 0.5 * _cnum(rng), 1: 0.3 * _cnum(rng), -1: 0.3 * _cnum(rng), 2: 0.2 * _cnum(rng)},
            lam_c.n,
        )
        radius = 0.1 * lam_c.abs_min() / max(v.abs_max(), 1e-12)
        res = holomorphy_residual(lam_c, v, radius)
        worst_ct = max(worst_ct, res / radius)
        _check(res < 1e-8 * radius, f"contour residual {res:.3e} >= 1e-8 * {radius:.3e}")
    return (
        f"FD rel {worst_fd:.1e}, section {worst_sec:.1e}, "
        f"contour/radius {worst_ct:.1e} on 20 directions"
    )


def check_julia_rendering() -> str:
    """Disk area, Hausdorff theta-continuity, budget monotonicity."""
    alpha = RotationNumber.golden()
    bounds = (-2.0, 2.0, -2.0, 2.0)

    p0 = make_fc(Loop.constant(0.0, 64), alpha)
    r0 = fiber_filled_julia(p0, 0.0, bounds, (512, 512), budget=200)
    area = r0.bounded_fraction() * 16.0
    _check(
        abs(area - math.pi) < 0.02 * math.pi,
        f"filled disk area {area:.4f} misses pi by more than 2%",
    )

    lam = Loop.from_modes({0: 0.5, 1: 0.1}, 256)
    p = make_quadratic(lam, alpha)
    base = fiber_filled_julia(p, 0.3, bounds, (512, 512), budget=200)
    dists = []
    for delta in (0.04, 0.02, 0.01):
        r = fiber_filled_julia(p, 0.3 + delta, bounds, (512, 512), budget=200)
        dists.append(hausdorff_distance(base.bounded_points(), r.bounded_points()))
    tol = base.pixel_diag()
    _check(
        dists[1] <= dists[0] + tol and dists[2] <= dists[1] + tol,
        f"Hausdorff probe not monotone within one pixel: {dists}",
    )
    _check(dists[2] < 0.1, f"Hausdorff at delta=0.01 is {dists[2]:.3f} >= 0.1")

    small = fiber_filled_julia(p, 0.3, bounds, (100, 100), budget=60)
    large = fiber_filled_julia(p, 0.3, bounds, (100, 100), budget=240)
    ea = small.escape_iterations
    eb = large.escape_iterations
    expected = np.where((eb > 0) & (eb <= 60), eb, 0).astype(ea.dtype)
    _check(
        np.array_equal(ea, expected),
        "budget monotonicity violated on the 100x100 probe raster",
    )
    return (
        f"area {area:.4f} (pi {math.pi:.4f}), Hausdorff {['%.4f' % d for d in dists]}, "
        f"budgets consistent on 10^4 pixels"
    )


def _disk_loop_desc(value: complex) -> dict:
    return loop_to_descriptor(Loop.constant(value, 64))


def _random_job(rng, i: int):
    kind = i % 4
    if kind == 0:
        lam = Loop.from_modes({0: rng.uniform(0.3, 0.8), 1: 0.1 * _cnum(rng)}, 64)
        return MultiplierJob(lam=loop_to_descriptor(lam), alpha="golden")
    if kind == 1:
        g = Loop.from_modes({1: _cnum(rng), -3: 0.5 * _cnum(rng)}, 64)
        return CohomologyJob(rhs=loop_to_descriptor(g), alpha="golden", k_max=16)
    if kind == 2:
        lam = Loop.from_modes({0: rng.uniform(0.3, 0.6), 1: 0.05 * _cnum(rng)}, 64)
        desc = {
            "family": "q_lambda",
            "alpha": {"named": "golden"},
            "coeffs": [loop_to_descriptor(lam)],
        }
        return ClassifyJob(map=desc, n_iter=150, n_theta=64)
    desc = {
        "family": "q_lambda",
        "alpha": {"named": "golden"},
        "coeffs": [_disk_loop_desc(0.4 + 0.05j * (i % 3))],
    }
    return JuliaFiberJob(map=desc, theta=0.1 * i, width=64, height=64, budget=50)


def _shuffled(obj, rng):
    if isinstance(obj, dict):
        keys = list(obj)
        rng.shuffle(keys)
        return {k: _shuffled(obj[k], rng) for k in keys}
    if isinstance(obj, list):
        return [_shuffled(v, rng) for v in obj]
    return obj


def check_determinism() -> str:
    """Byte-identical artifacts; cache hits match fresh computes on 20 configs."""
    rng = np.random.default_rng(777)
    desc = {
        "family": "q_lambda",
        "alpha": {"named": "golden"},
        "coeffs": [loop_to_descriptor(Loop.from_modes({0: 0.5, 1: 0.1}, 64))],
    }
    jcfg = JuliaFiberJob(map=desc, theta=0.2, width=128, height=128, budget=80)
    o1, o2 = run_job(jcfg), run_job(jcfg)
    _check(
        o1.artifacts["julia.png"] == o2.artifacts["julia.png"],
        "identical julia configs produced different PNG bytes",
    )
    slice_model = SliceModel(
        lambda0=_disk_loop_desc(0.4),
        v1=_disk_loop_desc(0.35),
        v2=_disk_loop_desc(0.35j),
        alpha="golden",
        rect=(-1.0, 1.0, -1.0, 1.0),
    )
    pcfg = ParamSliceJob(slice=slice_model, ns=48, nt=48, n_iter=120, n_theta=64)
    q1, q2 = run_job(pcfg), run_job(pcfg)
    _check(
        q1.artifacts["classes.png"] == q2.artifacts["classes.png"] and q1.result == q2.result,
        "identical slice configs produced different artifacts",
    )

    with tempfile.TemporaryDirectory() as td:
        cache = ArtifactCache(td)
        for i in range(20):
            cfg = _random_job(rng, i)
            fresh = run_job(cfg)
            r1, e1, new1 = run_cached(cache, cfg)
            r2, e2, new2 = run_cached(cache, cfg)
            _check(new1 and not new2, f"config {i}: cache freshness wrong ({new1}, {new2})")
            _check(r1 == r2 == fresh.result, f"config {i}: cached result drifted")
            for name, blob in fresh.artifacts.items():
                _check(
                    cache.read_artifact(e1, name) == cache.read_artifact(e2, name) == blob,
                    f"config {i}: artifact {name} not byte-identical",
                )
            perm = _shuffled(cfg.cache_config(), rng)
            _check(
                content_hash(perm) == cfg.key(),
                f"config {i}: canonical hash depends on key order",
            )
    return "PNG determinism, 20-config cache coherence, order-free hashing"


# --------------------------------------------------------------------------
# module invariants


def check_loop_calculus() -> str:
    rng = np.random.default_rng(31)
    vals = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    loop = Loop.from_samples(vals)
    _check(float(np.max(np.abs(loop.samples - vals))) < 1e-12, "sample round trip failed")
    back = Loop.from_coeff_array(loop.coeffs)
    _check(float(np.max(np.abs(back.samples - vals))) < 1e-10, "coefficient round trip failed")

    _check(winding_number(Loop.from_modes({0: 3.0, 1: 1.0}, 256)) == 0, "winding(3 + e) != 0")
    two = Loop.from_function(lambda t: np.exp(4j * np.pi * t) * (1.5 + 0.3 * np.exp(-2j * np.pi * t)), 256)
    _check(winding_number(two) == 2, "winding two-loop != 2")

    g = Loop.from_modes({1: 0.3, -2: 0.2j, 0: 0.1}, 256)
    log_err = (continuous_log(g.exp()) - g).abs_max()
    _check(log_err < 1e-10, f"continuous log error {log_err:.3e}")

    f = Loop.from_modes({0: 1.0, 1: 0.5, -3: 0.25}, 256)
    _check(
        abs(circle_mean(rotate(f, 0.37)) - circle_mean(f)) < 1e-14,
        "circle mean not rotation invariant",
    )
    rt = (rotate(rotate(f, 0.37), -0.37) - f).abs_max()
    _check(rt < 1e-12, f"rotate round trip error {rt:.3e}")
    return f"round trips, winding, continuous log ({log_err:.1e})"


def check_rotation_arithmetic() -> str:
    golden = RotationNumber.golden()
    # convergents start at p1/q1, so the trivial 0/1 term is absent
    fib = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    qs = [q for _, q in golden.convergents[: len(fib)]]
    _check(qs == fib[: len(qs)], f"golden denominators {qs[:8]}... not Fibonacci")
    delta, tau = golden.dioph
    _check(delta > 0 and tau >= 2, f"degenerate Diophantine estimate ({delta}, {tau})")
    for p, q in golden.convergents[:12]:
        gap = abs(golden.alpha - p / q)
        _check(gap >= delta / q**tau * (1 - 1e-12), f"Diophantine bound fails at q={q}")
    _check(abs(circle_dist(0.9, 0.1) - 0.2) < 1e-15, "circle distance wrap broken")
    return f"Fibonacci convergents, dioph=({delta:.3e}, {tau:.2f})"


def check_small_divisors() -> str:
    golden = RotationNumber.golden()
    d = divisors(golden, 64)
    minima = []
    best = math.inf
    for k in range(1, 65):
        if d[k - 1] < best:
            best = d[k - 1]
            minima.append(k)
    _check(
        minima == FIBONACCI_DIVISOR_MINIMA,
        f"golden divisor record minima {minima} != {FIBONACCI_DIVISOR_MINIMA}",
    )
    try:
        bad = 0.5 + 1e-12
        solve_cohomological(Loop.from_modes({2: 1.0}, 64), bad, k_max=8)
        raised = False
    except SmallDivisorBreakdown:
        raised = True
    _check(raised, "near-rational rotation must trip SmallDivisorBreakdown")
    return f"record minima at Fibonacci k, floor enforced (min divisor {best:.3e})"


def check_standard_form() -> str:
    rng = np.random.default_rng(131)
    alpha = RotationNumber.golden()
    worst = 0.0
    for _ in range(5):
        lam = _member_loop(rng)
        q = make_quadratic(lam, alpha)
        fc, h = to_standard_form(q)
        gamma2 = h.transport_curve(Loop.constant(0.0, lam.n))
        res = invariance_residual(fc, gamma2)
        worst = max(worst, res)
        _check(res < 1e-10, f"transported zero curve residual {res:.3e}")
        d1 = fibered_multiplier(q, Loop.constant(0.0, lam.n))
        d2 = fibered_multiplier(fc, gamma2)
        _check(
            d1.m == d2.m and abs(d1.kappa - d2.kappa) < 1e-10,
            "multiplier data not preserved by the standard-form change",
        )
    return f"5 conversions, worst curve residual {worst:.1e}"


def check_surgery_algebra() -> str:
    rng = np.random.default_rng(909)
    model = surgery_coefficients(0.5, 0.25)
    _check(
        abs(model.a_k - 1.5) < 1e-14 and abs(model.b_k - 0.5) < 1e-14,
        f"pinned coefficients off: a={model.a_k}, b={model.b_k}",
    )
    _check(abs(model.dilatation - 2.0) < 1e-12, f"pinned dilatation off: {model.dilatation}")
    for _ in range(20):
        k0 = rng.uniform(0.15, 0.85) * np.exp(2j * np.pi * rng.uniform())
        kt = rng.uniform(0.15, 0.85) * np.exp(2j * np.pi * rng.uniform())
        m = surgery_coefficients(complex(k0), complex(kt))
        z = rng.uniform(0.05, 1.0, 50) * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
        mu = model_beltrami(m, z)
        ratio = abs(m.b_k / m.a_k)
        _check(float(np.max(np.abs(np.abs(mu) - ratio))) < 1e-13, "|mu| must be constant |b/a|")
        kd = (1 + ratio) / (1 - ratio)
        # |a| - |b| cancels as K grows; the two formulas agree to K^2 ulps
        _check(abs(m.dilatation - kd) < 1e-12 * max(1.0, kd * kd), "dilatation formula mismatch")
        inv = model_inverse(m)
        back = model_map(inv, model_map(m, z))
        _check(float(np.max(np.abs(back - z))) < 1e-12, "model inverse fails on points")
        gain = np.exp(2 * m.b_k * math.log(abs(complex(k0))))
        _check(abs(gain - complex(kt) / complex(k0)) < 1e-13, "e^{2 b L0} != kappa/kappa0")
    return "pinned (1.5, 0.5, K=2), Beltrami/dilatation/inverse identities on 20 pairs"


def check_membership_probe() -> str:
    alpha = RotationNumber.golden()
    rep = membership_H0star(Loop.constant(0.5, 256), alpha)
    _check(rep.in_H0star and rep.winding == 0, "lambda = 0.5 must be a member")
    data = multiplier_from_derivative_loop(Loop.constant(0.5, 256))
    _check(abs(data.kappa - 0.5) < 1e-12, f"kappa_hat(0.5) = {data.kappa}")

    spun = Loop.from_function(lambda t: 1.2 * np.exp(2j * np.pi * t), 256)
    rep1 = membership_H0star(spun, alpha)
    _check(rep1.winding == 1 and not rep1.in_H0star, "winding-1 loop misclassified")

    slow = membership_H0star(Loop.constant(0.99, 256), alpha)
    _check(
        slow.critical_orbit_bounded and not slow.critical_orbit_converges_to_zero,
        "kappa near 1 must stay bounded yet fail the convergence probe",
    )
    _check(not slow.in_H0star, "probe must reject |kappa| ~ 1 as undecided")
    try:
        scaling_section(Loop.from_modes({0: 0.5, 1: 0.1}, 256), 0.99, alpha)
        raised = False
    except LeftHyperbolicRegion:
        raised = True
    _check(raised, "section at |kappa| ~ 1 must raise LeftHyperbolicRegion")

    hot = membership_H0star(Loop.constant(2.5, 256), alpha)
    _check(not hot.in_H0star and hot.lyapunov > 0, "expanding loop misclassified")
    return "member/winding/slow/expanding cases all classified as specified"


def check_wire_roundtrip() -> str:
    rng = np.random.default_rng(7)
    loop = Loop.from_modes({0: 0.4, 2: 0.25j, -5: 0.1}, 128)
    back = loop_from_descriptor(loop_to_descriptor(loop))
    _check((back - loop).abs_max() < 1e-14, "fourier descriptor round trip failed")
    vals = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    samp = Loop.from_samples(vals)
    back2 = loop_from_descriptor(loop_to_descriptor(samp, kind="samples"))
    _check((back2 - samp).abs_max() < 1e-14, "samples descriptor round trip failed")

    alpha = alpha_from_descriptor(alpha_to_descriptor(RotationNumber.golden()))
    _check(abs(alpha.alpha - GOLDEN_MEAN) < 1e-15, "alpha descriptor round trip failed")

    p = make_quadratic(Loop.from_modes({0: 0.5, 1: 0.1}, 128), RotationNumber.golden())
    p2 = map_from_descriptor(map_to_descriptor(p))
    _check(p2.family == "q_lambda", "family lost in map round trip")
    _check(
        (p2.coeffs[1] - p.coeffs[1]).abs_max() < 1e-14,
        "lambda loop drifted through the map descriptor",
    )

    for junk in (
        {"family": "nope", "alpha": 0.5, "coeffs": []},
        {"kind": "fourier", "modes": "x"},
        {"family": "q_lambda", "alpha": {"named": "golden"}, "coeffs": []},
    ):
        try:
            if "family" in junk:
                map_from_descriptor(junk)
            else:
                loop_from_descriptor(junk)
            raised = False
        except BadDescriptor:
            raised = True
        _check(raised, f"malformed descriptor accepted: {junk}")
    return "loop/alpha/map descriptors round trip; malformed input rejected"


# --------------------------------------------------------------------------
# runner


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    detail: str
    seconds: float


ACCEPTANCE_CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("conjugacy-invariance", check_conjugacy_invariance),
    ("cohomology-solver", check_cohomology_solver),
    ("linearization", check_linearization),
    ("surgery-model", check_surgery_model),
    ("multiplier-map", check_multiplier_map),
    ("julia-rendering", check_julia_rendering),
    ("determinism", check_determinism),
]

MODULE_CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("loop-calculus", check_loop_calculus),
    ("rotation-arithmetic", check_rotation_arithmetic),
    ("small-divisors", check_small_divisors),
    ("standard-form", check_standard_form),
    ("surgery-algebra", check_surgery_algebra),
    ("membership-probe", check_membership_probe),
    ("wire-roundtrip", check_wire_roundtrip),
]

ALL_CHECKS = ACCEPTANCE_CHECKS + MODULE_CHECKS


def run_check(name: str) -> CheckOutcome:
    fn = dict(ALL_CHECKS)[name]
    t0 = time.perf_counter()
    try:
        detail = fn()
        return CheckOutcome(name, True, detail, time.perf_counter() - t0)
    except Exception as exc:  # noqa: BLE001 - verdicts must not crash the runner
        return CheckOutcome(name, False, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)


def run_all(names=None, emit=None) -> list[CheckOutcome]:
    chosen = [n for n, _ in ALL_CHECKS] if names is None else list(names)
    outcomes = []
    for name in chosen:
        out = run_check(name)
        outcomes.append(out)
        if emit is not None:
            status = "PASS" if out.passed else "FAIL"
            emit(f"{status} {out.name} ({out.seconds:.2f}s): {out.detail}")
    if emit is not None:
        total = sum(o.seconds for o in outcomes)
        bad = sum(1 for o in outcomes if not o.passed)
        emit(f"{len(outcomes) - bad}/{len(outcomes)} checks passed in {total:.1f}s")
    return outcomes
