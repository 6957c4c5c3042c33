"""Quasiperiodically forced polynomial skew products and fibered multipliers.

Maps have the form F(theta, z) = (theta + alpha, p_theta(z)) with
p_theta(z) = sum_j c_j(theta) z^j and coefficient loops c_j.  The fibered
multiplier of an invariant curve gamma packages its index m (winding of the
fiber derivative along the curve), Lyapunov exponent Lambda, and fibered
rotation number rho: kappa = exp(Lambda + 2 pi i rho).

All angles are in turns.  Iteration composes fibers left to right:
p^n_theta = p_{theta+(n-1)alpha} o ... o p_theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DerivativeVanishesOnCurve,
    NoConvergence,
    NonContinuousCriticalSet,
    NonInvertibleFiber,
    NotInvariant,
    ShapeMismatch,
    VanishingLambda,
)
from .loops import (
    AlphaLike,
    Loop,
    RotationNumber,
    circle_mean,
    continuous_log,
    rotate,
    winding_number,
)

INVARIANCE_TOL = 1e-8
HORNER_CHECK_TOL = 1e-12
CURVE_RESIDUAL_TOL = 1e-9
CURVE_STEP_TOL = 1e-11
OVERFLOW_LIMIT = 1e150
ROOT_MATCH_FACTOR = 0.5  # fraction of min root separation tolerated when tracking


class QpfPolynomial:
    """Skew product over rotation by alpha with polynomial fibers.

    Coefficient loops run c_0 .. c_d (constant term first).  The leading
    coefficient must be non-vanishing.  Fibers of degree >= 2 are the
    intended dynamics; degree 1 is admitted for linear normal forms.
    """

    def __init__(self, coeffs: list[Loop], alpha: AlphaLike, family: str = "general"):
        if len(coeffs) < 2:
            raise ValueError("need at least degree 1 (two coefficient loops)")
        n = max(c.n for c in coeffs)
        self.coeffs = [c.with_resolution(n) for c in coeffs]
        self.n = n
        self.alpha = alpha if isinstance(alpha, RotationNumber) else RotationNumber.from_float(float(alpha))
        self.family = family
        if self.coeffs[-1].abs_min() < 1e-12:
            raise VanishingLambda("leading coefficient loop vanishes somewhere")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def fiber(self, theta, z):
        """Evaluate p_theta(z); theta and z broadcast as numpy arrays."""
        th = np.asarray(theta, dtype=float)
        acc = np.asarray(self.coeffs[-1](th)) * np.ones_like(np.asarray(z, dtype=complex))
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c(th)
        return acc

    def fiber_dz(self, theta, z):
        """d/dz of the fiber at (theta, z)."""
        th = np.asarray(theta, dtype=float)
        d = self.degree
        acc = d * np.asarray(self.coeffs[-1](th)) * np.ones_like(np.asarray(z, dtype=complex))
        for j in range(d - 1, 0, -1):
            acc = acc * z + j * self.coeffs[j](th)
        return acc

    def fiber_on_grid(self, z_samples: np.ndarray) -> np.ndarray:
        """p_{theta_j}(z_j) across the sample grid, using exact coefficient samples."""
        acc = self.coeffs[-1].samples.copy()
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z_samples + c.samples
        return acc

    def fiber_dz_on_grid(self, z_samples: np.ndarray) -> np.ndarray:
        d = self.degree
        acc = d * self.coeffs[-1].samples.copy()
        for j in range(d - 1, 0, -1):
            acc = acc * z_samples + j * self.coeffs[j].samples
        return acc

    def horner_check(self) -> float:
        """Max discrepancy between Horner and direct power-sum evaluation."""
        rng = np.random.default_rng(7)
        th = rng.random(32)
        z = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        direct = sum(np.asarray(c(th)) * z**j for j, c in enumerate(self.coeffs))
        return float(np.max(np.abs(direct - self.fiber(th, z))))

    def __repr__(self):
        return f"QpfPolynomial(degree={self.degree}, n={self.n}, alpha={float(self.alpha):.12g})"


@dataclass(frozen=True)
class MultiplierData:
    """Index, multiplier, Lyapunov exponent, fibered rotation number of a curve."""

    m: int
    kappa: complex
    lyapunov: float
    rho: float

    def __post_init__(self):
        assert abs(self.kappa) > 0.0
        # kappa = e^{Lambda + 2 pi i rho} must hold to 1e-10
        recon = math.exp(self.lyapunov) * np.exp(2j * np.pi * self.rho)
        assert abs(recon - self.kappa) <= 1e-10 * max(1.0, abs(self.kappa))


class FiberedConformalMap:
    """Fibered affine change of variables H(theta, z) = (theta + nu, A(theta) z + B(theta))."""

    def __init__(self, a: Loop, b: Loop, nu: float = 0.0):
        if a.abs_min() < 1e-12:
            raise NonInvertibleFiber("fiber slope loop vanishes somewhere")
        n = max(a.n, b.n)
        self.a = a.with_resolution(n)
        self.b = b.with_resolution(n)
        self.nu = float(nu) % 1.0
        self.eta = winding_number(self.a)

    def apply(self, theta, z):
        th = np.asarray(theta, dtype=float)
        return np.asarray(self.a(th)) * z + np.asarray(self.b(th))

    def invert(self, theta, w):
        th = np.asarray(theta, dtype=float)
        return (w - np.asarray(self.b(th))) / np.asarray(self.a(th))

    def transport_curve(self, gamma: Loop) -> Loop:
        """Image curve phi -> h_{phi - nu}(gamma(phi - nu))."""
        a_s = rotate(self.a, -self.nu)
        b_s = rotate(self.b, -self.nu)
        g_s = rotate(gamma, -self.nu)
        return a_s * g_s + b_s


def make_quadratic(lam: Loop, alpha: AlphaLike) -> QpfPolynomial:
    """Fibers z^2 + lambda(theta) z.  The zero curve is invariant with derivative lambda."""
    if lam.abs_min() < 1e-12:
        raise VanishingLambda("lambda has a (numerically) vanishing sample")
    one = Loop.constant(1.0, lam.n)
    zero = Loop.constant(0.0, lam.n)
    return QpfPolynomial([zero, lam, one], alpha, family="q_lambda")


def make_fc(c: Loop, alpha: AlphaLike) -> QpfPolynomial:
    """Fibers z^2 + c(theta)."""
    one = Loop.constant(1.0, c.n)
    zero = Loop.constant(0.0, c.n)
    return QpfPolynomial([c, zero, one], alpha, family="f_c")


def to_standard_form(q: QpfPolynomial) -> tuple[QpfPolynomial, FiberedConformalMap]:
    """Rewrite fibers z^2 + lambda z as w^2 + c via w = z + lambda/2.

    c = lambda(theta+alpha)/2 - lambda(theta)^2/4.
    """
    if q.degree != 2:
        raise ShapeMismatch("standard form requires degree 2")
    c2, c1, c0 = q.coeffs[2], q.coeffs[1], q.coeffs[0]
    if (c2 - 1.0).abs_max() > 1e-12 or c0.abs_max() > 1e-12:
        raise ShapeMismatch("fibers must have the shape z^2 + lambda z")
    lam = c1
    c = rotate(lam, q.alpha) * 0.5 - lam * lam * 0.25
    h = FiberedConformalMap(Loop.constant(1.0, lam.n), lam * 0.5, nu=0.0)
    fc = make_fc(c, q.alpha)
    # h_{theta+alpha}(q_theta(z)) = fc_theta(h_theta(z)) is algebraic; guard anyway
    rng = np.random.default_rng(3)
    th = rng.random(16)
    z = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    lhs = h.apply(th + float(q.alpha), q.fiber(th, z))
    rhs = fc.fiber(th, h.apply(th, z))
    if float(np.max(np.abs(lhs - rhs))) > 1e-10:
        raise ShapeMismatch("standard-form conjugacy residual exceeds 1e-10")
    return fc, h


def escape_radius(p: QpfPolynomial) -> float:
    """R* with |p_theta(z)| >= |z|^d / R* whenever |z| > R*."""
    tail = sum(np.abs(c.samples) for c in p.coeffs[:-1])
    lead = np.abs(p.coeffs[-1].samples)
    return float(np.max(np.maximum(1.0, (1.0 + tail) / lead)))


def iterate_fiber(p: QpfPolynomial, theta: float, z: complex, n_steps: int):
    """Orbit z_0 .. z_{n_steps} along the fiber composition starting at angle theta.

    Returns (orbit, escaped); iteration stops once |z| exceeds 1e150.
    """
    orbit = [complex(z)]
    w = complex(z)
    th = float(theta)
    a = float(p.alpha)
    for j in range(n_steps):
        w = complex(p.fiber(th + j * a, w))
        orbit.append(w)
        if abs(w) > OVERFLOW_LIMIT:
            return orbit, True
    return orbit, False


def multiplier_from_derivative_loop(d_loop: Loop) -> MultiplierData:
    """Index, multiplier, exponent, rotation number from the derivative-along-curve loop."""
    if d_loop.abs_min() < 1e-12:
        raise DerivativeVanishesOnCurve("fiber derivative vanishes on the curve")
    m = winding_number(d_loop)
    theta = np.arange(d_loop.n) / d_loop.n
    detwisted = Loop.from_samples(d_loop.samples * np.exp(-2j * np.pi * m * theta))
    chi = circle_mean(continuous_log(detwisted))
    kappa = complex(np.exp(chi))
    lam = chi.real
    rho = chi.imag / (2.0 * math.pi)
    rho -= math.floor(rho)  # into [0,1)
    if rho > 0.5:
        rho -= 1.0  # into (-1/2, 1/2]
    return MultiplierData(m=m, kappa=kappa, lyapunov=lam, rho=rho)


def invariance_residual(p: QpfPolynomial, gamma: Loop) -> float:
    g = gamma.with_resolution(p.n)
    image = p.fiber_on_grid(g.samples)
    return float(np.max(np.abs(image - rotate(g, p.alpha).samples)))


def fibered_multiplier(p: QpfPolynomial, gamma: Loop) -> MultiplierData:
    """Multiplier data of an invariant curve (checked to 1e-8 before measuring)."""
    res = invariance_residual(p, gamma)
    if res >= INVARIANCE_TOL:
        raise NotInvariant(f"curve invariance residual {res:.3e} >= {INVARIANCE_TOL}")
    g = gamma.with_resolution(p.n)
    d_loop = Loop.from_samples(p.fiber_dz_on_grid(g.samples))
    return multiplier_from_derivative_loop(d_loop)


def conjugate_by(p: QpfPolynomial, h: FiberedConformalMap) -> QpfPolynomial:
    """The skew product H o F o H^{-1}; affine H keeps fibers polynomial.

    New fiber at phi: A(phi-nu+alpha) p_{phi-nu}((u - B(phi-nu))/A(phi-nu)) + B(phi-nu+alpha).
    """
    nu, alpha = h.nu, float(p.alpha)
    n = max(p.n, h.a.n)
    a_m = rotate(h.a, -nu).with_resolution(n).samples
    b_m = rotate(h.b, -nu).with_resolution(n).samples
    a_p = rotate(h.a, alpha - nu).with_resolution(n).samples
    b_p = rotate(h.b, alpha - nu).with_resolution(n).samples
    shifted = [rotate(c, -nu).with_resolution(n).samples for c in p.coeffs]

    d = p.degree
    new = [np.zeros(n, dtype=complex) for _ in range(d + 1)]
    for j, cj in enumerate(shifted):
        scale = cj / a_m**j
        for i in range(j + 1):
            new[i] += scale * math.comb(j, i) * (-b_m) ** (j - i)
    out = [a_p * arr for arr in new]
    out[0] += b_p
    return QpfPolynomial([Loop.from_samples(arr) for arr in out], p.alpha, family="general")


def find_invariant_curve(p: QpfPolynomial, seed: Loop | None = None, max_iter: int = 400) -> Loop:
    """Attracting invariant curve by the graph transform gamma(theta+alpha) = p_theta(gamma(theta))."""
    r_star = escape_radius(p)
    g = (seed if seed is not None else Loop.constant(0.0, p.n)).with_resolution(p.n)
    for _ in range(max_iter):
        image = Loop.from_samples(p.fiber_on_grid(g.samples))
        nxt = rotate(image, -float(p.alpha))
        step = float(np.max(np.abs(nxt.samples - g.samples)))
        g = nxt
        if g.abs_max() > 2.0 * r_star:
            raise NoConvergence("graph transform escaped the dynamical bound")
        if step < CURVE_STEP_TOL:
            res = invariance_residual(p, g)
            if res >= CURVE_RESIDUAL_TOL:
                raise NoConvergence(f"stalled with residual {res:.3e}")
            return g
    raise NoConvergence(f"no contraction after {max_iter} graph-transform steps")


def _track_roots(roots_by_theta: np.ndarray) -> np.ndarray:
    """Order per-fiber root lists continuously in theta; error if the closure permutes them."""
    from scipy.optimize import linear_sum_assignment

    n_theta, n_roots = roots_by_theta.shape
    tracked = np.empty_like(roots_by_theta)
    tracked[0] = roots_by_theta[0]
    for i in range(1, n_theta):
        cost = np.abs(tracked[i - 1][:, None] - roots_by_theta[i][None, :])
        rows, cols = linear_sum_assignment(cost)
        tracked[i] = roots_by_theta[i][cols[np.argsort(rows)]]
    # closing the loop must match each strand back to itself
    cost = np.abs(tracked[-1][:, None] - tracked[0][None, :])
    rows, cols = linear_sum_assignment(cost)
    if not np.array_equal(cols[np.argsort(rows)], np.arange(n_roots)):
        raise NonContinuousCriticalSet("critical roots permute around the circle")
    return tracked


def critical_curves(p: QpfPolynomial) -> list[Loop]:
    """Continuous loops of fiber critical points (zeros of d p_theta / dz)."""
    d = p.degree
    if d < 2:
        return []
    if d == 2:
        omega = -1.0 * p.coeffs[1] / (2.0 * p.coeffs[2])
        return [omega]
    # general degree: per-sample roots of the derivative polynomial, then tracking
    n = p.n
    roots = np.empty((n, d - 1), dtype=complex)
    for i in range(n):
        poly = [j * p.coeffs[j].samples[i] for j in range(1, d + 1)]
        r = np.roots(list(reversed(poly)))
        if len(r) != d - 1:
            raise NonContinuousCriticalSet("critical set degenerates (derivative drops degree)")
        roots[i] = np.sort_complex(r)
    tracked = _track_roots(roots)
    return [Loop.from_samples(tracked[:, j]) for j in range(d - 1)]
