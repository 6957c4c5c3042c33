"""Fiberwise linearizing coordinates around an attracting invariant curve.

Pipeline: measure the multiplier (m, kappa, Lambda, rho) of the curve;
straighten the linear cocycle with a multiplicative change of variables
e^{u(theta)} obtained from the cohomological equation
u(theta+alpha) - u(theta) = mean(L) - L(theta), L the continuous log of
the de-twisted fiber derivative; then take the Koenigs limit of the
straightened map.  The resulting psi satisfies

    psi_{theta+alpha}(f_theta(z)) = kappa e^{2 pi i m theta} psi_theta(z)

on a tube of radius R = min{1, R_c, (1 - e^Lambda) / (2M)} around the curve,
with R_c the distance from the curve to the critical set of the straightened
map and M a sampled sup of the quadratic remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cohomology import solve_cohomological
from .dynamics import (
    MultiplierData,
    QpfPolynomial,
    fibered_multiplier,
    multiplier_from_derivative_loop,
)
from .errors import KoenigsStall, NewtonFail, OutsideTube, PositiveLyapunov
from .loops import Loop, circle_mean, continuous_log, rotate

KOENIGS_TOL = 1e-11
KOENIGS_CAP = 10_000
NEWTON_TOL = 1e-10
NEWTON_DAMPING = 0.5
NEWTON_CAP = 100
M_GRID_RADII = 64
M_GRID_ANGLES = 128
M_GRID_INFLATION = 1.1  # sample |z| out to 1.1: conservative halo around the unit disk
CONJ_GRID = 32
CONJ_RESIDUAL_TOL = 1e-6
INDEX_FD_STEP = 1e-6


def _taylor_shift(coeff_samples: list[np.ndarray], center: np.ndarray) -> list[np.ndarray]:
    """Per-sample Taylor coefficients of the fiber polynomial about ``center``.

    Repeated synthetic division by (z - center); entry j is p^(j)(center)/j!.
    """
    work = [c.copy() for c in coeff_samples]
    out: list[np.ndarray] = []
    while work:
        rem = work[-1].copy()
        quot = []
        for j in range(len(work) - 2, -1, -1):
            quot.append(rem)
            rem = work[j] + rem * center
        out.append(rem)
        work = [q.copy() for q in reversed(quot)]
    return out


@dataclass
class Linearizer:
    """Linearizing coordinates for one attracting invariant curve."""

    gamma: Loop
    data: MultiplierData
    u: Loop
    tube_radius: float
    koenigs_depth: int
    conj_residual: float
    # internals
    straightened: QpfPolynomial = field(repr=False)
    remainder_sup: float = field(repr=False)
    critical_distance: float = field(repr=False)

    @property
    def alpha(self) -> float:
        return float(self.straightened.alpha)

    # -- Koenigs limit of the straightened map ------------------------------

    def _koenigs(self, theta, w, want_deriv: bool = False):
        """lim_n (prod_{j<n} kappa e^{2 pi i m(theta+j alpha)})^{-1} ftilde^n_theta(w).

        Vectorized over broadcast (theta, w); per-element stopping at
        successive difference < 1e-11, hard cap 1e4 -> KoenigsStall.
        """
        th, ww = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(w, dtype=complex))
        shape = ww.shape
        th = th.ravel().astype(float)
        cur = ww.ravel().astype(complex)
        m, kappa = self.data.m, self.data.kappa
        alpha = self.alpha
        vals = cur.copy()
        dvals = np.ones_like(cur)
        prod = np.ones_like(cur)
        dprod = np.ones_like(cur)
        active = np.ones(len(cur), dtype=bool)
        depth = 0
        n = 0
        while active.any():
            if n >= KOENIGS_CAP:
                raise KoenigsStall(f"{int(active.sum())} points unsettled after {KOENIGS_CAP} steps")
            if float(np.max(np.abs(cur[active]))) > 1e8:
                raise KoenigsStall("orbit diverges; point outside the contraction tube")
            ths = th[active] + n * alpha
            prev = vals[active]
            if want_deriv:
                dprod[active] *= self.straightened.fiber_dz(ths, cur[active])
            cur_a = self.straightened.fiber(ths, cur[active])
            prod[active] *= kappa * np.exp(2j * np.pi * m * ths)
            cur[active] = cur_a
            new_vals = cur_a / prod[active]
            vals[active] = new_vals
            if want_deriv:
                dvals[active] = dprod[active] / prod[active]
            settled = np.abs(new_vals - prev) < KOENIGS_TOL
            idx = np.flatnonzero(active)
            active[idx[settled]] = False
            n += 1
            depth = n
        if want_deriv:
            return vals.reshape(shape), dvals.reshape(shape), depth
        return vals.reshape(shape), depth

    def _koenigs_inverse(self, theta, target):
        """Damped Newton for the Koenigs coordinate, seeded with the identity."""
        th, tt = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(target, dtype=complex))
        shape = tt.shape
        th = th.ravel()
        tt = tt.ravel().astype(complex)
        x = tt.copy()  # straightening-only inverse: Koenigs part is tangent to identity
        for _ in range(NEWTON_CAP):
            vals, dvals, _ = self._koenigs(th, x, want_deriv=True)
            err = vals - tt
            if float(np.max(np.abs(err))) < NEWTON_TOL:
                # one undamped polish step: quadratic convergence puts the
                # residual at the Koenigs tolerance floor, not at NEWTON_TOL
                return (x - err / dvals).reshape(shape)
            x = x - NEWTON_DAMPING * (err / dvals)
        raise NewtonFail(f"Koenigs inverse not within {NEWTON_TOL} after {NEWTON_CAP} steps")

    # -- public evaluation ---------------------------------------------------

    def forward(self, theta, z, check: bool = True):
        """psi_theta(z) = koenigs(e^{u(theta)} (z - gamma(theta)))."""
        th = np.asarray(theta, dtype=float)
        zz = np.asarray(z, dtype=complex)
        offset = zz - self.gamma(th)
        if check and float(np.max(np.abs(offset))) >= self.tube_radius:
            raise OutsideTube("point leaves the linearization tube")
        w = np.exp(self.u(th)) * offset
        vals, _ = self._koenigs(th, w)
        return vals

    def inverse(self, theta, value):
        """z with psi_theta(z) = value."""
        th = np.asarray(theta, dtype=float)
        x = self._koenigs_inverse(th, value)
        return self.gamma(th) + np.exp(-self.u(th)) * x


def build_linearizer(p: QpfPolynomial, gamma: Loop, k_max: int | None = None) -> Linearizer:
    """Construct linearizing coordinates around an attracting invariant curve."""
    data = fibered_multiplier(p, gamma)
    if data.lyapunov >= 0.0:
        raise PositiveLyapunov(f"Lambda = {data.lyapunov:.6g} is not attracting")

    g = gamma.with_resolution(p.n)
    theta = np.arange(p.n) / p.n

    # straighten the linear cocycle
    d_loop = Loop.from_samples(p.fiber_dz_on_grid(g.samples))
    detwisted = Loop.from_samples(d_loop.samples * np.exp(-2j * np.pi * data.m * theta))
    log_d = continuous_log(detwisted)
    chi = circle_mean(log_d)
    rhs = Loop.from_samples(np.full(p.n, chi)) - log_d
    u = solve_cohomological(rhs, p.alpha, k_max=k_max).u

    # Taylor-shift fibers to the curve, then conjugate by z -> e^{u} z
    taylor = _taylor_shift([c.samples for c in p.coeffs], g.samples)
    taylor[0] = np.zeros(p.n, dtype=complex)  # invariance defect (<=1e-8, checked) dropped
    u_s = u.samples
    u_plus = rotate(u, p.alpha).samples
    straight_coeffs = [
        Loop.from_samples(taylor[j] * np.exp(u_plus - j * u_s)) for j in range(len(taylor))
    ]
    straightened = QpfPolynomial(straight_coeffs, p.alpha, family="general")

    # quadratic remainder bound M on the sampled tube cross-section
    d = straightened.degree
    if d >= 2:
        radii = M_GRID_INFLATION * (np.arange(1, M_GRID_RADII + 1) / M_GRID_RADII)
        angles = np.arange(M_GRID_ANGLES) / M_GRID_ANGLES
        zgrid = (radii[:, None] * np.exp(2j * np.pi * angles[None, :])).ravel()
        rem_coeffs = np.stack([c.samples for c in straight_coeffs[2:]])  # (d-1, N)
        m_sup = 0.0
        chunk = max(1, (1 << 20) // len(zgrid))
        for lo in range(0, p.n, chunk):
            block = rem_coeffs[:, lo : lo + chunk]  # (d-1, c)
            acc = np.broadcast_to(block[-1][:, None], (block.shape[1], len(zgrid))).copy()
            for row in block[-2::-1]:
                acc = acc * zgrid[None, :] + row[:, None]
            m_sup = max(m_sup, float(np.max(np.abs(acc))))
    else:
        m_sup = 0.0

    # distance from the curve to the critical set of the straightened map
    if d < 2:
        r_crit = math.inf
    elif d == 2:
        crit = -straight_coeffs[1].samples / (2.0 * straight_coeffs[2].samples)
        r_crit = float(np.min(np.abs(crit)))
    else:
        r_crit = math.inf
        for i in range(p.n):
            dp = [j * straight_coeffs[j].samples[i] for j in range(1, d + 1)]
            roots = np.roots(list(reversed(dp)))
            if len(roots):
                r_crit = min(r_crit, float(np.min(np.abs(roots))))

    shrink = (1.0 - math.exp(data.lyapunov)) / (2.0 * m_sup) if m_sup > 0 else math.inf
    radius = min(1.0, r_crit, shrink)

    lin = Linearizer(
        gamma=g,
        data=data,
        u=u,
        tube_radius=radius,
        koenigs_depth=0,
        conj_residual=math.nan,
        straightened=straightened,
        remainder_sup=m_sup,
        critical_distance=r_crit,
    )

    # verify the conjugacy on the half-tube: koenigs(ftilde) = kappa e^{2 pi i m theta} koenigs
    th = np.arange(CONJ_GRID) / CONJ_GRID
    rr = 0.99 * (radius / 2.0) * (np.arange(1, 9) / 8.0)
    ph = np.exp(2j * np.pi * np.arange(4) / 4.0)
    zz = (rr[:, None] * ph[None, :]).ravel()  # 32 points in |z| < R/2
    th2 = np.repeat(th, len(zz))
    zz2 = np.tile(zz, len(th))
    left_inner = straightened.fiber(th2, zz2)
    left, depth1 = lin._koenigs(th2 + float(p.alpha), left_inner)
    right, depth2 = lin._koenigs(th2, zz2)
    twist = data.kappa * np.exp(2j * np.pi * data.m * th2)
    residual = float(np.max(np.abs(left - twist * right)))
    lin.koenigs_depth = max(depth1, depth2)
    lin.conj_residual = residual
    if residual >= CONJ_RESIDUAL_TOL:
        raise KoenigsStall(f"linearization conjugacy residual {residual:.3e} >= {CONJ_RESIDUAL_TOL}")
    return lin


def evaluate_linearizer(lin: Linearizer, theta, z, rescaled: bool = False):
    """psi_theta(z); with rescaled=True the value is divided by the tube radius.

    The unrescaled map fixes the curve (psi(gamma) = 0) and the rescaled one
    sends the tube into the unit disk.
    """
    vals = lin.forward(theta, z)
    if rescaled:
        vals = vals / lin.tube_radius
        if float(np.max(np.abs(vals))) >= 1.0:
            raise OutsideTube("rescaled image leaves the unit disk")
    return vals


def linearizer_index(lin: Linearizer, n_theta: int = 256) -> int:
    """Winding of theta -> d/dz psi_theta at the curve (central differences).

    Zero by construction: the straightening is chosen index-free.
    """
    th = np.arange(n_theta) / n_theta
    h = INDEX_FD_STEP * lin.tube_radius
    base = lin.gamma(th)
    d_vals = (lin.forward(th, base + h, check=False) - lin.forward(th, base - h, check=False)) / (2.0 * h)
    return winding_of_samples(d_vals)


def winding_of_samples(values: np.ndarray) -> int:
    """Winding of a closed discrete loop of non-vanishing samples."""
    v = np.asarray(values, dtype=complex)
    steps = np.angle(np.roll(v, -1) / v)
    return int(math.floor(0.5 + float(np.sum(steps)) / (2.0 * math.pi)))


def transported_multiplier(lin: Linearizer, p: QpfPolynomial, n_theta: int = 256) -> MultiplierData:
    """Multiplier of the model map measured through psi by finite differences.

    Differentiates psi_{theta+alpha} o f_theta o psi_theta^{-1} at 0 with a
    4-point stencil; an end-to-end consistency check of the pipeline.
    """
    th = np.arange(n_theta) / n_theta
    h = 1e-3 * lin.tube_radius
    stencil = np.array([-2.0, -1.0, 1.0, 2.0]) * h
    weights = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h)
    vals = np.zeros((4, n_theta), dtype=complex)
    for i, s in enumerate(stencil):
        z = lin.inverse(th, np.full(n_theta, s, dtype=complex))
        fz = p.fiber(th, z)
        vals[i] = lin.forward(th + float(p.alpha), fz, check=False)
    deriv = (weights[:, None] * vals).sum(axis=0)
    return multiplier_from_derivative_loop(Loop.from_samples(deriv))
