"""The multiplier map on parameter loops and the hyperbolic-component section.

For a non-vanishing, index-zero parameter loop lambda the zero curve of
z^2 + lambda(theta) z has multiplier

    kappa_hat(lambda) = exp( integral of log lambda over the circle ),

holomorphic in lambda with derivative D kappa_hat(lambda)[v]
= kappa_hat(lambda) * mean(v / lambda), and exactly homogeneous:
kappa_hat(c lambda) = c kappa_hat(lambda).  Membership in the hyperbolic
component around lambda is decided heuristically by the critical orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import LeftHyperbolicRegion, LoopLeavesDomain, VanishingLambda
from .loops import AlphaLike, Loop, as_angle, circle_mean, continuous_log, winding_number

VANISH_TOL = 1e-12
CONVERGENCE_TOL = 1e-6
DEFAULT_N_ITER = 500
DEFAULT_N_THETA = 256
CONTOUR_NODES = 16
BOUNDARY_PROBES = 64


def chi_hat(lam: Loop) -> complex:
    """Mean of the continuous log of lambda (winding zero required)."""
    if lam.abs_min() < VANISH_TOL:
        raise VanishingLambda("lambda vanishes; multiplier undefined")
    return circle_mean(continuous_log(lam))


def kappa_hat(lam: Loop) -> complex:
    """Multiplier of the zero curve: exp(chi_hat(lambda))."""
    return complex(np.exp(chi_hat(lam)))


def scaling_identity_check(lam: Loop, c: complex) -> float:
    """|kappa_hat(c lambda) - c kappa_hat(lambda)|; tiny by exact homogeneity."""
    if c == 0:
        raise VanishingLambda("scaling by zero leaves the domain")
    return abs(kappa_hat(lam * c) - c * kappa_hat(lam))


def directional_derivative(lam: Loop, v: Loop) -> complex:
    """D kappa_hat(lambda)[v] = kappa_hat(lambda) * mean(v / lambda)."""
    return kappa_hat(lam) * circle_mean(v / lam)


def holomorphy_residual(
    lam: Loop,
    v: Loop,
    radius: float,
    nodes: int = CONTOUR_NODES,
    check_doubling: bool = True,
) -> float:
    """|contour integral of t -> kappa_hat(lambda + t v)| on |t| = radius.

    Trapezoid rule with ``nodes`` points; with check_doubling the node count
    is doubled once and the larger residual is reported, so an unconverged
    quadrature can only make the verdict more conservative.  The loop must
    stay non-vanishing with winding zero on the contour (64 probe points).
    """
    probes = np.exp(2j * np.pi * np.arange(BOUNDARY_PROBES) / BOUNDARY_PROBES) * radius
    for t in probes:
        cand = lam + v * t
        if cand.abs_min() < VANISH_TOL:
            raise LoopLeavesDomain("lambda + t v vanishes on the contour")
        if winding_number(cand) != 0:
            raise LoopLeavesDomain("winding changes on the contour")

    def residual(m: int) -> float:
        ts = radius * np.exp(2j * np.pi * np.arange(m) / m)
        vals = np.array([kappa_hat(lam + v * t) for t in ts])
        integral = (2j * math.pi * radius / m) * np.sum(vals * ts / radius)
        return float(abs(integral))

    res = residual(nodes)
    if check_doubling:
        res = max(res, residual(2 * nodes))
    return res


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of the critical-orbit probe for one parameter loop."""

    winding: int
    lyapunov: float
    critical_orbit_bounded: bool
    critical_orbit_converges_to_zero: bool
    in_H0star: bool
    diagnostics: dict[str, Any] = field(default_factory=dict)


def membership_H0star(
    lam: Loop,
    alpha: AlphaLike,
    n_iter: int = DEFAULT_N_ITER,
    n_theta: int = DEFAULT_N_THETA,
    conv_tol: float = CONVERGENCE_TOL,
) -> MembershipReport:
    """Decide membership by iterating the critical curve -lambda/2.

    Bounded means no sampled orbit ever left the escape radius; converging
    means every final value is below conv_tol.  Membership is the conjunction
    of index zero, negative Lyapunov exponent, boundedness and convergence.
    This is a heuristic certificate: finite angles, finite iterations.
    """
    if lam.abs_min() < VANISH_TOL:
        raise VanishingLambda("lambda vanishes somewhere")
    wind = winding_number(lam)
    lyap = float(np.mean(np.log(np.abs(lam.samples))))
    a = as_angle(alpha)
    r_star = 1.0 + lam.abs_max()  # escape radius of z^2 + lambda z

    ang = np.arange(n_theta) / n_theta
    # incremental evaluation of lambda(ang + k alpha): matvec over live modes only
    mask = np.abs(lam.coeffs) > 1e-16 * max(1.0, lam.abs_max())
    k_nz = lam.modes()[mask]
    basis = np.exp(2j * np.pi * np.outer(ang, k_nz))
    rot = np.exp(2j * np.pi * k_nz * a)
    c_cur = lam.coeffs[mask].copy()

    z = -0.5 * (basis @ c_cur)
    escaped_at = 0
    alive = np.ones(n_theta, dtype=bool)
    for k in range(1, n_iter + 1):
        lam_k = basis @ c_cur  # lambda at ang + (k-1) alpha
        c_cur = c_cur * rot
        z_alive = z[alive]
        z_alive = z_alive * z_alive + lam_k[alive] * z_alive
        z[alive] = z_alive
        blown = np.abs(z_alive) > r_star
        if blown.any() and escaped_at == 0:
            escaped_at = k
        idx = np.flatnonzero(alive)
        alive[idx[blown]] = False
        if not alive.any():
            break
    bounded = escaped_at == 0
    final_sup = float(np.max(np.abs(z[alive]))) if alive.any() else math.inf
    converges = bounded and final_sup < conv_tol
    report = MembershipReport(
        winding=wind,
        lyapunov=lyap,
        critical_orbit_bounded=bounded,
        critical_orbit_converges_to_zero=converges,
        in_H0star=(wind == 0) and (lyap < 0.0) and bounded and converges,
        diagnostics={
            "escape_radius": r_star,
            "first_escape_iter": escaped_at,
            "final_sup": final_sup,
            "n_iter": n_iter,
            "n_theta": n_theta,
        },
    )
    return report


def scaling_section(lambda_star: Loop, kappa: complex, alpha: AlphaLike, **probe_kwargs) -> Loop:
    """Parameter loop with multiplier kappa on the scaling ray through lambda_star.

    lambda_kappa = (kappa / kappa_hat(lambda_star)) * lambda_star.  Both the
    base loop and the result must pass the membership probe.
    """
    base_report = membership_H0star(lambda_star, alpha, **probe_kwargs)
    if not base_report.in_H0star:
        raise LeftHyperbolicRegion("base loop fails the membership probe")
    k_star = kappa_hat(lambda_star)
    lam = lambda_star * (complex(kappa) / k_star)
    report = membership_H0star(lam, alpha, **probe_kwargs)
    if not report.in_H0star:
        raise LeftHyperbolicRegion(
            f"scaled loop with kappa={complex(kappa):.6g} fails the membership probe"
        )
    return lam
