"""Multiplier retargeting by tube-local quasiconformal surgery.

The autonomous model: for multipliers kappa0 (current) and kappa (target)
inside the punctured disk, the radial-stretch map

    phi(z) = z * exp(2 b log|z|),   b = (Log kappa - Log kappa0) / (2 log|kappa0|)

intertwines multiplication by kappa0-twists with kappa-twists:
phi(kappa0 e^{2 pi i m theta} z) = kappa e^{2 pi i m theta} phi(z).
Pulled back through linearizing coordinates this retargets the multiplier
of an attracting invariant curve without moving the curve.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import MultiplierData, QpfPolynomial, multiplier_from_derivative_loop
from .errors import NoConvergence, OutOfDisk
from .linearize import Linearizer, build_linearizer
from .loops import Loop

RETARGET_TOL = 1e-6
MEASURE_N_THETA = 256
MEASURE_FD_STEP = 1e-3
HOLOMORPHY_NODES = 16
HOLOMORPHY_RADIUS_FACTOR = 0.05


@dataclass(frozen=True)
class SurgeryModel:
    """Stretch coefficients for retargeting kappa0 -> kappa."""

    kappa0: complex
    kappa: complex
    chi0: complex
    chi_k: complex
    a_k: complex
    b_k: complex
    beltrami_ratio: complex
    dilatation: float


def _require_in_disk(kappa: complex, name: str) -> complex:
    k = complex(kappa)
    if k == 0 or abs(k) >= 1.0:
        raise OutOfDisk(f"{name} = {k} must lie in the punctured open unit disk")
    return k


def surgery_coefficients(kappa0: complex, kappa: complex) -> SurgeryModel:
    """Coefficients (a, b) of the radial stretch with a - b = 1 exactly."""
    k0 = _require_in_disk(kappa0, "kappa0")
    k = _require_in_disk(kappa, "kappa")
    chi0 = cmath.log(k0)   # principal branch, Im in (-pi, pi]
    chi_k = cmath.log(k)
    lam0 = chi0.real
    a = (chi_k + chi0.conjugate()) / (2.0 * lam0)
    b = a - 1.0  # exact by construction
    ratio = b / a
    dil = (abs(a) + abs(b)) / (abs(a) - abs(b))
    return SurgeryModel(
        kappa0=k0, kappa=k, chi0=chi0, chi_k=chi_k,
        a_k=a, b_k=b, beltrami_ratio=ratio, dilatation=dil,
    )


def model_map(model: SurgeryModel, z):
    """phi(z) = z exp(2 b log|z|), phi(0) = 0."""
    zz = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zz).ravel().copy()
    nz = flat != 0
    flat[nz] = flat[nz] * np.exp(2.0 * model.b_k * np.log(np.abs(flat[nz])))
    if zz.shape == ():
        return complex(flat[0])
    return flat.reshape(zz.shape)


def model_inverse(model: SurgeryModel) -> SurgeryModel:
    """The radial stretch inverting phi: swap the roles of kappa0 and kappa."""
    return surgery_coefficients(model.kappa, model.kappa0)


def model_beltrami(model: SurgeryModel, z):
    """Beltrami coefficient (b/a) z / conj(z) of the stretch; 0 at the origin."""
    zz = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zz).ravel().copy()
    nz = flat != 0
    flat[nz] = model.beltrami_ratio * flat[nz] / np.conj(flat[nz])
    flat[~nz] = 0.0
    if zz.shape == ():
        return complex(flat[0])
    return flat.reshape(zz.shape)


class RetargetedMap:
    """The surgered skew product, evaluable on the linearization tube."""

    def __init__(self, p: QpfPolynomial, lin: Linearizer, model: SurgeryModel):
        self.p = p
        self.lin = lin
        self.model = model
        self._inv_model = model_inverse(model)

    def phi(self, theta, z):
        """Tube-local conjugating map psi^{-1} o stretch o psi."""
        w = self.lin.forward(theta, z, check=False)
        return self.lin.inverse(theta, model_map(self.model, w))

    def phi_inv(self, theta, z):
        w = self.lin.forward(theta, z, check=False)
        return self.lin.inverse(theta, model_map(self._inv_model, w))

    def fiber(self, theta, z):
        """Fiber of phi o P o phi^{-1} at angle theta."""
        th = np.asarray(theta, dtype=float)
        pulled = self.phi_inv(th, np.asarray(z, dtype=complex))
        pushed = self.p.fiber(th, pulled)
        return self.phi(th + float(self.p.alpha), pushed)

    def measure_multiplier(self, n_theta: int = MEASURE_N_THETA) -> MultiplierData:
        """Multiplier on the (unchanged) curve by 4-point finite differences."""
        th = np.arange(n_theta) / n_theta
        h = MEASURE_FD_STEP * self.lin.tube_radius
        base = self.lin.gamma(th)
        offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * h
        weights = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h)
        vals = np.zeros((4, n_theta), dtype=complex)
        for i, s in enumerate(offsets):
            vals[i] = self.fiber(th, base + s)
        deriv = (weights[:, None] * vals).sum(axis=0)
        return multiplier_from_derivative_loop(Loop.from_samples(deriv))


def tube_local_surgery(
    p: QpfPolynomial,
    gamma: Loop,
    kappa: complex,
    lin: Linearizer | None = None,
) -> tuple[RetargetedMap, MultiplierData]:
    """Retarget the multiplier of the curve to kappa; returns the surgered map.

    The measured multiplier of the result must match kappa to 1e-6 or the
    construction is rejected.
    """
    if lin is None:
        lin = build_linearizer(p, gamma)
    model = surgery_coefficients(lin.data.kappa, kappa)
    out = RetargetedMap(p, lin, model)
    measured = out.measure_multiplier()
    err = abs(measured.kappa - complex(kappa))
    if err >= RETARGET_TOL:
        raise NoConvergence(f"measured multiplier misses target by {err:.3e}")
    return out, measured


def kappa_holomorphy_residual(
    lin: Linearizer,
    theta: float,
    z: complex,
    radius: float | None = None,
    nodes: int = HOLOMORPHY_NODES,
) -> float:
    """|contour integral of kappa -> phi_{kappa,theta}(z)| around kappa0.

    Trapezoid rule on ``nodes`` points of the circle of given radius
    (default 5% of |kappa0|).  Zero for a holomorphic dependence.
    """
    kappa0 = lin.data.kappa
    if radius is None:
        radius = HOLOMORPHY_RADIUS_FACTOR * abs(kappa0)
    if abs(kappa0) + radius >= 1.0 or radius >= abs(kappa0):
        raise OutOfDisk("contour leaves the punctured unit disk")
    w = lin.forward(theta, z)  # kappa-independent
    phases = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    targets = np.empty(nodes, dtype=complex)
    for j, ph in enumerate(phases):
        model = surgery_coefficients(kappa0, kappa0 + radius * ph)
        targets[j] = model_map(model, w)
    vals = lin.inverse(np.full(nodes, float(theta)), targets)
    integral = (2j * math.pi * radius / nodes) * np.sum(vals * phases)
    return float(abs(integral))
