"""Escape-time rasters for fiber Julia sets and parameter-slice classification.

Rasters are pixel-center sampled with no anti-aliasing; identical inputs
produce byte-identical PNGs.  Escape iteration counts use 0 for "never
escaped within budget".  Classification codes: 0 invalid (vanishing or
under-resolved lambda), 1 nonzero winding, 2 non-member, 3 member.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .dynamics import QpfPolynomial, escape_radius
from .errors import EmptySet
from .loops import AlphaLike, Loop, as_angle

CLASS_INVALID = 0
CLASS_WINDING = 1
CLASS_NONMEMBER = 2
CLASS_MEMBER = 3

# fixed palette: dark grey, violet, deep blue, gold
CLASS_PALETTE = [(40, 40, 40), (150, 60, 190), (25, 45, 95), (235, 195, 60)]

CONVERGENCE_TOL = 1e-6
VANISH_TOL = 1e-12
PHASE_JUMP_LIMIT = math.pi / 2
DEFAULT_BUDGET = 200
DEFAULT_N_ITER = 500
DEFAULT_N_THETA = 256
CELL_CHUNK = 1024


@dataclass
class FiberRaster:
    """Escape-time raster of one fiber's filled Julia set."""

    theta: float
    bounds: tuple[float, float, float, float]  # re0, re1, im0, im1
    width: int
    height: int
    budget: int
    escape_radius: float
    escape_iterations: np.ndarray  # (height, width) int32; 0 = never escaped

    def bounded_fraction(self) -> float:
        return float(np.mean(self.escape_iterations == 0))

    def bounded_points(self) -> np.ndarray:
        """Complex pixel centers that never escaped."""
        xs, ys = _pixel_centers(self.bounds, self.width, self.height)
        grid = xs[None, :] + 1j * ys[:, None]
        return grid[self.escape_iterations == 0]

    def pixel_diag(self) -> float:
        re0, re1, im0, im1 = self.bounds
        return math.hypot((re1 - re0) / self.width, (im1 - im0) / self.height)


@dataclass
class ParamRaster:
    """Classification raster over an affine 2-parameter slice of loops."""

    rect: tuple[float, float, float, float]  # s0, s1, t0, t1
    ns: int
    nt: int
    n_iter: int
    n_theta: int
    winding: np.ndarray        # (nt, ns) int32; only meaningful where valid
    lyapunov: np.ndarray       # (nt, ns) float64; NaN where undefined
    kappa: np.ndarray          # (nt, ns) complex128; NaN where winding != 0 or invalid
    member: np.ndarray         # (nt, ns) bool
    escape_iter: np.ndarray    # (nt, ns) int32; first step an orbit left the envelope, 0 = none
    classes: np.ndarray        # (nt, ns) uint8 classification codes


def _pixel_centers(bounds, width, height):
    re0, re1, im0, im1 = bounds
    xs = re0 + (np.arange(width) + 0.5) * (re1 - re0) / width
    ys = im1 - (np.arange(height) + 0.5) * (im1 - im0) / height  # row 0 on top
    return xs, ys


def fiber_filled_julia(
    p: QpfPolynomial,
    theta: float,
    bounds: tuple[float, float, float, float],
    resolution: tuple[int, int],
    budget: int = DEFAULT_BUDGET,
) -> FiberRaster:
    """Iterate every pixel center along the fiber composition from angle theta.

    Records the first n in 1..budget with |z_n| above the escape radius.
    """
    width, height = resolution
    r_star = escape_radius(p)
    xs, ys = _pixel_centers(bounds, width, height)
    z = (xs[None, :] + 1j * ys[:, None]).astype(complex)
    iters = np.zeros((height, width), dtype=np.int32)
    active = np.ones((height, width), dtype=bool)
    alpha = float(p.alpha)
    th = float(theta)
    for n in range(1, budget + 1):
        if not active.any():
            break
        z_act = p.fiber(th + (n - 1) * alpha, z[active])
        z[active] = z_act
        escaped = np.zeros_like(active)
        escaped[active] = np.abs(z_act) > r_star
        iters[escaped] = n
        active &= ~escaped
    return FiberRaster(
        theta=th,
        bounds=tuple(bounds),
        width=width,
        height=height,
        budget=budget,
        escape_radius=r_star,
        escape_iterations=iters,
    )


def hausdorff_distance(a, b) -> float:
    """Pompeiu-Hausdorff distance between finite complex point sets (KD-tree NN)."""
    from scipy.spatial import cKDTree

    pa = np.asarray(a, dtype=complex).ravel()
    pb = np.asarray(b, dtype=complex).ravel()
    if pa.size == 0 or pb.size == 0:
        raise EmptySet("Hausdorff distance needs two non-empty sets")
    qa = np.column_stack([pa.real, pa.imag])
    qb = np.column_stack([pb.real, pb.imag])
    d_ab = float(np.max(cKDTree(qb).query(qa)[0]))
    d_ba = float(np.max(cKDTree(qa).query(qb)[0]))
    return max(d_ab, d_ba)


@dataclass(frozen=True)
class SliceSpec:
    """Affine slice lambda(s,t) = lambda0 + s v1 + t v2 over a rectangle in (s,t)."""

    lambda0: Loop
    v1: Loop
    v2: Loop
    alpha: AlphaLike
    rect: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)


def param_slice(
    spec: SliceSpec,
    ns: int,
    nt: int,
    n_iter: int = DEFAULT_N_ITER,
    n_theta: int = DEFAULT_N_THETA,
    rect: tuple[float, float, float, float] | None = None,
) -> ParamRaster:
    """Classify each cell of the slice: winding, Lyapunov, multiplier, membership.

    Cells are pixel-center sampled in (s,t).  Cells whose lambda vanishes
    (or is too under-resolved for a trustworthy winding) are marked invalid.
    """
    rect = tuple(rect if rect is not None else spec.rect)
    s0, s1, t0, t1 = rect
    n = max(spec.lambda0.n, spec.v1.n, spec.v2.n)
    base = spec.lambda0.with_resolution(n)
    v1 = spec.v1.with_resolution(n)
    v2 = spec.v2.with_resolution(n)
    alpha = as_angle(spec.alpha)

    s_vals = s0 + (np.arange(ns) + 0.5) * (s1 - s0) / ns
    t_vals = t1 - (np.arange(nt) + 0.5) * (t1 - t0) / nt  # row 0 = top of the rect
    ss, tt = np.meshgrid(s_vals, t_vals)
    ss = ss.ravel()
    tt = tt.ravel()
    n_cells = ss.size

    base4, v14, v24 = base.refined(), v1.refined(), v2.refined()

    winding = np.zeros(n_cells, dtype=np.int32)
    lyap = np.full(n_cells, np.nan)
    kappa = np.full(n_cells, np.nan + 0j, dtype=complex)
    member = np.zeros(n_cells, dtype=bool)
    escape_iter = np.zeros(n_cells, dtype=np.int32)
    classes = np.full(n_cells, CLASS_INVALID, dtype=np.uint8)

    for lo in range(0, n_cells, CELL_CHUNK):
        sel = slice(lo, min(lo + CELL_CHUNK, n_cells))
        s_blk = ss[sel][:, None]
        t_blk = tt[sel][:, None]
        lam4 = base4[None, :] + s_blk * v14[None, :] + t_blk * v24[None, :]
        modmin = np.min(np.abs(lam4), axis=1)
        steps = np.angle(np.roll(lam4, -1, axis=1) / lam4)
        resolved = (modmin >= VANISH_TOL) & (np.max(np.abs(steps), axis=1) <= PHASE_JUMP_LIMIT)
        wind_blk = np.floor(0.5 + steps.sum(axis=1) / (2.0 * math.pi)).astype(np.int32)
        lam_n = lam4[:, ::4]  # refined grid contains the base grid
        with np.errstate(divide="ignore"):
            lyap_blk = np.where(resolved, np.mean(np.log(np.abs(lam_n) + 1e-300), axis=1), np.nan)
        winding[sel] = np.where(resolved, wind_blk, 0)
        lyap[sel] = lyap_blk

        zero_wind = resolved & (wind_blk == 0)
        if zero_wind.any():
            # continuous-log mean along the base grid for kappa_hat
            phases4 = np.concatenate(
                [np.zeros((lam4.shape[0], 1)), np.cumsum(steps[:, :-1], axis=1)], axis=1
            )
            base_arg = np.angle(lam4[:, 0])
            mean_phase = base_arg + np.mean(phases4[:, ::4], axis=1)
            k_blk = np.exp(np.mean(np.log(np.abs(lam_n) + 1e-300), axis=1) + 1j * mean_phase)
            kappa[sel] = np.where(zero_wind, k_blk, np.nan + 0j)

        # critical-orbit membership probe for candidate cells
        candidates = zero_wind & (lyap_blk < 0.0)
        cls_blk = np.where(
            resolved, np.where(wind_blk != 0, CLASS_WINDING, CLASS_NONMEMBER), CLASS_INVALID
        ).astype(np.uint8)
        if candidates.any():
            idx = np.flatnonzero(candidates)
            r_star = 1.0 + np.max(np.abs(lam4[idx]), axis=1)  # escape radius of z^2 + lam z
            ang = np.arange(n_theta) / n_theta
            # incremental per-step loop evaluation over live modes only
            stacked = np.stack([base.coeffs, v1.coeffs, v2.coeffs])
            mask = np.max(np.abs(stacked), axis=0) > 1e-16 * max(1.0, float(np.max(np.abs(stacked))))
            k_nz = base.modes()[mask]
            basis = np.exp(2j * np.pi * np.outer(ang, k_nz))
            rot = np.exp(2j * np.pi * k_nz * alpha)
            c_cur = stacked[:, mask].copy()  # rows: base, v1, v2

            s_sel = ss[sel][idx][:, None]
            t_sel = tt[sel][idx][:, None]
            parts = basis @ c_cur.T  # (n_theta, 3)
            z = -0.5 * (parts[:, 0][None, :] + s_sel * parts[:, 1][None, :] + t_sel * parts[:, 2][None, :])
            cell_active = np.ones(len(idx), dtype=bool)
            esc_at = np.zeros(len(idx), dtype=np.int32)
            for k in range(1, n_iter + 1):
                if not cell_active.any():
                    break
                parts = basis @ c_cur.T
                c_cur = c_cur * rot[None, :]
                act = np.flatnonzero(cell_active)
                lam_k = (
                    parts[:, 0][None, :]
                    + s_sel[act] * parts[:, 1][None, :]
                    + t_sel[act] * parts[:, 2][None, :]
                )
                z_act = z[act]
                z_act = z_act * z_act + lam_k * z_act
                z[act] = z_act
                blew = np.max(np.abs(z_act), axis=1) > r_star[act]
                esc_at[act[blew]] = k
                cell_active[act[blew]] = False
            bounded = esc_at == 0
            converges = bounded & (np.max(np.abs(z), axis=1) < CONVERGENCE_TOL)
            member_blk = converges  # winding 0 and Lambda < 0 hold by construction here
            member[sel.start + idx] = member_blk
            escape_iter[sel.start + idx] = esc_at
            cls_blk[idx[member_blk]] = CLASS_MEMBER
        classes[sel] = cls_blk

    shape = (nt, ns)
    return ParamRaster(
        rect=rect,
        ns=ns,
        nt=nt,
        n_iter=n_iter,
        n_theta=n_theta,
        winding=winding.reshape(shape),
        lyapunov=lyap.reshape(shape),
        kappa=kappa.reshape(shape),
        member=member.reshape(shape),
        escape_iter=escape_iter.reshape(shape),
        classes=classes.reshape(shape),
    )


# -- PNG encoding -----------------------------------------------------------


def escape_png_bytes(raster: FiberRaster) -> bytes:
    """8-bit grayscale of iteration counts (clipped at 255; 0 = bounded)."""
    img = Image.fromarray(np.minimum(raster.escape_iterations, 255).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def classification_png_bytes(classes: np.ndarray) -> bytes:
    """Paletted PNG of classification codes."""
    img = Image.fromarray(classes.astype(np.uint8), mode="P")
    palette = []
    for rgb in CLASS_PALETTE:
        palette.extend(rgb)
    palette.extend([0] * (768 - len(palette)))
    img.putpalette(palette)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()
