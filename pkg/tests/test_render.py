"""Escape-time rasters, Hausdorff probes, parameter-slice classification."""

import numpy as np
import pytest

from torusdyn import Loop, RotationNumber, SliceSpec, fiber_filled_julia, hausdorff_distance, param_slice
from torusdyn.dynamics import make_fc, make_quadratic
from torusdyn.render import (
    CLASS_MEMBER,
    CLASS_NONMEMBER,
    CLASS_WINDING,
    classification_png_bytes,
    escape_png_bytes,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_unforced_disk_area(golden):
    # c = 0: the filled set is the closed unit disk, area pi
    p = make_fc(Loop.constant(0.0, 64), golden)
    raster = fiber_filled_julia(p, 0.0, (-2, 2, -2, 2), (256, 256), budget=300)
    area = raster.bounded_fraction() * 16.0
    assert abs(area - np.pi) < 0.02 * np.pi


def test_escape_iterations_shape_and_budget(golden):
    p = make_fc(Loop.constant(0.0, 64), golden)
    raster = fiber_filled_julia(p, 0.25, (-2, 2, -2, 2), (64, 32), budget=40)
    assert raster.escape_iterations.shape == (32, 64)
    assert raster.escape_iterations.dtype == np.int32
    assert raster.escape_iterations.max() <= 40
    # far corner escapes immediately, the origin never does
    assert raster.escape_iterations[0, 0] == 1
    assert raster.escape_iterations[16, 32] == 0


def test_budget_refines_monotonically(golden):
    p = make_quadratic(Loop.from_modes({0: 0.5, 1: 0.1}, 128), golden)
    small = fiber_filled_julia(p, 0.3, (-2, 2, -2, 2), (80, 80), budget=50)
    big = fiber_filled_julia(p, 0.3, (-2, 2, -2, 2), (80, 80), budget=200)
    eb = big.escape_iterations
    expected = np.where((eb > 0) & (eb <= 50), eb, 0)
    assert np.array_equal(small.escape_iterations, expected)


def test_hausdorff_oracle():
    a = np.array([0.0 + 0.0j])
    b = np.array([3.0 + 0.0j, 4.0j])
    assert hausdorff_distance(a, b) == pytest.approx(4.0)
    assert hausdorff_distance(b, b) == 0.0


def test_hausdorff_requires_points():
    with pytest.raises(Exception):
        hausdorff_distance(np.array([]), np.array([1.0 + 0j]))


def test_fiber_stability_under_theta(golden):
    # nearby fibers of a forced map stay close in Hausdorff distance
    p = make_quadratic(Loop.from_modes({0: 0.5, 1: 0.1}, 128), golden)
    base = fiber_filled_julia(p, 0.3, (-2, 2, -2, 2), (128, 128), budget=150)
    near = fiber_filled_julia(p, 0.31, (-2, 2, -2, 2), (128, 128), budget=150)
    d = hausdorff_distance(base.bounded_points(), near.bounded_points())
    assert d < 0.2


def test_param_slice_classes(golden):
    # slice through constant loops: lambda(s, t) = (0.5 + s) + i t
    spec = SliceSpec(
        lambda0=Loop.constant(0.5, 64),
        v1=Loop.constant(1.0, 64),
        v2=Loop.constant(1j, 64),
        alpha=golden,
        rect=(-0.2, 0.2, -0.2, 0.2),
    )
    raster = param_slice(spec, 8, 8, n_iter=200, n_theta=64)
    assert raster.classes.shape == (8, 8)
    assert np.all(raster.classes == CLASS_MEMBER)
    assert raster.member.all()


def test_param_slice_mixed_region(golden):
    # pushing |lambda| through 1 leaves the hyperbolic component
    spec = SliceSpec(
        lambda0=Loop.constant(0.5, 64),
        v1=Loop.constant(1.0, 64),
        v2=Loop.constant(1j, 64),
        alpha=golden,
        rect=(-0.1, 1.6, -0.05, 0.05),
    )
    raster = param_slice(spec, 12, 4, n_iter=300, n_theta=64)
    assert np.any(raster.classes == CLASS_MEMBER)
    assert np.any(raster.classes != CLASS_MEMBER)


def test_param_slice_winding_cells(golden):
    # loops 1.2 e(theta) + t wind once around the origin near t = 0
    spec = SliceSpec(
        lambda0=Loop.from_modes({1: 1.2}, 64),
        v1=Loop.constant(1.0, 64),
        v2=Loop.constant(1j, 64),
        alpha=golden,
        rect=(-0.05, 0.05, -0.05, 0.05),
    )
    raster = param_slice(spec, 4, 4, n_iter=100, n_theta=64)
    assert np.all(raster.winding == 1)
    assert np.all(raster.classes == CLASS_WINDING)


def test_window_rasters_are_self_contained(golden):
    spec = SliceSpec(
        lambda0=Loop.constant(0.5, 64),
        v1=Loop.constant(1.0, 64),
        v2=Loop.constant(1j, 64),
        alpha=golden,
        rect=(-1.0, 1.0, -1.0, 1.0),
    )
    win = (-0.25, 0.25, -0.25, 0.25)
    a = param_slice(spec, 6, 6, n_iter=150, n_theta=64, rect=win)
    b = param_slice(spec, 6, 6, n_iter=150, n_theta=64, rect=win)
    assert a.rect == win
    assert np.array_equal(a.classes, b.classes)


def test_png_encoders_are_deterministic(golden):
    p = make_fc(Loop.constant(0.0, 64), golden)
    raster = fiber_filled_julia(p, 0.0, (-2, 2, -2, 2), (64, 64), budget=30)
    png1 = escape_png_bytes(raster)
    png2 = escape_png_bytes(raster)
    assert png1 == png2
    assert png1.startswith(PNG_MAGIC)

    classes = np.full((16, 16), CLASS_NONMEMBER, dtype=np.uint8)
    classes[4:12, 4:12] = CLASS_MEMBER
    out = classification_png_bytes(classes)
    assert out.startswith(PNG_MAGIC)
    assert classification_png_bytes(classes) == out
