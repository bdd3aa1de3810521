import math

import numpy as np
import pytest

from fracgap.geometry import (
    Ball,
    BallUnion,
    Box,
    EmptyGridError,
    IntervalUnion,
    MaskFormatError,
    contains,
    diameter,
    dilate,
    inscribed_radius,
    interval,
    load_mask,
    mask_from_predicate,
    rasterize,
    save_mask,
)


def test_rasterize_interval_exact_tiling():
    grid = rasterize(interval(-1.0, 1.0), 0.5)
    assert grid.n == 4
    xs = sorted(grid.centers[:, 0])
    assert xs == pytest.approx([-0.75, -0.25, 0.25, 0.75])
    assert grid.volume == pytest.approx(2.0)


def test_rasterize_box_exact_tiling():
    grid = rasterize(Box((-1.0, -1.0), (1.0, 1.0)), 0.5)
    assert grid.n == 16
    assert grid.volume == pytest.approx(4.0)


def test_rasterize_disk_volume_vs_enumeration():
    h = 0.1
    grid = rasterize(Ball((0.0, 0.0), 1.0), h)
    # independent enumeration of lattice centers inside the disk
    count = 0
    for i in range(grid.dims[0]):
        for j in range(grid.dims[1]):
            x = grid.origin[0] + (i + 0.5) * h
            y = grid.origin[1] + (j + 0.5) * h
            if x * x + y * y < 1.0:
                count += 1
    assert grid.n == count
    assert abs(grid.volume - math.pi) <= 0.05 * math.pi


def test_disk_volume_convergence():
    errs = []
    for h in (0.2, 0.1, 0.05):
        grid = rasterize(Ball((0.0, 0.0), 1.0), h)
        err = abs(grid.volume - math.pi)
        assert err <= 4.0 * (2.0 * math.pi) * h
        errs.append(err)
    assert errs[0] >= errs[1] >= errs[2]


def test_rasterize_preconditions():
    with pytest.raises(ValueError):
        rasterize(interval(-1.0, 1.0), 0.5001)  # not below diameter/4
    with pytest.raises(ValueError):
        rasterize(interval(-1.0, 1.0), -0.1)


def test_rasterize_empty_grid_error():
    # two tiny far-apart intervals: diameter is large but no cell center lands inside
    dom = IntervalUnion(((0.0, 0.02), (10.0, 10.02)))
    with pytest.raises(EmptyGridError):
        rasterize(dom, 1.0)


def test_grid_inside_centers_are_members():
    dom = Ball((0.3, -0.2), 0.9)
    grid = rasterize(dom, 0.07)
    assert contains(dom, grid.centers).all()
    # at least one padding layer of outside cells on every side
    assert grid.index.min() >= 1
    assert (grid.index.max(axis=0) <= np.asarray(grid.dims) - 2).all()


def test_diameter_exact_shapes():
    assert diameter(interval(-1.0, 1.0)) == pytest.approx(2.0)
    assert diameter(Box((-1.0, -1.0), (1.0, 1.0))) == pytest.approx(2.0 * math.sqrt(2.0))
    two = BallUnion((Ball((-3.0, 0.0), 1.0), Ball((3.0, 0.0), 1.0)))
    assert diameter(two) == pytest.approx(8.0)
    assert diameter(Ball((0.5,), 2.0)) == pytest.approx(4.0)


def test_diameter_dilation_homogeneity():
    shapes = [
        interval(-1.0, 1.0),
        Box((-1.0, 0.0), (2.0, 1.0)),
        Ball((0.2, 0.1), 1.3),
        BallUnion((Ball((-2.0, 0.0), 0.5), Ball((2.0, 0.0), 1.0))),
    ]
    for dom in shapes:
        for r in (0.5, 2.0, 3.7):
            assert diameter(dilate(dom, r)) == pytest.approx(r * diameter(dom), rel=1e-12)


def test_dilate_shapes():
    assert dilate(interval(-1.0, 1.0), 2.0).intervals == ((-2.0, 2.0),)
    b = dilate(Ball((0.0,), 1.0), 3.0)
    assert b.center == (0.0,) and b.radius == 3.0


def test_inscribed_radius_exact_shapes():
    r, c = inscribed_radius(interval(-1.0, 1.0))
    assert r == pytest.approx(1.0) and c[0] == pytest.approx(0.0)
    r, c = inscribed_radius(Box((-1.0, -1.0), (1.0, 1.0)))
    assert r == pytest.approx(1.0) and np.allclose(c, 0.0)
    two = BallUnion((Ball((-4.0, 0.0), 1.0), Ball((4.0, 0.0), 1.0)))
    r, c = inscribed_radius(two)
    assert r == pytest.approx(1.0)
    assert abs(c[0]) == pytest.approx(4.0)


def lshape_mask(h: float):
    def pred(pts):
        in_box = np.all((pts > -1.0) & (pts < 1.0), axis=1)
        in_cut = (pts[:, 0] >= 0.0) & (pts[:, 1] >= 0.0)
        return in_box & ~in_cut

    return mask_from_predicate((-1.0, -1.0), (1.0, 1.0), h, pred)


def test_inscribed_ball_validity_on_raster():
    dom = lshape_mask(0.05)
    r, c = inscribed_radius(dom)
    assert r > 0.3  # the L has arms of width 1, so a decent ball must fit
    rng = np.random.default_rng(99)
    # rejection-sample 100 points in the returned ball, all must lie in the domain
    pts = []
    while len(pts) < 100:
        cand = c + rng.uniform(-r, r, size=(200, 2))
        cand = cand[np.sum((cand - c) ** 2, axis=1) < r * r]
        pts.extend(cand.tolist())
    pts = np.array(pts[:100])
    assert contains(dom, pts).all()


def test_raster_diameter_is_conservative():
    dom = lshape_mask(0.05)
    # true diameter of the L-shape is the square's corner distance
    assert diameter(dom) >= 2.0 * math.sqrt(2.0) - 1e-9
    assert diameter(dom) <= 2.0 * math.sqrt(2.0) + 0.2


def test_mask_roundtrip_2d(tmp_path):
    dom = lshape_mask(0.25)
    path = tmp_path / "l.mask"
    save_mask(dom, path)
    back = load_mask(path)
    assert back.h == dom.h
    assert np.array_equal(back.mask, dom.mask)


def test_mask_roundtrip_1d(tmp_path):
    mask = np.array([False, True, True, False, True, False])
    from fracgap.geometry import RasterMask

    dom = RasterMask(mask, 0.5)
    path = tmp_path / "seg.mask"
    save_mask(dom, path)
    back = load_mask(path)
    assert np.array_equal(back.mask, mask)
    assert back.h == 0.5


def test_mask_format_errors(tmp_path):
    bad = tmp_path / "bad.mask"
    bad.write_text("2 0.5 3 2\n111\n11\n")
    with pytest.raises(MaskFormatError):
        load_mask(bad)
    bad.write_text("nonsense\n")
    with pytest.raises(MaskFormatError):
        load_mask(bad)
    bad.write_text("1 0.5 3\n102\n")
    with pytest.raises(MaskFormatError):
        load_mask(bad)


def test_domain_validation():
    with pytest.raises(ValueError):
        IntervalUnion(((0.0, 1.0), (0.5, 2.0)))  # overlap
    with pytest.raises(ValueError):
        IntervalUnion(((1.0, 0.0),))
    with pytest.raises(ValueError):
        Ball((0.0, 0.0), -1.0)
    with pytest.raises(ValueError):
        Box((0.0, 0.0), (1.0, -1.0))
    with pytest.raises(ValueError):
        BallUnion((Ball((0.0,), 1.0), Ball((1.5,), 1.0)))  # overlap
    # touching endpoints are disjoint as open sets
    IntervalUnion(((-1.0, 0.0), (0.0, 1.0)))


def test_raster_contains_respects_cells():
    mask = np.zeros((4, 4), dtype=bool)
    mask[1, 2] = True
    from fracgap.geometry import RasterMask

    dom = RasterMask(mask, 1.0, (0.0, 0.0))
    inside = contains(dom, np.array([[1.5, 2.5], [0.5, 0.5], [5.0, 5.0]]))
    assert inside.tolist() == [True, False, False]
