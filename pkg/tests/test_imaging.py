import numpy as np
import pytest

from oracles import brute_otsu, flood_components, moment_axes
from scriptid.imaging import (
    as_binary,
    as_gray,
    binarize,
    component_eccentricity,
    component_extent,
    connected_components,
    otsu_threshold,
    remove_small_objects,
)


# ---------------------------------------------------------------- validators
def test_as_gray_rejects_bad_shapes_and_values():
    with pytest.raises(ValueError):
        as_gray(np.zeros((0, 4), np.uint8))
    with pytest.raises(ValueError):
        as_gray(np.zeros(4, np.uint8))
    with pytest.raises(ValueError):
        as_gray(np.full((2, 2), 300, np.int32))
    with pytest.raises(ValueError):
        as_gray(np.zeros((2, 2), np.float64))


def test_as_binary_rejects_values_outside_01():
    with pytest.raises(ValueError):
        as_binary(np.full((2, 2), 2, np.uint8))
    with pytest.raises(ValueError):
        as_binary(np.full((2, 2), -1, np.int8))
    out = as_binary([[0, 1], [1, 0]])
    assert out.dtype == np.uint8
    assert not out.flags.writeable


# ---------------------------------------------------------------- otsu
def test_otsu_uniform_image_returns_unique_intensity():
    assert otsu_threshold(np.full((8, 8), 200, np.uint8)) == 200
    assert otsu_threshold(np.zeros((3, 3), np.uint8)) == 0


def test_otsu_two_value_image_separates_classes():
    img = np.zeros((10, 10), np.uint8)
    img[:5] = 40
    img[5:] = 210
    t = otsu_threshold(img)
    assert 40 <= t <= 209
    assert t == brute_otsu(img)


def test_otsu_matches_bruteforce_on_random_images(rng):
    for _ in range(30):
        img = rng.integers(0, 256, (64, 64)).astype(np.uint8)
        assert otsu_threshold(img) == brute_otsu(img)


def test_otsu_matches_bruteforce_on_structured_images(rng):
    for _ in range(10):
        img = np.full((32, 32), 220, np.uint8)
        n = int(rng.integers(10, 200))
        rr = rng.integers(0, 32, n)
        cc = rng.integers(0, 32, n)
        img[rr, cc] = rng.integers(0, 80, n)
        assert otsu_threshold(img) == brute_otsu(img)


# ---------------------------------------------------------------- binarize
def test_binarize_trivial_cases():
    assert not binarize(np.full((4, 4), 255, np.uint8), 128).any()
    assert binarize(np.zeros((4, 4), np.uint8), 128).all()


def test_binarize_bimodal_maps_dark_pixels():
    img = np.full((6, 6), 210, np.uint8)
    img[2:4, 2:4] = 40
    t = otsu_threshold(img)
    out = binarize(img, t)
    assert np.array_equal(out, (img == 40).astype(np.uint8))


def test_binarize_monotone_in_threshold(rng):
    img = rng.integers(0, 256, (16, 16)).astype(np.uint8)
    prev = binarize(img, 0)
    for t in range(0, 256, 17):
        cur = binarize(img, t)
        assert ((prev == 1) <= (cur == 1)).all()
        prev = cur


# ---------------------------------------------------------------- components
def test_components_empty_image():
    stats, labels = connected_components(np.zeros((5, 5), np.uint8))
    assert stats == []
    assert not labels.any()


def test_components_diagonal_connectivity():
    img = np.zeros((4, 4), np.uint8)
    img[1, 1] = img[2, 2] = 1
    assert len(connected_components(img, connectivity=8)[0]) == 1
    assert len(connected_components(img, connectivity=4)[0]) == 2


def test_components_match_flood_fill_oracle(rng):
    for conn in (4, 8):
        for _ in range(10):
            img = (rng.random((64, 64)) < 0.12).astype(np.uint8)
            stats, labels = connected_components(img, connectivity=conn)
            oracle = flood_components(img, connectivity=conn)
            assert len(stats) == len(oracle)
            for c, pixels in zip(stats, oracle):
                got = set(zip(*np.nonzero(labels == c.id)))
                assert got == pixels
                assert c.area == len(pixels)
                rows = [p[0] for p in pixels]
                cols = [p[1] for p in pixels]
                assert c.bbox == (min(rows), min(cols), max(rows), max(cols))


def test_components_labels_partition_ink(rng):
    img = (rng.random((40, 40)) < 0.3).astype(np.uint8)
    stats, labels = connected_components(img)
    assert np.array_equal(labels > 0, img == 1)
    assert sum(c.area for c in stats) == int(img.sum())


def test_components_raster_discovery_order(rng):
    img = (rng.random((30, 30)) < 0.1).astype(np.uint8)
    _, labels = connected_components(img)
    flat = labels.ravel()
    firsts = [np.flatnonzero(flat == lab)[0] for lab in range(1, flat.max() + 1)]
    assert firsts == sorted(firsts)


def test_components_rejects_bad_connectivity():
    with pytest.raises(ValueError):
        connected_components(np.zeros((2, 2), np.uint8), connectivity=6)


# ---------------------------------------------------------------- geometry
def _single_component(img):
    stats, _ = connected_components(np.asarray(img, dtype=np.uint8))
    assert len(stats) == 1
    return stats[0]


def test_eccentricity_single_pixel_is_one():
    c = _single_component([[0, 0], [0, 1]])
    assert component_eccentricity(c) == pytest.approx(1.0)


def test_eccentricity_filled_square_is_one():
    c = _single_component(np.ones((9, 9)))
    assert component_eccentricity(c) == pytest.approx(1.0)


def test_eccentricity_bar_matches_moment_oracle():
    img = np.zeros((3, 12), np.uint8)
    img[1, 1:11] = 1
    c = _single_component(img)
    major, minor = moment_axes(list(zip(*np.nonzero(img))))
    assert c.major_axis_len == pytest.approx(major, rel=1e-12)
    assert c.minor_axis_len == pytest.approx(minor, rel=1e-12)
    assert component_eccentricity(c) == pytest.approx(minor / major, rel=1e-12)


def test_axis_lengths_match_oracle_on_random_blobs(rng):
    for _ in range(20):
        img = (rng.random((20, 20)) < 0.3).astype(np.uint8)
        if not img.any():
            continue
        stats, labels = connected_components(img)
        for c in stats:
            pixels = list(zip(*np.nonzero(labels == c.id)))
            major, minor = moment_axes(pixels)
            assert c.major_axis_len == pytest.approx(major, rel=1e-9)
            assert c.minor_axis_len == pytest.approx(minor, rel=1e-9)


def test_geometry_ranges_on_random_images(rng):
    for _ in range(50):
        img = (rng.random((24, 24)) < rng.uniform(0.05, 0.6)).astype(np.uint8)
        stats, _ = connected_components(img)
        for c in stats:
            assert 0.0 <= component_eccentricity(c) <= 1.0 + 1e-12
            assert 0.0 < component_extent(c) <= 1.0
            assert c.minor_axis_len <= c.major_axis_len + 1e-12
            assert c.bbox[0] <= c.centroid[0] <= c.bbox[2]
            assert c.bbox[1] <= c.centroid[1] <= c.bbox[3]


def test_extent_trivial_cases():
    assert component_extent(_single_component(np.ones((4, 7)))) == pytest.approx(1.0)
    plus = np.zeros((3, 3), np.uint8)
    plus[1, :] = 1
    plus[:, 1] = 1
    assert component_extent(_single_component(plus)) == pytest.approx(5 / 9)


# ---------------------------------------------------------------- despeckle
def test_remove_small_objects_thresholds():
    dot = np.zeros((8, 8), np.uint8)
    dot[3:5, 3:5] = 1  # 4 px
    assert not remove_small_objects(dot, min_area=15).any()

    blob = np.zeros((10, 10), np.uint8)
    blob[2:8, 2:7] = 1  # 30 px
    assert np.array_equal(remove_small_objects(blob, min_area=15), blob)


def test_remove_small_objects_matches_component_oracle(rng):
    img = (rng.random((48, 48)) < 0.2).astype(np.uint8)
    out = remove_small_objects(img, min_area=15)
    expected = np.zeros_like(img)
    for comp in flood_components(img, 8):
        if len(comp) >= 15:
            for r, c in comp:
                expected[r, c] = 1
    assert np.array_equal(out, expected)


def test_remove_small_objects_idempotent(rng):
    img = (rng.random((32, 32)) < 0.25).astype(np.uint8)
    once = remove_small_objects(img, min_area=10)
    assert np.array_equal(remove_small_objects(once, min_area=10), once)
