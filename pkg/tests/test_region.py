import numpy as np
import pytest

from conftest import bounds_gap, random_valid_params
from ebcsim import region
from ebcsim.channel import ChannelParams
from ebcsim.region import (
    DegenerateChannelError,
    DegenerateGeometryError,
    EmptyRegionError,
    RateTriple,
)

FIG = ChannelParams(0.4, 0.6, 0.24)


def corner_oracle(p: ChannelParams, r0: float):
    """Crossing of the two outer bounds found by an independent 2x2 solve."""
    a = np.array(
        [
            [1 / (1 - p.delta12), 1 / (1 - p.delta2)],
            [1 / (1 - p.delta1), 1 / (1 - p.delta12)],
        ]
    )
    b = np.array([1 - r0 / (1 - p.delta2), 1 - r0 / (1 - p.delta1)])
    return np.linalg.solve(a, b)


def test_rate_triple_rejects_negative():
    with pytest.raises(ValueError):
        RateTriple(-0.1, 0.0, 0.0)


def test_r_bar_examples():
    assert region.r_bar(FIG) == pytest.approx(0.16 / 0.36 * 0.4, abs=1e-12)
    assert region.r_bar(ChannelParams(0.2, 0.5, 0.2)) == 0.0
    assert region.r_bar(ChannelParams(0.3, 0.7, 0.1)) == pytest.approx(0.1, abs=1e-12)


def test_corner_case2_matches_independent_solve():
    c = region.corner_case2(FIG, 0.0)
    oracle = corner_oracle(FIG, 0.0)
    assert c.r1 == pytest.approx(oracle[0], abs=1e-12)
    assert c.r2 == pytest.approx(oracle[1], abs=1e-12)
    # frozen values for the closed forms
    assert c.r1 == pytest.approx(0.4862559241706161, abs=1e-12)
    assert c.r2 == pytest.approx(0.1440758293838862, abs=1e-12)


def test_corner_case2_random_params_match_oracle():
    rng = np.random.default_rng(17)
    for _ in range(200):
        p = random_valid_params(rng, strict_order=True)
        r0 = rng.uniform(0, region.r_bar(p))
        c = region.corner_case2(p, r0)
        oracle = corner_oracle(p, r0)
        assert c.r1 == pytest.approx(oracle[0], abs=1e-9)
        assert c.r2 == pytest.approx(oracle[1], abs=1e-9)


def test_corner_case1_examples():
    c = region.corner_case1(FIG, 0.3)
    assert (c.r1, c.r2) == (pytest.approx(0.19, abs=1e-12), 0.0)
    c = region.corner_case1(FIG, 0.4)
    assert (c.r1, c.r2) == (pytest.approx(0.0, abs=1e-12), 0.0)


def test_corner_continuity_at_threshold():
    rbar = region.r_bar(FIG)
    c1 = region.corner_case1(FIG, rbar)
    c2 = region.corner_case2(FIG, rbar)
    assert c1.r1 == pytest.approx(c2.r1, abs=1e-9)
    assert c2.r2 == pytest.approx(0.0, abs=1e-9)


def test_corner_continuity_random_sweep():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        p = random_valid_params(rng, strict_order=True)
        rbar = region.r_bar(p)
        c1 = region.corner_case1(p, rbar)
        c2 = region.corner_case2(p, rbar)
        assert abs(c1.r1 - c2.r1) < 1e-9
        assert abs(c1.r2 - c2.r2) < 1e-9


def test_target_corner_dispatch():
    rbar = region.r_bar(FIG)
    below = region.target_corner(FIG, rbar / 2)
    above = region.target_corner(FIG, rbar + 0.05)
    assert below.r2 > 0
    assert above.r2 == 0.0


def test_contains_examples():
    inside = region.contains(FIG, RateTriple(0.2, 0.1, 0.1))
    assert inside.status == "inside"
    assert min(inside.margins) > 0
    corner = region.corner_case2(FIG, 0.1)
    on_edge = region.contains(FIG, corner)
    assert on_edge.status == "boundary"
    pumped = RateTriple(corner.r1 * 1.01, corner.r2 * 1.01, 0.1)
    assert region.contains(FIG, pumped).status == "outside"


def test_contains_degenerate_channels():
    with pytest.raises(DegenerateChannelError):
        region.contains(ChannelParams(1.0, 1.0, 1.0), RateTriple(0, 0, 0))
    dead2 = ChannelParams(0.3, 1.0, 0.3)
    with pytest.raises(DegenerateChannelError):
        region.contains(dead2, RateTriple(0.1, 0.0, 0.1))
    m = region.contains(dead2, RateTriple(0.5, 0.0, 0.0))
    assert m.status == "inside"


def test_contains_requires_convention():
    with pytest.raises(ValueError, match="canonicalize"):
        region.contains(ChannelParams(0.6, 0.4, 0.24), RateTriple(0, 0, 0))


def test_canonicalize():
    p, r, swapped = region.canonicalize(
        ChannelParams(0.6, 0.4, 0.24), RateTriple(0.1, 0.2, 0.05)
    )
    assert swapped
    assert (p.delta1, p.delta2) == (0.4, 0.6)
    assert (r.r1, r.r2, r.r0) == (0.2, 0.1, 0.05)
    p2, r2, swapped2 = region.canonicalize(FIG, r)
    assert not swapped2 and p2 == FIG and r2 == r


def test_sum_rate_max_frozen_values():
    assert region.sum_rate_max(FIG, 0.0) == pytest.approx(0.63033175, abs=1e-6)
    assert region.sum_rate_max(FIG, 1 / 16) == pytest.approx(0.61966824, abs=1e-6)
    assert region.sum_rate_max(FIG, 1 / 8) == pytest.approx(0.60900474, abs=1e-6)


def test_sum_rate_max_monotone_in_r0():
    rng = np.random.default_rng(31)
    for _ in range(50):
        p = random_valid_params(rng)
        grid = np.linspace(0, 1 - p.delta2, 60)
        vals = [region.sum_rate_max(p, r0) for r0 in grid]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_region_slice_case2_shape():
    sl = region.region_slice(FIG, 0.0)
    assert sl.active_bounds == (0, 1)
    corner = region.corner_case2(FIG, 0.0)
    assert sl.vertices == (
        (0.0, 0.0),
        (pytest.approx(0.6, abs=1e-12), 0.0),
        (pytest.approx(corner.r1), pytest.approx(corner.r2)),
        (0.0, pytest.approx(0.4, abs=1e-12)),
    )


def test_region_slice_case1_triangle():
    sl = region.region_slice(FIG, 0.3)
    assert sl.active_bounds == (0,)
    assert sl.vertices == (
        (0.0, 0.0),
        (pytest.approx(0.19, abs=1e-12), 0.0),
        (0.0, pytest.approx(0.1, abs=1e-12)),
    )


def test_region_slice_degenerate_point():
    sl = region.region_slice(FIG, 0.4)
    assert sl.vertices == ((0.0, 0.0),)


def test_region_slice_threshold_merges_corner():
    sl = region.region_slice(FIG, region.r_bar(FIG))
    # corner sits on the r1 axis, so the quadrilateral loses one vertex
    assert len(sl.vertices) == 3


def test_region_slice_vertices_lie_in_region():
    rng = np.random.default_rng(41)
    for _ in range(200):
        p = random_valid_params(rng)
        r0 = rng.uniform(0, (1 - p.delta2) * 0.98)
        sl = region.region_slice(p, r0)
        for v1, v2 in sl.vertices:
            m = region.contains(p, RateTriple(v1, v2, r0))
            assert m.status in ("inside", "boundary")
        # pushing the outermost vertex outward must leave the region
        v1, v2 = max(sl.vertices, key=lambda v: v[0] + v[1])
        if v1 + v2 > 0:
            m = region.contains(p, RateTriple(v1 * 1.001, v2 * 1.001, r0))
            assert m.status == "outside"


def test_empty_region_error():
    with pytest.raises(EmptyRegionError):
        region.region_slice(FIG, 0.41)
    with pytest.raises(EmptyRegionError):
        region.corner_case1(FIG, 0.7)


def test_degenerate_geometry_errors():
    with pytest.raises(DegenerateGeometryError):
        region.corner_case2(ChannelParams(0.3, 0.3, 0.3), 0.0)
    with pytest.raises(DegenerateGeometryError):
        region.corner_case2(ChannelParams(0.0, 0.0, 0.0), 0.0)


def test_baseline_slice_matches_capacity_at_zero():
    assert region.baseline_region_slice(FIG, 0.0) == region.region_slice(FIG, 0.0)


def test_baseline_slice_equal_erasure_matches_capacity():
    p = ChannelParams(0.5, 0.5, 0.25)
    for r0 in [0.0, 0.1, 0.3]:
        cap = region.region_slice(p, r0)
        base = region.baseline_region_slice(p, r0)
        cap_sorted = sorted(cap.vertices)
        base_sorted = sorted(base.vertices)
        assert len(cap_sorted) == len(base_sorted)
        for (a1, a2), (b1, b2) in zip(cap_sorted, base_sorted):
            assert a1 == pytest.approx(b1, abs=1e-9)
            assert a2 == pytest.approx(b2, abs=1e-9)


def test_baseline_slice_inside_capacity():
    rng = np.random.default_rng(57)
    for _ in range(100):
        p = random_valid_params(rng)
        r0 = rng.uniform(0, (1 - p.delta2) * 0.95)
        base = region.baseline_region_slice(p, r0)
        for v1, v2 in base.vertices:
            m = region.contains(p, RateTriple(v1, v2, r0))
            assert m.status in ("inside", "boundary")


def test_baseline_strictly_smaller_when_asymmetric():
    cap = region.sum_rate_max(FIG, 1 / 16)
    sl = region.baseline_region_slice(FIG, 1 / 16)
    base = max(v1 + v2 for v1, v2 in sl.vertices) + 1 / 16
    assert base < cap - 1e-6


def test_case2_corner_prefers_receiver1():
    rng = np.random.default_rng(71)
    for _ in range(200):
        p = random_valid_params(rng, strict_order=True)
        r0 = rng.uniform(0, region.r_bar(p))
        c = region.corner_case2(p, r0)
        assert c.r1 >= c.r2 - 1e-12


def test_bounds_gap_positive_on_valid_draws():
    rng = np.random.default_rng(83)
    for _ in range(100):
        p = random_valid_params(rng)
        assert bounds_gap(p) > 0
