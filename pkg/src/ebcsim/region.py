"""Rate-region geometry for the erasure broadcast channel with delayed
state feedback: two weighted-sum outer bounds, their corner points, and
fixed-common-rate slices.

Everything here follows the labeling convention delta1 <= delta2 (link 1
is the stronger private link); canonicalize() maps arbitrary inputs into
that convention and back.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channel import ChannelParams, require_valid

__all__ = [
    "RateTriple",
    "RegionSlice",
    "Membership",
    "DegenerateChannelError",
    "DegenerateGeometryError",
    "EmptyRegionError",
    "canonicalize",
    "r_bar",
    "corner_case1",
    "corner_case2",
    "target_corner",
    "contains",
    "sum_rate_max",
    "region_slice",
    "baseline_region_slice",
]

_TOL = 1e-9
_D_TOL = 1e-12


class DegenerateChannelError(ValueError):
    """A link is fully erased, so the requested quantity is undefined."""


class DegenerateGeometryError(ValueError):
    """The two outer bounds are parallel (perfect or duplicated links)."""


class EmptyRegionError(ValueError):
    """No rate triple with this common rate exists (r0 > 1 - delta2)."""


@dataclass(frozen=True)
class RateTriple:
    """Private rates for receivers 1 and 2 plus the common rate."""

    r1: float
    r2: float
    r0: float

    def __post_init__(self):
        if min(self.r1, self.r2, self.r0) < 0:
            raise ValueError(f"rates must be nonnegative, got {self}")

    def total(self) -> float:
        return self.r1 + self.r2 + self.r0


@dataclass(frozen=True)
class RegionSlice:
    """Polygon of achievable (r1, r2) pairs at a fixed common rate."""

    r0: float
    vertices: tuple[tuple[float, float], ...]
    active_bounds: tuple[int, ...]


@dataclass(frozen=True)
class Membership:
    status: str  # 'inside' | 'boundary' | 'outside'
    margins: tuple[float, float]


def canonicalize(p: ChannelParams, rates: RateTriple | None = None):
    """Swap the receiver labels if needed so that delta1 <= delta2.

    Returns (params, rates, swapped); callers use the flag to report
    results in their own labeling.
    """
    require_valid(p)
    if p.delta1 <= p.delta2:
        return p, rates, False
    swapped_rates = RateTriple(rates.r2, rates.r1, rates.r0) if rates is not None else None
    return ChannelParams(p.delta2, p.delta1, p.delta12), swapped_rates, True


def _require_canonical(p: ChannelParams) -> ChannelParams:
    require_valid(p)
    if p.delta1 > p.delta2:
        raise ValueError(
            f"labeling convention delta1 <= delta2 violated "
            f"({p.delta1} > {p.delta2}); apply canonicalize() first"
        )
    return p


def r_bar(p: ChannelParams) -> float:
    """Common-rate threshold splitting the two corner regimes.

    Zero by convention when delta2 == delta12 (then link 2 never
    receives anything link 1 misses).
    """
    _require_canonical(p)
    if p.delta2 - p.delta12 <= 0:
        return 0.0
    return (p.delta1 - p.delta12) / (p.delta2 - p.delta12) * (1.0 - p.delta2)


def _check_r0(p: ChannelParams, r0: float) -> None:
    if r0 < 0:
        raise ValueError(f"common rate must be nonnegative, got {r0}")
    if r0 > 1.0 - p.delta2 + 1e-15:
        raise EmptyRegionError(
            f"common rate {r0} exceeds the weaker link capacity {1.0 - p.delta2}"
        )


def _bounds_d(p: ChannelParams) -> float:
    # gap between the two bounds' slopes in intercept form; parallel
    # bounds mean no interior crossing and no two-rate corner
    return (1.0 - p.delta12) - (1.0 - p.delta1) * (1.0 - p.delta2) / (1.0 - p.delta12)


def corner_case1(p: ChannelParams, r0: float) -> RateTriple:
    """Corner point when the common rate is large (r0 >= r_bar): all
    remaining room goes to receiver 1."""
    _require_canonical(p)
    _check_r0(p, r0)
    if p.delta2 >= 1.0 or p.delta12 >= 1.0:
        raise DegenerateChannelError("a fully erased link has no corner geometry")
    ratio = r0 / (1.0 - p.delta2)
    r1 = (1.0 - p.delta12) * (1.0 - ratio)
    return RateTriple(max(r1, 0.0), 0.0, r0)


def corner_case2(p: ChannelParams, r0: float) -> RateTriple:
    """Corner point when the common rate is small (r0 <= r_bar): the
    crossing of the two outer bounds."""
    _require_canonical(p)
    _check_r0(p, r0)
    if p.delta2 >= 1.0 or p.delta12 >= 1.0:
        raise DegenerateChannelError("a fully erased link has no corner geometry")
    d = _bounds_d(p)
    if d <= _D_TOL:
        raise DegenerateGeometryError(
            f"outer bounds are parallel (gap {d}); no two-rate corner exists"
        )
    r1 = ((1.0 - p.delta1) * (p.delta2 - p.delta12) - (p.delta1 - p.delta12) * r0) / d
    r2 = ((p.delta1 - p.delta12) * (1.0 - p.delta2) - (p.delta2 - p.delta12) * r0) / d
    return RateTriple(max(r1, 0.0), max(r2, 0.0), r0)


def target_corner(p: ChannelParams, r0: float) -> RateTriple:
    """Dominant corner of the slice at this common rate."""
    return corner_case2(p, r0) if r0 <= r_bar(p) + 1e-15 else corner_case1(p, r0)


def contains(p: ChannelParams, r: RateTriple) -> Membership:
    """Locate a rate triple relative to the outer bounds.

    margins[0] is the slack of the bound weighting r1 by 1/(1-delta12),
    margins[1] the one weighting r2 by 1/(1-delta12); negative means
    violated.
    """
    _require_canonical(p)
    if p.delta12 >= 1.0:
        raise DegenerateChannelError("both links always erased")
    if p.delta2 >= 1.0:
        if r.r2 + r.r0 > 0:
            raise DegenerateChannelError("link 2 always erased but r2 + r0 > 0")
        # validity forces delta1 == delta12 < 1 here
        m1 = 1.0 - r.r1 / (1.0 - p.delta12)
        m2 = 1.0 - r.r1 / (1.0 - p.delta1)
    else:
        m1 = 1.0 - (r.r1 / (1.0 - p.delta12) + (r.r2 + r.r0) / (1.0 - p.delta2))
        m2 = 1.0 - ((r.r1 + r.r0) / (1.0 - p.delta1) + r.r2 / (1.0 - p.delta12))
    worst = min(m1, m2)
    if worst < -_TOL:
        status = "outside"
    elif worst <= _TOL:
        status = "boundary"
    else:
        status = "inside"
    return Membership(status, (m1, m2))


def region_slice(p: ChannelParams, r0: float) -> RegionSlice:
    """Achievable (r1, r2) polygon at fixed common rate, vertices
    counterclockwise from the origin."""
    _require_canonical(p)
    _check_r0(p, r0)
    if p.delta2 >= 1.0 or p.delta12 >= 1.0:
        raise DegenerateChannelError("a fully erased link has no slice geometry")
    b = (1.0 - p.delta2) - r0  # r2-axis intercept, first bound
    if b <= _TOL:
        return RegionSlice(r0, ((0.0, 0.0),), (0,))
    if r0 <= r_bar(p) + 1e-15:
        corner = corner_case2(p, r0)
        a = (1.0 - p.delta1) - r0  # r1-axis intercept, second bound
        verts = [(0.0, 0.0), (a, 0.0)]
        if corner.r2 > _TOL:
            verts.append((corner.r1, corner.r2))
        verts.append((0.0, b))
        return RegionSlice(r0, tuple(verts), (0, 1))
    corner = corner_case1(p, r0)
    return RegionSlice(r0, ((0.0, 0.0), (corner.r1, 0.0), (0.0, b)), (0,))


def baseline_region_slice(p: ChannelParams, r0: float) -> RegionSlice:
    """Slice achievable by time-sharing the private-only scheme with a
    plain common broadcast: the r0 = 0 slice shrunk toward the origin."""
    _require_canonical(p)
    _check_r0(p, r0)
    if p.delta2 >= 1.0 or p.delta12 >= 1.0:
        raise DegenerateChannelError("a fully erased link has no slice geometry")
    f = 1.0 - r0 / (1.0 - p.delta2)
    base = region_slice(p, 0.0)
    if f <= _TOL:
        return RegionSlice(r0, ((0.0, 0.0),), base.active_bounds)
    verts = tuple((f * v1, f * v2) for v1, v2 in base.vertices)
    return RegionSlice(r0, verts, base.active_bounds)


def sum_rate_max(p: ChannelParams, r0: float) -> float:
    """Largest r1 + r2 + r0 on the slice at this common rate."""
    sl = region_slice(p, r0)
    return max(v1 + v2 for v1, v2 in sl.vertices) + r0
