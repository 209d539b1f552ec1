import numpy as np

from ebcsim import channel
from ebcsim.channel import ChannelParams


def bounds_gap(p: ChannelParams) -> float:
    """Slope gap between the two outer bounds (0 means parallel)."""
    return (1 - p.delta12) - (1 - p.delta1) * (1 - p.delta2) / (1 - p.delta12)


def random_valid_params(
    rng: np.random.Generator,
    strict_order: bool = False,
    min_mass: float = 0.02,
    d2_max: float = 0.9,
) -> ChannelParams:
    """Draw a valid parameter set with delta1 <= delta2, away from the
    degenerate-geometry boundary.

    strict_order additionally forces delta12 < delta1 < delta2 with a
    margin, so both corner regimes are nonempty.
    """
    while True:
        d1 = rng.uniform(0.05, 0.8)
        d2 = rng.uniform(d1 + (min_mass if strict_order else 0.0), d2_max)
        if d2 >= d2_max:
            continue
        lo = max(0.0, d1 + d2 - 1.0 + min_mass)
        hi = d1 - (min_mass if strict_order else 0.0)
        if lo >= hi:
            continue
        d12 = rng.uniform(lo, hi)
        p = ChannelParams(d1, d2, d12)
        if channel.validate(p):
            continue
        if bounds_gap(p) <= 1e-4:
            continue
        return p
