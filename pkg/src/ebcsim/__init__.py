"""Two-user binary erasure broadcast channel with delayed state feedback:
capacity-region geometry, the corner-point transmission scheme, and
Monte Carlo verification tooling.
"""

from . import channel, gf2, montecarlo, region, scheme

__all__ = ["channel", "gf2", "montecarlo", "region", "scheme"]
