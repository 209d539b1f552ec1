"""Two-user binary erasure broadcast channel with correlated erasures.

Per slot the input bit either reaches each receiver intact or is erased;
the pair of reception indicators (S1, S2) is i.i.d. across slots with a
joint law set by the marginal erasure probabilities and the probability
that both links erase together.  The transmitter learns the indicators
with one slot of delay; receivers see the whole indicator sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "ParameterError",
    "CsiAccessError",
    "validate",
    "require_valid",
    "joint_law",
    "sample_state",
    "transmit",
    "Transcript",
]


class ParameterError(ValueError):
    """Erasure probabilities do not describe a valid joint law."""


class CsiAccessError(RuntimeError):
    """An encoder asked for channel state it cannot have yet."""


@dataclass(frozen=True)
class ChannelParams:
    """Marginal erasure probabilities and the both-erased probability."""

    delta1: float
    delta2: float
    delta12: float


def validate(p: ChannelParams) -> list[str]:
    """Return a list of constraint violations; empty means valid."""
    problems = []
    for name, v in (("delta1", p.delta1), ("delta2", p.delta2), ("delta12", p.delta12)):
        if not 0.0 <= v <= 1.0:
            problems.append(f"{name}={v} outside [0, 1]")
    if p.delta12 > min(p.delta1, p.delta2) + 1e-15:
        problems.append(
            f"delta12={p.delta12} exceeds min(delta1, delta2)={min(p.delta1, p.delta2)}"
        )
    if p.delta1 + p.delta2 - p.delta12 > 1.0 + 1e-15:
        problems.append(
            "both-received cell has negative mass: "
            f"1 - delta1 - delta2 + delta12 = {1 - p.delta1 - p.delta2 + p.delta12}"
        )
    return problems


def require_valid(p: ChannelParams) -> ChannelParams:
    problems = validate(p)
    if problems:
        raise ParameterError("; ".join(problems))
    return p


def joint_law(p: ChannelParams) -> tuple[float, float, float, float]:
    """Probabilities of (S1, S2) = (0,0), (0,1), (1,0), (1,1); 0 = erased."""
    require_valid(p)
    p00 = p.delta12
    p01 = p.delta1 - p.delta12
    p10 = p.delta2 - p.delta12
    p11 = 1.0 - p.delta1 - p.delta2 + p.delta12
    return (p00, p01, p10, p11)


_CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))


def sample_state(p: ChannelParams, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one reception-indicator pair; one uniform draw per slot."""
    law = joint_law(p)
    u = rng.random()
    acc = 0.0
    for cell, prob in zip(_CELLS, law):
        acc += prob
        if u < acc:
            return cell
    return (1, 1)


def transmit(x: int, state: tuple[int, int]):
    """Push one bit through the channel; erased outputs are None."""
    if x not in (0, 1):
        raise ValueError(f"channel input must be a bit, got {x!r}")
    s1, s2 = state
    return (x if s1 else None, x if s2 else None)


class Transcript:
    """Channel realization for one protocol run.

    step() consumes one slot.  The transmitter may read indicator pairs
    only for slots that already finished (tx_state enforces the one-slot
    delay structurally); receivers read anything at decode time through
    rx_state / states_so_far.
    """

    def __init__(self, params: ChannelParams, rng: np.random.Generator, block: int = 8192):
        require_valid(params)
        self.params = params
        self._rng = rng
        self._block = block
        self._thresholds = np.cumsum(joint_law(params))
        self._s1 = np.empty(0, dtype=np.uint8)
        self._s2 = np.empty(0, dtype=np.uint8)
        self._t = 0

    def _refill(self) -> None:
        u = self._rng.random(self._block)
        cells = np.searchsorted(self._thresholds, u, side="right")
        cells = np.minimum(cells, 3)
        s1 = (cells >= 2).astype(np.uint8)
        s2 = ((cells == 1) | (cells == 3)).astype(np.uint8)
        self._s1 = np.concatenate([self._s1, s1])
        self._s2 = np.concatenate([self._s2, s2])

    @property
    def length(self) -> int:
        """Number of slots consumed so far."""
        return self._t

    def step(self, x: int):
        """Transmit one bit; returns the two receiver observations."""
        if self._t >= self._s1.shape[0]:
            self._refill()
        t = self._t
        self._t = t + 1
        state = (int(self._s1[t]), int(self._s2[t]))
        return transmit(x, state)

    def tx_state(self, t: int) -> tuple[int, int]:
        """Delayed state feedback: slot t is visible from slot t+1 onward."""
        if t < 0 or t >= self._t:
            raise CsiAccessError(
                f"encoder asked for state of slot {t} during slot {self._t}; "
                "only strictly earlier slots are known at the transmitter"
            )
        return (int(self._s1[t]), int(self._s2[t]))

    def rx_state(self, t: int) -> tuple[int, int]:
        """Receiver-side state access (receivers know the full sequence)."""
        if t < 0 or t >= self._t:
            raise IndexError(f"slot {t} has not happened (length {self._t})")
        return (int(self._s1[t]), int(self._s2[t]))

    def states_so_far(self) -> tuple[np.ndarray, np.ndarray]:
        """Both indicator sequences for the consumed slots, as arrays."""
        return (self._s1[: self._t].copy(), self._s2[: self._t].copy())
