"""Corner-point transmission scheme for the two-user erasure broadcast
channel with delayed state feedback, plus the two reference schemes it
is measured against.

Structure of a run: each private message is first sent bit by bit,
repeating every bit until at least one receiver hears it (the
transmitter learns this from the delayed feedback).  Bits that landed
only at the wrong receiver become side information there and are cleared
afterwards with rateless coded segments whose slots are useful to both
receivers at once; the common message rides along in the slack of the
stronger receiver wherever possible and gets its own segment for the
rest.

Rateless codes are blocked into generations of bounded dimension so the
GF(2) solves stay small.  Blocking costs a few slots per generation
boundary and nothing in rate asymptotically.  All transmitter decisions
(advance to the next bit, advance generations, stop a segment) use only
states of already finished slots, so the one-slot feedback delay is
respected structurally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gf2, region
from .channel import ChannelParams, Transcript
from .region import RateTriple

__all__ = [
    "RX1",
    "RX2",
    "InfeasibleCommonRateError",
    "SchemePlan",
    "PhaseOutcome",
    "CodeSpec",
    "Audience",
    "SegmentOutcome",
    "TrialReport",
    "expected_plan",
    "plan",
    "run_phase1",
    "run_phase2",
    "run_xor_segment",
    "run_case1",
    "run_case2",
    "run_variant",
]

RX1, RX2 = 0, 1

VARIANTS = ("capacity", "baseline", "simple")

DEFAULT_GEN_SIZE = 1024


class InfeasibleCommonRateError(ValueError):
    """The common rate leaves no room for private traffic (r0 >= 1 - delta2)."""


def _ceil(x: float) -> int:
    # tolerant ceiling so 1400.0000000000002 stays 1400
    return int(math.ceil(x - 1e-9))


# ---------------------------------------------------------------------------
# planning


def _lengths_from_counts(
    p: ChannelParams, case: str, variant: str, k1: float, k2: float, k0: float
) -> dict[str, float]:
    """Expected slot counts for given bit counts (which may be real-valued)."""
    d1, d2, d12 = p.delta1, p.delta2, p.delta12
    k12 = (d1 - d12) / (1 - d12) * k1
    k21 = (d2 - d12) / (1 - d12) * k2
    out: dict[str, float] = {"k12": k12, "k21": k21, "n1": k1 / (1 - d12)}
    if case == "I":
        n2a = k12 / (1 - d1)
        out["n2a"] = n2a
        out["k0_piggyback"] = min((1 - d2) * n2a, k0)
        out["n2b"] = k0 / (1 - d2) - n2a
        out["total_n"] = out["n1"] + n2a + out["n2b"]
        return out
    out["n2"] = k2 / (1 - d12)
    out["n3a"] = k21 / (1 - d2)
    m_a = (1 - d1) / (1 - d2) * k21
    d_b1 = k12 - m_a
    n3b = d_b1 / (1 - d1)
    out["n3b"] = n3b
    if variant == "capacity":
        out["k0_piggyback"] = min((1 - d2) * n3b, k0)
        out["n3c"] = k0 / (1 - d2) - n3b
        last = out["n3c"]
    else:
        out["k0_piggyback"] = 0.0
        key = "n_common" if variant == "simple" else "n3c"
        out[key] = k0 / (1 - d2)
        last = out[key]
    out["total_n"] = out["n1"] + out["n2"] + out["n3a"] + n3b + last
    return out


def _targets(p: ChannelParams, r0: float, variant: str) -> tuple[RateTriple, str]:
    if r0 >= 1 - p.delta2 - 1e-12:
        raise InfeasibleCommonRateError(
            f"common rate {r0} >= weaker link capacity {1 - p.delta2}; "
            "no private rate is left"
        )
    if variant == "capacity":
        if r0 <= region.r_bar(p) + 1e-15:
            return region.corner_case2(p, r0), "II"
        return region.corner_case1(p, r0), "I"
    base = region.corner_case2(p, 0.0)
    f = 1 - r0 / (1 - p.delta2)
    return RateTriple(f * base.r1, f * base.r2, r0), "II"


def expected_plan(
    p: ChannelParams, r0: float, k1: float = 1.0, variant: str = "capacity"
) -> dict[str, float]:
    """Real-valued allocation (no ceilings): bit counts and expected
    slot counts for the given first private message size."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    p, _, _ = region.canonicalize(p)
    target, case = _targets(p, r0, variant)
    k2 = k1 * target.r2 / target.r1
    k0 = k1 * r0 / target.r1
    out = {
        "case": case,
        "k1": float(k1),
        "k2": k2,
        "k0": k0,
        "target_r1": target.r1,
        "target_r2": target.r2,
    }
    out.update(_lengths_from_counts(p, case, variant, k1, k2, k0))
    return out


@dataclass(frozen=True)
class SchemePlan:
    """Integer allocation and expected slot counts for one trial."""

    params: ChannelParams  # canonical labeling (delta1 <= delta2)
    r0: float
    variant: str
    case: str  # 'I' or 'II'
    k1: int
    k2: int
    k0: int
    k0_piggyback: int
    target: RateTriple
    expected_lengths: dict[str, float] = field(compare=False)
    swapped: bool = False
    gen_size: int = DEFAULT_GEN_SIZE


def plan(
    p: ChannelParams,
    r0: float,
    k1: int,
    variant: str = "capacity",
    gen_size: int = DEFAULT_GEN_SIZE,
) -> SchemePlan:
    """Compute the bit allocation (ceilings applied) and expected
    per-phase slot counts for one trial."""
    if k1 < 1:
        raise ValueError("k1 must be a positive bit count")
    if r0 < 0:
        raise ValueError("common rate must be nonnegative")
    if gen_size < 1:
        raise ValueError("generation size must be positive")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    p_can, _, swapped = region.canonicalize(p)
    target, case = _targets(p_can, r0, variant)
    k2 = _ceil(k1 * target.r2 / target.r1)
    k0 = _ceil(k1 * r0 / target.r1)
    lengths = _lengths_from_counts(p_can, case, variant, k1, float(k2), float(k0))
    piggy = min(_ceil(lengths["k0_piggyback"]), k0)
    return SchemePlan(
        params=p_can,
        r0=r0,
        variant=variant,
        case=case,
        k1=k1,
        k2=k2,
        k0=k0,
        k0_piggyback=piggy,
        target=RateTriple(target.r1, target.r2, r0),
        expected_lengths=lengths,
        swapped=swapped,
        gen_size=gen_size,
    )


# ---------------------------------------------------------------------------
# phase 1 / phase 2: send bits until somebody hears them


@dataclass
class PhaseOutcome:
    slots: int
    delivered: np.ndarray  # bool mask: the intended receiver heard the bit
    missent: np.ndarray  # indices heard only by the other receiver
    undelivered: np.ndarray  # indices nobody heard (fixed-mode shortfall)


def _run_delivery(
    bits: np.ndarray, primary: int, transcript: Transcript, budget: int | None
) -> PhaseOutcome:
    k = len(bits)
    delivered = np.zeros(k, dtype=bool)
    missent: list[int] = []
    slots = 0
    i = 0
    while i < k and (budget is None or slots < budget):
        transcript.step(int(bits[i]))
        slots += 1
        s1, s2 = transcript.tx_state(transcript.length - 1)
        own, other = (s1, s2) if primary == RX1 else (s2, s1)
        if own:
            delivered[i] = True
            i += 1
        elif other:
            missent.append(i)
            i += 1
    if budget is not None:
        while slots < budget:
            transcript.step(0)
            slots += 1
    return PhaseOutcome(
        slots=slots,
        delivered=delivered,
        missent=np.array(missent, dtype=np.int64),
        undelivered=np.arange(i, k, dtype=np.int64),
    )


def run_phase1(w1: np.ndarray, transcript: Transcript, budget: int | None = None) -> PhaseOutcome:
    """Deliver the first private message bit by bit; each bit repeats
    until at least one receiver hears it."""
    return _run_delivery(w1, RX1, transcript, budget)


def run_phase2(w2: np.ndarray, transcript: Transcript, budget: int | None = None) -> PhaseOutcome:
    """Same per-bit repetition discipline for the second private message."""
    return _run_delivery(w2, RX2, transcript, budget)


# ---------------------------------------------------------------------------
# coded segments


@dataclass
class Audience:
    """One receiver's relationship to a code inside a segment.

    known_cols / known_vals: message positions this receiver already
    holds (it only needs equations for the rest).  strip_copy: this
    receiver's copy of the other code's message, used to remove the
    other code's contribution at reception time.  defer: the other
    code's message is not known yet, so keep raw slots and decode after
    the other message is available; rank is still tracked live.
    """

    receiver: int
    known_cols: np.ndarray | None = None
    known_vals: np.ndarray | None = None
    strip_copy: np.ndarray | None = None
    defer: bool = False


@dataclass
class CodeSpec:
    """One rateless code of a segment: message bits plus its audiences."""

    name: str
    message: np.ndarray
    audiences: tuple[Audience, ...]


def _gen_spans(dim: int, gen_size: int) -> list[tuple[int, int]]:
    return [(s, min(s + gen_size, dim)) for s in range(0, dim, gen_size)]


class _Progress:
    """One receiver's per-generation equation tracking for one code."""

    def __init__(self, spans, known_cols=None, known_vals=None, track_rhs=True):
        self.spans = spans
        self.track_rhs = track_rhs
        self.known_cols = known_cols
        self.known_vals = known_vals
        self._unknown_local: list[np.ndarray | None] = []
        self._known_words: list[np.ndarray | None] = []
        self.trackers: list[gf2.IncrementalDecoder] = []
        for s, e in spans:
            if known_cols is None:
                self._unknown_local.append(None)
                self._known_words.append(None)
                self.trackers.append(gf2.IncrementalDecoder(e - s))
                continue
            lo = np.searchsorted(known_cols, s)
            hi = np.searchsorted(known_cols, e)
            local_known = known_cols[lo:hi] - s
            vals = known_vals[lo:hi]
            mask = np.zeros(e - s, dtype=np.uint8)
            mask[local_known] = vals
            unknown = np.setdiff1d(np.arange(e - s, dtype=np.int64), local_known)
            self._unknown_local.append(unknown)
            self._known_words.append(gf2.pack_bits(mask))
            self.trackers.append(gf2.IncrementalDecoder(len(unknown)))
        self._frontier = 0

    def gen_done(self, g: int) -> bool:
        return self.trackers[g].is_complete

    def frontier(self) -> int:
        while self._frontier < len(self.trackers) and self.trackers[self._frontier].is_complete:
            self._frontier += 1
        return self._frontier

    @property
    def all_done(self) -> bool:
        return self.frontier() == len(self.trackers)

    def receive(self, g: int, row_words: np.ndarray, rhs: int) -> None:
        if self.known_cols is None:
            self.trackers[g].add_packed(row_words, rhs if self.track_rhs else 0)
            return
        adj = rhs ^ gf2.encode_packed(row_words, self._known_words[g])
        sub = gf2.extract_columns(row_words, self._unknown_local[g])
        self.trackers[g].add_packed(sub, adj if self.track_rhs else 0)

    def decode(self) -> np.ndarray:
        """Bit-exact message reconstruction; raises if any generation
        is still underdetermined."""
        dim = self.spans[-1][1] if self.spans else 0
        out = np.zeros(dim, dtype=np.uint8)
        for g, (s, e) in enumerate(self.spans):
            if self.known_cols is None:
                out[s:e] = self.trackers[g].solve()
            else:
                solved = self.trackers[g].solve()
                width = e - s
                local = np.zeros(width, dtype=np.uint8)
                local[self._unknown_local[g]] = solved
                known_bits = gf2.unpack_bits(self._known_words[g], width)
                local |= known_bits
                out[s:e] = local
        return out


class _TxCode:
    """Transmit side of one generation-blocked code plus its audiences."""

    _CHUNK = 256

    def __init__(self, spec: CodeSpec, gen_size: int):
        self.spec = spec
        self.spans = _gen_spans(len(spec.message), gen_size)
        self.msg_words = [gf2.pack_bits(spec.message[s:e]) for s, e in self.spans]
        self.progress: list[_Progress] = []
        for aud in spec.audiences:
            self.progress.append(
                _Progress(
                    self.spans,
                    known_cols=aud.known_cols,
                    known_vals=aud.known_vals,
                    track_rhs=not aud.defer,
                )
            )
        self._buf: np.ndarray | None = None
        self._buf_gen = -1
        self._buf_pos = 0

    def frontier(self) -> int | None:
        """Lowest generation some audience still needs, or None when done."""
        f = min(pr.frontier() for pr in self.progress)
        return f if f < len(self.spans) else None

    def next_row(self, g: int, rng: np.random.Generator) -> np.ndarray:
        if g != self._buf_gen or self._buf_pos >= self._CHUNK:
            s, e = self.spans[g]
            self._buf = gf2.random_packed_rows(self._CHUNK, e - s, rng)
            self._buf_gen = g
            self._buf_pos = 0
        row = self._buf[self._buf_pos]
        self._buf_pos += 1
        return row


@dataclass
class SegmentOutcome:
    slots: int
    complete: bool
    progress: dict[tuple[str, int], _Progress]
    raw: dict[tuple[str, int], list]


def run_xor_segment(
    transcript: Transcript,
    rng: np.random.Generator,
    codes: list[CodeSpec],
    gen_size: int = DEFAULT_GEN_SIZE,
    budget: int | None = None,
) -> SegmentOutcome:
    """Run one coded segment: each slot carries the XOR of one fresh
    random combination per still-active code.

    With budget=None the segment stops exactly when every audience of
    every code holds enough independent equations (checked on state
    knowledge one slot old, so nothing is wasted and nothing peeks).
    With a budget it runs exactly that many slots and reports whether
    the prerequisites were met.
    """
    txcodes = [_TxCode(c, gen_size) for c in codes if len(c.message)]
    progress: dict[tuple[str, int], _Progress] = {}
    raw: dict[tuple[str, int], list] = {}
    strip_words: dict[int, list[np.ndarray]] = {}
    for ci, tc in enumerate(txcodes):
        other = txcodes[1 - ci] if len(txcodes) == 2 else None
        for ai, aud in enumerate(tc.spec.audiences):
            progress[(tc.spec.name, aud.receiver)] = tc.progress[ai]
            if aud.defer:
                raw[(tc.spec.name, aud.receiver)] = []
            if aud.strip_copy is not None and other is not None:
                strip_words[id(aud)] = [
                    gf2.pack_bits(aud.strip_copy[s:e]) for s, e in other.spans
                ]
    slots = 0
    while True:
        if budget is None:
            if all(tc.frontier() is None for tc in txcodes):
                break
        elif slots >= budget:
            break
        active: list[tuple[_TxCode, int, np.ndarray, int]] = []
        for tc in txcodes:
            g = tc.frontier()
            if g is None:
                continue
            row = tc.next_row(g, rng)
            bit = gf2.encode_packed(row, tc.msg_words[g])
            active.append((tc, g, row, bit))
        x = 0
        for _, _, _, bit in active:
            x ^= bit
        ys = transcript.step(x)
        slots += 1
        for rx in (RX1, RX2):
            y = ys[rx]
            if y is None:
                continue
            for ci, (tc, g, row, _) in enumerate(active):
                for ai, aud in enumerate(tc.spec.audiences):
                    if aud.receiver != rx:
                        continue
                    if tc.progress[ai].gen_done(g):
                        # this audience already holds full rank here; the
                        # slot only serves the other audience
                        continue
                    other = active[1 - ci] if len(active) == 2 else None
                    if aud.defer:
                        if other is None:
                            raw[(tc.spec.name, rx)].append((g, row, None, None, y))
                        else:
                            raw[(tc.spec.name, rx)].append((g, row, other[1], other[2], y))
                        tc.progress[ai].receive(g, row, 0)
                    else:
                        rhs = y
                        if other is not None:
                            words = strip_words[id(aud)][other[1]]
                            rhs ^= gf2.encode_packed(other[2], words)
                        tc.progress[ai].receive(g, row, rhs)
    complete = all(tc.frontier() is None for tc in txcodes)
    return SegmentOutcome(slots=slots, complete=complete, progress=progress, raw=raw)


def _decode_deferred(
    entries: list,
    spans: list[tuple[int, int]],
    other_decoded: np.ndarray | None,
    other_spans: list[tuple[int, int]] | None,
) -> np.ndarray:
    """Solve a deferred code once the interfering message is known."""
    decs = [gf2.IncrementalDecoder(e - s) for s, e in spans]
    other_words = None
    if other_decoded is not None and other_spans is not None:
        other_words = [gf2.pack_bits(other_decoded[s:e]) for s, e in other_spans]
    for g, row, og, orow, y in entries:
        rhs = y
        if orow is not None:
            if other_words is None:
                raise gf2.UnderdeterminedError(
                    "cannot strip the interfering code: its message was not decoded"
                )
            rhs ^= gf2.encode_packed(orow, other_words[og])
        decs[g].add_packed(row, rhs)
    out = np.zeros(spans[-1][1] if spans else 0, dtype=np.uint8)
    for g, (s, e) in enumerate(spans):
        out[s:e] = decs[g].solve()
    return out


# ---------------------------------------------------------------------------
# full trial runners


@dataclass(frozen=True)
class TrialReport:
    """Everything observable from one protocol run."""

    variant: str
    mode: str
    case: str
    k1: int
    k2: int
    k0: int
    realized_lengths: dict[str, int] = field(compare=False)
    total_n: int = 0
    achieved: RateTriple = None
    decoded_ok_rx1: bool = False
    decoded_ok_rx2: bool = False
    decode_detail: dict[str, bool] = field(compare=False, default=None)
    failures: tuple[str, ...] = ()


def _budget(lengths: dict[str, float], key: str, mode: str, epsilon: float) -> int | None:
    if mode == "adaptive":
        return None
    return _ceil((1 + epsilon) * max(lengths[key], 0.0))


def _strided_subset(total: int, count: int) -> np.ndarray:
    # evenly spread positions so later generations keep proportional
    # side information
    return (np.arange(count, dtype=np.int64) * total) // count if count else np.empty(0, np.int64)


def _try(fn, failures, label):
    try:
        return fn()
    except (gf2.UnderdeterminedError, gf2.InconsistentSystemError) as exc:
        failures.append(f"{label}: {exc}")
        return None


def _equal(a: np.ndarray | None, b: np.ndarray) -> bool:
    return a is not None and a.shape == b.shape and bool((a == b).all())


def run_case2(
    plan_: SchemePlan,
    transcript: Transcript,
    rng: np.random.Generator,
    mode: str = "adaptive",
    epsilon: float = 0.05,
) -> TrialReport:
    """Three-phase run used for small common rates and for the baseline
    and simple variants (which never piggyback in the backlog segment)."""
    p = plan_.params
    d1, d2 = p.delta1, p.delta2
    k1, k2, k0 = plan_.k1, plan_.k2, plan_.k0
    lengths = plan_.expected_lengths
    failures: list[str] = []

    w1 = rng.integers(0, 2, k1, dtype=np.uint8)
    w2 = rng.integers(0, 2, k2, dtype=np.uint8)
    w0 = rng.integers(0, 2, k0, dtype=np.uint8)

    ph1 = run_phase1(w1, transcript, _budget(lengths, "n1", mode, epsilon))
    if ph1.undelivered.size:
        failures.append(f"phase 1 left {ph1.undelivered.size} bits unheard")
    ph2 = run_phase2(w2, transcript, _budget(lengths, "n2", mode, epsilon))
    if ph2.undelivered.size:
        failures.append(f"phase 2 left {ph2.undelivered.size} bits unheard")

    k12_idx = ph1.missent
    k21_idx = ph2.missent
    m_a = min(_ceil((1 - d1) / (1 - d2) * len(k21_idx)), len(k12_idx))
    idx_a = k12_idx[:m_a]
    idx_b = k12_idx[m_a:]

    # segment 3a: both backlogs XORed; each receiver strips the part it
    # already heard in the delivery phases
    codes3a = []
    if k21_idx.size:
        codes3a.append(
            CodeSpec("w2_backlog", w2[k21_idx], (Audience(RX2, strip_copy=w1[idx_a]),))
        )
    if idx_a.size:
        codes3a.append(
            CodeSpec("w1_backlog_a", w1[idx_a], (Audience(RX1, strip_copy=w2[k21_idx]),))
        )
    seg3a = run_xor_segment(
        transcript, rng, codes3a, plan_.gen_size, _budget(lengths, "n3a", mode, epsilon)
    )
    if not seg3a.complete:
        failures.append("segment 3a budget exhausted before completion")

    # segment 3b: rest of receiver 1's backlog; the capacity variant
    # piggybacks part of the common message for receiver 2
    piggyback = plan_.variant == "capacity"
    k0_3b = min(_ceil(len(idx_b) * (1 - d2) / (1 - d1)), k0) if piggyback else 0
    pig_idx = _strided_subset(k0, k0_3b)
    codes3b = []
    if idx_b.size:
        codes3b.append(
            CodeSpec("w1_backlog_b", w1[idx_b], (Audience(RX1, defer=k0_3b > 0),))
        )
    if k0_3b:
        codes3b.append(
            CodeSpec("w0_piggyback", w0[pig_idx], (Audience(RX2, strip_copy=w1[idx_b]),))
        )
    seg3b = run_xor_segment(
        transcript, rng, codes3b, plan_.gen_size, _budget(lengths, "n3b", mode, epsilon)
    )
    if not seg3b.complete:
        failures.append("segment 3b budget exhausted before completion")

    pig_rx2 = None
    if k0_3b:
        pig_rx2 = _try(
            seg3b.progress[("w0_piggyback", RX2)].decode, failures, "piggyback at rx2"
        )

    # final segment: the remaining common bits for both receivers
    last_key = "n_common" if plan_.variant == "simple" else "n3c"
    seg3c = None
    w0_rx1 = w0_rx2 = np.zeros(0, dtype=np.uint8) if k0 == 0 else None
    if k0:
        aud1 = Audience(RX1)
        aud2 = (
            Audience(RX2, known_cols=pig_idx, known_vals=pig_rx2)
            if pig_rx2 is not None
            else Audience(RX2)
        )
        seg3c = run_xor_segment(
            transcript,
            rng,
            [CodeSpec("w0_common", w0, (aud1, aud2))],
            plan_.gen_size,
            _budget(lengths, last_key, mode, epsilon),
        )
        if not seg3c.complete:
            failures.append("common segment budget exhausted before completion")
        w0_rx1 = _try(seg3c.progress[("w0_common", RX1)].decode, failures, "w0 at rx1")
        w0_rx2 = _try(seg3c.progress[("w0_common", RX2)].decode, failures, "w0 at rx2")

    # receiver 1 assembles its private message
    w1_hat = np.full(k1, 255, dtype=np.uint8)
    w1_hat[ph1.delivered] = w1[ph1.delivered]
    if idx_a.size:
        bits_a = _try(seg3a.progress[("w1_backlog_a", RX1)].decode, failures, "backlog a at rx1")
        if bits_a is not None:
            w1_hat[idx_a] = bits_a
    if idx_b.size:
        spans_b = _gen_spans(len(idx_b), plan_.gen_size)
        if k0_3b:
            other_dec = w0_rx1[pig_idx] if w0_rx1 is not None else None
            bits_b = _try(
                lambda: _decode_deferred(
                    seg3b.raw[("w1_backlog_b", RX1)],
                    spans_b,
                    other_dec,
                    _gen_spans(k0_3b, plan_.gen_size),
                ),
                failures,
                "backlog b at rx1",
            )
        else:
            bits_b = _try(seg3b.progress[("w1_backlog_b", RX1)].decode, failures, "backlog b at rx1")
        if bits_b is not None:
            w1_hat[idx_b] = bits_b

    # receiver 2 assembles its private message
    w2_hat = np.full(k2, 255, dtype=np.uint8)
    w2_hat[ph2.delivered] = w2[ph2.delivered]
    if k21_idx.size:
        bits_21 = _try(seg3a.progress[("w2_backlog", RX2)].decode, failures, "backlog at rx2")
        if bits_21 is not None:
            w2_hat[k21_idx] = bits_21

    detail = {
        "w1_rx1": _equal(w1_hat, w1),
        "w0_rx1": _equal(w0_rx1, w0),
        "w2_rx2": _equal(w2_hat, w2),
        "w0_rx2": _equal(w0_rx2, w0),
    }
    realized = {
        "n1": ph1.slots,
        "n2": ph2.slots,
        "n3a": seg3a.slots,
        "n3b": seg3b.slots,
        last_key: seg3c.slots if seg3c else 0,
    }
    total = sum(realized.values())
    return TrialReport(
        variant=plan_.variant,
        mode=mode,
        case="II",
        k1=k1,
        k2=k2,
        k0=k0,
        realized_lengths=realized,
        total_n=total,
        achieved=RateTriple(k1 / total, k2 / total, k0 / total),
        decoded_ok_rx1=detail["w1_rx1"] and detail["w0_rx1"],
        decoded_ok_rx2=detail["w2_rx2"] and detail["w0_rx2"],
        decode_detail=detail,
        failures=tuple(failures),
    )


def run_case1(
    plan_: SchemePlan,
    transcript: Transcript,
    rng: np.random.Generator,
    mode: str = "adaptive",
    epsilon: float = 0.05,
) -> TrialReport:
    """Two-phase run for large common rates: receiver 2 gets no private
    message, and the whole backlog segment doubles as a common carrier."""
    p = plan_.params
    d1, d2 = p.delta1, p.delta2
    k1, k0 = plan_.k1, plan_.k0
    lengths = plan_.expected_lengths
    failures: list[str] = []

    w1 = rng.integers(0, 2, k1, dtype=np.uint8)
    w0 = rng.integers(0, 2, k0, dtype=np.uint8)

    ph1 = run_phase1(w1, transcript, _budget(lengths, "n1", mode, epsilon))
    if ph1.undelivered.size:
        failures.append(f"phase 1 left {ph1.undelivered.size} bits unheard")

    k12_idx = ph1.missent
    k0_2a = min(_ceil(len(k12_idx) * (1 - d2) / (1 - d1)), k0)
    pig_idx = _strided_subset(k0, k0_2a)

    codes2a = []
    if k12_idx.size:
        codes2a.append(
            CodeSpec("w1_backlog", w1[k12_idx], (Audience(RX1, defer=k0_2a > 0),))
        )
    if k0_2a:
        codes2a.append(
            CodeSpec("w0_piggyback", w0[pig_idx], (Audience(RX2, strip_copy=w1[k12_idx]),))
        )
    seg2a = run_xor_segment(
        transcript, rng, codes2a, plan_.gen_size, _budget(lengths, "n2a", mode, epsilon)
    )
    if not seg2a.complete:
        failures.append("segment 2a budget exhausted before completion")

    pig_rx2 = None
    if k0_2a:
        pig_rx2 = _try(
            seg2a.progress[("w0_piggyback", RX2)].decode, failures, "piggyback at rx2"
        )

    seg2b = None
    w0_rx1 = w0_rx2 = np.zeros(0, dtype=np.uint8) if k0 == 0 else None
    if k0:
        aud1 = Audience(RX1)
        aud2 = (
            Audience(RX2, known_cols=pig_idx, known_vals=pig_rx2)
            if pig_rx2 is not None
            else Audience(RX2)
        )
        seg2b = run_xor_segment(
            transcript,
            rng,
            [CodeSpec("w0_common", w0, (aud1, aud2))],
            plan_.gen_size,
            _budget(lengths, "n2b", mode, epsilon),
        )
        if not seg2b.complete:
            failures.append("segment 2b budget exhausted before completion")
        w0_rx1 = _try(seg2b.progress[("w0_common", RX1)].decode, failures, "w0 at rx1")
        w0_rx2 = _try(seg2b.progress[("w0_common", RX2)].decode, failures, "w0 at rx2")

    w1_hat = np.full(k1, 255, dtype=np.uint8)
    w1_hat[ph1.delivered] = w1[ph1.delivered]
    if k12_idx.size:
        spans = _gen_spans(len(k12_idx), plan_.gen_size)
        if k0_2a:
            other_dec = w0_rx1[pig_idx] if w0_rx1 is not None else None
            bits = _try(
                lambda: _decode_deferred(
                    seg2a.raw[("w1_backlog", RX1)],
                    spans,
                    other_dec,
                    _gen_spans(k0_2a, plan_.gen_size),
                ),
                failures,
                "backlog at rx1",
            )
        else:
            bits = _try(seg2a.progress[("w1_backlog", RX1)].decode, failures, "backlog at rx1")
        if bits is not None:
            w1_hat[k12_idx] = bits

    detail = {
        "w1_rx1": _equal(w1_hat, w1),
        "w0_rx1": _equal(w0_rx1, w0),
        "w2_rx2": True,  # no private message for receiver 2 in this regime
        "w0_rx2": _equal(w0_rx2, w0),
    }
    realized = {
        "n1": ph1.slots,
        "n2a": seg2a.slots,
        "n2b": seg2b.slots if seg2b else 0,
    }
    total = sum(realized.values())
    return TrialReport(
        variant=plan_.variant,
        mode=mode,
        case="I",
        k1=k1,
        k2=plan_.k2,
        k0=k0,
        realized_lengths=realized,
        total_n=total,
        achieved=RateTriple(k1 / total, plan_.k2 / total, k0 / total),
        decoded_ok_rx1=detail["w1_rx1"] and detail["w0_rx1"],
        decoded_ok_rx2=detail["w2_rx2"] and detail["w0_rx2"],
        decode_detail=detail,
        failures=tuple(failures),
    )


def run_variant(
    plan_: SchemePlan,
    seed,
    mode: str = "adaptive",
    epsilon: float = 0.05,
) -> TrialReport:
    """Run one full trial of the planned variant from a seed.

    The channel states and the code randomness get independent streams
    spawned from the seed, so replays are byte identical.
    """
    if mode not in ("adaptive", "fixed"):
        raise ValueError(f"unknown mode {mode!r}")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    ch_ss, code_ss = ss.spawn(2)
    transcript = Transcript(plan_.params, np.random.default_rng(ch_ss))
    rng = np.random.default_rng(code_ss)
    if plan_.variant == "capacity" and plan_.case == "I":
        return run_case1(plan_, transcript, rng, mode, epsilon)
    return run_case2(plan_, transcript, rng, mode, epsilon)
