"""Monte Carlo harness: repeated protocol trials, rate aggregation, and
variant comparisons with matched channel randomness.

Rates are reported in the caller's receiver labeling even when the
planner swapped the receivers internally to put the stronger link
first.  Per-trial seeds derive from (base_seed, trial index), so any
single trial can be replayed in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import region, scheme
from .channel import ChannelParams
from .region import RateTriple

__all__ = [
    "ExperimentSpec",
    "TrialDigest",
    "ExperimentSummary",
    "ComparisonResult",
    "SweepPoint",
    "run_experiment",
    "compare_variants",
    "convergence_sweep",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo configuration."""

    params: ChannelParams
    r0: float
    k1: int
    variant: str = "capacity"
    trials: int = 10
    mode: str = "adaptive"
    epsilon: float = 0.05
    gen_size: int = scheme.DEFAULT_GEN_SIZE
    base_seed: int = 0

    def to_dict(self) -> dict:
        return {
            "delta1": self.params.delta1,
            "delta2": self.params.delta2,
            "delta12": self.params.delta12,
            "r0": self.r0,
            "k1": self.k1,
            "variant": self.variant,
            "trials": self.trials,
            "mode": self.mode,
            "epsilon": self.epsilon,
            "gen_size": self.gen_size,
            "base_seed": self.base_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        return cls(
            params=ChannelParams(d["delta1"], d["delta2"], d["delta12"]),
            r0=d["r0"],
            k1=d["k1"],
            variant=d.get("variant", "capacity"),
            trials=d.get("trials", 10),
            mode=d.get("mode", "adaptive"),
            epsilon=d.get("epsilon", 0.05),
            gen_size=d.get("gen_size", scheme.DEFAULT_GEN_SIZE),
            base_seed=d.get("base_seed", 0),
        )


@dataclass(frozen=True)
class TrialDigest:
    trial: int
    total_n: int
    r1: float
    r2: float
    r0: float
    decoded_ok: bool
    lengths: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "total_n": self.total_n,
            "r1": self.r1,
            "r2": self.r2,
            "r0": self.r0,
            "decoded_ok": self.decoded_ok,
            "lengths": dict(self.lengths),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialDigest":
        return cls(
            d["trial"],
            d["total_n"],
            d["r1"],
            d["r2"],
            d["r0"],
            d["decoded_ok"],
            d.get("lengths", {}),
        )


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregated outcome of one experiment, in the caller's labeling."""

    spec: ExperimentSpec
    case: str
    swapped: bool
    target: RateTriple
    mean: RateTriple
    stderr: RateTriple
    mean_sum: float
    stderr_sum: float
    mean_total_n: float
    decode_success_rate: float
    all_decoded: bool
    bound_margins: tuple[float, float]
    bound_status: str
    trials_detail: tuple[TrialDigest, ...] = field(compare=False)
    # canonical-labeling plan snapshot (message counts, expected lengths)
    plan: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "case": self.case,
            "swapped": self.swapped,
            "plan": dict(self.plan),
            "target": {"r1": self.target.r1, "r2": self.target.r2, "r0": self.target.r0},
            "mean": {"r1": self.mean.r1, "r2": self.mean.r2, "r0": self.mean.r0},
            "stderr": {"r1": self.stderr.r1, "r2": self.stderr.r2, "r0": self.stderr.r0},
            "mean_sum": self.mean_sum,
            "stderr_sum": self.stderr_sum,
            "mean_total_n": self.mean_total_n,
            "decode_success_rate": self.decode_success_rate,
            "all_decoded": self.all_decoded,
            "bound_margins": list(self.bound_margins),
            "bound_status": self.bound_status,
            "trials": [t.to_dict() for t in self.trials_detail],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSummary":
        return cls(
            spec=ExperimentSpec.from_dict(d["spec"]),
            case=d["case"],
            swapped=d["swapped"],
            target=RateTriple(**d["target"]),
            mean=RateTriple(**d["mean"]),
            stderr=RateTriple(**d["stderr"]),
            mean_sum=d["mean_sum"],
            stderr_sum=d["stderr_sum"],
            mean_total_n=d["mean_total_n"],
            decode_success_rate=d["decode_success_rate"],
            all_decoded=d["all_decoded"],
            bound_margins=tuple(d["bound_margins"]),
            bound_status=d["bound_status"],
            trials_detail=tuple(TrialDigest.from_dict(t) for t in d["trials"]),
            plan=d.get("plan", {}),
        )


def trial_seed(base_seed: int, trial: int) -> np.random.SeedSequence:
    """Seed for one trial; any trial replays without running the others."""
    return np.random.SeedSequence([base_seed, trial])


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def run_experiment(spec: ExperimentSpec) -> ExperimentSummary:
    """Run spec.trials independent protocol trials and aggregate rates."""
    if spec.trials < 1:
        raise ValueError("need at least one trial")
    pl = scheme.plan(spec.params, spec.r0, spec.k1, spec.variant, spec.gen_size)
    digests = []
    r1s, r2s, r0s, sums, totals = [], [], [], [], []
    for i in range(spec.trials):
        rep = scheme.run_variant(pl, trial_seed(spec.base_seed, i), spec.mode, spec.epsilon)
        a, b = rep.achieved.r1, rep.achieved.r2
        if pl.swapped:
            a, b = b, a
        ok = rep.decoded_ok_rx1 and rep.decoded_ok_rx2
        digests.append(
            TrialDigest(i, rep.total_n, a, b, rep.achieved.r0, ok, dict(rep.realized_lengths))
        )
        r1s.append(a)
        r2s.append(b)
        r0s.append(rep.achieved.r0)
        sums.append(a + b + rep.achieved.r0)
        totals.append(rep.total_n)
    r1s, r2s, r0s, sums = map(np.asarray, (r1s, r2s, r0s, sums))
    mean = RateTriple(float(r1s.mean()), float(r2s.mean()), float(r0s.mean()))
    # outer-bound check runs in canonical labeling
    mean_can = RateTriple(mean.r2, mean.r1, mean.r0) if pl.swapped else mean
    member = region.contains(pl.params, mean_can)
    target = RateTriple(pl.target.r2, pl.target.r1, pl.r0) if pl.swapped else pl.target
    ok_count = sum(d.decoded_ok for d in digests)
    plan_dict = {
        "delta1": pl.params.delta1,
        "delta2": pl.params.delta2,
        "delta12": pl.params.delta12,
        "k1": pl.k1,
        "k2": pl.k2,
        "k0": pl.k0,
        "k0_piggyback": pl.k0_piggyback,
        "expected_lengths": dict(pl.expected_lengths),
    }
    return ExperimentSummary(
        spec=spec,
        case=pl.case,
        swapped=pl.swapped,
        target=target,
        mean=mean,
        stderr=RateTriple(_stderr(r1s), _stderr(r2s), _stderr(r0s)),
        mean_sum=float(sums.mean()),
        stderr_sum=_stderr(sums),
        mean_total_n=float(np.mean(totals)),
        decode_success_rate=ok_count / spec.trials,
        all_decoded=ok_count == spec.trials,
        bound_margins=member.margins,
        bound_status=member.status,
        trials_detail=tuple(digests),
        plan=plan_dict,
    )


@dataclass(frozen=True)
class ComparisonResult:
    """Two experiments on matched per-trial seeds plus the paired gap."""

    first: ExperimentSummary
    second: ExperimentSummary
    delta_sum: float  # mean over trials of (first - second) sum rate
    stderr_delta: float

    def to_dict(self) -> dict:
        return {
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "delta_sum": self.delta_sum,
            "stderr_delta": self.stderr_delta,
        }


def compare_variants(
    params: ChannelParams,
    r0: float,
    k1: int,
    trials: int = 10,
    variants: tuple[str, str] = ("capacity", "baseline"),
    mode: str = "adaptive",
    epsilon: float = 0.05,
    gen_size: int = scheme.DEFAULT_GEN_SIZE,
    base_seed: int = 0,
) -> ComparisonResult:
    """Run two variants on identical per-trial seeds and report the
    paired sum-rate gap with its standard error."""
    summaries = []
    for v in variants:
        spec = ExperimentSpec(
            params, r0, k1, v, trials, mode, epsilon, gen_size, base_seed
        )
        summaries.append(run_experiment(spec))
    first, second = summaries
    d = np.array(
        [
            (a.r1 + a.r2 + a.r0) - (b.r1 + b.r2 + b.r0)
            for a, b in zip(first.trials_detail, second.trials_detail)
        ]
    )
    return ComparisonResult(
        first=first,
        second=second,
        delta_sum=float(d.mean()),
        stderr_delta=_stderr(d),
    )


@dataclass(frozen=True)
class SweepPoint:
    k1: int
    max_rel_error: float  # worst component error of the mean vs the target
    summary: ExperimentSummary

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "max_rel_error": self.max_rel_error,
            "summary": self.summary.to_dict(),
        }


def _max_rel_error(mean: RateTriple, target: RateTriple) -> float:
    err = 0.0
    for got, want in ((mean.r1, target.r1), (mean.r2, target.r2), (mean.r0, target.r0)):
        if want > 1e-12:
            err = max(err, abs(got - want) / want)
        else:
            err = max(err, abs(got))
    return err


def convergence_sweep(
    params: ChannelParams,
    r0: float,
    k1_values: tuple[int, ...],
    trials: int = 4,
    variant: str = "capacity",
    mode: str = "adaptive",
    epsilon: float = 0.05,
    gen_size: int = scheme.DEFAULT_GEN_SIZE,
    base_seed: int = 0,
) -> tuple[SweepPoint, ...]:
    """Run the same configuration at increasing message sizes to watch
    the achieved rates approach the target corner."""
    points = []
    for k1 in k1_values:
        spec = ExperimentSpec(
            params, r0, int(k1), variant, trials, mode, epsilon, gen_size, base_seed
        )
        summary = run_experiment(spec)
        points.append(
            SweepPoint(int(k1), _max_rel_error(summary.mean, summary.target), summary)
        )
    return tuple(points)
