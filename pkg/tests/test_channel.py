import numpy as np
import pytest

from ebcsim import channel
from ebcsim.channel import ChannelParams, Transcript


FIG_PARAMS = ChannelParams(0.4, 0.6, 0.24)


def test_validate_accepts_known_good():
    assert channel.validate(FIG_PARAMS) == []


def test_validate_rejects_excess_joint():
    problems = channel.validate(ChannelParams(0.4, 0.6, 0.5))
    assert problems and "delta12" in problems[0]


def test_validate_rejects_negative_both_received_mass():
    problems = channel.validate(ChannelParams(0.9, 0.9, 0.0))
    assert problems
    with pytest.raises(channel.ParameterError):
        channel.require_valid(ChannelParams(0.9, 0.9, 0.0))


def test_validate_range_checks():
    assert channel.validate(ChannelParams(-0.1, 0.5, 0.0))
    assert channel.validate(ChannelParams(0.5, 1.2, 0.1))


def test_joint_law_example():
    law = channel.joint_law(FIG_PARAMS)
    assert law == pytest.approx((0.24, 0.16, 0.36, 0.24), abs=1e-12)
    assert sum(law) == pytest.approx(1.0, abs=1e-12)


def test_joint_law_marginals_recovered():
    rng = np.random.default_rng(55)
    for _ in range(100):
        d1 = rng.uniform(0, 1)
        d2 = rng.uniform(0, 1)
        lo = max(0.0, d1 + d2 - 1.0)
        hi = min(d1, d2)
        if lo > hi:
            continue
        d12 = rng.uniform(lo, hi)
        p = ChannelParams(d1, d2, d12)
        p00, p01, p10, p11 = channel.joint_law(p)
        assert p00 + p01 == pytest.approx(d1, abs=1e-12)
        assert p00 + p10 == pytest.approx(d2, abs=1e-12)
        assert min(p00, p01, p10, p11) >= -1e-12


def test_fully_correlated_erasures():
    p = ChannelParams(0.3, 0.3, 0.3)
    law = channel.joint_law(p)
    assert law[1] == 0.0 and law[2] == 0.0
    rng = np.random.default_rng(1)
    draws = [channel.sample_state(p, rng) for _ in range(5000)]
    assert all(s1 == s2 for s1, s2 in draws)


def test_perfect_channel_sampling():
    rng = np.random.default_rng(2)
    p = ChannelParams(0.0, 0.0, 0.0)
    assert channel.sample_state(p, rng) == (1, 1)


def test_sample_state_frequencies():
    rng = np.random.default_rng(99)
    n = 100_000
    counts = {c: 0 for c in [(0, 0), (0, 1), (1, 0), (1, 1)]}
    for _ in range(n):
        counts[channel.sample_state(FIG_PARAMS, rng)] += 1
    for cell, prob in zip([(0, 0), (0, 1), (1, 0), (1, 1)], channel.joint_law(FIG_PARAMS)):
        sigma = (prob * (1 - prob) / n) ** 0.5
        assert abs(counts[cell] / n - prob) < 4 * sigma


def test_independent_erasures_have_zero_correlation():
    d1, d2 = 0.4, 0.6
    p = ChannelParams(d1, d2, d1 * d2)
    rng = np.random.default_rng(7)
    n = 50_000
    s = np.array([channel.sample_state(p, rng) for _ in range(n)])
    corr = np.corrcoef(s[:, 0], s[:, 1])[0, 1]
    assert abs(corr) < 4 / np.sqrt(n)


def test_transmit():
    assert channel.transmit(1, (1, 0)) == (1, None)
    assert channel.transmit(0, (1, 1)) == (0, 0)
    assert channel.transmit(1, (0, 0)) == (None, None)
    with pytest.raises(ValueError):
        channel.transmit(2, (1, 1))


def test_transcript_step_and_receiver_access():
    tr = Transcript(FIG_PARAMS, np.random.default_rng(3))
    y1, y2 = tr.step(1)
    s1, s2 = tr.rx_state(0)
    assert (y1 is not None) == bool(s1)
    assert (y2 is not None) == bool(s2)
    assert tr.length == 1


def test_transcript_blocks_current_slot_state():
    # sentinel encoder: asks for the state of the slot it is encoding
    tr = Transcript(FIG_PARAMS, np.random.default_rng(4))
    for _ in range(5):
        tr.step(0)
    assert tr.tx_state(4) == tr.rx_state(4)
    with pytest.raises(channel.CsiAccessError):
        tr.tx_state(5)
    with pytest.raises(channel.CsiAccessError):
        tr.tx_state(tr.length)
    with pytest.raises(channel.CsiAccessError):
        tr.tx_state(-1)


def test_transcript_matches_law():
    tr = Transcript(FIG_PARAMS, np.random.default_rng(12))
    n = 60_000
    for _ in range(n):
        tr.step(0)
    s1, s2 = tr.states_so_far()
    law = channel.joint_law(FIG_PARAMS)
    emp = [
        ((s1 == 0) & (s2 == 0)).mean(),
        ((s1 == 0) & (s2 == 1)).mean(),
        ((s1 == 1) & (s2 == 0)).mean(),
        ((s1 == 1) & (s2 == 1)).mean(),
    ]
    for e, prob in zip(emp, law):
        sigma = (prob * (1 - prob) / n) ** 0.5
        assert abs(e - prob) < 4 * sigma


def test_transcript_deterministic_replay():
    a = Transcript(FIG_PARAMS, np.random.default_rng(21))
    b = Transcript(FIG_PARAMS, np.random.default_rng(21))
    for _ in range(1000):
        a.step(1)
        b.step(1)
    sa = a.states_so_far()
    sb = b.states_so_far()
    assert (sa[0] == sb[0]).all() and (sa[1] == sb[1]).all()


def test_transcript_rejects_invalid_params():
    with pytest.raises(channel.ParameterError):
        Transcript(ChannelParams(0.4, 0.6, 0.5), np.random.default_rng(0))
