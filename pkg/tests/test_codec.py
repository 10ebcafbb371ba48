import math

import numpy as np
import pytest

from wiretap_help import (
    ChannelParams,
    Codebook,
    CodebookSizeError,
    FlashSchedule,
    PhaseSpec,
    PowerViolationError,
    awgn_capacity,
    build_quantizer,
    generate_codebook,
    run_time_sharing,
    simulate_phase2_rx,
    simulate_phase2_tx,
    wilson_interval,
)


def test_zero_rate_single_codeword():
    cb = generate_codebook(8, 0.0, 1.0, seed=1)
    assert cb.num_messages == 1


def test_codeword_count_and_exact_power():
    cb = generate_codebook(4, 1.0, 2.0, seed=2)
    assert cb.num_messages == 16
    np.testing.assert_allclose((cb.codewords**2).mean(axis=1), 2.0, rtol=1e-12)


def _pairwise_correlations(n, seed):
    cb = generate_codebook(n, 6.4 / n, 1.0, seed=seed)
    cw = cb.codewords / np.sqrt((cb.codewords**2).sum(axis=1, keepdims=True))
    rho = cw @ cw.T
    return rho[np.triu_indices_from(rho, k=1)]


def test_codeword_cross_correlation_concentrates_with_n():
    # pairwise correlation has spread ~ 1/sqrt(n); at n = 64 that is 0.125,
    # so a two-sigma window holds 95% of the pairs and shrinks with n
    off64 = _pairwise_correlations(64, seed=3)
    assert float((np.abs(off64) < 1.96 / 8).mean()) > 0.93
    off16 = _pairwise_correlations(16, seed=3)
    assert float(np.abs(off64).mean()) < float(np.abs(off16).mean())


def test_size_guards():
    with pytest.raises(CodebookSizeError):
        generate_codebook(64, 0.5, 1.0, seed=4)  # 32 bits > 24-bit guard
    with pytest.raises(CodebookSizeError):
        generate_codebook(20, 1.0, 1.0, seed=5)  # 2^20 codewords > 2^15 cap


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo, hi = wilson_interval(100, 100)
    assert hi == 1.0


def test_rx_sim_reliable_at_margin():
    # high-resolution help, rate just under the codebook-size guard
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    s = FlashSchedule(tau=1.0, levels=1 << 16, help_rate=16.0)
    cb = generate_codebook(64, 15.0 / 64, 1.0, seed=6)
    out = simulate_phase2_rx(p, s, cb, trials=2000, seed=7)
    assert out.error_prob < 1e-2


def test_rx_sim_fails_above_capacity():
    # no help, code rate one bit above the link capacity
    p = ChannelParams.degraded(1.0, 100.0, 1.0)
    s = FlashSchedule(tau=1.0, levels=1, help_rate=0.0)
    rate = awgn_capacity(1.0, 100.0) + 1.0
    cb = generate_codebook(8, rate, 1.0, seed=8)
    out = simulate_phase2_rx(p, s, cb, trials=2000, seed=9)
    assert out.error_prob > 0.5


def test_rx_sim_noiseless_channel_perfect():
    p = ChannelParams.degraded(1.0, 0.0, 1.0)
    s = FlashSchedule(tau=1.0, levels=1, help_rate=0.0)
    cb = generate_codebook(8, 1.0, 1.0, seed=10)
    out = simulate_phase2_rx(p, s, cb, trials=500, seed=11)
    assert out.error_prob == 0.0


def test_rx_residual_matches_quantizer_residual():
    # after subtracting Q(W) the effective noise is the quantizer residual
    q = build_quantizer(1.0, 64, 4.0)
    rng = np.random.default_rng(12)
    w = rng.normal(0, 1, 500_000)
    measured = float((w - q.quantize(w)).var())
    inside = np.abs(w) < 4.0
    res_in = w[inside] - q.quantize(w[inside])
    assert abs(float(res_in.var()) - q.step**2 / 12.0) / (q.step**2 / 12.0) < 0.05
    assert measured >= float(res_in.var())  # clipping only adds variance


def test_tx_sim_no_help_matches_plain_awgn():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    s = FlashSchedule(tau=1.0, levels=1, help_rate=0.0)
    cb = generate_codebook(16, 0.75, 1.0, seed=13)
    tx = simulate_phase2_tx(p, s, cb, trials=4000, seed=14)
    rx = simulate_phase2_rx(p, s, cb, trials=4000, seed=15)
    # two-sample proportion test: same channel, so P_e must agree
    p1, p2 = tx.error_prob, rx.error_prob
    pool = (p1 + p2) / 2
    se = math.sqrt(2 * pool * (1 - pool) / 4000)
    assert abs(p1 - p2) < 3.3 * se + 1e-9  # z at p ~ 0.001


def test_tx_causal_noncausal_bit_identical():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    s = FlashSchedule.from_help_rate(2.0, 0.25)
    cb = generate_codebook(16, 0.5, 1.0, seed=16)
    a = simulate_phase2_tx(p, s, cb, trials=400, seed=17, causal=False, record_traces=True)
    b = simulate_phase2_tx(p, s, cb, trials=400, seed=17, causal=True, record_traces=True)
    assert a.error_prob == b.error_prob
    assert len(a.traces) == len(b.traces) > 0
    for ta, tb in zip(a.traces, b.traces):
        np.testing.assert_array_equal(ta, tb)


def test_tx_power_violation_without_renormalization():
    # large quantized noise dwarfs the codeword power
    p = ChannelParams.degraded(0.01, 4.0, 1.0)
    s = FlashSchedule.from_help_rate(2.0, 0.25)
    cb = generate_codebook(16, 0.5, 0.01, seed=18)
    with pytest.raises(PowerViolationError):
        simulate_phase2_tx(p, s, cb, trials=200, seed=19, renormalize_power=False)


def test_error_prob_monotone_in_levels():
    p = ChannelParams.degraded(1.0, 4.0, 1.0)
    cb = generate_codebook(8, 1.0, 1.0, seed=20)
    pes = []
    for bits in (0, 2, 4, 8):
        s = FlashSchedule(tau=1.0, levels=1 << bits, help_rate=float(bits))
        out = simulate_phase2_rx(p, s, cb, trials=3000, seed=21)
        pes.append(out.error_prob)
    assert all(b <= a + 0.03 for a, b in zip(pes, pes[1:]))
    assert pes[-1] < pes[0]


def test_error_prob_monotone_in_rate():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    s = FlashSchedule(tau=1.0, levels=4, help_rate=2.0)
    pes = []
    for rate in (0.25, 0.75, 1.25):
        cb = generate_codebook(8, rate, 1.0, seed=22)
        out = simulate_phase2_rx(p, s, cb, trials=3000, seed=23)
        pes.append(out.error_prob)
    assert all(b >= a - 0.03 for a, b in zip(pes, pes[1:]))


def test_seed_determinism():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    s = FlashSchedule(tau=1.0, levels=4, help_rate=2.0)
    cb = generate_codebook(16, 0.5, 1.0, seed=24)
    a = simulate_phase2_rx(p, s, cb, trials=500, seed=25)
    b = simulate_phase2_rx(p, s, cb, trials=500, seed=25)
    assert a == b


def test_rx_sim_works_on_all_structures():
    s = FlashSchedule.from_help_rate(2.0, 0.5)
    cb = generate_codebook(16, 0.5, 1.0, seed=26)
    for p in (
        ChannelParams.degraded(1.0, 1.0, 1.0),
        ChannelParams.reversely_degraded(1.0, 0.5, 0.5),
        ChannelParams.non_degraded(1.0, 1.0, 1.0, 0.4),
    ):
        out = simulate_phase2_rx(p, s, cb, trials=300, seed=27)
        assert 0.0 <= out.error_prob <= 1.0


def test_run_time_sharing_composition():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    phases = (
        PhaseSpec(fraction=0.75, kind="analytic", rate=0.2, leakage=0.01),
        PhaseSpec(fraction=0.25, kind="silent"),
    )
    out = run_time_sharing(p, phases, n=16, trials=10, seed=28)
    assert abs(out.composite_rate - 0.15) < 1e-12
    assert abs(out.composite_leakage - 0.0075) < 1e-12


def test_run_time_sharing_rejects_overfull_schedule():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    phases = (
        PhaseSpec(fraction=0.75, kind="silent"),
        PhaseSpec(fraction=0.5, kind="silent"),
    )
    with pytest.raises(ValueError):
        run_time_sharing(p, phases, n=16, trials=10, seed=29)


def test_three_phase_composition_with_independent_links():
    # three-phase layout: analytic main phase plus Tx-side and Rx-side flash
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    s1 = FlashSchedule.from_help_rate(2.0, 1.0)
    phases = (
        PhaseSpec(fraction=0.8, kind="analytic", rate=0.2, leakage=0.01),
        PhaseSpec(fraction=0.1, kind="tx_flash", schedule=s1, code_rate=0.5, leakage=0.5),
        PhaseSpec(fraction=0.1, kind="rx_flash", schedule=s1, code_rate=0.5, leakage=0.5),
    )
    out = run_time_sharing(p, phases, n=16, trials=400, seed=30)
    expected = 0.8 * 0.2 + 0.1 * out.phase_outcomes[1].achieved_rate \
        + 0.1 * out.phase_outcomes[2].achieved_rate
    assert abs(out.composite_rate - expected) < 1e-12
    assert abs(out.composite_leakage - (0.8 * 0.01 + 0.2 * 0.5)) < 1e-12


def test_codebook_invariants_hold():
    cb = generate_codebook(10, 1.2, 3.0, seed=31)
    assert cb.num_messages == int(math.floor(2 ** (10 * 1.2)))
    assert isinstance(cb, Codebook)
    assert ((cb.codewords**2).mean(axis=1) <= 3.0 * (1 + 1e-9)).all()
