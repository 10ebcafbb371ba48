"""Acceptance gate: ten checks, each reporting a single pass/fail line."""

import math
import time

import numpy as np

from wiretap_help import (
    CHAIN_IDS,
    ChannelParams,
    FLAG_SIGMA_DW_ZERO_NONSECURE,
    FLAG_SIGMA_V_ZERO_NONSECURE,
    FlashSchedule,
    HelpSpec,
    Placement,
    awgn_capacity,
    build_quantizer,
    check_converse_chain,
    discretized_secrecy_capacity,
    estimate_leakage_discrete,
    feedback_comparison,
    generate_codebook,
    output_entropy_gap_bound,
    output_entropy_gap_quadrature,
    no_help_secrecy_capacity,
    phase2_leakage_bound,
    random_consistent_table,
    secrecy_capacity_with_help,
    simulate_phase2_tx,
    two_phase_convergence,
)

TOL = 1e-12


def _verdict(capsys, num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    with capsys.disabled():
        print(f"[{status}] criterion {num}: {name}{suffix}")
    assert ok, f"criterion {num} failed: {name}{suffix}"


def _random_params(rng, structure):
    if structure == "degraded":
        return ChannelParams.degraded(*rng.uniform(0.2, 4.0, 3))
    if structure == "rev":
        return ChannelParams.reversely_degraded(
            float(rng.uniform(0.2, 4.0)),
            float(rng.uniform(0.2, 4.0)),
            float(rng.uniform(0.2, 4.0)),
        )
    return ChannelParams.non_degraded(
        float(rng.uniform(0.2, 4.0)),
        float(rng.uniform(0.2, 4.0)),
        float(rng.uniform(0.2, 4.0)),
        float(rng.uniform(-0.95, 0.95)),
    )


def test_criterion_1_formula_suite(capsys):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    ok = True
    for _ in range(1000):
        rh = float(rng.uniform(0, 2))
        rh1 = float(rng.uniform(0, 1))
        rh2 = float(rng.uniform(0, 1))
        rx = HelpSpec(Placement.RX_ONLY, rate_rh=rh)
        tx = HelpSpec(Placement.TX_ONLY, rate_rh=rh)
        both = HelpSpec(Placement.TX_AND_RX_INDEPENDENT, rate_rh1=rh1, rate_rh2=rh2)

        deg = _random_params(rng, "degraded")
        rev = _random_params(rng, "rev")
        nd = _random_params(rng, "nondeg")
        cs0_deg = no_help_secrecy_capacity(deg)
        cs0_nd = no_help_secrecy_capacity(nd)

        # exact additive boost: Rx help on every structure, Tx non-secure on
        # the (reversely) degraded ones
        ok &= abs(secrecy_capacity_with_help(deg, rx).cs_lower - (cs0_deg + rh)) < TOL
        ok &= abs(secrecy_capacity_with_help(nd, rx).cs_lower - (cs0_nd + rh)) < TOL
        ok &= abs(secrecy_capacity_with_help(deg, tx).cs_lower - (cs0_deg + rh)) < TOL
        # help-rate-only capacity for the reversed order
        ok &= abs(secrecy_capacity_with_help(rev, rx).cs_lower - rh) < TOL
        ok &= abs(secrecy_capacity_with_help(rev, tx).cs_lower - rh) < TOL
        # independent links add up
        ok &= abs(secrecy_capacity_with_help(deg, both).cs_lower - (cs0_deg + rh1 + rh2)) < TOL
        ok &= abs(secrecy_capacity_with_help(rev, both).cs_lower - (rh1 + rh2)) < TOL
        # secure vs non-secure Rx help: bit-identical reports
        rx_sec = HelpSpec(Placement.RX_ONLY, rate_rh=rh, secure=True)
        ok &= secrecy_capacity_with_help(deg, rx) == secrecy_capacity_with_help(deg, rx_sec)
        # message-aware Rx help: bit-identical reports
        rx_ma = HelpSpec(Placement.RX_ONLY, rate_rh=rh, message_aware=True)
        ok &= secrecy_capacity_with_help(deg, rx) == secrecy_capacity_with_help(deg, rx_ma)
        ok &= secrecy_capacity_with_help(rev, rx) == secrecy_capacity_with_help(
            rev, HelpSpec(Placement.RX_ONLY, rate_rh=rh, message_aware=True))
        if not ok:
            break
    elapsed = time.perf_counter() - t0
    _verdict(capsys, 1, "closed-form suite over 1000 random tuples per configuration at 1e-12",
             ok and elapsed < 5.0, f"{elapsed:.2f} s")


def test_criterion_2_feedback_sweep(capsys):
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    c0 = awgn_capacity(1.0, 1.0)
    cs0 = no_help_secrecy_capacity(p)
    breakpoint_ = c0 - cs0
    ok = True
    for rf in np.linspace(0.0, 2.0 * breakpoint_, 100):
        c_snf, c_sf = feedback_comparison(p, float(rf))
        ok &= abs(c_snf - c0) < TOL
        ok &= abs(c_sf - min(c0, cs0 + rf)) < TOL
        if rf < breakpoint_ - TOL:
            ok &= abs(c_sf - (cs0 + rf)) < TOL
        elif rf > breakpoint_ + TOL:
            ok &= abs(c_sf - c0) < TOL
    _verdict(capsys, 2, "rate-limited feedback saturates at the direct-link capacity, "
                "100-point sweep at 1e-12", ok)


def test_criterion_3_discontinuities(capsys):
    rx = HelpSpec(Placement.RX_ONLY, rate_rh=0.5)
    near = secrecy_capacity_with_help(ChannelParams.degraded(1.0, 1.0, 1e-6), rx)
    at_zero = secrecy_capacity_with_help(ChannelParams.degraded(1.0, 1.0, 0.0), rx)
    ok = near.cs_lower >= 0.499 and at_zero.cs_lower == 0.0
    ok &= FLAG_SIGMA_V_ZERO_NONSECURE in at_zero.discontinuity_notes

    rev_near = secrecy_capacity_with_help(ChannelParams.reversely_degraded(1.0, 1.0, 1e-6), rx)
    rev_zero = secrecy_capacity_with_help(ChannelParams.reversely_degraded(1.0, 1.0, 0.0), rx)
    ok &= abs(rev_near.cs_lower - 0.5) < TOL and rev_zero.cs_lower == 0.0
    ok &= FLAG_SIGMA_DW_ZERO_NONSECURE in rev_zero.discontinuity_notes
    _verdict(capsys, 3, "capacity discontinuities at vanishing eavesdropper / extra receiver noise", ok)


def test_criterion_4_quantized_help_entropy_gap(capsys):
    t0 = time.perf_counter()
    bound = output_entropy_gap_bound(ChannelParams.degraded(1.0, 1.0, 1.0))
    ok = abs(bound - 0.5 * math.log2(2.0 / 3.0)) < TOL
    worst = -math.inf
    for levels in (2, 4, 8, 16):
        value = output_entropy_gap_quadrature(1.0, 1.0, 1.0, levels)
        worst = max(worst, value - bound)
        ok &= value <= bound + 1e-6
    elapsed = time.perf_counter() - t0
    _verdict(capsys, 4, "quantized-help conditional entropy gap stays below its closed-form "
                "bound for 2..16 levels",
             ok and elapsed < 30.0, f"max excess {worst:.3e}, {elapsed:.1f} s")


def test_criterion_5_converse_chain_oracle(capsys):
    t0 = time.perf_counter()
    violations = 0
    for offset, cid in enumerate(CHAIN_IDS):
        for i in range(1000):
            table = random_consistent_table(cid, seed=10_000 * offset + i)
            if not check_converse_chain(table).ok:
                violations += 1
    elapsed = time.perf_counter() - t0
    _verdict(capsys, 5, "converse chains hold on 1000 random joint tables per chain at 1e-10",
             violations == 0 and elapsed < 60.0,
             f"{violations} violations, {elapsed:.1f} s")


def test_criterion_6_quantizer_scaling(capsys):
    help_rate = 1.0
    xs, ys = [], []
    for i, tau in enumerate((1 / 4, 1 / 8, 1 / 16, 1 / 32)):
        schedule = FlashSchedule.from_help_rate(help_rate, tau)
        q = build_quantizer(1.0, schedule.levels, clip_mult=6.0)
        rng = np.random.default_rng(600 + i)
        w = rng.normal(0.0, 1.0, 1_000_000)
        res = w - q.quantize(w)
        xs.append(help_rate / tau)
        ys.append(math.log2(float((res * res).mean())))
    slope = float(np.polyfit(xs, ys, 1)[0])
    _verdict(capsys, 6, "quantizer residual variance halves twice per extra help bit "
                "(regression slope -2 within 0.1)",
             abs(slope + 2.0) <= 0.1, f"slope {slope:.4f}")


def test_criterion_7_desk_scale_convergence(capsys):
    taus = (1 / 4, 1 / 8, 1 / 16, 1 / 32)
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    h = HelpSpec(Placement.RX_ONLY, rate_rh=0.012)
    pts = two_phase_convergence(p, h, taus, n=64, trials=2000, seed=700)
    target = no_help_secrecy_capacity(p) + 0.5 * h.rate_rh
    rates = [pt.composite_rate for pt in pts]
    ok = all(b >= a for a, b in zip(rates, rates[1:]))  # monotone approach
    ok &= all(abs(r - target) >= abs(r2 - target) for r, r2 in zip(rates, rates[1:]))
    ok &= abs(rates[-1] - target) / target < 0.15
    ok &= all(pt.error_prob < 1e-2 for pt in pts)

    rev = ChannelParams.reversely_degraded(1.0, 1.0, 1.0)
    rev_pts = two_phase_convergence(rev, h, taus, n=64, trials=2000, seed=701)
    bound = phase2_leakage_bound(rev, h)
    leak_slope = float(np.polyfit([pt.tau for pt in rev_pts],
                                  [pt.composite_leakage for pt in rev_pts], 1)[0])
    ok &= leak_slope <= bound + 0.05
    ok &= all(pt.error_prob < 1e-2 for pt in rev_pts)
    _verdict(capsys, 7, "two-phase composite rate approaches the helped secrecy target; "
                "burst-scheme leakage vanishes linearly",
             ok, f"final rate {rates[-1]:.4f} vs target {target:.4f}, "
                 f"leakage slope {leak_slope:.3f} <= {bound + 0.05:.3f}")


def test_criterion_8_leakage_bounds(capsys):
    rng = np.random.default_rng(800)
    checked = 0
    worst_excess = -math.inf
    ok = True
    for structure in ("degraded", "rev", "nondeg"):
        for i in range(20):
            params = _random_params(rng, structure)
            if structure == "nondeg":
                placement = Placement.RX_ONLY
            else:
                placement = Placement.RX_ONLY if i % 2 == 0 else Placement.TX_ONLY
            help_spec = HelpSpec(placement, rate_rh=float(rng.uniform(0.1, 1.0)))
            n = int(rng.integers(1, 4))
            rate = float(rng.integers(1, 3)) / n  # 2 or 4 messages
            codebook = generate_codebook(n, rate, params.power_limit,
                                         seed=int(rng.integers(0, 1 << 31)))
            levels = int(rng.integers(1, 3))
            est = estimate_leakage_discrete(params, help_spec, codebook,
                                            levels=levels, grid_cells=32)
            excess = est.value - est.bound
            worst_excess = max(worst_excess, excess)
            ok &= excess <= 0.05
            checked += 1
    _verdict(capsys, 8, "plug-in leakage estimates stay within 0.05 bits of the analytic "
                "flash-phase bounds",
             ok and checked >= 60, f"{checked} configs, worst excess {worst_excess:.3e}")


def test_criterion_9_causality_equivalence(capsys):
    ok = True
    for params in (
        ChannelParams.degraded(1.0, 1.0, 1.0),
        ChannelParams.reversely_degraded(1.0, 0.5, 0.5),
    ):
        schedule = FlashSchedule.from_help_rate(2.0, 0.25)
        codebook = generate_codebook(16, 0.5, 1.0, seed=900)
        noncausal = simulate_phase2_tx(params, schedule, codebook, trials=600,
                                       seed=901, causal=False, record_traces=True)
        causal = simulate_phase2_tx(params, schedule, codebook, trials=600,
                                    seed=901, causal=True, record_traces=True)
        ok &= len(noncausal.traces) == len(causal.traces) > 0
        ok &= all(np.array_equal(a, b) for a, b in zip(noncausal.traces, causal.traces))
        ok &= noncausal.error_prob == causal.error_prob
    _verdict(capsys, 9, "causal and non-causal transmitter help produce bit-identical traces "
                "under a shared seed", ok)


def test_criterion_10_discretized_cross_check(capsys):
    params = ChannelParams.degraded(1.0, 1.0, 1.0)
    closed = no_help_secrecy_capacity(params)
    tensor = discretized_secrecy_capacity(params)
    rel = abs(tensor - closed) / closed
    _verdict(capsys, 10, "independent tensor-summation route reproduces the closed-form "
                 "no-help secrecy rate within 2%",
             rel < 0.02, f"closed {closed:.6f}, discretized {tensor:.6f}, rel {rel:.4f}")
