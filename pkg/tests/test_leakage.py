import math

import numpy as np
import pytest

from wiretap_help import (
    ChannelParams,
    Codebook,
    GridResolutionError,
    HelpSpec,
    Placement,
    composite_leakage,
    epi_cell_slacks,
    estimate_leakage_discrete,
    gaussian_cond_entropy_quadrature,
    gaussian_cond_entropy_sum,
    generate_codebook,
    output_entropy_gap_bound,
    output_entropy_gap_quadrature,
    verify_leakage_chain,
)

RX = HelpSpec(Placement.RX_ONLY, rate_rh=0.5)


def test_single_message_zero_leakage():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    cb = generate_codebook(2, 0.0, 1.0, seed=1)
    est = estimate_leakage_discrete(p, RX, cb, levels=2, grid_cells=24)
    assert abs(est.value) < 1e-9


def test_identical_codewords_zero_leakage():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    row = np.array([1.0, -1.0])
    cb = Codebook(codewords=np.tile(row, (4, 1)), rate=1.0, power=1.0)
    est = estimate_leakage_discrete(p, RX, cb, levels=2, grid_cells=24)
    assert abs(est.value) < 1e-9


def test_degraded_estimate_below_bound():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    cb = generate_codebook(2, 1.0, 1.0, seed=2)  # n=2, |M|=4
    est = estimate_leakage_discrete(p, RX, cb, levels=2, grid_cells=32)
    assert est.value <= 0.5 + 0.05
    assert abs(est.bound - 0.5) < 1e-12
    assert len(est.refinement) == 2


def test_estimator_caps_enforced():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        estimate_leakage_discrete(p, RX, generate_codebook(9, 0.1, 1.0, seed=3))
    with pytest.raises(ValueError):
        estimate_leakage_discrete(p, RX, generate_codebook(2, 2.5, 1.0, seed=4))


def test_table_size_guard():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    cb = generate_codebook(6, 0.5, 1.0, seed=5)
    with pytest.raises(GridResolutionError):
        estimate_leakage_discrete(p, RX, cb, levels=4, grid_cells=64)


def test_secure_help_drops_help_axis():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    cb = generate_codebook(2, 1.0, 1.0, seed=6)
    secure = HelpSpec(Placement.RX_ONLY, rate_rh=0.5, secure=True)
    est_sec = estimate_leakage_discrete(p, secure, cb, levels=2, grid_cells=32)
    est_open = estimate_leakage_discrete(p, RX, cb, levels=2, grid_cells=32)
    # the eavesdropper sees strictly less when the help is hidden
    assert est_sec.value <= est_open.value + 1e-9


def test_conditional_entropy_closed_form_example():
    # sigma_v_sq = sigma_dw_sq = 1
    expected = 0.5 * math.log2(0.5) + 0.5 * math.log2(2 * math.pi * math.e * 1.0)
    assert abs(gaussian_cond_entropy_sum(1.0, 1.0) - expected) < 1e-12


def test_conditional_entropy_quadrature_cross_check():
    for sv2, sdw2 in ((1.0, 1.0), (0.5, 2.0), (2.0, 0.25)):
        closed = gaussian_cond_entropy_sum(sv2, sdw2)
        quad = gaussian_cond_entropy_quadrature(sv2, sdw2)
        assert abs(closed - quad) < 1e-4


def test_entropy_gap_quadrature_below_bound():
    p = ChannelParams.degraded(1.0, 1.0, 1.0)
    bound = output_entropy_gap_bound(p)
    for levels in (2, 4, 8):
        assert output_entropy_gap_quadrature(1.0, 1.0, 1.0, levels) <= bound + 1e-6


def test_epi_cell_slacks_nonnegative():
    for levels in (2, 4):
        slacks = epi_cell_slacks(1.0, 1.0, 1.0, levels)
        assert (slacks >= -1e-3).all()


def test_verify_leakage_chain_all_structures():
    rev = ChannelParams.reversely_degraded(1.0, 1.0, 0.5)
    nd = ChannelParams.non_degraded(1.0, 1.0, 2.0, 0.3)
    deg = ChannelParams.degraded(1.0, 1.0, 1.0)
    for p in (deg, rev, nd):
        rep = verify_leakage_chain(p, RX)
        assert rep.ok, rep.failures()
    tx = HelpSpec(Placement.TX_ONLY, rate_rh=0.5)
    assert verify_leakage_chain(deg, tx).ok
    assert verify_leakage_chain(rev, tx).ok


def test_zero_correlation_bound_matches_degraded_style():
    nd = ChannelParams.non_degraded(1.0, 1.0, 1.0, 0.0)
    rep = verify_leakage_chain(nd, RX)
    assert rep.ok
    # at r = 0 the correlation penalty step holds with equality
    last = rep.steps[-1]
    assert abs(last.slack) < 1e-12


def test_composite_leakage_values():
    rows = composite_leakage(0.01, 0.5, (0.0, 0.02))
    assert abs(rows[0][1] - 0.01) < 1e-12  # tau = 0: phase-1 leakage only
    # delta=0.01, bound=0.5, tau=0.02: composite <= 2 delta at the boundary
    assert rows[1][1] <= 2 * 0.01 + 1e-12


def test_composite_leakage_silent_phase_linear():
    taus = (0.1, 0.2, 0.4)
    rows = composite_leakage(0.0, 0.5, taus, phase1_silent=True)
    for (tau, val) in rows:
        assert abs(val - tau * 0.5) < 1e-12


def test_plug_in_estimate_nonnegative():
    p = ChannelParams.non_degraded(1.0, 1.0, 2.0, 0.3)
    cb = generate_codebook(2, 1.0, 1.0, seed=7)
    est = estimate_leakage_discrete(p, RX, cb, levels=2, grid_cells=32)
    assert est.value >= -1e-9
