"""Closed-form secrecy-capacity expressions for the helped wiretap channel.

All rates are in bits (log base 2).  Every report distinguishes exact values
from one-sided bounds: ``cs_upper`` is ``inf`` when only a lower bound is
known (secure transmitter-side help), and ``exact`` is set accordingly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .channel import ChannelParams, Structure
from .errors import InfiniteCapacityError, SingularCovarianceError, UnsupportedHelpError

INF = math.inf

# Flags attached to CapacityReport.discontinuity_notes
FLAG_SIGMA_V_ZERO_NONSECURE = "sigma_v_zero_nonsecure"
FLAG_SIGMA_DW_ZERO_NONSECURE = "sigma_dw_zero_nonsecure"


class Placement(enum.Enum):
    NONE = "none"
    RX_ONLY = "rx_only"
    TX_ONLY = "tx_only"
    TX_AND_RX_SAME = "tx_and_rx_same"
    TX_AND_RX_INDEPENDENT = "tx_and_rx_independent"


@dataclass(frozen=True)
class HelpSpec:
    """Who receives the helper link(s), at what rate, and under what flags.

    For ``TX_AND_RX_INDEPENDENT`` the two links carry independent help at
    rates ``rate_rh1`` (Tx side) and ``rate_rh2`` (Rx side) and the total
    rate is their sum.  ``message_aware`` is only defined for Rx-only help.
    """

    placement: Placement
    rate_rh: float = 0.0
    rate_rh1: float = 0.0
    rate_rh2: float = 0.0
    secure: bool = False
    causal: bool = False
    message_aware: bool = False

    def __post_init__(self) -> None:
        for name in ("rate_rh", "rate_rh1", "rate_rh2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.placement is Placement.TX_AND_RX_INDEPENDENT:
            if self.rate_rh == 0.0:
                object.__setattr__(self, "rate_rh", self.rate_rh1 + self.rate_rh2)
            elif abs(self.rate_rh - (self.rate_rh1 + self.rate_rh2)) > 1e-12:
                raise ValueError("independent links require rate_rh == rate_rh1 + rate_rh2")
        if self.message_aware and self.placement is not Placement.RX_ONLY:
            raise UnsupportedHelpError("message-aware help is supported for Rx-only help")


@dataclass(frozen=True)
class CapacityReport:
    """All closed-form quantities for one (channel, help) configuration."""

    c0: float
    c2: float
    cs0: float
    cs_lower: float
    cs_upper: float
    exact: bool
    leakage_bound_phase2: float
    discontinuity_notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.cs_lower > self.cs_upper + 1e-12:
            raise ValueError("cs_lower must not exceed cs_upper")


def awgn_capacity(power: float, noise_var: float) -> float:
    """AWGN link capacity (1/2) log2(1 + power / noise_var), in bits."""
    if power < 0:
        raise ValueError("power must be >= 0")
    if noise_var <= 0:
        raise InfiniteCapacityError("noise variance is zero: link capacity diverges")
    return 0.5 * math.log2(1.0 + power / noise_var)


def _eavesdropper_noise_var(params: ChannelParams) -> float:
    # Degraded: the Ev sees X + W + V. Reversely degraded / non-degraded: X + V.
    if params.structure is Structure.DEGRADED:
        return params.sigma_w_sq + params.sigma_v_sq
    return params.sigma_v_sq


def no_help_secrecy_capacity(params: ChannelParams) -> float:
    """No-help secrecy capacity C_s0 of the bare wiretap channel."""
    if params.structure is Structure.REVERSELY_DEGRADED:
        return 0.0
    if params.sigma_w_sq <= 0:
        raise InfiniteCapacityError("sigma_w_sq must be > 0")
    c1 = awgn_capacity(params.power_limit, params.sigma_w_sq)
    if params.structure is Structure.DEGRADED:
        c2 = awgn_capacity(params.power_limit, params.sigma_w_sq + params.sigma_v_sq)
        return c1 - c2
    # non-degraded: zero whenever the Rx link is the noisier one
    if params.sigma_v_sq <= 0:
        return 0.0
    c2 = awgn_capacity(params.power_limit, params.sigma_v_sq)
    return max(0.0, c1 - c2)


def phase2_leakage_bound(params: ChannelParams, help_spec: HelpSpec) -> float:
    """Uniform-in-tau bound on the flash-phase leakage rate, in bits/symbol.

    The bound depends on the structure and, for the reversely degraded
    channel, on whether the extra Rx noise is present.
    """
    if params.sigma_v_sq <= 0:
        raise InfiniteCapacityError("phase-2 leakage bound requires sigma_v_sq > 0")
    base = 0.5 * math.log2(1.0 + params.power_limit / params.sigma_v_sq)
    if params.structure is Structure.DEGRADED:
        return base
    if params.structure is Structure.REVERSELY_DEGRADED:
        if params.sigma_dw_sq <= 0:
            if help_spec.secure:
                # with sigma_dw_sq = 0 and secure help the bound reduces to the
                # plain Tx-Ev link capacity
                return base
            raise UnsupportedHelpError(
                "no finite phase-2 leakage bound: sigma_dw_sq = 0 with non-secure help"
            )
        return base + 0.5 * math.log2(1.0 + params.sigma_v_sq / params.sigma_dw_sq)
    # non-degraded
    r = params.correlation
    if abs(r) >= 1.0:
        raise SingularCovarianceError("leakage bound requires |r| < 1")
    return base - 0.5 * math.log2(1.0 - r * r)


def output_entropy_gap_bound(params: ChannelParams) -> float:
    """Per-symbol bound on h(Y|T) - h(Z|T) for the degraded channel (negative)."""
    if params.structure is not Structure.DEGRADED:
        raise UnsupportedHelpError("this bound is stated for the degraded structure")
    if params.sigma_v_sq <= 0:
        raise ValueError("sigma_v_sq must be > 0")
    p, sw2, sv2 = params.power_limit, params.sigma_w_sq, params.sigma_v_sq
    return 0.5 * math.log2((sw2 + p) / (sw2 + sv2 + p))


def feedback_comparison(params: ChannelParams, feedback_rate: float) -> tuple[float, float]:
    """Secrecy capacities with noiseless feedback (c_snf) and rate-limited
    secure feedback (c_sf) for the degraded channel."""
    if params.structure is not Structure.DEGRADED:
        raise UnsupportedHelpError("feedback comparison is defined for the degraded channel")
    if feedback_rate < 0:
        raise ValueError("feedback_rate must be >= 0")
    if params.sigma_v_sq <= 0:
        raise ValueError("sigma_v_sq must be > 0")
    c0 = awgn_capacity(params.power_limit, params.sigma_w_sq)
    cs0 = no_help_secrecy_capacity(params)
    c_snf = c0
    c_sf = min(c0, cs0 + feedback_rate)
    return c_snf, c_sf


def _leakage_bound_or_nan(params: ChannelParams, help_spec: HelpSpec) -> float:
    try:
        return phase2_leakage_bound(params, help_spec)
    except (InfiniteCapacityError, UnsupportedHelpError, SingularCovarianceError):
        return math.nan


def secrecy_capacity_with_help(params: ChannelParams, help_spec: HelpSpec) -> CapacityReport:
    """Evaluate the capacity case table for one (channel, help) pair.

    Exact cases report ``cs_lower == cs_upper``; open cases (secure help on
    the transmitter side, and any non-degraded Tx help) report a lower bound
    with ``cs_upper = inf``.
    """
    if params.singular_correlation:
        raise SingularCovarianceError("|r| = 1 is outside the supported case table")
    if params.sigma_w_sq <= 0 and params.structure is not Structure.REVERSELY_DEGRADED:
        raise ValueError("sigma_w_sq must be > 0")

    structure = params.structure
    placement = help_spec.placement
    notes: list[str] = []

    c0 = awgn_capacity(params.power_limit, params.sigma_w_sq) if params.sigma_w_sq > 0 else INF
    ev_var = _eavesdropper_noise_var(params)
    c2 = awgn_capacity(params.power_limit, ev_var) if ev_var > 0 else INF
    cs0 = no_help_secrecy_capacity(params)
    leak = _leakage_bound_or_nan(params, help_spec)

    def report(lower: float, upper: float) -> CapacityReport:
        return CapacityReport(
            c0=c0,
            c2=c2,
            cs0=cs0,
            cs_lower=lower,
            cs_upper=upper,
            exact=(lower == upper),
            leakage_bound_phase2=leak,
            discontinuity_notes=tuple(notes),
        )

    if placement is Placement.NONE:
        return report(cs0, cs0)

    rh = help_spec.rate_rh

    # Degenerate eavesdropper: with non-secure help and sigma_v_sq = 0 the Ev
    # observes everything the Rx does, so no secrecy is possible at all.
    if params.sigma_v_sq <= 0:
        if help_spec.secure:
            raise UnsupportedHelpError(
                "secure help with sigma_v_sq = 0 is outside the supported case table"
            )
        notes.append(FLAG_SIGMA_V_ZERO_NONSECURE)
        return report(0.0, 0.0)

    if placement is Placement.RX_ONLY:
        # message-aware Rx help changes nothing
        if structure is Structure.REVERSELY_DEGRADED and params.sigma_dw_sq <= 0:
            if help_spec.secure:
                return report(rh, rh)
            notes.append(FLAG_SIGMA_DW_ZERO_NONSECURE)
            return report(0.0, 0.0)
        return report(cs0 + rh, cs0 + rh)

    if placement in (Placement.TX_ONLY, Placement.TX_AND_RX_SAME):
        if structure is Structure.NON_DEGRADED:
            # lower bound only, open whether it is tight
            return report(cs0 + rh, INF)
        if structure is Structure.REVERSELY_DEGRADED and params.sigma_dw_sq <= 0:
            if help_spec.secure:
                return report(rh, INF)
            notes.append(FLAG_SIGMA_DW_ZERO_NONSECURE)
            return report(0.0, 0.0)
        if help_spec.secure:
            return report(cs0 + rh, INF)
        return report(cs0 + rh, cs0 + rh)

    # independent Tx/Rx links
    boost = help_spec.rate_rh1 + help_spec.rate_rh2
    if structure is Structure.REVERSELY_DEGRADED and params.sigma_dw_sq <= 0:
        if help_spec.secure:
            return report(boost, INF)
        notes.append(FLAG_SIGMA_DW_ZERO_NONSECURE)
        return report(0.0, 0.0)
    if help_spec.secure or structure is Structure.NON_DEGRADED:
        return report(cs0 + boost, INF)
    return report(cs0 + boost, cs0 + boost)


def dependent_composite_report(
    params: ChannelParams, rate_rh1: float, rate_rh2: float
) -> CapacityReport:
    """Composite Tx/Rx help that is dependent but not identical (non-secure):
    only sandwich bounds are known."""
    help_spec = HelpSpec(Placement.TX_AND_RX_INDEPENDENT, rate_rh1=rate_rh1, rate_rh2=rate_rh2)
    base = secrecy_capacity_with_help(params, help_spec)
    if base.cs_lower == 0.0 and base.discontinuity_notes:
        return base
    cs0 = base.cs0
    return CapacityReport(
        c0=base.c0,
        c2=base.c2,
        cs0=cs0,
        cs_lower=cs0 + max(rate_rh1, rate_rh2),
        cs_upper=cs0 + rate_rh1 + rate_rh2,
        exact=(max(rate_rh1, rate_rh2) == rate_rh1 + rate_rh2),
        leakage_bound_phase2=base.leakage_bound_phase2,
        discontinuity_notes=base.discontinuity_notes,
    )
