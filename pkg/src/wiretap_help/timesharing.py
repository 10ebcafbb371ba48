"""Convergence of the two-phase (and burst) time-sharing schemes over a
grid of flash fractions tau."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .capacity import HelpSpec, Placement, no_help_secrecy_capacity, phase2_leakage_bound
from .channel import ChannelParams, Structure
from .codec import PhaseSpec, TimeSharingOutcome, run_time_sharing
from .quantizer import FlashSchedule, phase2_rate_rx, phase2_rate_tx


@dataclass(frozen=True)
class ConvergencePoint:
    tau: float
    levels: int
    code_rate: float
    predicted_rate: float
    composite_rate: float
    composite_leakage: float
    error_prob: float


def two_phase_convergence(
    params: ChannelParams,
    help_spec: HelpSpec,
    tau_grid: tuple[float, ...],
    n: int,
    trials: int,
    seed: int,
    code_rate_scale: float = 0.5,
    phase1_leakage: float = 0.01,
    phase2_leakage: Optional[float] = None,
    clip_mult: float = 4.0,
) -> list[ConvergencePoint]:
    """Simulate the flash phase at each tau and compose with the analytic
    wiretap phase (silent for the reversely degraded burst scheme).

    The flash-phase code rate is ``code_rate_scale`` times the rate
    prediction (floored at 0), so the composite target is
    cs0 + code_rate_scale * R_h as tau -> 0.
    """
    cs0 = no_help_secrecy_capacity(params)
    burst = params.structure is Structure.REVERSELY_DEGRADED
    tx_side = help_spec.placement in (Placement.TX_ONLY, Placement.TX_AND_RX_SAME)
    if phase2_leakage is None:
        phase2_leakage = phase2_leakage_bound(params, help_spec)
    points = []
    for i, tau in enumerate(tau_grid):
        schedule = FlashSchedule.from_help_rate(help_spec.rate_rh, tau)
        if tx_side:
            pred = phase2_rate_tx(params, schedule).prediction
        else:
            pred = phase2_rate_rx(params, schedule).prediction
        pred = max(0.0, pred)
        code_rate = code_rate_scale * pred
        if burst:
            phase1 = PhaseSpec(fraction=1.0 - tau, kind="silent")
        else:
            phase1 = PhaseSpec(
                fraction=1.0 - tau, kind="analytic", rate=cs0, leakage=phase1_leakage
            )
        phase2 = PhaseSpec(
            fraction=tau,
            kind="tx_flash" if tx_side else "rx_flash",
            schedule=schedule,
            code_rate=code_rate,
            leakage=phase2_leakage,
        )
        outcome: TimeSharingOutcome = run_time_sharing(
            params, (phase1, phase2), n, trials, seed + 31 * i, clip_mult=clip_mult
        )
        points.append(
            ConvergencePoint(
                tau=tau,
                levels=schedule.levels,
                code_rate=code_rate,
                predicted_rate=pred,
                composite_rate=outcome.composite_rate,
                composite_leakage=outcome.composite_leakage,
                error_prob=outcome.max_error_prob,
            )
        )
    return points
