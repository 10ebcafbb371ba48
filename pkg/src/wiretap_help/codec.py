"""Desk-scale Monte-Carlo simulation of the flash-signaling schemes.

Random Gaussian codebooks with exact per-codeword power normalization,
nearest-neighbor (minimum Euclidean distance) decoding, Rx-side help
subtraction, Tx-side pre-subtraction, and two/three-phase time sharing.
Everything is deterministic given (inputs, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelParams, Structure, sample_noise, transmit
from .errors import CodebookSizeError, PowerViolationError
from .quantizer import FlashSchedule, build_quantizer

# Desk-scale guards
MAX_TOTAL_BITS = 24.0  # n * rate cap for a single codebook
MAX_CODEWORDS = 1 << 15  # exhaustive NN decoding cap

POWER_REL_TOL = 1e-9


@dataclass(frozen=True)
class Codebook:
    codewords: np.ndarray  # (num_messages, n)
    rate: float
    power: float

    @property
    def num_messages(self) -> int:
        return self.codewords.shape[0]

    @property
    def blocklength(self) -> int:
        return self.codewords.shape[1]


@dataclass(frozen=True)
class SimOutcome:
    """Empirical result of one Monte-Carlo batch."""

    error_prob: float
    error_ci: tuple[float, float]  # Wilson 95% interval
    achieved_rate: float
    trials: int
    seed: int
    leakage_estimate: Optional[float] = None
    leakage_ci: Optional[tuple[float, float]] = None
    traces: tuple = field(default=(), repr=False)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


def generate_codebook(n: int, rate: float, power: float, seed: int) -> Codebook:
    """i.i.d. Gaussian codebook, renormalized so every codeword meets the
    per-symbol power constraint with equality."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if rate < 0:
        raise ValueError("rate must be >= 0")
    if n * rate > MAX_TOTAL_BITS:
        raise CodebookSizeError(f"n * rate = {n * rate:.2f} exceeds the {MAX_TOTAL_BITS}-bit guard")
    num = max(1, int(math.floor(2.0 ** (n * rate))))
    if num > MAX_CODEWORDS:
        raise CodebookSizeError(f"{num} codewords exceed the exhaustive-decoding cap {MAX_CODEWORDS}")
    rng = np.random.default_rng(seed)
    cw = rng.normal(0.0, 1.0, size=(num, n))
    norms = np.sqrt((cw * cw).mean(axis=1, keepdims=True))
    cw = cw / norms * math.sqrt(power)
    return Codebook(codewords=cw, rate=rate, power=power)


def _nearest_neighbor(received: np.ndarray, codebook: Codebook) -> np.ndarray:
    """Minimum-distance decoding; ties break to the lowest codeword index."""
    # received: (batch, n); distances via ||r||^2 - 2 r.c + ||c||^2
    cw = codebook.codewords
    cross = received @ cw.T
    c_sq = (cw * cw).sum(axis=1)
    scores = c_sq[None, :] - 2.0 * cross
    return np.argmin(scores, axis=1)


def _check_power(x_seq: np.ndarray, budget: float) -> None:
    avg = float((x_seq * x_seq).mean())
    if avg > budget * (1.0 + POWER_REL_TOL) + 1e-300:
        raise PowerViolationError(
            f"average transmitted power {avg:.6g} exceeds budget {budget:.6g}"
        )


def simulate_phase2_rx(
    params: ChannelParams,
    schedule: FlashSchedule,
    codebook: Codebook,
    trials: int,
    seed: int,
    clip_mult: float = 4.0,
) -> SimOutcome:
    """Flash phase with Rx-side help: the Rx subtracts the quantized noise
    from its received block and decodes by nearest neighbor."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = codebook.blocklength
    q = build_quantizer(params.sigma_w_sq, schedule.levels, clip_mult) \
        if params.sigma_w_sq > 0 else None
    rng = np.random.default_rng(seed)
    errors = 0
    for start in range(0, trials, 256):
        batch = min(256, trials - start)
        msgs = rng.integers(0, codebook.num_messages, size=batch)
        x = codebook.codewords[msgs]
        noise_seed = int(rng.integers(0, 2**63 - 1))
        noise = sample_noise(params, batch * n, noise_seed)
        w = noise.w_seq.reshape(batch, n)
        y = x + w  # same additive form in all three structures
        w_hat = q.quantize(w) if q is not None else np.zeros_like(w)
        decoded = _nearest_neighbor(y - w_hat, codebook)
        errors += int((decoded != msgs).sum())
        _check_power(x, codebook.power)
    pe = errors / trials
    return SimOutcome(
        error_prob=pe,
        error_ci=wilson_interval(errors, trials),
        achieved_rate=codebook.rate * (1.0 - pe),
        trials=trials,
        seed=seed,
    )


def _presubtract_noncausal(x: np.ndarray, w_hat: np.ndarray) -> np.ndarray:
    return x - w_hat


def _presubtract_causal(x: np.ndarray, w_hat: np.ndarray) -> np.ndarray:
    # Sample-by-sample loop: the scalar quantizer only ever looks at the
    # current noise sample, so this matches the non-causal path bit for bit.
    out = np.empty_like(x)
    for i in range(x.shape[-1]):
        out[..., i] = x[..., i] - w_hat[..., i]
    return out


def simulate_phase2_tx(
    params: ChannelParams,
    schedule: FlashSchedule,
    codebook: Codebook,
    trials: int,
    seed: int,
    causal: bool = False,
    renormalize_power: bool = True,
    clip_mult: float = 4.0,
    record_traces: bool = False,
) -> SimOutcome:
    """Flash phase with Tx-side help: the Tx pre-subtracts the quantized
    noise before transmission; the Rx decodes the raw received block.

    With ``renormalize_power`` the transmitted block X - What is rescaled to
    meet the power budget exactly; otherwise the block is transmitted as is
    and a power violation aborts the batch.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = codebook.blocklength
    q = build_quantizer(params.sigma_w_sq, schedule.levels, clip_mult)
    presubtract = _presubtract_causal if causal else _presubtract_noncausal
    rng = np.random.default_rng(seed)
    errors = 0
    traces = []
    for start in range(0, trials, 256):
        batch = min(256, trials - start)
        msgs = rng.integers(0, codebook.num_messages, size=batch)
        x = codebook.codewords[msgs]
        noise_seed = int(rng.integers(0, 2**63 - 1))
        noise = sample_noise(params, batch * n, noise_seed)
        w = noise.w_seq.reshape(batch, n)
        v = noise.v_seq.reshape(batch, n)
        w_hat = q.quantize(w)
        x_tx = presubtract(x, w_hat)
        if renormalize_power:
            scale = np.sqrt(codebook.power / (x_tx * x_tx).mean(axis=1, keepdims=True))
            x_tx = x_tx * scale
        else:
            _check_power(x_tx, codebook.power)
        if params.structure is Structure.REVERSELY_DEGRADED:
            dw = noise.dw_seq.reshape(batch, n)
            z = x_tx + v
            y = z + dw
        elif params.structure is Structure.DEGRADED:
            y = x_tx + w
            z = y + v
        else:
            y = x_tx + w
            z = x_tx + v
        decoded = _nearest_neighbor(y, codebook)
        errors += int((decoded != msgs).sum())
        if record_traces:
            traces.append(y.copy())
    pe = errors / trials
    return SimOutcome(
        error_prob=pe,
        error_ci=wilson_interval(errors, trials),
        achieved_rate=codebook.rate * (1.0 - pe),
        trials=trials,
        seed=seed,
        traces=tuple(traces),
    )


@dataclass(frozen=True)
class PhaseSpec:
    """One time-sharing phase.

    ``kind`` is one of:
      * ``analytic``  - modeled phase (wiretap coding at the no-help secrecy
        capacity with a configured leakage), no simulation;
      * ``silent``    - nothing transmitted;
      * ``rx_flash``  - simulated flash phase with Rx-side subtraction;
      * ``tx_flash``  - simulated flash phase with Tx-side pre-subtraction.
    """

    fraction: float
    kind: str
    rate: float = 0.0
    leakage: float = 0.0
    schedule: Optional[FlashSchedule] = None
    code_rate: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must be in [0, 1]")
        if self.kind not in ("analytic", "silent", "rx_flash", "tx_flash"):
            raise ValueError(f"unknown phase kind {self.kind!r}")
        if self.kind in ("rx_flash", "tx_flash") and self.schedule is None:
            raise ValueError("flash phases need a schedule")


@dataclass(frozen=True)
class TimeSharingOutcome:
    composite_rate: float
    composite_leakage: float
    max_error_prob: float
    phase_outcomes: tuple
    trials: int
    seed: int


def run_time_sharing(
    params: ChannelParams,
    phases: tuple[PhaseSpec, ...],
    n: int,
    trials: int,
    seed: int,
    clip_mult: float = 4.0,
) -> TimeSharingOutcome:
    """Compose per-phase rates and leakages by their time fractions."""
    total = sum(p.fraction for p in phases)
    if total > 1.0 + 1e-12:
        raise ValueError("phase fractions must sum to at most 1")
    composite_rate = 0.0
    composite_leakage = 0.0
    max_pe = 0.0
    outcomes = []
    for k, phase in enumerate(phases):
        if phase.kind in ("analytic", "silent"):
            composite_rate += phase.fraction * phase.rate
            composite_leakage += phase.fraction * phase.leakage
            outcomes.append(None)
            continue
        cb = generate_codebook(n, phase.code_rate, params.power_limit, seed + 7919 * (k + 1))
        if phase.kind == "rx_flash":
            out = simulate_phase2_rx(params, phase.schedule, cb, trials, seed + 104729 * (k + 1),
                                     clip_mult=clip_mult)
        else:
            out = simulate_phase2_tx(params, phase.schedule, cb, trials, seed + 104729 * (k + 1),
                                     clip_mult=clip_mult)
        composite_rate += phase.fraction * out.achieved_rate
        composite_leakage += phase.fraction * phase.leakage
        max_pe = max(max_pe, out.error_prob)
        outcomes.append(out)
    return TimeSharingOutcome(
        composite_rate=composite_rate,
        composite_leakage=composite_leakage,
        max_error_prob=max_pe,
        phase_outcomes=tuple(outcomes),
        trials=trials,
        seed=seed,
    )
