"""Uniform scalar quantization of the receiver noise, and the flash-phase
rate predictions for Rx-side subtraction and Tx-side pre-subtraction.

The quantizer is uniform on [-clip_mult * sigma_w, +clip_mult * sigma_w] with
midpoint reconstruction and saturation outside the interval.  Help-rate
accounting follows the flash-signaling budget: a phase of fraction ``tau``
with ``L`` levels consumes ``tau * log2(L) <= R_h`` bits/symbol of help.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .channel import ChannelParams

LOG2_2PIE = math.log2(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class Quantizer:
    lo: float
    hi: float
    levels: int

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / self.levels

    def indices(self, w: np.ndarray) -> np.ndarray:
        """Cell index of each sample, saturating at the edge cells."""
        w = np.asarray(w, dtype=float)
        idx = np.floor((w - self.lo) / self.step)
        return np.clip(idx, 0, self.levels - 1).astype(np.int64)

    def reconstruct(self, idx: np.ndarray) -> np.ndarray:
        return self.lo + (np.asarray(idx, dtype=float) + 0.5) * self.step

    def quantize(self, w: np.ndarray) -> np.ndarray:
        return self.reconstruct(self.indices(w))

    def cell_edges(self) -> np.ndarray:
        """The levels+1 cell boundaries (the outermost cells extend to +-inf)."""
        return self.lo + self.step * np.arange(self.levels + 1)


def build_quantizer(sigma_w_sq: float, levels: int, clip_mult: float = 4.0) -> Quantizer:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if clip_mult <= 0:
        raise ValueError("clip_mult must be > 0")
    half = clip_mult * math.sqrt(sigma_w_sq)
    return Quantizer(lo=-half, hi=half, levels=levels)


@dataclass(frozen=True)
class FlashSchedule:
    """One flash phase: fraction ``tau`` using ``levels`` quantizer cells.

    ``help_rate`` is the per-symbol help budget R_h; the constructor enforces
    tau * log2(levels) <= help_rate.
    """

    tau: float
    levels: int
    help_rate: float
    phase_rates: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must be in (0, 1]")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.tau * math.log2(self.levels) > self.help_rate + 1e-12:
            raise ValueError("help budget violated: tau * log2(levels) > help_rate")

    @classmethod
    def from_help_rate(cls, help_rate: float, tau: float) -> "FlashSchedule":
        levels = max(1, int(math.floor(2.0 ** (help_rate / tau))))
        return cls(tau=tau, levels=levels, help_rate=help_rate)

    def help_budget(self, n: int) -> float:
        """Per-block help entropy budget n * R_h in bits."""
        return n * self.help_rate


@dataclass(frozen=True)
class HelpMessage:
    """Quantized noise indices plus entropy accounting for the help link."""

    indices: np.ndarray
    side_info_bits: float
    empirical_entropy_bits: float


def quantize_noise(q: Quantizer, w_seq: np.ndarray) -> HelpMessage:
    idx = q.indices(w_seq)
    n = idx.size
    counts = np.bincount(idx, minlength=q.levels) if q.levels <= 1 << 22 else None
    if counts is not None:
        p = counts[counts > 0] / n
        emp = float(-(p * np.log2(p)).sum()) * n
    else:
        _, c = np.unique(idx, return_counts=True)
        p = c / n
        emp = float(-(p * np.log2(p)).sum()) * n
    return HelpMessage(
        indices=idx,
        side_info_bits=n * math.log2(q.levels),
        empirical_entropy_bits=emp,
    )


class RatePrediction(NamedTuple):
    prediction: float
    leading_order: float


def phase2_rate_rx(
    params: ChannelParams,
    schedule: FlashSchedule,
    input_entropy: Optional[float] = None,
) -> RatePrediction:
    """Predicted flash-phase rate with Rx-side noise subtraction.

    ``input_entropy`` is h(X) in bits; defaults to a Gaussian input at full
    power.  The prediction can be negative at R_h = 0; callers scheduling
    codes should floor it at 0.
    """
    if params.sigma_w_sq <= 0:
        raise ValueError("sigma_w_sq must be > 0")
    if input_entropy is None:
        input_entropy = 0.5 * math.log2(params.power_limit) + 0.5 * LOG2_2PIE
    leading = schedule.help_rate / schedule.tau
    pred = input_entropy - 0.5 * (math.log2(params.sigma_w_sq) + LOG2_2PIE) + leading
    return RatePrediction(prediction=pred, leading_order=leading)


def phase2_rate_tx(params: ChannelParams, schedule: FlashSchedule) -> RatePrediction:
    """Predicted flash-phase rate with Tx-side pre-subtraction.

    Evaluates the dithered-quantizer rate expression with the vanishing term
    set to 0; alpha_w = 2 / (pi * sqrt(3) * sigma_w_sq).  Our undithered
    uniform quantizer may differ by a bounded constant, so this is a
    prediction to compare against, not an identity.
    """
    if params.sigma_w_sq <= 0:
        raise ValueError("sigma_w_sq must be > 0")
    alpha_w = 2.0 / (math.pi * math.sqrt(3.0) * params.sigma_w_sq)
    ratio = schedule.help_rate / schedule.tau
    inner = 2.0 ** (-2.0 * ratio) + alpha_w * params.power_limit * (1.0 - 2.0 ** (-ratio)) ** 2
    pred = ratio + 0.5 * math.log2(inner)
    return RatePrediction(prediction=pred, leading_order=ratio)
