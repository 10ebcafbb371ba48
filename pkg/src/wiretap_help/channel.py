"""Gaussian wiretap channel model.

Three structures are supported:

* degraded:            Y = X + W,  Z = Y + V       (W, V independent)
* reversely degraded:  Z = X + V,  Y = Z + dW      (V, dW independent, W = V + dW)
* non-degraded:        Y = X + W,  Z = X + V       (W, V jointly Gaussian, corr. r)

All noise sequences are i.i.d. across time.  Sampling is seedable and
reproducible; concurrent callers must use distinct seeds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SingularCovarianceError


class Structure(enum.Enum):
    DEGRADED = "degraded"
    REVERSELY_DEGRADED = "reversely_degraded"
    NON_DEGRADED = "non_degraded"


@dataclass(frozen=True)
class ChannelParams:
    """Channel configuration: power budget, noise variances, degradation structure.

    ``sigma_dw_sq`` is only meaningful for the reversely degraded structure,
    where ``sigma_w_sq == sigma_v_sq + sigma_dw_sq`` must hold exactly.
    ``correlation`` is only meaningful for the non-degraded structure and must
    be ``None`` otherwise.
    """

    power_limit: float
    sigma_w_sq: float
    sigma_v_sq: float
    structure: Structure
    sigma_dw_sq: float = 0.0
    correlation: Optional[float] = None

    def __post_init__(self) -> None:
        if self.power_limit < 0:
            raise ValueError("power_limit must be >= 0")
        for name in ("sigma_w_sq", "sigma_v_sq", "sigma_dw_sq"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.structure is Structure.REVERSELY_DEGRADED:
            if self.sigma_w_sq != self.sigma_v_sq + self.sigma_dw_sq:
                raise ValueError(
                    "reversely degraded requires sigma_w_sq == sigma_v_sq + sigma_dw_sq"
                )
        if self.structure is Structure.NON_DEGRADED:
            if self.correlation is None or not abs(self.correlation) <= 1:
                raise ValueError("non-degraded requires a correlation r with |r| <= 1")
        elif self.correlation is not None:
            raise ValueError(
                "correlation is only applicable to the non-degraded structure"
            )

    @classmethod
    def degraded(cls, power_limit: float, sigma_w_sq: float, sigma_v_sq: float) -> "ChannelParams":
        return cls(power_limit, sigma_w_sq, sigma_v_sq, Structure.DEGRADED)

    @classmethod
    def reversely_degraded(
        cls, power_limit: float, sigma_v_sq: float, sigma_dw_sq: float
    ) -> "ChannelParams":
        return cls(
            power_limit,
            sigma_v_sq + sigma_dw_sq,
            sigma_v_sq,
            Structure.REVERSELY_DEGRADED,
            sigma_dw_sq=sigma_dw_sq,
        )

    @classmethod
    def non_degraded(
        cls, power_limit: float, sigma_w_sq: float, sigma_v_sq: float, correlation: float
    ) -> "ChannelParams":
        return cls(
            power_limit,
            sigma_w_sq,
            sigma_v_sq,
            Structure.NON_DEGRADED,
            correlation=correlation,
        )

    @property
    def singular_correlation(self) -> bool:
        return self.structure is Structure.NON_DEGRADED and abs(self.correlation) == 1.0


@dataclass(frozen=True)
class NoiseDraw:
    """One block of noise realizations.

    ``w_seq`` is the total receiver noise, ``v_seq`` the eavesdropper noise.
    ``dw_seq`` is the extra receiver noise of the reversely degraded structure
    (``w_seq = v_seq + dw_seq`` there) and ``None`` otherwise.
    """

    w_seq: np.ndarray
    v_seq: np.ndarray
    dw_seq: Optional[np.ndarray] = None


def sample_noise(
    params: ChannelParams,
    n: int,
    seed: int,
    require_nonsingular: bool = False,
) -> NoiseDraw:
    """Draw one i.i.d. noise block of length ``n``, deterministically in ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if params.structure is Structure.DEGRADED:
        w = rng.normal(0.0, math.sqrt(params.sigma_w_sq), n)
        v = rng.normal(0.0, math.sqrt(params.sigma_v_sq), n)
        return NoiseDraw(w_seq=w, v_seq=v)
    if params.structure is Structure.REVERSELY_DEGRADED:
        v = rng.normal(0.0, math.sqrt(params.sigma_v_sq), n)
        dw = rng.normal(0.0, math.sqrt(params.sigma_dw_sq), n)
        return NoiseDraw(w_seq=v + dw, v_seq=v, dw_seq=dw)
    # non-degraded: (W, V) jointly Gaussian with normalized correlation r
    r = params.correlation
    if require_nonsingular and abs(r) == 1.0:
        raise SingularCovarianceError("|r| = 1: (W, V) covariance is singular")
    a = rng.standard_normal(n)
    b = rng.standard_normal(n)
    w = math.sqrt(params.sigma_w_sq) * a
    v = math.sqrt(params.sigma_v_sq) * (r * a + math.sqrt(max(0.0, 1.0 - r * r)) * b)
    return NoiseDraw(w_seq=w, v_seq=v)


def transmit(
    params: ChannelParams, x_seq: np.ndarray, noise: NoiseDraw
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the additive channel law; returns (y_seq, z_seq).

    Never rescales the input: the power budget is the caller's responsibility.
    """
    x_seq = np.asarray(x_seq, dtype=float)
    if x_seq.shape != noise.w_seq.shape:
        raise ValueError(
            f"length mismatch: x has shape {x_seq.shape}, noise {noise.w_seq.shape}"
        )
    if params.structure is Structure.DEGRADED:
        y = x_seq + noise.w_seq
        z = y + noise.v_seq
    elif params.structure is Structure.REVERSELY_DEGRADED:
        z = x_seq + noise.v_seq
        y = z + noise.dw_seq
    else:
        y = x_seq + noise.w_seq
        z = x_seq + noise.v_seq
    return y, z
