"""Leakage estimation and verification.

Two independent routes:

* a plug-in mutual-information estimator over an exhaustively discretized
  joint law of (message, eavesdropper observation, help), tractable at tiny
  blocklengths and message counts;
* closed-form evaluation of every Gaussian step in the analytic leakage
  chains, with numerical-quadrature cross-checks of the conditional
  entropies and of the entropy-power-inequality step.

Differential entropies are in bits throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .capacity import HelpSpec, Placement, phase2_leakage_bound
from .channel import ChannelParams, Structure
from .codec import Codebook
from .errors import GridResolutionError, UnsupportedHelpError
from .quantizer import LOG2_2PIE, build_quantizer

_LN2 = math.log(2.0)

MAX_TABLE_CELLS = 20_000_000


def _gauss_legendre(a: np.ndarray, b: np.ndarray, nodes: int):
    """Gauss-Legendre nodes/weights mapped onto each interval [a_i, b_i]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[..., None] + half[..., None] * x  # (..., nodes)
    wts = half[..., None] * w
    return pts, wts


def _phi(x: np.ndarray, var: float) -> np.ndarray:
    return np.exp(-0.5 * x * x / var) / math.sqrt(2.0 * math.pi * var)


def _cdf_diff(lo: np.ndarray, hi: np.ndarray, var: float) -> np.ndarray:
    s = math.sqrt(var)
    return ndtr(hi / s) - ndtr(lo / s)


# ---------------------------------------------------------------------------
# Plug-in estimator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeakageEstimate:
    value: float  # bits/symbol
    method: str  # "plug_in_discrete" or "gaussian_closed_form"
    bound: float  # applicable analytic phase-2 bound, bits/symbol
    n: int
    message_count: int
    refinement: tuple[float, ...] = ()


def _sample_kernel(
    params: ChannelParams,
    help_spec: HelpSpec,
    x_vals: np.ndarray,
    t_edges: np.ndarray,
    t_recs: np.ndarray,
    z_edges: np.ndarray,
    quad_nodes: int,
) -> np.ndarray:
    """Per-symbol kernel K[x, t, c] = P(T = t, Z in cell c | X = x).

    For Tx-side help the transmitted symbol is x - rec_t conditioned on T = t.
    The outer t-cells and z-cells are half-infinite so the kernel sums to 1.
    """
    sw2, sv2, sdw2 = params.sigma_w_sq, params.sigma_v_sq, params.sigma_dw_sq
    tx_side = help_spec.placement in (Placement.TX_ONLY, Placement.TX_AND_RX_SAME)
    L = t_recs.size
    nx = x_vals.size
    nz = z_edges.size - 1
    K = np.empty((nx, L, nz))

    # truncation for the half-infinite outer cells of each integration axis
    def trunc(edges: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
        lo = edges[:-1].copy()
        hi = edges[1:].copy()
        lo[0] = min(lo[1] if lo.size > 1 else 0.0, 0.0) - 9.0 * sigma
        hi[-1] = max(hi[-2] if hi.size > 1 else 0.0, 0.0) + 9.0 * sigma
        return lo, hi

    if params.structure is Structure.DEGRADED:
        # Z = x_eff + W + V, T = Q(W); integrate over W within each t-cell.
        t_lo, t_hi = trunc(t_edges, math.sqrt(sw2))
        w_pts, w_wts = _gauss_legendre(t_lo, t_hi, quad_nodes)  # (L, nodes)
        dens = _phi(w_pts, sw2) * w_wts  # (L, nodes)
        for i, x in enumerate(x_vals):
            x_eff = x - t_recs if tx_side else np.full(L, x)  # (L,)
            shift = x_eff[:, None] + w_pts  # (L, nodes)
            cdf = ndtr((z_edges[None, None, :] - shift[:, :, None]) / math.sqrt(sv2))
            cell = cdf[:, :, 1:] - cdf[:, :, :-1]  # (L, nodes, nz)
            K[i] = np.einsum("ln,lnc->lc", dens, cell)
        return K

    # Reversely degraded / non-degraded: Z = x_eff + V; integrate over V
    # within each z-cell and weight by P(T = t | V = v).
    z_lo, z_hi = trunc(z_edges, math.sqrt(sv2) + float(np.abs(x_vals).max()) + float(np.abs(t_recs).max()))
    for i, x in enumerate(x_vals):
        x_eff = x - t_recs if tx_side else np.full(L, x)  # depends on t for tx help
        for t in range(L):
            a = z_lo - x_eff[t]
            b = z_hi - x_eff[t]
            v_pts, v_wts = _gauss_legendre(a, b, quad_nodes)  # (nz, nodes)
            dens = _phi(v_pts, sv2) * v_wts
            if params.structure is Structure.REVERSELY_DEGRADED:
                # T = Q(V + dW): P(T = t | v) via the dW tail within the cell
                p_t = _cdf_diff(t_edges[t] - v_pts, t_edges[t + 1] - v_pts, sdw2)
            else:
                r = params.correlation
                mean = r * math.sqrt(sw2 / sv2) * v_pts
                cvar = sw2 * (1.0 - r * r)
                p_t = _cdf_diff(t_edges[t] - mean, t_edges[t + 1] - mean, cvar)
            K[i, t] = (dens * p_t).sum(axis=1)
    return K


def _plug_in_mi(
    params: ChannelParams,
    help_spec: HelpSpec,
    codebook: Codebook,
    levels: int,
    grid_cells: int,
    clip_mult: float,
    quad_nodes: int,
) -> float:
    n = codebook.blocklength
    M = codebook.num_messages
    q = build_quantizer(params.sigma_w_sq, levels, clip_mult)
    t_edges = q.cell_edges()
    t_recs = q.reconstruct(np.arange(levels))

    x_flat = codebook.codewords.reshape(-1)
    x_vals, inv = np.unique(x_flat, return_inverse=True)
    inv = inv.reshape(M, n)

    sz = math.sqrt(params.sigma_w_sq + params.sigma_v_sq) \
        if params.structure is Structure.DEGRADED else math.sqrt(params.sigma_v_sq)
    reach = float(np.abs(x_vals).max()) + float(np.abs(t_recs).max()) + 6.0 * sz
    inner = np.linspace(-reach, reach, grid_cells - 1)
    z_edges = np.concatenate(([-np.inf], inner, [np.inf]))

    K = _sample_kernel(params, help_spec, x_vals, t_edges, t_recs, z_edges, quad_nodes)
    if help_spec.secure:
        K = K.sum(axis=1, keepdims=True)  # Ev does not see T
    A = K.shape[1] * K.shape[2]
    if M * A**n > MAX_TABLE_CELLS:
        raise GridResolutionError("joint table too large; reduce n, levels, or grid_cells")
    Kf = K.reshape(K.shape[0], A)

    # joint over (m, obs_1, ..., obs_n) via per-sample products
    joint = np.full((M, 1), 1.0 / M)
    for i in range(n):
        joint = joint[:, :, None] * Kf[inv[:, i]][:, None, :]
        joint = joint.reshape(M, -1)
    p_obs = joint.sum(axis=0)
    p_m = joint.sum(axis=1)
    mask = joint > 0.0
    ratio = joint[mask] / (p_m[:, None] * p_obs[None, :])[mask]
    mi = float((joint[mask] * np.log2(ratio)).sum())
    return mi / n


def estimate_leakage_discrete(
    params: ChannelParams,
    help_spec: HelpSpec,
    codebook: Codebook,
    levels: int = 4,
    grid_cells: int = 48,
    clip_mult: float = 4.0,
    quad_nodes: int = 24,
    refine: bool = True,
    stability_rel: float = 0.05,
    stability_abs: float = 5e-3,
) -> LeakageEstimate:
    """Plug-in leakage estimate n^-1 I(M; Z^n, T) on a quantized grid.

    Computes the estimate at ``grid_cells`` and at twice that resolution and
    requires the two to agree (discretization can only under-estimate, so a
    stable refined value is a usable lower-confidence figure against the
    analytic bounds).
    """
    if codebook.blocklength > 8 or codebook.num_messages > 16:
        raise ValueError("plug-in estimator is capped at n <= 8, |M| <= 16")
    coarse = _plug_in_mi(params, help_spec, codebook, levels, grid_cells, clip_mult, quad_nodes)
    values = [coarse]
    value = coarse
    if refine:
        fine = _plug_in_mi(params, help_spec, codebook, levels, 2 * grid_cells, clip_mult, quad_nodes)
        values.append(fine)
        if abs(fine - coarse) > max(stability_rel * abs(fine), stability_abs):
            raise GridResolutionError(
                f"grid too coarse: estimate moved {coarse:.4g} -> {fine:.4g} on refinement"
            )
        value = fine
    try:
        bound = phase2_leakage_bound(params, help_spec)
    except UnsupportedHelpError:
        bound = math.nan
    return LeakageEstimate(
        value=value,
        method="plug_in_discrete",
        bound=bound,
        n=codebook.blocklength,
        message_count=codebook.num_messages,
        refinement=tuple(values),
    )


# ---------------------------------------------------------------------------
# Analytic chain verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainStep:
    name: str
    kind: str  # "le": lhs <= rhs; "eq": lhs == rhs
    lhs: float
    rhs: float
    tol: float = 1e-10

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        if self.kind == "eq":
            return abs(self.slack) <= self.tol
        return self.slack >= -self.tol


@dataclass(frozen=True)
class ChainReport:
    chain_id: str
    steps: tuple[ChainStep, ...]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def failures(self) -> list[ChainStep]:
        return [s for s in self.steps if not s.ok]


def _h_gauss(var: float) -> float:
    return 0.5 * (math.log2(var) + LOG2_2PIE)


def gaussian_cond_entropy_sum(sigma_v_sq: float, sigma_dw_sq: float) -> float:
    """h(V | V + dW) in bits, closed form."""
    return 0.5 * math.log2(sigma_v_sq / (sigma_v_sq + sigma_dw_sq)) + _h_gauss(sigma_dw_sq)


def gaussian_cond_entropy_quadrature(
    sigma_v_sq: float, sigma_dw_sq: float, grid_points: int = 801, span: float = 8.0
) -> float:
    """h(V | V + dW) by direct 2-D integration of the joint density."""
    sv = math.sqrt(sigma_v_sq)
    ss = math.sqrt(sigma_v_sq + sigma_dw_sq)
    v = np.linspace(-span * sv, span * sv, grid_points)
    s = np.linspace(-span * ss, span * ss, grid_points)
    dv = v[1] - v[0]
    ds = s[1] - s[0]
    V, S = np.meshgrid(v, s, indexing="ij")
    # joint of (V, S=V+dW): f(v, s) = phi_V(v) * phi_dW(s - v)
    f = _phi(V, sigma_v_sq) * _phi(S - V, sigma_dw_sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = np.where(f > 0, -f * np.log2(f), 0.0)
    h_joint = float(np.trapezoid(np.trapezoid(integ, dx=ds, axis=1), dx=dv))
    f_s = _phi(s, sigma_v_sq + sigma_dw_sq)
    h_s = float(np.trapezoid(-f_s * np.log2(f_s), dx=ds))
    return h_joint - h_s


def _cell_output_densities(
    power: float, sigma_w_sq: float, levels: int, clip_mult: float,
    grid: np.ndarray, quad_nodes: int = 96,
):
    """Per-cell probabilities p_t and the conditional densities of X + W
    given T = t on the grid, with X Gaussian at full power and W a Gaussian
    restricted to the quantizer cell.

    The truncated noise density is discontinuous at the cell edges, so the
    inner integral over the cell uses Gauss-Legendre quadrature rather than
    the grid, which keeps the output densities smooth and accurate.
    """
    q = build_quantizer(sigma_w_sq, levels, clip_mult)
    edges = q.cell_edges().copy()
    s = math.sqrt(sigma_w_sq)
    lo = np.maximum(edges[:-1], -9.0 * s)
    hi = np.minimum(edges[1:], 9.0 * s)
    p_t = ndtr(edges[1:] / s) - ndtr(edges[:-1] / s)
    p_t = np.where(p_t > 0, p_t, 1e-300)
    w_pts, w_wts = _gauss_legendre(lo, hi, quad_nodes)  # (levels, nodes)
    dens = []
    for t in range(levels):
        weight = _phi(w_pts[t], sigma_w_sq) * w_wts[t] / p_t[t]
        f_y = (_phi(grid[:, None] - w_pts[t][None, :], power) * weight).sum(axis=1)
        dens.append(f_y)
    return p_t, dens, q


def _entropy_on_grid(f: np.ndarray, dx: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = np.where(f > 0, -f * np.log2(f), 0.0)
    return float(np.trapezoid(integ, dx=dx))


def output_entropy_gap_quadrature(
    power: float,
    sigma_w_sq: float,
    sigma_v_sq: float,
    levels: int,
    clip_mult: float = 4.0,
    grid_points: int = 1201,
) -> float:
    """h(Y|T) - h(Z|T) at n = 1 with T = Q(W) and a Gaussian input at full
    power, by direct quadrature of the conditional densities (bits)."""
    sw = math.sqrt(sigma_w_sq)
    reach = 9.0 * (sw + math.sqrt(power) + math.sqrt(sigma_v_sq))
    grid = np.linspace(-reach, reach, grid_points)
    dx = grid[1] - grid[0]
    p_t, dens_y, _ = _cell_output_densities(power, sigma_w_sq, levels, clip_mult, grid)
    # smooth convolution kernel for the extra eavesdropper noise
    kv = _phi(grid[:, None] - grid[None, :], sigma_v_sq) * dx
    h_y = 0.0
    h_z = 0.0
    for t in range(levels):
        f_y = dens_y[t]  # density of X + W given T = t
        f_z = kv @ f_y
        h_y += p_t[t] * _entropy_on_grid(f_y, dx)
        h_z += p_t[t] * _entropy_on_grid(f_z, dx)
    return h_y - h_z


def epi_cell_slacks(
    power: float,
    sigma_w_sq: float,
    sigma_v_sq: float,
    levels: int,
    clip_mult: float = 4.0,
    grid_points: int = 1201,
) -> np.ndarray:
    """Per-cell entropy-power slack 2^(2 h(Y+V|t)) - 2^(2 h(Y|t)) - 2 pi e sv2
    with Y = X + W, X Gaussian at full power; all must be >= 0."""
    sw = math.sqrt(sigma_w_sq)
    reach = 9.0 * (sw + math.sqrt(power) + math.sqrt(sigma_v_sq))
    grid = np.linspace(-reach, reach, grid_points)
    dx = grid[1] - grid[0]
    _, dens_y, _ = _cell_output_densities(power, sigma_w_sq, levels, clip_mult, grid)
    kv = _phi(grid[:, None] - grid[None, :], sigma_v_sq) * dx
    slacks = np.empty(levels)
    for t in range(levels):
        f_y = dens_y[t]
        f_z = kv @ f_y
        h_y = _entropy_on_grid(f_y, dx)
        h_z = _entropy_on_grid(f_z, dx)
        slacks[t] = 2.0 ** (2.0 * h_z) - 2.0 ** (2.0 * h_y) - 2.0 * math.pi * math.e * sigma_v_sq
    return slacks


def verify_leakage_chain(
    params: ChannelParams,
    help_spec: HelpSpec,
    quadrature_tol: float = 1e-4,
) -> ChainReport:
    """Evaluate every closed-form step of the applicable flash-phase leakage
    chain for a Gaussian input at full power and report per-step slack."""
    p = params.power_limit
    sw2, sv2, sdw2 = params.sigma_w_sq, params.sigma_v_sq, params.sigma_dw_sq
    tx_side = help_spec.placement in (Placement.TX_ONLY, Placement.TX_AND_RX_SAME)
    bound = phase2_leakage_bound(params, help_spec)
    steps: list[ChainStep] = []

    if params.structure is Structure.DEGRADED:
        chain_id = "tx_degraded" if tx_side else "rx_degraded"
        mi = _h_gauss(p + sv2) - _h_gauss(sv2)
        steps.append(ChainStep(
            "helper-subtracted channel reduces to the direct Tx-Ev link",
            "eq", mi, 0.5 * math.log2(1.0 + p / sv2)))
        steps.append(ChainStep("leakage value does not exceed the phase-2 bound", "le", mi, bound))
    elif params.structure is Structure.REVERSELY_DEGRADED:
        chain_id = "tx_reversely_degraded" if tx_side else "rx_reversely_degraded"
        h_cond = gaussian_cond_entropy_sum(sv2, sdw2)
        steps.append(ChainStep(
            "conditional entropy via joint-minus-marginal decomposition",
            "eq", h_cond, _h_gauss(sv2) + _h_gauss(sdw2) - _h_gauss(sv2 + sdw2)))
        steps.append(ChainStep(
            "conditional entropy quadrature cross-check",
            "eq", h_cond, gaussian_cond_entropy_quadrature(sv2, sdw2), tol=quadrature_tol))
        h_sum = _h_gauss(p + sv2)
        steps.append(ChainStep(
            "signal-plus-noise entropy at the Gaussian maximum",
            "le", h_sum, _h_gauss(p + sv2)))
        steps.append(ChainStep(
            "assembled chain value equals the phase-2 bound",
            "eq", h_sum - h_cond, bound))
    else:
        chain_id = "tx_non_degraded" if tx_side else "rx_non_degraded"
        r = params.correlation
        h_joint = 0.5 * math.log2(sw2 * sv2 * (1.0 - r * r)) + LOG2_2PIE
        steps.append(ChainStep(
            "joint noise entropy from the covariance determinant",
            "eq", h_joint, _h_gauss(sw2) + _h_gauss(sv2) + 0.5 * math.log2(1.0 - r * r)))
        chain_val = _h_gauss(p + sv2) + _h_gauss(sw2) - h_joint
        steps.append(ChainStep(
            "assembled chain value equals the phase-2 bound", "eq", chain_val, bound))
        steps.append(ChainStep(
            "correlation penalty is nonnegative", "le", 0.5 * math.log2(1.0 + p / sv2), bound))
    return ChainReport(chain_id=chain_id, steps=tuple(steps))


def composite_leakage(
    phase1_leakage: float,
    phase2_leakage: float,
    tau_grid: tuple[float, ...],
    phase1_silent: bool = False,
) -> list[tuple[float, float]]:
    """Composite leakage (1 - tau) * R_l1 + tau * R_l2 over a tau grid."""
    rows = []
    for tau in tau_grid:
        if not 0.0 <= tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        r_l1 = 0.0 if phase1_silent else phase1_leakage
        rows.append((tau, (1.0 - tau) * r_l1 + tau * phase2_leakage))
    return rows
