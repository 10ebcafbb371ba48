"""Flat key-value run configuration.

Format: one ``section.key = value`` per line, ``#`` comments, blank lines
ignored.  Unknown keys are rejected with a line diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .capacity import HelpSpec, Placement
from .channel import ChannelParams, Structure
from .errors import ConfigError

_STRUCTURES = {s.value: s for s in Structure}
_PLACEMENTS = {p.value: p for p in Placement}

_KNOWN_KEYS = {
    "channel.structure",
    "channel.power_limit",
    "channel.sigma_w_sq",
    "channel.sigma_v_sq",
    "channel.sigma_dw_sq",
    "channel.correlation",
    "help.placement",
    "help.rate_rh",
    "help.rate_rh1",
    "help.rate_rh2",
    "help.secure",
    "help.causal",
    "help.message_aware",
    "schedule.tau_grid",
    "schedule.clip_mult",
    "schedule.code_rate_scale",
    "sim.n",
    "sim.trials",
    "sim.seed",
    "sim.phase1_leakage",
    "output.dir",
    "output.format",
}


@dataclass
class RunConfig:
    channel: ChannelParams
    help_spec: HelpSpec
    tau_grid: tuple[float, ...] = (0.25, 0.125, 0.0625, 0.03125)
    clip_mult: float = 4.0
    code_rate_scale: float = 0.5
    n: int = 64
    trials: int = 2000
    seed: int = 1234
    phase1_leakage: float = 0.01
    output_dir: Optional[Path] = None
    output_format: str = "csv"
    raw: dict = field(default_factory=dict)


def _parse_lines(lines: list[str], source: str) -> dict[str, tuple[str, int]]:
    out: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = (value, lineno)
    return out


def _get(entries: dict, key: str, source: str, default=None, required: bool = False) -> Optional[str]:
    if key in entries:
        return entries[key][0]
    if required:
        raise ConfigError(f"{source}: missing required key {key!r}")
    return default


def _to_float(value: str, key: str, source: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{source}:{lineno}: {key} must be a number, got {value!r}") from None


def _to_bool(value: str, key: str, source: str, lineno: int) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{source}:{lineno}: {key} must be a boolean, got {value!r}")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    entries = _parse_lines(text.splitlines(), source)

    def fval(key: str, default: Optional[float] = None, required: bool = False) -> Optional[float]:
        raw = _get(entries, key, source, required=required)
        if raw is None:
            return default
        return _to_float(raw, key, source, entries[key][1])

    def bval(key: str, default: bool = False) -> bool:
        raw = _get(entries, key, source)
        if raw is None:
            return default
        return _to_bool(raw, key, source, entries[key][1])

    structure_raw = _get(entries, "channel.structure", source, required=True)
    if structure_raw not in _STRUCTURES:
        raise ConfigError(
            f"{source}: channel.structure must be one of {sorted(_STRUCTURES)}, got {structure_raw!r}"
        )
    structure = _STRUCTURES[structure_raw]

    power = fval("channel.power_limit", required=True)
    sigma_v_sq = fval("channel.sigma_v_sq", required=True)
    try:
        if structure is Structure.REVERSELY_DEGRADED:
            sigma_dw_sq = fval("channel.sigma_dw_sq", required=True)
            channel = ChannelParams.reversely_degraded(power, sigma_v_sq, sigma_dw_sq)
        elif structure is Structure.NON_DEGRADED:
            sigma_w_sq = fval("channel.sigma_w_sq", required=True)
            correlation = fval("channel.correlation", required=True)
            channel = ChannelParams.non_degraded(power, sigma_w_sq, sigma_v_sq, correlation)
        else:
            sigma_w_sq = fval("channel.sigma_w_sq", required=True)
            channel = ChannelParams.degraded(power, sigma_w_sq, sigma_v_sq)
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid channel block: {exc}") from exc

    placement_raw = _get(entries, "help.placement", source, default="none")
    if placement_raw not in _PLACEMENTS:
        raise ConfigError(
            f"{source}: help.placement must be one of {sorted(_PLACEMENTS)}, got {placement_raw!r}"
        )
    try:
        help_spec = HelpSpec(
            placement=_PLACEMENTS[placement_raw],
            rate_rh=fval("help.rate_rh", 0.0),
            rate_rh1=fval("help.rate_rh1", 0.0),
            rate_rh2=fval("help.rate_rh2", 0.0),
            secure=bval("help.secure"),
            causal=bval("help.causal"),
            message_aware=bval("help.message_aware"),
        )
    except Exception as exc:
        raise ConfigError(f"{source}: invalid help block: {exc}") from exc

    tau_raw = _get(entries, "schedule.tau_grid", source)
    if tau_raw is None:
        tau_grid = RunConfig.__dataclass_fields__["tau_grid"].default
    else:
        lineno = entries["schedule.tau_grid"][1]
        try:
            tau_grid = tuple(float(v) for v in tau_raw.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: schedule.tau_grid must be comma-separated numbers") from None
        if not tau_grid or any(not 0.0 < t <= 1.0 for t in tau_grid):
            raise ConfigError(f"{source}:{lineno}: schedule.tau_grid values must lie in (0, 1]")

    out_dir = _get(entries, "output.dir", source)
    out_format = _get(entries, "output.format", source, default="csv")
    if out_format != "csv":
        raise ConfigError(f"{source}: output.format supports only 'csv', got {out_format!r}")

    n = fval("sim.n", 64.0)
    trials = fval("sim.trials", 2000.0)
    seed = fval("sim.seed", 1234.0)
    if n != int(n) or n < 1:
        raise ConfigError(f"{source}: sim.n must be a positive integer")
    if trials != int(trials) or trials < 1:
        raise ConfigError(f"{source}: sim.trials must be a positive integer")

    return RunConfig(
        channel=channel,
        help_spec=help_spec,
        tau_grid=tau_grid,
        clip_mult=fval("schedule.clip_mult", 4.0),
        code_rate_scale=fval("schedule.code_rate_scale", 0.5),
        n=int(n),
        trials=int(trials),
        seed=int(seed),
        phase1_leakage=fval("sim.phase1_leakage", 0.01),
        output_dir=Path(out_dir) if out_dir else None,
        output_format=out_format,
        raw={k: v for k, (v, _) in entries.items()},
    )


def load_config(path: Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path))
