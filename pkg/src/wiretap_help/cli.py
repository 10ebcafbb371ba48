"""Command-line harness: capacity | sweep | simulate | verify.

Exit codes: 0 ok, 1 verification failure, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .capacity import (
    CapacityReport,
    HelpSpec,
    Placement,
    feedback_comparison,
    secrecy_capacity_with_help,
)
from .channel import ChannelParams, Structure
from .config import _KNOWN_KEYS, RunConfig, parse_config
from .errors import ConfigError, WiretapHelpError
from .leakage import output_entropy_gap_quadrature, verify_leakage_chain
from .oracle import CHAIN_IDS, check_converse_chain, random_consistent_table
from .timesharing import two_phase_convergence

FEEDBACK_AXIS = "feedback.rate_rf"


def _fmt(value) -> str:
    """Rates as 12-significant-digit decimals; everything else as str."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(header: Sequence[str], rows: Sequence[Sequence], out_dir: Optional[Path], name: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / name).write_text(text)
        print(f"wrote {out_dir / name}")
    else:
        sys.stdout.write(text)


REPORT_FIELDS = (
    "c0", "c2", "cs0", "cs_lower", "cs_upper", "exact",
    "leakage_bound_phase2", "discontinuity_notes",
)


def _report_row(report: CapacityReport) -> list:
    row = []
    for name in REPORT_FIELDS:
        value = getattr(report, name)
        if name == "discontinuity_notes":
            value = ";".join(value)
        row.append(value)
    return row


def cmd_capacity(config: RunConfig, out_dir: Optional[Path]) -> int:
    report = secrecy_capacity_with_help(config.channel, config.help_spec)
    width = max(len(f) for f in REPORT_FIELDS)
    for name, value in zip(REPORT_FIELDS, _report_row(report)):
        print(f"{name:<{width}}  {_fmt(value)}")
    _write_csv(REPORT_FIELDS, [_report_row(report)], out_dir, "capacity.csv")
    return 0


def _config_with_override(text: str, key: str, value: float) -> RunConfig:
    kept = [
        line for line in text.splitlines()
        if line.split("#", 1)[0].split("=", 1)[0].strip() != key
    ]
    kept.append(f"{key} = {value!r}")
    return parse_config("\n".join(kept), source=f"<sweep {key}>")


def cmd_sweep(config: RunConfig, config_text: str, axis: str, lo: float, hi: float,
              steps: int, out_dir: Optional[Path]) -> int:
    if steps < 2:
        raise ConfigError("--steps must be >= 2")
    grid = [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]
    if axis == FEEDBACK_AXIS:
        header = (axis, "c_snf", "c_sf")
        rows = []
        for rf in grid:
            c_snf, c_sf = feedback_comparison(config.channel, rf)
            rows.append([rf, c_snf, c_sf])
        _write_csv(header, rows, out_dir, "sweep.csv")
        return 0
    if axis not in _KNOWN_KEYS:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    header = (axis,) + REPORT_FIELDS
    rows = []
    for value in grid:
        point = _config_with_override(config_text, axis, value)
        report = secrecy_capacity_with_help(point.channel, point.help_spec)
        rows.append([value] + _report_row(report))
    _write_csv(header, rows, out_dir, "sweep.csv")
    return 0


def cmd_simulate(config: RunConfig, out_dir: Optional[Path]) -> int:
    points = two_phase_convergence(
        config.channel,
        config.help_spec,
        config.tau_grid,
        n=config.n,
        trials=config.trials,
        seed=config.seed,
        code_rate_scale=config.code_rate_scale,
        phase1_leakage=config.phase1_leakage,
        clip_mult=config.clip_mult,
    )
    header = ("tau", "levels", "code_rate", "predicted_rate",
              "composite_rate", "composite_leakage", "error_prob")
    rows = [
        [p.tau, p.levels, p.code_rate, p.predicted_rate,
         p.composite_rate, p.composite_leakage, p.error_prob]
        for p in points
    ]
    _write_csv(header, rows, out_dir, "simulate.csv")
    return 0


_VERIFY_CHAIN_ANCHORS = {
    "rx_degraded": "receiver-help converse chain, degraded order",
    "rx_degraded_message_aware": "message-aware receiver help adds nothing, degraded order",
    "rx_reversely_degraded": "receiver-help converse chain, reversed order",
    "rx_reversely_degraded_message_aware": "message-aware receiver help adds nothing, reversed order",
    "tx_degraded": "transmitter-help converse chain, degraded order",
    "tx_reversely_degraded": "transmitter-help converse chain, reversed order",
}


def cmd_verify(seed: int, tables_per_chain: int = 25) -> int:
    """Run the discrete converse-chain oracle, the closed-form leakage
    chains, and the quantized-help entropy-gap bound; print one line per
    check."""
    failures = 0
    t0 = time.perf_counter()
    for offset, chain_id in enumerate(CHAIN_IDS):
        bad = 0
        for i in range(tables_per_chain):
            table = random_consistent_table(chain_id, seed=seed + 1000 * i + offset)
            report = check_converse_chain(table)
            if not report.ok:
                bad += 1
        status = "PASS" if bad == 0 else "FAIL"
        if bad:
            failures += 1
        print(f"{status}  {_VERIFY_CHAIN_ANCHORS[chain_id]} "
              f"({tables_per_chain} random joint tables)")

    chain_cases = [
        (ChannelParams.degraded(1.0, 1.0, 1.0),
         HelpSpec(Placement.RX_ONLY, rate_rh=0.5),
         "second-phase leakage bound, degraded order"),
        (ChannelParams.reversely_degraded(1.0, 1.0, 0.5),
         HelpSpec(Placement.RX_ONLY, rate_rh=0.5),
         "second-phase leakage bound, reversed order"),
        (ChannelParams.non_degraded(1.0, 1.0, 2.0, 0.3),
         HelpSpec(Placement.RX_ONLY, rate_rh=0.5),
         "second-phase leakage bound, general noise correlation"),
    ]
    for params, help_spec, anchor in chain_cases:
        report = verify_leakage_chain(params, help_spec)
        status = "PASS" if report.ok else "FAIL"
        if not report.ok:
            failures += 1
        print(f"{status}  {anchor} ({len(report.steps)} steps)")

    bound = 0.5 * math.log2(2.0 / 3.0)
    ok = all(
        output_entropy_gap_quadrature(1.0, 1.0, 1.0, levels) <= bound + 1e-6
        for levels in (2, 4, 8, 16)
    )
    if not ok:
        failures += 1
    print(f"{'PASS' if ok else 'FAIL'}  quantized-help entropy-gap bound "
          f"(unit-power symmetric case, 2..16 levels)")

    elapsed = time.perf_counter() - t0
    print(f"{'OK' if failures == 0 else 'FAILED'}: "
          f"{failures} failing check group(s) in {elapsed:.1f} s")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiretap-help",
        description="Secrecy-capacity laboratory for Gaussian wiretap channels "
                    "with rate-limited helper links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", type=Path, required=True, help="run config file")
        p.add_argument("--seed", type=int, default=None, help="override sim.seed")
        p.add_argument("--out", type=Path, default=None, help="output directory (default stdout)")
        p.add_argument("--format", choices=("csv",), default="csv")

    common(sub.add_parser("capacity", help="closed-form capacity report"))
    p_sweep = sub.add_parser("sweep", help="capacity report along one config axis")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True,
                         help=f"config key to sweep, or {FEEDBACK_AXIS}")
    p_sweep.add_argument("--from", dest="sweep_from", type=float, required=True)
    p_sweep.add_argument("--to", dest="sweep_to", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    common(sub.add_parser("simulate", help="two-phase convergence simulation"))
    p_verify = sub.add_parser("verify", help="run the built-in verification suite")
    common(p_verify, needs_config=False)
    p_verify.add_argument("--tables", type=int, default=25,
                          help="random joint tables per converse chain")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.seed if args.seed is not None else 2024,
                              tables_per_chain=args.tables)
        config_text = args.config.read_text()
        config = parse_config(config_text, source=str(args.config))
        if args.seed is not None:
            config.seed = args.seed
        if args.command == "capacity":
            return cmd_capacity(config, args.out)
        if args.command == "sweep":
            return cmd_sweep(config, config_text, args.axis,
                             args.sweep_from, args.sweep_to, args.steps, args.out)
        return cmd_simulate(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except WiretapHelpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
