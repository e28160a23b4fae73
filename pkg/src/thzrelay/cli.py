"""Command line interface.

    thzrelay point      --config scenario.toml [--method all]
    thzrelay sweep      --config sweep.toml --out op.csv
    thzrelay validate   --config sweep.toml --out report.csv [--tolerance 0.01]
    thzrelay absorption [--config env.toml] --out beta.csv

Every command that writes ``--out`` also writes ``<out>.resolved.json``, the
configuration with all defaults filled in; it can be fed back as ``--config``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .atmosphere import BAND
from .config import ConfigError, SweepSpec, build_scenario, load_config, load_raw, resolve
from .mcsim import McConfig
from .outage import Method
from .sweep import absorption_table, evaluate_point, format_float, run_sweep, sweep_header, validate, write_csv

log = logging.getLogger("thzrelay")

METHOD_ALIASES = {
    "closed": [Method.CLOSED_FORM],
    "quad": [Method.QUADRATURE],
    "mc": [Method.MONTE_CARLO],
    "all": [Method.CLOSED_FORM, Method.QUADRATURE, Method.MONTE_CARLO],
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thzrelay", description="Outage probability of dual-hop DF THz relay links",
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", type=Path, required=config_required, help="TOML or JSON config file")
        sp.add_argument("--out", type=Path, help="output CSV path")

    def mc_opts(sp):
        sp.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
        sp.add_argument("--seed", type=int, help="Monte-Carlo seed")
        sp.add_argument("--chunks", type=int, help="Monte-Carlo chunks (fixes the stream layout)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for grid points")

    sp = sub.add_parser("point", help="OP of a single scenario")
    common(sp)
    sp.add_argument("--method", choices=sorted(METHOD_ALIASES), default="all")
    mc_opts(sp)

    sp = sub.add_parser("sweep", help="OP over a 1-D or 2-D parameter grid")
    common(sp)
    sp.add_argument("--method", choices=sorted(METHOD_ALIASES), help="overrides the config's methods")
    mc_opts(sp)

    sp = sub.add_parser("validate", help="closed form vs. quadrature vs. Monte-Carlo report")
    common(sp)
    sp.add_argument("--tolerance", type=float, default=0.01, help="relative closed-form tolerance")
    sp.add_argument("--no-literal", action="store_true",
                    help="skip the factor-by-factor closed-form evaluation")
    mc_opts(sp)

    sp = sub.add_parser("absorption", help="absorption coefficient vs. frequency table")
    common(sp, config_required=False)
    sp.add_argument("--start", type=float, default=BAND[0], help="Hz")
    sp.add_argument("--stop", type=float, default=BAND[1], help="Hz")
    sp.add_argument("--points", type=int, default=151)
    return p


def _mc_from(args, resolved: dict) -> McConfig:
    mc = dict(resolved["monte_carlo"])
    for key in ("trials", "seed", "chunks"):
        if getattr(args, key, None) is not None:
            mc[key] = getattr(args, key)
    resolved["monte_carlo"] = mc
    return McConfig(**mc)


def _write_sidecar(out: Path, resolved: dict) -> None:
    side = out.with_name(out.name + ".resolved.json")
    side.write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _cmd_point(args) -> int:
    methods = METHOD_ALIASES[args.method]
    obj, resolved = load_config(args.config, methods=methods)
    if isinstance(obj, SweepSpec):
        raise ConfigError("point: config has a [sweep] table; use the sweep command")
    mc = _mc_from(args, resolved)
    row = evaluate_point(obj, methods, mc)
    header = [f"op_{m.value}" for m in methods]
    if Method.MONTE_CARLO in methods:
        header.append("stderr_monte_carlo")
    header.append("diagnostics")
    if args.out:
        write_csv(args.out, header, [row])
        _write_sidecar(args.out, resolved)
    for h in header:
        v = row.get(h)
        print(f"{h}: {format_float(v) if isinstance(v, float) else v}")
    return 0


def _as_sweep(obj, mc: McConfig, command: str) -> SweepSpec:
    if not isinstance(obj, SweepSpec):
        raise ConfigError(f"{command}: config needs a [sweep] table with at least axis1")
    return dataclasses.replace(obj, mc=mc)


def _cmd_sweep(args) -> int:
    methods = METHOD_ALIASES[args.method] if args.method else None
    obj, resolved = load_config(args.config, methods=methods)
    spec = _as_sweep(obj, _mc_from(args, resolved), "sweep")
    rows = run_sweep(spec, args.out, jobs=args.jobs)
    if args.out:
        _write_sidecar(args.out, resolved)
        log.info("wrote %d rows to %s", len(rows), args.out)
    else:
        write_csv("-", sweep_header(spec), rows)
    return 0


def _cmd_validate(args) -> int:
    obj, resolved = load_config(args.config, methods=[m.value for m in METHOD_ALIASES["all"]])
    spec = _as_sweep(obj, _mc_from(args, resolved), "validate")
    report = validate(spec, tolerance=args.tolerance, jobs=args.jobs, literal=not args.no_literal)
    if args.out:
        report.write(args.out)
        _write_sidecar(args.out, resolved)
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_absorption(args) -> int:
    resolved = resolve({} if args.config is None else load_raw(args.config))
    env = build_scenario(resolved).environment
    rows = absorption_table(env, args.start, args.stop, args.points)
    header = ["frequency", "beta", "u1", "u2", "u3", "beta_printed", "in_band"]
    if args.out:
        write_csv(args.out, header, rows)
        resolved["absorption"] = {"start": args.start, "stop": args.stop, "points": args.points}
        _write_sidecar(args.out, resolved)
    else:
        write_csv("-", header, rows)
    return 0


COMMANDS = {"point": _cmd_point, "sweep": _cmd_sweep, "validate": _cmd_validate, "absorption": _cmd_absorption}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
