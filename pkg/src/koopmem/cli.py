"""Command-line interface: generate / forecast / compare."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .forecast import ForecastConfig, run
from .memory import MemoryBank
from .metrics import absolute_errors, improvement
from .report import (config_as_dict, render_compare_figures, summarize_run,
                     write_compare_csv, write_records_csv, write_summary_json)
from .series import IngestError, gen_piecewise_exponential, load_csv, write_csv

# Presets encoding the hyperparameters used for each dataset family.
PROFILES = {
    "synthetic": dict(omega=5, delta=5, n_delays=1, eps_lambda=0.05,
                      eps_v=0.10, rescale_enabled=True),
    "flu": dict(omega=3, delta=1, n_delays=4, eps_lambda=0.05,
                eps_v=0.25, rescale_enabled=False),
    "bike": dict(omega=3, delta=1, n_delays=1, eps_lambda=0.1,
                 eps_v=0.2, rescale_enabled=False),
}

_CONFIG_KEYS = ("mode", "omega", "delta", "n_delays", "eps_lambda", "eps_v",
                "n_rbf", "n_keep", "capacity", "rescale_enabled")


def _parse_config_file(path) -> dict:
    """key = value lines; # starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if value.lower() in ("true", "false"):
            out[key] = value.lower() == "true"
        else:
            try:
                out[key] = int(value)
            except ValueError:
                out[key] = float(value)
    return out


def _build_config(args) -> ForecastConfig:
    settings: dict = {}
    if args.profile:
        settings.update(PROFILES[args.profile])
    if args.config:
        settings.update(_parse_config_file(args.config))
    flag_map = {
        "mode": args.mode, "omega": args.omega, "delta": args.delta,
        "n_delays": args.delays, "eps_lambda": args.eps_lambda,
        "eps_v": args.eps_v, "n_rbf": args.n_rbf, "n_keep": args.n_keep,
        "capacity": args.capacity, "rescale_enabled": args.rescale,
    }
    settings.update({k: v for k, v in flag_map.items() if v is not None})
    return ForecastConfig(**settings)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(outdir: Path, config, input_path, seed, outputs):
    manifest = {
        "tool": "koopmem",
        "version": __version__,
        "seed": seed,
        "config": config_as_dict(config),
        "input": {"path": str(input_path), "sha256": _sha256(input_path)},
        "outputs": sorted(str(p) for p in outputs),
    }
    path = outdir / "manifest.json"
    write_summary_json(path, manifest)
    return path


def _load_input(args):
    column = args.column
    if column is not None and column.isdigit():
        column = int(column)
    return load_csv(args.input, column=column if column is not None else 0,
                    delimiter=args.delimiter, interpolate=args.interpolate)


def _add_forecast_flags(p):
    p.add_argument("-i", "--input", required=True, help="input CSV path")
    p.add_argument("-o", "--output-dir", default=".", help="directory for outputs")
    p.add_argument("--column", default=None,
                   help="CSV column name or index (default: first column)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--interpolate", action="store_true",
                   help="linearly interpolate interior missing values")
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--omega", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--delays", type=int)
    p.add_argument("--eps-lambda", type=float)
    p.add_argument("--eps-v", type=float)
    p.add_argument("--n-rbf", type=int)
    p.add_argument("--n-keep", type=int)
    p.add_argument("--capacity", type=int)
    p.add_argument("--rescale", action=argparse.BooleanOptionalAction,
                   default=None, help="rescale recalled predictions by window anchors")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in the manifest; forecasting itself is deterministic")
    p.add_argument("--bank-snapshot", action="store_true",
                   help="also write the memory bank as JSON lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koopmem",
        description="Sliding EDMD forecasting with episodic memory of "
                    "Koopman spectral signatures.")
    parser.add_argument("--version", action="version",
                        version=f"koopmem {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic piecewise "
                                        "exponential series as CSV")
    g.add_argument("--steps", type=int, required=True)
    g.add_argument("--switch", type=int, default=10,
                   help="steps between regime resamplings")
    g.add_argument("--eta", type=float, default=0.01, help="noise magnitude")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)

    f = sub.add_parser("forecast", help="run one forecasting mode over a CSV")
    _add_forecast_flags(f)
    f.add_argument("--mode", choices=["sliding", "memory"])

    c = sub.add_parser("compare", help="run sliding and memory modes and "
                                       "report the improvement")
    _add_forecast_flags(c)
    c.add_argument("--plots", action=argparse.BooleanOptionalAction,
                   default=True, help="render comparison figures")
    c.set_defaults(mode=None)
    return parser


def cmd_generate(args, parser) -> int:
    if args.steps < 1:
        parser.error("--steps must be >= 1")
    if args.switch < 1:
        parser.error("--switch must be >= 1")
    if args.eta < 0:
        parser.error("--eta must be >= 0")
    series, labels = gen_piecewise_exponential(
        args.steps, switch_period=args.switch, eta=args.eta, seed=args.seed)
    write_csv(args.output, series, labels=labels)
    print(f"wrote {args.steps} rows to {args.output}")
    return 0


def cmd_forecast(args, parser) -> int:
    try:
        config = _build_config(args)
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    series = _load_input(args)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    bank = MemoryBank(capacity=config.capacity)
    records = run(config, series, bank=bank)
    outputs = []
    csv_path = outdir / "predictions.csv"
    write_records_csv(csv_path, records, series.values)
    outputs.append(csv_path)
    summary = summarize_run(config, records, series.values)
    summary["seed"] = args.seed
    summary_path = outdir / "summary.json"
    write_summary_json(summary_path, summary)
    outputs.append(summary_path)
    if args.bank_snapshot:
        bank_path = outdir / "bank.jsonl"
        bank.to_jsonl(bank_path)
        outputs.append(bank_path)
    manifest = _write_manifest(outdir, config, args.input, args.seed, outputs)
    print(f"wrote {len(records)} predictions; "
          f"median relative error {summary['median_rel_error_pct']:.2f}% "
          f"({csv_path}, {summary_path}, {manifest})")
    return 0


def cmd_compare(args, parser) -> int:
    try:
        base = _build_config(args)
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    series = _load_input(args)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    import dataclasses
    cfg_sliding = dataclasses.replace(base, mode="sliding")
    cfg_memory = dataclasses.replace(base, mode="memory")
    bank = MemoryBank(capacity=base.capacity)
    recs_sliding = run(cfg_sliding, series)
    recs_memory = run(cfg_memory, series, bank=bank)

    outputs = []
    for name, recs in (("predictions_sliding.csv", recs_sliding),
                       ("predictions_memory.csv", recs_memory)):
        path = outdir / name
        write_records_csv(path, recs, series.values)
        outputs.append(path)
    compare_csv = outdir / "compare.csv"
    write_compare_csv(compare_csv, recs_sliding, recs_memory, series.values)
    outputs.append(compare_csv)

    err_sliding = absolute_errors(series.values, recs_sliding)
    err_memory = absolute_errors(series.values, recs_memory)
    report = {
        "config": config_as_dict(cfg_memory),
        "seed": args.seed,
        "improvement_pct": improvement(err_sliding, err_memory),
        "sliding": summarize_run(cfg_sliding, recs_sliding, series.values),
        "memory": summarize_run(cfg_memory, recs_memory, series.values),
    }
    report_path = outdir / "compare.json"
    write_summary_json(report_path, report)
    outputs.append(report_path)
    if args.bank_snapshot:
        bank_path = outdir / "bank.jsonl"
        bank.to_jsonl(bank_path)
        outputs.append(bank_path)
    if args.plots:
        outputs.extend(render_compare_figures(outdir, recs_sliding,
                                              recs_memory, series.values))
    manifest = _write_manifest(outdir, cfg_memory, args.input, args.seed,
                               outputs)
    imp = report["improvement_pct"]
    imp_str = f"{imp:.1f}%" if imp == imp and abs(imp) != float("inf") else str(imp)
    print(f"improvement {imp_str}; match rate "
          f"{report['memory']['match_rate']:.3f} ({report_path}, {manifest})")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args, parser)
        if args.command == "forecast":
            return cmd_forecast(args, parser)
        return cmd_compare(args, parser)
    except (IngestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
