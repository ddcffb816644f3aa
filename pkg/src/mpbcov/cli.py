"""Command-line front end.

Exit codes: 0 success, 2 a checked criterion failed, 1 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analytic
from .config import ConfigError, ExperimentConfig, load_config, resolve_seed
from .experiments import ExperimentReport, run_experiment
from .geometry import ShapeSpec

EXPERIMENT_COMMANDS = ("vacancy", "clt", "bounds", "critical-radius", "path")
EVALS = (
    "expected-vacancy",
    "vacancy-limit",
    "sigma2-limit",
    "coverage-bounds",
    "critical-radius",
    "expected-vt",
    "variance-vt",
    "sigma1-sq",
    "sigma2-sq",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- serialisation ------------------------------------------------------------------


def header_line(config_hash: str, seed: int) -> str:
    return f"# config-hash={config_hash} seed={seed}\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def report_json(report: ExperimentReport) -> str:
    body = json.dumps(_plain(report.to_dict()), sort_keys=True, indent=2)
    return header_line(report.config_hash, report.seed) + body + "\n"


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def rows_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write(header_line(report.config_hash, report.seed))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for row in report.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def read_report(path: str | Path) -> dict:
    """Parse a report.json written by this tool (skips the ``#`` header line)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return json.loads("\n".join(l for l in lines if not l.startswith("#")))


def write_outputs(report: ExperimentReport, out: Path, fmt: str) -> dict[str, str]:
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    if fmt in ("json", "both"):
        files["report.json"] = report_json(report)
    if fmt in ("csv", "both"):
        files["rows.csv"] = rows_csv(report)
    hashes = {}
    for name, text in files.items():
        data = text.encode("utf-8")
        (out / name).write_bytes(data)
        hashes[name] = hashlib.sha256(data).hexdigest()
    return hashes


# --- argument parsing ------------------------------------------------------------------


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="experiment config file (INI, see docs/config.md)")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="master seed; overrides MPB_SEED and the config")
    p.add_argument("--workers", type=int, default=1, help="worker processes; never changes output bytes")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpbcov", description="Coverage of Poisson-Boolean sensor fields: analytic values and Monte-Carlo checks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analytic", help="evaluate one closed-form quantity")
    a.add_argument("--eval", required=True, choices=EVALS)
    a.add_argument("--lambda-beta", type=float, help="mean number of shapes over a point")
    a.add_argument("--k", type=int, default=1)
    a.add_argument("--volume", type=float, default=1.0)
    a.add_argument("--rho", type=float)
    a.add_argument("--beta", type=float)
    a.add_argument("--lambda", dest="lam", type=float)
    a.add_argument("--r", type=float, help="disc radius")
    a.add_argument("--dim", type=int, default=2)
    a.add_argument("--n", type=float)
    a.add_argument("--c-n", type=float, default=0.0, help="threshold offset c(n)")
    a.add_argument("--T", type=float, default=1.0)
    a.add_argument("--speed", type=float, default=1.0)
    a.add_argument("--mu0", type=float)
    a.add_argument("--mu1", type=float)
    a.add_argument("--p1", type=float)
    a.add_argument("--a0", type=float)

    for name in EXPERIMENT_COMMANDS:
        _add_run_options(sub.add_parser(name, help=f"run the {name} experiment"))
    sub.add_parser("selftest", help="run the quick structural checks")
    return parser


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"--eval {args.eval} needs {flags}")


def evaluate(args) -> str:
    e = args.eval
    if e == "expected-vacancy":
        _need(args, "lambda_beta")
        return repr(args.volume * analytic.vacancy_fraction(args.lambda_beta, args.k))
    if e == "vacancy-limit":
        _need(args, "rho", "beta")
        return repr(analytic.vacancy_limit(args.rho, args.beta, args.k, args.volume))
    if e == "sigma2-limit":
        _need(args, "rho", "r")
        return repr(analytic.sigma2_limit(args.rho, ShapeSpec.disc(args.r, args.dim), args.k, args.volume))
    if e == "coverage-bounds":
        _need(args, "lam", "r")
        b = analytic.coverage_bounds(args.lam, args.r, args.k)
        return json.dumps({"lower": b.lower, "upper": b.upper, "upper_clamped": b.upper_clamped, "theta": b.theta})
    if e == "critical-radius":
        _need(args, "n")
        return repr(math.sqrt(analytic.critical_radius_sq(args.n, args.k, args.c_n)))
    if e == "expected-vt":
        _need(args, "lam", "r", "mu0", "mu1")
        p1 = analytic.stationary_on(args.mu0, args.mu1)
        shape = ShapeSpec.disc(args.r, args.dim)
        return repr(analytic.expected_vt_k(args.T, args.lam, p1, shape.beta, args.k))
    if e == "variance-vt":
        _need(args, "lam", "r", "mu0", "mu1")
        return repr(analytic.variance_vt(args.T, args.lam, ShapeSpec.disc(args.r, args.dim), args.speed, args.mu0, args.mu1))
    if e == "sigma1-sq":
        _need(args, "a0", "rho", "r", "p1")
        return repr(analytic.sigma1_sq(args.a0, args.T, args.rho, ShapeSpec.disc(args.r, args.dim), args.speed, args.p1))
    _need(args, "lam", "r", "mu0", "mu1")
    return repr(analytic.sigma2_sq(args.lam, ShapeSpec.disc(args.r, args.dim), args.speed, args.mu0, args.mu1))


def _run_experiment(args, out_stream) -> int:
    config: ExperimentConfig = load_config(args.config)
    if config.kind != args.command:
        raise ConfigError(f"{args.config}: kind = {config.kind} does not match subcommand {args.command}")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    seed = resolve_seed(args.seed, dict(os.environ), config)
    print(f"seed={seed} config-hash={config.config_hash()}", file=out_stream)
    start = time.perf_counter()
    report = run_experiment(config, seed, args.workers)
    wall = time.perf_counter() - start
    out = Path(args.out)
    hashes = write_outputs(report, out, args.format)
    manifest = {
        "subcommand": args.command,
        "config_path": str(args.config),
        "seed": seed,
        "output_dir": str(out),
        "workers": args.workers,
        "files": hashes,
        "wall_time_seconds": wall,
    }
    (out / "manifest.json").write_text(
        header_line(report.config_hash, seed) + json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    for c in report.criteria:
        print(c.line(), file=out_stream)
    for note in report.notes:
        print(f"note: {note}", file=out_stream)
    verdict = "all criteria passed" if report.passed else "some criteria FAILED"
    print(f"{verdict}; wrote {', '.join(sorted(hashes))} to {out}", file=out_stream)
    return 0 if report.passed else 2


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.command == "analytic":
            print(evaluate(args))
            return 0
        if args.command == "selftest":
            from .selftest import run_selftest

            results = run_selftest()
            for name, ok, detail in results:
                print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
            return 0 if all(ok for _, ok, _ in results) else 2
        return _run_experiment(args, sys.stdout)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
