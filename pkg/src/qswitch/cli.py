"""Command-line harness: ``qswitch {activate,paths,nogo,classify,sweep}``.

Every command prints (or writes with ``--out``) a JSON report and exits 0 when all
checks pass, 1 when some check failed and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import experiments as ex
from .linalg import KET0, KET1, KET_MINUS, KET_PLUS, ContractError, DimensionError
from .optimize import OptimizerConfig
from .serialize import SchemaError, channel_from_json, decode_complex_array, dumps, path_config_from_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

OMEGA_LABELS = {"+": KET_PLUS, "-": KET_MINUS, "0": KET0, "1": KET1}


class UsageError(Exception):
    pass


def parse_p(text: str):
    """Comma-separated Pauli weights; ``a/b`` entries stay exact."""
    try:
        vals = [Fraction(s.strip()) if "/" in s else float(s) for s in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse --p {text!r}: {exc}") from exc
    if len(vals) != 4:
        raise UsageError(f"--p needs 4 comma-separated weights, got {len(vals)}")
    return tuple(vals)


def parse_omega(text: str) -> np.ndarray:
    """A label (``+ - 0 1``), or JSON ``[[re, im], ...]`` for a vector / nested for a matrix."""
    if text in OMEGA_LABELS:
        return OMEGA_LABELS[text]
    try:
        data = json.loads(text)
        arr = np.asarray(data, dtype=float)
        return decode_complex_array(data, arr.ndim - 1)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse --omega {text!r}") from exc


def parse_dims(text: str) -> list[int]:
    try:
        dims = [int(s) for s in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse --d {text!r}") from exc
    if any(d < 2 or d > 4 for d in dims):
        raise UsageError("--d entries must lie in 2..4")
    return dims


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def cmd_activate(args, tol):
    p = parse_p(args.p)
    omega = parse_omega(args.omega)
    cfg = OptimizerConfig(seed=args.seed)
    inputs = {"p": [str(v) if isinstance(v, Fraction) else v for v in p], "omega": args.omega}
    res, ok = ex.activation(p, omega, tol, cfg)
    return inputs, res, ok


def cmd_paths(args, tol):
    if args.config:
        cfg = path_config_from_json(load_json(args.config))
        inputs = {"config": args.config}
    else:
        try:
            cfg = ex.path_preset(args.preset)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from exc
        inputs = {"preset": args.preset}
    res, ok = ex.paths(cfg)
    return inputs, res, ok


def cmd_nogo(args, tol):
    dims = parse_dims(args.d)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    cfg = replace(ex.NOGO_OPTIMIZER, seed=args.seed)
    res, ok = ex.nogo(args.trials, dims, args.seed, tol, cfg)
    if not args.samples:
        res.pop("samples")
    return {"trials": args.trials, "d": dims}, res, ok


def cmd_classify(args, tol):
    if not args.channel:
        raise UsageError("classify needs --channel FILE")
    ch = channel_from_json(load_json(args.channel))
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise UsageError("classify needs a qubit channel")
    res, ok = ex.classification(ch, tol)
    return {"channel": args.channel}, res, ok


def cmd_sweep(args, tol):
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    res, rows, ok = ex.sweep(args.grid, tol)
    if args.out:
        try:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=ex.SWEEP_COLUMNS, lineterminator="\n")
                writer.writeheader()
                for r in rows:
                    writer.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in r.items()})
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
        res["csv"] = args.out
    return {"grid": args.grid}, res, ok


COMMANDS = {
    "activate": cmd_activate,
    "paths": cmd_paths,
    "nogo": cmd_nogo,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance-profile", choices=sorted(ex.TOLERANCE_PROFILES), default="default")
    common.add_argument("--out", help="report path (CSV path for sweep)")
    common.add_argument("--timing", action="store_true", help="record wall-clock runtime in the report")

    parser = argparse.ArgumentParser(prog="qswitch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("activate", parents=[common], help="switched Pauli channel activation report")
    p.add_argument("--p", default="0,0.5,0.5,0")
    p.add_argument("--omega", default="+")

    p = sub.add_parser("paths", parents=[common], help="superposition-of-paths rank report")
    p.add_argument("--preset", default="xy2", help=f"one of {', '.join(ex.PATH_PRESETS)}")
    p.add_argument("--config", help="path configuration JSON (overrides --preset)")

    p = sub.add_parser("nogo", parents=[common], help="entanglement-breaking certificates for switched erasure pairs")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--d", default="2,3,4")
    p.add_argument("--samples", action="store_true", help="include per-trial rows")

    p = sub.add_parser("classify", parents=[common], help="canonical form and activation verdict of a qubit channel")
    p.add_argument("--channel", help="channel JSON")

    p = sub.add_parser("sweep", parents=[common], help="grid over the Pauli simplex (CSV)")
    p.add_argument("--grid", type=int, default=6)
    return parser


def run(argv=None) -> tuple[int, str]:
    """Execute a command and return ``(exit_code, report_json)``."""
    args = build_parser().parse_args(argv)
    tol = ex.TOLERANCE_PROFILES[args.tolerance_profile]
    start = time.perf_counter()
    try:
        inputs, results, ok = COMMANDS[args.command](args, tol)
    except (UsageError, SchemaError, ContractError, DimensionError) as exc:
        raise UsageError(str(exc)) from exc
    report = {
        "experiment": args.command,
        "inputs": {**inputs, "tolerance_profile": args.tolerance_profile},
        "results": results,
        "tolerances": tol.as_dict(),
        "pass": bool(ok),
        "seed": args.seed,
        # wall-clock time would break byte-identical reruns, so it is opt-in
        "runtime_ms": round((time.perf_counter() - start) * 1000) if args.timing else None,
    }
    text = dumps(report)
    if args.out and args.command != "sweep":
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    return (EXIT_OK if ok else EXIT_FAIL), text


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except UsageError as exc:
        print(f"qswitch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # argparse reports its own usage errors with status 2
        return int(exc.code or 0)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
