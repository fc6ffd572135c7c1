"""
Command-line interface.

Commands: ``describe``, ``check``, ``covariance``, ``simulate``,
``empirical`` and ``compare``. Exit status is 0 on success, 2 on invalid
input, 3 when the model has no stationary solution.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import check_existence, check_uniqueness
from .covariance import CovarianceError, CovarianceGrid, LagPoint, LagValidityError, covariance_grid, model_covariance
from .hankel import DivergenceError
from .models import ModelError, ModelNotFound, ModelSpec, classify, model_from_dict
from .simulate import GridSpec, NoSolutionError, Realization, SimulationError, compare, empirical_covariance, simulate_model
from .spdg import SPDGError, read_csv, read_spdg, write_csv, write_spdg

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INVALID", "EXIT_NO_SOLUTION"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_SOLUTION = 3


class CLIError(Exception):
    def __init__(self, kind: str, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _load_model(path: Optional[str]) -> ModelSpec:
    if not path:
        raise CLIError("usage", "--model is required")
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CLIError("io", f"cannot read model document {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CLIError("parse", f"model document is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(doc, dict):
        raise CLIError("schema", "model document must be a JSON object")
    return model_from_dict(doc)


def _parse_grid(text: Optional[str]) -> tuple:
    if not text:
        raise CLIError("usage", "--grid is required")
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise CLIError("usage", f"--grid expects n1,d1[,n2,d2...], got {text!r}") from exc
    if len(parts) % 2 or not parts:
        raise CLIError("usage", "--grid expects pairs n,spacing")
    sizes = parts[0::2]
    if any(not float(n).is_integer() or n < 2 for n in sizes):
        raise CLIError("usage", "--grid sizes must be integers >= 2")
    return tuple(int(n) for n in sizes), tuple(parts[1::2])


def _parse_lags(text: str, model: ModelSpec) -> list:
    n = model.d + int(model.has_time)
    lags = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            comps = [float(v) for v in chunk.split(",")]
        except ValueError as exc:
            raise CLIError("usage", f"bad lag {chunk!r}") from exc
        if len(comps) != n:
            raise CLIError("usage", f"each lag needs {n} components, got {chunk!r}")
        lags.append(LagPoint(np.array(comps[: model.d]), comps[model.d] if model.has_time else None))
    if not lags:
        raise CLIError("usage", "--lags is empty")
    return lags


def _axis_names(d: int, has_time: bool = False) -> list:
    names = [f"h{i + 1}" for i in range(d)]
    return names + (["u"] if has_time else [])


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return str(v)


# ---------------------------------------------------------------- commands

def cmd_describe(args) -> int:
    model = _load_model(args.model)
    sym = model.symbol
    uniq = check_uniqueness(model, seed=args.seed)
    report = {
        "model": model.snapshot(),
        "symbol": {
            "name": sym.name,
            "isotropic": sym.isotropic,
            "real_valued": sym.real_valued,
            "sceu": sym.sceu,
            "bound": {"const": sym.bound.const, "degree": sym.bound.degree},
            "zero_set": sym.zero_set.kind,
        },
        "unique": uniq.unique,
        "flags": list(model.flags),
        **classify(model, seed=args.seed).to_dict(),
    }
    _emit_text(_json(report), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    model = _load_model(args.model)
    rep = check_existence(model, seed=args.seed)
    _emit_text(_json(rep.to_dict()), args.out)
    return EXIT_NO_SOLUTION if rep.exists is False else EXIT_OK


def _require_exists(model: ModelSpec, seed: int) -> None:
    rep = check_existence(model, seed=seed)
    if rep.exists is False:
        raise CLIError("no_solution", f"no stationary solution for {model.name}: {rep.verdict}", EXIT_NO_SOLUTION)


def cmd_covariance(args) -> int:
    model = _load_model(args.model)
    _require_exists(model, args.seed)
    names = _axis_names(model.d, model.has_time)
    if args.lags:
        lags = _parse_lags(args.lags, model)
        buf = io.StringIO()
        import csv

        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names + ["value", "valid"])
        for lag in lags:
            try:
                value, _ = model_covariance(model, lag, check=False)
                valid = True
            except LagValidityError:
                value, valid = math.nan, False
            comps = list(lag.h) + ([lag.u] if model.has_time else [])
            writer.writerow([repr(float(c)) for c in comps] + [repr(float(value)), "1" if valid else "0"])
        _emit_text(buf.getvalue(), args.out)
        return EXIT_OK
    sizes, spacings = _parse_grid(args.grid)
    grid = covariance_grid(model, sizes, spacings)
    _write_grid(grid, names, args)
    return EXIT_OK


def _write_grid(grid: CovarianceGrid, names, args) -> None:
    if args.format == "spdg":
        if not args.out:
            raise CLIError("usage", "--out is required for spdg output")
        write_spdg(args.out, np.where(grid.valid, grid.values, np.nan), grid.spacing)
        return
    buf = io.StringIO()
    write_csv(buf, grid.axes, grid.values, grid.valid, names)
    _emit_text(buf.getvalue(), args.out)


def _realization_paths(out: str, n: int) -> list:
    if n == 1:
        return [Path(out)]
    p = Path(out)
    return [p.with_name(f"{p.stem}.{i:04d}{p.suffix}") for i in range(n)]


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    if not args.out:
        raise CLIError("usage", "--out is required for simulate")
    if args.format not in (None, "spdg"):
        raise CLIError("usage", "simulate writes spdg only")
    sizes, spacings = _parse_grid(args.grid)
    try:
        reals = simulate_model(model, GridSpec(sizes, spacings), seed=args.seed,
                               n_realizations=args.realizations, workers=args.workers)
    except NoSolutionError as exc:
        raise CLIError("no_solution", str(exc), EXIT_NO_SOLUTION) from exc
    for path, r in zip(_realization_paths(args.out, len(reals)), reals):
        write_spdg(path, r.values, spacings)
    return EXIT_OK


def cmd_empirical(args) -> int:
    if not args.inputs:
        raise CLIError("usage", "empirical needs realization files")
    reals = []
    for i, path in enumerate(args.inputs):
        g = read_spdg(path)
        reals.append(Realization(GridSpec(g.sizes, g.spacings), g.values, 0, i))
    if not args.max_lag:
        raise CLIError("usage", "--max-lag is required")
    try:
        max_lag = [int(v) for v in args.max_lag.split(",")]
    except ValueError as exc:
        raise CLIError("usage", "--max-lag expects integers") from exc
    grid = empirical_covariance(reals, max_lag, ergodic=args.ergodic)
    names = [f"lag{i + 1}" for i in range(len(max_lag))]
    _write_grid(grid, names, args)
    centre = grid.center_index
    metrics = {
        "n_realizations": len(reals),
        "lag0": float(grid.values[centre]),
        "lag0_stderr": None if grid.stderr is None else float(grid.stderr[centre]),
    }
    if args.report:
        Path(args.report).write_text(_json(metrics))
    else:
        sys.stderr.write(_json(metrics))
    return EXIT_OK


def _grid_from_csv(path: str) -> CovarianceGrid:
    try:
        with open(path, newline="") as fh:
            axes, values, valid, _ = read_csv(fh)
    except OSError as exc:
        raise CLIError("io", f"cannot read {path}: {exc.strerror}") from exc
    return CovarianceGrid(axes, values, "closed_form", valid)


def cmd_compare(args) -> int:
    if len(args.inputs) != 2:
        raise CLIError("usage", "compare needs two CSV grids: candidate then reference")
    a, b = (_grid_from_csv(p) for p in args.inputs)
    rep = compare(a, b)
    if args.out:
        buf = io.StringIO()
        write_csv(buf, a.axes, a.values - b.values, a.valid & b.valid, [f"lag{i + 1}" for i in range(len(a.axes))])
        Path(args.out).write_text(buf.getvalue())
    text = _json(rep.to_dict())
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "describe": cmd_describe,
    "check": cmd_check,
    "covariance": cmd_covariance,
    "simulate": cmd_simulate,
    "empirical": cmd_empirical,
    "compare": cmd_compare,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stationary-spde", description="Stationary solutions of linear SPDEs.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("inputs", nargs="*", help="input files for empirical (SPDG) and compare (CSV)")
    parser.add_argument("--model", help="model document (JSON)")
    parser.add_argument("--out", help="output path (stdout when omitted, where possible)")
    parser.add_argument("--report", help="path for the JSON metrics of empirical/compare")
    parser.add_argument("--grid", help="n1,spacing1[,n2,spacing2,...]")
    parser.add_argument("--lags", help="lag points 'h1,..,hd[,u];...' for covariance")
    parser.add_argument("--max-lag", help="per-axis maximal lag index for empirical")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--realizations", type=int, default=1)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--ergodic", action="store_true", help="allow a single realization in empirical")
    parser.add_argument("--format", choices=["csv", "spdg", "json"], default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CLIError as exc:
        return _fail(exc)
    if args.seed < 0 or args.seed >= 2 ** 64:
        return _fail(CLIError("usage", "--seed must be an unsigned 64-bit integer"))
    if args.realizations < 1:
        return _fail(CLIError("usage", "--realizations must be >= 1"))
    try:
        return COMMANDS[args.command](args)
    except CLIError as exc:
        return _fail(exc)
    except ModelNotFound as exc:
        return _fail(CLIError("not_found", str(exc)))
    except (ModelError, CovarianceError, SimulationError, SPDGError, DivergenceError, ValueError) as exc:
        if "no stationary solution" in str(exc):
            return _fail(CLIError("no_solution", str(exc), EXIT_NO_SOLUTION))
        return _fail(CLIError(type(exc).__name__, str(exc)))


def _fail(exc: CLIError) -> int:
    message = " ".join(str(exc).split())
    sys.stderr.write(f"error: {exc.kind}: {message}\n")
    return exc.code


if __name__ == "__main__":
    sys.exit(main())
