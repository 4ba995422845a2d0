"""
Command-line front end::

    gridgrow predict  GRID [--catalog FILE]
    gridgrow count    GRID --n N
    gridgrow verify   GRID --n N [--band LO HI]
    gridgrow optimize GRID [--iters K] [--seed S]
    gridgrow sample   GRID --n N --seed S

Reports are JSON (default) or CSV on stdout.  Exit status: 0 success,
2 a verification check failed, 64 usage error, 65 unparsable input,
69 a brute-force or memory cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .grid import (GridError, argmax_weight_matrix, cell_count_tables, count_gridded_total,
                   count_ungridded, parse_grid, sample_gridded, ungridded_cap)
from .perms import ResourceCapError
from .spectral import load_catalog, predict_growth_rate
from .variational import f_eval, lagrange_residual, simplex_search

EX_OK, EX_VERIFY, EX_USAGE, EX_DATAERR, EX_UNAVAILABLE = 0, 2, 64, 65, 69


class UsageError(Exception):
    pass


class InputError(Exception):
    """The grid or catalog file could not be parsed."""


@dataclass
class RunConfig:
    command: str
    grid_path: str
    n: int | None = None
    seed: int | None = None
    tol: float = 1e-12
    cap: int | None = None
    catalog_path: str | None = None
    output: str = "json"
    threads: int = 1
    iters: int = 100_000
    band: tuple[float, float] | None = None

    def __post_init__(self):
        if self.command in ("count", "verify", "sample") and self.n is None:
            raise UsageError(f"{self.command} requires --n")
        if self.command == "sample" and self.seed is None:
            raise UsageError("sample requires --seed")
        if self.n is not None and self.n < 0:
            raise UsageError("--n must be nonnegative")
        if self.threads < 1:
            raise UsageError("--threads must be positive")


def _encode(obj) -> str:
    # fixed key order and 17 significant digits, so equal runs give equal bytes
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else
                             "" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def _load_grid(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        return parse_grid(text)
    except GridError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_catalog(path):
    try:
        return load_catalog(path)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except GridError as exc:
        raise InputError(f"{path}: {exc}") from None


def _count_rows(grid, N: int, cap: int) -> list[dict]:
    tables = cell_count_tables(grid, N)
    rows = []
    for n in range(N + 1):
        gridded = count_gridded_total(grid, n, tables)
        ungridded = count_ungridded(grid, n, cap) if n <= cap else None
        rows.append({"n": n, "gridded": str(gridded),
                     "ungridded": None if ungridded is None else str(ungridded)})
    return rows


def cmd_predict(cfg: RunConfig):
    grid = _load_grid(cfg.grid_path)
    pred = predict_growth_rate(grid, _load_catalog(cfg.catalog_path), tol=cfg.tol)
    return pred.to_dict(), EX_OK


def cmd_count(cfg: RunConfig):
    grid = _load_grid(cfg.grid_path)
    cap = ungridded_cap() if cfg.cap is None else cfg.cap
    return _count_rows(grid, cfg.n, cap), EX_OK


def cmd_verify(cfg: RunConfig):
    grid = _load_grid(cfg.grid_path)
    cap = ungridded_cap() if cfg.cap is None else cfg.cap
    pred = predict_growth_rate(grid, _load_catalog(cfg.catalog_path), tol=cfg.tol)
    rows = _count_rows(grid, cfg.n, cap)
    t, u = grid.shape
    ok = True
    table = []
    prev = None
    for row in rows:
        n, g = row["n"], int(row["gridded"])
        entry = {"n": n, "gridded": row["gridded"], "ungridded": row["ungridded"],
                 "sandwich": None, "ratio": None}
        if row["ungridded"] is not None:
            ug = int(row["ungridded"])
            holds = ug <= g <= (n + 1) ** (t + u) * ug
            entry["sandwich"] = holds
            ok &= holds
        if prev:
            entry["ratio"] = g / prev
        prev = g
        table.append(entry)
    final_ratio = table[-1]["ratio"]
    band_ok = None
    if cfg.band is not None and final_ratio is not None:
        band_ok = cfg.band[0] <= final_ratio <= cfg.band[1]
        ok &= band_ok
    report = {
        "s_squared": pred.gr,
        "final_ratio": final_ratio,
        "relative_gap": None if final_ratio is None else (pred.gr - final_ratio) / pred.gr,
        "band": None if cfg.band is None else list(cfg.band),
        "band_ok": band_ok,
        "ok": ok,
        "table": table,
    }
    return report, EX_OK if ok else EX_VERIFY


def cmd_optimize(cfg: RunConfig):
    grid = _load_grid(cfg.grid_path)
    pred = predict_growth_rate(grid, _load_catalog(cfg.catalog_path), tol=cfg.tol)
    search = simplex_search(pred.gamma, cfg.iters, 0 if cfg.seed is None else cfg.seed)
    return {
        "s_squared": pred.gr,
        "f_blueprint": f_eval(pred.gamma, pred.X),
        "lagrange_residual": lagrange_residual(pred.gamma, pred.X),
        "search_best": search.f,
        "search_gap": pred.gr - search.f,
    }, EX_OK


def cmd_sample(cfg: RunConfig):
    grid = _load_grid(cfg.grid_path)
    A, count = argmax_weight_matrix(grid, cfg.n)
    g = sample_gridded(grid, A, cfg.seed)
    report = g.to_dict()
    report["weight_matrix"] = [list(col) for col in A.entries]
    report["class_size"] = str(count)
    return report, EX_OK


COMMANDS = {"predict": cmd_predict, "count": cmd_count, "verify": cmd_verify,
            "optimize": cmd_optimize, "sample": cmd_sample}


def run(cfg: RunConfig, out=None) -> int:
    """Execute one command and write its report; returns the exit status."""
    out = sys.stdout if out is None else out
    report, status = COMMANDS[cfg.command](cfg)
    if cfg.output == "csv":
        rows = report["table"] if isinstance(report, dict) and "table" in report else report
        if isinstance(rows, dict):
            rows = [{"key": k, "value": dumps(v)} for k, v in rows.items()]
        out.write(_csv(rows))
    else:
        out.write(dumps(report) + "\n")
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridgrow", description="Growth rates of permutation grid classes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("grid_path", metavar="GRID")
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--cap", type=int, help="brute-force length cap (default: $GRIDGROW_CAP_N or 7)")
        p.add_argument("--catalog", dest="catalog_path")
        p.add_argument("--output", choices=("json", "csv"), default="json")
        p.add_argument("--threads", type=int, default=1)
        if name == "optimize":
            p.add_argument("--iters", type=int, default=100_000)
        if name == "verify":
            p.add_argument("--band", type=float, nargs=2, metavar=("LO", "HI"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(**{k: v for k, v in vars(args).items() if v is not None or k == "n"})
        return run(cfg)
    except UsageError as exc:
        print(f"gridgrow: {exc}", file=sys.stderr)
        return EX_USAGE
    except InputError as exc:
        print(f"gridgrow: parse error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except ResourceCapError as exc:
        print(f"gridgrow: {exc}", file=sys.stderr)
        return EX_UNAVAILABLE
    except GridError as exc:
        print(f"gridgrow: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
