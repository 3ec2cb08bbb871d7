"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or solver error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bifurcation as bf
from . import potential as pc
from .errors import DomainError, RosetteError
from .oracle import check_central
from .rootfind import find_folds

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

SUITES = ("all", "lemmas", "theorem2", "n2", "n3")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    epsilon: float | None = None
    mu: float | None = None
    grids: dict = field(default_factory=dict)
    output_format: str = "csv"
    output_path: str | None = None


def _num(v):
    """Shortest round-trip text for floats; plain ints; NaN as 'nan'."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render_json(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    records = [dict(zip(columns, _jsonable(list(r)))) for r in rows]
    return json.dumps(records, indent=1) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _table(cfg: RunConfig, columns, rows) -> None:
    render = render_json if cfg.output_format == "json" else render_csv
    _emit(render(columns, rows), cfg.output_path)


def _params(cfg: RunConfig) -> pc.RosetteParams:
    try:
        return pc.RosetteParams(cfg.n, cfg.epsilon, cfg.mu)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_roots(cfg: RunConfig) -> int:
    params = _params(cfg)
    result = bf.count_configurations(params, cells=cfg.grids.get("cells", 2048))
    rows = []
    for r in result.roots:
        rows.append((r.x, r.interval_tag, r.residual, check_central(r.x, params).max_relative_residual))
    _table(cfg, ["x", "interval_tag", "residual", "oracle_residual"], rows)
    print(f"# {result.count} configuration(s) for n={params.n} epsilon={params.epsilon!r} mu={params.mu!r}",
          file=sys.stderr)
    return EXIT_OK


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise UsageError(f"--epsilon-grid must be lo:hi:count, got {text!r}") from exc
    if not (0 < lo < hi <= 1) or count < 1:
        raise UsageError("--epsilon-grid needs 0 < lo < hi <= 1 and count >= 1")
    return np.linspace(lo, hi, count)


def cmd_fold(cfg: RunConfig) -> int:
    n = cfg.n
    if n is None or n < 3:
        raise UsageError("fold needs --n >= 3")
    columns = ["epsilon", "mu0", "x_star", "status"]
    if cfg.grids.get("epsilon_grid") is not None:
        points = bf.bifurcation_curve(n, _parse_grid(cfg.grids["epsilon_grid"]))
        rows = [(p.epsilon, p.mu0, p.x_star, p.status) for p in points]
    else:
        eps = cfg.epsilon
        if eps is None or not 0 < eps <= 1:
            raise UsageError("fold needs 0 < --epsilon <= 1 (or --epsilon-grid)")
        rows = [
            (fp.epsilon, fp.mu0, fp.x_star, fp.kind)
            for fp in find_folds(eps, n, (0.0, 1.0))
        ]
    _table(cfg, columns, rows)
    return EXIT_OK


def cmd_figure(cfg: RunConfig, figure_id: str) -> int:
    columns, rows = bf.figure_data(figure_id)
    _table(cfg, columns, rows)
    return EXIT_OK


def run_suite(suite: str) -> list[bf.LemmaReport]:
    reports = []
    if suite in ("all", "lemmas"):
        reports.append(bf.verify_pole_coefficient())
        reports.append(bf.verify_polygon_lower_bound())
        reports.append(bf.verify_lemma_main(4, 106)[0])
        reports.append(bf.verify_lemma_main(107, 107)[0])
        reports.append(bf.verify_h3_positive())
    if suite in ("all", "theorem2"):
        reports.append(bf.verify_theorem2())
    if suite in ("all", "n2"):
        reports.append(bf.verify_n2_unique())
    if suite in ("all", "n3"):
        reports.append(bf.verify_n3_thresholds())
        reports.append(bf.verify_n3_monotone_above_one())
    return reports


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    reports = run_suite(suite)
    for r in reports:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark} {r.lemma_id} n={r.n_range} margin={r.worst_margin:.6g} at {r.worst_location}",
              file=sys.stderr)
    if cfg.output_format == "csv":
        rows = [(r.lemma_id, r.n_range[0], r.n_range[1], r.passed, r.worst_margin, r.worst_location)
                for r in reports]
        _emit(render_csv(["lemma_id", "n_lo", "n_hi", "pass", "worst_margin", "worst_location"], rows),
              cfg.output_path)
    else:
        _emit(json.dumps(_jsonable([r.to_dict() for r in reports]), indent=1) + "\n", cfg.output_path)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rosette", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def out(p, default="csv"):
        p.add_argument("--format", choices=("csv", "json"), default=default, dest="output_format")
        p.add_argument("--output", "-o", default=None, dest="output_path")

    p = sub.add_parser("roots", help="list the central configurations for (n, epsilon, mu)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--cells", type=int, default=2048, help="initial bracketing cells on (0, 1)")
    out(p)

    p = sub.add_parser("fold", help="fold points of mu = h(x, epsilon) on (0, 1)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--epsilon-grid", default=None, help="lo:hi:count")
    out(p)

    p = sub.add_parser("figure", help="emit figure data")
    p.add_argument("figure_id", choices=bf.FIGURES)
    out(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    out(p, default="json")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        n=getattr(args, "n", None),
        epsilon=getattr(args, "epsilon", None),
        mu=getattr(args, "mu", None),
        grids={"cells": getattr(args, "cells", 2048), "epsilon_grid": getattr(args, "epsilon_grid", None)},
        output_format=args.output_format,
        output_path=args.output_path,
    )
    try:
        if cfg.command == "roots":
            return cmd_roots(cfg)
        if cfg.command == "fold":
            return cmd_fold(cfg)
        if cfg.command == "figure":
            return cmd_figure(cfg, args.figure_id)
        return cmd_verify(cfg, args.suite)
    except UsageError as exc:
        print(f"rosette {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RosetteError as exc:
        print(f"rosette {cfg.command}: solver error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rosette {cfg.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
