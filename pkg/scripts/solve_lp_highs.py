"""Solve an exported LP file with HiGHS (via scipy) and write a solution file.

    nnroute export-lp --qft 4 -o qft4.lp
    python scripts/solve_lp_highs.py qft4.lp -o qft4.sol
    nnroute verify --qft 4 --solution qft4.sol --budget 3

Stands in for any external MILP solver: it only sees the LP text.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

from nnroute.ilp import CONTINUOUS, format_solution, parse_lp


def solve_lp_text(text: str, time_limit: float | None = None) -> tuple[float, dict[str, float]]:
    model = parse_lp(text)
    names = [v.name for v in model.variables]
    col = {name: i for i, name in enumerate(names)}

    c = np.zeros(len(names))
    for name, coef in model.objective:
        c[col[name]] += coef

    a = lil_matrix((len(model.constraints), len(names)))
    lo = np.full(len(model.constraints), -np.inf)
    hi = np.full(len(model.constraints), np.inf)
    for r, row in enumerate(model.constraints):
        for name, coef in row.terms:
            a[r, col[name]] += coef
        if row.sense in ("<=", "="):
            hi[r] = row.rhs
        if row.sense in (">=", "="):
            lo[r] = row.rhs

    integrality = np.array([v.integrality != CONTINUOUS for v in model.variables], dtype=int)
    bounds = Bounds([v.lower for v in model.variables], [v.upper for v in model.variables])
    options = {"time_limit": time_limit} if time_limit else {}
    res = milp(c, constraints=LinearConstraint(a.tocsr(), lo, hi), integrality=integrality,
               bounds=bounds, options=options)
    if res.x is None:
        raise RuntimeError(f"HiGHS found no solution: {res.message}")
    return float(res.fun), dict(zip(names, (float(v) for v in res.x)))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("lp")
    parser.add_argument("-o", "--output")
    parser.add_argument("--time-limit", type=float)
    args = parser.parse_args(argv)

    start = time.perf_counter()
    objective, values = solve_lp_text(Path(args.lp).read_text(), args.time_limit)
    text = f"# objective {objective:g}\n" + format_solution(values)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"objective {objective:g} in {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
