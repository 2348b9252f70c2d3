"""Re-run the published optimal SWAP counts that fit on a desktop.

    python scripts/reproduce_tables.py --max-n 8 --out results/
    NNROUTE_FIXTURES=~/revlib python scripts/reproduce_tables.py --suite all

QFT rows need nothing; the RevLib rows need the fixture files.
"""
import argparse
import logging
from pathlib import Path

from nnroute.bench import run_bench


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--suite", choices=["qft", "fixtures", "all"], default="qft")
    parser.add_argument("--fixtures")
    parser.add_argument("--max-n", type=int, default=8)
    parser.add_argument("--time-limit", type=float, default=None, help="per instance, seconds")
    parser.add_argument("--out", default="results")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING)

    report = run_bench(args.suite, "exact", fixtures=args.fixtures, max_n=args.max_n,
                       time_limit=args.time_limit)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tables.md").write_text(report.to_markdown())
    (out / "tables.json").write_text(report.to_json() + "\n")
    print(report.to_markdown())
    return 1 if report.failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
