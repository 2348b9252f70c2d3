"""Benchmark harness against the published optimal SWAP counts."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .circuit import CircuitFormatError, UnsupportedGateError, generate_qft, load_real
from .solver import MAX_EXACT_N, Mode, SolverConfig, SolverTimeout, solve

FIXTURES_ENV = "NNROUTE_FIXTURES"
DEFAULT_MAX_N = {Mode.EXACT: 7, Mode.BEAM: 10, Mode.GREEDY: 10}


@dataclass(frozen=True)
class BenchRow:
    name: str
    n: int
    m_expected: int
    swaps_expected: int
    source: str  # "qft" or "fixture"
    table: int


def load_rows() -> list[BenchRow]:
    text = resources.files("nnroute").joinpath("data/benchmarks.csv").read_text()
    rows = []
    for rec in csv.DictReader(text.splitlines()):
        name = rec["name"]
        rows.append(BenchRow(
            name, int(rec["n"]), int(rec["gates"]), int(rec["swaps"]),
            "qft" if name.startswith("QFT_") else "fixture", int(rec["table"]),
        ))
    return rows


def row_by_name() -> dict[str, BenchRow]:
    return {r.name: r for r in load_rows()}


@dataclass
class BenchOutcome:
    name: str
    n: int
    m_expected: int
    swaps_expected: int
    mode: str
    status: str
    m_actual: int | None = None
    swaps_actual: int | None = None
    proven_optimal: bool = False
    elapsed: float = 0.0
    gap: float | None = None
    note: str = ""

    @property
    def match(self) -> bool:
        return self.m_actual == self.m_expected and self.swaps_actual == self.swaps_expected


@dataclass
class BenchReport:
    mode: str
    suite: str
    rows: list[BenchOutcome] = field(default_factory=list)

    def summary(self) -> dict:
        counts: dict[str, int] = {}
        for r in self.rows:
            counts[r.status] = counts.get(r.status, 0) + 1
        gaps = [r.gap for r in self.rows if r.gap is not None]
        out = {
            "rows": len(self.rows),
            "status": counts,
            "matches": sum(r.match for r in self.rows),
        }
        if self.mode != Mode.EXACT.value and gaps:
            out["mean_gap"] = sum(gaps) / len(gaps)
            out["max_gap"] = max(gaps)
        return out

    @property
    def failures(self) -> list[BenchOutcome]:
        return [r for r in self.rows if r.status in ("mismatch", "error", "timeout")]

    def to_json(self) -> str:
        rows = [{**asdict(r), "match": r.match} for r in self.rows]
        return json.dumps({"mode": self.mode, "suite": self.suite, "summary": self.summary(),
                           "rows": rows}, indent=2)

    def to_markdown(self) -> str:
        lines = [
            f"## nnroute bench: suite={self.suite} mode={self.mode}",
            "",
            "| benchmark | n | m (table) | m | swaps (table) | swaps | proven | gap | time [s] | status |",
            "|---|---|---|---|---|---|---|---|---|---|",
        ]
        for r in self.rows:
            gap = "" if r.gap is None else f"{100 * r.gap:.1f}%"
            lines.append(
                f"| {r.name} | {r.n} | {r.m_expected} | {_cell(r.m_actual)} | {r.swaps_expected} "
                f"| {_cell(r.swaps_actual)} | {'yes' if r.proven_optimal else 'no'} | {gap} "
                f"| {r.elapsed:.2f} | {r.status} |"
            )
        s = self.summary()
        lines += ["", f"{s['matches']}/{s['rows']} rows match; status counts: {s['status']}"]
        if "mean_gap" in s:
            lines.append(f"mean gap {100 * s['mean_gap']:.1f}%, max gap {100 * s['max_gap']:.1f}%")
        return "\n".join(lines) + "\n"


def _cell(v):
    return "-" if v is None else str(v)


def fixture_index(directory: str | Path) -> dict[str, Path]:
    """Map lower-cased file stems to ``.real`` files anywhere under ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"fixtures directory {directory} does not exist")
    return {p.stem.lower(): p for p in sorted(directory.rglob("*.real"))}


def resolve_fixtures(directory: str | Path | None) -> Path | None:
    if directory:
        return Path(directory)
    env = os.environ.get(FIXTURES_ENV)
    return Path(env) if env else None


def run_bench(
    suite: str = "qft",
    mode: Mode | str = Mode.EXACT,
    fixtures: str | Path | None = None,
    max_n: int | None = None,
    time_limit: float | None = None,
    beam_width: int = 64,
    threads: int = 1,
    names: list[str] | None = None,
) -> BenchReport:
    mode = Mode(mode)
    if suite not in ("qft", "fixtures", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    if max_n is None:
        max_n = DEFAULT_MAX_N[mode]
    if mode is not Mode.GREEDY:
        max_n = min(max_n, MAX_EXACT_N)

    index: dict[str, Path] = {}
    if suite in ("fixtures", "all"):
        fixtures = resolve_fixtures(fixtures)
        if fixtures is None:
            raise FileNotFoundError(
                f"suite {suite!r} needs a fixtures directory (--fixtures or ${FIXTURES_ENV})"
            )
        index = fixture_index(fixtures)

    config = SolverConfig(mode=mode, beam_width=beam_width, time_limit=time_limit, thread_count=threads)
    report = BenchReport(mode.value, suite)
    for row in load_rows():
        if names and row.name not in names:
            continue
        if row.source == "qft" and suite == "fixtures":
            continue
        if row.source == "fixture" and suite == "qft":
            continue
        if row.n > max_n:
            continue
        report.rows.append(_run_row(row, config, index))
    return report


def _run_row(row: BenchRow, config: SolverConfig, index: dict[str, Path]) -> BenchOutcome:
    out = BenchOutcome(row.name, row.n, row.m_expected, row.swaps_expected, config.mode.value, "pending")
    if row.source == "qft":
        circuit = generate_qft(row.n)
    else:
        path = index.get(row.name.lower())
        if path is None:
            out.status = "missing"
            return out
        try:
            circuit = load_real(path)
        except (CircuitFormatError, UnsupportedGateError) as exc:
            out.status, out.note = "error", str(exc)
            return out
    out.m_actual = circuit.m
    if circuit.m != row.m_expected:
        out.status = "decomposition-mismatch"
        return out
    try:
        result = solve(circuit, config)
    except SolverTimeout as exc:
        out.status, out.note = "timeout", str(exc)
        return out
    out.swaps_actual = result.objective
    out.proven_optimal = result.proven_optimal
    out.elapsed = result.elapsed
    if row.swaps_expected:
        out.gap = (result.objective - row.swaps_expected) / row.swaps_expected
    elif result.objective == 0:
        out.gap = 0.0
    else:
        out.note = f"{result.objective} swaps above a zero optimum"
    if config.mode is Mode.EXACT:
        if not result.proven_optimal:
            out.status = "timeout"
        else:
            out.status = "match" if out.match else "mismatch"
    else:
        out.status = "match" if out.match else "heuristic"
    return out
