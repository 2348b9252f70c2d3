import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from nnroute.circuit import QuantumCircuit
from nnroute.permutation import QubitOrder

STANDINS = Path(__file__).parent / "fixtures" / "standins"
SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def random_circuit(rng: random.Random, n: int, m: int) -> QuantumCircuit:
    pairs = [tuple(rng.sample(range(n), 2)) for _ in range(m)]
    return QuantumCircuit.from_pairs(n, pairs)


@st.composite
def orders(draw, n=None, min_n=1, max_n=6):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    return QubitOrder(draw(st.permutations(range(1, n + 1))))


@st.composite
def circuits(draw, min_n=2, max_n=4, min_m=0, max_m=6):
    n = draw(st.integers(min_n, max_n))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    pairs = draw(st.lists(pair, min_size=min_m, max_size=max_m))
    return QuantumCircuit.from_pairs(n, pairs)


@pytest.fixture
def standins():
    return STANDINS


def random_feasible_schedule(rng: random.Random, circuit: QuantumCircuit):
    """One random order per gate with that gate's qubits placed side by side."""
    from nnroute.permutation import OrderSchedule

    out = []
    for g in circuit.gates:
        rest = [q for q in range(circuit.n) if q not in g.pair]
        rng.shuffle(rest)
        pair = list(g.pair)
        rng.shuffle(pair)
        at = rng.randint(0, len(rest))
        out.append(QubitOrder.from_locations(rest[:at] + pair + rest[at:]))
    return OrderSchedule(tuple(out))


def load_script(name: str):
    import importlib.util

    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
