import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnroute.circuit import (
    CircuitFormatError,
    Gate,
    GateKind,
    QuantumCircuit,
    RawCircuit,
    RawGate,
    UnsupportedGateError,
    decompose,
    emit_compliant,
    format_pairs,
    generate_qft,
    load_circuit,
    load_real,
    parse_compliant,
    parse_pairs,
    parse_real,
    peres_template,
    toffoli_pairs,
)
from nnroute.permutation import OrderSchedule, QubitOrder, verify_schedule
from nnroute.solver import solve_exact_dp

from conftest import circuits


def real(body, n=3, names="a b c"):
    return f".version 1.0\n.numvars {n}\n.variables {names}\n.begin\n{body}\n.end\n"


def toffoli_raw(k):
    n = k + 1
    names = " ".join(f"q{i}" for i in range(n))
    return parse_real(real(f"t{n} {names}", n, names))


# ---- parsing ---------------------------------------------------------------

def test_minimal_cnot():
    raw = parse_real(real("t2 a b"))
    assert raw.n == 3
    assert raw.variable_names == ("a", "b", "c")
    (g,) = raw.gates
    assert g.kind is GateKind.TOFFOLI
    assert g.lines == (0, 1)
    assert g.control_count == 1


def test_single_qubit_gate_kept_then_dropped():
    raw = parse_real(real("t1 a"))
    assert [g.kind for g in raw.gates] == [GateKind.SINGLE]
    assert decompose(raw).m == 0


def test_comments_case_and_negative_controls():
    text = real("# a comment\nT3 -a b c   # trailing\nV b c\nv+ a c")
    raw = parse_real(text)
    assert [g.kind for g in raw.gates] == [GateKind.TOFFOLI, GateKind.OTHER, GateKind.OTHER]
    assert raw.gates[0].lines == (0, 1, 2)
    assert [g.label for g in decompose(raw).gates[-2:]] == ["CV", "CV+"]


@pytest.mark.parametrize("text, match", [
    (".variables a b\n.begin\nt2 a b\n.end\n", "numvars"),
    (".numvars 2\n.begin\nt2 a b\n.end\n", "variables"),
    (".numvars 3\n.variables a b\n.begin\n.end\n", "numvars is 3"),
    (real("t2 a z"), "undeclared"),
    (real("t2 a a"), "repeats"),
    (".numvars 2\n.variables a b\nt2 a b\n.begin\n.end\n", "outside"),
    (real("t2 a b") + "t2 a b\n", "outside"),
    (".numvars 2\n.variables a b\n.begin\nt2 a b\n", "missing .end"),
    (real("t3 a b"), "declares 3"),
])
def test_parse_errors(text, match):
    with pytest.raises(CircuitFormatError, match=match):
        parse_real(text)


def test_raw_invariants():
    with pytest.raises(CircuitFormatError):
        RawGate(GateKind.TOFFOLI, (0, 0), 1)
    with pytest.raises(CircuitFormatError):
        RawCircuit(2, ("a", "b"), (RawGate(GateKind.TOFFOLI, (0, 2), 1),))


# ---- gates and circuits ----------------------------------------------------

def test_gate_is_unordered():
    assert Gate(0, 1) == Gate(1, 0)
    assert hash(Gate(2, 5, "CV")) == hash(Gate(5, 2, "CV"))
    assert Gate(0, 1, "CV") != Gate(0, 1, "CNOT")
    with pytest.raises(ValueError):
        Gate(3, 3)


def test_circuit_rejects_out_of_range():
    with pytest.raises(ValueError):
        QuantumCircuit(2, (Gate(0, 2),))


# ---- decomposition ---------------------------------------------------------

@pytest.mark.parametrize("k, m", [(1, 1), (2, 5), (3, 13), (4, 29)])
def test_toffoli_gate_count_law(k, m):
    assert m == 2 ** (k + 1) - 3
    assert decompose(toffoli_raw(k)).m == m


def test_two_control_pattern():
    c1, c2, t = 0, 1, 2
    assert decompose(toffoli_raw(2)).pairs() == [
        tuple(sorted(p)) for p in [(c2, t), (c1, c2), (c2, t), (c1, c2), (c1, t)]
    ]


def test_three_control_pattern():
    c1, c2, c3, t = 0, 1, 2, 3
    expected = [(c1, t), (c1, c2), (c2, t), (c1, c2), (c2, t), (c2, c3), (c3, t),
                (c1, c3), (c3, t), (c2, c3), (c3, t), (c1, c3), (c3, t)]
    assert decompose(toffoli_raw(3)).pairs() == [tuple(sorted(p)) for p in expected]


def test_four_control_pattern_is_gray_code_extension():
    pairs = toffoli_pairs([0, 1, 2, 3], 4)
    assert len(pairs) == 29
    # every target interaction comes from a single control, separated by one control-control gate
    assert [b == 4 for _, b in pairs] == [True] + [False, True] * 14
    # each of the 15 non-empty control subsets is used exactly once
    assert sum(b == 4 for _, b in pairs) == 2 ** 4 - 1


def test_too_many_controls():
    with pytest.raises(UnsupportedGateError, match="at most 4"):
        decompose(toffoli_raw(5))


def test_fredkin_counts():
    assert decompose(parse_real(real("f2 a b"))).pairs() == [(0, 1)]
    assert decompose(parse_real(real("f3 a b c"))).m == 7
    c = decompose(parse_real(real("f4 a b c d", 4, "a b c d")))
    assert c.m == 1 + 13 + 1


def test_peres_follows_bundled_template():
    assert len(peres_template()) == 4
    c = decompose(parse_real(real("p3 a b c")))
    assert c.m == 4
    assert [(g.a, g.b, g.label) for g in c.gates] == list(peres_template())


def test_peres_on_permuted_lines():
    c = decompose(parse_real(real("p3 c a b")))
    mapping = {0: 2, 1: 0, 2: 1}
    assert [g.pair for g in c.gates] == [
        tuple(sorted((mapping[a], mapping[b]))) for a, b, _ in peres_template()
    ]


def test_unsupported_other_gate():
    with pytest.raises(UnsupportedGateError):
        decompose(parse_real(real("v3 a b c")))


@pytest.mark.parametrize("name, m", [
    ("toffoli_1", 5), ("fredkin_5", 7), ("peres_8", 4), ("graycode6_47", 5), ("xor5_254", 5),
])
def test_standin_fixtures(standins, name, m):
    assert load_real(standins / f"{name}.real").m == m


@given(st.lists(st.sampled_from(["t2 a b", "t3 c a b", "t4 a b c d", "f3 d a c", "p3 b d a",
                                 "t1 c", "v b d", "f2 a d", "t5 a b c d e"]), max_size=8))
@settings(max_examples=60)
def test_decompose_deterministic_and_two_qubit(body):
    raw = parse_real(real("\n".join(body), 5, "a b c d e"))
    first, second = decompose(raw), decompose(raw)
    assert first.gates == second.gates
    assert all(g.a != g.b for g in first.gates)


# ---- QFT -------------------------------------------------------------------

def test_qft3_gates():
    assert generate_qft(3).pairs() == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("n, m", [(5, 10), (8, 28)])
def test_qft_sizes(n, m):
    assert generate_qft(n).m == m


@given(st.integers(2, 30))
def test_qft_every_pair_once(n):
    pairs = generate_qft(n).pairs()
    assert len(pairs) == n * (n - 1) // 2
    assert len(set(pairs)) == len(pairs)


def test_qft_too_small():
    with pytest.raises(ValueError):
        generate_qft(1)


# ---- listings --------------------------------------------------------------

def test_compliant_zero_swaps():
    c = QuantumCircuit.from_pairs(4, [(0, 1), (1, 2), (2, 3)])
    sched = OrderSchedule((QubitOrder.identity(4),) * 3)
    text = emit_compliant(c, sched)
    assert not any(line.startswith("swap ") for line in text.splitlines())
    assert sum(line.startswith("gate") for line in text.splitlines()) == 3
    assert "swaps=0 cnot_overhead=0" in text


def test_compliant_qft3():
    c = generate_qft(3)
    res = solve_exact_dp(c)
    text = emit_compliant(c, res.schedule, res.swaps)
    assert sum(line.startswith("swap ") for line in text.splitlines()) == 1
    assert "swaps=1 cnot_overhead=3" in text


def test_compliant_rejects_infeasible():
    c = QuantumCircuit.from_pairs(3, [(0, 2)])
    with pytest.raises(ValueError):
        emit_compliant(c, OrderSchedule((QubitOrder.identity(3),)))


@given(circuits(min_m=1, max_m=6))
@settings(max_examples=40, deadline=None)
def test_compliant_round_trip(circuit):
    res = solve_exact_dp(circuit)
    listing = parse_compliant(emit_compliant(circuit, res.schedule, res.swaps))
    assert (listing.n, listing.m, listing.swaps) == (circuit.n, circuit.m, res.objective)
    replay = listing.schedule()
    assert list(replay) == list(res.schedule)
    assert verify_schedule(circuit, replay).total_swaps == res.objective


@given(circuits(max_m=8))
def test_pair_listing_round_trip(circuit):
    again = parse_pairs(format_pairs(circuit))
    assert again.n == circuit.n
    assert again.gates == circuit.gates


def test_load_circuit_dispatch(tmp_path, standins):
    p = tmp_path / "c.txt"
    p.write_text(format_pairs(generate_qft(4)))
    assert load_circuit(p).pairs() == generate_qft(4).pairs()
    assert load_circuit(standins / "fredkin_5.real").m == 7
    p.write_text("1 2\n")
    with pytest.raises(CircuitFormatError):
        load_circuit(p)
