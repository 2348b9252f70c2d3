import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnroute.circuit import QuantumCircuit, generate_qft
from nnroute.ilp import (
    BINARY,
    CONTINUOUS,
    INTEGER,
    assignment_to_schedule,
    build_model,
    check_assignment,
    expected_size,
    export_lp,
    format_solution,
    parse_lp,
    parse_solution,
    schedule_to_assignment,
)
from nnroute.permutation import OrderSchedule, QubitOrder, verify_schedule
from nnroute.solver import solve_exact_dp

from conftest import circuits, load_script, random_circuit, random_feasible_schedule


def eq10(n, m):
    return n * n * m - (n * n - n) // 2


def eq11(n, m):
    return 2 * (n * n - n) * m - n * n + n + 2 * m


# ---- sizes -----------------------------------------------------------------

@pytest.mark.parametrize("n, m, v, c", [(3, 3, 24, 36), (5, 10, 240, 400)])
def test_size_examples(n, m, v, c):
    model = build_model(generate_qft(n))
    assert model.m == m
    assert (model.num_variables, model.num_constraints) == (v, c) == (eq10(n, m), eq11(n, m))


@given(circuits(min_n=2, max_n=8, min_m=1, max_m=20))
@settings(max_examples=50, deadline=None)
def test_size_formulas(circuit):
    model = build_model(circuit)
    n, m = circuit.n, circuit.m
    assert expected_size(n, m) == (eq10(n, m), eq11(n, m))
    assert (model.num_variables, model.num_constraints) == expected_size(n, m)
    kinds = [v.kind for v in model.variables]
    assert kinds.count("x") == n * m
    assert kinds.count("y") == n * (n - 1) // 2 * m
    assert kinds.count("k") == n * (n - 1) // 2 * (m - 1)
    assert model.big_m == n + 1


def test_build_errors():
    with pytest.raises(ValueError):
        build_model(QuantumCircuit(3))
    with pytest.raises(ValueError):
        build_model(QuantumCircuit(1))


def test_relax_flags():
    c = generate_qft(3)
    tight = {v.kind: v.integrality for v in build_model(c).variables}
    loose = {v.kind: v.integrality for v in build_model(c, relax_x=True, relax_k=True).variables}
    assert tight == {"x": INTEGER, "y": BINARY, "k": BINARY}
    assert loose == {"x": CONTINUOUS, "y": BINARY, "k": CONTINUOUS}


# ---- LP text ---------------------------------------------------------------

def test_export_deterministic_and_named():
    text = export_lp(build_model(generate_qft(3)))
    assert text == export_lp(build_model(generate_qft(3)))
    for section in ("Minimize", "Subject To", "Bounds", "General", "Binary", "End"):
        assert f"\n{section}\n" in "\n" + text
    assert "x_1_1" in text and "y_1_2_1" in text and "k_2_3_2" in text


def test_export_single_gate():
    text = export_lp(build_model(QuantumCircuit.from_pairs(3, [(0, 2)])))
    assert " obj: 0" in text
    assert "k_" not in text


@pytest.mark.parametrize("relax", [(False, False), (True, True), (True, False)])
def test_lp_round_trip(relax):
    model = build_model(generate_qft(3), *relax)
    again = parse_lp(export_lp(model))
    assert (again.num_variables, again.num_constraints) == (24, 36)
    assert export_lp(again) == export_lp(model)


@given(circuits(min_n=2, max_n=5, min_m=1, max_m=6))
@settings(max_examples=30, deadline=None)
def test_lp_round_trip_random(circuit):
    model = build_model(circuit)
    again = parse_lp(export_lp(model))
    assert set(again.variables) == set(model.variables)
    assert {c.name: (dict(c.terms), c.sense, c.rhs) for c in again.constraints} == \
        {c.name: (dict(c.terms), c.sense, c.rhs) for c in model.constraints}


# ---- assignments -----------------------------------------------------------

def qft3_optimal():
    return OrderSchedule(tuple(QubitOrder(p) for p in [(1, 2, 3), (1, 3, 2), (1, 3, 2)]))


def test_identity_assignment():
    c = QuantumCircuit.from_pairs(3, [(0, 1), (1, 2)])
    values = schedule_to_assignment(c, OrderSchedule((QubitOrder.identity(3),) * 2))
    assert all(v == 1.0 for k, v in values.items() if k.startswith("y_"))
    assert all(v == 0.0 for k, v in values.items() if k.startswith("k_"))
    assert check_assignment(build_model(c), values).objective == 0


def test_qft3_assignment_objective():
    c = generate_qft(3)
    check = check_assignment(build_model(c), schedule_to_assignment(c, qft3_optimal()))
    assert check.feasible and check.objective == 1


def test_infeasible_schedule_has_no_assignment():
    c = generate_qft(3)
    with pytest.raises(ValueError):
        schedule_to_assignment(c, OrderSchedule((QubitOrder.identity(3),) * 3))


def test_continuous_identity_layers():
    c = QuantumCircuit.from_pairs(3, [(0, 1), (1, 2)])
    values = {f"x_{i}_{t}": float(i) for i in (1, 2, 3) for t in (1, 2)}
    assert list(assignment_to_schedule(c, values)) == [QubitOrder.identity(3)] * 2
    values["x_1_2"] = 2.0
    with pytest.raises(ValueError):
        assignment_to_schedule(c, values)


def test_round_trips_on_random_schedules():
    rng = random.Random(7)
    for _ in range(100):
        n, m = rng.randint(2, 5), rng.randint(1, 10)
        c = random_circuit(rng, n, m)
        sched = random_feasible_schedule(rng, c)
        values = schedule_to_assignment(c, sched)
        check = check_assignment(build_model(c), values)
        assert check.feasible, check.violated
        assert check.objective == verify_schedule(c, sched).total_swaps
        assert list(assignment_to_schedule(c, values)) == list(sched)


def test_big_m_rows_one_tight_other_slack():
    rng = random.Random(3)
    for _ in range(40):
        c = random_circuit(rng, rng.randint(2, 5), rng.randint(1, 6))
        model = build_model(c)
        values = schedule_to_assignment(c, random_feasible_schedule(rng, c))
        slack = {r.name: r.rhs - r.activity(values) for r in model.constraints if r.family.startswith("order")}
        for name, s1 in slack.items():
            if not name.startswith("order1_"):
                continue
            s2 = slack["order2_" + name[len("order1_"):]]
            assert min(s1, s2) >= 0
            assert max(s1, s2) >= model.big_m - c.n


def test_flipped_y_flags_change_rows():
    c = generate_qft(3)
    model = build_model(c)
    values = schedule_to_assignment(c, qft3_optimal())
    values["y_1_2_2"] = 1.0 - values["y_1_2_2"]
    flagged = check_assignment(model, values).violated
    change = [v for v in flagged if v.startswith("change")]
    others = [v for v in flagged if not v.startswith("change")]
    # both transitions that touch layer 2 disagree with their k
    assert sorted(change) == ["changehi_1_2_1", "changelo_1_2_2"]
    # the flipped y also contradicts the x values of its own layer, nothing else
    assert others and all(v.startswith("order") and v.endswith("_1_2_2") for v in others)


def test_flipped_k_flags_only_change_rows():
    c = generate_qft(3)
    values = schedule_to_assignment(c, qft3_optimal())
    values["k_1_3_2"] = 1.0
    check = check_assignment(build_model(c), values)
    assert check.violated == []  # k may overstate the change
    values = schedule_to_assignment(c, qft3_optimal())
    name = next(k for k, v in values.items() if k.startswith("k_") and v == 1.0)
    values[name] = 0.0
    flagged = check_assignment(build_model(c), values).violated
    assert flagged and all(v.startswith("change") for v in flagged)


def test_check_bounds_integrality_and_missing():
    c = generate_qft(3)
    model = build_model(c)
    values = schedule_to_assignment(c, qft3_optimal())
    bad = dict(values, x_1_1=1.5)
    assert "integrality:x_1_1" in check_assignment(model, bad).violated
    assert check_assignment(build_model(c, relax_x=True), dict(values, x_1_1=1.0 + 5e-7)).feasible
    assert "bound:k_1_2_1" in check_assignment(model, dict(values, k_1_2_1=2.0)).violated
    values.pop("x_1_1")
    with pytest.raises(KeyError):
        check_assignment(model, values)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_separated_vectors_are_exactly_permutations(n):
    """Values in [1, n] on a half-integer grid: the ordering rows accept iff the vector is a permutation."""
    model = build_model(QuantumCircuit.from_pairs(n, [(0, 1)]))
    rows = [r for r in model.constraints if r.family.startswith("order")]
    grid = [1 + h / 2 for h in range(2 * n - 1)]
    perms = 0
    for xs in product(grid, repeat=n):
        values = {f"x_{i + 1}_1": v for i, v in enumerate(xs)}
        for i in range(n):
            for j in range(i + 1, n):
                values[f"y_{i + 1}_{j + 1}_1"] = 1.0 if xs[i] < xs[j] else 0.0
        accepted = all(r.satisfied(values) for r in rows)
        is_perm = sorted(xs) == list(range(1, n + 1))
        assert accepted == is_perm, xs
        perms += is_perm
    assert perms == [1, 1, 2, 6, 24, 120][n]


def test_solution_text():
    c = generate_qft(3)
    model = build_model(c)
    values = schedule_to_assignment(c, qft3_optimal())
    assert parse_solution(format_solution(values), model) == values
    with pytest.raises(ValueError, match="unknown"):
        parse_solution("z_1 1\n", model)
    with pytest.raises(ValueError):
        parse_solution("x_1_1\n", model)


# ---- external MILP solver (scipy's HiGHS) -----------------------------------

@pytest.fixture(scope="module")
def highs():
    pytest.importorskip("scipy")
    return load_script("solve_lp_highs")


@pytest.mark.parametrize("n, optimum", [(3, 1), (4, 3)])
def test_external_solver_qft(highs, n, optimum):
    c = generate_qft(n)
    model = build_model(c)
    objective, values = highs.solve_lp_text(export_lp(model))
    assert round(objective) == optimum
    check = check_assignment(model, values)
    assert check.feasible and round(check.objective) == optimum
    assert verify_schedule(c, assignment_to_schedule(c, values)).total_swaps == optimum


def test_relaxation_keeps_optimum(highs):
    rng = random.Random(11)
    for _ in range(12):
        n = rng.randint(2, 5)
        c = random_circuit(rng, n, rng.randint(1, 7 if n == 5 else 9))
        model = build_model(c, relax_x=True, relax_k=True)
        objective, values = highs.solve_lp_text(export_lp(model))
        exact = solve_exact_dp(c).objective
        assert round(objective) == exact
        sched = assignment_to_schedule(c, values)
        assert verify_schedule(c, sched).total_swaps == exact
