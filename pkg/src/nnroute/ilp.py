"""Polynomial-size ILP for minimum-SWAP nearest-neighbor compliance.

Variables, all 1-based in their names:

* ``x_i_t``   location of qubit i before gate t, in [1, n]
* ``y_i_j_t`` 1 iff qubit i sits left of qubit j before gate t (i < j)
* ``k_i_j_t`` 1 iff the relative order of i and j changes between gates t and t+1

Every two-sided relation is emitted as two single-sided rows, so a model has
exactly ``n^2 m - (n^2 - n)/2`` variables and ``2(n^2 - n)m - n^2 + n + 2m``
rows.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import combinations

from .circuit import QuantumCircuit
from .permutation import OrderSchedule, QubitOrder, verify_schedule

TOL = 1e-6

BINARY = "binary"
INTEGER = "integer"
CONTINUOUS = "continuous"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "x", "y" or "k"
    indices: tuple[int, ...]
    lower: float
    upper: float
    integrality: str


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str  # "<=", ">=" or "="
    rhs: float

    @property
    def family(self) -> str:
        return self.name.split("_", 1)[0]

    def activity(self, values) -> float:
        return sum(coef * values[v] for v, coef in self.terms)

    def satisfied(self, values, tol: float = TOL) -> bool:
        lhs = self.activity(values)
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True)
class IlpModel:
    n: int
    m: int
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[tuple[str, float], ...]
    big_m: float

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def variable(self, name: str) -> Variable:
        return self._index()[name]

    def _index(self) -> dict[str, Variable]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {v.name: v for v in self.variables}
            object.__setattr__(self, "_idx", idx)
        return idx


def expected_size(n: int, m: int) -> tuple[int, int]:
    """(variables, constraints) a model for n qubits and m gates must have."""
    return n * n * m - (n * n - n) // 2, 2 * (n * n - n) * m - n * n + n + 2 * m


def x_name(i: int, t: int) -> str:
    return f"x_{i + 1}_{t + 1}"


def y_name(i: int, j: int, t: int) -> str:
    return f"y_{i + 1}_{j + 1}_{t + 1}"


def k_name(i: int, j: int, t: int) -> str:
    return f"k_{i + 1}_{j + 1}_{t + 1}"


def build_model(circuit: QuantumCircuit, relax_x: bool = False, relax_k: bool = False) -> IlpModel:
    n, m = circuit.n, circuit.m
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if m == 0:
        raise ValueError("circuit has no gates; its optimum is 0 without a model")
    big_m = n + 1
    pairs = list(combinations(range(n), 2))

    variables = []
    for t in range(m):
        for i in range(n):
            variables.append(Variable(x_name(i, t), "x", (i + 1, t + 1), 1, n,
                                      CONTINUOUS if relax_x else INTEGER))
    for t in range(m):
        for i, j in pairs:
            variables.append(Variable(y_name(i, j, t), "y", (i + 1, j + 1, t + 1), 0, 1, BINARY))
    for t in range(m - 1):
        for i, j in pairs:
            variables.append(Variable(k_name(i, j, t), "k", (i + 1, j + 1, t + 1), 0, 1,
                                      CONTINUOUS if relax_k else BINARY))

    rows = []
    for t in range(m):
        for i, j in pairs:
            xi, xj, y = x_name(i, t), x_name(j, t), y_name(i, j, t)
            tag = f"{i + 1}_{j + 1}_{t + 1}"
            # y = 1 forces x_i <= x_j - 1, y = 0 forces x_j <= x_i - 1
            rows.append(Constraint(f"order1_{tag}", ((xi, 1.0), (xj, -1.0), (y, big_m)), "<=", big_m - 1))
            rows.append(Constraint(f"order2_{tag}", ((xj, 1.0), (xi, -1.0), (y, -big_m)), "<=", -1.0))
    for t, g in enumerate(circuit.gates):
        i, j = g.pair
        terms = ((x_name(i, t), 1.0), (x_name(j, t), -1.0))
        rows.append(Constraint(f"adjlo_{t + 1}", terms, ">=", -1.0))
        rows.append(Constraint(f"adjhi_{t + 1}", terms, "<=", 1.0))
    for t in range(m - 1):
        for i, j in pairs:
            y0, y1, k = y_name(i, j, t), y_name(i, j, t + 1), k_name(i, j, t)
            tag = f"{i + 1}_{j + 1}_{t + 1}"
            rows.append(Constraint(f"changelo_{tag}", ((y0, 1.0), (y1, -1.0), (k, 1.0)), ">=", 0.0))
            rows.append(Constraint(f"changehi_{tag}", ((y0, 1.0), (y1, -1.0), (k, -1.0)), "<=", 0.0))

    objective = tuple((v.name, 1.0) for v in variables if v.kind == "k")
    return IlpModel(n, m, tuple(variables), tuple(rows), objective, big_m)


# --------------------------------------------------------------------------
# LP file format

def _fmt(c: float) -> str:
    if float(c).is_integer():
        return str(int(c))
    return repr(float(c))


def _expr(terms) -> str:
    out = []
    for name, coef in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1 else f"{_fmt(mag)} {name}"
        out.append(f"{sign} {body}")
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else text


def _wrap(prefix: str, expr: str, per_line: int = 8) -> list[str]:
    """Split a long expression into continuation lines of ``per_line`` terms."""
    tokens = re.split(r" (?=[+-] )", expr)
    chunks = [" ".join(tokens[i:i + per_line]) for i in range(0, len(tokens), per_line)]
    return [f"{prefix} {chunks[0]}", *(f"   {c}" for c in chunks[1:])]


def export_lp(model: IlpModel) -> str:
    out = [
        f"\\ minimum-SWAP nearest-neighbor model: n={model.n} m={model.m}",
        f"\\ {model.num_variables} variables, {model.num_constraints} constraints",
        "Minimize",
    ]
    if model.objective:
        out += _wrap(" obj:", _expr(model.objective))
    else:
        out.append(" obj: 0")
    out.append("Subject To")
    for c in model.constraints:
        out += _wrap(f" {c.name}:", f"{_expr(c.terms)} {c.sense} {_fmt(c.rhs)}")
    out.append("Bounds")
    for v in model.variables:
        if v.integrality != BINARY:
            out.append(f" {_fmt(v.lower)} <= {v.name} <= {_fmt(v.upper)}")
    general = [v.name for v in model.variables if v.integrality == INTEGER]
    binary = [v.name for v in model.variables if v.integrality == BINARY]
    if general:
        out.append("General")
        out += [" " + " ".join(general[i:i + 8]) for i in range(0, len(general), 8)]
    if binary:
        out.append("Binary")
        out += [" " + " ".join(binary[i:i + 8]) for i in range(0, len(binary), 8)]
    out.append("End")
    return "\n".join(out) + "\n"


_SECTION = {
    "minimize": "obj", "minimise": "obj", "min": "obj",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "general": "general", "generals": "general", "gen": "general",
    "binary": "binary", "binaries": "binary", "bin": "binary", "end": "end",
}
_TERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")
_VAR = re.compile(r"^([xyk])_(\d+)_(\d+)(?:_(\d+))?$")


def _parse_terms(expr: str) -> list[tuple[str, float]]:
    expr = expr.strip()
    if expr in ("", "0"):
        return []
    terms = []
    pos = 0
    for match in _TERM.finditer(expr):
        if expr[pos:match.start()].strip():
            raise ValueError(f"cannot parse LP expression near {expr[pos:match.start()]!r}")
        sign, coef, name = match.groups()
        value = float(coef) if coef else 1.0
        terms.append((name, -value if sign == "-" else value))
        pos = match.end()
    if expr[pos:].strip():
        raise ValueError(f"trailing text in LP expression: {expr[pos:]!r}")
    return terms


def parse_lp(text: str) -> IlpModel:
    """Read back an LP file in the dialect written by :func:`export_lp`."""
    section = None
    chunks: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "general": [], "binary": []}
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = _SECTION.get(line.lower())
        if key is not None:
            section = key
            continue
        if section is None or section == "end":
            raise ValueError(f"LP text outside a section: {line!r}")
        chunks[section].append(line)

    obj = " ".join(chunks["obj"])
    obj = obj.split(":", 1)[1] if ":" in obj else obj
    objective = _parse_terms(obj)

    rows = []
    for stmt in _statements(chunks["st"]):
        name, body = stmt.split(":", 1)
        match = re.match(r"(.*?)(<=|>=|=<|=>|=)\s*([+-]?[\d.eE+-]+)\s*$", body)
        if not match:
            raise ValueError(f"cannot parse constraint {stmt!r}")
        lhs, sense, rhs = match.groups()
        sense = {"=<": "<=", "=>": ">="}.get(sense, sense)
        rows.append(Constraint(name.strip(), tuple(_parse_terms(lhs)), sense, float(rhs)))

    bounds = {}
    for line in chunks["bounds"]:
        match = re.match(r"^([+-]?[\d.eE+-]+)\s*<=\s*(\S+)\s*<=\s*([+-]?[\d.eE+-]+)$", line)
        if not match:
            raise ValueError(f"unsupported bound {line!r}")
        bounds[match.group(2)] = (float(match.group(1)), float(match.group(3)))
    general = {tok for line in chunks["general"] for tok in line.split()}
    binary = {tok for line in chunks["binary"] for tok in line.split()}

    names: list[str] = []
    seen = set()
    for name in [*bounds, *(v for v, _ in objective), *(v for c in rows for v, _ in c.terms), *sorted(binary)]:
        if name not in seen:
            seen.add(name)
            names.append(name)

    variables = []
    for name in names:
        match = _VAR.match(name)
        if not match:
            raise ValueError(f"unexpected variable name {name!r}")
        kind = match.group(1)
        indices = tuple(int(g) for g in match.groups()[1:] if g is not None)
        if name in binary:
            lo, hi, integrality = 0.0, 1.0, BINARY
        else:
            lo, hi = bounds.get(name, (0.0, math.inf))
            integrality = INTEGER if name in general else CONTINUOUS
        variables.append(Variable(name, kind, indices, lo, hi, integrality))
    order = {"x": 0, "y": 1, "k": 2}
    variables.sort(key=lambda v: (order[v.kind], v.indices[-1], v.indices[:-1]))

    n = max((v.indices[0] for v in variables if v.kind == "x"), default=0)
    m = max((v.indices[-1] for v in variables if v.kind == "x"), default=0)
    return IlpModel(n, m, tuple(variables), tuple(rows), tuple(objective), n + 1)


def _statements(lines: list[str]) -> list[str]:
    out: list[str] = []
    for line in lines:
        if re.match(r"^[A-Za-z_][\w.]*\s*:", line) or not out:
            out.append(line)
        else:
            out[-1] += " " + line
    return out


# --------------------------------------------------------------------------
# assignments

@dataclass
class CheckResult:
    feasible: bool
    objective: float
    violated: list[str] = field(default_factory=list)


def schedule_to_assignment(circuit: QuantumCircuit, schedule: OrderSchedule) -> dict[str, float]:
    report = verify_schedule(circuit, schedule)
    if not report.feasible:
        raise ValueError("schedule is not nearest-neighbor compliant")
    n = circuit.n
    pairs = list(combinations(range(n), 2))
    values: dict[str, float] = {}
    for t, order in enumerate(schedule):
        for i in range(n):
            values[x_name(i, t)] = float(order.pos[i])
        for i, j in pairs:
            values[y_name(i, j, t)] = 1.0 if order.pos[i] < order.pos[j] else 0.0
    for t in range(circuit.m - 1):
        for i, j in pairs:
            values[k_name(i, j, t)] = abs(values[y_name(i, j, t)] - values[y_name(i, j, t + 1)])
    return values


def assignment_to_schedule(circuit: QuantumCircuit, values: dict[str, float]) -> OrderSchedule:
    n = circuit.n
    orders = []
    for t in range(circuit.m):
        try:
            raw = [values[x_name(i, t)] for i in range(n)]
        except KeyError as exc:
            raise ValueError(f"assignment lacks {exc}") from exc
        pos = [math.floor(v + 0.5) for v in raw]
        if sorted(pos) != list(range(1, n + 1)):
            raise ValueError(f"x values before gate {t + 1} do not round to a permutation: {raw}")
        orders.append(QubitOrder(pos))
    return OrderSchedule(tuple(orders))


def check_assignment(model: IlpModel, values: dict[str, float], tol: float = TOL) -> CheckResult:
    """Evaluate every row, bound and integrality mark of ``model``."""
    missing = [v.name for v in model.variables if v.name not in values]
    if missing:
        raise KeyError(f"assignment lacks {len(missing)} variable(s), e.g. {missing[0]}")
    violated = []
    for v in model.variables:
        val = values[v.name]
        if val < v.lower - tol or val > v.upper + tol:
            violated.append(f"bound:{v.name}")
        elif v.integrality != CONTINUOUS and abs(val - round(val)) > tol:
            violated.append(f"integrality:{v.name}")
    violated += [c.name for c in model.constraints if not c.satisfied(values, tol)]
    objective = sum(coef * values[name] for name, coef in model.objective)
    return CheckResult(not violated, objective, violated)


def parse_solution(text: str, model: IlpModel | None = None) -> dict[str, float]:
    """Read ``name value`` lines. Names unknown to ``model`` are an error."""
    known = {v.name for v in model.variables} if model is not None else None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"solution line {lineno}: expected 'name value', got {line!r}")
        name, value = parts
        if known is not None and name not in known:
            raise ValueError(f"solution line {lineno}: unknown variable {name!r}")
        values[name] = float(value)
    return values


def format_solution(values: dict[str, float]) -> str:
    return "".join(f"{name} {_fmt(val)}\n" for name, val in values.items())
