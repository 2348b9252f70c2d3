"""Circuit ingestion and output.

Reads RevLib ``.real`` files, reduces every gate to a sequence of 2-qubit
interactions, builds QFT interaction sequences, and writes the routed
(nearest-neighbor compliant) listing.

Qubits are 0-based internally. Everything written to or read from text is
1-based.
"""
from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .permutation import (
    OrderSchedule,
    QubitOrder,
    SwapStep,
    apply_swap,
    realize_swaps,
    verify_schedule,
)

log = logging.getLogger(__name__)

MAX_TOFFOLI_CONTROLS = 4


class CircuitFormatError(ValueError):
    """Malformed circuit or listing text."""


class UnsupportedGateError(ValueError):
    """A gate the decomposer has no rule for."""


class GateKind(enum.Enum):
    TOFFOLI = "toffoli"
    FREDKIN = "fredkin"
    PERES = "peres"
    SINGLE = "single"
    OTHER = "other"


@dataclass(frozen=True)
class RawGate:
    """A gate as written in the source file.

    For Toffoli gates the last line is the target; for Fredkin gates the last
    two lines are the swapped pair. Everything before is a control.
    """

    kind: GateKind
    lines: tuple[int, ...]
    control_count: int
    mnemonic: str = ""

    def __post_init__(self):
        if len(set(self.lines)) != len(self.lines):
            raise CircuitFormatError(f"gate {self.mnemonic!r} repeats a line: {self.lines}")
        if any(q < 0 for q in self.lines):
            raise CircuitFormatError(f"negative line index in {self.lines}")


@dataclass(frozen=True)
class RawCircuit:
    n: int
    variable_names: tuple[str, ...]
    gates: tuple[RawGate, ...]
    source_name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise CircuitFormatError("a circuit needs at least one line")
        for g in self.gates:
            if any(q >= self.n for q in g.lines):
                raise CircuitFormatError(f"gate {g.mnemonic!r} uses a line outside [0, {self.n})")


@dataclass(frozen=True, eq=False)
class Gate:
    """A 2-qubit interaction. The pair is unordered: ``Gate(0, 1) == Gate(1, 0)``."""

    a: int
    b: int
    label: str = "CNOT"

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"gate acts twice on qubit {self.a}")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return self.pair == other.pair and self.label == other.label

    def __hash__(self):
        return hash((self.pair, self.label))


@dataclass(frozen=True)
class QuantumCircuit:
    n: int
    gates: tuple[Gate, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise ValueError("a circuit needs at least one qubit")
        for g in self.gates:
            if not (0 <= g.a < self.n and 0 <= g.b < self.n):
                raise ValueError(f"gate {g} outside qubit range [0, {self.n})")

    @property
    def m(self) -> int:
        return len(self.gates)

    def pairs(self) -> list[tuple[int, int]]:
        return [g.pair for g in self.gates]

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], label: str = "CNOT", name: str = ""):
        return cls(n, tuple(Gate(a, b, label) for a, b in pairs), name)


# --------------------------------------------------------------------------
# .real parsing

_GATE_RE = re.compile(r"^(t|f|p|v\+|v)(\d*)$", re.IGNORECASE)
_IGNORED_DIRECTIVES = {
    ".version", ".inputs", ".outputs", ".constants", ".garbage",
    ".inputbus", ".outputbus", ".state", ".module", ".define", ".enddefine",
}


def parse_real(text: str, source_name: str = "") -> RawCircuit:
    numvars: int | None = None
    names: list[str] | None = None
    gates: list[RawGate] = []
    state = "header"  # header -> body -> done

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()

        if head.startswith("."):
            if head == ".numvars":
                if len(tokens) != 2 or not tokens[1].isdigit():
                    raise CircuitFormatError(f"line {lineno}: bad .numvars")
                numvars = int(tokens[1])
            elif head == ".variables":
                names = tokens[1:]
            elif head == ".begin":
                if state != "header":
                    raise CircuitFormatError(f"line {lineno}: unexpected .begin")
                if numvars is None:
                    raise CircuitFormatError("missing .numvars before .begin")
                if names is None:
                    raise CircuitFormatError("missing .variables before .begin")
                if len(names) != numvars:
                    raise CircuitFormatError(
                        f".variables lists {len(names)} names but .numvars is {numvars}"
                    )
                if len(set(names)) != len(names):
                    raise CircuitFormatError("duplicate variable name")
                state = "body"
            elif head == ".end":
                if state != "body":
                    raise CircuitFormatError(f"line {lineno}: .end without .begin")
                state = "done"
            elif head not in _IGNORED_DIRECTIVES:
                log.debug("ignoring directive %s", head)
            continue

        if state != "body":
            raise CircuitFormatError(f"line {lineno}: gate outside .begin/.end: {line!r}")
        gates.append(_parse_gate(tokens, names, lineno))

    if numvars is None:
        raise CircuitFormatError("missing .numvars")
    if state == "header":
        raise CircuitFormatError("missing .begin")
    if state == "body":
        raise CircuitFormatError("missing .end")
    return RawCircuit(numvars, tuple(names), tuple(gates), source_name)


def _parse_gate(tokens: list[str], names: list[str], lineno: int) -> RawGate:
    mnemonic = tokens[0].lower()
    index = {name: i for i, name in enumerate(names)}
    lines = []
    for tok in tokens[1:]:
        name = tok[1:] if tok.startswith("-") else tok  # negative control
        if name not in index:
            raise CircuitFormatError(f"line {lineno}: undeclared variable {name!r}")
        lines.append(index[name])
    if not lines:
        raise CircuitFormatError(f"line {lineno}: gate without lines")
    if len(set(lines)) != len(lines):
        raise CircuitFormatError(f"line {lineno}: gate repeats a line")

    k = len(lines)
    match = _GATE_RE.match(mnemonic)
    if match and match.group(2) and int(match.group(2)) != k:
        raise CircuitFormatError(
            f"line {lineno}: {mnemonic} declares {match.group(2)} lines but lists {k}"
        )
    family = match.group(1) if match else None

    if k == 1:
        kind = GateKind.SINGLE
    elif family == "t":
        kind = GateKind.TOFFOLI
    elif family == "f":
        kind = GateKind.FREDKIN
    elif family == "p":
        kind = GateKind.PERES
    else:
        kind = GateKind.OTHER

    controls = {GateKind.FREDKIN: k - 2, GateKind.SINGLE: 0, GateKind.OTHER: 0}.get(kind, k - 1)
    return RawGate(kind, tuple(lines), controls, mnemonic)


# --------------------------------------------------------------------------
# decomposition

def _gray_code_pairs(controls: Sequence[int], target: int) -> list[tuple[int, int]]:
    """Interaction pairs of the Gray-code multi-control Toffoli network.

    Controlled-root gates hit the target from the highest control of the
    current Gray-code subset; CNOTs between controls move the subset parity
    onto that control. ``k`` controls give ``2**(k+1) - 3`` pairs.
    """
    k = len(controls)
    pairs = [(controls[0], target)]
    prev = 1
    holder = 0
    for r in range(2, 2**k):
        code = r ^ (r >> 1)
        flipped = (code ^ prev).bit_length() - 1
        top = code.bit_length() - 1
        if top != holder:
            pairs.append((controls[holder], controls[top]))
            holder = top
        else:
            pairs.append((controls[flipped], controls[holder]))
        pairs.append((controls[holder], target))
        prev = code
    return pairs


def toffoli_pairs(controls: Sequence[int], target: int) -> list[tuple[int, int]]:
    k = len(controls)
    if k == 0:
        return []
    if k == 1:
        return [(controls[0], target)]
    if k == 2:
        c1, c2 = controls
        return [(c2, target), (c1, c2), (c2, target), (c1, c2), (c1, target)]
    if k <= MAX_TOFFOLI_CONTROLS:
        return _gray_code_pairs(controls, target)
    raise UnsupportedGateError(
        f"Toffoli gate with {k} controls; at most {MAX_TOFFOLI_CONTROLS} are supported"
    )


@lru_cache(maxsize=None)
def peres_template() -> tuple[tuple[int, int, str], ...]:
    """Pair sequence of the bundled Peres realization, over lines 0, 1, 2."""
    text = resources.files("nnroute").joinpath("data/peres_8.real").read_text()
    raw = parse_real(text, "peres_8")
    out = []
    for g in raw.gates:
        if len(g.lines) != 2:
            raise CircuitFormatError("bundled Peres realization must use 2-qubit gates only")
        out.append((g.lines[0], g.lines[1], _label(g)))
    return tuple(out)


def _label(g: RawGate) -> str:
    if g.mnemonic.startswith("v+"):
        return "CV+"
    if g.mnemonic.startswith("v"):
        return "CV"
    if g.kind is GateKind.FREDKIN:
        return "SWAP"
    return "CNOT"


def _expand(g: RawGate) -> list[Gate]:
    lines = g.lines
    if g.kind is GateKind.TOFFOLI:
        *controls, target = lines
        if len(controls) > MAX_TOFFOLI_CONTROLS:
            raise UnsupportedGateError(
                f"{g.mnemonic}: Toffoli gate with {len(controls)} controls; "
                f"at most {MAX_TOFFOLI_CONTROLS} are supported"
            )
        if len(controls) == 1:
            return [Gate(controls[0], target, "CNOT")]
        return [Gate(a, b, "CV" if b == target else "CNOT") for a, b in toffoli_pairs(controls, target)]

    if g.kind is GateKind.FREDKIN:
        *controls, u, v = lines
        if not controls:
            return [Gate(u, v, "SWAP")]
        if len(controls) + 1 > MAX_TOFFOLI_CONTROLS:
            raise UnsupportedGateError(
                f"{g.mnemonic}: Fredkin gate with {len(controls)} controls is too large"
            )
        inner = RawGate(GateKind.TOFFOLI, (*controls, u, v), len(controls) + 1, "t")
        return [Gate(v, u, "CNOT"), *_expand(inner), Gate(v, u, "CNOT")]

    if g.kind is GateKind.PERES:
        if len(lines) != 3:
            raise UnsupportedGateError(f"{g.mnemonic}: Peres gate must act on 3 lines")
        return [Gate(lines[a], lines[b], label) for a, b, label in peres_template()]

    if g.kind is GateKind.OTHER and g.mnemonic in {"v", "v+", "v2", "v+2"} and len(lines) == 2:
        return [Gate(lines[0], lines[1], _label(g))]

    raise UnsupportedGateError(f"no decomposition rule for {g.mnemonic!r} on {len(lines)} lines")


def decompose(raw: RawCircuit) -> QuantumCircuit:
    gates: list[Gate] = []
    dropped = 0
    for g in raw.gates:
        if g.kind is GateKind.SINGLE:
            dropped += 1
            continue
        gates.extend(_expand(g))
    if dropped:
        log.info("%s: dropped %d single-qubit gate(s)", raw.source_name or "circuit", dropped)
    return QuantumCircuit(raw.n, tuple(gates), raw.source_name)


def load_real(path) -> QuantumCircuit:
    from pathlib import Path

    path = Path(path)
    return decompose(parse_real(path.read_text(), path.stem))


def generate_qft(n: int) -> QuantumCircuit:
    """Controlled-phase interactions of the textbook QFT, Hadamards dropped."""
    if n < 2:
        raise ValueError("QFT needs at least 2 qubits")
    gates = tuple(Gate(i, j, "CP") for i in range(n - 1) for j in range(i + 1, n))
    return QuantumCircuit(n, gates, f"QFT_QFT{n}")


# --------------------------------------------------------------------------
# compliant listing

def emit_compliant(
    circuit: QuantumCircuit,
    schedule: OrderSchedule,
    swaps: Sequence[Sequence[SwapStep]] | None = None,
) -> str:
    report = verify_schedule(circuit, schedule)
    if not report.feasible:
        bad = [t + 1 for t, ok in enumerate(report.per_gate_ok) if not ok]
        raise ValueError(f"schedule violates adjacency before gate(s) {bad}")
    if swaps is None:
        swaps = [realize_swaps(a, b) for a, b in zip(schedule, schedule[1:])]
    if len(swaps) != max(circuit.m - 1, 0):
        raise ValueError("need one swap list per transition")

    total = sum(len(s) for s in swaps)
    out = [
        f"# {circuit.name or 'circuit'}: nearest-neighbor compliant listing",
        f"n={circuit.n} m={circuit.m} swaps={total} cnot_overhead={3 * total}",
    ]
    if circuit.m:
        out.append("initial=" + " ".join(map(str, schedule[0].pos)))
    current = schedule[0] if circuit.m else None
    for t, g in enumerate(circuit.gates):
        if t:
            for step in swaps[t - 1]:
                current = apply_swap(current, step)
                out.append(f"swap {step.location} {step.location + 1}")
            if current != schedule[t]:
                raise ValueError(f"swap steps before gate {t + 1} do not reach the scheduled order")
        out.append(f"gate {t + 1} {current.pos[g.a]} {current.pos[g.b]} {g.label}")
    return "\n".join(out) + "\n"


@dataclass
class CompliantListing:
    n: int
    m: int
    swaps: int
    initial: QubitOrder | None
    # ("swap", loc) or ("gate", t, locA, locB, label), in file order
    events: list[tuple] = field(default_factory=list)

    def schedule(self) -> OrderSchedule:
        """Replay the listing into the order seen by each gate."""
        if self.initial is None:
            return OrderSchedule(())
        orders = []
        current = self.initial
        for ev in self.events:
            if ev[0] == "swap":
                current = apply_swap(current, SwapStep(ev[1]))
            else:
                _, _, loc_a, loc_b, _ = ev
                if abs(loc_a - loc_b) != 1:
                    raise CircuitFormatError(f"gate {ev[1]} acts on non-adjacent locations")
                orders.append(current)
        return OrderSchedule(tuple(orders))


def parse_compliant(text: str) -> CompliantListing:
    header: dict[str, str] = {}
    initial = None
    events: list[tuple] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if tokens[0] == "swap":
                loc, nxt = int(tokens[1]), int(tokens[2])
                if nxt != loc + 1:
                    raise CircuitFormatError(f"line {lineno}: swap must name adjacent locations")
                events.append(("swap", loc))
            elif tokens[0] == "gate":
                events.append(("gate", int(tokens[1]), int(tokens[2]), int(tokens[3]),
                               tokens[4] if len(tokens) > 4 else ""))
            elif tokens[0].startswith("initial="):
                initial = QubitOrder([int(tokens[0].split("=", 1)[1]), *map(int, tokens[1:])])
            elif "=" in tokens[0]:
                for tok in tokens:
                    key, value = tok.split("=", 1)
                    header[key] = value
            else:
                raise CircuitFormatError(f"line {lineno}: unrecognized {line!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, CircuitFormatError):
                raise
            raise CircuitFormatError(f"line {lineno}: {exc}") from exc
    try:
        n, m, swaps = int(header["n"]), int(header["m"]), int(header["swaps"])
    except KeyError as exc:
        raise CircuitFormatError(f"missing header field {exc}") from exc
    return CompliantListing(n, m, swaps, initial, events)


# --------------------------------------------------------------------------
# plain pair listing: header "n=<n> m=<m>", then one "<a> <b> [label]" per gate

def format_pairs(circuit: QuantumCircuit) -> str:
    out = [f"# {circuit.name}"] if circuit.name else []
    out.append(f"n={circuit.n} m={circuit.m}")
    out += [f"{g.a + 1} {g.b + 1} {g.label}" for g in circuit.gates]
    return "\n".join(out) + "\n"


def parse_pairs(text: str, name: str = "") -> QuantumCircuit:
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            fields = dict(tok.split("=", 1) for tok in line.split())
            n = int(fields["n"])
            continue
        tokens = line.split()
        try:
            a, b = int(tokens[0]) - 1, int(tokens[1]) - 1
            gates.append(Gate(a, b, tokens[2] if len(tokens) > 2 else "CNOT"))
        except (IndexError, ValueError) as exc:
            raise CircuitFormatError(f"line {lineno}: bad gate line {line!r}") from exc
    if n is None:
        raise CircuitFormatError("missing 'n=' header")
    try:
        return QuantumCircuit(n, tuple(gates), name)
    except ValueError as exc:
        raise CircuitFormatError(str(exc)) from exc


def load_circuit(path) -> QuantumCircuit:
    """Load a ``.real`` file (decomposed) or a plain pair listing."""
    from pathlib import Path

    path = Path(path)
    if path.suffix.lower() == ".real":
        return load_real(path)
    return parse_pairs(path.read_text(), path.stem)
