"""Qubit orders on a linear array and the SWAP distance between them.

An order is stored qubit -> location: ``pos[q]`` is the 1-based location of
(0-based) qubit ``q``. Two qubits interact legally when their locations
differ by exactly one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True, order=True)
class QubitOrder:
    pos: tuple[int, ...]

    def __init__(self, pos: Iterable[int]):
        pos = tuple(int(p) for p in pos)
        if sorted(pos) != list(range(1, len(pos) + 1)):
            raise ValueError(f"not a permutation of 1..{len(pos)}: {pos}")
        object.__setattr__(self, "pos", pos)

    @property
    def n(self) -> int:
        return len(self.pos)

    @classmethod
    def identity(cls, n: int) -> QubitOrder:
        return cls(range(1, n + 1))

    @classmethod
    def from_locations(cls, qubits: Sequence[int]) -> QubitOrder:
        """Build from the location view: ``qubits[l-1]`` is the qubit at location ``l``."""
        pos = [0] * len(qubits)
        for loc, q in enumerate(qubits, 1):
            pos[q] = loc
        return cls(pos)

    def locations(self) -> tuple[int, ...]:
        """Inverse view: the qubit sitting at each location, left to right."""
        out = [0] * len(self.pos)
        for q, loc in enumerate(self.pos):
            out[loc - 1] = q
        return tuple(out)

    def adjacent(self, a: int, b: int) -> bool:
        return abs(self.pos[a] - self.pos[b]) == 1

    def __str__(self):
        return " ".join(map(str, self.pos))


@dataclass(frozen=True)
class SwapStep:
    """Exchange the contents of locations ``location`` and ``location + 1``."""

    location: int

    def __post_init__(self):
        if self.location < 1:
            raise ValueError(f"swap location must be >= 1, got {self.location}")


@dataclass(frozen=True)
class OrderSchedule:
    orders: tuple[QubitOrder, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(self.orders))
        if self.orders:
            n = self.orders[0].n
            if any(o.n != n for o in self.orders):
                raise ValueError("all orders in a schedule must have the same size")

    def __len__(self):
        return len(self.orders)

    def __iter__(self) -> Iterator[QubitOrder]:
        return iter(self.orders)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return self.orders[item]
        return self.orders[item]


@dataclass
class VerifyReport:
    feasible: bool
    total_swaps: int
    per_gate_ok: list[bool] = field(default_factory=list)
    per_transition_cost: list[int] = field(default_factory=list)
    budget: int | None = None

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.total_swaps <= self.budget

    def summary(self) -> str:
        bad = [t + 1 for t, ok in enumerate(self.per_gate_ok) if not ok]
        lines = [
            f"feasible: {self.feasible}",
            f"total_swaps: {self.total_swaps}",
            f"cnot_overhead: {3 * self.total_swaps}",
        ]
        if self.budget is not None:
            lines.append(f"budget: {self.budget} ({'ok' if self.within_budget else 'exceeded'})")
        if bad:
            lines.append("non-adjacent gates: " + " ".join(map(str, bad)))
        return "\n".join(lines)


def _check_sizes(a: QubitOrder, b: QubitOrder) -> None:
    if a.n != b.n:
        raise ValueError(f"orders of different size: {a.n} vs {b.n}")


def kendall_tau_naive(a: QubitOrder, b: QubitOrder) -> int:
    """Count qubit pairs whose relative order differs, pair by pair."""
    _check_sizes(a, b)
    p, q = a.pos, b.pos
    n = len(p)
    return sum(
        (p[i] < p[j]) != (q[i] < q[j]) for i in range(n) for j in range(i + 1, n)
    )


def _count_inversions(seq: list[int]) -> tuple[list[int], int]:
    if len(seq) <= 1:
        return seq, 0
    mid = len(seq) // 2
    left, x = _count_inversions(seq[:mid])
    right, y = _count_inversions(seq[mid:])
    merged = []
    inv = x + y
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            inv += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def kendall_tau(a: QubitOrder, b: QubitOrder) -> int:
    """Minimum number of adjacent swaps turning ``a`` into ``b``.

    Reads the qubits left to right in ``a`` and counts inversions of their
    target locations in ``b`` with a merge sort, O(n log n).
    """
    _check_sizes(a, b)
    targets = [b.pos[q] for q in a.locations()]
    return _count_inversions(targets)[1]


def apply_swap(order: QubitOrder, step: SwapStep) -> QubitOrder:
    loc = step.location
    if not 1 <= loc < order.n:
        raise ValueError(f"swap location {loc} out of range for n={order.n}")
    pos = list(order.pos)
    for q, p in enumerate(pos):
        if p == loc:
            pos[q] = loc + 1
        elif p == loc + 1:
            pos[q] = loc
    return QubitOrder(pos)


def realize_swaps(a: QubitOrder, b: QubitOrder) -> list[SwapStep]:
    """Adjacent swaps taking ``a`` to ``b``, one per inversion.

    Always swaps the leftmost adjacent pair that is out of place, so the
    result is deterministic.
    """
    _check_sizes(a, b)
    arr = [b.pos[q] for q in a.locations()]
    steps = []
    i = 0
    while i < len(arr) - 1:
        if arr[i] > arr[i + 1]:
            arr[i], arr[i + 1] = arr[i + 1], arr[i]
            steps.append(SwapStep(i + 1))
            i = max(i - 1, 0)
        else:
            i += 1
    return steps


def verify_schedule(circuit, schedule: OrderSchedule | Sequence[QubitOrder], budget: int | None = None) -> VerifyReport:
    orders = list(schedule)
    if len(orders) != circuit.m:
        raise ValueError(f"schedule has {len(orders)} orders but the circuit has {circuit.m} gates")
    for o in orders:
        if o.n != circuit.n:
            raise ValueError(f"order of size {o.n} for a {circuit.n}-qubit circuit")
    per_gate = [o.adjacent(g.a, g.b) for o, g in zip(orders, circuit.gates)]
    costs = [kendall_tau(x, y) for x, y in zip(orders, orders[1:])]
    total = sum(costs)
    feasible = all(per_gate) and (budget is None or total <= budget)
    return VerifyReport(feasible, total, per_gate, costs, budget)


# --------------------------------------------------------------------------
# schedule text format: one order per line, pos[1..n], '#' comments

def format_schedule(schedule: OrderSchedule | Sequence[QubitOrder]) -> str:
    return "".join(f"{o}\n" for o in schedule)


def parse_schedule(text: str) -> OrderSchedule:
    orders = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            orders.append(QubitOrder(int(tok) for tok in line.split()))
        except ValueError as exc:
            raise ValueError(f"schedule line {lineno}: {exc}") from exc
    return OrderSchedule(tuple(orders))
