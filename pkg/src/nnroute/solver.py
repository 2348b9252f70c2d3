"""Exact and heuristic minimum-SWAP routing on a linear array.

Every search here is layered: layer t holds the orders in which gate t's two
qubits are adjacent, and moving between layers costs the Kendall tau
distance. The exact solver runs the full forward recursion

    cost[t+1][s'] = min_s cost[t][s] + dist(s, s')

with one of two kernels for the inner minimum:

``bfs``
    dist is the shortest-path metric of the graph on all n! orders whose
    edges are single adjacent swaps, so the minimum is a multi-source BFS
    seeded with the layer-t costs. O(n! * n) per layer.
``matrix``
    explicit distances between the two layers' states, computed as popcounts
    of XOR-ed pairwise-order bit codes. O((2(n-1)!)^2) per layer.

Both give identical costs and identical canonical schedules.
"""
from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuit import Gate, QuantumCircuit
from .permutation import OrderSchedule, QubitOrder, SwapStep, realize_swaps

INF = np.iinfo(np.int32).max // 2
MAX_EXACT_N = 10
MAX_CODE_N = 11  # pair codes must fit in 64 bits


class Mode(enum.Enum):
    EXACT = "exact"
    BEAM = "beam"
    GREEDY = "greedy"


class SolverTimeout(RuntimeError):
    """Time limit reached before any schedule was found."""


@dataclass(frozen=True)
class SolverConfig:
    mode: Mode = Mode.EXACT
    beam_width: int = 64
    time_limit: float | None = None
    incumbent_seed: int | None = None
    thread_count: int = 1
    kernel: str = "bfs"
    prune: bool = True
    half_states: bool = False

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")
        if self.kernel not in ("bfs", "matrix"):
            raise ValueError(f"unknown kernel {self.kernel!r}")


@dataclass
class SolveResult:
    objective: int
    schedule: OrderSchedule
    swaps: list[list[SwapStep]]
    proven_optimal: bool
    elapsed: float = 0.0
    states_expanded: int = 0
    mode: str = ""

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "cnot_overhead": 3 * self.objective,
            "proven_optimal": self.proven_optimal,
            "elapsed": round(self.elapsed, 6),
            "states_expanded": self.states_expanded,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class LayerStates:
    gate: Gate
    orders: tuple[QubitOrder, ...]


# --------------------------------------------------------------------------
# permutation space

def _lex_permutations(n: int) -> np.ndarray:
    """All permutations of 1..n as rows, in lexicographic order."""
    perms = np.ones((1, 1), dtype=np.int8)
    for size in range(2, n + 1):
        blocks = []
        for first in range(1, size + 1):
            rest = perms + (perms >= first)
            head = np.full((len(perms), 1), first, dtype=np.int8)
            blocks.append(np.hstack([head, rest.astype(np.int8)]))
        perms = np.vstack(blocks)
    return perms


def _lehmer_rank(perms: np.ndarray, chunk: int = 1 << 18) -> np.ndarray:
    n = perms.shape[1]
    weights = np.array([math.factorial(n - 1 - i) for i in range(n)], dtype=np.int64)
    out = np.empty(len(perms), dtype=np.int64)
    for lo in range(0, len(perms), chunk):
        p = perms[lo:lo + chunk]
        smaller_after = np.zeros(p.shape, dtype=np.int64)
        for i in range(n - 1):
            smaller_after[:, i] = (p[:, i + 1:] < p[:, i:i + 1]).sum(axis=1)
        out[lo:lo + chunk] = smaller_after @ weights
    return out


class PermutationSpace:
    """All orders of n qubits, indexed lexicographically by their pos vector."""

    def __init__(self, n: int):
        self.n = n
        self.pos = _lex_permutations(n)
        nbrs = np.empty((len(self.pos), n - 1), dtype=np.int32)
        for loc in range(1, n):
            moved = self.pos + (self.pos == loc).astype(np.int8) - (self.pos == loc + 1).astype(np.int8)
            nbrs[:, loc - 1] = _lehmer_rank(moved)
        self.neighbors = nbrs

    def __len__(self):
        return len(self.pos)

    def layer(self, pair: tuple[int, int]) -> np.ndarray:
        a, b = pair
        diff = self.pos[:, a].astype(np.int16) - self.pos[:, b]
        return np.flatnonzero(np.abs(diff) == 1)

    def index_of(self, order: QubitOrder) -> int:
        return int(_lehmer_rank(np.array([order.pos], dtype=np.int8))[0])

    def order(self, idx) -> QubitOrder:
        return QubitOrder(self.pos[int(idx)].tolist())


@lru_cache(maxsize=4)
def permutation_space(n: int) -> PermutationSpace:
    return PermutationSpace(n)


def pair_codes(pos: np.ndarray) -> np.ndarray:
    """Bit (i, j) of the code is set iff qubit i is left of qubit j."""
    n = pos.shape[1]
    if n > MAX_CODE_N:
        raise ValueError(f"pair codes support n <= {MAX_CODE_N}")
    codes = np.zeros(len(pos), dtype=np.uint64)
    bit = 0
    for i in range(n):
        for j in range(i + 1, n):
            codes |= (pos[:, i] < pos[:, j]).astype(np.uint64) << np.uint64(bit)
            bit += 1
    return codes


def _distances(codes_a: np.ndarray, codes_b: np.ndarray) -> np.ndarray:
    return np.bitwise_count(codes_a[:, None] ^ codes_b[None, :]).astype(np.int32)


def enumerate_feasible_orders(n: int, g: Gate) -> LayerStates:
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if n <= MAX_EXACT_N:
        space = permutation_space(n)
        orders = tuple(QubitOrder(p) for p in space.pos[space.layer(g.pair)].tolist())
        return LayerStates(g, orders)
    raise ValueError(f"enumerating 2*(n-1)! orders is limited to n <= {MAX_EXACT_N}")


# --------------------------------------------------------------------------
# exact layered search

class _Clock:
    def __init__(self, limit):
        self.start = time.perf_counter()
        self.limit = limit

    @property
    def elapsed(self):
        return time.perf_counter() - self.start

    def expired(self):
        return self.limit is not None and self.elapsed > self.limit


class _Expired(Exception):
    pass


def _bfs_transition(space: PermutationSpace, src: np.ndarray, cost: np.ndarray,
                    dst: np.ndarray, cap: int, clock: _Clock) -> np.ndarray:
    """min over src states s of cost[s] + dist(s, d), for every d in dst."""
    field_ = np.full(len(space), INF, dtype=np.int32)
    live = cost < INF
    src, cost = src[live], cost[live]
    if not len(src):
        return np.full(len(dst), INF, dtype=np.int32)
    field_[src] = cost
    order = np.argsort(cost, kind="stable")
    src, cost = src[order], cost[order]
    level = int(cost[0])
    nxt = 0
    frontier = np.empty(0, dtype=np.int64)
    while True:
        hi = np.searchsorted(cost, level, side="right")
        seeds = src[nxt:hi]
        nxt = hi
        seeds = seeds[field_[seeds] == level]
        frontier = np.union1d(frontier, seeds) if len(frontier) else seeds
        if not len(frontier) and nxt >= len(src):
            break
        if level >= cap or field_[dst].max() <= level:
            break
        if clock.expired():
            raise _Expired
        reached = space.neighbors[frontier].ravel()
        reached = reached[field_[reached] > level + 1]
        reached = np.unique(reached)
        field_[reached] = level + 1
        frontier = reached
        level += 1
    out = field_[dst]
    out[out > cap] = INF
    return out


def _min_plus(codes_src: np.ndarray, cost: np.ndarray, codes_dst: np.ndarray,
              threads: int = 1, chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """For each destination: cheapest source cost + distance, and that source.

    Sources are scanned in their given order, so ties go to the earliest.
    """
    best = np.full(len(codes_dst), INF, dtype=np.int32)
    arg = np.zeros(len(codes_dst), dtype=np.int64)
    if not len(codes_src):
        return best, arg
    rows = max(1, chunk * 64 // max(len(codes_src), 1))

    def block(lo):
        total = _distances(codes_src, codes_dst[lo:lo + rows]) + cost[:, None]
        a = np.argmin(total, axis=0)
        return lo, total[a, np.arange(total.shape[1])], a

    starts = range(0, len(codes_dst), rows)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(lo) for lo in starts]
    for lo, vals, a in parts:
        best[lo:lo + len(vals)] = vals
        arg[lo:lo + len(vals)] = a
    return best, arg


def _matrix_transition(codes_src: np.ndarray, cost: np.ndarray, codes_dst: np.ndarray,
                       threads: int) -> np.ndarray:
    live = cost < INF
    return _min_plus(codes_src[live], cost[live], codes_dst, threads)[0]


def _backtrack(space: PermutationSpace, layers: list[np.ndarray], costs: list[np.ndarray]) -> list[int]:
    """Lexicographically smallest optimal state per layer, walking backwards."""
    last = costs[-1]
    pick = int(np.argmin(last))
    path = [int(layers[-1][pick])]
    for t in range(len(layers) - 2, -1, -1):
        target = int(costs[t + 1][pick])
        nxt_code = pair_codes(space.pos[[path[-1]]])
        total = costs[t].astype(np.int64) + _distances(pair_codes(space.pos[layers[t]]), nxt_code)[:, 0]
        total[costs[t] >= INF] = np.iinfo(np.int64).max
        pick = int(np.argmin(total))
        if total[pick] != target:
            raise AssertionError("inconsistent cost tables during reconstruction")
        path.append(int(layers[t][pick]))
    path.reverse()
    return path


def _finish(circuit, orders, proven, clock, expanded, mode) -> SolveResult:
    schedule = OrderSchedule(tuple(orders))
    swaps = [realize_swaps(a, b) for a, b in zip(orders, orders[1:])]
    return SolveResult(sum(len(s) for s in swaps), schedule, swaps, proven, clock.elapsed, expanded, mode)


def _empty_result(clock, mode) -> SolveResult:
    return SolveResult(0, OrderSchedule(()), [], True, clock.elapsed, 0, mode)


def solve_exact_dp(circuit: QuantumCircuit, config: SolverConfig | None = None) -> SolveResult:
    config = config or SolverConfig()
    clock = _Clock(config.time_limit)
    n, m = circuit.n, circuit.m
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if m == 0:
        return _empty_result(clock, "exact")
    if n > MAX_EXACT_N:
        raise ValueError(
            f"exact layered search is limited to n <= {MAX_EXACT_N}; export the ILP instead"
        )

    incumbent: SolveResult | None = None
    cap = INF
    if config.prune:
        if config.incumbent_seed is not None:
            cap = config.incumbent_seed
        if n >= 4:
            incumbent = solve_beam(circuit, SolverConfig(mode=Mode.BEAM, beam_width=min(config.beam_width, 32)))
            cap = min(cap, incumbent.objective)

    try:
        space = permutation_space(n)
        # the recursion runs last gate first, so its tables are costs-to-go and
        # the walk back out of them yields the lexicographically smallest
        # optimal schedule read from gate 1
        pairs = circuit.pairs()[::-1]
        layers = [space.layer(pairs[0])]
        if config.half_states:
            a, b = pairs[0]
            first = layers[0]
            layers[0] = first[space.pos[first, a] < space.pos[first, b]]
        costs = [np.zeros(len(layers[0]), dtype=np.int32)]
        expanded = len(layers[0])
        codes_prev = pair_codes(space.pos[layers[0]]) if config.kernel == "matrix" else None
        for t in range(1, m):
            if clock.expired():
                raise _Expired
            if pairs[t] == pairs[t - 1]:
                layers.append(layers[-1])
                costs.append(costs[-1].copy())
                continue
            dst = space.layer(pairs[t])
            if config.kernel == "bfs":
                nxt = _bfs_transition(space, layers[-1], costs[-1], dst, cap, clock)
            else:
                codes_dst = pair_codes(space.pos[dst])
                nxt = _matrix_transition(codes_prev, costs[-1], codes_dst, config.thread_count)
                nxt[nxt > cap] = INF
                codes_prev = codes_dst
            layers.append(dst)
            costs.append(nxt)
            expanded += int((nxt < INF).sum())
    except _Expired:
        if incumbent is None:
            raise SolverTimeout(f"time limit of {config.time_limit}s reached without a schedule")
        incumbent.proven_optimal = False
        incumbent.elapsed = clock.elapsed
        incumbent.mode = "exact"
        return incumbent

    if costs[-1].min() >= INF:
        # the seed bound was below the optimum; nothing survived the pruning
        if incumbent is not None and config.incumbent_seed is None:
            raise AssertionError("pruning removed every state despite a feasible incumbent")
        raise ValueError(f"no schedule with at most {cap} swaps exists")
    path = _backtrack(space, layers, costs)
    orders = [space.order(i) for i in reversed(path)]
    return _finish(circuit, orders, True, clock, expanded, "exact")


# --------------------------------------------------------------------------
# heuristics

def _layer_positions(n: int, pair: tuple[int, int]) -> np.ndarray:
    if n <= MAX_EXACT_N:
        space = permutation_space(n)
        return space.pos[space.layer(pair)]
    raise ValueError(f"beam search enumerates full layers and is limited to n <= {MAX_EXACT_N}")


def solve_beam(circuit: QuantumCircuit, config: SolverConfig | None = None) -> SolveResult:
    """Layered search keeping only the ``beam_width`` cheapest states per layer.

    Ties are broken by the lexicographic order of the pos vector. The state
    the greedy walk visits is always kept (it displaces the worst survivor),
    so the result is never worse than :func:`solve_greedy`. With a width at
    least the layer size this is the exact recursion.
    """
    config = config or SolverConfig(mode=Mode.BEAM)
    clock = _Clock(config.time_limit)
    n, m = circuit.n, circuit.m
    if m == 0:
        return _empty_result(clock, "beam")
    width = config.beam_width
    pairs = circuit.pairs()
    anchor = np.array([o.pos for o in solve_greedy(circuit).schedule], dtype=np.int8)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def layer(t):
        if pairs[t] not in cache:
            cache[pairs[t]] = _layer_positions(n, pairs[t])
        return cache[pairs[t]]

    def survivors(cand, cost, t):
        # stable sort on cost keeps lexicographic order among ties
        keep = np.argsort(cost, kind="stable")[:width]
        g = int(np.flatnonzero((cand == anchor[t]).all(axis=1))[0])
        if g not in keep:
            keep[-1] = g
        return np.sort(keep)

    cand = layer(0)
    keep = survivors(cand, np.zeros(len(cand), dtype=np.int32), 0)
    saturated = len(keep) == len(cand)
    kept_pos = [cand[keep]]
    kept_cost = [np.zeros(len(keep), dtype=np.int32)]
    parents: list[np.ndarray] = []
    expanded = len(keep)

    for t in range(1, m):
        if clock.expired():
            break
        prev_pos, prev_cost = kept_pos[-1], kept_cost[-1]
        cand = layer(t)
        cost, parent = _min_plus(pair_codes(prev_pos), prev_cost, pair_codes(cand), config.thread_count)
        expanded += len(cand) * len(prev_pos)
        keep = survivors(cand, cost, t)
        saturated &= len(keep) == len(cand)
        kept_pos.append(cand[keep])
        kept_cost.append(cost[keep].astype(np.int32))
        parents.append(parent[keep])
    else:
        idx = int(np.argmin(kept_cost[-1]))
        path = [idx]
        for t in range(m - 2, -1, -1):
            idx = int(parents[t][idx])
            path.append(idx)
        path.reverse()
        orders = [QubitOrder(kept_pos[t][i].tolist()) for t, i in enumerate(path)]
        return _finish(circuit, orders, saturated, clock, expanded, "beam")

    # out of time: fall back to the greedy walk
    result = solve_greedy(circuit)
    result.mode, result.elapsed = "beam", clock.elapsed
    return result


def solve_greedy(circuit: QuantumCircuit, config: SolverConfig | None = None) -> SolveResult:
    """Walk both qubits of each gate toward each other until they touch.

    Starts from the identity order. For a gap of d locations the right-hand
    qubit moves ceil((d-1)/2) steps left and the left-hand one the rest.
    """
    clock = _Clock(None)
    n = circuit.n
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if circuit.m == 0:
        return _empty_result(clock, "greedy")
    at = list(range(n))  # at[loc0] = qubit
    pos = list(range(n))  # pos[qubit] = loc0
    orders = []
    for g in circuit.gates:
        left, right = sorted((pos[g.a], pos[g.b]))
        gap = right - left
        right_moves = gap // 2
        left_moves = gap - 1 - right_moves
        for loc in range(right - 1, right - 1 - right_moves, -1):
            _swap(at, pos, loc)
        for loc in range(left, left + left_moves):
            _swap(at, pos, loc)
        orders.append(QubitOrder(p + 1 for p in pos))
    return _finish(circuit, orders, False, clock, len(orders), "greedy")


def _swap(at: list[int], pos: list[int], loc: int) -> None:
    qa, qb = at[loc], at[loc + 1]
    at[loc], at[loc + 1] = qb, qa
    pos[qa], pos[qb] = loc + 1, loc


def solve(circuit: QuantumCircuit, config: SolverConfig | None = None) -> SolveResult:
    config = config or SolverConfig()
    if config.mode is Mode.EXACT:
        return solve_exact_dp(circuit, config)
    if config.mode is Mode.BEAM:
        return solve_beam(circuit, config)
    return solve_greedy(circuit, config)
