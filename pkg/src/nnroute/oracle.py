"""Brute-force optimum for tiny circuits, used only to cross-check the solvers.

Deliberately plain: every layer lists all n! orders with itertools, filters
them with its own adjacency test, and relaxes every pair of states with a
quadratic inversion count. Nothing is shared with :mod:`nnroute.solver`.
"""
from __future__ import annotations

from itertools import permutations

MAX_N = 5
MAX_M = 12


def _inversions_between(p, q):
    n = len(p)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (p[i] - p[j]) * (q[i] - q[j]) < 0:
                count += 1
    return count


def _touching(p, a, b):
    return p[a] - p[b] in (1, -1)


def brute_force_oracle(circuit) -> int:
    n, gates = circuit.n, circuit.gates
    if n > MAX_N or len(gates) > MAX_M:
        raise ValueError(f"oracle is limited to n <= {MAX_N} and m <= {MAX_M}")
    if not gates:
        return 0
    everything = list(permutations(range(1, n + 1)))
    best = {p: 0 for p in everything if _touching(p, gates[0].a, gates[0].b)}
    for g in gates[1:]:
        layer = [p for p in everything if _touching(p, g.a, g.b)]
        best = {
            q: min(cost + _inversions_between(p, q) for p, cost in best.items())
            for q in layer
        }
    return min(best.values())
