"""Reference implementations used only by the tests.

Each oracle recomputes a quantity from first principles with plain Python
sets and itertools, sharing no code with the package beyond reading the
public fields of an instance.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product


def it_count(parts, edges) -> int:
    """Number of picks (one vertex per part) containing no edge."""
    edge_sets = [frozenset(e) for e in edges]
    total = 0
    for pick in product(*parts):
        chosen = set(pick)
        if not any(e <= chosen for e in edge_sets):
            total += 1
    return total


def list_colouring_count(num_vertices: int, base_edges, lists) -> int:
    total = 0
    for colours in product(*[sorted(set(L)) for L in lists]):
        if all(colours[u] != colours[w] for u, w in base_edges):
            total += 1
    return total


def first_moment_exact(n: int, k: int, r: int, s: int) -> Fraction:
    return Fraction(k) ** n * (1 - Fraction(s, k ** r)) ** math.comb(n, r)


def max_common_neighbours(adjacency, r: int) -> int:
    sets = [set(nb) for nb in adjacency]
    return max((len(set.intersection(*(sets[a] for a in group))) for group in combinations(range(len(sets)), r)),
               default=0)


def part_set_edge_counts(parts, edges, r: int) -> dict[tuple[int, ...], tuple[int, bool]]:
    """For every r-set of parts: (number of edges inside it, whether they form a matching)."""
    owner = {v: i for i, p in enumerate(parts) for v in p}
    out = {}
    for group in combinations(range(len(parts)), r):
        inside = [e for e in edges if sorted(owner[v] for v in e) == list(group)]
        used = [v for e in inside for v in e]
        out[group] = (len(inside), len(used) == len(set(used)))
    return out


def has_clique(adj: dict[int, set[int]], vertices, size: int) -> bool:
    return any(all(b in adj[a] for a, b in combinations(c, 2)) for c in combinations(sorted(vertices), size))


def gf_q2_norm_by_power(a: int, b: int, q: int, c: int) -> int:
    """N(a + b w) = (a + b w)^(q+1) in F_q[w]/(w^2 - c), by repeated multiplication."""
    x, y = 1, 0
    for _ in range(q + 1):
        x, y = (x * a + y * b * c) % q, (x * b + y * a) % q
    assert y == 0, "the norm must land in the prime field"
    return x


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))
