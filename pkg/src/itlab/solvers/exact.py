"""Exact backtracking search for independent transversals (any r).

Parts are branched on in ascending order of remaining candidates (ties by
part index), candidates in ascending id order. Choosing a vertex blocks
every vertex that would complete an edge with r-1 chosen vertices, and a
branch dies as soon as some open part has no unblocked vertex left.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from itlab.core import PartitionedHypergraph, Transversal, is_independent_transversal


class _BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found", "none" or "budget"
    transversal: Transversal | None
    nodes: int


class _Search:
    def __init__(self, G: PartitionedHypergraph, budget: int | None):
        self.G = G
        self.r = G.r
        self.budget = budget
        self.nodes = 0
        self.parts = [list(p) for p in G.parts]
        self.part_of = G.part_of.tolist()
        self.blocked = [0] * G.id_bound
        self.avail = [len(p) for p in self.parts]
        self.chosen = [False] * G.id_bound
        self.assign: dict[int, int] = {}
        self.open = set(range(G.num_parts))
        if self.r == 2:
            adj = G.adjacency
            self.nbrs = [adj.indices[adj.indptr[v]:adj.indptr[v + 1]].tolist() for v in range(G.id_bound)]
        else:
            indptr, eids = G.incidence
            self.inc = [eids[indptr[v]:indptr[v + 1]].tolist() for v in range(G.id_bound)]
            self.edge_rows = G.edges.tolist()
            self.ecount = [0] * G.num_edges

    def _block(self, u: int, delta: int) -> None:
        b = self.blocked[u]
        self.blocked[u] = b + delta
        if b == 0 and delta > 0:
            self.avail[self.part_of[u]] -= 1
        elif b + delta == 0 and delta < 0:
            self.avail[self.part_of[u]] += 1

    def _free_vertex(self, e: int) -> int:
        return next(x for x in self.edge_rows[e] if not self.chosen[x])

    def choose(self, v: int) -> None:
        self.chosen[v] = True
        if self.r == 2:
            for u in self.nbrs[v]:
                self._block(u, 1)
            return
        target = self.r - 1
        for e in self.inc[v]:
            self.ecount[e] += 1
            if self.ecount[e] == target:
                self._block(self._free_vertex(e), 1)

    def unchoose(self, v: int) -> None:
        if self.r == 2:
            for u in self.nbrs[v]:
                self._block(u, -1)
        else:
            target = self.r - 1
            for e in self.inc[v]:
                if self.ecount[e] == target:
                    self._block(self._free_vertex(e), -1)
                self.ecount[e] -= 1
        self.chosen[v] = False

    def _pick_part(self):
        best, best_avail = None, None
        for i in self.open:
            a = self.avail[i]
            if a == 0:
                return i, 0
            if best is None or a < best_avail or (a == best_avail and i < best):
                best, best_avail = i, a
        return best, best_avail

    def run(self, count: bool, cap: int | None = None) -> int:
        """Depth-first search; returns the number of transversals found (<= cap)."""
        found = 0

        def rec() -> bool:
            nonlocal found
            if not self.open:
                found += 1
                return not count or (cap is not None and found >= cap)
            i, a = self._pick_part()
            if a == 0:
                return False
            self.open.remove(i)
            for v in self.parts[i]:
                if self.blocked[v]:
                    continue
                self.nodes += 1
                if self.budget is not None and self.nodes > self.budget:
                    raise _BudgetExhausted
                self.choose(v)
                self.assign[i] = v
                if rec():
                    return True
                del self.assign[i]
                self.unchoose(v)
            self.open.add(i)
            return False

        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 4 * self.G.num_parts + 1000))
        try:
            rec()
        finally:
            sys.setrecursionlimit(limit)
        return found


def exact_find(G: PartitionedHypergraph, budget: int | None = 10_000_000) -> SearchResult:
    """Find an independent transversal, prove there is none, or run out of budget.

    ``budget`` caps the number of vertex placements (search nodes).
    """
    if any(len(p) == 0 for p in G.parts):
        return SearchResult("none", None, 0)
    search = _Search(G, budget)
    try:
        found = search.run(count=False)
    except _BudgetExhausted:
        return SearchResult("budget", None, search.nodes)
    if not found:
        return SearchResult("none", None, search.nodes)
    T = Transversal(dict(search.assign))
    assert is_independent_transversal(G, T)
    return SearchResult("found", T, search.nodes)


def count_transversals(G: PartitionedHypergraph, cap: int | None = None) -> int:
    """Exact number of independent transversals, saturating at ``cap``."""
    if any(len(p) == 0 for p in G.parts):
        return 0
    if G.num_parts == 0:
        return 1
    return _Search(G, None).run(count=True, cap=cap)


def brute_force_count(G: PartitionedHypergraph) -> int:
    """Reference count by full enumeration of the product of parts (tiny inputs only)."""
    from itertools import product

    total = 0
    edges = [set(e) for e in G.edges.tolist()]
    for pick in product(*G.parts):
        chosen = set(pick)
        if not any(e <= chosen for e in edges):
            total += 1
    return total


def image_mask(G: PartitionedHypergraph, T: Transversal) -> np.ndarray:
    mask = np.zeros(G.id_bound, dtype=bool)
    mask[list(T.assignment.values())] = True
    return mask
