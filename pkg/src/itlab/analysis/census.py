"""Exhaustive censuses that certify constructions.

Censuses never sample silently: when the exhaustive work exceeds the
budget they raise :class:`CensusBudgetError`. The explicitly sampled
variant is a separate function and says so in its result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import TYPE_CHECKING

import numpy as np

from itlab.core import PartitionedHypergraph

if TYPE_CHECKING:
    from itlab.constructions.hosts import BipartiteHost


class CensusBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class CommonNeighbourCensus:
    r: int
    max_common: int
    witness: tuple[int, ...] | None
    subsets_checked: int
    sampled: bool = False


def host_matrix(H: "BipartiteHost") -> np.ndarray:
    M = np.zeros((H.n, H.m), dtype=np.int32)
    for a, nbrs in enumerate(H.adjacency):
        M[a, list(nbrs)] = 1
    return M


def common_neighbour_census(H: "BipartiteHost", r: int, budget: int = 5_000_000) -> CommonNeighbourCensus:
    """Exact maximum number of common neighbours over all r-subsets of A."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    total = comb(H.n, r)
    if total > budget:
        raise CensusBudgetError(f"C({H.n},{r}) = {total} subsets exceeds census budget {budget}")
    if total == 0:
        return CommonNeighbourCensus(r, 0, None, 0)
    M = host_matrix(H)
    if r == 1:
        deg = M.sum(axis=1)
        a = int(np.argmax(deg))
        return CommonNeighbourCensus(1, int(deg[a]), (a,), total)

    best = [-1, None]

    def rec(prefix: list[int], vec: np.ndarray, start: int) -> None:
        depth = len(prefix)
        if depth == r - 1:
            if start >= H.n:
                return
            counts = M[start:] @ vec
            j = int(np.argmax(counts))
            if counts[j] > best[0]:
                best[0] = int(counts[j])
                best[1] = tuple(prefix) + (start + j,)
            return
        for i in range(start, H.n - (r - 1 - depth)):
            rec(prefix + [i], vec * M[i], i + 1)

    rec([], np.ones(H.m, dtype=np.int32), 0)
    return CommonNeighbourCensus(r, best[0], best[1], total)


def sampled_common_neighbour_census(H: "BipartiteHost", r: int, samples: int, seed: int = 0,
                                    chunk: int = 20_000) -> CommonNeighbourCensus:
    """Maximum over ``samples`` uniformly random r-subsets (flagged as sampled)."""
    from itlab.seeding import make_rng

    if H.n < r:
        return CommonNeighbourCensus(r, 0, None, 0, sampled=True)
    rng = make_rng(seed)
    M = host_matrix(H).astype(bool)
    best, witness, done = -1, None, 0
    while done < samples:
        b = min(chunk, samples - done)
        keys = rng.random((b, H.n))
        idx = np.argpartition(keys, r - 1, axis=1)[:, :r] if r < H.n else np.tile(np.arange(H.n), (b, 1))
        common = M[idx].all(axis=1).sum(axis=1)
        j = int(np.argmax(common))
        if common[j] > best:
            best, witness = int(common[j]), tuple(sorted(int(x) for x in idx[j]))
        done += b
    return CommonNeighbourCensus(r, best, witness, samples, sampled=True)


@dataclass
class MatchingCensus:
    """Edge counts for every r-set of parts.

    Only r-sets that carry at least one edge are listed in ``counts``; all
    other r-sets have zero edges (which is trivially a matching).
    """

    r: int
    num_sets: int
    counts: dict[tuple[int, ...], int] = field(default_factory=dict)
    non_matching: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def max_edges(self) -> int:
        return max(self.counts.values(), default=0)

    @property
    def min_edges(self) -> int:
        if len(self.counts) < self.num_sets:
            return 0
        return min(self.counts.values(), default=0)

    @property
    def all_matching(self) -> bool:
        return not self.non_matching

    def violations(self, s: int) -> list[str]:
        out = [f"parts {key} induce a non-matching" for key in self.non_matching]
        out += [f"parts {key} induce {c} edges, expected {s}" for key, c in self.counts.items() if c != s]
        missing = self.num_sets - len(self.counts)
        if s > 0 and missing:
            out.append(f"{missing} r-sets of parts induce 0 edges, expected {s}")
        return out

    def is_regular(self, s: int) -> bool:
        """The (n,k,r,s) predicate minus part sizes: every r-set has s matching edges."""
        return not self.violations(s)

    def within(self, s: int) -> bool:
        return self.all_matching and self.max_edges <= s


def matching_census(G: PartitionedHypergraph) -> MatchingCensus:
    """Exhaustive census of edges induced by each r-set of parts.

    Cost is linear in the number of edges because edges are grouped by the
    r-set of parts they span.
    """
    census = MatchingCensus(G.r, comb(G.num_parts, G.r))
    if not G.num_edges:
        return census
    pe = G.part_of[G.edges]
    order = np.argsort(pe, axis=1)
    keys = np.take_along_axis(pe, order, axis=1)
    verts = np.take_along_axis(G.edges, order, axis=1)
    uniq, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    # A group is a matching iff no vertex occurs twice in it.
    pairs = np.stack([np.repeat(inverse, G.r), verts.ravel()], axis=1)
    upairs, pair_counts = np.unique(pairs, axis=0, return_counts=True)
    bad_groups = np.unique(upairs[pair_counts > 1, 0])
    census.counts = {tuple(int(x) for x in key): int(c) for key, c in zip(uniq, counts)}
    census.non_matching = [tuple(int(x) for x in uniq[g]) for g in bad_groups]
    return census


def find_clique(G: PartitionedHypergraph, vertices, size: int) -> list[int] | None:
    """A clique of the given size inside G[vertices], or None (graphs only)."""
    vs = sorted(int(v) for v in vertices)
    inside = set(vs)
    adj = {v: {int(u) for u in G.neighbours(v)} & inside for v in vs}

    def extend(clique: list[int], cands: list[int]) -> list[int] | None:
        if len(clique) == size:
            return clique
        for idx, v in enumerate(cands):
            if len(clique) + len(cands) - idx < size:
                return None
            found = extend(clique + [v], [u for u in cands[idx + 1:] if u in adj[v]])
            if found:
                return found
        return None

    if size <= 0:
        return []
    return extend([], vs)
