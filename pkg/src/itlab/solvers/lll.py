"""Resampling (Moser-Tardos style) sampler for graphs whose parts are large
relative to their average degree."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from itlab.core import InstanceError, PartitionedHypergraph, Transversal, is_independent_transversal
from itlab.seeding import make_rng


@dataclass(frozen=True)
class LLLResult:
    transversal: Transversal | None
    resamples: int

    @property
    def ok(self) -> bool:
        return self.transversal is not None


def lll_sample(G: PartitionedHypergraph, max_rounds: int, seed: int) -> LLLResult:
    """Uniform vertex per part; while an edge is spanned, resample both its parts.

    The violated edge with the lowest index (in sorted edge order) is fixed
    first. Fails after ``max_rounds`` resampling rounds.
    """
    if G.r != 2:
        raise InstanceError("lll_sample is defined for graphs only (r=2)")
    for i, p in enumerate(G.parts):
        if not p:
            raise InstanceError(f"part {i} is empty")
    rng = make_rng(seed)
    parts = [np.asarray(p, dtype=np.int64) for p in G.parts]
    m = G.num_parts
    sizes = G.part_sizes
    picks = (rng.random(m) * sizes).astype(np.int64)
    current = np.array([parts[i][picks[i]] for i in range(m)], dtype=np.int64)
    mask = np.zeros(G.id_bound, dtype=bool)
    mask[current] = True
    edges = G.edges
    if not len(edges):
        return LLLResult(Transversal(dict(enumerate(current.tolist()))), 0)
    violated = mask[edges[:, 0]] & mask[edges[:, 1]]
    heap = np.flatnonzero(violated).tolist()
    heapq.heapify(heap)
    indptr, eids = G.incidence
    part_of = G.part_of
    e0, e1 = edges[:, 0], edges[:, 1]
    rounds = 0
    while heap:
        e = heapq.heappop(heap)
        if not violated[e]:
            continue
        if rounds >= max_rounds:
            return LLLResult(None, rounds)
        rounds += 1
        for i in (part_of[e0[e]], part_of[e1[e]]):
            old = current[i]
            mask[old] = False
            inc = eids[indptr[old]:indptr[old + 1]]
            violated[inc] = False
            new = parts[i][int(rng.random() * sizes[i])]
            current[i] = new
            mask[new] = True
            inc = eids[indptr[new]:indptr[new + 1]]
            hit = inc[mask[e0[inc]] & mask[e1[inc]]]
            if len(hit):
                violated[hit] = True
                for h in hit.tolist():
                    heapq.heappush(heap, h)
    T = Transversal(dict(enumerate(current.tolist())))
    if not is_independent_transversal(G, T):
        raise AssertionError("lll_sample produced an invalid transversal")
    return LLLResult(T, rounds)
