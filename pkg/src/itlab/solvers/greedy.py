"""Greedy baseline: one pass over the parts, lowest-degree survivor wins."""

from __future__ import annotations

import numpy as np

from itlab.core import PartitionedHypergraph, Transversal


def greedy_find(G: PartitionedHypergraph) -> Transversal | None:
    G._require_graph()
    live = G.part_of >= 0
    deg = G.degrees
    adj = G.adjacency
    assignment = {}
    for i, p in enumerate(G.parts):
        cand = np.array([v for v in p if live[v]], dtype=np.int64)
        if not len(cand):
            return None
        v = int(cand[np.argmin(deg[cand])])
        assignment[i] = v
        live[adj.indices[adj.indptr[v]:adj.indptr[v + 1]]] = False
    return Transversal(assignment)
