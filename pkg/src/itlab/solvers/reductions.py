"""Instance reductions: max-degree trimming, one-step sparsification,
K_{t+1}-free transversals via min-monochromatic colourings, and the
vertex-colour graph of a list-colouring problem."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from itlab.core import (
    InstanceError,
    PartitionedHypergraph,
    Transversal,
    is_independent_transversal,
    local_degree,
    max_part_avg_degree,
)
from itlab.seeding import derive_seed, make_rng

_TOL = 1e-9


class ReductionError(ValueError):
    pass


def max_degree_trim(G: PartitionedHypergraph, eps: float) -> tuple[PartitionedHypergraph, float]:
    """Drop every vertex of degree > 8D/eps, where D is the largest part average degree.

    Returns the induced instance and D' = D / (1 - eps/8), after checking
    part sizes >= (1 + eps/2) D', average degrees <= D' and maximum degree
    <= 8 D'/eps on the result.
    """
    if not 0 < eps < 1:
        raise ReductionError(f"eps must lie in (0, 1), got {eps}")
    D = max_part_avg_degree(G)
    sizes = G.part_sizes
    for i, size in enumerate(sizes):
        if size < (1 + eps) * D - _TOL or size == 0:
            raise ReductionError(f"part {i} has size {size} < (1+eps)D = {(1 + eps) * D:.4g}")
    deg = G.degrees
    threshold = 8 * D / eps
    bad = (deg > threshold) & (G.part_of >= 0)
    for i, p in enumerate(G.parts):
        removed = int(bad[list(p)].sum())
        if removed > eps * len(p) / 8 + _TOL:
            raise ReductionError(f"part {i}: {removed} high-degree vertices exceed eps|V_i|/8")
    H = G.induced(~bad) if bad.any() else G
    D2 = D / (1 - eps / 8)
    if D2 > 0:
        for i, size in enumerate(H.part_sizes):
            if size < (1 + eps / 2) * D2 - _TOL:
                raise ReductionError(f"after trimming, part {i} has size {size} < (1+eps/2)D' = {(1 + eps / 2) * D2:.4g}")
        if max_part_avg_degree(H) > D2 + _TOL:
            raise ReductionError("after trimming, a part exceeds average degree D'")
        if H.num_edges and H.degrees.max() > 8 * D2 / eps + _TOL:
            raise ReductionError("after trimming, maximum degree exceeds 8D'/eps")
    return H, D2


def sparsify_local_degree(G: PartitionedHypergraph, gamma: float, seed: int, eps: float = 0.5,
                          retries: int = 50) -> PartitionedHypergraph:
    """Keep each vertex independently with probability D^(gamma - 1).

    A sample is accepted when every part keeps >= (1 + eps/2) D' vertices,
    every part average degree is <= D' = (1 + eps/4) D^gamma and the local
    degree is <= log^2 D'. Failed samples are redrawn with derived seeds.
    """
    if G.r != 2:
        raise InstanceError("sparsification is defined for graphs only (r=2)")
    if not 0 < gamma <= 1:
        raise ReductionError(f"gamma must lie in (0, 1], got {gamma}")
    D = max_part_avg_degree(G)
    if D < 1:
        raise ReductionError(f"need D >= 1 to sparsify, got D={D:.4g}")
    ld = local_degree(G)
    if ld > D ** (1 - gamma) + _TOL:
        raise ReductionError(f"local degree {ld} exceeds D^(1-gamma) = {D ** (1 - gamma):.4g}")
    keep_p = D ** (gamma - 1)
    Dp = (1 + eps / 4) * D ** gamma
    ld_cap = math.log(Dp) ** 2 if Dp > 1 else 0.0
    if keep_p >= 1:
        return G
    failure = ""
    for attempt in range(retries):
        rng = make_rng(derive_seed(seed, attempt))
        keep = rng.random(G.id_bound) < keep_p
        H = G.induced(keep)
        small = int(np.argmin(H.part_sizes))
        if H.part_sizes[small] < (1 + eps / 2) * Dp:
            failure = f"part {small} kept {H.part_sizes[small]} < (1+eps/2)D' = {(1 + eps / 2) * Dp:.3g}"
            continue
        avg = max_part_avg_degree(H)
        if avg > Dp:
            failure = f"max part average degree {avg:.3g} > D' = {Dp:.3g}"
            continue
        ldh = local_degree(H)
        if ldh > ld_cap:
            failure = f"local degree {ldh} > log^2 D' = {ld_cap:.3g}"
            continue
        return H
    raise ReductionError(f"sparsification failed after {retries} attempts; last: {failure}")


# -- K_{t+1}-free transversals -------------------------------------------

def min_monochromatic_colouring(G: PartitionedHypergraph, t: int, seed: int) -> np.ndarray:
    """Local-search t-colouring (indexed by vertex id) at which no single
    recolouring lowers the number of monochromatic edges.

    At the fixed point every vertex has at most d(v)/t neighbours of its
    own colour. Ties go to the lowest colour index.
    """
    G._require_graph()
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    rng = make_rng(seed)
    colour = rng.integers(0, t, size=G.id_bound)
    adj = G.adjacency
    onehot = np.zeros((G.id_bound, t), dtype=np.int64)
    onehot[np.arange(G.id_bound), colour] = 1
    counts = np.asarray(adj @ onehot)
    indptr, indices = adj.indptr, adj.indices
    vertices = G.vertices.tolist()
    moved = True
    while moved:
        moved = False
        for v in vertices:
            row = counts[v]
            old = colour[v]
            new = int(np.argmin(row))
            if row[new] < row[old]:
                nb = indices[indptr[v]:indptr[v + 1]]
                counts[nb, old] -= 1
                counts[nb, new] += 1
                colour[v] = new
                moved = True
    return colour


def monochromatic_subgraph(G: PartitionedHypergraph, colour: np.ndarray) -> PartitionedHypergraph:
    e = G.edges
    return G.spanning(e[colour[e[:, 0]] == colour[e[:, 1]]])


@dataclass(frozen=True)
class KtFreeResult:
    transversal: Transversal | None
    colouring: np.ndarray
    mono: PartitionedHypergraph
    method: str
    detail: str = ""


def kt_free_transversal(G: PartitionedHypergraph, t: int, cfg=None, *, exact_budget: int = 200_000,
                        check_cliques: bool = True) -> KtFreeResult:
    """A transversal of G inducing no K_{t+1}.

    Finds an independent transversal of the monochromatic subgraph G' of a
    locally optimal t-colouring; the chosen set is then properly t-coloured
    in G. The inner solver is the nibble, falling back to the resampling
    sampler and exact search.
    """
    from itlab.analysis.census import find_clique
    from itlab.solvers.exact import exact_find
    from itlab.solvers.lll import lll_sample
    from itlab.solvers.nibble import NibbleConfig, nibble_solve

    cfg = cfg or NibbleConfig()
    colour = min_monochromatic_colouring(G, t, derive_seed(cfg.seed, 0))
    mono = monochromatic_subgraph(G, colour)
    T, method, detail = None, "", ""
    res = nibble_solve(mono, cfg)
    if res.transversal is not None:
        T, method = res.transversal, "nibble"
    else:
        detail = res.reason
        lll = lll_sample(mono, max(50 * mono.num_edges, 1000), derive_seed(cfg.seed, 1))
        if lll.ok:
            T, method = lll.transversal, "lll"
        else:
            ex = exact_find(mono, exact_budget)
            T, method = ex.transversal, f"exact:{ex.status}"
    if T is not None:
        if not is_independent_transversal(mono, T):
            raise AssertionError("inner solver returned an invalid transversal of G'")
        if check_cliques and t <= 3 and find_clique(G, T.assignment.values(), t + 1) is not None:
            raise AssertionError(f"transversal contains K_{t + 1}")
    return KtFreeResult(T, colour, mono, method, detail)


# -- list colouring --------------------------------------------------------

def build_vertex_colour_graph(num_vertices: int, base_edges, lists) -> tuple[PartitionedHypergraph, list[tuple[int, int]]]:
    """Part V_v = {v} x L_v; (v, c) ~ (w, c) for each base edge vw and shared colour c.

    Returns the graph and the (vertex, colour) label of every id.
    """
    lists = [sorted(set(L)) for L in lists]
    if len(lists) != num_vertices:
        raise ValueError(f"expected {num_vertices} lists, got {len(lists)}")
    for v, L in enumerate(lists):
        if not L:
            raise ValueError(f"list of vertex {v} is empty")
    vid: dict[tuple[int, int], int] = {}
    parts = [[vid.setdefault((v, c), len(vid)) for c in L] for v, L in enumerate(lists)]
    edges = []
    for u, w in base_edges:
        if u == w:
            raise ValueError(f"loop at base vertex {u}")
        for c in set(lists[u]) & set(lists[w]):
            edges.append((vid[(u, c)], vid[(w, c)]))
    labels = sorted(vid, key=vid.get)
    return PartitionedHypergraph(2, parts, np.array(edges, dtype=np.int64).reshape(len(edges), 2)), labels


def transversal_to_colouring(T: Transversal, labels) -> dict[int, int]:
    return {labels[v][0]: labels[v][1] for v in T.assignment.values()}
