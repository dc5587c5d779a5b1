"""From hosts to (n,k,r,s)-graphs: incidence reduction, padding, random instances."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from itlab.analysis.census import matching_census
from itlab.constructions.hosts import (
    BipartiteHost,
    default_norm_degree_floor,
    norm_graph_host,
    projective_plane_host,
    random_bipartite_host,
    random_host_constant,
)
from itlab.constructions.primes import find_prime_in_ap
from itlab.core import PartitionedHypergraph
from itlab.seeding import make_rng


class ConstructionNotImplemented(ValueError):
    pass


def incidence_labels(H: BipartiteHost) -> list[tuple[int, int]]:
    """(a, b) label of every vertex id of the incidence graph, in id order."""
    return [(a, b) for a, nb in enumerate(H.adjacency) for b in nb]


def neighbourhood_incidence_graph(H: BipartiteHost, r: int) -> PartitionedHypergraph:
    """Part V_a = {a} x N(a); one edge {(a_1,b),...,(a_r,b)} per r-set sharing b."""
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    if r > H.n:
        raise ValueError(f"too few parts: r={r} > |A|={H.n}")
    if any(not nb for nb in H.adjacency):
        raise ValueError("every A-vertex needs degree >= 1")
    vid: dict[tuple[int, int], int] = {}
    parts = []
    for a, nb in enumerate(H.adjacency):
        parts.append([vid.setdefault((a, b), len(vid)) for b in nb])
    edges = [
        [vid[(a, b)] for a in group]
        for b, holders in enumerate(H.b_neighbourhoods())
        for group in combinations(holders, r)
    ]
    return PartitionedHypergraph(r, parts, np.array(edges, dtype=np.int64).reshape(len(edges), r))


def verify_no_transversal_by_pigeonhole(H: BipartiteHost, r: int) -> bool:
    """m (r-1) < n certifies that the incidence r-graph has no independent transversal."""
    return H.m * (r - 1) < H.n


def pad_to_nkrs(G: PartitionedHypergraph, k: int, s: int, seed: int) -> PartitionedHypergraph:
    """Trim every part to k vertices and top up every r-set of parts to s matching edges.

    Both operations preserve the absence of an independent transversal:
    a transversal of an induced subgraph is one of the original graph, and
    extra edges only forbid more sets. Kept vertices are the k of highest
    degree (random tie-break); output ids are dense.
    """
    r = G.r
    if s > k:
        raise ValueError(f"a matching of size s={s} does not fit in parts of size k={k}")
    if s < 0 or k < 1:
        raise ValueError(f"need k >= 1 and s >= 0, got k={k}, s={s}")
    small = [i for i, p in enumerate(G.parts) if len(p) < k]
    if small:
        raise ValueError(f"part {small[0]} has {len(G.parts[small[0]])} < k={k} vertices")
    census = matching_census(G)
    if not census.within(s):
        raise ValueError(f"input already violates the matching condition for s={s}: "
                         f"{census.violations(s)[:3]}")
    rng = make_rng(seed)
    deg = G.degrees
    keep = []
    for p in G.parts:
        p = np.array(p)
        p = p[rng.permutation(len(p))]
        order = np.argsort(-deg[p], kind="stable")
        keep.extend(p[order[:k]].tolist())
    trimmed, _ = G.induced(keep).relabeled()

    used: dict[tuple[int, ...], set[int]] = {}
    count: dict[tuple[int, ...], int] = {}
    po = trimmed.part_of
    for e in trimmed.edges.tolist():
        key = tuple(sorted(int(po[v]) for v in e))
        used.setdefault(key, set()).update(e)
        count[key] = count.get(key, 0) + 1
    extra = []
    parts = trimmed.parts
    for key in combinations(range(trimmed.num_parts), r):
        need = s - count.get(key, 0)
        if need <= 0:
            continue
        taken = used.get(key, set())
        picks = []
        for i in key:
            free = np.array([v for v in parts[i] if v not in taken])
            picks.append(free[rng.permutation(len(free))[:need]])
        extra.extend(np.stack(picks, axis=1).tolist())
    out = trimmed.with_edges(np.array(extra, dtype=np.int64).reshape(len(extra), r))
    return out


def _part_combinations(n: int, r: int) -> np.ndarray:
    if r == 2:
        i, j = np.triu_indices(n, k=1)
        return np.stack([i, j], axis=1)
    flat = np.fromiter((x for c in combinations(range(n), r) for x in c), dtype=np.int64)
    return flat.reshape(-1, r)


def random_nkrs(n: int, k: int, r: int, s: int, seed: int, *, chunk: int = 100_000) -> PartitionedHypergraph:
    """Uniformly random (n,k,r,s)-graph; part i holds ids i*k .. i*k + k - 1.

    For every r-set of parts each part contributes an ordered sample of s
    slots (a vectorised Fisher-Yates prefix); the j-th slots form the j-th
    edge. Every matching of size s arises from exactly s! orderings, so the
    per-r-set matching is uniform.
    """
    if r < 2 or n < r:
        raise ValueError(f"need 2 <= r <= n, got n={n}, r={r}")
    if k < 1:
        raise ValueError(f"need k >= 1, got k={k}")
    if not 0 <= s <= k:
        raise ValueError(f"need 0 <= s <= k (matching condition), got s={s}, k={k}")
    parts = [range(i * k, (i + 1) * k) for i in range(n)]
    if s == 0:
        return PartitionedHypergraph(r, parts, np.zeros((0, r), dtype=np.int64), validate=False)
    rng = make_rng(seed)
    combos = _part_combinations(n, r)
    blocks = []
    dtype = np.int16 if k < 2**15 else np.int64
    for lo in range(0, len(combos), chunk):
        cs = combos[lo:lo + chunk]
        c = len(cs)
        if s == 1:
            slots = rng.integers(0, k, size=(c, r, 1))
        else:
            perm = np.broadcast_to(np.arange(k, dtype=dtype), (c, r, k)).copy()
            rows = np.arange(c)[:, None]
            cols = np.arange(r)[None, :]
            for j in range(s):
                idx = rng.integers(j, k, size=(c, r))
                a = perm[:, :, j].copy()
                perm[:, :, j] = perm[rows, cols, idx]
                perm[rows, cols, idx] = a
            slots = perm[:, :, :s].astype(np.int64)
        verts = cs[:, :, None] * k + slots  # (c, r, s)
        blocks.append(verts.transpose(0, 2, 1).reshape(-1, r))
    edges = np.concatenate(blocks)
    return PartitionedHypergraph(r, parts, edges, validate=False)


SUPPORTED_REGIMES = ("r=2, s=1 (projective plane host)",
                     "r=3, s=2 (norm graph host)",
                     "r in {2,3}, s >= C log k (random host)")


def assemble_upper_bound_instance(k: int, r: int, s: int, seed: int, *, eps: float | None = None,
                                  constant: float | None = None) -> tuple[PartitionedHypergraph, dict]:
    """A (n,k,r,s)-graph with no independent transversal, plus its provenance."""
    if k < 1 or s < 1 or s > k:
        raise ValueError(f"need 1 <= s <= k, got k={k}, s={s}")
    record: dict = {"k": k, "r": r, "s": s, "seed": seed}
    if (r, s) == (2, 1):
        q = find_prime_in_ap(max(k, 2), 1, 1)
        H, cert = projective_plane_host(q)
        record.update(host="projective", q=q)
    elif (r, s) == (3, 2):
        q = find_prime_in_ap(max(3, math.isqrt(6 * k - 1) + 1), 1, 1)
        H, cert = norm_graph_host(q, max(k, 1), seed)
        record.update(host="norm", q=q, default_floor=default_norm_degree_floor(q))
    elif r in (2, 3):
        eps = (1 / r) if eps is None else eps
        host_eps = eps ** 2  # the host needs the finer slack eps^2 to reach degree k
        C = random_host_constant(r, host_eps) if constant is None else constant
        if s < C * math.log(k):
            raise ConstructionNotImplemented(
                f"construction not implemented for r={r}, s={s}, k={k}: s < C log k = {C * math.log(k):.1f}; "
                f"supported regimes: {'; '.join(SUPPORTED_REGIMES)}")
        n = math.floor((r - 1 + eps) * (k ** r / s) ** (1 / (r - 1)))
        m = n // (r - 1) - 1
        H, cert = random_bipartite_host(n, m, r, s, host_eps, seed, constant=constant)
        if cert.min_degree_A < k:
            raise ValueError(f"random host min degree {cert.min_degree_A} < k={k}; increase eps or k")
        record.update(host="random", eps=eps, host_eps=host_eps, constant=C)
    else:
        raise ConstructionNotImplemented(
            f"construction not implemented for r={r}, s={s}; supported regimes: {'; '.join(SUPPORTED_REGIMES)}")
    if not verify_no_transversal_by_pigeonhole(H, r):
        raise RuntimeError(f"host fails the pigeonhole certificate: m={H.m}, n={H.n}, r={r}")
    G = pad_to_nkrs(neighbourhood_incidence_graph(H, r), k, s, seed)
    record.update(n=H.n, m=H.m, certificate=cert.to_dict(),
                  host_meta={key: val for key, val in H.meta.items() if key not in ("A_vertices", "B_vertices")})
    return G, record
