"""Bipartite hosts H = (A, B) feeding the neighbourhood-incidence reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from itlab.analysis.census import common_neighbour_census
from itlab.constructions.geometry import norm_graph, projective_incidence
from itlab.constructions.primes import is_prime
from itlab.seeding import derive_seed, make_rng

RANDOM_HOST_RETRIES = 20
NORM_BIPARTITION_RETRIES = 50


class HostRetryError(RuntimeError):
    pass


@dataclass(frozen=True)
class BipartiteHost:
    """Bipartite graph with |A| = n, |B| = m; adjacency[a] is the sorted B-neighbourhood of a."""

    n: int
    m: int
    adjacency: tuple[tuple[int, ...], ...]
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError(f"adjacency has {len(self.adjacency)} rows, expected n={self.n}")
        for a, nb in enumerate(self.adjacency):
            if any(b < 0 or b >= self.m for b in nb):
                raise ValueError(f"A-vertex {a} has a neighbour outside 0..{self.m - 1}")
            if any(x >= y for x, y in zip(nb, nb[1:])):
                raise ValueError(f"neighbour list of A-vertex {a} is not strictly increasing")

    @classmethod
    def from_matrix(cls, M, meta: dict | None = None) -> "BipartiteHost":
        M = np.asarray(M, dtype=bool)
        rows = tuple(tuple(int(b) for b in np.flatnonzero(row)) for row in M)
        return cls(M.shape[0], M.shape[1], rows, dict(meta or {}))

    def degrees(self) -> list[int]:
        return [len(nb) for nb in self.adjacency]

    @property
    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def b_neighbourhoods(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.m)]
        for a, nb in enumerate(self.adjacency):
            for b in nb:
                out[b].append(a)
        return out


@dataclass(frozen=True)
class HostCertificate:
    min_degree_A: int
    max_common_neighbours: int
    r: int

    def to_dict(self) -> dict:
        return {"min_degree_A": self.min_degree_A, "max_common_neighbours": self.max_common_neighbours, "r": self.r}


def certify(H: BipartiteHost, r: int) -> HostCertificate:
    census = common_neighbour_census(H, r)
    return HostCertificate(H.min_degree, census.max_common, r)


def complete_bipartite_host(n: int, m: int) -> BipartiteHost:
    return BipartiteHost(n, m, tuple(tuple(range(m)) for _ in range(n)))


def random_host(n: int, m: int, density: float, seed: int) -> BipartiteHost:
    """Plain random host: each A-B pair independently with ``density``.

    Rows that come out empty are redrawn so every A-vertex has degree >= 1.
    """
    if not 0 < density <= 1:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    rng = make_rng(seed)
    M = rng.random((n, m)) < density
    for a in range(n):
        while not M[a].any():
            M[a] = rng.random(m) < density
    return BipartiteHost.from_matrix(M, {"host": "random", "density": density, "seed": seed})


def random_host_constant(r: int, eps: float) -> float:
    return 10.0 * r * eps ** -4


def random_bipartite_host(n: int, m: int, r: int, s: int, eps: float, seed: int, *,
                          retries: int = RANDOM_HOST_RETRIES,
                          constant: float | None = None) -> tuple[BipartiteHost, HostCertificate]:
    """Random host with every r-subset of A having <= s common neighbours.

    Edges appear independently with probability (1 - eps/2) (s/m)^(1/r).
    A sample is accepted when the exhaustive census is <= s and every A-vertex
    has degree >= (1 - eps) s^(1/r) m^(1 - 1/r). ``constant`` overrides the
    default 10 r eps^-4 in the requirement s >= constant * log n.
    """
    C = random_host_constant(r, eps) if constant is None else float(constant)
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    if not 0 < eps <= 1 / r:
        raise ValueError(f"eps must lie in (0, 1/r] = (0, {1 / r:.4g}], got {eps}")
    if n < r:
        raise ValueError(f"need n >= r, got n={n}, r={r}")
    if not s >= C * math.log(n):
        raise ValueError(f"need s >= C log n = {C * math.log(n):.1f} (C={C:.4g}), got s={s}")
    if s > m:
        raise ValueError(f"need m >= s, got m={m}, s={s}")
    p = min(1.0, (1 - eps / 2) * (s / m) ** (1 / r))
    floor = (1 - eps) * s ** (1 / r) * m ** (1 - 1 / r)
    reasons = []
    for attempt in range(retries):
        rng = make_rng(derive_seed(seed, attempt))
        M = rng.random((n, m)) < p
        min_deg = int(M.sum(axis=1).min())
        if min_deg < floor:
            reasons.append(f"attempt {attempt}: min A-degree {min_deg} < {floor:.2f}")
            continue
        H = BipartiteHost.from_matrix(M, {"host": "random", "p": p, "seed": seed, "attempt": attempt,
                                         "degree_floor": floor, "constant": C})
        cert = certify(H, r)
        if cert.max_common_neighbours > s:
            reasons.append(f"attempt {attempt}: {cert.max_common_neighbours} common neighbours > s={s}")
            continue
        return H, cert
    raise HostRetryError(f"no acceptable host within {retries} retries; last failure: {reasons[-1]}")


def projective_plane_host(q: int) -> tuple[BipartiteHost, HostCertificate]:
    """Points vs lines of PG(2, q) with the last line deleted.

    Every point keeps degree >= q and two points share at most one line,
    so (n, m) = (q^2+q+1, q^2+q) with k = q, s = 1.
    """
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    inc = projective_incidence(q)[:, :-1]
    H = BipartiteHost.from_matrix(inc, {"host": "projective", "q": q, "deleted_line": inc.shape[0] - 1})
    return H, certify(H, 2)


def default_norm_degree_floor(q: int, r: int = 3) -> int:
    # largest k with q^(r-1) >= 2 r k
    return q ** (r - 1) // (2 * r)


def norm_graph_host(q: int, k: int | None = None, seed: int = 0, *,
                    retries: int = NORM_BIPARTITION_RETRIES) -> tuple[BipartiteHost, HostCertificate]:
    """Random bipartition of the r=3 norm graph into a host with s = 2.

    Each vertex goes to B with probability 1/4. A-vertices with fewer than
    ``k`` B-neighbours are dropped; the split is accepted once |A| > 2|B|.
    """
    r = 3
    NG = norm_graph(q)
    if k is None:
        k = default_norm_degree_floor(q, r)
    if k < 1:
        raise ValueError(f"degree floor k must be >= 1, got {k}")
    last = ""
    for attempt in range(retries):
        rng = make_rng(derive_seed(seed, attempt))
        in_b = rng.random(NG.order) < 1 / (r + 1)
        b_index = np.cumsum(in_b) - 1
        B = np.flatnonzero(in_b)
        rows, kept, dropped = [], [], 0
        for v in np.flatnonzero(~in_b):
            nb = sorted(int(b_index[u]) for u in NG.adjacency[v] if in_b[u])
            if len(nb) >= k:
                rows.append(tuple(nb))
                kept.append(int(v))
            else:
                dropped += 1
        if len(rows) > (r - 1) * len(B) and len(rows) >= r:
            meta = {"host": "norm", "q": q, "seed": seed, "attempt": attempt, "degree_floor": k,
                    "dropped_A": dropped, "A_vertices": kept, "B_vertices": B.tolist()}
            H = BipartiteHost(len(rows), len(B), tuple(rows), meta)
            return H, certify(H, r)
        last = f"attempt {attempt}: |A|={len(rows)} vs 2|B|={2 * len(B)}"
    raise HostRetryError(f"norm-graph bipartition failed within {retries} retries; last failure: {last}")


def graph_as_host(adjacency) -> BipartiteHost:
    """Host whose both sides are the vertex set of a graph; A-B edges are graph edges.

    Common neighbours in this host are exactly common neighbours in the graph.
    """
    rows = tuple(tuple(sorted(nb)) for nb in adjacency)
    return BipartiteHost(len(rows), len(rows), rows)
