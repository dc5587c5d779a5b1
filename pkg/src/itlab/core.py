"""Partitioned r-uniform hypergraphs, part statistics and the instance formats."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp


class InstanceError(ValueError):
    """Structural violation of a partitioned hypergraph."""


class InstanceFormatError(InstanceError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _edge_array(edges, r: int) -> np.ndarray:
    if isinstance(edges, np.ndarray):
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, r)
    else:
        rows = [tuple(e) for e in edges]
        for e in rows:
            if len(e) != r:
                raise InstanceError(f"edge {sorted(e)} has {len(e)} vertices, expected r={r}")
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), r)
    if arr.ndim != 2 or arr.shape[1] != r:
        raise InstanceError(f"edge array must have shape (E, {r}), got {arr.shape}")
    arr = np.sort(arr, axis=1)
    if len(arr):
        arr = np.unique(arr, axis=0)
    return arr


class PartitionedHypergraph:
    """An r-uniform hypergraph together with an ordered vertex partition.

    Vertex ids are non-negative integers. Generators emit dense ids
    ``0..N-1``; induced subgraphs keep the ids of the parent so that a
    transversal of a subgraph is directly a transversal candidate of the
    parent. Instances are immutable.
    """

    def __init__(self, r: int, parts: Iterable[Iterable[int]], edges=(), *, validate: bool = True):
        if int(r) < 2:
            raise InstanceError(f"uniformity must be >= 2, got {r}")
        self.r = int(r)
        self.parts: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(int(v) for v in p)) for p in parts)
        self.edges: np.ndarray = _edge_array(edges, self.r)
        self.edges.setflags(write=False)

        size = 1 + max((p[-1] for p in self.parts if p), default=-1)
        if len(self.edges):
            size = max(size, int(self.edges.max()) + 1)
        part_of = np.full(size, -1, dtype=np.int64)
        for i, p in enumerate(self.parts):
            if validate:
                if p and p[0] < 0:
                    raise InstanceError(f"negative vertex id {p[0]} in part {i}")
                for a, b in zip(p, p[1:]):
                    if a == b:
                        raise InstanceError(f"vertex {a} listed twice in part {i}")
                if p:
                    clash = part_of[list(p)]
                    if (clash >= 0).any():
                        v = p[int(np.argmax(clash >= 0))]
                        raise InstanceError(f"vertex {v} occurs in parts {int(part_of[v])} and {i}")
            part_of[list(p)] = i
        part_of.setflags(write=False)
        self._part_of = part_of
        if validate:
            self._validate_edges()

    def _validate_edges(self) -> None:
        e = self.edges
        if not len(e):
            return
        if e.min() < 0:
            raise InstanceError("negative vertex id in an edge")
        if (np.diff(e, axis=1) == 0).any():
            bad = e[(np.diff(e, axis=1) == 0).any(axis=1)][0]
            raise InstanceError(f"edge {bad.tolist()} repeats a vertex")
        pe = self._part_of[e]
        if (pe < 0).any():
            bad = e[(pe < 0).any(axis=1)][0]
            raise InstanceError(f"edge {bad.tolist()} uses a vertex outside every part")
        spe = np.sort(pe, axis=1)
        if (np.diff(spe, axis=1) == 0).any():
            bad = e[(np.diff(spe, axis=1) == 0).any(axis=1)][0]
            raise InstanceError(f"edge {bad.tolist()} meets a part more than once")

    # -- basic accessors -------------------------------------------------

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def id_bound(self) -> int:
        """One past the largest vertex id that may appear."""
        return len(self._part_of)

    @cached_property
    def vertices(self) -> np.ndarray:
        return np.flatnonzero(self._part_of >= 0)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def part_of(self) -> np.ndarray:
        """vertex id -> part index (-1 for ids not in the graph)."""
        return self._part_of

    @cached_property
    def part_sizes(self) -> np.ndarray:
        return np.array([len(p) for p in self.parts], dtype=np.int64)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Edge counts per vertex id."""
        return np.bincount(self.edges.ravel(), minlength=self.id_bound).astype(np.int64)

    @cached_property
    def part_degree_sums(self) -> np.ndarray:
        m = self.num_parts
        mask = self._part_of >= 0
        return np.bincount(self._part_of[mask], weights=self.degrees[mask], minlength=m).astype(np.int64)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency over the id space (graphs only)."""
        self._require_graph()
        n = self.id_bound
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(u), dtype=np.int8)
        return sp.csr_matrix((data, (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(n, n))

    @cached_property
    def incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR-style (indptr, edge_ids) listing the edges through each vertex."""
        flat = self.edges.ravel()
        eid = np.repeat(np.arange(len(self.edges)), self.r)
        order = np.argsort(flat, kind="stable")
        indptr = np.zeros(self.id_bound + 1, dtype=np.int64)
        np.cumsum(np.bincount(flat, minlength=self.id_bound), out=indptr[1:])
        return indptr, eid[order]

    def neighbours(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v]:a.indptr[v + 1]]

    def _require_graph(self) -> None:
        if self.r != 2:
            raise InstanceError(f"operation defined for graphs only (r=2), got r={self.r}")

    # -- derived instances -----------------------------------------------

    def induced(self, keep) -> "PartitionedHypergraph":
        """Sub-instance on a vertex subset; parts keep their indices."""
        mask = np.zeros(self.id_bound, dtype=bool)
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = keep[: self.id_bound]
            mask[: len(keep)] = keep
        else:
            mask[keep.astype(np.int64)] = True
        mask &= self._part_of >= 0
        parts = [[v for v in p if mask[v]] for p in self.parts]
        edges = self.edges[mask[self.edges].all(axis=1)] if len(self.edges) else self.edges
        return PartitionedHypergraph(self.r, parts, edges, validate=False)

    def with_edges(self, edges) -> "PartitionedHypergraph":
        extra = _edge_array(edges, self.r)
        return PartitionedHypergraph(self.r, self.parts, np.concatenate([self.edges, extra]))

    def relabeled(self) -> tuple["PartitionedHypergraph", np.ndarray]:
        """Dense copy with ids 0..N-1 in part order, plus new-id -> old-id map."""
        old = np.array([v for p in self.parts for v in p], dtype=np.int64)
        new_of = np.full(self.id_bound, -1, dtype=np.int64)
        new_of[old] = np.arange(len(old))
        parts, pos = [], 0
        for p in self.parts:
            parts.append(range(pos, pos + len(p)))
            pos += len(p)
        edges = new_of[self.edges] if len(self.edges) else self.edges
        return PartitionedHypergraph(self.r, parts, edges, validate=False), old

    def spanning(self, edges) -> "PartitionedHypergraph":
        """Same parts, a different edge set."""
        return PartitionedHypergraph(self.r, self.parts, edges)

    # -- comparison ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionedHypergraph):
            return NotImplemented
        return (self.r == other.r and self.parts == other.parts
                and self.edges.shape == other.edges.shape
                and bool((self.edges == other.edges).all()))

    def __hash__(self):
        return hash((self.r, self.parts, self.edges.tobytes()))

    def __repr__(self) -> str:
        return (f"PartitionedHypergraph(r={self.r}, parts={self.num_parts}, "
                f"vertices={self.num_vertices}, edges={self.num_edges})")


@dataclass(frozen=True)
class PartStats:
    part_index: int
    size: int
    avg_degree: Fraction
    max_degree: int


@dataclass(frozen=True)
class Transversal:
    """At most one chosen vertex per part, keyed by part index."""

    assignment: Mapping[int, int]

    @classmethod
    def from_sequence(cls, vertices: Sequence[int]) -> "Transversal":
        return cls({i: int(v) for i, v in enumerate(vertices)})

    def vertices(self) -> list[int]:
        return [self.assignment[i] for i in sorted(self.assignment)]

    def to_json(self) -> list[int]:
        return self.vertices()

    def __len__(self) -> int:
        return len(self.assignment)


def avg_degree_of_part(G: PartitionedHypergraph, i: int) -> Fraction:
    size = len(G.parts[i])
    if size == 0:
        raise InstanceError(f"degenerate part {i}: empty part has no average degree")
    return Fraction(int(G.part_degree_sums[i]), size)


def part_stats(G: PartitionedHypergraph) -> list[PartStats]:
    out = []
    deg = G.degrees
    for i, p in enumerate(G.parts):
        if not p:
            out.append(PartStats(i, 0, Fraction(0), 0))
            continue
        out.append(PartStats(i, len(p), avg_degree_of_part(G, i), int(deg[list(p)].max())))
    return out


def max_part_avg_degree(G: PartitionedHypergraph) -> float:
    """Largest average degree over nonempty parts, as a float (0 if edgeless)."""
    sizes = G.part_sizes
    nz = sizes > 0
    if not nz.any():
        return 0.0
    return float((G.part_degree_sums[nz] / sizes[nz]).max())


def local_degree(G: PartitionedHypergraph) -> int:
    """Max number of neighbours a vertex has inside a single other part."""
    if G.r != 2:
        raise InstanceError("local degree is defined for graphs only (r=2)")
    if not len(G.edges):
        return 0
    u = np.concatenate([G.edges[:, 0], G.edges[:, 1]])
    v = np.concatenate([G.edges[:, 1], G.edges[:, 0]])
    keys = u * max(G.num_parts, 1) + G.part_of[v]
    _, counts = np.unique(keys, return_counts=True)
    return int(counts.max())


def is_independent_transversal(G: PartitionedHypergraph, T) -> bool:
    """True iff T picks exactly one vertex from every part and spans no edge."""
    assignment = T.assignment if isinstance(T, Transversal) else T
    if assignment is None or len(assignment) != G.num_parts:
        return False
    chosen = np.zeros(G.id_bound, dtype=bool)
    for i in range(G.num_parts):
        v = assignment.get(i)
        if v is None or not (0 <= v < G.id_bound) or G.part_of[v] != i:
            return False
        chosen[v] = True
    if not len(G.edges):
        return True
    return not bool(chosen[G.edges].all(axis=1).any())


# -- text and JSON formats ------------------------------------------------

def write_instance(G: PartitionedHypergraph) -> bytes:
    lines = [f"ith r={G.r} m={G.num_parts}"]
    for i, p in enumerate(G.parts):
        lines.append(f"part {i}: " + " ".join(map(str, p)) if p else f"part {i}:")
    for e in G.edges.tolist():
        lines.append("edge: " + " ".join(map(str, e)))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise InstanceFormatError(f"non-integer vertex id ({exc})", lineno) from None


def read_instance(data: bytes | str) -> PartitionedHypergraph:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    r = m = None
    parts: list[list[int]] = []
    part_of: dict[int, int] = {}
    edges: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if r is None:
            tok = line.split()
            try:
                if tok[0] != "ith" or len(tok) != 3:
                    raise ValueError
                fields = dict(t.split("=", 1) for t in tok[1:])
                r, m = int(fields["r"]), int(fields["m"])
            except (ValueError, KeyError):
                raise InstanceFormatError(f"malformed header {line!r}, expected 'ith r=<r> m=<m>'", lineno) from None
            if r < 2 or m < 0:
                raise InstanceFormatError(f"invalid header values r={r} m={m}", lineno)
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise InstanceFormatError(f"unrecognised line {line!r}", lineno)
        head_tok = head.split()
        if head_tok and head_tok[0] == "part":
            if edges:
                raise InstanceFormatError("part line after edge lines", lineno)
            if len(head_tok) != 2 or head_tok[1] != str(len(parts)):
                raise InstanceFormatError(f"expected 'part {len(parts)}:', got {head!r}", lineno)
            if len(parts) >= m:
                raise InstanceFormatError(f"more than m={m} parts", lineno)
            vs = _ints(rest.split(), lineno)
            for v in vs:
                if v < 0:
                    raise InstanceFormatError(f"negative vertex id {v}", lineno)
                if v in part_of:
                    raise InstanceFormatError(f"vertex {v} already in part {part_of[v]}", lineno)
                part_of[v] = len(parts)
            parts.append(vs)
        elif head_tok == ["edge"]:
            if len(parts) != m:
                raise InstanceFormatError(f"edge before all {m} parts were declared", lineno)
            vs = _ints(rest.split(), lineno)
            if len(vs) != r:
                raise InstanceFormatError(f"edge arity {len(vs)} does not match r={r}", lineno)
            if len(set(vs)) != r:
                raise InstanceFormatError("edge repeats a vertex", lineno)
            owners = []
            for v in vs:
                if v not in part_of:
                    raise InstanceFormatError(f"edge uses unknown vertex {v}", lineno)
                owners.append(part_of[v])
            if len(set(owners)) != r:
                raise InstanceFormatError("edge meets a part more than once (parts must be independent)", lineno)
            edges.append(vs)
        else:
            raise InstanceFormatError(f"unrecognised line {line!r}", lineno)
    if r is None:
        raise InstanceFormatError("missing header", 1)
    if len(parts) != m:
        raise InstanceFormatError(f"header declares m={m} parts, found {len(parts)}")
    return PartitionedHypergraph(r, parts, edges)


def instance_to_json(G: PartitionedHypergraph) -> bytes:
    doc = {"r": G.r, "parts": [list(p) for p in G.parts], "edges": G.edges.tolist()}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8") + b"\n"


def instance_from_json(data: bytes | str) -> PartitionedHypergraph:
    try:
        doc = json.loads(data)
        r, parts, edges = doc["r"], doc["parts"], doc["edges"]
    except (ValueError, KeyError, TypeError) as exc:
        raise InstanceFormatError(f"malformed JSON instance: {exc}") from None
    return PartitionedHypergraph(r, parts, edges)


def load_instance(path) -> PartitionedHypergraph:
    with open(path, "rb") as fh:
        data = fh.read()
    if str(path).endswith(".json"):
        return instance_from_json(data)
    return read_instance(data)


def save_instance(G: PartitionedHypergraph, path) -> None:
    blob = instance_to_json(G) if str(path).endswith(".json") else write_instance(G)
    with open(path, "wb") as fh:
        fh.write(blob)
