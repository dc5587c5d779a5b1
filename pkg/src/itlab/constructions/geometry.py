"""Projective planes over prime fields and projective norm graphs for r=3.

The norm graph lives on F_{q^2} x F_q^*; (X, x) ~ (Y, y) iff
N(X + Y) = x*y where N(z) = z^(q+1) is the norm down to F_q. It is
K_{3,3}-free: any three vertices have at most two common neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from itlab.constructions.primes import is_prime


def _require_prime(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q} (prime powers are not supported)")


def projective_points(q: int) -> list[tuple[int, int, int]]:
    """Normalised homogeneous coordinates of PG(2, q): first nonzero entry is 1."""
    _require_prime(q)
    pts = [(1, a, b) for a in range(q) for b in range(q)]
    pts += [(0, 1, a) for a in range(q)]
    pts.append((0, 0, 1))
    return pts


def projective_incidence(q: int) -> np.ndarray:
    """Point-line incidence matrix of PG(2, q); lines use the dual coordinates."""
    pts = np.array(projective_points(q), dtype=np.int64)
    return (pts @ pts.T) % q == 0


class QuadraticField:
    """F_{q^2} = F_q[w]/(w^2 - c) for an odd prime q and a non-residue c.

    Elements are encoded as integers a + b*q for a + b*w.
    """

    def __init__(self, q: int):
        _require_prime(q)
        if q == 2:
            raise ValueError("QuadraticField needs an odd prime")
        self.q = q
        squares = {x * x % q for x in range(1, q)}
        self.c = next(c for c in range(2, q) if c not in squares)

    @property
    def order(self) -> int:
        return self.q * self.q

    def split(self, z: int) -> tuple[int, int]:
        return z % self.q, z // self.q

    def join(self, a: int, b: int) -> int:
        return a % self.q + (b % self.q) * self.q

    def add(self, x: int, y: int) -> int:
        (a, b), (c, d) = self.split(x), self.split(y)
        return self.join(a + c, b + d)

    def mul(self, x: int, y: int) -> int:
        (a, b), (c, d) = self.split(x), self.split(y)
        return self.join(a * c + self.c * b * d, a * d + b * c)

    def power(self, x: int, e: int) -> int:
        result, base = 1, x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def norm(self, x: int) -> int:
        # z^(q+1) = z * conj(z) = a^2 - c b^2 because the Frobenius sends w to -w.
        a, b = self.split(x)
        return (a * a - self.c * b * b) % self.q


@dataclass(frozen=True)
class NormGraph:
    q: int
    field: QuadraticField
    # relation[v] lists every u with N(X_v + X_u) = x_v x_u, loops included
    relation: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.relation)

    def label(self, v: int) -> tuple[int, int]:
        """(field element, unit) pair of vertex v."""
        return v // (self.q - 1), v % (self.q - 1) + 1

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Loop-free neighbour lists."""
        return tuple(tuple(u for u in nb if u != v) for v, nb in enumerate(self.relation))

    @cached_property
    def loops(self) -> tuple[int, ...]:
        return tuple(v for v, nb in enumerate(self.relation) if v in nb)

    def relation_degrees(self) -> list[int]:
        return [len(nb) for nb in self.relation]


def norm_graph(q: int) -> NormGraph:
    """Projective norm graph with r=3, t=1 on q^2 (q-1) vertices."""
    _require_prime(q)
    if q < 3:
        raise ValueError(f"norm graph needs q >= 3, got {q}")
    F = QuadraticField(q)
    units = q - 1
    inv = {x: pow(x, q - 2, q) for x in range(1, q)}
    norm_of_sum = [[F.norm(F.add(X, Y)) for Y in range(F.order)] for X in range(F.order)]
    relation = []
    for X in range(F.order):
        for x in range(1, q):
            nb = []
            for Y in range(F.order):
                n = norm_of_sum[X][Y]
                if n == 0:
                    continue
                y = n * inv[x] % q
                nb.append(Y * units + (y - 1))
            relation.append(tuple(sorted(nb)))
    return NormGraph(q, F, tuple(relation))
