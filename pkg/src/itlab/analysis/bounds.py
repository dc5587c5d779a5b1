"""Closed-form bounds for f(k, r, s), all evaluated in log space.

The LLL threshold uses one bad event per edge (the edge lies inside T,
probability k^-r). An edge depends only on edges meeting one of its r
parts; there are at most s (C(n,r) - C(n-r,r)) of those, itself included.
The constant this produces is ours, not a quoted value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from itlab.core import InstanceError, PartitionedHypergraph

ATOL = 1e-12


def first_moment(n: int, k: int, r: int, s: int) -> float:
    """log of the expected IT count k^n (1 - s/k^r)^C(n,r) of a random (n,k,r,s)-graph."""
    if k < 1 or r < 2 or n < 0:
        raise ValueError(f"invalid parameters n={n}, k={k}, r={r}")
    if not 0 <= s <= k ** r:
        raise ValueError(f"s must lie in [0, k^r], got {s}")
    pairs = math.comb(n, r)
    if pairs == 0 or s == 0:
        return n * math.log(k)
    if s == k ** r:
        return -math.inf
    return n * math.log(k) + pairs * math.log1p(-s / k ** r)


def first_moment_value(n: int, k: int, r: int, s: int) -> float:
    """The expectation itself; inf when it overflows a float."""
    x = first_moment(n, k, r, s)
    return math.exp(x) if x < 709 else math.inf


def _largest_true(pred, lo: int) -> int:
    """Largest n >= lo with pred(n), for a predicate that is true then false."""
    if not pred(lo):
        return lo - 1
    hi = max(2 * lo, lo + 1)
    while pred(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def first_moment_crossover(k: int, r: int, s: int) -> int:
    """Smallest n at which the expected IT count drops below 1."""
    if s == 0:
        raise ValueError("s=0: the expectation never drops below 1")
    return _largest_true(lambda n: first_moment(n, k, r, s) >= -ATOL, r) + 1


def lll_dependency(n: int, r: int, s: int) -> int:
    """Delta + 1 for the per-edge bad events of an (n,k,r,s)-graph."""
    return s * (math.comb(n, r) - math.comb(n - r, r))


def lll_condition_holds(n: int, k: int, r: int, s: int) -> bool:
    if n < r or s == 0:
        return True
    return math.log(lll_dependency(n, r, s)) + 1 - r * math.log(k) <= ATOL


def lll_threshold(k: int, r: int, s: int) -> float:
    """Largest n for which e k^-r s (C(n,r) - C(n-r,r)) <= 1; inf when s=0."""
    if s == 0:
        return math.inf
    return float(_largest_true(lambda n: lll_condition_holds(n, k, r, s), r))


def conjectured_threshold(k: int, r: int, s: int) -> float:
    return (r - 1) * (k ** r / s) ** (1 / (r - 1))


@dataclass(frozen=True)
class LLLCheck:
    ok: bool
    value: float  # e n^-2 (Delta + 1)
    delta: int
    witness: tuple[int, int] | None


def check_lll_condition(G: PartitionedHypergraph) -> LLLCheck:
    """Evaluate e n^-2 (Delta(Gamma) + 1) <= 1 with the per-edge bound
    d(e) <= |V_i| avg(V_i) + |V_j| avg(V_j) - 2 (the part degree sums);
    the witness is the edge attaining the maximum, lowest index on ties."""
    G._require_graph()
    sizes = set(G.part_sizes.tolist())
    if len(sizes) > 1:
        raise InstanceError(f"parts have unequal sizes {sorted(sizes)}; trim them to a common size first")
    n = sizes.pop() if sizes else 0
    if G.num_edges == 0:
        return LLLCheck(True, 0.0, 0, None)
    sums = G.part_degree_sums
    po = G.part_of
    e = G.edges
    d = sums[po[e[:, 0]]] + sums[po[e[:, 1]]] - 2
    w = int(np.argmax(d))
    delta = int(d[w])
    value = math.e * (delta + 1) / n ** 2
    return LLLCheck(value <= 1 + ATOL, value, delta, (int(e[w, 0]), int(e[w, 1])))


@dataclass(frozen=True)
class BoundReport:
    k: int
    r: int
    s: int
    lll_lower: float
    first_moment_upper: float
    conjectured: float
    lll_condition_ok: bool | None = None

    def first_moment_value(self, n: int) -> float:
        return first_moment_value(n, self.k, self.r, self.s)

    def to_dict(self) -> dict:
        def fin(x):
            return x if math.isfinite(x) else "inf"
        return {
            "k": self.k, "r": self.r, "s": self.s,
            "lll_lower": fin(self.lll_lower),
            "first_moment_upper": fin(self.first_moment_upper),
            "first_moment_log_at_upper": fin(first_moment(int(self.first_moment_upper), self.k, self.r, self.s))
            if math.isfinite(self.first_moment_upper) else None,
            "conjectured": self.conjectured,
            "lll_condition_ok": self.lll_condition_ok,
        }


def bound_report(k: int, r: int, s: int, G: PartitionedHypergraph | None = None) -> BoundReport:
    if not 0 <= s <= k ** r:
        raise ValueError(f"s must lie in [0, k^r], got {s}")
    upper = float(first_moment_crossover(k, r, s)) if s else math.inf
    ok = check_lll_condition(G).ok if G is not None else None
    return BoundReport(k, r, s, lll_threshold(k, r, s), upper,
                       conjectured_threshold(k, r, s) if s else math.inf, ok)
