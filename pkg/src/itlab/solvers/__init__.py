"""Independent transversal solvers and a uniform dispatcher."""

from __future__ import annotations

from dataclasses import dataclass, field

from itlab.core import PartitionedHypergraph, Transversal, is_independent_transversal

SOLVERS = ("exact", "greedy", "lll", "nibble", "ktfree")


@dataclass
class SolveOutcome:
    status: str  # found | none | budget | failure
    transversal: Transversal | None
    steps: int = 0
    resamples: int = 0
    trajectory: list = field(default_factory=list)
    detail: str = ""

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "transversal": self.transversal.to_json() if self.transversal else None,
            "steps": self.steps,
            "resamples": self.resamples,
            "trajectory": self.trajectory,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def solve(G: PartitionedHypergraph, solver: str, *, seed: int = 0, eps: float = 0.1, p: float | None = None,
          max_steps: int = 10_000, budget: int | None = None, t: int = 2) -> SolveOutcome:
    """Run one named solver; every returned transversal has been validated against G."""
    from itlab.solvers.exact import exact_find
    from itlab.solvers.greedy import greedy_find
    from itlab.solvers.lll import lll_sample
    from itlab.solvers.nibble import NibbleConfig, nibble_solve
    from itlab.solvers.reductions import kt_free_transversal

    if solver == "exact":
        res = exact_find(G, budget if budget is not None else 10_000_000)
        out = SolveOutcome(res.status, res.transversal, steps=res.nodes)
    elif solver == "greedy":
        T = greedy_find(G)
        out = SolveOutcome("found" if T else "failure", T, steps=G.num_parts)
    elif solver == "lll":
        rounds = budget if budget is not None else max(50 * G.num_edges, 1000)
        res = lll_sample(G, rounds, seed)
        out = SolveOutcome("found" if res.ok else "failure", res.transversal, resamples=res.resamples)
    elif solver in ("nibble", "ktfree"):
        cfg = NibbleConfig(eps=eps, p=p, max_steps=max_steps, seed=seed)
        if solver == "nibble":
            res = nibble_solve(G, cfg)
            out = SolveOutcome(res.status, res.transversal, res.steps, res.resamples, res.trajectory, res.reason)
        else:
            kt = kt_free_transversal(G, t, cfg, exact_budget=budget if budget is not None else 200_000)
            out = SolveOutcome("found" if kt.transversal else "failure", kt.transversal, detail=kt.method)
            return out  # a K_{t+1}-free transversal need not be independent in G
    else:
        raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
    if out.transversal is not None and not is_independent_transversal(G, out.transversal):
        raise AssertionError(f"{solver} returned an invalid transversal")
    return out
