"""Seeded sweeps of solver success probability against n.

Trials run in a process pool of at most ITLAB_THREADS workers (default 1);
results are ordered by (n, trial index), so reports do not depend on
completion order.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from itlab.analysis.bounds import first_moment
from itlab.seeding import derive_seed

EXACT_CHECK_BUDGET = 2_000_000


@dataclass
class TrialRecord:
    n: int
    trial: int
    seed: int
    solver: str
    status: str
    steps: int
    resamples: int
    exact_status: str | None
    wall_ms: float


@dataclass
class ExperimentReport:
    params: dict
    trials: int
    rows: list[dict] = field(default_factory=list)
    records: list[TrialRecord] = field(default_factory=list)

    def to_dict(self, timing: bool = True) -> dict:
        rows = self.rows if timing else [{k: v for k, v in r.items() if not k.startswith("wall")} for r in self.rows]
        return {
            "params": self.params,
            "trials": self.trials,
            "rows": rows,
            "seeds": [[rec.n, rec.trial, rec.seed] for rec in self.records],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["n", "solver", "trials", "successes", "success_rate", "first_moment_log", "first_moment",
                "exact_found_on_failures", "exact_none_on_failures"]
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row)
        return buf.getvalue()


def parse_sweep(text: str) -> list[int]:
    """'n=72..144:24' or 'n=10,20,30' or 'n=5..8' -> list of n."""
    key, _, body = text.partition("=")
    if key.strip() != "n" or not body:
        raise ValueError(f"sweep must look like n=a..b[:step] or n=a,b,c; got {text!r}")
    if ".." in body:
        rng, _, step = body.partition(":")
        a, _, b = rng.partition("..")
        a, b, step = int(a), int(b), int(step or 1)
        if step < 1 or b < a:
            raise ValueError(f"bad sweep range {text!r}")
        return list(range(a, b + 1, step))
    return [int(x) for x in body.split(",")]


def _run_trial(args) -> TrialRecord:
    from itlab.constructions.instances import random_nkrs
    from itlab.solvers import solve

    n, k, r, s, trial, seed, solver, eps, verify = args
    G = random_nkrs(n, k, r, s, seed)
    t0 = time.perf_counter()
    out = solve(G, solver, seed=seed, eps=eps)
    wall = (time.perf_counter() - t0) * 1e3
    exact_status = None
    if verify and out.status != "found" and solver != "exact":
        exact_status = solve(G, "exact", budget=EXACT_CHECK_BUDGET).status
    return TrialRecord(n, trial, seed, solver, out.status, out.steps, out.resamples, exact_status, wall)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ITLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_experiment(ns, k: int, trials: int, solvers=("nibble",), *, r: int = 2, s: int = 1, seed: int = 0,
                   eps: float = 0.1, verify_failures: bool = True, threads: int | None = None) -> ExperimentReport:
    """Success probability of each solver on random (n,k,r,s)-graphs for each n.

    Trial i at size n uses seed derive_seed(derive_seed(master, n), i), shared
    by all solvers so they see the same instances.
    """
    ns = list(ns)
    jobs = []
    for n in ns:
        base = derive_seed(seed, n)
        for i in range(trials):
            for solver in solvers:
                jobs.append((n, k, r, s, i, derive_seed(base, i), solver, eps, verify_failures))
    threads = threads or _threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_trial, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        records = [_run_trial(j) for j in jobs]
    records.sort(key=lambda rec: (ns.index(rec.n), rec.trial, solvers.index(rec.solver)))
    report = ExperimentReport({"k": k, "r": r, "s": s, "ns": ns, "solvers": list(solvers), "eps": eps,
                               "master_seed": seed}, trials, records=records)
    for n in ns:
        logE = first_moment(n, k, r, s)
        for solver in solvers:
            recs = [x for x in records if x.n == n and x.solver == solver]
            succ = sum(x.status == "found" for x in recs)
            walls = np.array([x.wall_ms for x in recs])
            report.rows.append({
                "n": n,
                "solver": solver,
                "trials": len(recs),
                "successes": succ,
                "success_rate": succ / len(recs) if recs else 0.0,
                "first_moment_log": logE,
                "first_moment": float(np.exp(logE)) if logE < 709 else "inf",
                "exact_found_on_failures": sum(x.exact_status == "found" for x in recs),
                "exact_none_on_failures": sum(x.exact_status == "none" for x in recs),
                "mean_steps": float(np.mean([x.steps for x in recs])) if recs else 0.0,
                "wall_ms_mean": float(walls.mean()) if len(walls) else 0.0,
                "wall_ms_q50": float(np.quantile(walls, 0.5)) if len(walls) else 0.0,
                "wall_ms_q90": float(np.quantile(walls, 0.9)) if len(walls) else 0.0,
            })
    return report
