"""Semi-random nibble for independent transversals in graphs.

One step activates every open part with probability p, picks a uniform
live vertex in each activated part and commits the picks that have no
picked neighbour. A live vertex survives the step iff none of its
neighbours was picked and an auxiliary coin lands heads; the coin has
probability p_v / q_v, where q_v is the exact probability that no
neighbour is picked and p_v = 1 - d(v) p / S(t), so every vertex survives
with probability exactly p_v. Once the measured ratio of smallest part
size to largest part average degree reaches the completion ratio, the
remaining instance is finished by the resampling sampler.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from itlab.core import (
    InstanceError,
    PartitionedHypergraph,
    Transversal,
    is_independent_transversal,
    max_part_avg_degree,
)
from itlab.seeding import derive_seed, make_rng
from itlab.solvers.reductions import ReductionError, max_degree_trim

COMPLETION_SALT = 0xC0FFEE


class StepFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class NibbleConfig:
    eps: float = 0.1
    p: float | None = None
    t_star: int | None = None
    max_steps: int = 10_000
    p_floor: float = 0.02
    completion_ratio: float = 2 * math.e
    step_retries: int = 20
    global_retries: int = 1000
    exact_limit: float = 1e5
    seed: int = 0
    check_invariants: bool = True

    def __post_init__(self):
        if self.p is not None and not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.t_star is not None and self.t_star < 1:
            raise ValueError(f"t_star must be >= 1, got {self.t_star}")

    def activation_probability(self, D: float) -> float:
        if self.p is not None:
            return self.p
        base = 1 / math.log(D) ** 3 if D > math.e else 0.5
        return min(max(base, self.p_floor), 0.5)

    def steps(self, p: float, eps: float) -> int:
        if self.t_star is not None:
            return min(self.t_star, self.max_steps)
        if p <= 0:
            return self.max_steps
        return min(math.ceil(10 / (eps * p)), self.max_steps)


@dataclass
class NibbleState:
    """I(t), T(t), the live sets V_i(t) (as a vertex mask), S(t), D(t)."""

    G: PartitionedHypergraph
    active: np.ndarray  # sorted part indices I(t)
    live: np.ndarray  # bool mask over vertex ids
    transversal: dict[int, int]
    S: float
    D: float
    eps: float
    step: int = 0
    live_edges: np.ndarray | None = None
    trajectory: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.live_edges is None:
            e = self.G.edges
            self.live_edges = e[self.live[e[:, 0]] & self.live[e[:, 1]]] if len(e) else e

    @classmethod
    def initial(cls, G: PartitionedHypergraph, S: float, D: float, eps: float) -> "NibbleState":
        G._require_graph()
        return cls(G, np.arange(G.num_parts), G.part_of >= 0, {}, float(S), float(D), eps)

    def part_sizes(self) -> np.ndarray:
        po = self.G.part_of[self.live]
        return np.bincount(po, minlength=self.G.num_parts)[self.active]

    def live_degrees(self) -> np.ndarray:
        e = self.live_edges
        return np.bincount(e.ravel(), minlength=self.G.id_bound)

    def part_avg_degrees(self) -> np.ndarray:
        deg = self.live_degrees()
        lv = np.flatnonzero(self.live)
        sums = np.bincount(self.G.part_of[lv], weights=deg[lv], minlength=self.G.num_parts)[self.active]
        sizes = self.part_sizes()
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(sizes > 0, sums / np.maximum(sizes, 1), 0.0)

    def measured_ratio(self) -> float:
        if not len(self.active):
            return math.inf
        dmax = float(self.part_avg_degrees().max())
        smin = float(self.part_sizes().min())
        return math.inf if dmax == 0 else smin / dmax

    def summary(self) -> dict:
        sizes = self.part_sizes()
        avgs = self.part_avg_degrees()
        return {
            "step": self.step,
            "active_parts": int(len(self.active)),
            "min_part_size": int(sizes.min()) if len(sizes) else 0,
            "mean_part_size": float(sizes.mean()) if len(sizes) else 0.0,
            "max_avg_degree": float(avgs.max()) if len(avgs) else 0.0,
            "mean_avg_degree": float(avgs.mean()) if len(avgs) else 0.0,
            "S": self.S,
            "D": self.D,
        }


class StepKernel:
    """Per-step precomputation over the live graph; sampling is batched so
    that many independent copies of one step can be drawn at once."""

    def __init__(self, state: NibbleState, p: float):
        G = state.G
        self.p = p
        po_all = G.part_of
        lv = np.flatnonzero(state.live)
        order = np.argsort(po_all[lv], kind="stable")
        self.vertices = lv[order]
        nL = len(self.vertices)
        self.plocal_of_part = np.full(G.num_parts, -1, dtype=np.int64)
        self.plocal_of_part[state.active] = np.arange(len(state.active))
        vpart = self.plocal_of_part[po_all[self.vertices]]
        if (vpart < 0).any():
            raise InstanceError("live vertex outside the active parts")
        nI = len(state.active)
        self.sizes = np.bincount(vpart, minlength=nI)
        self.starts = np.concatenate([[0], np.cumsum(self.sizes)[:-1]])
        self.vpart = vpart
        loc = np.full(G.id_bound, -1, dtype=np.int64)
        loc[self.vertices] = np.arange(nL)
        e = state.live_edges
        a, b = loc[e[:, 0]], loc[e[:, 1]]
        self.adj = sp.csr_matrix((np.ones(2 * len(a), dtype=np.float32),
                                  (np.concatenate([a, b]), np.concatenate([b, a]))), shape=(nL, nL))
        self.degree = np.bincount(np.concatenate([a, b]), minlength=nL)
        # q_v = prod_j (1 - p |N(v) cap V_j| / |V_j|): exact probability that no neighbour is picked
        src = np.concatenate([a, b])
        dst_part = vpart[np.concatenate([b, a])]
        logq = np.zeros(nL)
        if len(src):
            keys, counts = np.unique(src * max(nI, 1) + dst_part, return_counts=True)
            kv, kj = keys // max(nI, 1), keys % max(nI, 1)
            frac = p * counts / self.sizes[kj]
            with np.errstate(divide="ignore"):
                terms = np.log1p(-np.minimum(frac, 1.0))
            logq = np.bincount(kv, weights=terms, minlength=nL)
        self.q = np.exp(logq)
        self.p_v = np.clip(1 - self.degree * p / state.S, 0.0, 1.0) if state.S > 0 else np.zeros(nL)
        with np.errstate(divide="ignore", invalid="ignore"):
            self.coin = np.where(self.q > 0, np.minimum(self.p_v / self.q, 1.0), 0.0)
        self.coin_overflow = bool((self.p_v > self.q * (1 + 1e-12) + 1e-15).any())

    def sample(self, rng: np.random.Generator, batch: int = 1) -> dict:
        nI, nL = len(self.sizes), len(self.vertices)
        activated = rng.random((batch, nI)) < self.p
        offsets = (rng.random((batch, nI)) * self.sizes).astype(np.int64)
        chosen = self.starts[None, :] + offsets
        picked = np.zeros((batch, nL), dtype=np.float32)
        rows = np.repeat(np.arange(batch), nI).reshape(batch, nI)
        picked[rows[activated], chosen[activated]] = 1.0
        hit = np.asarray(self.adj @ picked.T).T > 0
        coin = rng.random((batch, nL)) < self.coin
        survive = ~hit & coin
        committed = activated & ~np.take_along_axis(hit, chosen, axis=1)
        return {"activated": activated, "chosen": chosen, "hit": hit, "survive": survive, "committed": committed}


def survival_frequencies(state: NibbleState, p: float, trials: int, seed: int,
                         batch: int = 10_000) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Empirical survival frequency of every live vertex over ``trials``
    independent copies of one step, with the target p_v and vertex ids."""
    kernel = StepKernel(state, p)
    rng = make_rng(seed)
    total = np.zeros(len(kernel.vertices))
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        total += kernel.sample(rng, b)["survive"].sum(axis=0)
        done += b
    return total / trials, kernel.p_v, kernel.vertices


def nibble_step(state: NibbleState, cfg: NibbleConfig, seed: int, *, p: float | None = None) -> NibbleState:
    """One nibble step; raises StepFailure when the outcome breaks the size/degree bookkeeping.

    ``p`` defaults to cfg.p, or to the schedule value for the current D(t).
    """
    if p is None:
        p = cfg.p if cfg.p is not None else cfg.activation_probability(state.D)
    kernel = StepKernel(state, p)
    if kernel.coin_overflow:
        raise StepFailure("survival target p_v exceeds q_v (part below S(t))")
    draw = kernel.sample(make_rng(seed), 1)
    committed = draw["committed"][0]
    chosen = draw["chosen"][0]
    survive = draw["survive"][0]

    G = state.G
    T = dict(state.transversal)
    for i in np.flatnonzero(committed):
        T[int(state.active[i])] = int(kernel.vertices[chosen[i]])
    keep_part = ~committed
    new_active = state.active[keep_part]
    new_live = np.zeros_like(state.live)
    stay = survive & keep_part[kernel.vpart]
    new_live[kernel.vertices[stay]] = True
    eps = state.eps
    S = (1 - p / (1 + 3 * eps / 4)) * state.S
    D = (1 - p / (1 + eps / 4)) * state.D
    e = state.live_edges
    new_edges = e[new_live[e[:, 0]] & new_live[e[:, 1]]] if len(e) else e
    nxt = NibbleState(G, new_active, new_live, T, S, D, eps, state.step + 1, new_edges, state.trajectory)

    if len(new_active):
        sizes = nxt.part_sizes()
        if sizes.min() == 0:
            raise StepFailure(f"part {int(new_active[np.argmin(sizes)])} emptied")
        if S < 1:
            raise StepFailure(f"S(t) = {S:.3g} fell below 1")
        if sizes.min() < S:
            raise StepFailure(f"part size {int(sizes.min())} < S(t+1) = {S:.3g}")
        avg = nxt.part_avg_degrees()
        if avg.max() > D:
            raise StepFailure(f"part average degree {avg.max():.3g} > D(t+1) = {D:.3g}")
    if cfg.check_invariants:
        _check_invariants(state, nxt)
    return nxt


def _check_invariants(prev: NibbleState, nxt: NibbleState) -> None:
    G = nxt.G
    active = set(nxt.active.tolist())
    assert active <= set(prev.active.tolist()), "I(t+1) not contained in I(t)"
    assert set(nxt.transversal) == set(range(G.num_parts)) - active, "T(t) must cover exactly the closed parts"
    image = np.zeros(G.id_bound, dtype=bool)
    image[list(nxt.transversal.values())] = True
    e = G.edges
    assert not (image[e[:, 0]] & image[e[:, 1]]).any(), "T(t) is not independent"
    assert not ((image[e[:, 0]] & nxt.live[e[:, 1]]) | (image[e[:, 1]] & nxt.live[e[:, 0]])).any(), \
        "a live vertex is adjacent to T(t)"
    picked = np.fromiter(nxt.transversal.items(), dtype=np.dtype((np.int64, 2)), count=len(nxt.transversal))
    assert (G.part_of[picked[:, 1]] == picked[:, 0]).all() if len(picked) else True


def _step_diagnostics(prev: NibbleState, nxt: NibbleState) -> dict:
    G = prev.G
    po = G.part_of
    both = np.intersect1d(prev.active, nxt.active)
    old_sizes = np.bincount(po[prev.live], minlength=G.num_parts)[both]
    new_sizes = np.bincount(po[nxt.live], minlength=G.num_parts)[both]
    size_ratio = float((new_sizes / old_sizes).mean()) if len(both) else 1.0
    d_old = prev.live_degrees()
    d_new = nxt.live_degrees()
    big = nxt.live & (d_old >= prev.D / 4) & (d_old > 0)
    degree_ratio = float((d_new[big] / d_old[big]).mean()) if big.any() else 1.0
    return {"size_ratio": size_ratio, "degree_ratio": degree_ratio}


@dataclass
class NibbleResult:
    status: str  # "found" or "failure"
    transversal: Transversal | None
    steps: int
    resamples: int
    trajectory: list[dict]
    reason: str = ""
    completion: str = ""
    p: float = 0.0
    eps: float = 0.0
    t_star: int = 0
    terminal_ratio: float | None = None
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "transversal": self.transversal.to_json() if self.transversal else None,
            "steps": self.steps,
            "resamples": self.resamples,
            "trajectory": self.trajectory,
            "reason": self.reason,
            "completion": self.completion,
            "p": self.p,
            "eps": self.eps,
            "t_star": self.t_star,
            "terminal_ratio": _finite(self.terminal_ratio),
        }


def _finite(x):
    if x is None or math.isfinite(x):
        return x
    return "inf"


def _complete(state: NibbleState, cfg: NibbleConfig) -> tuple[dict[int, int] | None, str]:
    from itlab.solvers.exact import exact_find
    from itlab.solvers.lll import lll_sample

    if not len(state.active):
        return {}, "none-needed"
    G = state.G
    po = G.part_of
    lv = np.flatnonzero(state.live)
    members = {int(i): [] for i in state.active}
    for v, i in zip(lv.tolist(), po[lv].tolist()):
        members[i].append(v)
    order = [int(i) for i in state.active]
    sub = PartitionedHypergraph(2, [members[i] for i in order], state.live_edges, validate=False)
    sizes = sub.part_sizes
    log_space = float(np.log(sizes.astype(float)).sum())
    seed = derive_seed(cfg.seed, COMPLETION_SALT)
    if log_space <= math.log(cfg.exact_limit):
        res = exact_find(sub, budget=int(cfg.exact_limit))
        if res.transversal is None:
            return None, f"exact:{res.status}"
        return {order[j]: v for j, v in res.transversal.assignment.items()}, "exact"
    res = lll_sample(sub, max(50 * sub.num_edges, 1000), seed)
    if res.transversal is None:
        return None, f"lll:failed after {res.resamples} resamples"
    return {order[j]: v for j, v in res.transversal.assignment.items()}, "lll"


def nibble_solve(G: PartitionedHypergraph, cfg: NibbleConfig | None = None) -> NibbleResult:
    """Trim, nibble until the measured ratio allows completion, then complete.

    Never returns an invalid transversal: failures come back as a result
    with status "failure", a reason and the trajectory so far.
    """
    cfg = cfg or NibbleConfig()
    started = time.perf_counter()
    if G.r != 2:
        raise InstanceError("the nibble is implemented for graphs only (r=2)")

    def fail(reason: str, steps=0, resamples=0, trajectory=None, **kw) -> NibbleResult:
        return NibbleResult("failure", None, steps, resamples, trajectory or [], reason,
                            wall_ms=(time.perf_counter() - started) * 1e3, **kw)

    if G.num_parts == 0:
        return NibbleResult("found", Transversal({}), 0, 0, [], completion="none-needed")
    if min(G.part_sizes) == 0:
        return fail("precondition: empty part")
    D0 = max_part_avg_degree(G)
    if cfg.eps < 1 and D0 > 0:
        try:
            H, D = max_degree_trim(G, cfg.eps)
        except ReductionError as exc:
            return fail(f"precondition: {exc}")
        eps = cfg.eps / 2
    else:
        if min(G.part_sizes) < (1 + cfg.eps) * D0:
            return fail(f"precondition: smallest part below (1+eps)D = {(1 + cfg.eps) * D0:.4g}")
        H, D, eps = G, D0, cfg.eps
    p = cfg.activation_probability(D)
    t_star = cfg.steps(p, eps)
    state = NibbleState.initial(H, (1 + eps) * D, D, eps)
    trajectory = state.trajectory
    trajectory.append(state.summary() | {"resamples": 0})
    resamples = 0
    ratio = state.measured_ratio()
    while ratio < cfg.completion_ratio and state.step < t_star and len(state.active):
        base = derive_seed(cfg.seed, state.step)
        last_reason = ""
        for attempt in range(cfg.step_retries):
            try:
                nxt = nibble_step(state, cfg, derive_seed(base, attempt), p=p)
                break
            except StepFailure as exc:
                last_reason = str(exc)
                resamples += 1
                if resamples >= cfg.global_retries:
                    return fail(f"global retry budget exhausted at step {state.step}: {last_reason}",
                                state.step, resamples, trajectory, p=p, eps=eps, t_star=t_star)
        else:
            return fail(f"step {state.step} failed {cfg.step_retries} times: {last_reason}",
                        state.step, resamples, trajectory, p=p, eps=eps, t_star=t_star)
        diag = _step_diagnostics(state, nxt)
        state = nxt
        trajectory.append(state.summary() | diag | {"resamples": attempt})
        ratio = state.measured_ratio()
    partial, how = _complete(state, cfg)
    if partial is None:
        return fail(f"completion failed ({how}) at ratio {ratio:.3g}", state.step, resamples, trajectory,
                    completion=how, p=p, eps=eps, t_star=t_star, terminal_ratio=ratio)
    assignment = dict(state.transversal)
    assignment.update(partial)
    T = Transversal(dict(sorted(assignment.items())))
    if not is_independent_transversal(G, T):
        raise AssertionError("nibble produced an invalid transversal")
    return NibbleResult("found", T, state.step, resamples, trajectory, completion=how, p=p, eps=eps,
                        t_star=t_star, terminal_ratio=ratio,
                        wall_ms=(time.perf_counter() - started) * 1e3)


def with_seed(cfg: NibbleConfig, seed: int) -> NibbleConfig:
    return replace(cfg, seed=seed)
