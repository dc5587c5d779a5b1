import math
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itlab.analysis.census import find_clique
from itlab.constructions.instances import assemble_upper_bound_instance, random_nkrs
from itlab.core import InstanceError, PartitionedHypergraph, Transversal, is_independent_transversal, local_degree
from itlab.core import max_part_avg_degree
from itlab.solvers import SOLVERS, solve
from itlab.solvers.exact import brute_force_count, count_transversals, exact_find
from itlab.solvers.greedy import greedy_find
from itlab.solvers.lll import lll_sample
from itlab.solvers.reductions import (
    ReductionError,
    build_vertex_colour_graph,
    kt_free_transversal,
    max_degree_trim,
    min_monochromatic_colouring,
    monochromatic_subgraph,
    sparsify_local_degree,
    transversal_to_colouring,
)

from oracles import has_clique, it_count, list_colouring_count


@st.composite
def hypergraphs(draw, r=2, max_parts=5, max_size=3, max_edges=12):
    m = draw(st.integers(r, max_parts))
    sizes = [draw(st.integers(1, max_size)) for _ in range(m)]
    parts, nxt = [], 0
    for s in sizes:
        parts.append(list(range(nxt, nxt + s)))
        nxt += s
    candidates = [pick for group in combinations(range(m), r) for pick in product(*(parts[i] for i in group))]
    edges = draw(st.lists(st.sampled_from(candidates), unique=True, max_size=max_edges))
    return PartitionedHypergraph(r, parts, edges)


class TestExact:
    def test_edgeless_gives_first_assignment(self):
        G = PartitionedHypergraph(2, [[0, 1], [2, 3, 4]])
        res = exact_find(G)
        assert res.status == "found" and res.transversal.to_json() == [0, 2]

    def test_fano_none(self):
        G, _ = assemble_upper_bound_instance(2, 2, 1, seed=0)
        res = exact_find(G)
        assert res.status == "none" and res.nodes <= 128

    def test_budget(self):
        G, _ = assemble_upper_bound_instance(3, 2, 1, seed=0)
        assert exact_find(G, budget=5).status == "budget"

    def test_random_20_6(self):
        G = random_nkrs(20, 6, 2, 1, seed=0)
        res = exact_find(G)
        assert res.status == "found" and is_independent_transversal(G, res.transversal)

    def test_empty_part(self):
        assert exact_find(PartitionedHypergraph(2, [[0], []])).status == "none"

    def test_count_edgeless_product(self):
        assert count_transversals(PartitionedHypergraph(2, [[0, 1], [2, 3, 4]])) == 6
        assert count_transversals(PartitionedHypergraph(2, [[0, 1], [2, 3, 4]]), cap=4) == 4

    @given(hypergraphs(r=2))
    @settings(max_examples=80, deadline=None)
    def test_graph_count_matches_oracle(self, G):
        expected = it_count(G.parts, G.edges.tolist())
        assert count_transversals(G) == expected == brute_force_count(G)
        res = exact_find(G)
        assert (res.status == "found") == (expected > 0)
        if res.transversal:
            assert is_independent_transversal(G, res.transversal)

    @given(hypergraphs(r=3, max_parts=5, max_size=2, max_edges=16))
    @settings(max_examples=60, deadline=None)
    def test_hypergraph_count_matches_oracle(self, G):
        assert count_transversals(G) == it_count(G.parts, G.edges.tolist())


class TestGreedy:
    def test_finds_on_sparse(self):
        G = random_nkrs(30, 10, 2, 1, seed=2)
        T = greedy_find(G)
        assert T is not None and is_independent_transversal(G, T)

    def test_fails_on_certificate(self):
        G, _ = assemble_upper_bound_instance(2, 2, 1, seed=0)
        assert greedy_find(G) is None


class TestLLL:
    def test_edgeless_zero_rounds(self):
        res = lll_sample(PartitionedHypergraph(2, [[0, 1], [2]]), 10, seed=0)
        assert res.ok and res.resamples == 0

    def test_empty_part_error(self):
        with pytest.raises(InstanceError):
            lll_sample(PartitionedHypergraph(2, [[0], []]), 10, seed=0)

    def test_deterministic(self):
        G = random_nkrs(60, 20, 2, 1, seed=1)
        a, b = lll_sample(G, 10_000, 9), lll_sample(G, 10_000, 9)
        assert a == b and a.ok

    def test_gives_up(self):
        G, _ = assemble_upper_bound_instance(2, 2, 1, seed=0)
        res = lll_sample(G, 50, seed=0)
        assert not res.ok and res.resamples == 50

    def test_hypergraph_rejected(self):
        with pytest.raises(InstanceError):
            lll_sample(random_nkrs(4, 2, 3, 1, 0), 10, 0)


class TestTrim:
    def test_regular_unchanged(self):
        G = random_nkrs(20, 8, 2, 1, seed=0)
        H, D2 = max_degree_trim(G, 0.5)
        assert H == G
        assert D2 == pytest.approx(max_part_avg_degree(G) / (1 - 0.5 / 8))

    def test_removes_the_heavy_vertex(self):
        # one hub of degree 20 among 40 parts of size 40, all other vertices isolated
        parts = [list(range(40 * i, 40 * i + 40)) for i in range(40)]
        edges = [[0, 40 * j] for j in range(1, 21)]
        G = PartitionedHypergraph(2, parts, edges)
        D = max_part_avg_degree(G)
        eps = 0.5
        assert 20 > 8 * D / eps
        H, _ = max_degree_trim(G, eps)
        assert H.num_vertices == G.num_vertices - 1 and 0 not in H.vertices.tolist()

    def test_small_part_rejected(self):
        G = random_nkrs(20, 2, 2, 1, seed=0)
        with pytest.raises(ReductionError, match="part"):
            max_degree_trim(G, 0.5)

    @given(st.integers(5, 30), st.integers(0, 2 ** 32))
    @settings(max_examples=20, deadline=None)
    def test_removed_fraction_bound(self, n, seed):
        G = random_nkrs(n, 30, 2, 1, seed)
        eps = 0.5
        D = max_part_avg_degree(G)
        bad = G.degrees > 8 * D / eps
        for p in G.parts:
            assert bad[list(p)].sum() <= eps * len(p) / 8


class TestSparsify:
    def test_gamma_one_identity(self):
        G = random_nkrs(20, 10, 2, 1, seed=0)
        assert sparsify_local_degree(G, 1.0, seed=0) is G

    def test_statistics(self):
        # s=80 matching edges per pair keeps local degree 1 with D around 53
        G = random_nkrs(100, 150, 2, 80, seed=3)
        gamma, eps = 0.75, 0.5
        D = max_part_avg_degree(G)
        H = sparsify_local_degree(G, gamma, seed=1, eps=eps)
        Dp = (1 + eps / 4) * D ** gamma
        assert max_part_avg_degree(H) <= Dp
        assert H.part_sizes.min() >= (1 + eps / 2) * Dp
        assert local_degree(H) <= math.log(Dp) ** 2
        keep = D ** (gamma - 1)
        assert abs(H.num_vertices / G.num_vertices - keep) < 4 * math.sqrt(keep / G.num_vertices)

    def test_local_degree_precondition(self):
        parts = [[0], [1, 2, 3, 4]]
        G = PartitionedHypergraph(2, parts, [[0, 1], [0, 2], [0, 3], [0, 4]])
        with pytest.raises(ReductionError, match="local degree"):
            sparsify_local_degree(G, 0.5, seed=0)


class TestKtFree:
    @pytest.mark.parametrize("t", [1, 2, 3])
    def test_colouring_local_optimum(self, t):
        G = random_nkrs(40, 12, 2, 1, seed=t)
        colour = min_monochromatic_colouring(G, t, seed=0)
        mono = monochromatic_subgraph(G, colour)
        assert (mono.degrees * t <= G.degrees).all()
        if t == 1:
            assert mono == G

    def test_transversal_is_clique_free(self):
        G = random_nkrs(60, 6, 2, 1, seed=4)
        res = kt_free_transversal(G, 2)
        assert res.transversal is not None
        chosen = res.transversal.vertices()
        assert find_clique(G, chosen, 3) is None
        adj = {v: set(G.neighbours(v).tolist()) for v in chosen}
        assert not has_clique(adj, chosen, 3)
        assert is_independent_transversal(res.mono, res.transversal)


class TestVertexColourGraph:
    def test_structure(self):
        G, labels = build_vertex_colour_graph(2, [(0, 1)], [[1, 2], [2, 3]])
        assert G.part_sizes.tolist() == [2, 2]
        assert [(labels[u], labels[v]) for u, v in G.edges.tolist()] == [((0, 2), (1, 2))]
        assert local_degree(G) == 1

    def test_empty_list(self):
        with pytest.raises(ValueError):
            build_vertex_colour_graph(2, [], [[1], []])

    def test_edgeless_base(self):
        G, _ = build_vertex_colour_graph(3, [], [[1], [1, 2], [3]])
        assert G.num_edges == 0 and count_transversals(G) == 2

    @given(st.integers(1, 4), st.data())
    @settings(max_examples=80, deadline=None)
    def test_bijection_with_list_colourings(self, n, data):
        pairs = list(combinations(range(n), 2))
        base = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
        lists = [data.draw(st.sets(st.integers(1, 3), min_size=1)) for _ in range(n)]
        G, labels = build_vertex_colour_graph(n, base, lists)
        assert count_transversals(G) == list_colouring_count(n, base, lists)
        res = exact_find(G)
        if res.transversal:
            colouring = transversal_to_colouring(res.transversal, labels)
            assert all(colouring[u] != colouring[w] for u, w in base)
            assert all(colouring[v] in lists[v] for v in range(n))


class TestDispatcher:
    @pytest.mark.parametrize("solver", SOLVERS)
    def test_every_solver_runs(self, solver):
        G = random_nkrs(100, 40, 2, 1, seed=5)
        out = solve(G, solver, seed=1)
        assert out.status == "found"
        d = out.to_dict()
        assert set(d) >= {"status", "transversal", "steps", "trajectory", "resamples"}

    def test_unknown(self):
        with pytest.raises(ValueError):
            solve(PartitionedHypergraph(2, [[0]]), "magic")

    def test_exact_none_status(self):
        G, _ = assemble_upper_bound_instance(2, 2, 1, seed=0)
        assert solve(G, "exact").status == "none"
        assert solve(G, "nibble").status == "failure"
