from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggmid import graphcore as gc
from ggmid.errors import InvalidConditioningSet
from ggmid.graphcore import Graph
from ggmid.synthmodel import ModelSpec, generate_graph
from helpers import (
    complete_graph,
    cycle_graph,
    example1_graph,
    example2_graph,
    path_graph,
    star_graph,
)


@st.composite
def graphs(draw, min_p=3, max_p=8):
    p = draw(st.integers(min_p, max_p))
    pairs = list(combinations(range(1, p + 1), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return Graph(p, frozenset(chosen))


def _brute_k_separator_exists(G, u, v, k):
    pool = [w for w in G.sorted_nodes() if w not in (u, v)]
    return any(gc.is_separator(G, S, u, v) for r in range(min(k, len(pool)) + 1) for S in combinations(pool, r))


def test_graph_rejects_self_loops_and_normalizes():
    with pytest.raises(ValueError):
        Graph(3, frozenset({(1, 1)}))
    g = Graph.from_edges(3, [(2, 1), (1, 2)])
    assert g.edges == frozenset({(1, 2)})


# -- components ------------------------------------------------------------------------


def test_components_path():
    g = path_graph(3)
    assert gc.connected_components(g, {1, 2, 3}) == [frozenset({1, 2, 3})]
    assert gc.connected_components(g, {1, 3}) == [frozenset({1}), frozenset({3})]
    assert gc.connected_components(g, set()) == []


def test_components_example1_leaves():
    comps = gc.connected_components(example1_graph(6), {3, 4, 5, 6})
    assert sorted(comps, key=min) == [frozenset({w}) for w in (3, 4, 5, 6)]


# -- separators ------------------------------------------------------------------------


def test_is_separator_cases():
    assert gc.is_separator(path_graph(3), {2}, 1, 3)
    assert not gc.is_separator(complete_graph(3), {3}, 1, 2)
    assert gc.is_separator(example1_graph(6), {1, 2}, 3, 4)
    with pytest.raises(InvalidConditioningSet):
        gc.is_separator(path_graph(3), {1}, 1, 3)


# -- degree ------------------------------------------------------------------------------


def test_degree_bounded_cases():
    assert gc.is_degree_bounded(path_graph(5), 2)
    assert not gc.is_degree_bounded(star_graph(5), 3)
    g = example1_graph(6)
    assert [g.degree(w) for w in (1, 2)] == [5, 5]
    assert not gc.is_degree_bounded(g, 4)


# -- strong separability ------------------------------------------------------------------


def test_tree_edges_strongly_one_separable():
    tree = generate_graph(ModelSpec("tree", 9, seed=4))
    for u, v in tree.edges:
        assert gc.is_strongly_k_separable_pair(tree, u, v, 1)


def test_example1_pair_not_strongly_3_separable():
    assert not gc.is_strongly_k_separable_pair(example1_graph(6), 2, 1, 3)


def test_k4_pair():
    k4 = complete_graph(4)
    assert gc.strong_separator(k4, 1, 2, 3) == (3, 4)
    assert not gc.is_strongly_k_separable_pair(k4, 1, 2, 2)


def test_strongly_separable_graph_examples():
    assert gc.is_strongly_k_separable(cycle_graph(6), 2)
    assert not gc.is_strongly_k_separable(cycle_graph(6), 1)
    assert not gc.is_strongly_k_separable(example1_graph(6), 3)
    g = generate_graph(ModelSpec("degree_bounded", 10, k=3, seed=8))
    assert gc.is_degree_bounded(g, 3) and gc.is_strongly_k_separable(g, 3)


def test_k_separable_examples():
    for k in (1, 2, 3, 4):
        assert gc.is_k_separable(complete_graph(5), k)
    assert gc.is_k_separable(example1_graph(6), 3)
    assert gc.is_k_separable(path_graph(4), 1)


def test_disconnected_pairs_separable_for_every_k():
    g = Graph(4, frozenset({(1, 2), (3, 4)}))
    assert gc.strong_separator(g, 1, 3, 1) == ()


# -- generalized FVS -------------------------------------------------------------------------


def test_generalized_fvs_example2():
    g = example2_graph()
    assert gc.is_generalized_fvs(g, {6, 7}, 1)
    assert not gc.is_generalized_fvs(g, {6}, 1)


def test_generalized_fvs_on_separable_graph():
    g = cycle_graph(6)
    for F in [(), (1,), (2, 5), (1, 3, 4)]:
        assert gc.is_generalized_fvs(g, F, 2)


# -- properties ------------------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(graphs(), st.data())
def test_separator_monotone(g, data):
    u, v = data.draw(st.lists(st.sampled_from(g.sorted_nodes()), min_size=2, max_size=2, unique=True))
    others = [w for w in g.sorted_nodes() if w not in (u, v)]
    S = data.draw(st.sets(st.sampled_from(others))) if others else set()
    if gc.is_separator(g, S, u, v):
        for w in others:
            assert gc.is_separator(g, S | {w}, u, v)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(1, 3))
def test_non_neighbor_equivalence(g, k):
    for u, v in combinations(g.sorted_nodes(), 2):
        if not g.has_edge(u, v):
            assert gc.is_strongly_k_separable_pair(g, u, v, k) == _brute_k_separator_exists(g, u, v, k)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(1, 3), st.data())
def test_induced_subgraph_closure(g, k, data):
    if gc.is_strongly_k_separable(g, k):
        keep = data.draw(st.sets(st.sampled_from(g.sorted_nodes())))
        assert gc.is_strongly_k_separable(g.induced(keep), k)


def test_degree_bounded_graphs_are_strongly_separable():
    for seed in range(50):
        k = 1 + seed % 3
        g = generate_graph(ModelSpec("degree_bounded", 8, k=k, seed=seed))
        assert gc.is_degree_bounded(g, k)
        assert gc.is_strongly_k_separable(g, k)


@settings(max_examples=100, deadline=None)
@given(graphs(max_p=7))
def test_connected_strongly_1_separable_iff_acyclic(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(g.nodes)
    nxg.add_edges_from(g.edges)
    if nx.is_connected(nxg):
        assert gc.is_strongly_k_separable(g, 1) == nx.is_forest(nxg)


def test_components_match_networkx():
    rng = np.random.default_rng(1)
    for _ in range(30):
        p = 9
        edges = {(i, j) for i, j in combinations(range(1, p + 1), 2) if rng.random() < 0.2}
        g = Graph(p, frozenset(edges))
        nxg = nx.Graph()
        nxg.add_nodes_from(range(1, p + 1))
        nxg.add_edges_from(edges)
        ours = {frozenset(c) for c in gc.connected_components(g)}
        assert ours == {frozenset(c) for c in nx.connected_components(nxg)}
