import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from ncminor.errors import PreconditionError, SizeBoundError
from ncminor.graph import SimpleGraph, complete_graph, underlying_topology
from ncminor.minor import (
    MinorWitness,
    TreeDecomposition,
    contract_edge,
    delete_edge,
    find_k4_minor,
    has_clique_minor,
    has_k4_minor,
    is_normalized,
    normalize_decomposition,
    tree_decomposition_w2,
    verify_minor_witness,
    verify_tree_decomposition,
)
from ncminor.oracle import brute_minor

from conftest import butterfly_net, cycle, from_nx

K4 = complete_graph(4)


def random_graph(n, p, seed):
    return from_nx(nx.gnp_random_graph(n, p, seed=seed))


def test_contract_and_delete():
    k3 = complete_graph(3)
    assert contract_edge(k3, (0, 1)) == SimpleGraph.build([(0, 2)])
    c4 = cycle(4)
    merged = contract_edge(c4, ("0", "1"))
    assert len(merged.nodes) == 3 and len(merged.edges) == 3
    diamond = delete_edge(K4, (0, 1))
    assert len(diamond.edges) == 5 and not has_k4_minor(diamond)
    with pytest.raises(PreconditionError):
        delete_edge(c4, ("0", "2"))
    with pytest.raises(PreconditionError):
        contract_edge(c4, ("0", "2"))


def test_k4_examples():
    assert has_k4_minor(underlying_topology(butterfly_net()))
    assert not has_k4_minor(from_nx(nx.balanced_tree(2, 3)))
    assert not has_k4_minor(delete_edge(K4, (0, 1)))
    assert has_k4_minor(K4)


def test_decomposition_examples():
    td = tree_decomposition_w2(cycle(4))
    assert sorted(len(b) for b in td.bags) == [3, 3] and td.width == 2
    assert verify_tree_decomposition(cycle(4), td)
    edge = SimpleGraph.build([("u", "v")])
    td = tree_decomposition_w2(edge)
    assert td.bags == (frozenset("uv"),) and td.width == 1
    assert tree_decomposition_w2(K4) is None


def chorded_five_cycle():
    return SimpleGraph.build([(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3)])


def test_verify_hand_built_decomposition():
    g = chorded_five_cycle()
    td = TreeDecomposition((frozenset({1, 2, 3}), frozenset({1, 3, 4}), frozenset({1, 4, 5})), ((0, 1), (1, 2)))
    assert verify_tree_decomposition(g, td, max_width=2)


def test_verify_names_violations():
    g = chorded_five_cycle()
    missing_edge = TreeDecomposition((frozenset({1, 2, 3}), frozenset({1, 3}), frozenset({1, 4, 5})), ((0, 1), (1, 2)))
    verdict = verify_tree_decomposition(g, missing_edge)
    assert not verdict and verdict.reason.startswith("P2")
    split = TreeDecomposition(
        (frozenset({1, 2, 3}), frozenset({3, 4}), frozenset({4, 5, 1}), frozenset({1, 3})),
        ((0, 1), (1, 2), (0, 3)),
    )
    verdict = verify_tree_decomposition(g, split)
    assert not verdict and verdict.reason.startswith("P3")
    uncovered = TreeDecomposition((frozenset({1, 2, 3}),), ())
    assert verify_tree_decomposition(g, uncovered).reason.startswith("P1")
    not_tree = TreeDecomposition((frozenset({1, 2, 3}), frozenset({1, 3, 4}), frozenset({1, 4, 5})), ((0, 1), (1, 0)))
    assert verify_tree_decomposition(g, not_tree).reason.startswith("tree")
    wide = TreeDecomposition((frozenset({1, 2, 3, 4, 5}),), ())
    assert verify_tree_decomposition(g, wide)
    assert not verify_tree_decomposition(g, wide, max_width=2)


def test_clique_minor_examples():
    found, w = has_clique_minor(complete_graph(5), 4)
    assert found and verify_minor_witness(complete_graph(5), K4, w)
    assert not has_clique_minor(from_nx(nx.grid_2d_graph(3, 3)), 5)[0]
    topo = underlying_topology(butterfly_net())
    found, w = has_clique_minor(topo, 4)
    assert found and verify_minor_witness(topo, K4, w)
    with pytest.raises(SizeBoundError):
        has_clique_minor(complete_graph(13), 4)


def test_butterfly_witness():
    topo = underlying_topology(butterfly_net())
    w = find_k4_minor(topo)
    assert verify_minor_witness(topo, K4, w)
    assert len(w.branch_sets) == 4


def test_bad_witness():
    topo = underlying_topology(butterfly_net())
    bad = MinorWitness({0: frozenset({"s"}), 1: frozenset({"a"}), 2: frozenset({"t1", "t2"}), 3: frozenset({"d"})})
    assert not verify_minor_witness(topo, K4, bad)


def test_normalization():
    g = from_nx(nx.balanced_tree(2, 3))
    td = tree_decomposition_w2(g, root="0", compact=False)
    norm = normalize_decomposition(td, "0")
    assert norm.bags[norm.root] == frozenset({"0"})
    assert is_normalized(norm)
    assert verify_tree_decomposition(g, norm, max_width=2)


graphs = st.builds(random_graph, st.integers(1, 10), st.floats(0.15, 0.7), st.integers(0, 10_000))


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_reduction_matches_oracle(g):
    found = has_k4_minor(g)
    assert found == (brute_minor(g, K4) is not None)
    td = tree_decomposition_w2(g)
    assert (td is None) == found
    if found:
        assert verify_minor_witness(g, K4, find_k4_minor(g))
    else:
        assert verify_tree_decomposition(g, td, max_width=2)
        root = min(g.nodes, key=str) if g.nodes else None
        if root is not None:
            raw = tree_decomposition_w2(g, root=root, compact=False)
            norm = normalize_decomposition(raw, root)
            assert is_normalized(norm) and verify_tree_decomposition(g, norm, max_width=2)


@settings(max_examples=60, deadline=None)
@given(graphs, st.randoms(use_true_random=False))
def test_minor_monotone(g, rng):
    nodes = sorted(g.nodes, key=str)
    if len(nodes) < 2:
        return
    extra = set(g.edges)
    for _ in range(3):
        u, v = rng.sample(nodes, 2)
        extra.add(frozenset((u, v)))
    bigger = SimpleGraph(g.nodes, frozenset(extra))
    if has_clique_minor(g, 4)[0]:
        assert has_clique_minor(bigger, 4)[0]


@settings(max_examples=60, deadline=None)
@given(graphs, st.randoms(use_true_random=False))
def test_operations_stay_simple(g, rng):
    if not g.edges:
        return
    e = rng.choice(sorted(g.edges, key=lambda e: sorted(map(str, e))))
    for out in (contract_edge(g, e), delete_edge(g, e)):
        assert all(len(f) == 2 and f <= out.nodes for f in out.edges)
