import pytest
from hypothesis import given, settings, strategies as st

from ncminor.cli.generators import series_parallel
from ncminor.errors import PreconditionError, UnreachableNodeError
from ncminor.flow import FlowProfile, eta, flow_profile, make_link_minimal, multicast_rate
from ncminor.graph import Link, Network, underlying_topology
from ncminor.minor import (
    TreeDecomposition,
    normalize_decomposition,
    tree_decomposition_w2,
    verify_minor_witness,
)
from ncminor.graph import complete_graph
from ncminor.oracle import brute_min_cut, brute_tree_packing
from ncminor.treepack import (
    HasK4Minor,
    TreePacking,
    perfect_tree_packing,
    routing_multicast,
    verify_packing,
    verify_routing,
)

from conftest import butterfly_net, diamond_net, load


def decomposition(net):
    td = tree_decomposition_w2(underlying_topology(net), root=net.source, compact=False)
    return normalize_decomposition(td, net.source)


def pack(net):
    return perfect_tree_packing(net, decomposition(net))


def as_pairs(tp):
    return sorted(sorted((l.tail, l.head) for l in tree) for tree in tp.trees)


def test_diamond():
    tp = pack(diamond_net())
    assert as_pairs(tp) == [[("a", "t"), ("s", "a")], [("b", "t"), ("s", "b")]]
    assert verify_packing(diamond_net(), tp, flow_profile(diamond_net()))


def test_doubled_path():
    net = Network.build("s", ["b"], [("s", "a", 2), ("a", "b", 2)])
    tp = pack(net)
    assert len(tp.trees) == 2
    assert all({l.head for l in tree} == {"a", "b"} for tree in tp.trees)
    assert brute_tree_packing(net, 2) is not None
    assert brute_tree_packing(net, 3) is None


def test_cut_node_fixture():
    net = load("series-parallel.json")
    assert flow_profile(net).lambda_ == {"a": 2, "b": 1, "t1": 2}
    tp = pack(net)
    assert len(tp.membership()["t1"]) == 2
    assert verify_packing(net, tp, flow_profile(net))
    assert brute_tree_packing(net, 2) is not None


def test_routing_diamond():
    tp = routing_multicast(diamond_net())
    assert isinstance(tp, TreePacking) and len(tp.trees) == 2
    assert verify_routing(diamond_net(), tp, 2)


def test_routing_butterfly():
    result = routing_multicast(butterfly_net())
    assert isinstance(result, HasK4Minor)
    topo = underlying_topology(butterfly_net())
    assert verify_minor_witness(topo, complete_graph(4), result.witness)


def test_verify_packing_rejects():
    net = diamond_net()
    good = pack(net)
    trees = [set(t) for t in good.trees]
    shared = TreePacking((frozenset(trees[0]), frozenset(trees[1] | {Link("s", "a")})), "s")
    verdict = verify_packing(net, shared)
    assert not verdict and "disjoint" in verdict.reason
    one = TreePacking((frozenset(trees[0]), frozenset(t for t in trees[1] if t.head != "t")), "s")
    verdict = verify_packing(net, one, flow_profile(net))
    assert not verdict and "property 1" in verdict.reason
    dangling = TreePacking((frozenset({Link("a", "t")}),), "s")
    assert "out-tree" in verify_packing(net, dangling).reason


def test_property_two_failure():
    net = diamond_net()
    lonely = TreePacking((frozenset({Link("s", "a"), Link("a", "t")}),), "s")
    verdict = verify_packing(net, lonely, pairs=[("a", "b")])
    assert not verdict and "property 2" in verdict.reason


def test_preconditions():
    redundant = Network.build("s", ["t"], [("s", "a"), ("a", "t", 2)])
    with pytest.raises(PreconditionError):
        perfect_tree_packing(redundant, decomposition(redundant))
    net = diamond_net()
    flat = TreeDecomposition((frozenset("sabt"),), ())
    with pytest.raises(PreconditionError):
        perfect_tree_packing(net, flat)
    orphan = Network.build("s", [], [("s", "a"), ("x", "y")], nodes=["s", "a", "x", "y"])
    with pytest.raises(UnreachableNodeError):
        perfect_tree_packing(orphan, decomposition(orphan))


def test_routing_rate_one():
    net = Network.build("s", ["t1", "t2"], [("s", "a"), ("a", "t1"), ("a", "t2")])
    tp = routing_multicast(net)
    assert len(tp.trees) == 1 and verify_routing(net, tp, 1)


sp_instances = st.builds(
    lambda size, seed: series_parallel(size, seed, max_links=2 * size),
    st.integers(3, 16),
    st.integers(0, 100_000),
)


@settings(max_examples=80, deadline=None)
@given(sp_instances)
def test_routing_reaches_capacity(net):
    h = multicast_rate(net)
    tp = routing_multicast(net)
    assert verify_routing(net, tp, h)


@settings(max_examples=60, deadline=None)
@given(sp_instances)
def test_perfect_packing_properties(net):
    minimal = make_link_minimal(net)
    td = decomposition(minimal)
    tp = perfect_tree_packing(minimal, td)
    lam = flow_profile(minimal).lambda_
    members = tp.membership()
    # each receiver lies in as many trees as its own max-flow
    for v in minimal.nodes - {minimal.source}:
        assert len(members.get(v, ())) == lam[v]
    pairs = td.same_bag_pairs(exclude={minimal.source})
    assert verify_packing(minimal, tp, FlowProfile(lam, 0), pairs)
    if len(minimal.nodes) <= 12:
        for u, v in pairs:
            assert eta(minimal, u, v) == brute_min_cut(minimal, {u, v})


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.integers(0, 100_000))
def test_oracle_agrees_on_small_instances(size, seed):
    net = series_parallel(size, seed, max_links=10)
    h = multicast_rate(net)
    assert brute_tree_packing(net, h) is not None
    assert brute_tree_packing(net, h + 1) is None
