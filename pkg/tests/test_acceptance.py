"""Acceptance criteria, one test each; every test reports a PASS/FAIL line."""

import random
import time
import warnings

import networkx as nx
import pytest

from ncminor.cli.generators import grid_planar, series_parallel, two_minimal_random
from ncminor.coding import ROUTING, Code, chromatic_number, assign_code, min_field_size, verify_code
from ncminor.construct import graph_isomorphic, network_from_graph
from ncminor.flow import (
    add_super_source,
    eta,
    flow_profile,
    make_link_minimal,
    multicast_rate,
    rho,
    verify_two_minimal,
)
from ncminor.gf import field, smallest_prime_power_at_least
from ncminor.graph import Network, complete_graph, underlying_topology
from ncminor.minor import (
    find_k4_minor,
    has_k4_minor,
    normalize_decomposition,
    tree_decomposition_w2,
    verify_minor_witness,
    verify_tree_decomposition,
)
from ncminor.oracle import brute_min_cut, brute_min_field, brute_minor, brute_tree_packing
from ncminor.subtree import decompose, subtree_graph
from ncminor.treepack import HasK4Minor, TreePacking, perfect_tree_packing, routing_multicast, verify_packing

from conftest import butterfly_net, from_nx, report_criterion

K4, K5 = complete_graph(4), complete_graph(5)


def sp_suite():
    """The 200 seeded series-parallel instances shared by criteria 2 and 3."""
    return [series_parallel(5 + seed % 26, seed, max_links=60) for seed in range(200)]


def pipeline(net):
    """The routing pipeline, unrolled so the decomposition stays visible."""
    h = multicast_rate(net)
    minimal = make_link_minimal(add_super_source(net, h))
    td = tree_decomposition_w2(underlying_topology(minimal), root=minimal.source, compact=False)
    td = normalize_decomposition(td, minimal.source)
    return minimal, td, perfect_tree_packing(minimal, td)


def test_criterion_1_butterfly():
    start = time.perf_counter()
    net = butterfly_net()
    problems = []
    if multicast_rate(net) != 2:
        problems.append("rate")
    if brute_tree_packing(net, 2) is not None:
        problems.append("two disjoint trees exist")
    q, code = min_field_size(net)
    if q != 2 or not verify_code(net, code):
        problems.append(f"field size {q}")
    h = subtree_graph(decompose(net))
    chi, _ = chromatic_number(h)
    if not graph_isomorphic(h, complete_graph(3)) or chi != 3:
        problems.append("subtree graph")
    topo = underlying_topology(net)
    w = find_k4_minor(topo)
    if not has_k4_minor(topo) or w is None or not verify_minor_witness(topo, K4, w):
        problems.append("K4 witness")
    if not isinstance(routing_multicast(net), HasK4Minor):
        problems.append("routing did not report the K4 minor")
    elapsed = time.perf_counter() - start
    if elapsed >= 1.0:
        problems.append(f"runtime {elapsed:.2f}s")
    ok = not problems
    report_criterion(1, ok, f"butterfly end to end in {elapsed:.3f}s" + ("" if ok else f" ({', '.join(problems)})"))
    assert ok, problems


def test_criterion_2_routing_suite():
    start = time.perf_counter()
    failures = []
    suite = sp_suite()
    for seed, net in enumerate(suite):
        assert len(net.nodes) <= 30 and len(net.links) <= 60
        h = multicast_rate(net)
        tp = routing_multicast(net)
        if isinstance(tp, HasK4Minor) or len(tp.trees) != h:
            failures.append((seed, "tree count"))
            continue
        verdict = verify_packing(net, tp)
        if not verdict:
            failures.append((seed, verdict.reason))
            continue
        if any(not net.receivers <= {l.head for l in tree} for tree in tp.trees):
            failures.append((seed, "a tree misses a receiver"))
        # property 1 on the network the packing is built for
        minimal, _, packing = pipeline(net)
        lam = flow_profile(minimal).lambda_
        members = packing.membership()
        if any(len(members.get(v, ())) != lam[v] for v in lam):
            failures.append((seed, "property 1"))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    rates = sorted({multicast_rate(n) for n in suite})
    report_criterion(2, ok, f"{len(suite)} series-parallel instances (rates {rates}), {len(failures)} failures, {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert elapsed < 30


def test_criterion_3_eta_bound():
    failures = []
    cross_checked = 0
    for seed, net in enumerate(sp_suite()):
        minimal, td, packing = pipeline(net)
        pairs = td.same_bag_pairs(exclude={minimal.source})
        members = packing.membership()
        small = len(minimal.nodes) <= 12
        for u, v in pairs:
            need = eta(minimal, u, v)
            if small:
                cross_checked += 1
                if need != brute_min_cut(minimal, {u, v}):
                    failures.append((seed, u, v, "eta differs from cut enumeration"))
            if len(members.get(u, set()) | members.get(v, set())) < need:
                failures.append((seed, u, v, "fewer trees than eta"))
    ok = not failures
    report_criterion(3, ok, f"same-bag eta bound, {cross_checked} pairs cross-checked by cut enumeration, {len(failures)} failures")
    assert ok, failures[:5]


def test_criterion_4_round_trip():
    start = time.perf_counter()
    graphs = [g for g in nx.graph_atlas_g() if 2 <= g.number_of_nodes() <= 6 and nx.is_connected(g)]
    six = sum(1 for g in graphs if g.number_of_nodes() == 6)
    failures = []
    for g in graphs:
        h = from_nx(g)
        net = network_from_graph(h)
        if not verify_two_minimal(net) or not graph_isomorphic(subtree_graph(decompose(net)), h):
            failures.append(sorted(g.edges))
    elapsed = time.perf_counter() - start
    ok = not failures and six == 112 and elapsed < 60
    report_criterion(4, ok, f"{len(graphs)} connected graphs on 2..6 nodes ({six} on six), {len(failures)} failures, {elapsed:.1f}s")
    assert six == 112
    assert not failures, failures[:3]
    assert elapsed < 60


def test_criterion_5_field_size():
    failures = []
    seen = {}
    seed = 0
    checked = 0
    while checked < 100:
        net = two_minimal_random(12 + seed % 12, seed)
        seed += 1
        dec = decompose(net)
        if len(dec.subtrees) > 10:
            continue
        checked += 1
        q, code = min_field_size(net)
        chi, _ = chromatic_number(subtree_graph(dec))
        expected = ROUTING if chi <= 2 else smallest_prime_power_at_least(chi - 1)
        seen[q] = seen.get(q, 0) + 1
        if q != brute_min_field(net) or q != expected or not verify_code(net, code):
            failures.append(seed - 1)
    ok = not failures
    report_criterion(5, ok, f"100 networks, field sizes {dict(sorted(seen.items()))}, {len(failures)} failures")
    assert ok, failures


def test_criterion_6_width_two_biconditional():
    rng = random.Random(2024)
    failures = []
    with_minor = 0
    for _ in range(1000):
        n = rng.randint(1, 9)
        g = from_nx(nx.gnp_random_graph(n, rng.uniform(0.1, 0.8), seed=rng.randrange(10**9)))
        fast = has_k4_minor(g)
        slow = brute_minor(g, K4) is not None
        td = tree_decomposition_w2(g)
        with_minor += slow
        if fast != slow or (td is None) != slow:
            failures.append(sorted(g.edge_list()))
        elif td is not None and not verify_tree_decomposition(g, td, max_width=2):
            failures.append(sorted(g.edge_list()))
    ok = not failures
    report_criterion(6, ok, f"1000 graphs ({with_minor} with a K4 minor), {len(failures)} failures")
    assert ok, failures[:3]


def test_criterion_7_gf3_planar():
    failures = []
    max_chi = 0
    seed = checked = 0
    while checked < 50:
        net = grid_planar(3 + seed % 2, seed)
        seed += 1
        topo = underlying_topology(net)
        if len(topo.nodes) > 12:
            continue
        checked += 1
        dec = decompose(net)
        chi, col = chromatic_number(subtree_graph(dec))
        max_chi = max(max_chi, chi)
        code = assign_code(net, dec, field(3), col) if chi <= 4 else None
        if brute_minor(topo, K5) is not None or chi > 4 or not verify_code(net, code):
            failures.append(seed - 1)
    ok = not failures
    report_criterion(7, ok, f"50 grid instances, max chi {max_chi}, GF(3) codes verified, {len(failures)} failures")
    assert ok, failures


def _minor_lifting(sizes, limit):
    seed = hits = checked = 0
    failures = []
    while checked < 100:
        net = two_minimal_random(sizes[seed % len(sizes)], seed)
        seed += 1
        if len(net.nodes) > limit:
            continue
        checked += 1
        g = subtree_graph(decompose(net))
        found = brute_minor(g, K4) is not None if len(g.nodes) <= 12 else has_k4_minor(g)
        if found:
            hits += 1
            if brute_minor(underlying_topology(net), K4) is None:
                failures.append(seed - 1)
    return hits, failures


def test_criterion_8_minor_lifting():
    hits, failures = _minor_lifting(range(6, 11), 10)
    # a subtree graph with a K4 minor needs more than ten nodes, so also run
    # the same check up to the oracle's twelve-node bound
    more_hits, more_failures = _minor_lifting((11, 12), 12)
    ok = not failures and not more_failures
    report_criterion(
        8, ok,
        f"<=10 nodes: {hits} subtree-graph K4 minors; <=12 nodes: {more_hits}; "
        f"{len(failures) + len(more_failures)} failures",
    )
    assert ok, failures + more_failures
    assert more_hits > 0


def _random_digraph(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 10)
    nodes = ["s"] + [f"v{i}" for i in range(1, n)]
    links = []
    acyclic = seed % 2 == 0
    for _ in range(rng.randint(n, 3 * n)):
        i, j = rng.sample(range(n), 2)
        if acyclic and i > j:
            i, j = j, i
        if j == 0:
            continue
        links.append((nodes[i], nodes[j]))
    return Network.build("s", [], links, nodes=nodes)


def test_criterion_9_lambda_equals_rho():
    failures = []
    for seed in range(100):
        out = make_link_minimal(_random_digraph(seed))
        lam = flow_profile(out).lambda_
        if any(lam[v] != rho(out, {v}) for v in out.nodes - {out.source}):
            failures.append(seed)
    ok = not failures
    report_criterion(9, ok, f"100 inputs (half cyclic), {len(failures)} failures")
    assert ok, failures


def test_criterion_10_performance():
    net = series_parallel(200, 7, max_links=400)
    start = time.perf_counter()
    tp = routing_multicast(net)
    elapsed = time.perf_counter() - start
    fast = elapsed < 5
    report_criterion(
        10, fast,
        f"{len(net.nodes)} nodes, {len(net.links)} links, {len(tp.trees)} trees in {elapsed:.2f}s",
        soft=True,
    )
    if not fast:
        warnings.warn(f"routing_multicast took {elapsed:.2f}s on the 200-node instance")
    assert isinstance(tp, TreePacking) and len(tp.trees) == multicast_rate(net)
