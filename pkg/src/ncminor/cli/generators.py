"""Seeded random instance generators (series-parallel, planar grid, random 2-minimal)."""

from __future__ import annotations

import random
from collections import deque

from ..construct import network_from_graph
from ..flow import flow_profile, make_two_minimal, multicast_rate
from ..graph import Network, SimpleGraph, is_acyclic

KINDS = ("series-parallel", "grid-planar", "two-minimal-random")


def _bfs_rank(adj: dict, start, rng: random.Random) -> dict:
    rank = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        nbrs = sorted(adj[x], key=str)
        rng.shuffle(nbrs)
        for y in nbrs:
            if y not in rank:
                rank[y] = len(rank)
                queue.append(y)
    return rank


def _orient(edges: list[tuple], source, rng: random.Random) -> list[tuple]:
    """Direct every edge from the endpoint reached first by a randomized BFS."""
    adj: dict = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    if source not in adj:
        return []
    rank = _bfs_rank(adj, source, rng)
    return [(a, b) if rank[a] < rank[b] else (b, a) for a, b in edges if a in rank]


def series_parallel(size: int, seed: int, max_links: int | None = None, max_receivers: int = 3) -> Network:
    """Random series-parallel multigraph on ``size`` nodes, oriented acyclically.

    Starts from one edge and applies random series (subdivide) and parallel
    (duplicate) steps, so the topology never has a K4 minor.
    """
    if size < 2:
        raise ValueError("series-parallel networks need at least 2 nodes")
    max_links = max_links or 2 * size
    if max_links < size - 1:
        raise ValueError("max_links too small for a connected network")
    rng = random.Random(seed)
    edges = [(0, 1)]
    n = 2
    while n < size:
        i = rng.randrange(len(edges))
        a, b = edges[i]
        room = max_links - len(edges) - (size - n)
        if room > 0 and rng.random() < 0.45:
            edges.append((a, b))
        else:
            edges[i] = (a, n)
            edges.append((n, b))
            n += 1
    names = {k: f"v{k}" for k in range(n)}
    source_id = rng.randrange(n)
    names[source_id] = "s"
    named = [(names[a], names[b]) for a, b in edges]
    links = _orient(named, "s", rng)
    receivers = _pick_receivers(Network.build("s", [], links, nodes=names.values()), rng, max_receivers)
    return Network.build("s", receivers, links, nodes=names.values())


def _pick_receivers(net: Network, rng: random.Random, max_receivers: int, floor: int = 1) -> list:
    """Receivers drawn among nodes whose flow value reaches a random threshold."""
    lam = flow_profile(net).lambda_
    levels = sorted({x for x in lam.values() if x >= floor})
    if not levels:
        return []
    level = rng.choice(levels)
    able = sorted(v for v, x in lam.items() if x >= level)
    return rng.sample(able, rng.randint(1, min(max_receivers, len(able))))


def grid_planar(size: int, seed: int, keep: float = 0.8, max_receivers: int = 3) -> Network:
    """2-minimal network carved from a random subgraph of a size x size grid (source at a corner)."""
    if size < 2:
        raise ValueError("grid needs size >= 2")
    rng = random.Random(seed)
    for _ in range(1000):
        edges = []
        for r in range(size):
            for c in range(size):
                if c + 1 < size and rng.random() < keep:
                    edges.append((f"r{r}c{c}", f"r{r}c{c + 1}"))
                if r + 1 < size and rng.random() < keep:
                    edges.append((f"r{r}c{c}", f"r{r + 1}c{c}"))
        links = _orient(edges, "r0c0", rng)
        if not links:
            continue
        nodes = {x for l in links for x in l}
        probe = Network.build("r0c0", [], links, nodes=nodes | {"r0c0"})
        receivers = _pick_receivers(probe, rng, max_receivers, floor=2)
        if not receivers:
            continue
        net = Network.build("r0c0", receivers, links, nodes=nodes | {"r0c0"})
        return make_two_minimal(net)
    raise RuntimeError("could not draw a grid instance with rate 2")


def two_minimal_random(size: int, seed: int, perturb: bool = True) -> Network:
    """2-minimal acyclic network of about ``size`` nodes built from a random subtree graph."""
    if size < 4:
        raise ValueError("two-minimal-random needs size >= 4")
    rng = random.Random(seed)
    k = rng.randint(2, max(2, (size - 1) // 2))
    max_m = k * (k - 1) // 2
    m = max(1, min(max_m, size - 1 - k))
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    chosen = rng.sample(pairs, m)
    h = SimpleGraph.build([(f"h{i}", f"h{j}") for i, j in chosen])
    net = network_from_graph(h)
    if not perturb:
        return net
    ok, order = is_acyclic(net)
    assert ok
    links = [(l.tail, l.head) for l in net.links]
    position = {v: i for i, v in enumerate(order)}
    for _ in range(rng.randint(0, 2)):
        # subdivide a random link with a fresh relay
        idx = rng.randrange(len(links))
        a, b = links[idx]
        x = f"x{len(position)}"
        position[x] = position[a] + 0.5
        links[idx] = (a, x)
        links.append((x, b))
    nodes = sorted(position, key=position.get)
    for _ in range(rng.randint(0, 3)):
        i, j = sorted(rng.sample(range(len(nodes)), 2))
        if nodes[i] != nodes[j]:
            links.append((nodes[i], nodes[j]))
    grown = Network.build(net.source, net.receivers, links, nodes=position)
    if multicast_rate(grown) < 2:
        return net
    return make_two_minimal(grown)


def generate(kind: str, size: int, seed: int) -> Network:
    if kind == "series-parallel":
        return series_parallel(size, seed)
    if kind == "grid-planar":
        return grid_planar(size, seed)
    if kind == "two-minimal-random":
        return two_minimal_random(size, seed)
    raise ValueError(f"unknown generator kind {kind!r}; choose from {', '.join(KINDS)}")
