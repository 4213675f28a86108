"""Build a 2-minimal network with a prescribed subtree graph, and small-graph isomorphism."""

from __future__ import annotations

from typing import Optional

from .errors import PreconditionError, SizeBoundError
from .graph import Network, SimpleGraph

ISOMORPHISM_BOUND = 12
SOURCE = "s"


def relay_name(node) -> str:
    return f"r_{node}"


def receiver_name(a, b) -> str:
    """Receiver id: the sorted pair of its relay names."""
    x, y = sorted((relay_name(a), relay_name(b)))
    return f"{x}+{y}"


def network_from_graph(h: SimpleGraph) -> Network:
    """Network whose subtree graph is ``h``.

    Every node of ``h`` becomes a relay fed directly by the source and every
    edge becomes a receiver fed by its two endpoint relays.
    """
    if not h.edges:
        raise PreconditionError("graph has no edges")
    isolated = sorted((v for v in h.nodes if h.degree(v) == 0), key=str)
    if isolated:
        raise PreconditionError(f"isolated nodes are not allowed: {isolated}")
    relays = {v: relay_name(v) for v in h.nodes}
    if len(set(relays.values())) != len(relays) or SOURCE in relays.values():
        raise PreconditionError("node labels collide after renaming")
    links = [(SOURCE, relays[v]) for v in sorted(h.nodes, key=str)]
    receivers = []
    for a, b in h.edge_list():
        t = receiver_name(a, b)
        receivers.append(t)
        links += [(relays[a], t), (relays[b], t)]
    return Network.build(SOURCE, receivers, links)


def _refine(g: SimpleGraph) -> dict:
    """Vertex invariant: degree plus the sorted degrees of the neighbours."""
    adj = g.adjacency()
    return {v: (len(adj[v]), tuple(sorted(len(adj[w]) for w in adj[v]))) for v in g.nodes}


def find_isomorphism(g1: SimpleGraph, g2: SimpleGraph, bound: int = ISOMORPHISM_BOUND) -> Optional[dict]:
    """A bijection g1 -> g2 preserving adjacency, or None."""
    n = len(g1.nodes)
    if max(n, len(g2.nodes)) > bound:
        raise SizeBoundError(f"graph_isomorphic limited to {bound} nodes")
    if n != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return None
    inv1, inv2 = _refine(g1), _refine(g2)
    if sorted(inv1.values()) != sorted(inv2.values()):
        return None
    adj1, adj2 = g1.adjacency(), g2.adjacency()
    # most constrained first: rare invariants, then high degree
    counts: dict = {}
    for x in inv1.values():
        counts[x] = counts.get(x, 0) + 1
    order = sorted(g1.nodes, key=lambda v: (counts[inv1[v]], -len(adj1[v]), str(v)))
    mapping: dict = {}
    used: set = set()

    def rec(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        for w in sorted(g2.nodes, key=str):
            if w in used or inv2[w] != inv1[v]:
                continue
            if all((mapping[u] in adj2[w]) == (u in adj1[v]) for u in order[:i]):
                mapping[v] = w
                used.add(w)
                if rec(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return dict(mapping) if rec(0) else None


def graph_isomorphic(g1: SimpleGraph, g2: SimpleGraph, bound: int = ISOMORPHISM_BOUND) -> bool:
    return find_isomorphism(g1, g2, bound) is not None
