"""Exponential-time reference routines used to cross-check the fast paths on small inputs.

These stay deliberately plain.  Every size bound is a hard limit: exceeding it
raises :class:`SizeBoundError` instead of returning an approximation.
"""

from __future__ import annotations

import itertools
from typing import Optional

from .errors import SizeBoundError
from .gf import field, prime_powers, rank, standard_vectors
from .graph import Network, SimpleGraph
from .minor import MinorWitness

CHROMATIC_BOUND = 12
MINOR_BOUND = 12
FIELD_SUBTREE_BOUND = 10
PACKING_LINK_BOUND = 14
PERFECT_BOUND = 12
CUT_NODE_BOUND = 14


def _check(n: int, bound: int, what: str):
    if n > bound:
        raise SizeBoundError(f"{what}: size {n} exceeds oracle bound {bound}")


# -- coloring ------------------------------------------------------------------


def brute_chromatic(g: SimpleGraph, bound: int = CHROMATIC_BOUND) -> int:
    _check(len(g.nodes), bound, "brute_chromatic")
    nodes = sorted(g.nodes, key=str)
    if not nodes:
        return 0
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[u], index[v]) for u, v in g.edge_list()]
    for k in range(1, len(nodes) + 1):
        # first vertex pinned to color 0
        for rest in itertools.product(range(k), repeat=len(nodes) - 1):
            colors = (0, *rest)
            if all(colors[a] != colors[b] for a, b in edges):
                return k
    raise AssertionError("unreachable")


def is_perfect_small(g: SimpleGraph, bound: int = PERFECT_BOUND) -> bool:
    """No induced odd cycle of length >= 5 in the graph or its complement."""
    _check(len(g.nodes), bound, "is_perfect_small")
    return not _has_odd_hole(g) and not _has_odd_hole(g.complement())


def _has_odd_hole(g: SimpleGraph) -> bool:
    nodes = sorted(g.nodes, key=str)
    for size in range(5, len(nodes) + 1, 2):
        for subset in itertools.combinations(nodes, size):
            sub = g.subgraph(subset)
            if all(sub.degree(v) == 2 for v in subset) and sub.is_connected():
                return True
    return False


# -- cuts ------------------------------------------------------------------------


def brute_min_cut(net: Network, targets, bound: int = CUT_NODE_BOUND) -> int:
    """min rho(U) over node sets U holding every target and excluding the source."""
    _check(len(net.nodes), bound, "brute_min_cut")
    targets = set(targets)
    others = sorted(net.nodes - targets - {net.source})
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            subset = targets | set(extra)
            cut = sum(1 for l in net.links if l.head in subset and l.tail not in subset)
            if best is None or cut < best:
                best = cut
    return best


# -- field size --------------------------------------------------------------------


def brute_min_field(net: Network, bound: int = FIELD_SUBTREE_BOUND) -> int:
    """Smallest field admitting a valid code built from standard vectors (1 = routing).

    Searches every assignment of standard vectors to subtrees, pruning a
    branch as soon as some in-degree-2 node sees two dependent vectors, and
    confirms each hit with :func:`ncminor.coding.verify_code`.
    """
    from .coding import ROUTING, Code, verify_code
    from .subtree import decompose

    dec = decompose(net)
    n = len(dec.subtrees)
    _check(n, bound, "brute_min_field")
    meets = []
    for v in sorted(net.nodes):
        ins = net.in_links(v)
        if len(ins) == 2:
            a, b = sorted((dec.link_owner[ins[0]], dec.link_owner[ins[1]]))
            meets.append((a, b))
    by_last: dict[int, list] = {i: [] for i in range(n)}
    for a, b in meets:
        by_last[b].append(a)

    def search(f, palette):
        chosen: list = []

        def rec(i):
            if i == n:
                vectors = {link: chosen[dec.link_owner[link]] for link in net.links}
                return vectors if verify_code(net, Code(f, vectors)) else None
            for vec in palette:
                if all(rank([vec, chosen[a]], f) == 2 for a in by_last[i]):
                    chosen.append(vec)
                    hit = rec(i + 1)
                    if hit is not None:
                        return hit
                    chosen.pop()
            return None

        return rec(0)

    gf2 = field(2)
    if search(gf2, standard_vectors(gf2)[:2]) is not None:
        return ROUTING
    for q in prime_powers():
        f = field(q)
        if search(f, standard_vectors(f)) is not None:
            return q
    raise AssertionError("no field up to the supported maximum works")


# -- minors ------------------------------------------------------------------------


def _connected_sets(adj, start, allowed):
    """Each connected subset of ``allowed`` containing ``start``, exactly once."""

    def rec(current, cand, banned):
        yield current
        cand = list(cand)
        for i, w in enumerate(cand):
            ban = banned | set(cand[:i])
            grown = current | {w}
            new_cand = [c for c in cand[i + 1:]]
            for x in sorted(adj[w], key=str):
                if x in allowed and x not in grown and x not in ban and x not in new_cand:
                    new_cand.append(x)
            yield from rec(grown, new_cand, ban)

    first = [x for x in sorted(adj[start], key=str) if x in allowed]
    yield from rec(frozenset([start]), first, frozenset())


def _components(adj, vertices):
    left = set(vertices)
    count = 0
    while left:
        count += 1
        stack = [left.pop()]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in left:
                    left.remove(y)
                    stack.append(y)
    return count


def brute_minor(g: SimpleGraph, m: SimpleGraph, bound: int = MINOR_BOUND) -> Optional[MinorWitness]:
    """Branch sets showing ``m`` is a minor of ``g``, or None.

    For connected ``m`` a minor inside a component of ``g`` can be grown to
    cover that whole component, so only partitions into connected blocks are
    enumerated.  Disconnected patterns fall back to plain assignment search.
    """
    _check(len(g.nodes), bound, "brute_minor")
    pattern = sorted(m.nodes, key=str)
    if not pattern:
        return MinorWitness({})
    if len(pattern) > len(g.nodes):
        return None
    if not m.is_connected():
        return _assignment_minor(g, m)
    adj = g.adjacency()
    k = len(pattern)
    is_clique = len(m.edges) == k * (k - 1) // 2

    def touches(a, b):
        return any(y in b for x in a for y in adj[x])

    def walk(vertices, need, prefix):
        if need == 0:
            if not vertices:
                yield list(prefix)
            return
        if len(vertices) < need or _components(adj, vertices) > need:
            return
        start = min(vertices, key=str)
        for block in _connected_sets(adj, start, vertices):
            if is_clique and not all(touches(block, other) for other in prefix):
                continue
            prefix.append(block)
            yield from walk(vertices - block, need - 1, prefix)
            prefix.pop()

    for comp in g.components():
        if len(comp) < k:
            continue
        for blocks in walk(frozenset(comp), k, []):
            for perm in itertools.permutations(range(k)):
                if all(touches(blocks[perm[pattern.index(a)]], blocks[perm[pattern.index(b)]]) for a, b in m.edge_list()):
                    return MinorWitness({x: frozenset(blocks[perm[i]]) for i, x in enumerate(pattern)})
                if is_clique:
                    break
    return None


def _assignment_minor(g: SimpleGraph, m: SimpleGraph) -> Optional[MinorWitness]:
    nodes = sorted(g.nodes, key=str)
    pattern = sorted(m.nodes, key=str)
    for labels in itertools.product(range(len(pattern) + 1), repeat=len(nodes)):
        sets = {x: set() for x in pattern}
        for v, lab in zip(nodes, labels):
            if lab:
                sets[pattern[lab - 1]].add(v)
        if any(not s or not g.subgraph(s).is_connected() for s in sets.values()):
            continue
        if all(any(g.has_edge(u, v) for u in sets[a] for v in sets[b]) for a, b in m.edge_list()):
            return MinorWitness({x: frozenset(s) for x, s in sets.items()})
    return None


# -- routing ---------------------------------------------------------------------


def _steiner_arborescences(net: Network) -> list[int]:
    """Bitmasks of link sets forming an out-tree from the source whose leaves are all receivers."""
    links = net.links
    out = []
    for mask in range(1, 1 << len(links)):
        chosen = [links[i] for i in range(len(links)) if mask >> i & 1]
        heads = [l.head for l in chosen]
        if len(set(heads)) != len(heads) or net.source in heads:
            continue
        reached = {net.source}
        pending = list(chosen)
        progress = True
        while pending and progress:
            progress = False
            for l in list(pending):
                if l.tail in reached:
                    reached.add(l.head)
                    pending.remove(l)
                    progress = True
        if pending or not net.receivers <= reached:
            continue
        tails = {l.tail for l in chosen}
        if any(h not in tails and h not in net.receivers for h in heads):
            continue
        out.append(mask)
    return out


def brute_tree_packing(net: Network, h: int, bound: int = PACKING_LINK_BOUND):
    """h link-disjoint out-trees from the source reaching every receiver, or None."""
    from .treepack import TreePacking

    _check(len(net.links), bound, "brute_tree_packing")
    if h == 0:
        return TreePacking((), net.source)
    trees = _steiner_arborescences(net)

    def rec(start, used, picked):
        if len(picked) == h:
            return picked
        for i in range(start, len(trees)):
            if trees[i] & used == 0:
                hit = rec(i + 1, used | trees[i], picked + [trees[i]])
                if hit:
                    return hit
        return None

    found = rec(0, 0, [])
    if found is None:
        return None
    links = net.links
    return TreePacking(
        tuple(frozenset(links[i] for i in range(len(links)) if mask >> i & 1) for mask in found),
        net.source,
    )
