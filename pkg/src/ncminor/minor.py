"""Minor operations, K4-minor detection and width-2 tree decompositions.

K4-minor-freeness is decided by series-parallel reduction: repeatedly delete
vertices of degree at most one and suppress vertices of degree two (joining
their neighbours).  A graph has no K4 minor exactly when this empties it, and
the elimination order then yields a tree decomposition of width at most two.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional

from .errors import PreconditionError
from .graph import SimpleGraph, Verdict, complete_graph


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset, ...]
    tree_edges: tuple[tuple[int, int], ...]
    root: int = 0

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.bags]
        for i, j in self.tree_edges:
            out[i].append(j)
            out[j].append(i)
        return out

    def parents(self) -> list[Optional[int]]:
        """Parent of each bag when the tree hangs from ``root`` (BFS order)."""
        parent: list[Optional[int]] = [None] * len(self.bags)
        if not self.bags:
            return parent
        nbrs = self.neighbors()
        seen = {self.root}
        queue = [self.root]
        for x in queue:
            for y in sorted(nbrs[x]):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    queue.append(y)
        return parent

    def postorder(self) -> list[int]:
        """Bags ordered children-first, root last."""
        parent = self.parents()
        children: list[list[int]] = [[] for _ in self.bags]
        for i, p in enumerate(parent):
            if p is not None:
                children[p].append(i)
        out: list[int] = []
        stack = [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                out.append(x)
                continue
            stack.append((x, True))
            for c in sorted(children[x], reverse=True):
                stack.append((c, False))
        return out

    def same_bag_pairs(self, exclude: Iterable = ()) -> list[tuple]:
        exclude = set(exclude)
        pairs = set()
        for bag in self.bags:
            items = sorted((x for x in bag if x not in exclude), key=str)
            for i, u in enumerate(items):
                for v in items[i + 1:]:
                    pairs.add((u, v))
        return sorted(pairs, key=lambda p: (str(p[0]), str(p[1])))

    def to_dict(self) -> dict:
        return {
            "bags": [sorted(b, key=str) for b in self.bags],
            "tree_edges": [list(e) for e in self.tree_edges],
            "root": self.root,
            "width": self.width,
        }


@dataclass(frozen=True)
class MinorWitness:
    branch_sets: dict

    def to_dict(self) -> dict:
        return {str(k): sorted(v, key=str) for k, v in sorted(self.branch_sets.items(), key=lambda kv: str(kv[0]))}


# -- elementary minor operations ----------------------------------------------


def delete_edge(g: SimpleGraph, e) -> SimpleGraph:
    e = frozenset(e)
    if e not in g.edges:
        raise PreconditionError(f"edge {sorted(e, key=str)} not in graph")
    return SimpleGraph(g.nodes, g.edges - {e})


def contract_edge(g: SimpleGraph, e) -> SimpleGraph:
    """Merge the endpoints of ``e`` into its first endpoint (in string order)."""
    e = frozenset(e)
    if e not in g.edges:
        raise PreconditionError(f"edge {sorted(e, key=str)} not in graph")
    keep, gone = sorted(e, key=str)
    edges = set()
    for f in g.edges:
        f = frozenset(keep if x == gone else x for x in f)
        if len(f) == 2:
            edges.add(f)
    return SimpleGraph(g.nodes - {gone}, frozenset(edges))


# -- series-parallel reduction -------------------------------------------------


def _reduce(g: SimpleGraph, keep: Hashable = None) -> tuple[list[tuple], dict]:
    """Eliminate vertices of degree <= 2 until stuck.

    Returns the elimination list of ``(vertex, neighbours at elimination)`` and
    the adjacency of whatever could not be reduced.  ``keep`` is eliminated
    only once it is the last vertex of its component.
    """
    adj = {v: set(n) for v, n in g.adjacency().items()}
    heap = [(str(v), v) for v in adj if len(adj[v]) <= 2]
    heapq.heapify(heap)
    order: list[tuple] = []
    while heap:
        _, v = heapq.heappop(heap)
        if v not in adj or len(adj[v]) > 2:
            continue
        nbrs = adj[v]
        if v == keep and nbrs:
            continue
        order.append((v, tuple(sorted(nbrs, key=str))))
        for w in nbrs:
            adj[w].discard(v)
        if len(nbrs) == 2:
            a, b = nbrs
            adj[a].add(b)
            adj[b].add(a)
        del adj[v]
        for w in nbrs:
            if len(adj[w]) <= 2:
                heapq.heappush(heap, (str(w), w))
    return order, adj


def has_k4_minor(g: SimpleGraph) -> bool:
    return bool(_reduce(g)[1])


def tree_decomposition_w2(g: SimpleGraph, root: Hashable = None, compact: bool = True) -> Optional[TreeDecomposition]:
    """Width-2 decomposition from the elimination order, or ``None`` if ``g`` has a K4 minor.

    With ``root`` given, the root bag contains that vertex.  Without
    ``compact`` every non-root bag holds exactly one vertex absent from its
    parent.
    """
    if root is not None and root not in g.nodes:
        raise PreconditionError(f"root {root!r} is not a vertex")
    order, rest = _reduce(g, keep=root)
    if rest:
        return None
    if not order:
        return TreeDecomposition((), ())
    position = {v: i for i, (v, _) in enumerate(order)}
    bags = tuple(frozenset((v, *nbrs)) for v, nbrs in order)
    last = len(order) - 1
    if root is not None:
        last = position[root]
    edges = []
    for i, (v, nbrs) in enumerate(order):
        if i == last:
            continue
        if nbrs:
            edges.append((i, min(position[w] for w in nbrs)))
        else:
            edges.append((i, last))
    td = TreeDecomposition(bags, tuple(edges), last)
    return _compact(td) if compact else td


def _compact(td: TreeDecomposition) -> TreeDecomposition:
    """Merge every bag into an adjacent superset bag."""
    bags = list(td.bags)
    nbrs = {i: set() for i in range(len(bags))}
    for i, j in td.tree_edges:
        nbrs[i].add(j)
        nbrs[j].add(i)
    root = td.root
    changed = True
    while changed:
        changed = False
        for i in sorted(nbrs):
            j = next((j for j in sorted(nbrs[i]) if bags[i] <= bags[j]), None)
            if j is None:
                continue
            for k in nbrs[i] - {j}:
                nbrs[k].discard(i)
                nbrs[k].add(j)
                nbrs[j].add(k)
            nbrs[j].discard(i)
            del nbrs[i]
            if root == i:
                root = j
            changed = True
            break
    keep = sorted(nbrs)
    index = {old: new for new, old in enumerate(keep)}
    edges = sorted({tuple(sorted((index[i], index[j]))) for i in keep for j in nbrs[i]})
    return TreeDecomposition(tuple(bags[i] for i in keep), tuple(edges), index[root])


def normalize_decomposition(td: TreeDecomposition, root_vertex: Hashable) -> TreeDecomposition:
    """Refine ``td`` so the root bag is ``{root_vertex}`` and each bag adds one vertex to its parent.

    A bag that adds several vertices is replaced by a chain of bags adding them
    one at a time; bags adding none are kept as they are.
    """
    start = next((i for i, b in enumerate(td.bags) if root_vertex in b), None)
    if start is None:
        raise PreconditionError(f"no bag contains {root_vertex!r}")
    rerooted = TreeDecomposition(td.bags, td.tree_edges, start)
    parent = rerooted.parents()
    bags: list[frozenset] = []
    edges: list[tuple[int, int]] = []
    final: dict[int, int] = {}

    def chain(from_idx: Optional[int], base: frozenset, target: frozenset) -> int:
        current = from_idx
        acc = set(base)
        for x in sorted(target - base, key=str):
            acc.add(x)
            bags.append(frozenset(acc))
            if current is not None:
                edges.append((current, len(bags) - 1))
            current = len(bags) - 1
        if current is None or bags[current] != target:
            bags.append(frozenset(target))
            if current is not None:
                edges.append((current, len(bags) - 1))
            current = len(bags) - 1
        return current

    for i in reversed(rerooted.postorder()):
        p = parent[i]
        if p is None:
            top = len(bags)
            bags.append(frozenset([root_vertex]))
            final[i] = chain(top, frozenset([root_vertex]), td.bags[i])
        else:
            b = td.bags[i]
            final[i] = chain(final[p], b & td.bags[p], b)
    return TreeDecomposition(tuple(bags), tuple(edges), 0)


def verify_tree_decomposition(g: SimpleGraph, td: TreeDecomposition, max_width: Optional[int] = None) -> Verdict:
    n = len(td.bags)
    for i, j in td.tree_edges:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            return Verdict.fail(f"tree: bad edge ({i}, {j})")
    if n and len(set(map(frozenset, td.tree_edges))) != n - 1:
        return Verdict.fail("tree: edge count is not bags - 1")
    if n:
        nbrs = td.neighbors()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            return Verdict.fail("tree: bags are not connected")
        if not 0 <= td.root < n:
            return Verdict.fail("tree: root index out of range")
    covered = set().union(*td.bags) if td.bags else set()
    if covered - set(g.nodes):
        return Verdict.fail("P1: bags contain vertices not in the graph")
    missing = set(g.nodes) - covered
    if missing:
        return Verdict.fail(f"P1: vertex {sorted(missing, key=str)[0]!r} is in no bag")
    for u, v in g.edge_list():
        if not any(u in b and v in b for b in td.bags):
            return Verdict.fail(f"P2: edge ({u!r}, {v!r}) is internal to no bag")
    nbrs = td.neighbors()
    for x in sorted(g.nodes, key=str):
        holding = {i for i, b in enumerate(td.bags) if x in b}
        start = min(holding)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in nbrs[i]:
                if j in holding and j not in seen:
                    seen.add(j)
                    stack.append(j)
        if seen != holding:
            return Verdict.fail(f"P3: bags holding {x!r} are not connected")
    if max_width is not None and td.width > max_width:
        return Verdict.fail(f"width {td.width} exceeds {max_width}")
    return Verdict(True)


def is_normalized(td: TreeDecomposition) -> bool:
    parent = td.parents()
    for i, p in enumerate(parent):
        if p is not None and len(td.bags[i] - td.bags[p]) > 1:
            return False
    return True


# -- witnesses -----------------------------------------------------------------


def verify_minor_witness(g: SimpleGraph, m: SimpleGraph, w: MinorWitness) -> Verdict:
    sets = w.branch_sets
    if set(sets) != set(m.nodes):
        return Verdict.fail("witness keys differ from pattern nodes")
    owner = {}
    for x, bs in sets.items():
        if not bs:
            return Verdict.fail(f"branch set of {x!r} is empty")
        for v in bs:
            if v not in g.nodes:
                return Verdict.fail(f"{v!r} is not a host vertex")
            if v in owner:
                return Verdict.fail(f"{v!r} lies in two branch sets")
            owner[v] = x
        if not g.subgraph(bs).is_connected():
            return Verdict.fail(f"branch set of {x!r} is not connected")
    for a, b in m.edge_list():
        if not any(g.has_edge(u, v) for u in sets[a] for v in sets[b]):
            return Verdict.fail(f"no host edge between branch sets of {a!r} and {b!r}")
    return Verdict(True)


def find_k4_minor(g: SimpleGraph) -> Optional[MinorWitness]:
    """Branch sets of a K4 minor, found by greedy deletion then contraction."""
    if not has_k4_minor(g):
        return None
    work = g
    for v in sorted(g.nodes, key=str):
        smaller = work.subgraph(work.nodes - {v})
        if has_k4_minor(smaller):
            work = smaller
    for e in sorted(work.edges, key=lambda e: sorted(map(str, e))):
        smaller = SimpleGraph(work.nodes, work.edges - {e})
        if has_k4_minor(smaller):
            work = smaller
    work = work.subgraph(v for v in work.nodes if work.degree(v) > 0)
    branch = {v: {v} for v in work.nodes}
    while len(work.nodes) > 4:
        for e in sorted(work.edges, key=lambda e: sorted(map(str, e))):
            merged = contract_edge(work, e)
            if has_k4_minor(merged):
                keep, gone = sorted(e, key=str)
                branch[keep] |= branch.pop(gone)
                work = merged
                break
        else:
            raise AssertionError("no contraction preserves the K4 minor")
    nodes = sorted(work.nodes, key=str)
    witness = MinorWitness({i: frozenset(branch[v]) for i, v in enumerate(nodes)})
    assert verify_minor_witness(g, complete_graph(4), witness)
    return witness


def has_clique_minor(g: SimpleGraph, k: int, bound: Optional[int] = None) -> tuple[bool, Optional[MinorWitness]]:
    """Exhaustive K_k-minor search; see :func:`ncminor.oracle.brute_minor`."""
    from .oracle import MINOR_BOUND, brute_minor

    w = brute_minor(g, complete_graph(k), bound=MINOR_BOUND if bound is None else bound)
    return w is not None, w
