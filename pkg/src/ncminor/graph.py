"""Network and simple-graph data model, JSON formats and basic structure queries.

A :class:`Network` is a directed multigraph with unit-capacity links, one
source and a set of receivers.  Parallel links are distinguished by an
integer ``key`` so that every physical link has its own identity; the
multiplicity ``c(u, v)`` is the number of links with that tail and head.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import (
    MalformedInputError,
    SelfLoopError,
    SourceAsReceiverError,
    UnknownNodeError,
)


class Link(NamedTuple):
    tail: str
    head: str
    key: int = 0

    def pair(self) -> tuple[str, str]:
        return (self.tail, self.head)


@dataclass(frozen=True)
class Network:
    nodes: frozenset[str]
    source: str
    receivers: frozenset[str]
    links: tuple[Link, ...]

    def __post_init__(self):
        if self.source not in self.nodes:
            raise UnknownNodeError(f"source {self.source!r} is not a declared node")
        if self.source in self.receivers:
            raise SourceAsReceiverError(f"source {self.source!r} listed as a receiver")
        for t in self.receivers:
            if t not in self.nodes:
                raise UnknownNodeError(f"receiver {t!r} is not a declared node")
        seen = set()
        for link in self.links:
            if link.tail not in self.nodes or link.head not in self.nodes:
                raise UnknownNodeError(f"link {link.tail!r}->{link.head!r} uses an undeclared node")
            if link.tail == link.head:
                raise SelfLoopError(f"self-loop at {link.tail!r}")
            if link in seen:
                raise MalformedInputError(f"duplicate link identity {link}")
            seen.add(link)
        object.__setattr__(self, "links", tuple(sorted(self.links)))

    @classmethod
    def build(
        cls,
        source: str,
        receivers: Iterable[str],
        links: Iterable[tuple],
        nodes: Optional[Iterable[str]] = None,
    ) -> "Network":
        """Build a network from ``(u, v)`` or ``(u, v, count)`` tuples.

        Nodes default to the source, receivers and every link endpoint.
        """
        receivers = frozenset(receivers)
        counts: Counter = Counter()
        for item in links:
            if len(item) == 2:
                u, v = item
                k = 1
            else:
                u, v, k = item
            counts[(u, v)] += k
        out = [Link(u, v, i) for (u, v), k in counts.items() for i in range(k)]
        if nodes is None:
            node_set = {source, *receivers}
            for u, v in counts:
                node_set.update((u, v))
        else:
            node_set = set(nodes)
        return cls(frozenset(node_set), source, receivers, tuple(out))

    # -- queries -------------------------------------------------------

    def count(self, u: str, v: str) -> int:
        return self._pair_counts().get((u, v), 0)

    def _pair_counts(self) -> Mapping[tuple[str, str], int]:
        cached = self.__dict__.get("_counts")
        if cached is None:
            cached = Counter(link.pair() for link in self.links)
            object.__setattr__(self, "_counts", cached)
        return cached

    def pair_counts(self) -> dict[tuple[str, str], int]:
        return dict(self._pair_counts())

    def in_links(self, v: str) -> list[Link]:
        return self._incidence()[0].get(v, [])

    def out_links(self, v: str) -> list[Link]:
        return self._incidence()[1].get(v, [])

    def _incidence(self):
        cached = self.__dict__.get("_inc")
        if cached is None:
            ins: dict[str, list[Link]] = defaultdict(list)
            outs: dict[str, list[Link]] = defaultdict(list)
            for link in self.links:
                ins[link.head].append(link)
                outs[link.tail].append(link)
            cached = (dict(ins), dict(outs))
            object.__setattr__(self, "_inc", cached)
        return cached

    def in_degree(self, v: str) -> int:
        return len(self.in_links(v))

    def out_degree(self, v: str) -> int:
        return len(self.out_links(v))

    def without_links(self, removed: Iterable[Link], drop_isolated: bool = False) -> "Network":
        removed = set(removed)
        links = tuple(link for link in self.links if link not in removed)
        nodes = self.nodes
        if drop_isolated:
            used = {self.source, *self.receivers}
            for link in links:
                used.add(link.tail)
                used.add(link.head)
            nodes = frozenset(used)
        return Network(nodes, self.source, self.receivers, links)

    def multigraph_key(self) -> tuple:
        """Identity of the network as a multigraph, ignoring link keys."""
        return (
            self.nodes,
            self.source,
            self.receivers,
            tuple(sorted(self._pair_counts().items())),
        )


@dataclass(frozen=True)
class SimpleGraph:
    nodes: frozenset
    edges: frozenset  # of frozenset({u, v})

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2:
                raise MalformedInputError(f"edge {sorted(e)} is a loop or malformed")
            for x in e:
                if x not in self.nodes:
                    raise UnknownNodeError(f"edge endpoint {x!r} is not a declared node")

    @classmethod
    def build(cls, edges: Iterable[tuple], nodes: Iterable = ()) -> "SimpleGraph":
        node_set = set(nodes)
        edge_set = set()
        for u, v in edges:
            if u == v:
                raise SelfLoopError(f"loop at {u!r}")
            node_set.update((u, v))
            edge_set.add(frozenset((u, v)))
        return cls(frozenset(node_set), frozenset(edge_set))

    def adjacency(self) -> dict:
        cached = self.__dict__.get("_adj")
        if cached is None:
            cached = {v: set() for v in self.nodes}
            for e in self.edges:
                u, v = tuple(e)
                cached[u].add(v)
                cached[v].add(u)
            object.__setattr__(self, "_adj", cached)
        return cached

    def neighbors(self, v) -> set:
        return self.adjacency()[v]

    def degree(self, v) -> int:
        return len(self.adjacency()[v])

    def has_edge(self, u, v) -> bool:
        return frozenset((u, v)) in self.edges

    def edge_list(self) -> list[tuple]:
        pairs = (tuple(sorted(e, key=str)) for e in self.edges)
        return sorted(pairs, key=lambda p: (str(p[0]), str(p[1])))

    def subgraph(self, keep: Iterable) -> "SimpleGraph":
        keep = frozenset(keep)
        return SimpleGraph(keep, frozenset(e for e in self.edges if e <= keep))

    def complement(self) -> "SimpleGraph":
        nodes = sorted(self.nodes, key=str)
        edges = frozenset(
            frozenset((u, v))
            for i, u in enumerate(nodes)
            for v in nodes[i + 1:]
            if frozenset((u, v)) not in self.edges
        )
        return SimpleGraph(self.nodes, edges)

    def components(self) -> list[set]:
        adj = self.adjacency()
        seen: set = set()
        comps = []
        for start in sorted(self.nodes, key=str):
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def complete_graph(k: int) -> SimpleGraph:
    return SimpleGraph.build(
        [(i, j) for i in range(k) for j in range(i + 1, k)], nodes=range(k)
    )


@dataclass(frozen=True)
class Verdict:
    """Boolean check result carrying the first violated condition."""

    ok: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def fail(cls, reason: str) -> "Verdict":
        return cls(False, reason)


@dataclass
class AnalysisReport:
    rate_nc: int
    lambda_: dict[str, int]
    k4_minor: bool
    min_field_size: Optional[int] = None
    chromatic_number_subtree: Optional[int] = None
    routing_sufficient: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "rate_nc": self.rate_nc,
            "lambda": dict(sorted(self.lambda_.items())),
            "min_field_size": self.min_field_size,
            "chromatic_number_subtree": self.chromatic_number_subtree,
            "k4_minor": self.k4_minor,
            "routing_sufficient": self.routing_sufficient,
        }
        out.update(self.extra)
        return out


# -- structure queries ---------------------------------------------------


def underlying_topology(net: Network) -> SimpleGraph:
    """Forget link directions and merge parallel links."""
    edges = frozenset(frozenset(link.pair()) for link in net.links)
    return SimpleGraph(net.nodes, edges)


def is_acyclic(net: Network) -> tuple[bool, Optional[list[str]]]:
    """Kahn's algorithm; returns ``(True, order)`` or ``(False, None)``."""
    indeg = {v: 0 for v in net.nodes}
    for link in net.links:
        indeg[link.head] += 1
    ready = sorted(v for v, d in indeg.items() if d == 0)
    order = []
    queue = deque(ready)
    while queue:
        v = queue.popleft()
        order.append(v)
        for link in net.out_links(v):
            indeg[link.head] -= 1
            if indeg[link.head] == 0:
                queue.append(link.head)
    if len(order) != len(net.nodes):
        return False, None
    return True, order


# -- JSON ----------------------------------------------------------------


def network_to_dict(net: Network) -> dict:
    return {
        "nodes": sorted(net.nodes),
        "source": net.source,
        "receivers": sorted(net.receivers),
        "links": [
            {"from": u, "to": v, "count": k}
            for (u, v), k in sorted(net.pair_counts().items())
        ],
    }


def network_from_dict(data) -> Network:
    if not isinstance(data, dict):
        raise MalformedInputError("network JSON must be an object")
    try:
        nodes = data["nodes"]
        source = data["source"]
        receivers = data.get("receivers", [])
        raw_links = data.get("links", [])
    except KeyError as exc:
        raise MalformedInputError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(nodes, list) or not isinstance(receivers, list) or not isinstance(raw_links, list):
        raise MalformedInputError("nodes, receivers and links must be arrays")
    if not all(isinstance(x, str) for x in [*nodes, *receivers, source]):
        raise MalformedInputError("node ids must be strings")
    triples = []
    for item in raw_links:
        if isinstance(item, dict):
            try:
                u, v = item["from"], item["to"]
            except KeyError as exc:
                raise MalformedInputError(f"link missing {exc.args[0]!r}") from None
            k = item.get("count", 1)
        elif isinstance(item, list) and len(item) in (2, 3):
            u, v, *rest = item
            k = rest[0] if rest else 1
        else:
            raise MalformedInputError(f"cannot read link {item!r}")
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise MalformedInputError(f"link count must be a positive integer, got {k!r}")
        if not isinstance(u, str) or not isinstance(v, str):
            raise MalformedInputError("link endpoints must be strings")
        declared = set(nodes)
        if u not in declared or v not in declared:
            raise UnknownNodeError(f"link {u!r}->{v!r} uses an undeclared node")
        if u == v:
            raise SelfLoopError(f"self-loop at {u!r}")
        triples.append((u, v, k))
    if source in receivers:
        raise SourceAsReceiverError(f"source {source!r} listed as a receiver")
    return Network.build(source, receivers, triples, nodes=nodes)


def serialize_network(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2)


def parse_network(text: str) -> Network:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from None
    return network_from_dict(data)


def graph_to_dict(g: SimpleGraph) -> dict:
    return {
        "nodes": sorted(g.nodes, key=str),
        "edges": [list(e) for e in g.edge_list()],
    }


def graph_from_dict(data) -> SimpleGraph:
    if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
        raise MalformedInputError("graph JSON needs 'nodes' and 'edges'")
    nodes = data["nodes"]
    edges = []
    for e in data["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise MalformedInputError(f"cannot read edge {e!r}")
        edges.append(tuple(e))
    declared = set(nodes)
    for u, v in edges:
        if u not in declared or v not in declared:
            raise UnknownNodeError(f"edge {u!r}-{v!r} uses an undeclared node")
    return SimpleGraph.build(edges, nodes=nodes)


def serialize_graph(g: SimpleGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=2)


def parse_graph(text: str) -> SimpleGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from None
    return graph_from_dict(data)
