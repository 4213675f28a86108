"""Decomposition of 2-minimal networks into subtrees and the subtree (interference) graph.

Every link leaving the source or a node of in-degree 2 seeds a subtree; a link
leaving a node of in-degree 1 belongs to the subtree of that node's only
incoming link.  Leaves are heads of subtree links whose in-degree is 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import CyclicNetworkError, NotTwoMinimalError
from .flow import verify_two_minimal
from .graph import Link, Network, SimpleGraph, Verdict, is_acyclic


@dataclass(frozen=True)
class Subtree:
    root_link: Link
    links: frozenset[Link]
    leaves: frozenset[str]

    @property
    def root(self) -> str:
        return self.root_link.tail

    def nodes(self) -> set[str]:
        out = {self.root}
        out.update(link.head for link in self.links)
        return out


@dataclass(frozen=True)
class SubtreeDecomposition:
    subtrees: tuple[Subtree, ...]
    link_owner: dict[Link, int]

    def __len__(self):
        return len(self.subtrees)

    def label(self, i: int) -> str:
        return f"T{i}"


def _is_seed(net: Network, link: Link) -> bool:
    return link.tail == net.source or net.in_degree(link.tail) == 2


def _owner_map(net: Network, seed_order: Iterable[Link]) -> dict[Link, Link]:
    """Map each link to its subtree's root link by growing subtrees from seeds."""
    owner: dict[Link, Link] = {}
    for seed in seed_order:
        owner[seed] = seed
        stack = [seed]
        while stack:
            link = stack.pop()
            v = link.head
            if v == net.source or net.in_degree(v) != 1:
                continue
            for nxt in net.out_links(v):
                if nxt not in owner:
                    owner[nxt] = seed
                    stack.append(nxt)
    return owner


def _build(net: Network, owner: dict[Link, Link]) -> SubtreeDecomposition:
    roots = sorted(set(owner.values()))
    index = {root: i for i, root in enumerate(roots)}
    groups: list[set[Link]] = [set() for _ in roots]
    for link, root in owner.items():
        groups[index[root]].add(link)
    subtrees = []
    for root, links in zip(roots, groups):
        leaves = frozenset(l.head for l in links if net.in_degree(l.head) == 2)
        subtrees.append(Subtree(root, frozenset(links), leaves))
    link_owner = {link: index[root] for link, root in owner.items()}
    return SubtreeDecomposition(tuple(subtrees), link_owner)


def decompose(net: Network, seed_order: Optional[Iterable[Link]] = None, check: bool = True) -> SubtreeDecomposition:
    """Partition the links of a 2-minimal acyclic network into subtrees.

    ``seed_order`` only changes the order in which seeds are grown; the
    resulting partition does not depend on it.
    """
    if not is_acyclic(net)[0]:
        raise CyclicNetworkError("subtree decomposition is only supported for acyclic networks")
    if check:
        verdict = verify_two_minimal(net)
        if not verdict:
            raise NotTwoMinimalError(verdict.reason)
    seeds = [link for link in net.links if _is_seed(net, link)]
    if seed_order is not None:
        order = list(seed_order)
        if sorted(order) != seeds:
            raise ValueError("seed_order must be a permutation of the seed links")
        seeds = order
    owner = _owner_map(net, seeds)
    if len(owner) != len(net.links):
        missing = sorted(set(net.links) - set(owner))
        raise NotTwoMinimalError(f"link {missing[0].tail}->{missing[0].head} is not reachable from any seed")
    return _build(net, owner)


def subtree_graph(dec: SubtreeDecomposition) -> SimpleGraph:
    nodes = [dec.label(i) for i in range(len(dec))]
    edges = []
    for i, a in enumerate(dec.subtrees):
        for j in range(i + 1, len(dec.subtrees)):
            if a.leaves & dec.subtrees[j].leaves:
                edges.append((nodes[i], nodes[j]))
    return SimpleGraph.build(edges, nodes=nodes)


def verify_decomposition(net: Network, dec: SubtreeDecomposition) -> Verdict:
    seen: dict[Link, int] = {}
    for i, st in enumerate(dec.subtrees):
        for link in st.links:
            if link in seen:
                return Verdict.fail(f"partition: link {link} is in subtrees {seen[link]} and {i}")
            seen[link] = i
    if set(seen) != set(net.links):
        return Verdict.fail("partition: subtrees do not cover exactly the network links")
    for i, st in enumerate(dec.subtrees):
        if st.root_link not in st.links:
            return Verdict.fail(f"subtree {i}: root link is not one of its links")
        if not _is_seed(net, st.root_link):
            return Verdict.fail(f"root rule: subtree {i} starts at {st.root}, neither source nor in-degree 2")
        heads = [link.head for link in st.links]
        if len(heads) != len(set(heads)) or st.root in heads:
            return Verdict.fail(f"out-tree: subtree {i} enters a node twice")
        reached = {st.root}
        frontier = [st.root_link]
        used = {st.root_link}
        while frontier:
            link = frontier.pop()
            reached.add(link.head)
            for nxt in st.links:
                if nxt not in used and nxt.tail == link.head:
                    used.add(nxt)
                    frontier.append(nxt)
        if used != set(st.links):
            return Verdict.fail(f"out-tree: subtree {i} is not connected from its root link")
        for link in st.links:
            if link != st.root_link and _is_seed(net, link):
                return Verdict.fail(f"closure: seed link {link} absorbed into subtree {i}")
        for v in reached - {st.root}:
            if net.in_degree(v) == 1:
                for nxt in net.out_links(v):
                    if nxt not in st.links:
                        return Verdict.fail(f"closure: link {nxt} should extend subtree {i}")
        leaves = {link.head for link in st.links if net.in_degree(link.head) == 2}
        if leaves != set(st.leaves):
            return Verdict.fail(f"leaves of subtree {i} are wrong")
    for v in sorted(net.nodes):
        ins = net.in_links(v)
        if len(ins) == 2 and seen[ins[0]] == seen[ins[1]]:
            return Verdict.fail(f"node {v}: both incoming links lie in subtree {seen[ins[0]]}")
    for link, i in dec.link_owner.items():
        if seen.get(link) != i:
            return Verdict.fail(f"link_owner disagrees with subtrees for {link}")
    return Verdict(True)
