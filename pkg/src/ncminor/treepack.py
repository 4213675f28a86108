"""Perfect tree packing on link-minimal networks of treewidth at most two.

The packing is built by peeling one vertex at a time off the leaves of a
normalized tree decomposition.  A vertex ``t`` whose leaf bag meets its parent
in ``{u, v}`` is *split*: each pair ``v->t, t->u`` becomes a shortcut
``v->u`` (and symmetrically), the leftover links into ``t`` are set aside and
``t`` is deleted.  A vertex hanging off a single node ``v`` is simply cut off.
Once only the source is left the steps are undone in reverse: shortcuts are
expanded back through ``t`` and the leftover links into ``t`` are attached
to trees that already hold their tail, preferring trees that miss the other
neighbour.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import PreconditionError, UnreachableNodeError
from .flow import (
    FlowProfile,
    _solve,
    add_super_source,
    eta,
    flow_profile,
    make_link_minimal,
    multicast_rate,
)
from .graph import Link, Network, Verdict, underlying_topology
from .minor import (
    MinorWitness,
    TreeDecomposition,
    find_k4_minor,
    has_k4_minor,
    is_normalized,
    normalize_decomposition,
    tree_decomposition_w2,
    verify_tree_decomposition,
)

_EXTRA = object()


@dataclass(frozen=True)
class TreePacking:
    trees: tuple[frozenset[Link], ...]
    source: str
    profile: Optional[FlowProfile] = None

    def membership(self) -> dict[str, set[int]]:
        out: dict[str, set[int]] = defaultdict(set)
        for i, tree in enumerate(self.trees):
            for link in tree:
                out[link.head].add(i)
        return dict(out)

    def to_dict(self) -> dict:
        members = self.membership()
        return {
            "source": self.source,
            "trees": [
                [[l.tail, l.head, l.key] for l in sorted(tree)] for tree in self.trees
            ],
            "membership": {v: len(ix) for v, ix in sorted(members.items())},
        }


@dataclass(frozen=True)
class HasK4Minor:
    witness: Optional[MinorWitness]

    def to_dict(self) -> dict:
        return {
            "k4_minor": True,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


@dataclass
class SplitRecord:
    t: str
    u: str
    v: str
    c_ut: int
    c_tu: int
    c_vt: int
    c_tv: int
    # shortcut id -> (first half, second half)
    shortcuts: dict[int, tuple[int, int]] = field(default_factory=dict)
    extra_ut: list[int] = field(default_factory=list)
    extra_vt: list[int] = field(default_factory=list)
    # flow values of u, v in the network with t peeled off (checked on the way back)
    lam_u: Optional[int] = None
    lam_v: Optional[int] = None
    eta_uv: Optional[int] = None

    @property
    def delta_ut(self) -> int:
        return self.c_ut - self.c_tv

    @property
    def delta_vt(self) -> int:
        return self.c_vt - self.c_tu


@dataclass
class _CutRecord:
    t: str
    v: str
    links: list[int]


class _Work:
    """Mutable multigraph with integer link ids."""

    def __init__(self, net: Network):
        self.source = net.source
        self.ends: dict[int, tuple[str, str]] = {}
        self.original: dict[int, Link] = {}
        self.incident: dict[str, set[int]] = defaultdict(set)
        for i, link in enumerate(net.links):
            self.ends[i] = link.pair()
            self.original[i] = link
            self.incident[link.tail].add(i)
            self.incident[link.head].add(i)
        self.next_id = len(net.links)

    def add(self, tail: str, head: str) -> int:
        i = self.next_id
        self.next_id += 1
        self.ends[i] = (tail, head)
        self.incident[tail].add(i)
        self.incident[head].add(i)
        return i

    def remove(self, i: int):
        tail, head = self.ends.pop(i)
        self.incident[tail].discard(i)
        self.incident[head].discard(i)

    def between(self, a: str, b: str) -> list[int]:
        return sorted(i for i in self.incident[a] if self.ends[i] == (a, b))

    def in_degree(self, v: str) -> int:
        return sum(1 for i in self.incident[v] if self.ends[i][1] == v)

    def caps(self) -> dict:
        return dict(Counter(self.ends.values()))

    def eta(self, a: str, b: str) -> int:
        big = 2 * max(len(self.ends), 1)
        caps = self.caps()
        caps[(a, _EXTRA)] = big
        caps[(b, _EXTRA)] = big
        return _solve(caps, self.source, _EXTRA)[0]


def _peel_order(td: TreeDecomposition, source: str) -> list[tuple[str, tuple[str, ...]]]:
    """(vertex, attachment set) pairs, leaves first, ending with the root bag's vertices."""
    parent = td.parents()
    steps = []
    for i in td.postorder():
        p = parent[i]
        if p is None:
            continue
        new = td.bags[i] - td.bags[p]
        if not new:
            continue
        (t,) = new
        steps.append((t, tuple(sorted(td.bags[i] & td.bags[p]))))
    root = td.bags[td.root]
    rest = sorted(root - {source}, reverse=True)
    for k, t in enumerate(rest):
        steps.append((t, tuple(sorted({source, *rest[k + 1:]}))))
    return steps


def _check_inputs(net: Network, td: TreeDecomposition) -> dict[str, int]:
    topo = underlying_topology(net)
    verdict = verify_tree_decomposition(topo, td, max_width=2)
    if not verdict:
        raise PreconditionError(f"tree decomposition invalid: {verdict.reason}")
    if net.source not in td.bags[td.root]:
        raise PreconditionError("root bag must contain the source")
    if not is_normalized(td):
        raise PreconditionError("every bag must add at most one vertex to its parent")
    lam = flow_profile(net).lambda_
    for v, value in lam.items():
        if value == 0:
            raise UnreachableNodeError(f"node {v} is disconnected from the source")
        if value != net.in_degree(v):
            raise PreconditionError(f"network is not link minimal at {v}: lambda={value}, in-degree={net.in_degree(v)}")
    return lam


def perfect_tree_packing(net: Network, td: TreeDecomposition, check: bool = True) -> TreePacking:
    """Link-disjoint out-trees where every non-source node v lies in exactly lambda(v) trees.

    In addition, for each pair of non-source nodes sharing a bag at least
    eta(u, v) trees touch u or v.  ``td`` must be a width-2 decomposition of
    the topology, rooted at a bag holding the source, in which each bag adds
    at most one vertex to its parent (see :func:`normalize_decomposition`).
    """
    lam = _check_inputs(net, td)
    work = _Work(net)
    s = net.source
    records: list = []

    for t, attach in _peel_order(td, s):
        around = {x for i in work.incident[t] for x in work.ends[i]} - {t}
        if not around <= set(attach):
            raise PreconditionError(f"node {t} has links outside its bag")
        if not attach or not work.incident[t]:
            raise UnreachableNodeError(f"node {t} is disconnected from the source")
        if len(attach) == 1:
            (v,) = attach
            if work.between(t, v):
                raise PreconditionError(f"link {t}->{v} is redundant; network is not link minimal")
            links = work.between(v, t)
            for i in links:
                work.remove(i)
            records.append(_CutRecord(t, v, links))
            continue
        u, v = attach
        ut, tu = work.between(u, t), work.between(t, u)
        vt, tv = work.between(v, t), work.between(t, v)
        rec = SplitRecord(t, u, v, len(ut), len(tu), len(vt), len(tv))
        if rec.delta_ut < 0 or rec.delta_vt < 0:
            raise PreconditionError(f"split at {t} impossible: network is not link minimal")
        lam_t = work.in_degree(t)
        if check:
            _assert_split_bounds(work, rec, lam_t, s)
        for a, b in zip(vt, tu):
            rec.shortcuts[work.add(v, u)] = (a, b)
        for a, b in zip(ut, tv):
            rec.shortcuts[work.add(u, v)] = (a, b)
        rec.extra_vt = vt[len(tu):]
        rec.extra_ut = ut[len(tv):]
        for i in ut + tu + vt + tv:
            work.remove(i)
        if check and s not in (u, v):
            rec.lam_u, rec.lam_v = work.in_degree(u), work.in_degree(v)
            rec.eta_uv = work.eta(u, v)
        records.append(rec)

    if work.ends:
        raise AssertionError("links remain after peeling every vertex")

    trees: list[set[int]] = []
    holds: list[set[str]] = []

    def attach_link(i: int, tail: str, head: str, avoid: Optional[str]):
        pool = [k for k in range(len(trees)) if head not in holds[k] and (tail == s or tail in holds[k])]
        if tail == s:
            choice = next((k for k in pool if avoid not in holds[k]), None)
            if choice is None:
                trees.append(set())
                holds.append(set())
                choice = len(trees) - 1
        else:
            preferred = [k for k in pool if avoid not in holds[k]]
            choice = (preferred or pool or [None])[0]
            if choice is None:
                raise AssertionError(f"no tree holds {tail} without {head}; packing infeasible")
        trees[choice].add(i)
        holds[choice].add(head)

    for rec in reversed(records):
        if isinstance(rec, _CutRecord):
            for i in rec.links:
                attach_link(i, rec.v, rec.t, None)
            continue
        if check:
            _assert_counters(rec, holds, s)
        used = set()
        for k, tree in enumerate(trees):
            for sc in [i for i in tree if i in rec.shortcuts]:
                a, b = rec.shortcuts[sc]
                tree.discard(sc)
                tree.update((a, b))
                holds[k].add(rec.t)
                used.add(sc)
        if used != set(rec.shortcuts):
            raise AssertionError(f"a shortcut through {rec.t} is used by no tree")
        for i in rec.extra_ut:
            attach_link(i, rec.u, rec.t, rec.v)
        for i in rec.extra_vt:
            attach_link(i, rec.v, rec.t, rec.u)

    packing = TreePacking(
        tuple(frozenset(work.original[i] for i in tree) for tree in trees if tree),
        s,
        FlowProfile(lam, min((lam[t] for t in net.receivers), default=0)),
    )
    if check:
        verdict = verify_packing(net, packing, packing.profile, td.same_bag_pairs(exclude={s}))
        if not verdict:
            raise AssertionError(f"constructed packing failed verification: {verdict.reason}")
    return packing


def _assert_split_bounds(work: _Work, rec: SplitRecord, lam_t: int, s: str):
    lam_u = work.in_degree(rec.u)
    lam_v = work.in_degree(rec.v)
    if rec.u != s:
        assert lam_u >= rec.delta_ut + rec.c_tv + rec.c_tu, f"lambda({rec.u}) too small at split of {rec.t}"
        assert work.eta(rec.u, rec.t) <= lam_u + rec.delta_vt, f"eta({rec.u},{rec.t}) bound fails"
    if rec.v != s:
        assert lam_v >= rec.delta_vt + rec.c_tu + rec.c_tv, f"lambda({rec.v}) too small at split of {rec.t}"
        assert work.eta(rec.v, rec.t) <= lam_v + rec.delta_ut, f"eta({rec.v},{rec.t}) bound fails"
    if s not in (rec.u, rec.v):
        assert lam_t <= work.eta(rec.u, rec.v), f"lambda({rec.t}) exceeds eta({rec.u},{rec.v})"


def _assert_counters(rec: SplitRecord, holds: list[set[str]], s: str):
    """Counts of trees holding u only, v only and both, checked against the peeled network."""
    if s in (rec.u, rec.v):
        return
    n_u = sum(1 for h in holds if rec.u in h and rec.v not in h)
    n_v = sum(1 for h in holds if rec.v in h and rec.u not in h)
    n_uv = sum(1 for h in holds if rec.u in h and rec.v in h)
    assert n_u + n_uv == rec.lam_u, f"{rec.u} lies in {n_u + n_uv} trees, expected {rec.lam_u}"
    assert n_v + n_uv == rec.lam_v, f"{rec.v} lies in {n_v + n_uv} trees, expected {rec.lam_v}"
    assert n_u + n_v + n_uv >= rec.eta_uv, f"only {n_u + n_v + n_uv} trees touch {rec.u} or {rec.v}"


def verify_packing(
    net: Network,
    tp: TreePacking,
    profile: Optional[FlowProfile] = None,
    pairs: Iterable[tuple[str, str]] = (),
) -> Verdict:
    """Disjointness, out-tree shape, exact membership lambda(v) and the eta bound on ``pairs``."""
    valid = set(net.links)
    owner: dict[Link, int] = {}
    for k, tree in enumerate(tp.trees):
        for link in tree:
            if link not in valid:
                return Verdict.fail(f"tree {k} uses {link}, which is not a network link")
            if link in owner:
                return Verdict.fail(f"disjointness: {link} is in trees {owner[link]} and {k}")
            owner[link] = k
        heads = [l.head for l in tree]
        if len(set(heads)) != len(heads) or tp.source in heads:
            return Verdict.fail(f"out-tree: tree {k} enters a node twice or enters the source")
        reached = {tp.source}
        pending = sorted(tree)
        while pending:
            nxt = [l for l in pending if l.tail not in reached]
            if len(nxt) == len(pending):
                return Verdict.fail(f"out-tree: tree {k} is not connected to the source")
            reached.update(l.head for l in pending if l.tail in reached)
            pending = nxt
    members = tp.membership()
    if profile is not None:
        for v, value in sorted(profile.lambda_.items()):
            got = len(members.get(v, ()))
            if got != value:
                return Verdict.fail(f"property 1: {v} lies in {got} trees, lambda is {value}")
    for u, v in pairs:
        touching = len(members.get(u, set()) | members.get(v, set()))
        need = eta(net, u, v)
        if touching < need:
            return Verdict.fail(f"property 2: {touching} trees touch {u} or {v}, eta is {need}")
    return Verdict(True)


def routing_multicast(net: Network, check: bool = True):
    """Routing at the coding capacity for K4-minor-free topologies.

    Returns a :class:`TreePacking` of ``multicast_rate(net)`` link-disjoint
    trees rooted at the source, each reaching every receiver, or
    :class:`HasK4Minor` when the topology contains a K4 minor.
    """
    h = multicast_rate(net)
    topo = underlying_topology(net)
    if has_k4_minor(topo):
        return HasK4Minor(find_k4_minor(topo))
    if h == 0:
        return TreePacking((), net.source, FlowProfile({}, 0))
    aug = add_super_source(net, h)
    minimal = make_link_minimal(aug)
    td = tree_decomposition_w2(underlying_topology(minimal), root=minimal.source, compact=False)
    td = normalize_decomposition(td, minimal.source)
    packing = perfect_tree_packing(minimal, td, check=check)
    trees = []
    for tree in packing.trees:
        trees.append(frozenset(l for l in tree if l.tail != minimal.source))
    lam = {v: x for v, x in packing.profile.lambda_.items() if v != net.source}
    result = TreePacking(tuple(trees), net.source, FlowProfile(lam, h))
    if len(result.trees) != h:
        raise AssertionError(f"expected {h} trees, built {len(result.trees)}")
    return result


def verify_routing(net: Network, tp: TreePacking, h: int) -> Verdict:
    """h disjoint out-trees at the source, each spanning all receivers."""
    if len(tp.trees) != h:
        return Verdict.fail(f"{len(tp.trees)} trees, expected {h}")
    verdict = verify_packing(net, tp)
    if not verdict:
        return verdict
    for k, tree in enumerate(tp.trees):
        heads = {l.head for l in tree}
        missing = sorted(net.receivers - heads)
        if missing:
            return Verdict.fail(f"tree {k} misses receiver {missing[0]}")
    return Verdict(True)
