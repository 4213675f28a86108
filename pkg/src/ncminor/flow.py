"""Max-flow, cut functions and link-minimality reductions on unit-capacity networks."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import PreconditionError, RateTooLowError
from .graph import Link, Network, Verdict

_SINK = object()


class _Residual:
    """Residual graph over integer pair capacities (augmenting paths, BFS order)."""

    def __init__(self, caps: Mapping[tuple, int]):
        self.caps = dict(caps)
        self.res: dict[tuple, int] = defaultdict(int)
        self.adj: dict = defaultdict(list)
        for (u, v), c in caps.items():
            if (u, v) not in self.res and (v, u) not in self.res:
                self.adj[u].append(v)
                self.adj[v].append(u)
            self.res[(u, v)] += c
            self.res.setdefault((v, u), 0)

    def run(self, s, t, limit: Optional[int] = None) -> int:
        total = 0
        while limit is None or total < limit:
            parent = {s: None}
            queue = deque([s])
            while queue and t not in parent:
                x = queue.popleft()
                for y in self.adj[x]:
                    if y not in parent and self.res[(x, y)] > 0:
                        parent[y] = x
                        queue.append(y)
            if t not in parent:
                break
            path = []
            y = t
            while parent[y] is not None:
                path.append((parent[y], y))
                y = parent[y]
            push = min(self.res[e] for e in path)
            if limit is not None:
                push = min(push, limit - total)
            for x, y in path:
                self.res[(x, y)] -= push
                self.res[(y, x)] += push
            total += push
        return total

    def flow(self) -> dict[tuple, int]:
        """Net flow per capacitated pair (antiparallel flow cancelled)."""
        out = {}
        for pair, c in self.caps.items():
            f = c - self.res[pair]
            if f > 0:
                out[pair] = f
        return out


def _solve(caps: Mapping[tuple, int], s, t, limit=None) -> tuple[int, dict]:
    r = _Residual(caps)
    value = r.run(s, t, limit)
    return value, r.flow()


@dataclass(frozen=True)
class FlowProfile:
    lambda_: dict[str, int]
    rate_nc: int


def max_flow(net: Network, v: str) -> int:
    if v == net.source:
        raise PreconditionError("max_flow target must differ from the source")
    return _solve(net.pair_counts(), net.source, v)[0]


def flow_profile(net: Network) -> FlowProfile:
    caps = net.pair_counts()
    lam = {v: _solve(caps, net.source, v)[0] for v in sorted(net.nodes) if v != net.source}
    rate = min((lam[t] for t in net.receivers), default=0)
    return FlowProfile(lam, rate)


def multicast_rate(net: Network) -> int:
    if not net.receivers:
        raise PreconditionError("multicast rate needs at least one receiver")
    return min(max_flow(net, t) for t in net.receivers)


def rho(net: Network, subset: Iterable[str]) -> int:
    """Number of links entering ``subset`` from outside."""
    subset = set(subset)
    if net.source in subset:
        raise PreconditionError("rho is only defined for node sets excluding the source")
    return sum(1 for link in net.links if link.head in subset and link.tail not in subset)


def eta(net: Network, u: str, v: str) -> int:
    """Minimum number of links entering a node set that holds u and v but not the source."""
    if net.source in (u, v):
        raise PreconditionError("eta is only defined for non-source nodes")
    if u == v:
        return max_flow(net, u)
    big = max(len(net.links), 1) * 2
    caps = dict(net.pair_counts())
    caps[(u, _SINK)] = big
    caps[(v, _SINK)] = big
    return _solve(caps, net.source, _SINK)[0]


def _greedy_prune(net: Network, required: Mapping[str, int]) -> Network:
    """Drop links in lexicographic order while every ``required`` flow value survives.

    A flow is cached per target; a removal only forces recomputation for targets
    whose cached flow saturates the pair being thinned.
    """
    caps = dict(net.pair_counts())
    flows = {}
    for z, need in required.items():
        if need > 0:
            value, flows[z] = _solve(caps, net.source, z, limit=need)
            assert value == need
    indeg = defaultdict(int)
    for link in net.links:
        indeg[link.head] += 1
    removed = []
    for link in net.links:
        pair = link.pair()
        need_y = required.get(link.head, 0)
        if need_y and indeg[link.head] <= need_y:
            continue
        caps[pair] -= 1
        recomputed = {}
        ok = True
        for z, f in flows.items():
            if f.get(pair, 0) > caps[pair]:
                value, newf = _solve({p: c for p, c in caps.items() if c}, net.source, z, limit=required[z])
                if value < required[z]:
                    ok = False
                    break
                recomputed[z] = newf
        if ok:
            flows.update(recomputed)
            indeg[link.head] -= 1
            removed.append(link)
        else:
            caps[pair] += 1
    return net.without_links(removed)


def _drop_dead_nodes(net: Network, lam: Mapping[str, int]) -> Network:
    used = {net.source, *net.receivers}
    for link in net.links:
        used.update(link.pair())
    keep = frozenset(v for v in net.nodes if v in used or lam.get(v, 0) > 0)
    return Network(keep, net.source, net.receivers, net.links)


def make_link_minimal(net: Network) -> Network:
    """Prune to a subnetwork with the same max-flows where every link is needed by one."""
    lam = flow_profile(net).lambda_
    out = _greedy_prune(net, lam)
    return _drop_dead_nodes(out, lam)


def make_two_minimal(net: Network) -> Network:
    rate = multicast_rate(net)
    if rate < 2:
        raise RateTooLowError(f"multicast rate {rate} < 2")
    out = _greedy_prune(net, {t: 2 for t in net.receivers})
    return out.without_links((), drop_isolated=True)


@dataclass(frozen=True)
class LinkMinimality:
    lambda_equals_rho: bool
    removal_minimal: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.lambda_equals_rho and self.removal_minimal


def verify_link_minimal(net: Network) -> LinkMinimality:
    """Check both λ(v) = in-degree(v) and that every single-link removal lowers some λ."""
    lam = flow_profile(net).lambda_
    reason = None
    eq = True
    for v, value in lam.items():
        if value != net.in_degree(v):
            eq = False
            reason = f"lambda({v})={value} but in-degree is {net.in_degree(v)}"
            break
    removal = True
    for link in net.links:
        after = flow_profile(net.without_links([link])).lambda_
        if all(after[v] == lam[v] for v in lam):
            removal = False
            reason = reason or f"removing {link.tail}->{link.head} keeps every max-flow"
            break
    return LinkMinimality(eq, removal, reason)


def verify_two_minimal(net: Network) -> Verdict:
    if not net.receivers:
        return Verdict.fail("no receivers")
    caps = net.pair_counts()
    for t in sorted(net.receivers):
        if _solve(caps, net.source, t, limit=2)[0] < 2:
            return Verdict.fail(f"receiver {t} has max-flow below 2")
    for v in sorted(net.nodes):
        if net.in_degree(v) > 2:
            return Verdict.fail(f"node {v} has in-degree {net.in_degree(v)} > 2")
    for link in net.links:
        reduced = dict(caps)
        reduced[link.pair()] -= 1
        if all(_solve(reduced, net.source, t, limit=2)[0] >= 2 for t in net.receivers):
            return Verdict.fail(f"link {link.tail}->{link.head} is removable")
    return Verdict(True)


def add_super_source(net: Network, h: int, name: str = "s'") -> Network:
    """New source ``name`` feeding the old source through ``h`` parallel links."""
    while name in net.nodes:
        name += "'"
    links = [*net.links, *(Link(name, net.source, i) for i in range(h))]
    return Network(net.nodes | {name}, name, net.receivers, tuple(links))
