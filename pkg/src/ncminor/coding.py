"""Exact coloring of subtree graphs and the coloring <-> linear code correspondence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import CyclicNetworkError, PreconditionError, SizeBoundError
from .gf import (
    Field,
    Vec2,
    field,
    projective_class,
    rank,
    smallest_prime_power_at_least,
    standard_vectors,
)
from .graph import Link, Network, SimpleGraph, Verdict, is_acyclic
from .subtree import SubtreeDecomposition, decompose, subtree_graph

DEFAULT_EXACT_BOUND = 20
ROUTING = 1  # reported field size when plain routing (two uncoded flows) suffices


@dataclass(frozen=True)
class Coloring:
    colors: dict
    num_colors: int
    exact: bool = True

    def is_proper(self, g: SimpleGraph) -> bool:
        if set(self.colors) != set(g.nodes):
            return False
        if any(self.colors[u] == self.colors[v] for u, v in g.edge_list()):
            return False
        return set(self.colors.values()) == set(range(self.num_colors))


@dataclass(frozen=True)
class Code:
    field: Field
    vectors: dict[Link, Vec2]

    @property
    def q(self) -> int:
        return self.field.q

    def uses_coding(self) -> bool:
        return any(v not in ((0, 1), (1, 0)) for v in self.vectors.values())

    def to_dict(self, reported_q: Optional[int] = None) -> dict:
        return {
            "field": self.q if reported_q is None else reported_q,
            "links": [
                {"from": link.tail, "to": link.head, "key": link.key, "vector": list(vec)}
                for link, vec in sorted(self.vectors.items())
            ],
        }


# -- exact coloring ----------------------------------------------------------


def _order(g: SimpleGraph) -> list:
    return sorted(g.nodes, key=lambda v: (-g.degree(v), str(v)))


def _dsatur(g: SimpleGraph) -> dict:
    adj = g.adjacency()
    colors: dict = {}
    order = _order(g)
    while len(colors) < len(order):
        def key(v):
            sat = len({colors[w] for w in adj[v] if w in colors})
            return (-sat, -len(adj[v]), str(v))
        v = min((v for v in order if v not in colors), key=key)
        used = {colors[w] for w in adj[v] if w in colors}
        colors[v] = next(c for c in range(len(order)) if c not in used)
    return colors


def _greedy_clique(g: SimpleGraph) -> list:
    adj = g.adjacency()
    best: list = []
    for start in _order(g):
        clique = [start]
        cand = set(adj[start])
        while cand:
            v = max(cand, key=lambda w: (len(adj[w] & cand), str(w)))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def _k_colorable(g: SimpleGraph, k: int) -> Optional[dict]:
    adj = g.adjacency()
    colors: dict = {}
    nodes = _order(g)

    def pick():
        best, best_key = None, None
        for v in nodes:
            if v in colors:
                continue
            sat = len({colors[w] for w in adj[v] if w in colors})
            key = (sat, len(adj[v]))
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def solve(used: int) -> bool:
        v = pick()
        if v is None:
            return True
        forbidden = {colors[w] for w in adj[v] if w in colors}
        # a fresh color is interchangeable with any other fresh one
        for c in range(min(used + 1, k)):
            if c in forbidden:
                continue
            colors[v] = c
            if solve(max(used, c + 1)):
                return True
            del colors[v]
        return False

    return dict(colors) if solve(0) else None


def _normalize(colors: dict) -> dict:
    relabel: dict = {}
    for v in sorted(colors, key=str):
        relabel.setdefault(colors[v], len(relabel))
    return {v: relabel[c] for v, c in colors.items()}


def chromatic_number(g: SimpleGraph, exact: bool = True, bound: int = DEFAULT_EXACT_BOUND) -> tuple[int, Coloring]:
    """Chromatic number with a witness coloring.

    Exact mode runs a DSATUR branch-and-bound between a clique lower bound and
    a greedy upper bound and refuses graphs above ``bound`` nodes.  With
    ``exact=False`` a large graph gets the greedy bound, flagged ``exact=False``.
    """
    if not g.nodes:
        return 0, Coloring({}, 0)
    upper = _dsatur(g)
    ub = max(upper.values()) + 1
    lb = len(_greedy_clique(g))
    if lb == ub:
        return ub, Coloring(_normalize(upper), ub)
    if len(g.nodes) > bound:
        if exact:
            raise SizeBoundError(f"exact coloring limited to {bound} nodes, graph has {len(g.nodes)}")
        return ub, Coloring(_normalize(upper), ub, exact=False)
    for k in range(lb, ub):
        found = _k_colorable(g, k)
        if found is not None:
            return k, Coloring(_normalize(found), k)
    return ub, Coloring(_normalize(upper), ub)


# -- codes -------------------------------------------------------------------


def verify_code(net: Network, code: Code) -> Verdict:
    """Check subtree constancy, local computability and decodability of a code."""
    if not is_acyclic(net)[0]:
        return Verdict.fail("network is cyclic")
    f = code.field
    for link in net.links:
        vec = code.vectors.get(link)
        if vec is None:
            return Verdict.fail(f"link {link} has no vector")
        if not all(0 <= x < f.q for x in vec) or not (vec[0] or vec[1]):
            return Verdict.fail(f"link {link} carries an invalid vector {tuple(vec)}")
    for v in sorted(net.nodes):
        if v == net.source:
            continue
        incoming = [code.vectors[l] for l in net.in_links(v)]
        outgoing = net.out_links(v)
        if len(incoming) == 1:
            for link in outgoing:
                if tuple(code.vectors[link]) != tuple(incoming[0]):
                    return Verdict.fail(f"constancy: {link} differs from the vector entering {v}")
        else:
            r = rank(incoming, f)
            for link in outgoing:
                if rank(incoming + [code.vectors[link]], f) != r:
                    return Verdict.fail(f"computability: {link} is outside the span entering {v}")
        if (v in net.receivers or len(incoming) == 2) and rank(incoming, f) < 2:
            return Verdict.fail(f"decodability: {v} receives rank {rank(incoming, f)}")
    return Verdict(True)


def assign_code(net: Network, dec: SubtreeDecomposition, f: Field, col: Coloring) -> Code:
    """Give every subtree the standard vector indexed by its color."""
    h = subtree_graph(dec)
    if not col.is_proper(h):
        raise PreconditionError("coloring is not a proper coloring of the subtree graph")
    if col.num_colors > f.q + 1:
        raise PreconditionError(f"{col.num_colors} colors exceed the {f.q + 1} vectors of GF({f.q})")
    palette = standard_vectors(f)
    vectors = {}
    for i, st in enumerate(dec.subtrees):
        vec = palette[col.colors[dec.label(i)]]
        for link in st.links:
            vectors[link] = vec
    code = Code(f, vectors)
    verdict = verify_code(net, code)
    if not verdict:
        raise AssertionError(f"assigned code failed verification: {verdict.reason}")
    return code


def min_field_size(net: Network, bound: int = DEFAULT_EXACT_BOUND) -> tuple[int, Code]:
    """Smallest field order admitting a code, or ``ROUTING`` when no coding is needed."""
    if not is_acyclic(net)[0]:
        raise CyclicNetworkError("code assignment needs an acyclic network")
    dec = decompose(net)
    chi, col = chromatic_number(subtree_graph(dec), bound=bound)
    if chi <= 2:
        return ROUTING, assign_code(net, dec, field(2), col)
    q = smallest_prime_power_at_least(chi - 1)
    return q, assign_code(net, dec, field(q), col)


def induced_coloring(dec: SubtreeDecomposition, code: Code) -> Coloring:
    """Color each subtree by the projective class of its vector."""
    classes: dict = {}
    colors = {}
    for i, st in enumerate(dec.subtrees):
        vec = projective_class(code.vectors[st.root_link], code.field)
        colors[dec.label(i)] = classes.setdefault(vec, len(classes))
    return Coloring(colors, len(classes))
