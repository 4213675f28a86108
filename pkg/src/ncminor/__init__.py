"""Multicast network coding through the graph-minor lens.

Flow values and link-minimal reductions, subtree decompositions of
2-minimal networks, colorings turned into codes over small fields, K4-minor
detection via width-2 tree decompositions, and optimal routing by perfect
tree packing on K4-minor-free networks.
"""

from .coding import ROUTING, Code, Coloring, assign_code, chromatic_number, min_field_size, verify_code
from .construct import graph_isomorphic, network_from_graph
from .errors import (
    CyclicNetworkError,
    NCMinorError,
    NotTwoMinimalError,
    ParseError,
    PreconditionError,
    RateTooLowError,
    SizeBoundError,
)
from .flow import (
    eta,
    flow_profile,
    make_link_minimal,
    make_two_minimal,
    max_flow,
    multicast_rate,
    rho,
    verify_link_minimal,
    verify_two_minimal,
)
from .gf import Field, field, standard_vectors
from .graph import Link, Network, SimpleGraph, parse_graph, parse_network, serialize_graph, serialize_network
from .minor import (
    MinorWitness,
    TreeDecomposition,
    find_k4_minor,
    has_clique_minor,
    has_k4_minor,
    tree_decomposition_w2,
    verify_tree_decomposition,
)
from .subtree import decompose, subtree_graph
from .treepack import HasK4Minor, TreePacking, perfect_tree_packing, routing_multicast, verify_packing

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
