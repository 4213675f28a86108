"""Command line for ncminor: JSON reports on stdout, diagnostics on stderr.

Exit codes: 0 success (including informative "has a K4 minor" answers),
1 usage or I/O problems, 2 unparsable input, 3 unmet preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from ..coding import (
    DEFAULT_EXACT_BOUND,
    ROUTING,
    assign_code,
    chromatic_number,
    verify_code,
)
from ..construct import network_from_graph
from ..errors import ParseError, PreconditionError, SizeBoundError
from ..flow import flow_profile, make_two_minimal, verify_two_minimal
from ..gf import field, is_prime_power, smallest_prime_power_at_least
from ..graph import (
    AnalysisReport,
    Network,
    SimpleGraph,
    graph_from_dict,
    is_acyclic,
    network_from_dict,
    network_to_dict,
    underlying_topology,
)
from ..minor import find_k4_minor, has_clique_minor, has_k4_minor, tree_decomposition_w2
from ..oracle import PACKING_LINK_BOUND, brute_tree_packing
from ..subtree import decompose, subtree_graph
from ..treepack import HasK4Minor, routing_multicast, verify_routing
from .generators import KINDS, generate

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") if path != "-" else sys.stdin as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None


def load_network(path: str) -> Network:
    return network_from_dict(_read_json(path))


def _write_witness(path: Optional[str], payload) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)


# -- commands ------------------------------------------------------------------


def analyze(net: Network, exact_chi_bound: int = DEFAULT_EXACT_BOUND) -> tuple[AnalysisReport, Optional[dict]]:
    """Full report for one network plus the K4 witness (if any)."""
    if not is_acyclic(net)[0]:
        raise PreconditionError("network is cyclic; the analysis assumes an acyclic network")
    profile = flow_profile(net)
    h = profile.rate_nc
    topo = underlying_topology(net)
    k4 = has_k4_minor(topo)
    witness = find_k4_minor(topo).to_dict() if k4 else None
    extra: dict = {"two_minimal": bool(verify_two_minimal(net)) if h >= 2 else False}
    chi = q = None
    if h >= 2:
        reduced = net if extra["two_minimal"] else make_two_minimal(net)
        dec = decompose(reduced)
        graph = subtree_graph(dec)
        extra["subtree_graph"] = {"subtrees": len(graph.nodes), "edges": len(graph.edges)}
        try:
            chi, col = chromatic_number(graph, exact=True, bound=exact_chi_bound)
            extra["chromatic_exact"] = True
        except SizeBoundError:
            chi, col = chromatic_number(graph, exact=False, bound=exact_chi_bound)
            extra["chromatic_exact"] = False
        q = ROUTING if chi <= 2 else smallest_prime_power_at_least(chi - 1)
        f = field(2 if q == ROUTING else q)
        code = assign_code(reduced, dec, f, col)
        extra["code_verified"] = bool(verify_code(reduced, code))
    if h <= 1 or not k4:
        routing = True
    elif len(net.links) <= PACKING_LINK_BOUND:
        routing = brute_tree_packing(net, h) is not None
    else:
        routing = None
    report = AnalysisReport(h, profile.lambda_, k4, q, chi, routing, extra)
    return report, witness


def _analyze_file(path: str, exact_chi_bound: int) -> tuple[int, dict, Optional[dict]]:
    try:
        report, witness = analyze(load_network(path), exact_chi_bound)
        return EXIT_OK, report.to_dict(), witness
    except UsageError as exc:
        return EXIT_USAGE, {"file": path, "error": str(exc)}, None
    except ParseError as exc:
        return EXIT_PARSE, {"file": path, "error": f"parse error: {exc}"}, None
    except (PreconditionError, SizeBoundError) as exc:
        return EXIT_PRECONDITION, {"file": path, "error": f"{path}: precondition: {exc}"}, None


def cmd_analyze(args) -> int:
    files = args.networks
    if len(files) == 1:
        code, out, witness = _analyze_file(files[0], args.exact_chi_bound)
        if code:
            raise _Failure(code, out["error"])
        _write_witness(args.witness, witness)
        _emit(out)
        return EXIT_OK
    if args.witness:
        raise UsageError("--witness needs a single network file")
    jobs = max(1, args.jobs)
    if jobs == 1:
        results = [_analyze_file(p, args.exact_chi_bound) for p in files]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyze_file, files, [args.exact_chi_bound] * len(files)))
    batch = []
    for path, (code, out, _) in zip(files, results):
        if code:
            print(f"ncminor: {out['error']}", file=sys.stderr)
        batch.append({"file": path, "exit_code": code, "report": out if code == 0 else None})
    _emit(batch)
    return max(code for code, _, _ in results)


def cmd_pack_trees(args) -> int:
    net = load_network(args.network)
    result = routing_multicast(net)
    if isinstance(result, HasK4Minor):
        _write_witness(args.witness, result.to_dict()["witness"])
        _emit(result.to_dict())
        return EXIT_OK
    verdict = verify_routing(net, result, len(result.trees))
    out = {"k4_minor": False, "rate_nc": len(result.trees), **result.to_dict(), "verified": bool(verdict)}
    _emit(out)
    return EXIT_OK


def cmd_assign_code(args) -> int:
    net = load_network(args.network)
    if args.reduce:
        net = make_two_minimal(net)
    dec = decompose(net)
    chi, col = chromatic_number(subtree_graph(dec), bound=args.exact_chi_bound)
    if args.field is None:
        reported = ROUTING if chi <= 2 else smallest_prime_power_at_least(chi - 1)
        f = field(2 if reported == ROUTING else reported)
    else:
        if not is_prime_power(args.field):
            raise UsageError(f"--field {args.field} is not a prime power")
        if chi > args.field + 1:
            raise PreconditionError(f"subtree graph needs {chi} colors; GF({args.field}) offers {args.field + 1} vectors")
        reported = args.field
        f = field(args.field)
    code = assign_code(net, dec, f, col)
    out = code.to_dict(reported)
    out["verified"] = bool(verify_code(net, code))
    if args.reduce:
        out["network"] = network_to_dict(net)
    _emit(out)
    return EXIT_OK


def cmd_construct(args) -> int:
    g = graph_from_dict(_read_json(args.graph))
    _emit(network_to_dict(network_from_graph(g)))
    return EXIT_OK


def _load_graph_or_topology(path: str) -> SimpleGraph:
    data = _read_json(path)
    if isinstance(data, dict) and "source" in data:
        return underlying_topology(network_from_dict(data))
    return graph_from_dict(data)


def cmd_check_minor(args) -> int:
    g = _load_graph_or_topology(args.input)
    out: dict = {"k": args.k}
    if args.k == 4:
        found = has_k4_minor(g)
        witness = find_k4_minor(g) if found else None
        out["has_minor"] = found
        out["witness"] = witness.to_dict() if witness else None
        if not found:
            td = tree_decomposition_w2(g)
            out["tree_decomposition"] = td.to_dict()
    else:
        found, witness = has_clique_minor(g, args.k)
        out["has_minor"] = found
        out["witness"] = witness.to_dict() if witness else None
    _write_witness(args.witness, out["witness"])
    _emit(out)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        net = generate(args.kind, args.size, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(network_to_dict(net))
    return EXIT_OK


# -- plumbing ------------------------------------------------------------------


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ncminor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="rate, flow values, subtree coloring, field size, K4 verdict")
    a.add_argument("networks", nargs="+", metavar="network.json")
    a.add_argument("--witness", metavar="out.json", help="write the K4 branch sets here")
    a.add_argument("--exact-chi-bound", type=int, default=DEFAULT_EXACT_BOUND, metavar="N")
    a.add_argument("--jobs", type=int, default=1, metavar="N", help="analyze several files in parallel")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("pack-trees", help="optimal routing as link-disjoint trees")
    t.add_argument("network")
    t.add_argument("--witness", metavar="out.json")
    t.set_defaults(func=cmd_pack_trees)

    c = sub.add_parser("assign-code", help="linear code over the smallest (or a given) field")
    c.add_argument("network")
    c.add_argument("--field", type=int, metavar="q")
    c.add_argument("--exact-chi-bound", type=int, default=DEFAULT_EXACT_BOUND, metavar="N")
    c.add_argument("--reduce", action="store_true", help="reduce to a 2-minimal network first")
    c.set_defaults(func=cmd_assign_code)

    k = sub.add_parser("construct", help="2-minimal network with the given subtree graph")
    k.add_argument("graph")
    k.set_defaults(func=cmd_construct)

    m = sub.add_parser("check-minor", help="clique-minor test on a graph or a network topology")
    m.add_argument("input")
    m.add_argument("--k", type=int, default=4)
    m.add_argument("--witness", metavar="out.json")
    m.set_defaults(func=cmd_check_minor)

    g = sub.add_parser("gen", help="seeded random instance")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("size", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Failure as exc:
        print(f"ncminor: {exc}", file=sys.stderr)
        return exc.code
    except UsageError as exc:
        print(f"ncminor: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"ncminor: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, SizeBoundError) as exc:
        print(f"ncminor: precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
