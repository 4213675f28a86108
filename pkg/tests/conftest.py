import itertools
from pathlib import Path

import networkx as nx
import pytest

from ncminor.graph import Network, SimpleGraph, parse_network

DATA = Path(__file__).parent / "data"

BUTTERFLY_LINKS = [
    ("s", "a"), ("s", "b"), ("a", "c"), ("b", "c"), ("a", "t1"),
    ("b", "t2"), ("c", "d"), ("d", "t1"), ("d", "t2"),
]


def butterfly_net() -> Network:
    return Network.build("s", ["t1", "t2"], BUTTERFLY_LINKS)


def diamond_net() -> Network:
    return Network.build("s", ["t"], [("s", "a"), ("s", "b"), ("a", "t"), ("b", "t")])


def parallel_net(k: int = 2) -> Network:
    return Network.build("s", ["t"], [("s", "t", k)])


def from_nx(g) -> SimpleGraph:
    """SimpleGraph with string labels from a networkx graph."""
    return SimpleGraph.build(
        [(str(u), str(v)) for u, v in g.edges()], nodes=[str(v) for v in g.nodes()]
    )


def cycle(n: int) -> SimpleGraph:
    return from_nx(nx.cycle_graph(n))


def load(name: str) -> Network:
    return parse_network((DATA / name).read_text())


def kneser_5_2() -> SimpleGraph:
    pairs = [frozenset(p) for p in itertools.combinations(range(5), 2)]
    label = {p: "".join(map(str, sorted(p))) for p in pairs}
    return SimpleGraph.build([(label[a], label[b]) for a, b in itertools.combinations(pairs, 2) if not a & b])


@pytest.fixture
def butterfly():
    return butterfly_net()


@pytest.fixture
def diamond():
    return diamond_net()


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, ok: bool, detail: str, soft: bool = False) -> None:
    status = "PASS" if ok else ("WARN" if soft else "FAIL")
    line = f"[{status}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
