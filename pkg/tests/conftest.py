import os
import sys
from pathlib import Path

import pytest

from socnet import Graph

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
DATA = Path(__file__).parent / "data"

GOT_CANDIDATES = [
    os.environ.get("SOCNET_GOT_CSV"),
    ROOT / "data" / "stormofswords.csv",
    DATA / "stormofswords.csv",
]


def find_got_csv():
    for cand in GOT_CANDIDATES:
        if cand and Path(cand).is_file():
            return Path(cand)
    return None


def path_graph(labels, weights=None, directed=False):
    g = Graph(directed=directed)
    weights = weights or [1.0] * (len(labels) - 1)
    for a, b, w in zip(labels, labels[1:], weights):
        g.add_edge(a, b, w)
    return g


def star_graph(leaves=4, center="hub", weight=1.0):
    g = Graph()
    for i in range(leaves):
        g.add_edge(center, f"leaf{i}", weight)
    return g


@pytest.fixture
def path_abc():
    return path_graph(["A", "B", "C"])


@pytest.fixture
def star5():
    return star_graph(5)


# acceptance reporting: one line per criterion in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
