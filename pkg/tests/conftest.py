import math
from pathlib import Path

import pytest

from mpdptw.instance import paper_instance

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "fixtures" / "paper_table1.json"


@pytest.fixture(scope="session")
def paper():
    return paper_instance()


@pytest.fixture(scope="session")
def one_pair(paper):
    return paper.subset([8, 2], name="pair-8-2")


@pytest.fixture(scope="session")
def two_pairs(paper):
    return paper.subset([8, 2, 7, 9], name="pairs-8-2-7-9")


def reference_schedule(inst, route):
    """Step-by-step simulation straight from node attributes.

    Returns (per-node rows (node, arrival, wait, departure, load, tardiness),
    route tardiness incl. depot return, route distance).
    """
    def d(a, b):
        na, nb = inst.node(a), inst.node(b)
        return math.sqrt((na.x - nb.x) ** 2 + (na.y - nb.y) ** 2)

    speed = inst.fleet.speed
    rows = []
    t = 0.0
    load = 0.0
    dist = 0.0
    tard = 0.0
    prev = 0
    for j in route:
        node = inst.node(j)
        leg = d(prev, j)
        dist += leg
        arrive = t + leg / speed
        wait = node.e - arrive if arrive < node.e else 0.0
        start = arrive if arrive >= node.e else node.e
        t = start + node.s
        load += node.q
        late = t - node.l if t > node.l else 0.0
        tard += late
        rows.append((j, arrive, wait, t, load, late))
        prev = j
    if route:
        leg = d(prev, 0)
        dist += leg
        back = t + leg / speed
        if back > inst.depot.l:
            tard += back - inst.depot.l
    return rows, tard, dist


_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")
