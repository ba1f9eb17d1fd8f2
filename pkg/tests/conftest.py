import random

import pytest

from roomforge.scene import ADJACENT, Edge, ObjectNode, Room, make_graph


def obj(node_id, size=(0.5, 0.5, 0.5), rotation=0, name=None, style="plain wood"):
    return ObjectNode(
        id=node_id,
        name=name or node_id.rsplit("_", 1)[0],
        style_material=style,
        size=size,
        rotation=rotation,
    )


def edge(parent, child, prep, adjacency=ADJACENT):
    return Edge(parent=parent, child=child, preposition=prep, adjacency=adjacency)


@pytest.fixture
def room():
    return Room(4.0, 3.0, 2.4)


@pytest.fixture
def rng():
    return random.Random(1234)


def graph_of(room, nodes, edges):
    return make_graph(room, nodes, edges)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, printed after the run."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call" and outcome != "skipped":
                continue
            if "test_acceptance.py" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, outcome))
    if not lines:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for name, outcome in sorted(set(lines)):
        terminalreporter.write_line(f"  {name}: {label[outcome]}")
