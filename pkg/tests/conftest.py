import pytest
from hypothesis import strategies as st

from actcover.model import Instance


@pytest.fixture
def two_edges():
    # e1 = (u, v, 2, 3), e2 = (u, w, 4, 1) with u=0, v=1, w=2
    return Instance.build(3, [(0, 1, 2, 3), (0, 2, 4, 1)], [0, 0, 0])


@st.composite
def instances(draw, max_n=6, max_m=10, max_cost=20, zero_costs=True):
    """Small random multigraphs; requirements never exceed what E can give."""
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(0, max_m))
    low = 0 if zero_costs else 1
    edges = []
    for _ in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 2))
        v = v + 1 if v >= u else v
        edges.append((u, v, draw(st.integers(low, max_cost)), draw(st.integers(low, max_cost))))
    nbrs = [set() for _ in range(n)]
    for u, v, _, _ in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    req = [draw(st.integers(0, len(nbrs[v]))) for v in range(n)]
    return Instance.build(n, edges, req)


ACCEPTANCE_LINES = []


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number:2d}: {title}" + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
