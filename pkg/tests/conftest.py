import contextlib
import time

import numpy as np
import pytest

from hyperfed.hypergraph import Hypergraph
from hyperfed.synthetic import random_hypergraph


@pytest.fixture
def path3():
    """Hyperedges [[0,1],[1,2]] over three labeled nodes."""
    return Hypergraph.create(
        np.arange(6, dtype=float).reshape(3, 2), [[0, 1], [1, 2]], labels=[0, 1, 0]
    )


@pytest.fixture
def small_random():
    return random_hypergraph(60, 25, feature_dim=5, weighted=True, seed=7)


def dense_incidence(hg):
    """Brute-force H built entry by entry from the membership rule."""
    h = np.zeros((hg.num_nodes, hg.num_edges))
    for v in range(hg.num_nodes):
        for j, members in enumerate(hg.hyperedges):
            h[v, j] = 1.0 if v in members else 0.0
    return h


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``with acceptance("7 ordering", limit_s=300) as note: ...; note("detail")``.
    """
    @contextlib.contextmanager
    def run(name, limit_s):
        details = []
        start = time.perf_counter()
        ok = False
        try:
            yield details.append
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            ok = ok and elapsed < limit_s
            details.append(f"{elapsed:.1f}s/{limit_s}s")
            _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {'; '.join(details)}")
        assert elapsed < limit_s, f"{name} took {elapsed:.1f}s, limit {limit_s}s"

    def skip(name, reason):
        _ACCEPTANCE.append(f"SKIP  criterion {name}: {reason}")
        pytest.skip(reason)

    run.skip = skip
    return run


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
