import time

import pytest

from kjplus.grid import run_grid


@pytest.fixture(scope="session")
def grid_run():
    """Every representative cell with max(k, l) <= 6, computed once, with wall time."""
    start = time.perf_counter()
    results = run_grid(6)
    return results, time.perf_counter() - start


@pytest.fixture(scope="session")
def grid_results(grid_run):
    return grid_run[0]


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line past pytest's capture, then assert."""

    def emit(criterion: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
        assert ok, detail

    return emit
