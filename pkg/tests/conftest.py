from __future__ import annotations

import numpy as np
import pytest

from surrogate_accounts import generate_protected_account
from surrogate_accounts.io import load_graph, sample_path

# criterion number -> list of (clause, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, clause: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((clause, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        clauses = ACCEPTANCE[number]
        ok = all(passed for _, passed, _ in clauses)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}")
        for clause, passed, detail in clauses:
            mark = "ok  " if passed else "FAIL"
            terminalreporter.write_line(f"    [{mark}] {clause}" + (f"  ({detail})" if detail else ""))


@pytest.fixture(scope="session")
def samples():
    """The bundled figure encodings, loaded once."""
    names = ("fig1a", "fig2a", "fig2b", "fig2c", "fig2d", "provenance")
    return {name: load_graph(sample_path(f"{name}.json")) for name in names}


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(samples):
    # load the cached numba kernels once so timing assertions measure the algorithms
    generate_protected_account(samples["fig2d"], "High-2")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
