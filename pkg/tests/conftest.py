import sys

import pytest

from gevreylab.io import corpus_names, corpus_path, load_spec
from gevreylab.normalization import compute_borel_tables, formal_normalize


@pytest.fixture(scope="session")
def corpus():
    return {name: load_spec(corpus_path(name)) for name in corpus_names()}


@pytest.fixture(scope="session")
def euler2d(corpus):
    return corpus["euler2d"]


@pytest.fixture(scope="session")
def euler2d_result(euler2d):
    res = formal_normalize(euler2d, 8, 12)
    res.borel = compute_borel_tables(res)
    return res


@pytest.fixture(scope="session")
def smalldiv3d_result(corpus):
    res = formal_normalize(corpus["smalldiv3d"], 8, 12)
    res.borel = compute_borel_tables(res)
    return res


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
