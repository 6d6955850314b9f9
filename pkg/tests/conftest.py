import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from asymq.reporting import load_schema


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def report_validator():
    state = load_schema("state")
    report = load_schema("report")
    registry = Registry().with_resource(state["$id"], Resource.from_contents(state))
    return Draft202012Validator(report, registry=registry)


@pytest.fixture(scope="session")
def state_validator():
    return Draft202012Validator(load_schema("state"))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
