from pathlib import Path

import pytest

import hazlab
from hazlab.generate import Origin, generate_deviation_route, merge_regenerated
from hazlab.lang import load_model
from hazlab.model import Project
from hazlab.review import import_decisions


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one [ACCEPTANCE] line per criterion test, capture or not."""
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key != "acceptance":
            continue
        status = "PASS" if report.passed else "FAIL"
        line = f"[ACCEPTANCE] {value}: {status}"
        terminal = item.config.pluginmanager.get_plugin("terminalreporter")
        if terminal is not None:
            terminal.ensure_newline()
            terminal.write_line(line)
        else:  # pragma: no cover - terminal plugin disabled
            print(line)

FIXTURES = Path(hazlab.__file__).parent / "fixtures"
OCCLUDED = FIXTURES / "occluded_pedestrian.hzl"
ONCOMING = FIXTURES / "oncoming_traffic.hzl"
DECISIONS = FIXTURES / "occluded_pedestrian_decisions.json"

FROZEN_NOW = "2026-01-01T00:00:00Z"


def load_fixture_project(*paths: Path) -> Project:
    result = load_model(list(paths))
    assert result.ok, [str(d) for d in result.diagnostics]
    assert result.project is not None
    return result.project


@pytest.fixture
def occluded_project() -> Project:
    return load_fixture_project(OCCLUDED)


@pytest.fixture
def generated_occluded(occluded_project: Project) -> Project:
    rows = generate_deviation_route(occluded_project)
    occluded_project.phs_set = merge_regenerated(
        occluded_project.phs_set, rows, Origin.DEVIATION_ROUTE)
    return occluded_project


@pytest.fixture
def triaged_occluded(generated_occluded: Project) -> Project:
    applied, diagnostics = import_decisions(
        generated_occluded, DECISIONS.read_text(encoding="utf-8"),
        now=FROZEN_NOW)
    assert applied == 8, [str(d) for d in diagnostics]
    return generated_occluded


@pytest.fixture
def oncoming_project() -> Project:
    return load_fixture_project(ONCOMING)
