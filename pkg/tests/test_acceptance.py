"""Acceptance gate: one test per shipped guarantee.

Each test records an ``acceptance`` property; a conftest hook prints
``[ACCEPTANCE] <name>: PASS/FAIL`` for every criterion, visible in the
terminal regardless of capture settings. Time budgets are asserted
inside the tests themselves.
"""

import random
from fractions import Fraction
from time import perf_counter

import pytest
from hypothesis import given, settings

from conftest import DECISIONS, OCCLUDED, ONCOMING, load_fixture_project
from gen_support import (
    TREES,
    fuzz_corpus,
    random_model,
    run_random_ops,
    scan_store_state,
    spans_in_bounds,
)
from hazlab.generate import (
    Origin,
    collapse_by_behavior,
    compare_strategies,
    find_catalog,
    generate_deviation_route,
    generate_malfunction_route,
    merge_regenerated,
)
from hazlab.lang import load_model
from hazlab.lang.parser import parse
from hazlab.lang.printer import print_tree
from hazlab.model import (
    DeviationKind,
    Severity,
    TargetKind,
    default_taxonomy,
)
from hazlab.review import import_decisions
from hazlab.store import PROJECT_SUFFIX, ProjectStore
from support import brute_force_behavior_keys, make_project
from test_store import run_concurrent_writers

EXPECTED_OCCLUDED_LABELS = {
    "Absence of required speed adjustment",
    "Absence of required lateral position adjustment",
    "Improper acceleration",
    "Improper deceleration",
    "Improper course angle changes",
}


def test_occluded_deviation_replay(record_property):
    record_property("acceptance", "occluded-deviation-replay")
    started = perf_counter()
    result = load_model([OCCLUDED])
    assert result.ok, [str(d) for d in result.diagnostics]
    rows = generate_deviation_route(result.project)
    labels = [row.instance_label for row in rows]
    elapsed = perf_counter() - started
    assert len(rows) == 8
    assert set(labels) == EXPECTED_OCCLUDED_LABELS
    assert len(set(labels)) == 5
    assert elapsed < 1.0, f"replay took {elapsed:.3f}s"


def test_occluded_hazard_split(record_property):
    record_property("acceptance", "occluded-hazard-split")
    started = perf_counter()
    project = load_fixture_project(OCCLUDED)
    rows = generate_deviation_route(project)
    project.phs_set = merge_regenerated(project.phs_set, rows,
                                        Origin.DEVIATION_ROUTE)
    applied, diagnostics = import_decisions(
        project, DECISIONS.read_text(encoding="utf-8"),
        now="2026-01-01T00:00:00Z")
    elapsed = perf_counter() - started
    assert applied == 8 and diagnostics == []
    assert len(project.hazards) == 5
    kinds = [hazard.target_kind for hazard in project.hazards]
    assert kinds.count(TargetKind.OTHER_TRAFFIC_PARTICIPANT) == 3
    assert kinds.count(TargetKind.PASSENGERS) == 2
    # the course-change deviation class endangers both groups
    course_rows = {row.id for row in project.phs_set
                   if row.deviation == "improper_course_change"}
    course_kinds = {hazard.target_kind for hazard in project.hazards
                    if hazard.phs in course_rows}
    assert course_kinds == {TargetKind.OTHER_TRAFFIC_PARTICIPANT,
                            TargetKind.PASSENGERS}
    assert elapsed < 1.0, f"hazard replay took {elapsed:.3f}s"


def test_oncoming_strategy_collapse(record_property):
    record_property("acceptance", "oncoming-strategy-collapse")
    started = perf_counter()
    project = load_fixture_project(ONCOMING)
    comparison = compare_strategies(project, find_catalog(project))
    elapsed = perf_counter() - started
    assert comparison.malfunction_route_total == 9
    assert comparison.distinct_behaviors == 1
    assert comparison.deviation_route_total == 3
    assert comparison.reduction_ratio == Fraction(3)
    assert float(comparison.reduction_ratio) == 3.0
    assert comparison.coverage_gaps == ()
    assert elapsed < 1.0, f"collapse took {elapsed:.3f}s"


def test_scale_formula_check(record_property):
    record_property("acceptance", "scale-formula-check")
    started = perf_counter()
    class_ids = [cls.id for cls in default_taxonomy().classes]
    segments = [("accelerate", "decelerate", "change_course")] * 108
    mappings = [(f"m{index:02d}", class_ids[index % len(class_ids)])
                for index in range(37)]
    project = make_project(segments, mappings, name="scale_check")
    catalog = project.catalogs[0]

    malfunction_rows = generate_malfunction_route(project, catalog)
    deviation_rows = generate_deviation_route(project)
    elapsed = perf_counter() - started

    assert len(malfunction_rows) == 3996
    assert len(malfunction_rows) == 37 * 108
    assert len(deviation_rows) <= 648
    assert len(deviation_rows) <= 6 * 108
    assert len(malfunction_rows) > len(deviation_rows)
    assert len(malfunction_rows) / len(deviation_rows) >= 6.0
    assert elapsed < 1.0, f"scale check took {elapsed:.3f}s"


def test_oracle_equivalence(record_property):
    record_property("acceptance", "oracle-equivalence")
    started = perf_counter()
    rng = random.Random(20260819)
    for _ in range(500):
        project = random_model(rng, max_malfunctions=10, max_segments=10)
        catalog = project.catalogs[0]
        groups = collapse_by_behavior(
            generate_malfunction_route(project, catalog))
        keys = {(group.segment, group.deviation) for group in groups}
        assert keys == brute_force_behavior_keys(project, catalog)
        assert len(groups) == len(keys)

        deviation_keys = {(row.segment, row.deviation)
                          for row in generate_deviation_route(project)}
        segments = {segment.id: segment for segment in project.segments()}
        for segment_id, class_id in keys:
            cls = project.taxonomy.class_by_id(class_id)
            applicable = (cls.kind is DeviationKind.IMPROPER
                          or any(req.action == cls.action for req in
                                 segments[segment_id].requirements))
            if applicable:
                assert (segment_id, class_id) in deviation_keys
    elapsed = perf_counter() - started
    assert elapsed < 10.0, f"500 oracle runs took {elapsed:.3f}s"


def test_parser_properties(record_property):
    record_property("acceptance", "parser-properties")
    started = perf_counter()

    @settings(max_examples=500, deadline=None, derandomize=True,
              database=None)
    @given(TREES)
    def round_trip(tree):
        text = print_tree(tree)
        result = parse(text)
        assert not any(d.severity is Severity.ERROR
                       for d in result.diagnostics)
        assert result.tree == tree
        assert print_tree(result.tree) == text

    round_trip()

    fixtures = (OCCLUDED.read_text(encoding="utf-8"),
                ONCOMING.read_text(encoding="utf-8"))
    for source in fuzz_corpus(20260101, 10_000, fixtures):
        result = parse(source)  # must never raise
        assert (result.tree is None) == any(
            d.severity is Severity.ERROR for d in result.diagnostics)
        problems = spans_in_bounds(source, result.diagnostics)
        assert problems == [], f"{problems} for {source!r}"
    elapsed = perf_counter() - started
    assert elapsed < 30.0, f"parser properties took {elapsed:.3f}s"


def test_store_safety(record_property, tmp_path):
    record_property("acceptance", "store-safety")
    # randomized command sequences against one store
    storm_project = load_fixture_project(ONCOMING)
    storm = ProjectStore.create(
        tmp_path / ("storm" + PROJECT_SUFFIX), storm_project,
        clock=lambda: "2026-01-01T00:00:00Z")
    storm.regenerate("both")
    stats = run_random_ops(storm, random.Random(20260819), 1000)
    assert stats["committed"] > 0 and stats["rejected"] > 0
    problems = scan_store_state(storm)
    assert problems == []

    # versioned-write stress: 8 writers x 200 ops, no lost updates
    stress_project = load_fixture_project(OCCLUDED)
    rows = generate_deviation_route(stress_project)
    stress_project.phs_set = merge_regenerated(
        stress_project.phs_set, rows, Origin.DEVIATION_ROUTE)
    stress = ProjectStore.create(
        tmp_path / ("stress" + PROJECT_SUFFIX), stress_project,
        clock=lambda: "2026-01-01T00:00:00Z")
    wins = run_concurrent_writers(stress, writers=8, ops_per_writer=200)
    assert sum(wins) == 8 * 200
    final = stress.snapshot()
    assert final.store_version == 1600
    assert len(final.decision_log) == 1600
    assert scan_store_state(stress) == []
