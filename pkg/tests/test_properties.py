import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import OCCLUDED, ONCOMING
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
    generate_deviation_route,
    generate_malfunction_route,
    merge_regenerated,
)
from hazlab.lang.parser import parse
from hazlab.lang.printer import print_tree
from hazlab.model import DeviationKind, Severity
from hazlab.store import PROJECT_SUFFIX, ProjectStore
from support import brute_force_behavior_keys


class TestPrinterRoundTrip:
    @settings(max_examples=150, deadline=None, derandomize=True)
    @given(TREES)
    def test_print_parse_identity(self, tree):
        text = print_tree(tree)
        result = parse(text)
        errors = [d for d in result.diagnostics
                  if d.severity is Severity.ERROR]
        assert errors == [], f"{errors} in:\n{text}"
        assert result.tree == tree
        # the canonical form is a fixed point of print∘parse
        assert print_tree(result.tree) == text


class TestParserNeverCrashes:
    def test_seeded_fuzz_corpus(self):
        fixtures = (OCCLUDED.read_text(encoding="utf-8"),
                    ONCOMING.read_text(encoding="utf-8"))
        for source in fuzz_corpus(20260101, 2000, fixtures):
            result = parse(source)
            assert (result.tree is None) == any(
                d.severity is Severity.ERROR for d in result.diagnostics)
            problems = spans_in_bounds(source, result.diagnostics)
            assert problems == [], f"{problems} for {source!r}"


@pytest.fixture(scope="module")
def models():
    rng = random.Random(42)
    return [random_model(rng) for _ in range(60)]


class TestGenerationProperties:
    def test_malfunction_route_is_the_full_product(self, models):
        for project in models:
            catalog = project.catalogs[0]
            rows = generate_malfunction_route(project, catalog)
            n_malfunctions = len(list(catalog.all_malfunctions()))
            n_segments = len(list(project.segments()))
            assert len(rows) == n_malfunctions * n_segments
            assert len({row.id for row in rows}) == len(rows)

    def test_collapse_matches_brute_force(self, models):
        for project in models:
            catalog = project.catalogs[0]
            rows = generate_malfunction_route(project, catalog)
            groups = collapse_by_behavior(rows)
            keys = {(g.segment, g.deviation) for g in groups}
            assert keys == brute_force_behavior_keys(project, catalog)
            assert sum(len(g.phs_ids) for g in groups) == len(rows)
            assert len(keys) == len(groups)

    def test_deviation_route_row_shape(self, models):
        for project in models:
            rows = generate_deviation_route(project)
            assert len({row.id for row in rows}) == len(rows)
            improper = {cls.id for cls in project.taxonomy.classes
                        if cls.kind is DeviationKind.IMPROPER}
            by_segment: dict[str, int] = {}
            for row in rows:
                by_segment[row.segment] = by_segment.get(row.segment, 0) + 1
            for segment in project.segments():
                expected = len(improper) + len(segment.requirements)
                assert by_segment.get(segment.id, 0) == expected

    def test_generation_is_deterministic(self, models):
        for project in models[:20]:
            first = generate_deviation_route(project)
            second = generate_deviation_route(project)
            assert [r.id for r in first] == [r.id for r in second]

    def test_merge_regeneration_is_stable(self, models):
        for project in models[:20]:
            fresh = generate_deviation_route(project)
            once = merge_regenerated([], fresh, Origin.DEVIATION_ROUTE)
            twice = merge_regenerated(once, fresh, Origin.DEVIATION_ROUTE)
            assert [r.id for r in once] == [r.id for r in twice]

    def test_comparison_arithmetic(self, models):
        for project in models:
            catalog = project.catalogs[0]
            comparison = compare_strategies(project, catalog)
            n_malfunctions = len(list(catalog.all_malfunctions()))
            n_segments = len(list(project.segments()))
            assert (comparison.malfunction_route_total
                    == n_malfunctions * n_segments)
            assert (comparison.distinct_behaviors
                    == len(brute_force_behavior_keys(project, catalog)))
            assert comparison.deviation_route_total <= 6 * n_segments
            if comparison.deviation_route_total:
                assert comparison.reduction_ratio == Fraction(
                    comparison.malfunction_route_total,
                    comparison.deviation_route_total)
            # every behavior either meets the deviation route or is a gap
            assert (comparison.distinct_behaviors
                    <= comparison.deviation_route_total
                    + len(comparison.coverage_gaps))


class TestStoreRandomOps:
    def test_random_operation_storm_keeps_invariants(self, tmp_path,
                                                     oncoming_project):
        store = ProjectStore.create(
            tmp_path / ("storm" + PROJECT_SUFFIX), oncoming_project,
            clock=lambda: "2026-01-01T00:00:00Z")
        store.regenerate("both")
        rng = random.Random(7)
        stats = run_random_ops(store, rng, 250)
        assert stats["committed"] > 0
        assert stats["rejected"] > 0  # invalid ops were exercised
        problems = scan_store_state(store)
        assert problems == []
