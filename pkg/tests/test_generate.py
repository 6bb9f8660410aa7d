from fractions import Fraction

import pytest

from hazlab.generate import (
    GenerationError,
    InvalidProjectError,
    applicable_deviations,
    collapse_by_behavior,
    compare_strategies,
    find_catalog,
    generate_deviation_route,
    generate_malfunction_route,
    merge_regenerated,
    phs_identity,
)
from hazlab.model import (
    Origin,
    ReviewState,
    ReviewStatus,
    default_taxonomy,
)
from support import (
    brute_force_behavior_keys,
    make_catalog,
    make_project,
    make_segment,
)

EXPECTED_OCCLUDED_LABELS = [
    "Absence of required speed adjustment",
    "Improper acceleration",
    "Improper deceleration",
    "Improper course angle changes",
    "Absence of required lateral position adjustment",
]


class TestApplicableDeviations:
    def test_improper_classes_apply_everywhere(self):
        segment = make_segment("s", "sc", 1)
        instances = applicable_deviations(segment, default_taxonomy())
        assert [i.deviation for i in instances] == [
            "improper_acceleration", "improper_deceleration",
            "improper_course_change"]

    def test_absence_applies_only_where_required(self):
        segment = make_segment("s", "sc", 1, ("decelerate",),
                               labels={"decelerate": "speed adjustment"})
        instances = applicable_deviations(segment, default_taxonomy())
        assert len(instances) == 4
        absence = instances[0]
        assert absence.deviation == "absence_of_deceleration"
        assert absence.label == "Absence of required speed adjustment"
        assert absence.requirement_label == "speed adjustment"

    def test_unlabeled_requirement_falls_back_to_class_label(self):
        segment = make_segment("s", "sc", 1, ("accelerate",),
                               labels={"accelerate": ""})
        instances = applicable_deviations(segment, default_taxonomy())
        assert instances[0].label == "Absence of required acceleration"

    def test_unresolvable_requirement_raises(self):
        import dataclasses
        segment = make_segment("s", "sc", 1, ("decelerate",))
        broken = dataclasses.replace(
            segment,
            requirements=(dataclasses.replace(segment.requirements[0],
                                              action="fly"),))
        with pytest.raises(GenerationError, match="fly"):
            applicable_deviations(broken, default_taxonomy())


class TestDeviationRoute:
    def test_occluded_row_set(self, generated_occluded):
        rows = generated_occluded.phs_set
        assert len(rows) == 8
        assert all(r.origin is Origin.DEVIATION_ROUTE for r in rows)
        assert all(r.source_malfunction is None for r in rows)
        labels = []
        for row in rows:
            if row.instance_label not in labels:
                labels.append(row.instance_label)
        assert labels == EXPECTED_OCCLUDED_LABELS

    def test_rows_follow_scenario_then_segment_then_taxonomy_order(
            self, generated_occluded):
        rows = generated_occluded.phs_set
        assert [r.segment for r in rows] == ["approach"] * 4 + ["pass"] * 4

    def test_ids_are_deterministic(self, occluded_project):
        first = [r.id for r in generate_deviation_route(occluded_project)]
        second = [r.id for r in generate_deviation_route(occluded_project)]
        assert first == second

    def test_invalid_project_refused(self):
        project = make_project([])  # scenario without segments
        with pytest.raises(InvalidProjectError):
            generate_deviation_route(project)

    def test_empty_model_yields_no_rows(self):
        project = make_project([()])
        project.scenarios.clear()
        assert generate_deviation_route(project) == []


class TestMalfunctionRoute:
    def test_count_is_product_of_catalog_and_segments(self, oncoming_project):
        catalog = find_catalog(oncoming_project)
        rows = generate_malfunction_route(oncoming_project, catalog)
        assert len(rows) == 9
        assert all(r.origin is Origin.MALFUNCTION_ROUTE for r in rows)
        assert all(r.source_malfunction for r in rows)
        assert {r.deviation for r in rows} == {"improper_course_change"}

    def test_unmapped_malfunction_refused_with_ids(self):
        project = make_project([()], [("ok_one", "improper_acceleration"),
                                      ("zeta", None), ("alpha", None)])
        with pytest.raises(GenerationError) as excinfo:
            generate_malfunction_route(project, project.catalogs[0])
        assert "alpha, zeta" in str(excinfo.value)

    def test_malfunction_major_ordering(self):
        project = make_project([(), ()],
                               [("m1", "improper_acceleration"),
                                ("m2", "improper_deceleration")])
        rows = generate_malfunction_route(project, project.catalogs[0])
        assert [(r.source_malfunction, r.segment) for r in rows] == [
            ("m1", "synthetic_scenario_s1"), ("m1", "synthetic_scenario_s2"),
            ("m2", "synthetic_scenario_s1"), ("m2", "synthetic_scenario_s2")]


class TestCollapse:
    def test_oncoming_collapses_to_one_group(self, oncoming_project):
        catalog = find_catalog(oncoming_project)
        rows = generate_malfunction_route(oncoming_project, catalog)
        groups = collapse_by_behavior(rows)
        assert len(groups) == 1
        group = groups[0]
        assert group.deviation == "improper_course_change"
        assert len(group.malfunctions) == 9
        assert len(group.phs_ids) == 9

    def test_group_count_matches_brute_force(self):
        project = make_project(
            [("decelerate",), (), ("accelerate", "change_course")],
            [("m1", "improper_acceleration"),
             ("m2", "improper_acceleration"),
             ("m3", "absence_of_deceleration"),
             ("m4", "improper_course_change")])
        catalog = project.catalogs[0]
        rows = generate_malfunction_route(project, catalog)
        groups = collapse_by_behavior(rows)
        expected = brute_force_behavior_keys(project, catalog)
        assert {(g.segment, g.deviation) for g in groups} == expected

    def test_rejects_deviation_route_rows(self, generated_occluded):
        with pytest.raises(GenerationError, match="malfunction-route"):
            collapse_by_behavior(generated_occluded.phs_set)


class TestComparison:
    def test_oncoming_figures(self, oncoming_project):
        comparison = compare_strategies(oncoming_project,
                                        find_catalog(oncoming_project))
        assert comparison.malfunction_route_total == 9
        assert comparison.malfunction_route_applicable == 9
        assert comparison.deviation_route_total == 3
        assert comparison.deviation_route_unfiltered == 6
        assert comparison.distinct_behaviors == 1
        assert comparison.reduction_ratio == Fraction(3)
        assert float(comparison.reduction_ratio) == 3.0
        assert comparison.coverage_gaps == ()
        assert comparison.unmapped_malfunctions == ()
        assert set(comparison.deviations_without_malfunction) == {
            "absence_of_acceleration", "absence_of_deceleration",
            "absence_of_course_change", "improper_acceleration",
            "improper_deceleration"}

    def test_unmapped_malfunctions_are_tolerated_and_listed(self):
        project = make_project([()], [("m1", "improper_acceleration"),
                                      ("m2", None)])
        comparison = compare_strategies(project, project.catalogs[0])
        assert comparison.malfunction_route_total == 2
        assert comparison.unmapped_malfunctions == ("m2",)
        assert comparison.distinct_behaviors == 1

    def test_absence_mapping_in_non_requiring_segment_is_a_gap(self):
        project = make_project([("decelerate",), ()],
                               [("m1", "absence_of_deceleration")])
        comparison = compare_strategies(project, project.catalogs[0])
        assert comparison.coverage_gaps == (
            ("synthetic_scenario_s2", "absence_of_deceleration"),)
        # the requiring segment still counts as applicable
        assert comparison.malfunction_route_applicable == 1

    def test_ratio_with_empty_deviation_route_is_safe(self):
        project = make_project([()], [("m1", "improper_acceleration")])
        project.scenarios.clear()
        comparison = compare_strategies(project, project.catalogs[0])
        assert comparison.deviation_route_total == 0
        assert comparison.reduction_ratio == Fraction(0)

    def test_to_dict_shape(self, oncoming_project):
        doc = compare_strategies(oncoming_project,
                                 find_catalog(oncoming_project)).to_dict()
        assert doc["reduction_ratio"] == 3.0
        assert doc["coverage_gaps"] == []
        assert isinstance(doc["unmapped_malfunctions"], list)


class TestFindCatalog:
    def test_sole_catalog_found_without_name(self, oncoming_project):
        assert find_catalog(oncoming_project).name == "vehicle guidance"

    def test_named_lookup(self, oncoming_project):
        assert find_catalog(oncoming_project,
                            "vehicle guidance").name == "vehicle guidance"
        with pytest.raises(GenerationError, match="no catalog named"):
            find_catalog(oncoming_project, "other")

    def test_no_catalog(self, occluded_project):
        with pytest.raises(GenerationError, match="no malfunction catalog"):
            find_catalog(occluded_project)

    def test_several_catalogs_need_a_name(self):
        project = make_project([()])
        project.catalogs.append(make_catalog("a", [("m1", None)]))
        project.catalogs.append(make_catalog("b", [("m2", None)]))
        with pytest.raises(GenerationError, match="name one explicitly"):
            find_catalog(project)


class TestMergeRegenerated:
    def test_review_state_adopted_by_identity(self, occluded_project):
        fresh = generate_deviation_route(occluded_project)
        decided = ReviewState(status=ReviewStatus.HAZARDOUS, version=3)
        import dataclasses
        existing = [dataclasses.replace(fresh[0], review=decided)]
        merged = merge_regenerated(existing, fresh, Origin.DEVIATION_ROUTE)
        assert len(merged) == len(fresh)
        assert merged[0].review == decided
        assert all(row.review.version == 1 for row in merged[1:])

    def test_orphans_kept_at_the_end(self, occluded_project):
        fresh = generate_deviation_route(occluded_project)
        orphan = fresh[0]
        import dataclasses
        orphan = dataclasses.replace(
            orphan, id="phs-000000000000", segment="gone",
            review=ReviewState(status=ReviewStatus.HAZARDOUS, version=2))
        merged = merge_regenerated([orphan], fresh, Origin.DEVIATION_ROUTE)
        assert merged[-1].id == "phs-000000000000"
        assert len(merged) == len(fresh) + 1

    def test_other_route_rows_stay_in_front(self, oncoming_project):
        catalog = find_catalog(oncoming_project)
        malfunction_rows = generate_malfunction_route(oncoming_project,
                                                      catalog)
        deviation_rows = generate_deviation_route(oncoming_project)
        merged = merge_regenerated(malfunction_rows, deviation_rows,
                                   Origin.DEVIATION_ROUTE)
        assert merged[:len(malfunction_rows)] == malfunction_rows
        assert merged[len(malfunction_rows):] == deviation_rows

    def test_regeneration_is_stable(self, occluded_project):
        fresh = generate_deviation_route(occluded_project)
        merged = merge_regenerated(fresh, fresh, Origin.DEVIATION_ROUTE)
        assert merged == fresh

    def test_wrong_origin_rejected(self, occluded_project):
        fresh = generate_deviation_route(occluded_project)
        with pytest.raises(GenerationError, match="origin"):
            merge_regenerated([], fresh, Origin.MALFUNCTION_ROUTE)


def test_identity_distinguishes_all_key_parts():
    base = phs_identity("sc", "seg", "dev", "lbl", Origin.DEVIATION_ROUTE)
    assert base == phs_identity("sc", "seg", "dev", "lbl",
                                Origin.DEVIATION_ROUTE)
    variants = {
        phs_identity("sc2", "seg", "dev", "lbl", Origin.DEVIATION_ROUTE),
        phs_identity("sc", "seg2", "dev", "lbl", Origin.DEVIATION_ROUTE),
        phs_identity("sc", "seg", "dev2", "lbl", Origin.DEVIATION_ROUTE),
        phs_identity("sc", "seg", "dev", "lbl2", Origin.DEVIATION_ROUTE),
        phs_identity("sc", "seg", "dev", "lbl", Origin.MALFUNCTION_ROUTE,
                     "m1"),
    }
    assert base not in variants and len(variants) == 5
