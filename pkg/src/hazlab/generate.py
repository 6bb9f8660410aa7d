"""Systematic generation of potentially hazardous scenarios.

Two routes produce review rows: the malfunction route pairs every
cataloged malfunction with every segment, and the deviation route pairs
each segment with the deviation classes applicable in it. Collapsing
malfunction-route rows by externally observable behavior shows why the
deviation route reviews fewer rows for the same behavior coverage; the
comparison report quantifies that.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from hazlab.model import (
    DeviationKind,
    DeviationTaxonomy,
    HazlabError,
    MalfunctionCatalog,
    Origin,
    PotentiallyHazardousScenario,
    Project,
    ReviewState,
    Segment,
    errors_only,
    stable_id,
    validate_project,
)


class GenerationError(HazlabError):
    """Generation refused: unmet precondition or unusable input."""


class InvalidProjectError(GenerationError):
    def __init__(self, issues) -> None:
        lines = "; ".join(str(issue) for issue in issues)
        super().__init__(f"project fails validation: {lines}")
        self.issues = list(issues)


@dataclass(frozen=True)
class DeviationInstance:
    """A deviation class instantiated for one segment.

    ``label`` is the scenario-level wording: absence classes take the
    requirement's label, improper classes keep their generic one.
    """

    deviation: str
    label: str
    segment: str
    requirement_label: str = ""


@dataclass(frozen=True)
class BehaviorGroup:
    """Malfunction-route rows that share one observable behavior."""

    segment: str
    deviation: str
    malfunctions: tuple[str, ...]
    phs_ids: tuple[str, ...]


@dataclass(frozen=True)
class StrategyComparison:
    """Side-by-side figures for the two generation strategies."""

    malfunction_route_total: int
    malfunction_route_applicable: int
    deviation_route_total: int
    deviation_route_unfiltered: int
    distinct_behaviors: int
    reduction_ratio: Fraction
    unmapped_malfunctions: tuple[str, ...] = ()
    deviations_without_malfunction: tuple[str, ...] = ()
    coverage_gaps: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        return {
            "malfunction_route_total": self.malfunction_route_total,
            "malfunction_route_applicable": self.malfunction_route_applicable,
            "deviation_route_total": self.deviation_route_total,
            "deviation_route_unfiltered": self.deviation_route_unfiltered,
            "distinct_behaviors": self.distinct_behaviors,
            "reduction_ratio": float(self.reduction_ratio),
            "unmapped_malfunctions": list(self.unmapped_malfunctions),
            "deviations_without_malfunction":
                list(self.deviations_without_malfunction),
            "coverage_gaps": [list(gap) for gap in self.coverage_gaps],
        }


def phs_identity(scenario_id: str, segment_id: str, deviation_id: str,
                 requirement_label: str, origin: Origin,
                 malfunction_id: str | None = None) -> str:
    """Stable row identity; survives model edits that keep the key."""
    return stable_id("phs", scenario_id, segment_id, deviation_id,
                     requirement_label, origin.value, malfunction_id or "")


def applicable_deviations(segment: Segment,
                          taxonomy: DeviationTaxonomy
                          ) -> list[DeviationInstance]:
    """Deviation classes applicable in one segment, in taxonomy order.

    Improper-kind classes apply unconditionally; an absence-kind class
    applies only where the segment requires its action, and takes the
    requirement's label as its scenario-level wording.
    """
    for requirement in segment.requirements:
        if taxonomy.absence_class_for_action(requirement.action) is None:
            raise GenerationError(
                f"segment {segment.id!r} requires action "
                f"{requirement.action!r}, which matches no absence-kind "
                "deviation class")
    instances: list[DeviationInstance] = []
    for cls in taxonomy.classes:
        if cls.kind is DeviationKind.IMPROPER:
            instances.append(DeviationInstance(
                deviation=cls.id,
                label=cls.display_label,
                segment=segment.id,
            ))
        else:
            for requirement in segment.requirements:
                if requirement.action == cls.action:
                    label = (f"Absence of required {requirement.label}"
                             if requirement.label else cls.display_label)
                    instances.append(DeviationInstance(
                        deviation=cls.id,
                        label=label,
                        segment=segment.id,
                        requirement_label=requirement.label,
                    ))
    return instances


def _checked(project: Project) -> None:
    issues = errors_only(validate_project(project))
    if issues:
        raise InvalidProjectError(issues)


def generate_deviation_route(
        project: Project) -> list[PotentiallyHazardousScenario]:
    """Pair every segment with its applicable deviations."""
    _checked(project)
    rows: list[PotentiallyHazardousScenario] = []
    for scenario in project.scenarios:
        for segment in scenario.segments:
            for instance in applicable_deviations(segment, project.taxonomy):
                rows.append(PotentiallyHazardousScenario(
                    id=phs_identity(scenario.id, segment.id,
                                    instance.deviation,
                                    instance.requirement_label,
                                    Origin.DEVIATION_ROUTE),
                    segment=segment.id,
                    origin=Origin.DEVIATION_ROUTE,
                    deviation=instance.deviation,
                    instance_label=instance.label,
                ))
    return rows


def generate_malfunction_route(
        project: Project,
        catalog: MalfunctionCatalog) -> list[PotentiallyHazardousScenario]:
    """Pair every cataloged malfunction with every segment.

    Row count is exactly |catalog| x |segments|. Refuses catalogs with
    unmapped malfunctions: without the observable effect there is no
    deviation class to file the row under.
    """
    _checked(project)
    unmapped = [m.id for m in catalog.all_malfunctions() if m.maps_to is None]
    if unmapped:
        raise GenerationError(
            "catalog has malfunctions without a deviation mapping: "
            + ", ".join(sorted(unmapped)))
    class_by_id = {cls.id: cls for cls in project.taxonomy.classes}
    rows: list[PotentiallyHazardousScenario] = []
    for malfunction in catalog.all_malfunctions():
        cls = class_by_id.get(malfunction.maps_to or "")
        if cls is None:
            raise GenerationError(
                f"malfunction {malfunction.id!r} maps to unknown deviation "
                f"class {malfunction.maps_to!r}")
        for scenario in project.scenarios:
            for segment in scenario.segments:
                rows.append(PotentiallyHazardousScenario(
                    id=phs_identity(scenario.id, segment.id, cls.id, "",
                                    Origin.MALFUNCTION_ROUTE,
                                    malfunction.id),
                    segment=segment.id,
                    origin=Origin.MALFUNCTION_ROUTE,
                    deviation=cls.id,
                    instance_label=cls.display_label,
                    source_malfunction=malfunction.id,
                ))
    return rows


def collapse_by_behavior(
        rows: list[PotentiallyHazardousScenario]) -> list[BehaviorGroup]:
    """Group malfunction-route rows by (segment, observable deviation)."""
    grouped: dict[tuple[str, str], tuple[list[str], list[str]]] = {}
    for row in rows:
        if row.origin is not Origin.MALFUNCTION_ROUTE:
            raise GenerationError(
                f"collapse applies to malfunction-route rows only; "
                f"{row.id} has origin {row.origin.value}")
        key = (row.segment, row.deviation)
        members = grouped.setdefault(key, ([], []))
        members[0].append(row.source_malfunction or "")
        members[1].append(row.id)
    return [
        BehaviorGroup(segment=segment, deviation=deviation,
                      malfunctions=tuple(malfunctions),
                      phs_ids=tuple(phs_ids))
        for (segment, deviation), (malfunctions, phs_ids) in grouped.items()
    ]


def compare_strategies(project: Project,
                       catalog: MalfunctionCatalog) -> StrategyComparison:
    """Quantify both routes over one catalog.

    Tolerant of unmapped malfunctions: they count into the raw product
    (it is plain arithmetic) but are excluded from behavior collapse and
    applicability figures, and are listed by id.
    """
    _checked(project)
    segments = [segment for segment in project.segments()]
    malfunctions = list(catalog.all_malfunctions())
    mapped = [m for m in malfunctions if m.maps_to is not None]
    unmapped = tuple(m.id for m in malfunctions if m.maps_to is None)

    class_by_id = {cls.id: cls for cls in project.taxonomy.classes}
    applicable_keys: set[tuple[str, str]] = set()
    deviation_route_total = 0
    for segment in segments:
        for instance in applicable_deviations(segment, project.taxonomy):
            applicable_keys.add((segment.id, instance.deviation))
            deviation_route_total += 1

    malfunction_route_total = len(malfunctions) * len(segments)
    malfunction_route_applicable = 0
    behavior_keys: dict[tuple[str, str], None] = {}
    coverage_gaps: dict[tuple[str, str], None] = {}
    for malfunction in mapped:
        for segment in segments:
            key = (segment.id, malfunction.maps_to or "")
            behavior_keys.setdefault(key, None)
            if key in applicable_keys:
                malfunction_route_applicable += 1
            else:
                coverage_gaps.setdefault(key, None)

    # Containment check: a behavior key can fall outside the deviation
    # route only when the mapped class is absence-kind and the segment
    # does not require its action. Anything else is an internal fault.
    for segment_id, deviation_id in coverage_gaps:
        cls = class_by_id.get(deviation_id)
        if cls is not None and cls.kind is not DeviationKind.ABSENCE:
            raise GenerationError(
                f"improper-kind deviation {deviation_id!r} missing from the "
                f"deviation route in segment {segment_id!r}")

    image = {m.maps_to for m in mapped}
    outside = tuple(cls.id for cls in project.taxonomy.classes
                    if cls.id not in image)

    return StrategyComparison(
        malfunction_route_total=malfunction_route_total,
        malfunction_route_applicable=malfunction_route_applicable,
        deviation_route_total=deviation_route_total,
        deviation_route_unfiltered=(
            len(project.taxonomy.classes) * len(segments)),
        distinct_behaviors=len(behavior_keys),
        reduction_ratio=Fraction(malfunction_route_total,
                                 max(deviation_route_total, 1)),
        unmapped_malfunctions=unmapped,
        deviations_without_malfunction=outside,
        coverage_gaps=tuple(coverage_gaps),
    )


def find_catalog(project: Project,
                 name: str | None = None) -> MalfunctionCatalog:
    """Resolve a catalog by name, or the only one when unnamed."""
    if name is not None:
        for catalog in project.catalogs:
            if catalog.name == name:
                return catalog
        raise GenerationError(f"no catalog named {name!r} in project")
    if len(project.catalogs) == 1:
        return project.catalogs[0]
    if not project.catalogs:
        raise GenerationError("project has no malfunction catalog")
    names = ", ".join(repr(c.name) for c in project.catalogs)
    raise GenerationError(
        f"project has several catalogs ({names}); name one explicitly")


def merge_regenerated(
        existing: list[PotentiallyHazardousScenario],
        fresh: list[PotentiallyHazardousScenario],
        origin: Origin) -> list[PotentiallyHazardousScenario]:
    """Fold regenerated rows into the current set without losing review.

    Rows from the other route stay first in their current order; fresh
    rows follow in generation order, adopting the review state of any
    existing row with the same identity; rows of this route that the
    model no longer produces stay at the end (never deleted, reported as
    orphaned).
    """
    by_id = {row.id: row for row in existing if row.origin is origin}
    merged = [row for row in existing if row.origin is not origin]
    fresh_ids = set()
    for row in fresh:
        if row.origin is not origin:
            raise GenerationError(
                f"row {row.id} has origin {row.origin.value}, expected "
                f"{origin.value}")
        fresh_ids.add(row.id)
        old = by_id.get(row.id)
        if old is not None:
            row = PotentiallyHazardousScenario(
                id=row.id,
                segment=row.segment,
                origin=row.origin,
                deviation=row.deviation,
                instance_label=row.instance_label,
                source_malfunction=row.source_malfunction,
                review=old.review,
            )
        merged.append(row)
    for row in existing:
        if row.origin is origin and row.id not in fresh_ids:
            merged.append(row)
    return merged
