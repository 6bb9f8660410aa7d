"""Domain model for the hazard-identification workbench.

Defines the persistent value types (deviation taxonomy, malfunction
catalogs, operational scenarios, generated potentially hazardous
scenarios, hazards, trace links), the project container that holds them,
project-wide validation, and the canonical JSON serialization.

All value types are immutable once committed; the project container is
mutated only through the review store, which linearizes writes.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

SCHEMA_VERSION = 1

IDENTIFIER_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class HazlabError(Exception):
    """Base class for errors raised by this package."""


class ModelError(HazlabError):
    """A domain object or project document is malformed."""


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Axis(str, Enum):
    LONGITUDINAL = "longitudinal"
    LATERAL = "lateral"


class DeviationKind(str, Enum):
    ABSENCE = "absence"
    IMPROPER = "improper"


class ActorRole(str, Enum):
    EGO = "ego"
    PEDESTRIAN = "pedestrian"
    VEHICLE = "vehicle"
    OBJECT = "object"
    OTHER = "other"


class Origin(str, Enum):
    DEVIATION_ROUTE = "deviation_route"
    MALFUNCTION_ROUTE = "malfunction_route"


class ReviewStatus(str, Enum):
    GENERATED = "generated"
    NOT_HAZARDOUS = "not_hazardous"
    HAZARDOUS = "hazardous"


class TargetKind(str, Enum):
    OTHER_TRAFFIC_PARTICIPANT = "other_traffic_participant"
    PASSENGERS = "passengers"
    INFRASTRUCTURE_LAW = "infrastructure_law"
    OTHER = "other"


@dataclass(frozen=True)
class DeviationClass:
    """One generic externally observable departure from desired behavior.

    ``action`` names the required action whose omission an absence-kind
    class represents; improper-kind classes apply unconditionally and
    carry no action.
    """

    id: str
    axis: Axis
    kind: DeviationKind
    action: str | None
    display_label: str


@dataclass(frozen=True)
class DeviationTaxonomy:
    name: str
    classes: tuple[DeviationClass, ...]

    def class_by_id(self, class_id: str) -> DeviationClass | None:
        for cls in self.classes:
            if cls.id == class_id:
                return cls
        return None

    def absence_class_for_action(self, action: str) -> DeviationClass | None:
        for cls in self.classes:
            if cls.kind is DeviationKind.ABSENCE and cls.action == action:
                return cls
        return None


@dataclass(frozen=True)
class Malfunction:
    """A failure of an item function, mapped to its observable deviation.

    ``maps_to`` may be None while a catalog is being authored; generation
    over the malfunction route refuses unmapped entries.
    """

    id: str
    description: str
    maps_to: str | None
    parent_function: str


@dataclass(frozen=True)
class CatalogFunction:
    name: str
    malfunctions: tuple[Malfunction, ...]


@dataclass(frozen=True)
class MalfunctionCatalog:
    name: str
    functions: tuple[CatalogFunction, ...]

    def all_malfunctions(self) -> Iterator[Malfunction]:
        for fn in self.functions:
            yield from fn.malfunctions


@dataclass(frozen=True)
class Requirement:
    """A per-segment required action, bound to an absence-kind class."""

    action: str
    axis: Axis
    label: str


@dataclass(frozen=True)
class Segment:
    id: str
    scenario: str
    order: int
    requirements: tuple[Requirement, ...]
    desired_behavior: str
    kinematic_params: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Actor:
    id: str
    role: ActorRole
    description: str = ""
    kinematic_params: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class OperationalScenario:
    id: str
    title: str
    odd_tags: dict[str, str] = field(default_factory=dict)
    actors: tuple[Actor, ...] = ()
    segments: tuple[Segment, ...] = ()


@dataclass(frozen=True)
class ReviewState:
    status: ReviewStatus = ReviewStatus.GENERATED
    rationale: str = ""
    reviewer: str = ""
    decided_at: str | None = None
    version: int = 1


@dataclass(frozen=True)
class PotentiallyHazardousScenario:
    """One (segment, deviation) combination awaiting expert evaluation.

    ``deviation`` is the generic class id; for malfunction-route rows it
    is the observable effect of ``source_malfunction``.
    """

    id: str
    segment: str
    origin: Origin
    deviation: str
    instance_label: str
    source_malfunction: str | None = None
    review: ReviewState = field(default_factory=ReviewState)

    def key(self) -> tuple[str, str, str, str]:
        return (self.segment, self.deviation, self.origin.value,
                self.source_malfunction or "")


@dataclass(frozen=True)
class Hazard:
    """A verified hazard: source, target, and initiating mechanism.

    All three legs of the triple must be non-empty; persistence rejects
    anything less.
    """

    id: str
    phs: str
    source: str
    target: str
    initiating_mechanism: str
    description: str = ""
    target_kind: TargetKind = TargetKind.OTHER


@dataclass(frozen=True)
class TraceLink:
    hazard: str
    malfunction: str
    derivation: str = "g_inverse"


@dataclass(frozen=True)
class DecisionRecord:
    """Append-only audit entry for one committed review decision."""

    phs: str
    from_status: ReviewStatus
    to_status: ReviewStatus
    rationale: str
    reviewer: str
    decided_at: str
    version: int


@dataclass
class Project:
    name: str
    taxonomy: DeviationTaxonomy
    catalogs: list[MalfunctionCatalog] = field(default_factory=list)
    scenarios: list[OperationalScenario] = field(default_factory=list)
    phs_set: list[PotentiallyHazardousScenario] = field(default_factory=list)
    hazards: list[Hazard] = field(default_factory=list)
    traces: list[TraceLink] = field(default_factory=list)
    decision_log: list[DecisionRecord] = field(default_factory=list)
    store_version: int = 0

    def segments(self) -> Iterator[Segment]:
        for scenario in self.scenarios:
            yield from scenario.segments

    def segment_by_id(self, segment_id: str) -> Segment | None:
        for segment in self.segments():
            if segment.id == segment_id:
                return segment
        return None

    def scenario_by_id(self, scenario_id: str) -> OperationalScenario | None:
        for scenario in self.scenarios:
            if scenario.id == scenario_id:
                return scenario
        return None

    def phs_by_id(self, phs_id: str) -> PotentiallyHazardousScenario | None:
        for phs in self.phs_set:
            if phs.id == phs_id:
                return phs
        return None

    def hazard_by_id(self, hazard_id: str) -> Hazard | None:
        for hazard in self.hazards:
            if hazard.id == hazard_id:
                return hazard
        return None

    def hazards_for_phs(self, phs_id: str) -> list[Hazard]:
        return [h for h in self.hazards if h.phs == phs_id]

    def all_malfunctions(self) -> Iterator[Malfunction]:
        for catalog in self.catalogs:
            yield from catalog.all_malfunctions()

    def malfunction_by_id(self, malfunction_id: str) -> Malfunction | None:
        for malfunction in self.all_malfunctions():
            if malfunction.id == malfunction_id:
                return malfunction
        return None


DEFAULT_TAXONOMY_NAME = "vehicle-level behavior deviations"

_DEFAULT_CLASSES = (
    ("absence_of_acceleration", Axis.LONGITUDINAL, DeviationKind.ABSENCE,
     "accelerate", "Absence of required acceleration"),
    ("absence_of_deceleration", Axis.LONGITUDINAL, DeviationKind.ABSENCE,
     "decelerate", "Absence of required deceleration"),
    ("absence_of_course_change", Axis.LATERAL, DeviationKind.ABSENCE,
     "change_course", "Absence of required course angle changes"),
    ("improper_acceleration", Axis.LONGITUDINAL, DeviationKind.IMPROPER,
     None, "Improper acceleration"),
    ("improper_deceleration", Axis.LONGITUDINAL, DeviationKind.IMPROPER,
     None, "Improper deceleration"),
    ("improper_course_change", Axis.LATERAL, DeviationKind.IMPROPER,
     None, "Improper course angle changes"),
)


def default_taxonomy() -> DeviationTaxonomy:
    """The built-in six-class taxonomy of longitudinal/lateral deviations."""
    return DeviationTaxonomy(
        name=DEFAULT_TAXONOMY_NAME,
        classes=tuple(
            DeviationClass(id=i, axis=a, kind=k, action=act, display_label=lbl)
            for i, a, k, act, lbl in _DEFAULT_CLASSES
        ),
    )


def slugify(text: str) -> str:
    """Derive a valid identifier from display text.

    Lowercases, collapses every non-alphanumeric run into one underscore,
    and prefixes a letter when the result would not start with one.
    """
    slug = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    if not slug:
        return "x"
    if not slug[0].isalpha():
        slug = "x_" + slug
    return slug


def stable_id(prefix: str, *parts: str) -> str:
    """Content-derived identifier, stable across regenerations."""
    digest = hashlib.sha1("|".join(parts).encode("utf-8")).hexdigest()
    return f"{prefix}-{digest[:12]}"


@dataclass(frozen=True)
class ValidationIssue:
    severity: Severity
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.entity}: {self.message}"


def mapped_deviation_classes(catalog: MalfunctionCatalog,
                             taxonomy: DeviationTaxonomy) -> list[str]:
    """Distinct deviation classes produced by at least one malfunction.

    Order follows first occurrence in the catalog. Raises ModelError on a
    maps_to reference that does not resolve against the taxonomy.
    """
    known = {cls.id for cls in taxonomy.classes}
    image: list[str] = []
    for malfunction in catalog.all_malfunctions():
        target = malfunction.maps_to
        if target is None:
            continue
        if target not in known:
            raise ModelError(
                f"malfunction {malfunction.id!r} maps to unknown deviation "
                f"class {target!r}")
        if target not in image:
            image.append(target)
    return image


def _check_identifier(issues: list[ValidationIssue], entity: str,
                      value: str, what: str) -> None:
    if not IDENTIFIER_RE.match(value):
        issues.append(ValidationIssue(
            Severity.ERROR, entity,
            f"{what} {value!r} is not a valid identifier"))


def _validate_taxonomy(project: Project,
                       issues: list[ValidationIssue]) -> None:
    taxonomy = project.taxonomy
    if not taxonomy.classes:
        issues.append(ValidationIssue(
            Severity.ERROR, taxonomy.name, "taxonomy has no deviation classes"))
    seen_ids: set[str] = set()
    seen_actions: set[str] = set()
    for cls in taxonomy.classes:
        _check_identifier(issues, cls.id, cls.id, "deviation class id")
        if cls.id in seen_ids:
            issues.append(ValidationIssue(
                Severity.ERROR, cls.id, "duplicate deviation class id"))
        seen_ids.add(cls.id)
        if cls.kind is DeviationKind.ABSENCE:
            if not cls.action:
                issues.append(ValidationIssue(
                    Severity.ERROR, cls.id,
                    "absence-kind class must name the required action"))
            else:
                _check_identifier(issues, cls.id, cls.action, "action")
                if cls.action in seen_actions:
                    issues.append(ValidationIssue(
                        Severity.ERROR, cls.id,
                        f"action {cls.action!r} is claimed by more than one "
                        "absence-kind class"))
                seen_actions.add(cls.action)


def _validate_catalogs(project: Project,
                       issues: list[ValidationIssue]) -> None:
    class_ids = {cls.id for cls in project.taxonomy.classes}
    global_seen: dict[str, str] = {}
    for catalog in project.catalogs:
        catalog_seen: set[str] = set()
        for malfunction in catalog.all_malfunctions():
            _check_identifier(issues, malfunction.id, malfunction.id,
                              "malfunction id")
            if malfunction.id in catalog_seen:
                issues.append(ValidationIssue(
                    Severity.ERROR, malfunction.id,
                    f"duplicate malfunction id in catalog {catalog.name!r}"))
            elif malfunction.id in global_seen:
                issues.append(ValidationIssue(
                    Severity.WARNING, malfunction.id,
                    f"malfunction id also appears in catalog "
                    f"{global_seen[malfunction.id]!r}"))
            catalog_seen.add(malfunction.id)
            global_seen.setdefault(malfunction.id, catalog.name)
            if malfunction.maps_to is None:
                issues.append(ValidationIssue(
                    Severity.WARNING, malfunction.id,
                    "malfunction lacks maps_to"))
            elif malfunction.maps_to not in class_ids:
                issues.append(ValidationIssue(
                    Severity.ERROR, malfunction.id,
                    f"maps_to references unknown deviation class "
                    f"{malfunction.maps_to!r}"))


def _validate_scenarios(project: Project,
                        issues: list[ValidationIssue]) -> None:
    taxonomy = project.taxonomy
    seen_scenarios: set[str] = set()
    seen_segments: set[str] = set()
    for scenario in project.scenarios:
        _check_identifier(issues, scenario.id, scenario.id, "scenario id")
        if scenario.id in seen_scenarios:
            issues.append(ValidationIssue(
                Severity.ERROR, scenario.id, "duplicate scenario id"))
        seen_scenarios.add(scenario.id)

        ego_count = sum(1 for a in scenario.actors if a.role is ActorRole.EGO)
        if ego_count != 1:
            issues.append(ValidationIssue(
                Severity.ERROR, scenario.id,
                f"scenario must have exactly one ego actor, found {ego_count}"))
        if not scenario.segments:
            issues.append(ValidationIssue(
                Severity.ERROR, scenario.id, "scenario has no segments"))

        last_order: int | None = None
        for segment in scenario.segments:
            _check_identifier(issues, segment.id, segment.id, "segment id")
            if segment.id in seen_segments:
                issues.append(ValidationIssue(
                    Severity.ERROR, segment.id, "duplicate segment id"))
            seen_segments.add(segment.id)
            if segment.scenario != scenario.id:
                issues.append(ValidationIssue(
                    Severity.ERROR, segment.id,
                    f"segment names scenario {segment.scenario!r} but is "
                    f"declared under {scenario.id!r}"))
            if segment.order < 0:
                issues.append(ValidationIssue(
                    Severity.ERROR, segment.id, "segment order is negative"))
            if last_order is not None and segment.order <= last_order:
                issues.append(ValidationIssue(
                    Severity.ERROR, segment.id,
                    "segment order values must strictly increase within a "
                    "scenario"))
            last_order = segment.order
            if not segment.desired_behavior.strip():
                issues.append(ValidationIssue(
                    Severity.ERROR, segment.id,
                    "segment has no desired behavior"))
            seen_actions: set[str] = set()
            for requirement in segment.requirements:
                if requirement.action in seen_actions:
                    issues.append(ValidationIssue(
                        Severity.ERROR, segment.id,
                        f"duplicate requirement action "
                        f"{requirement.action!r}"))
                seen_actions.add(requirement.action)
                if taxonomy.absence_class_for_action(requirement.action) is None:
                    issues.append(ValidationIssue(
                        Severity.ERROR, segment.id,
                        f"requirement action {requirement.action!r} matches "
                        "no absence-kind deviation class"))


def _validate_phs(project: Project, issues: list[ValidationIssue]) -> None:
    class_ids = {cls.id for cls in project.taxonomy.classes}
    segment_ids = {segment.id for segment in project.segments()}
    malfunction_ids = {m.id for m in project.all_malfunctions()}
    seen_ids: set[str] = set()
    seen_keys: set[tuple[str, str, str, str]] = set()
    for phs in project.phs_set:
        if phs.id in seen_ids:
            issues.append(ValidationIssue(
                Severity.ERROR, phs.id, "duplicate PHS id"))
        seen_ids.add(phs.id)
        key = phs.key()
        if key in seen_keys:
            issues.append(ValidationIssue(
                Severity.ERROR, phs.id,
                "duplicate PHS row for the same segment, deviation, origin "
                "and malfunction"))
        seen_keys.add(key)
        if phs.origin is Origin.DEVIATION_ROUTE and phs.source_malfunction:
            issues.append(ValidationIssue(
                Severity.ERROR, phs.id,
                "deviation-route PHS must not name a source malfunction"))
        if phs.origin is Origin.MALFUNCTION_ROUTE and not phs.source_malfunction:
            issues.append(ValidationIssue(
                Severity.ERROR, phs.id,
                "malfunction-route PHS must name its source malfunction"))
        # Dangling model references mean the PHS is orphaned by a model
        # edit; expert work is kept, so this is reported, not fatal.
        if phs.segment not in segment_ids:
            issues.append(ValidationIssue(
                Severity.WARNING, phs.id,
                f"orphaned: segment {phs.segment!r} no longer exists"))
        if phs.deviation not in class_ids:
            issues.append(ValidationIssue(
                Severity.WARNING, phs.id,
                f"orphaned: deviation class {phs.deviation!r} no longer "
                "exists"))
        if phs.source_malfunction and phs.source_malfunction not in malfunction_ids:
            issues.append(ValidationIssue(
                Severity.WARNING, phs.id,
                f"orphaned: malfunction {phs.source_malfunction!r} no longer "
                "exists"))
        if phs.review.version < 1:
            issues.append(ValidationIssue(
                Severity.ERROR, phs.id, "review version must be >= 1"))
        if (phs.review.status is ReviewStatus.HAZARDOUS
                and not project.hazards_for_phs(phs.id)):
            issues.append(ValidationIssue(
                Severity.WARNING, phs.id,
                "marked hazardous but no hazard has been recorded yet"))
        if (phs.review.status is ReviewStatus.NOT_HAZARDOUS
                and not phs.review.rationale.strip()):
            issues.append(ValidationIssue(
                Severity.ERROR, phs.id,
                "not_hazardous decision lacks a rationale"))


def _validate_hazards(project: Project,
                      issues: list[ValidationIssue]) -> None:
    phs_by_id = {phs.id: phs for phs in project.phs_set}
    seen: set[str] = set()
    for hazard in project.hazards:
        if hazard.id in seen:
            issues.append(ValidationIssue(
                Severity.ERROR, hazard.id, "duplicate hazard id"))
        seen.add(hazard.id)
        for leg, value in (("source", hazard.source),
                           ("target", hazard.target),
                           ("initiating_mechanism",
                            hazard.initiating_mechanism)):
            if not value.strip():
                issues.append(ValidationIssue(
                    Severity.ERROR, hazard.id, f"hazard {leg} is empty"))
        phs = phs_by_id.get(hazard.phs)
        if phs is None:
            issues.append(ValidationIssue(
                Severity.ERROR, hazard.id,
                f"hazard references unknown PHS {hazard.phs!r}"))
        elif phs.review.status is not ReviewStatus.HAZARDOUS:
            issues.append(ValidationIssue(
                Severity.ERROR, hazard.id,
                "hazard is linked to a PHS that is not marked hazardous"))


def _validate_traces(project: Project,
                     issues: list[ValidationIssue]) -> None:
    hazard_by_id = {h.id: h for h in project.hazards}
    phs_by_id = {phs.id: phs for phs in project.phs_set}
    malfunction_by_id = {m.id: m for m in project.all_malfunctions()}
    for trace in project.traces:
        hazard = hazard_by_id.get(trace.hazard)
        if hazard is None:
            issues.append(ValidationIssue(
                Severity.ERROR, trace.hazard,
                "trace link references unknown hazard"))
            continue
        malfunction = malfunction_by_id.get(trace.malfunction)
        if malfunction is None:
            issues.append(ValidationIssue(
                Severity.WARNING, trace.hazard,
                f"stale trace link: malfunction {trace.malfunction!r} no "
                "longer exists"))
            continue
        phs = phs_by_id.get(hazard.phs)
        if phs is not None and malfunction.maps_to != phs.deviation:
            issues.append(ValidationIssue(
                Severity.ERROR, trace.hazard,
                f"trace link to {trace.malfunction!r} does not match the "
                f"hazard's deviation class {phs.deviation!r}"))


def _validate_image_coverage(project: Project,
                             issues: list[ValidationIssue]) -> None:
    # A deviation class no malfunction maps to is legal (behavioral-safety
    # deviations exist without a functional cause) and purely informational.
    # Without any catalog there is nothing to compare against.
    if not project.catalogs:
        return
    image: set[str] = set()
    for catalog in project.catalogs:
        for malfunction in catalog.all_malfunctions():
            if malfunction.maps_to:
                image.add(malfunction.maps_to)
    for cls in project.taxonomy.classes:
        if cls.id not in image:
            issues.append(ValidationIssue(
                Severity.WARNING, cls.id,
                "no cataloged malfunction maps to this deviation class"))


def validate_project(project: Project) -> list[ValidationIssue]:
    """Check every model invariant; pure and idempotent.

    Errors mark states the engine refuses to operate on; warnings mark
    legal-but-noteworthy states (staged authoring, orphaned review rows,
    deviation classes without a mapped malfunction).
    """
    issues: list[ValidationIssue] = []
    _validate_taxonomy(project, issues)
    _validate_catalogs(project, issues)
    _validate_scenarios(project, issues)
    _validate_phs(project, issues)
    _validate_hazards(project, issues)
    _validate_traces(project, issues)
    _validate_image_coverage(project, issues)
    return issues


def errors_only(issues: list[ValidationIssue]) -> list[ValidationIssue]:
    return [i for i in issues if i.severity is Severity.ERROR]


# --- canonical JSON serialization -------------------------------------------

def _class_to_dict(cls: DeviationClass) -> dict[str, Any]:
    return {
        "id": cls.id,
        "axis": cls.axis.value,
        "kind": cls.kind.value,
        "action": cls.action,
        "display_label": cls.display_label,
    }


def _taxonomy_to_dict(taxonomy: DeviationTaxonomy) -> dict[str, Any]:
    return {
        "name": taxonomy.name,
        "classes": [_class_to_dict(c) for c in taxonomy.classes],
    }


def _catalog_to_dict(catalog: MalfunctionCatalog) -> dict[str, Any]:
    return {
        "name": catalog.name,
        "functions": [
            {
                "name": fn.name,
                "malfunctions": [
                    {
                        "id": m.id,
                        "description": m.description,
                        "maps_to": m.maps_to,
                        "parent_function": m.parent_function,
                    }
                    for m in fn.malfunctions
                ],
            }
            for fn in catalog.functions
        ],
    }


def _scenario_to_dict(scenario: OperationalScenario) -> dict[str, Any]:
    return {
        "id": scenario.id,
        "title": scenario.title,
        "odd_tags": dict(scenario.odd_tags),
        "actors": [
            {
                "id": a.id,
                "role": a.role.value,
                "description": a.description,
                "kinematic_params": dict(a.kinematic_params),
            }
            for a in scenario.actors
        ],
        "segments": [
            {
                "id": s.id,
                "scenario": s.scenario,
                "order": s.order,
                "requirements": [
                    {"action": r.action, "axis": r.axis.value, "label": r.label}
                    for r in s.requirements
                ],
                "desired_behavior": s.desired_behavior,
                "kinematic_params": dict(s.kinematic_params),
            }
            for s in scenario.segments
        ],
    }


def review_to_dict(review: ReviewState) -> dict[str, Any]:
    return {
        "status": review.status.value,
        "rationale": review.rationale,
        "reviewer": review.reviewer,
        "decided_at": review.decided_at,
        "version": review.version,
    }


def phs_to_dict(phs: PotentiallyHazardousScenario) -> dict[str, Any]:
    return {
        "id": phs.id,
        "segment": phs.segment,
        "origin": phs.origin.value,
        "deviation": phs.deviation,
        "instance_label": phs.instance_label,
        "source_malfunction": phs.source_malfunction,
        "review": review_to_dict(phs.review),
    }


def hazard_to_dict(hazard: Hazard) -> dict[str, Any]:
    return {
        "id": hazard.id,
        "phs": hazard.phs,
        "source": hazard.source,
        "target": hazard.target,
        "initiating_mechanism": hazard.initiating_mechanism,
        "description": hazard.description,
        "target_kind": hazard.target_kind.value,
    }


def trace_to_dict(trace: TraceLink) -> dict[str, Any]:
    return {
        "hazard": trace.hazard,
        "malfunction": trace.malfunction,
        "derivation": trace.derivation,
    }


def project_to_dict(project: Project) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": project.name,
        "store_version": project.store_version,
        "taxonomy": _taxonomy_to_dict(project.taxonomy),
        "catalogs": [_catalog_to_dict(c) for c in project.catalogs],
        "scenarios": [_scenario_to_dict(s) for s in project.scenarios],
        "phs": [phs_to_dict(p) for p in project.phs_set],
        "hazards": [hazard_to_dict(h) for h in project.hazards],
        "traces": [trace_to_dict(t) for t in project.traces],
        "decision_log": [
            {
                "phs": d.phs,
                "from_status": d.from_status.value,
                "to_status": d.to_status.value,
                "rationale": d.rationale,
                "reviewer": d.reviewer,
                "decided_at": d.decided_at,
                "version": d.version,
            }
            for d in project.decision_log
        ],
    }


def project_to_json(project: Project) -> str:
    return json.dumps(project_to_dict(project), indent=2,
                      ensure_ascii=False) + "\n"


def _need(data: dict[str, Any], key: str, where: str) -> Any:
    if key not in data:
        raise ModelError(f"{where}: missing key {key!r}")
    return data[key]


def _enum(enum_cls: type, value: Any, where: str) -> Any:
    try:
        return enum_cls(value)
    except ValueError as exc:
        raise ModelError(f"{where}: {exc}") from None


def _class_from_dict(data: dict[str, Any]) -> DeviationClass:
    return DeviationClass(
        id=_need(data, "id", "deviation class"),
        axis=_enum(Axis, _need(data, "axis", "deviation class"),
                   "deviation class"),
        kind=_enum(DeviationKind, _need(data, "kind", "deviation class"),
                   "deviation class"),
        action=data.get("action"),
        display_label=data.get("display_label", ""),
    )


def _taxonomy_from_dict(data: dict[str, Any]) -> DeviationTaxonomy:
    return DeviationTaxonomy(
        name=_need(data, "name", "taxonomy"),
        classes=tuple(_class_from_dict(c)
                      for c in _need(data, "classes", "taxonomy")),
    )


def _catalog_from_dict(data: dict[str, Any]) -> MalfunctionCatalog:
    return MalfunctionCatalog(
        name=_need(data, "name", "catalog"),
        functions=tuple(
            CatalogFunction(
                name=_need(fn, "name", "catalog function"),
                malfunctions=tuple(
                    Malfunction(
                        id=_need(m, "id", "malfunction"),
                        description=m.get("description", ""),
                        maps_to=m.get("maps_to"),
                        parent_function=m.get("parent_function", ""),
                    )
                    for m in fn.get("malfunctions", [])
                ),
            )
            for fn in data.get("functions", [])
        ),
    )


def _scenario_from_dict(data: dict[str, Any]) -> OperationalScenario:
    scenario_id = _need(data, "id", "scenario")
    return OperationalScenario(
        id=scenario_id,
        title=data.get("title", scenario_id),
        odd_tags={str(k): str(v) for k, v in data.get("odd_tags", {}).items()},
        actors=tuple(
            Actor(
                id=_need(a, "id", "actor"),
                role=_enum(ActorRole, a.get("role", "other"), "actor"),
                description=a.get("description", ""),
                kinematic_params={str(k): str(v) for k, v in
                                  a.get("kinematic_params", {}).items()},
            )
            for a in data.get("actors", [])
        ),
        segments=tuple(
            Segment(
                id=_need(s, "id", "segment"),
                scenario=s.get("scenario", scenario_id),
                order=int(_need(s, "order", "segment")),
                requirements=tuple(
                    Requirement(
                        action=_need(r, "action", "requirement"),
                        axis=_enum(Axis, r.get("axis", "longitudinal"),
                                   "requirement"),
                        label=r.get("label", ""),
                    )
                    for r in s.get("requirements", [])
                ),
                desired_behavior=s.get("desired_behavior", ""),
                kinematic_params={str(k): str(v) for k, v in
                                  s.get("kinematic_params", {}).items()},
            )
            for s in data.get("segments", [])
        ),
    )


def _review_from_dict(data: dict[str, Any]) -> ReviewState:
    return ReviewState(
        status=_enum(ReviewStatus, data.get("status", "generated"), "review"),
        rationale=data.get("rationale", ""),
        reviewer=data.get("reviewer", ""),
        decided_at=data.get("decided_at"),
        version=int(data.get("version", 1)),
    )


def project_from_dict(data: dict[str, Any]) -> Project:
    schema = data.get("schema_version")
    if schema != SCHEMA_VERSION:
        raise ModelError(f"unsupported project schema_version {schema!r}")
    return Project(
        name=_need(data, "name", "project"),
        taxonomy=_taxonomy_from_dict(_need(data, "taxonomy", "project")),
        catalogs=[_catalog_from_dict(c) for c in data.get("catalogs", [])],
        scenarios=[_scenario_from_dict(s) for s in data.get("scenarios", [])],
        phs_set=[
            PotentiallyHazardousScenario(
                id=_need(p, "id", "phs"),
                segment=_need(p, "segment", "phs"),
                origin=_enum(Origin, _need(p, "origin", "phs"), "phs"),
                deviation=_need(p, "deviation", "phs"),
                instance_label=p.get("instance_label", ""),
                source_malfunction=p.get("source_malfunction"),
                review=_review_from_dict(p.get("review", {})),
            )
            for p in data.get("phs", [])
        ],
        hazards=[
            Hazard(
                id=_need(h, "id", "hazard"),
                phs=_need(h, "phs", "hazard"),
                source=h.get("source", ""),
                target=h.get("target", ""),
                initiating_mechanism=h.get("initiating_mechanism", ""),
                description=h.get("description", ""),
                target_kind=_enum(TargetKind, h.get("target_kind", "other"),
                                  "hazard"),
            )
            for h in data.get("hazards", [])
        ],
        traces=[
            TraceLink(
                hazard=_need(t, "hazard", "trace"),
                malfunction=_need(t, "malfunction", "trace"),
                derivation=t.get("derivation", "g_inverse"),
            )
            for t in data.get("traces", [])
        ],
        decision_log=[
            DecisionRecord(
                phs=_need(d, "phs", "decision"),
                from_status=_enum(ReviewStatus,
                                  _need(d, "from_status", "decision"),
                                  "decision"),
                to_status=_enum(ReviewStatus,
                                _need(d, "to_status", "decision"),
                                "decision"),
                rationale=d.get("rationale", ""),
                reviewer=d.get("reviewer", ""),
                decided_at=d.get("decided_at", ""),
                version=int(d.get("version", 0)),
            )
            for d in data.get("decision_log", [])
        ],
        store_version=int(data.get("store_version", 0)),
    )


def project_from_json(text: str) -> Project:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"project document is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ModelError("project document root must be a JSON object")
    return project_from_dict(data)


__all__ = [
    "Actor", "ActorRole", "Axis", "CatalogFunction", "DecisionRecord",
    "DeviationClass", "DeviationKind", "DeviationTaxonomy", "Hazard",
    "HazlabError", "MalfunctionCatalog", "Malfunction", "ModelError",
    "OperationalScenario", "Origin", "PotentiallyHazardousScenario",
    "Project", "Requirement", "ReviewState", "ReviewStatus", "SCHEMA_VERSION",
    "Segment", "Severity", "TargetKind", "TraceLink", "ValidationIssue",
    "default_taxonomy", "errors_only", "hazard_to_dict",
    "mapped_deviation_classes", "trace_to_dict",
    "phs_to_dict", "project_from_dict", "project_from_json", "project_to_dict",
    "project_to_json", "review_to_dict", "slugify", "stable_id", "validate_project",
]
