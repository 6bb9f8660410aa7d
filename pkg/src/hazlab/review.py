"""Expert triage over generated rows: decisions, hazards, traceability.

Every mutation here operates on a working project instance handed in by
the store, which owns locking, version bumps and persistence. Functions
raise instead of returning error values; the store turns a raise into a
rolled-back transaction and the API maps the exception type to a status
code.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Any

from hazlab.generate import (
    GenerationError,
    StrategyComparison,
    compare_strategies,
)
from hazlab.lang.diagnostics import Diagnostic, Span, error, warning
from hazlab.model import (
    Hazard,
    HazlabError,
    MalfunctionCatalog,
    Origin,
    Project,
    PotentiallyHazardousScenario,
    DecisionRecord,
    ReviewState,
    ReviewStatus,
    TargetKind,
    TraceLink,
    stable_id,
)

WORKSHEET_HEADER = ("phs_id", "scenario", "segment", "deviation", "origin",
                    "status", "rationale", "hazards")


class NotFoundError(HazlabError):
    """The referenced record does not exist."""


class RejectedError(HazlabError):
    """The command violates a review rule."""


class VersionConflictError(HazlabError):
    """Optimistic-concurrency check failed; carries the current state."""

    def __init__(self, phs_id: str, current: ReviewState) -> None:
        super().__init__(
            f"version conflict on {phs_id}: expected version does not match "
            f"current version {current.version}")
        self.phs_id = phs_id
        self.current = current


@dataclass(frozen=True)
class DecisionCommand:
    phs: str
    new_status: ReviewStatus
    rationale: str = ""
    reviewer: str = ""
    expected_version: int = 1


def record_decision(project: Project, cmd: DecisionCommand, *,
                    now: str) -> ReviewState:
    """Apply one triage decision under optimistic concurrency."""
    target = project.phs_by_id(cmd.phs)
    if target is None:
        raise NotFoundError(f"no PHS with id {cmd.phs!r}")
    current = target.review
    if cmd.expected_version != current.version:
        raise VersionConflictError(cmd.phs, current)
    if cmd.new_status not in (ReviewStatus.NOT_HAZARDOUS,
                              ReviewStatus.HAZARDOUS):
        raise RejectedError(
            f"a decision must set not_hazardous or hazardous, not "
            f"{cmd.new_status.value}")
    if cmd.new_status is current.status:
        raise RejectedError(
            f"PHS {cmd.phs} already has status {current.status.value}")
    if (cmd.new_status is ReviewStatus.NOT_HAZARDOUS
            and not cmd.rationale.strip()):
        raise RejectedError(
            "a not_hazardous decision requires a rationale")
    if (current.status is ReviewStatus.HAZARDOUS
            and cmd.new_status is ReviewStatus.NOT_HAZARDOUS
            and project.hazards_for_phs(cmd.phs)):
        raise RejectedError(
            f"PHS {cmd.phs} still has hazards linked; remove them before "
            "reversing the decision")

    updated = ReviewState(
        status=cmd.new_status,
        rationale=cmd.rationale,
        reviewer=cmd.reviewer,
        decided_at=now,
        version=current.version + 1,
    )
    for index, row in enumerate(project.phs_set):
        if row.id == cmd.phs:
            project.phs_set[index] = replace(row, review=updated)
            break
    project.decision_log.append(DecisionRecord(
        phs=cmd.phs,
        from_status=current.status,
        to_status=cmd.new_status,
        rationale=cmd.rationale,
        reviewer=cmd.reviewer,
        decided_at=now,
        version=updated.version,
    ))
    return updated


def create_hazard(project: Project, phs_id: str, source: str, target: str,
                  initiating_mechanism: str, description: str = "",
                  target_kind: TargetKind = TargetKind.OTHER) -> Hazard:
    """Record a verified hazard on a hazardous PHS.

    All three triple legs must be non-empty after trimming. Creation is
    idempotent: an identical hazard returns the existing record.
    """
    row = project.phs_by_id(phs_id)
    if row is None:
        raise NotFoundError(f"no PHS with id {phs_id!r}")
    if row.review.status is not ReviewStatus.HAZARDOUS:
        raise RejectedError(
            f"PHS {phs_id} is {row.review.status.value}; hazards can only "
            "be recorded on a hazardous PHS")
    legs = {
        "source": source.strip(),
        "target": target.strip(),
        "initiating_mechanism": initiating_mechanism.strip(),
    }
    for leg, value in legs.items():
        if not value:
            raise RejectedError(f"{leg} empty")
    hazard = Hazard(
        id=stable_id("hz", phs_id, legs["source"], legs["target"],
                     legs["initiating_mechanism"], description,
                     target_kind.value),
        phs=phs_id,
        source=legs["source"],
        target=legs["target"],
        initiating_mechanism=legs["initiating_mechanism"],
        description=description,
        target_kind=target_kind,
    )
    existing = project.hazard_by_id(hazard.id)
    if existing is not None:
        return existing
    project.hazards.append(hazard)
    return hazard


def trace_malfunctions(project: Project, hazard_id: str,
                       catalog: MalfunctionCatalog) -> list[TraceLink]:
    """Link a hazard back to every malfunction with its observable class.

    Replaces the hazard's previous link set, so repeat calls are
    idempotent and links self-repair after catalog edits.
    """
    hazard = project.hazard_by_id(hazard_id)
    if hazard is None:
        raise NotFoundError(f"no hazard with id {hazard_id!r}")
    row = project.phs_by_id(hazard.phs)
    if row is None:
        raise NotFoundError(
            f"hazard {hazard_id} references missing PHS {hazard.phs!r}")
    links = [
        TraceLink(hazard=hazard_id, malfunction=malfunction.id)
        for malfunction in catalog.all_malfunctions()
        if malfunction.maps_to == row.deviation
    ]
    project.traces = [t for t in project.traces if t.hazard != hazard_id]
    project.traces.extend(links)
    return links


def orphaned_phs_ids(project: Project) -> list[str]:
    """Rows whose model references no longer resolve; kept, not deleted."""
    segment_ids = {segment.id for segment in project.segments()}
    class_ids = {cls.id for cls in project.taxonomy.classes}
    malfunction_ids = {m.id for m in project.all_malfunctions()}
    orphaned: list[str] = []
    for row in project.phs_set:
        if (row.segment not in segment_ids
                or row.deviation not in class_ids
                or (row.source_malfunction
                    and row.source_malfunction not in malfunction_ids)):
            orphaned.append(row.id)
    return orphaned


# --- worksheet export / import ----------------------------------------------

def _scenario_title_by_segment(project: Project) -> dict[str, str]:
    titles: dict[str, str] = {}
    for scenario in project.scenarios:
        for segment in scenario.segments:
            titles[segment.id] = scenario.title
    return titles


def _worksheet_rows(project: Project) -> list[dict[str, Any]]:
    titles = _scenario_title_by_segment(project)
    rows: list[dict[str, Any]] = []
    for row in project.phs_set:
        rows.append({
            "phs_id": row.id,
            "scenario": titles.get(row.segment, ""),
            "segment": row.segment,
            "deviation": row.instance_label,
            "origin": row.origin.value,
            "status": row.review.status.value,
            "rationale": row.review.rationale,
            "hazards": [h.id for h in project.hazards_for_phs(row.id)],
        })
    return rows


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ',"\n\r'):
        return '"' + value.replace('"', '""') + '"'
    return value


def export_worksheet(project: Project, format: str = "csv") -> str:
    """Serialize the review sheet; row order is generation order."""
    rows = _worksheet_rows(project)
    if format == "json":
        return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"
    if format != "csv":
        raise ValueError(f"unknown worksheet format {format!r}")
    lines = [",".join(WORKSHEET_HEADER)]
    for row in rows:
        fields = [
            row["phs_id"], row["scenario"], row["segment"], row["deviation"],
            row["origin"], row["status"], row["rationale"],
            ";".join(row["hazards"]),
        ]
        lines.append(",".join(_csv_field(field) for field in fields))
    return "\n".join(lines) + "\n"


@dataclass
class _ImportRow:
    line: int
    phs_id: str
    status: ReviewStatus
    rationale: str
    hazards: list[Any] = field(default_factory=list)


def _parse_csv_worksheet(document: str,
                         diagnostics: list[Diagnostic]) -> list[_ImportRow]:
    reader = csv.reader(io.StringIO(document))
    rows: list[_ImportRow] = []
    header: list[str] | None = None
    for number, record in enumerate(reader, start=1):
        if header is None:
            header = record
            if tuple(record) != WORKSHEET_HEADER:
                diagnostics.append(error(
                    "E040",
                    "worksheet header must be exactly "
                    + ",".join(WORKSHEET_HEADER),
                    Span(number, 1, 0), "<worksheet>"))
            continue
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if len(record) != len(WORKSHEET_HEADER):
            diagnostics.append(error(
                "E040",
                f"expected {len(WORKSHEET_HEADER)} fields, found "
                f"{len(record)}",
                Span(number, 1, 0), "<worksheet>"))
            continue
        data = dict(zip(WORKSHEET_HEADER, record))
        status = _parse_status(data["status"], number, diagnostics)
        if status is None:
            continue
        hazards = [h for h in data["hazards"].split(";") if h]
        rows.append(_ImportRow(number, data["phs_id"], status,
                               data["rationale"], hazards))
    if header is None:
        diagnostics.append(error(
            "E040", "worksheet is empty", Span(1, 1, 0), "<worksheet>"))
    return rows


def _parse_status(text: str, line: int,
                  diagnostics: list[Diagnostic]) -> ReviewStatus | None:
    try:
        return ReviewStatus(text)
    except ValueError:
        diagnostics.append(error(
            "E041", f"unknown status {text!r}", Span(line, 1, 0),
            "<worksheet>"))
        return None


def _parse_json_worksheet(document: str,
                          diagnostics: list[Diagnostic]) -> list[_ImportRow]:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        diagnostics.append(error(
            "E040", f"worksheet is not valid JSON: {exc}",
            Span(max(exc.lineno, 1), max(exc.colno, 1), 0), "<worksheet>"))
        return []
    if not isinstance(data, list):
        diagnostics.append(error(
            "E040", "worksheet JSON must be an array of row objects",
            Span(1, 1, 0), "<worksheet>"))
        return []
    rows: list[_ImportRow] = []
    for index, item in enumerate(data, start=1):
        if not isinstance(item, dict):
            diagnostics.append(error(
                "E040", f"row {index} is not an object", Span(index, 1, 0),
                "<worksheet>"))
            continue
        phs_id = item.get("phs_id")
        if not isinstance(phs_id, str) or not phs_id:
            diagnostics.append(error(
                "E041", f"row {index} lacks a phs_id", Span(index, 1, 0),
                "<worksheet>"))
            continue
        status = _parse_status(str(item.get("status", "")), index,
                               diagnostics)
        if status is None:
            continue
        hazards = item.get("hazards", [])
        if isinstance(hazards, str):
            hazards = [h for h in hazards.split(";") if h]
        if not isinstance(hazards, list):
            diagnostics.append(error(
                "E041", f"row {index} hazards must be a list",
                Span(index, 1, 0), "<worksheet>"))
            continue
        rows.append(_ImportRow(index, phs_id,
                               status, str(item.get("rationale", "")),
                               list(hazards)))
    return rows


def import_decisions(project: Project, document: str, *, now: str,
                     format: str | None = None,
                     reviewer: str = "import"
                     ) -> tuple[int, list[Diagnostic]]:
    """Replay worksheet decisions onto the project.

    Parsing is all-or-nothing: any malformed row rejects the whole
    document with zero rows applied. Application is row-wise: unknown
    ids and rule violations demote to warnings, rows already in the
    target state are skipped, and embedded hazard objects are created
    after their row's decision lands.
    """
    diagnostics: list[Diagnostic] = []
    if format is None:
        format = "json" if document.lstrip().startswith(("[", "{")) else "csv"
    if format == "csv":
        rows = _parse_csv_worksheet(document, diagnostics)
    elif format == "json":
        rows = _parse_json_worksheet(document, diagnostics)
    else:
        raise ValueError(f"unknown worksheet format {format!r}")
    if any(d.severity.value == "error" for d in diagnostics):
        return 0, diagnostics

    applied = 0
    for row in rows:
        target = project.phs_by_id(row.phs_id)
        if target is None:
            diagnostics.append(warning(
                "W040", f"unknown phs id {row.phs_id!r}; row skipped",
                Span(row.line, 1, 0), "<worksheet>"))
            continue
        if row.status is ReviewStatus.GENERATED:
            continue
        state = target.review
        if (row.status is state.status
                and row.rationale == state.rationale):
            pass
        else:
            cmd = DecisionCommand(
                phs=row.phs_id,
                new_status=row.status,
                rationale=row.rationale,
                reviewer=reviewer,
                expected_version=state.version,
            )
            try:
                record_decision(project, cmd, now=now)
            except RejectedError as exc:
                diagnostics.append(warning(
                    "W041", f"row skipped: {exc}", Span(row.line, 1, 0),
                    "<worksheet>"))
                continue
            applied += 1
        for entry in row.hazards:
            if not isinstance(entry, dict):
                continue
            try:
                create_hazard(
                    project,
                    row.phs_id,
                    source=str(entry.get("source", "")),
                    target=str(entry.get("target", "")),
                    initiating_mechanism=str(
                        entry.get("initiating_mechanism", "")),
                    description=str(entry.get("description", "")),
                    target_kind=TargetKind(
                        entry.get("target_kind", "other")),
                )
            except (HazlabError, ValueError) as exc:
                diagnostics.append(warning(
                    "W041", f"hazard skipped: {exc}", Span(row.line, 1, 0),
                    "<worksheet>"))
    return applied, diagnostics


# --- summary report ----------------------------------------------------------

@dataclass(frozen=True)
class SummaryReport:
    project: str
    store_version: int
    status_counts: dict[str, int]
    hazards_by_target: dict[str, int]
    scenario_deviations: dict[str, list[str]]
    orphaned: list[str]
    total_phs: int
    total_hazards: int
    total_traces: int
    decisions_recorded: int
    comparisons: dict[str, StrategyComparison]

    def to_dict(self) -> dict[str, Any]:
        return {
            "project": self.project,
            "store_version": self.store_version,
            "status_counts": dict(self.status_counts),
            "hazards_by_target": dict(self.hazards_by_target),
            "scenario_deviations": {
                k: list(v) for k, v in self.scenario_deviations.items()
            },
            "orphaned": list(self.orphaned),
            "total_phs": self.total_phs,
            "total_hazards": self.total_hazards,
            "total_traces": self.total_traces,
            "decisions_recorded": self.decisions_recorded,
            "comparisons": {
                name: comparison.to_dict()
                for name, comparison in self.comparisons.items()
            },
        }


def summary_report(project: Project) -> SummaryReport:
    """Aggregate triage progress, hazard spread and strategy figures."""
    status_counts = {status.value: 0 for status in ReviewStatus}
    for row in project.phs_set:
        status_counts[row.review.status.value] += 1

    hazards_by_target = {kind.value: 0 for kind in TargetKind}
    for hazard in project.hazards:
        hazards_by_target[hazard.target_kind.value] += 1

    scenario_of_segment = {
        segment.id: scenario.id
        for scenario in project.scenarios
        for segment in scenario.segments
    }
    scenario_deviations: dict[str, list[str]] = {
        scenario.id: [] for scenario in project.scenarios
    }
    for row in project.phs_set:
        scenario_id = scenario_of_segment.get(row.segment)
        if scenario_id is None:
            continue
        labels = scenario_deviations[scenario_id]
        if row.instance_label not in labels:
            labels.append(row.instance_label)

    comparisons: dict[str, StrategyComparison] = {}
    for catalog in project.catalogs:
        try:
            comparisons[catalog.name] = compare_strategies(project, catalog)
        except GenerationError:
            # A malformed model never blocks the report; the comparison
            # panel is simply absent for that catalog.
            continue

    return SummaryReport(
        project=project.name,
        store_version=project.store_version,
        status_counts=status_counts,
        hazards_by_target=hazards_by_target,
        scenario_deviations=scenario_deviations,
        orphaned=orphaned_phs_ids(project),
        total_phs=len(project.phs_set),
        total_hazards=len(project.hazards),
        total_traces=len(project.traces),
        decisions_recorded=len(project.decision_log),
        comparisons=comparisons,
    )
