"""Persistent single-writer project store.

One project lives in one pretty-printed JSON document. All mutations run
inside the store lock against a private working copy and become visible
only after an atomic write (temp file + rename), so readers always see a
committed document and a crash mid-write leaves the previous state
intact. The store version increments by exactly one per committed
transaction.
"""

from __future__ import annotations

import os
import threading
from dataclasses import replace
from pathlib import Path
from typing import Callable, TypeVar

from hazlab.generate import (
    Origin,
    find_catalog,
    generate_deviation_route,
    generate_malfunction_route,
    merge_regenerated,
)
from hazlab.lang.diagnostics import Diagnostic, has_errors
from hazlab.model import (
    Hazard,
    HazlabError,
    Project,
    ReviewState,
    TargetKind,
    TraceLink,
    project_from_json,
    project_to_json,
)
from hazlab.review import (
    DecisionCommand,
    SummaryReport,
    create_hazard,
    export_worksheet,
    import_decisions,
    record_decision,
    summary_report,
    trace_malfunctions,
)

T = TypeVar("T")

PROJECT_SUFFIX = ".hazproj.json"


def default_clock() -> str:
    """UTC timestamp, overridable via HAZLAB_NOW for reproducible runs."""
    fixed = os.environ.get("HAZLAB_NOW")
    if fixed:
        return fixed
    from datetime import datetime, timezone
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class StoreError(HazlabError):
    """The project file is missing, unreadable or malformed."""


class _ImportAborted(Exception):
    """Internal: rolls back an import whose worksheet failed to parse."""


class ProjectStore:
    """Owns one project document; linearizes every mutation."""

    def __init__(self, path: str | Path, *,
                 clock: Callable[[], str] = default_clock) -> None:
        self.path = Path(path)
        self.clock = clock
        self._lock = threading.Lock()
        if not self.path.exists():
            raise StoreError(f"project file not found: {self.path}")
        try:
            self._project = project_from_json(
                self.path.read_text(encoding="utf-8"))
        except HazlabError as exc:
            raise StoreError(f"cannot load {self.path}: {exc}") from exc

    @classmethod
    def create(cls, path: str | Path, project: Project, *,
               overwrite: bool = False,
               clock: Callable[[], str] = default_clock) -> "ProjectStore":
        path = Path(path)
        if path.exists() and not overwrite:
            raise StoreError(f"project file already exists: {path}")
        path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(path, project_to_json(project))
        return cls(path, clock=clock)

    # --- reads ---

    def snapshot(self) -> Project:
        """Committed state; safe to read concurrently with writers."""
        with self._lock:
            return _copy_project(self._project)

    def export(self, format: str = "csv") -> str:
        return export_worksheet(self.snapshot(), format)

    def summary(self) -> SummaryReport:
        return summary_report(self.snapshot())

    # --- transactional mutations ---

    def mutate(self, fn: Callable[[Project], T]) -> T:
        """Run fn against a working copy; commit only if it returns.

        Any exception from fn aborts the transaction with the committed
        state untouched.
        """
        with self._lock:
            working = _copy_project(self._project)
            result = fn(working)
            working.store_version += 1
            _atomic_write(self.path, project_to_json(working))
            self._project = working
            return result

    def record_decision(self, cmd: DecisionCommand) -> ReviewState:
        now = self.clock()
        return self.mutate(lambda p: record_decision(p, cmd, now=now))

    def create_hazard(self, phs_id: str, source: str, target: str,
                      initiating_mechanism: str, description: str = "",
                      target_kind: TargetKind = TargetKind.OTHER) -> Hazard:
        return self.mutate(lambda p: create_hazard(
            p, phs_id, source, target, initiating_mechanism, description,
            target_kind))

    def trace_malfunctions(self, hazard_id: str,
                           catalog_name: str | None = None
                           ) -> list[TraceLink]:
        def run(project: Project) -> list[TraceLink]:
            catalog = find_catalog(project, catalog_name)
            return trace_malfunctions(project, hazard_id, catalog)
        return self.mutate(run)

    def import_decisions(self, document: str, *,
                         format: str | None = None,
                         reviewer: str = "import"
                         ) -> tuple[int, list[Diagnostic]]:
        now = self.clock()
        failed: list[tuple[int, list[Diagnostic]]] = []

        def run(project: Project) -> tuple[int, list[Diagnostic]]:
            outcome = import_decisions(
                project, document, now=now, format=format, reviewer=reviewer)
            if has_errors(outcome[1]):
                # unparseable worksheet: report without committing
                failed.append(outcome)
                raise _ImportAborted()
            return outcome

        try:
            return self.mutate(run)
        except _ImportAborted:
            return failed[0]

    def regenerate(self, strategy: str = "deviation",
                   catalog_name: str | None = None) -> dict[str, int]:
        """Run one or both generation strategies as one transaction."""
        def run(project: Project) -> dict[str, int]:
            counts: dict[str, int] = {}
            if strategy in ("deviation", "both"):
                fresh = generate_deviation_route(project)
                project.phs_set = merge_regenerated(
                    project.phs_set, fresh, Origin.DEVIATION_ROUTE)
                counts["deviation_route"] = len(fresh)
            if strategy in ("malfunction", "both"):
                catalog = find_catalog(project, catalog_name)
                fresh = generate_malfunction_route(project, catalog)
                project.phs_set = merge_regenerated(
                    project.phs_set, fresh, Origin.MALFUNCTION_ROUTE)
                counts["malfunction_route"] = len(fresh)
            if not counts:
                raise ValueError(f"unknown strategy {strategy!r}")
            return counts
        return self.mutate(run)


def _copy_project(project: Project) -> Project:
    # Element types are frozen; fresh list containers are all a working
    # copy needs for isolation.
    return replace(
        project,
        catalogs=list(project.catalogs),
        scenarios=list(project.scenarios),
        phs_set=list(project.phs_set),
        hazards=list(project.hazards),
        traces=list(project.traces),
        decision_log=list(project.decision_log),
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)
