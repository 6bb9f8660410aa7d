"""Lowering from syntax trees to domain model objects.

Resolves every cross-reference (required actions to absence-kind
classes, maps_to targets to class ids), assigns segment ordering,
injects the built-in taxonomy when a model declares none, and
synthesizes the ego actor for scenarios that leave it implicit. The
produced project passes full validation whenever lowering reports no
error diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from hazlab.lang.ast import (
    ActorDecl,
    CatalogDecl,
    DesiredStmt,
    DeviationDecl,
    KeyValue,
    RequireStmt,
    ScenarioDecl,
    SegmentDecl,
    SourceTree,
    TaxonomyDecl,
    ValueNode,
)
from hazlab.lang.diagnostics import Diagnostic, error, has_errors
from hazlab.lang.parser import parse
from hazlab.model import (
    Actor,
    ActorRole,
    Axis,
    CatalogFunction,
    DeviationClass,
    DeviationKind,
    DeviationTaxonomy,
    Malfunction,
    MalfunctionCatalog,
    OperationalScenario,
    Project,
    Requirement,
    Segment,
    default_taxonomy,
    slugify,
)


@dataclass
class LowerResult:
    project: Project | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.project is not None


def _humanize(identifier: str) -> str:
    return identifier.replace("_", " ").capitalize()


def _render_value(value: ValueNode) -> str:
    if value.kind == "number" and value.unit:
        return f"{value.text} {value.unit}"
    return value.text


class _Lowerer:
    def __init__(self, path: str) -> None:
        self.path = path
        self.diagnostics: list[Diagnostic] = []

    def error(self, code: str, message: str, node) -> None:
        self.diagnostics.append(error(code, message, node.span, self.path))

    def taxonomy_from_decl(self, decl: TaxonomyDecl) -> DeviationTaxonomy:
        classes: list[DeviationClass] = []
        for deviation in decl.deviations:
            if deviation.kind == "absence" and deviation.action is None:
                self.error("E030",
                           f"absence-kind deviation class {deviation.name!r} "
                           "declares no action", deviation)
            label = (deviation.label if deviation.label is not None
                     else _humanize(deviation.name))
            classes.append(DeviationClass(
                id=deviation.name,
                axis=Axis(deviation.axis),
                kind=DeviationKind(deviation.kind),
                action=deviation.action,
                display_label=label,
            ))
        return DeviationTaxonomy(name=decl.title, classes=tuple(classes))

    def catalog_from_decl(self, decl: CatalogDecl,
                          taxonomy: DeviationTaxonomy) -> MalfunctionCatalog:
        class_ids = {cls.id for cls in taxonomy.classes}
        seen: set[str] = set()
        functions: list[CatalogFunction] = []
        for function in decl.functions:
            malfunctions: list[Malfunction] = []
            for entry in function.malfunctions:
                slug = slugify(entry.text)
                if slug in seen:
                    self.error("E010",
                               f"malfunction {entry.text!r} collides with an "
                               f"earlier entry (both reduce to id {slug!r})",
                               entry)
                seen.add(slug)
                if entry.maps_to not in class_ids:
                    self.error("E031",
                               f"maps_to references unknown deviation class "
                               f"{entry.maps_to!r}", entry)
                malfunctions.append(Malfunction(
                    id=slug,
                    description=entry.text,
                    maps_to=entry.maps_to,
                    parent_function=function.title,
                ))
            functions.append(CatalogFunction(
                name=function.title, malfunctions=tuple(malfunctions)))
        return MalfunctionCatalog(name=decl.title, functions=tuple(functions))

    def actor_from_decl(self, decl: ActorDecl) -> Actor:
        role = ActorRole.EGO if decl.is_ego else ActorRole.OTHER
        description = ""
        params: dict[str, str] = {}
        for entry in decl.entries:
            if entry.key == "role":
                if not decl.is_ego:
                    try:
                        role = ActorRole(entry.value.text)
                    except ValueError:
                        role = ActorRole.OTHER
            elif entry.key == "description":
                description = entry.value.text
            else:
                params[entry.key] = _render_value(entry.value)
        return Actor(id=decl.name, role=role, description=description,
                     kinematic_params=params)

    def segment_from_decl(self, decl: SegmentDecl, scenario_id: str,
                          taxonomy: DeviationTaxonomy,
                          auto_order: int) -> Segment:
        order = auto_order
        requirements: list[Requirement] = []
        desired = ""
        params: dict[str, str] = {}
        for item in decl.body:
            if isinstance(item, RequireStmt):
                cls = taxonomy.absence_class_for_action(item.action)
                if cls is None:
                    self.error("E030",
                               f"no absence-kind deviation class matches "
                               f"required action {item.action!r}", item)
                    continue
                requirements.append(Requirement(
                    action=item.action,
                    axis=cls.axis,
                    label=item.label or "",
                ))
            elif isinstance(item, DesiredStmt):
                desired = item.text
            elif item.key == "order":
                order = self._order_value(item, auto_order)
            else:
                params[item.key] = _render_value(item.value)
        if not desired.strip():
            self.error("E034",
                       f"segment {decl.name!r} has no desired behavior",
                       decl)
        return Segment(
            id=decl.name,
            scenario=scenario_id,
            order=order,
            requirements=tuple(requirements),
            desired_behavior=desired,
            kinematic_params=params,
        )

    def _order_value(self, item: KeyValue, fallback: int) -> int:
        value = item.value
        if value.kind == "number" and value.unit is None:
            try:
                order = int(value.text)
            except ValueError:
                order = None
            else:
                if order >= 0:
                    return order
                order = None
        self.error("E033",
                   "segment order must be a non-negative integer "
                   f"(found {_render_value(value)!r})", item)
        return fallback

    def scenario_from_decl(self, decl: ScenarioDecl,
                           taxonomy: DeviationTaxonomy) -> OperationalScenario:
        scenario_id = slugify(decl.title)
        actors = [self.actor_from_decl(actor) for actor in decl.actors]
        ego_count = sum(1 for a in actors if a.role is ActorRole.EGO)
        if ego_count == 0:
            actors.insert(0, self._synthesized_ego(actors))
        elif ego_count > 1:
            self.error("E010",
                       f"scenario {decl.title!r} declares more than one ego "
                       "actor", decl)

        segments: list[Segment] = []
        last_order = 0
        for segment_decl in decl.segments:
            segment = self.segment_from_decl(
                segment_decl, scenario_id, taxonomy, auto_order=last_order + 1)
            if segments and segment.order <= last_order:
                self.error("E032",
                           f"segment {segment.id!r} has order "
                           f"{segment.order}, which does not increase past "
                           f"the previous segment's {last_order}",
                           segment_decl)
            last_order = max(last_order, segment.order)
            segments.append(segment)
        if not segments:
            self.error("E035",
                       f"scenario {decl.title!r} has no segments", decl)

        odd = {entry.key: _render_value(entry.value) for entry in decl.odd}
        return OperationalScenario(
            id=scenario_id,
            title=decl.title,
            odd_tags=odd,
            actors=tuple(actors),
            segments=tuple(segments),
        )

    @staticmethod
    def _synthesized_ego(actors: list[Actor]) -> Actor:
        taken = {actor.id for actor in actors}
        ego_id = "ego"
        suffix = 1
        while ego_id in taken:
            suffix += 1
            ego_id = f"ego_{suffix}"
        return Actor(id=ego_id, role=ActorRole.EGO,
                     description="automated vehicle under analysis")


def lower(trees: SourceTree | Iterable[SourceTree], *,
          name: str = "project",
          taxonomy_default: DeviationTaxonomy | None = None,
          path: str = "<input>") -> LowerResult:
    """Resolve one or more parsed trees into a fresh project."""
    if isinstance(trees, SourceTree):
        trees = [trees]
    lowerer = _Lowerer(path)

    # Declarations keep their origin file so diagnostics raised while
    # processing them point at the right source.
    taxonomy_decl: TaxonomyDecl | None = None
    taxonomy_path = path
    catalog_decls: list[tuple[CatalogDecl, str]] = []
    scenario_decls: list[tuple[ScenarioDecl, str]] = []
    for tree in trees:
        tree_path = tree.path if tree.path != "<input>" else path
        lowerer.path = tree_path
        for declaration in tree.declarations:
            if isinstance(declaration, TaxonomyDecl):
                if taxonomy_decl is not None:
                    lowerer.error("E010",
                                  "a deviation taxonomy is already declared; "
                                  "only one is allowed per project",
                                  declaration)
                else:
                    taxonomy_decl = declaration
                    taxonomy_path = tree_path
            elif isinstance(declaration, CatalogDecl):
                catalog_decls.append((declaration, tree_path))
            else:
                scenario_decls.append((declaration, tree_path))

    if taxonomy_decl is not None:
        lowerer.path = taxonomy_path
        taxonomy = lowerer.taxonomy_from_decl(taxonomy_decl)
    else:
        taxonomy = taxonomy_default or default_taxonomy()

    catalogs: list[MalfunctionCatalog] = []
    catalog_names: set[str] = set()
    for decl, decl_path in catalog_decls:
        lowerer.path = decl_path
        if decl.title in catalog_names:
            lowerer.error("E010",
                          f"catalog {decl.title!r} is already declared", decl)
        catalog_names.add(decl.title)
        catalogs.append(lowerer.catalog_from_decl(decl, taxonomy))

    scenarios: list[OperationalScenario] = []
    scenario_ids: set[str] = set()
    segment_ids: set[str] = set()
    for decl, decl_path in scenario_decls:
        lowerer.path = decl_path
        scenario = lowerer.scenario_from_decl(decl, taxonomy)
        if scenario.id in scenario_ids:
            lowerer.error("E010",
                          f"scenario title {decl.title!r} collides with an "
                          f"earlier scenario (both reduce to id "
                          f"{scenario.id!r})", decl)
        scenario_ids.add(scenario.id)
        for segment in scenario.segments:
            # Segment ids are project-global: review rows reference them
            # without a scenario qualifier.
            if segment.id in segment_ids:
                lowerer.error("E010",
                              f"segment id {segment.id!r} is already used by "
                              "another scenario", decl)
            segment_ids.add(segment.id)
        scenarios.append(scenario)

    project = Project(name=name, taxonomy=taxonomy, catalogs=catalogs,
                      scenarios=scenarios)
    if has_errors(lowerer.diagnostics):
        return LowerResult(None, lowerer.diagnostics)
    return LowerResult(project, lowerer.diagnostics)


def load_model(paths: Sequence[str | Path], *,
               name: str | None = None) -> LowerResult:
    """Parse and lower a set of .hzl files into one project."""
    trees: list[SourceTree] = []
    diagnostics: list[Diagnostic] = []
    for raw in paths:
        file_path = Path(raw)
        text = file_path.read_text(encoding="utf-8")
        result = parse(text, path=str(file_path))
        diagnostics.extend(result.diagnostics)
        if result.tree is not None:
            trees.append(result.tree)
    if has_errors(diagnostics):
        return LowerResult(None, diagnostics)
    if name is None:
        name = slugify(Path(paths[0]).stem) if paths else "project"
    lowered = lower(trees, name=name)
    return LowerResult(lowered.project, diagnostics + lowered.diagnostics)
