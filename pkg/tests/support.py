"""Builders for synthetic models used across the test modules."""

from __future__ import annotations

from hazlab.model import (
    Actor,
    ActorRole,
    CatalogFunction,
    Malfunction,
    MalfunctionCatalog,
    OperationalScenario,
    Project,
    Requirement,
    Segment,
    default_taxonomy,
)

TAXONOMY = default_taxonomy()
ACTIONS = ("accelerate", "decelerate", "change_course")

_AXIS_OF_ACTION = {
    cls.action: cls.axis for cls in TAXONOMY.classes if cls.action
}


def make_segment(segment_id: str, scenario_id: str, order: int,
                 actions: tuple[str, ...] = (),
                 labels: dict[str, str] | None = None) -> Segment:
    labels = labels or {}
    return Segment(
        id=segment_id,
        scenario=scenario_id,
        order=order,
        requirements=tuple(
            Requirement(action=action, axis=_AXIS_OF_ACTION[action],
                        label=labels.get(action, f"{action} maneuver"))
            for action in actions),
        desired_behavior=f"desired behavior in {segment_id}",
    )


def make_scenario(scenario_id: str,
                  segment_actions: list[tuple[str, ...]]
                  ) -> OperationalScenario:
    segments = tuple(
        make_segment(f"{scenario_id}_s{index}", scenario_id, index, actions)
        for index, actions in enumerate(segment_actions, start=1))
    return OperationalScenario(
        id=scenario_id,
        title=scenario_id.replace("_", " "),
        actors=(Actor(id=f"{scenario_id}_ego", role=ActorRole.EGO),),
        segments=segments,
    )


def make_catalog(name: str,
                 mappings: list[tuple[str, str | None]]) -> MalfunctionCatalog:
    """mappings: (malfunction id, deviation class id or None)."""
    return MalfunctionCatalog(
        name=name,
        functions=(CatalogFunction(
            name=name,
            malfunctions=tuple(
                Malfunction(id=mid, description=mid.replace("_", " "),
                            maps_to=target, parent_function=name)
                for mid, target in mappings)),))


def make_project(segment_actions: list[tuple[str, ...]],
                 mappings: list[tuple[str, str | None]] | None = None,
                 name: str = "synthetic") -> Project:
    project = Project(name=name, taxonomy=default_taxonomy())
    project.scenarios.append(make_scenario(f"{name}_scenario",
                                           segment_actions))
    if mappings is not None:
        project.catalogs.append(make_catalog("catalog", mappings))
    return project


def brute_force_behavior_keys(project: Project,
                              catalog: MalfunctionCatalog
                              ) -> set[tuple[str, str]]:
    """Independent enumeration of distinct (segment, observable class)."""
    keys: set[tuple[str, str]] = set()
    for malfunction in catalog.all_malfunctions():
        if malfunction.maps_to is None:
            continue
        for segment in project.segments():
            keys.add((segment.id, malfunction.maps_to))
    return keys
