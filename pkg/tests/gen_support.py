"""Shared generators for property and acceptance tests.

Three families: hypothesis strategies producing syntax trees (for the
print/parse round trip), a seeded fuzz corpus of hostile inputs (the
parser must never raise), and seeded random review-model builders plus
a random-operation driver for the store safety checks.
"""

from __future__ import annotations

import random
from typing import Iterator

from hypothesis import strategies as st

from hazlab.lang.ast import (
    ActorDecl,
    CatalogDecl,
    DesiredStmt,
    DeviationDecl,
    FunctionDecl,
    KeyValue,
    MalfunctionDecl,
    RequireStmt,
    ScenarioDecl,
    SegmentDecl,
    SourceTree,
    TaxonomyDecl,
    ValueNode,
)
from hazlab.lang.diagnostics import Diagnostic
from hazlab.model import (
    HazlabError,
    Project,
    ReviewStatus,
    default_taxonomy,
    errors_only,
    project_from_json,
    project_to_json,
    validate_project,
)
from hazlab.review import DecisionCommand, VersionConflictError
from hazlab.store import ProjectStore

from support import ACTIONS, make_project

# --- syntax tree strategies --------------------------------------------------

IDENT = st.from_regex(r"[a-z][a-z0-9_]{0,7}", fullmatch=True)

NUMBER_TEXT = st.one_of(
    st.integers(min_value=0, max_value=999999).map(str),
    st.tuples(st.integers(0, 999), st.integers(0, 999)).map(
        lambda pair: f"{pair[0]}.{pair[1]}"),
)

STRING_TEXT = st.text(
    alphabet=st.one_of(
        st.characters(min_codepoint=32, max_codepoint=126),
        st.sampled_from('\n\t"\\äßπ€🚗'),
    ),
    max_size=24,
)

VALUE = st.one_of(
    st.builds(ValueNode, st.just("string"), STRING_TEXT),
    st.builds(ValueNode, st.just("number"), NUMBER_TEXT,
              st.none() | IDENT),
    st.builds(ValueNode, st.just("ident"), IDENT),
)


def kv_block(max_size: int):
    return st.lists(
        st.tuples(IDENT, VALUE), max_size=max_size,
        unique_by=lambda pair: pair[0],
    ).map(lambda pairs: tuple(KeyValue(k, v) for k, v in pairs))


DEVIATION = st.builds(
    DeviationDecl, IDENT,
    st.sampled_from(("longitudinal", "lateral")),
    st.sampled_from(("absence", "improper")),
    st.none() | IDENT,
    st.none() | STRING_TEXT,
)

TAXONOMY_DECL = st.builds(
    TaxonomyDecl, STRING_TEXT,
    st.lists(DEVIATION, max_size=6,
             unique_by=lambda d: d.name).map(tuple),
)

MALFUNCTION = st.builds(MalfunctionDecl, STRING_TEXT, IDENT)

FUNCTION = st.builds(
    FunctionDecl, STRING_TEXT,
    st.lists(MALFUNCTION, max_size=4).map(tuple),
)

CATALOG_DECL = st.builds(
    CatalogDecl, STRING_TEXT,
    st.lists(FUNCTION, max_size=3).map(tuple),
)

ACTOR = st.builds(ActorDecl, st.booleans(), IDENT, kv_block(3))

ACTORS = st.lists(ACTOR, max_size=3,
                  unique_by=lambda a: a.name).map(tuple)

REQUIRE = st.builds(RequireStmt, IDENT, st.none() | STRING_TEXT)

DESIRED = st.builds(DesiredStmt, STRING_TEXT)


@st.composite
def segment_bodies(draw):
    requires = draw(st.lists(REQUIRE, max_size=3,
                             unique_by=lambda r: r.action))
    desired = draw(st.lists(DESIRED, max_size=1))
    entries = draw(st.lists(st.tuples(IDENT, VALUE), max_size=3,
                            unique_by=lambda pair: pair[0]))
    items = requires + desired + [KeyValue(k, v) for k, v in entries]
    return tuple(draw(st.permutations(items)))


SEGMENT = st.builds(SegmentDecl, IDENT, segment_bodies())

SCENARIO_DECL = st.builds(
    ScenarioDecl, STRING_TEXT, kv_block(3), ACTORS,
    st.lists(SEGMENT, max_size=3, unique_by=lambda s: s.name).map(tuple),
)

TREES = st.builds(
    SourceTree,
    st.lists(st.one_of(TAXONOMY_DECL, CATALOG_DECL, SCENARIO_DECL),
             max_size=4).map(tuple),
)

# --- fuzz corpus --------------------------------------------------------------

_SOUP_VOCAB = (
    "taxonomy", "catalog", "scenario", "segment", "actor", "ego", "odd",
    "actors", "order", "requires", "desired", "label", "deviation", "axis",
    "kind", "absence", "improper", "action", "function", "malfunction",
    "maps_to", "role", "{", "}", ";", ":", '"', '"text"', '"unterminated',
    "\\", '\\q', "#", "# comment", "\n", " ", "  ", "ident_1", "x9",
    "UPPER", "0", "42", "3.14", "3.", ".5", "50 kmh", "-7", "🚗", "ä",
)


def fuzz_corpus(seed: int, count: int,
                fixture_texts: tuple[str, ...] = ()) -> Iterator[str]:
    """Deterministic stream of hostile parser inputs."""
    rng = random.Random(seed)
    for index in range(count):
        family = index % 3
        if family == 0:
            length = rng.randint(0, 200)
            yield "".join(
                chr(rng.choice((
                    rng.randint(32, 126),
                    rng.randint(0, 0xD7FF),
                    rng.randint(0xE000, 0x10FFFF),
                )))
                for _ in range(length))
        elif family == 1 or not fixture_texts:
            pieces = rng.randint(0, 60)
            yield "".join(rng.choice(_SOUP_VOCAB) for _ in range(pieces))
        else:
            text = rng.choice(fixture_texts)
            for _ in range(rng.randint(1, 5)):
                text = _mutate(rng, text)
            yield text


def _mutate(rng: random.Random, text: str) -> str:
    if not text:
        return rng.choice(_SOUP_VOCAB)
    choice = rng.randrange(5)
    at = rng.randrange(len(text))
    end = min(len(text), at + rng.randint(1, 12))
    if choice == 0:  # delete a slice
        return text[:at] + text[end:]
    if choice == 1:  # duplicate a slice
        return text[:end] + text[at:end] + text[end:]
    if choice == 2:  # insert noise
        return text[:at] + rng.choice(_SOUP_VOCAB) + text[at:]
    if choice == 3:  # flip one character
        return text[:at] + chr(rng.randint(32, 126)) + text[at + 1:]
    return text[:at]  # truncate


def spans_in_bounds(source: str, diagnostics: list[Diagnostic]) -> list[str]:
    """Names of span-bound violations; empty means all spans are sane."""
    lines = source.split("\n")
    problems: list[str] = []
    for diagnostic in diagnostics:
        span = diagnostic.span
        if not 1 <= span.line <= len(lines):
            problems.append(f"{diagnostic.code}: line {span.line} outside "
                            f"1..{len(lines)}")
            continue
        width = len(lines[span.line - 1])
        if span.column < 1 or span.column > width + 1:
            problems.append(f"{diagnostic.code}: column {span.column} "
                            f"outside 1..{width + 1} on line {span.line}")
        elif span.length < 0 or span.column + span.length > width + 2:
            problems.append(f"{diagnostic.code}: length {span.length} runs "
                            f"past line {span.line} (width {width})")
    return problems


# --- random review models -----------------------------------------------------

CLASS_IDS = tuple(cls.id for cls in default_taxonomy().classes)


def random_model(rng: random.Random, *, max_malfunctions: int = 10,
                 max_segments: int = 10) -> Project:
    """A valid random project: random segment actions, mapped catalog."""
    segments = [
        tuple(rng.sample(ACTIONS, rng.randint(0, len(ACTIONS))))
        for _ in range(rng.randint(1, max_segments))
    ]
    mappings = [
        (f"m{index}", rng.choice(CLASS_IDS))
        for index in range(rng.randint(1, max_malfunctions))
    ]
    return make_project(segments, mappings,
                        name=f"model_{rng.randrange(10 ** 9)}")


# --- random store operations ----------------------------------------------------


def run_random_ops(store: ProjectStore, rng: random.Random,
                   ops: int) -> dict[str, int]:
    """Drive a store through random (often invalid) operations.

    After every operation the committed state must stay internally
    consistent; the caller re-checks the final state via
    ``scan_store_state``.
    """
    stats = {"committed": 0, "rejected": 0, "conflicts": 0}

    def random_row():
        project = store.snapshot()
        return project, rng.choice(project.phs_set)

    for _ in range(ops):
        action = rng.randrange(8)
        try:
            if action in (0, 1, 2):  # decision with the honest version
                project, row = random_row()
                status = rng.choice((ReviewStatus.HAZARDOUS,
                                     ReviewStatus.NOT_HAZARDOUS))
                store.record_decision(DecisionCommand(
                    phs=row.id, new_status=status,
                    rationale="swept" if rng.random() < 0.8 else "",
                    reviewer=f"op{action}",
                    expected_version=row.review.version))
            elif action == 3:  # stale decision
                project, row = random_row()
                store.record_decision(DecisionCommand(
                    phs=row.id, new_status=ReviewStatus.HAZARDOUS,
                    rationale="", reviewer="stale",
                    expected_version=row.review.version + rng.randint(1, 3)))
            elif action == 4:  # hazard, sometimes with an empty leg
                project, row = random_row()
                legs = ["ego", rng.choice(("pedestrian", "oncoming", "bus")),
                        f"mechanism {rng.randrange(4)}"]
                if rng.random() < 0.3:
                    legs[rng.randrange(3)] = "   "
                store.create_hazard(row.id, *legs)
            elif action == 5:  # trace a random or missing hazard
                project = store.snapshot()
                if project.hazards and rng.random() < 0.8:
                    hazard_id = rng.choice(project.hazards).id
                else:
                    hazard_id = "hz-missing"
                store.trace_malfunctions(hazard_id)
            elif action == 6:  # reader: export must always parse
                document = store.export("csv")
                assert document.startswith("phs_id,")
            else:  # failing transaction must roll back cleanly
                def explode(project: Project) -> None:
                    project.hazards.clear()
                    raise RuntimeError("injected")
                before = store.snapshot().store_version
                try:
                    store.mutate(explode)
                except RuntimeError:
                    pass
                assert store.snapshot().store_version == before
                continue
        except VersionConflictError:
            stats["conflicts"] += 1
        except HazlabError:
            stats["rejected"] += 1
        else:
            if action != 6:
                stats["committed"] += 1
    return stats


def scan_store_state(store: ProjectStore) -> list[str]:
    """Invariant violations in the committed state; empty means healthy."""
    project = store.snapshot()
    problems = [str(issue)
                for issue in errors_only(validate_project(project))]
    ids = [row.id for row in project.phs_set]
    if len(set(ids)) != len(ids):
        problems.append("duplicate phs ids")
    for hazard in project.hazards:
        row = project.phs_by_id(hazard.phs)
        if row is None:
            problems.append(f"hazard {hazard.id} references missing row")
        elif row.review.status is not ReviewStatus.HAZARDOUS:
            problems.append(f"hazard {hazard.id} on a "
                            f"{row.review.status.value} row")
    for row in project.phs_set:
        if (row.review.status is ReviewStatus.NOT_HAZARDOUS
                and not row.review.rationale.strip()):
            problems.append(f"row {row.id} not_hazardous without rationale")
        if row.review.version < 1:
            problems.append(f"row {row.id} has version {row.review.version}")
    on_disk = store.path.read_text(encoding="utf-8")
    if project_to_json(project) != on_disk:
        problems.append("committed state differs from the document on disk")
    if project_from_json(on_disk).store_version != project.store_version:
        problems.append("store_version drifted between memory and disk")
    return problems
