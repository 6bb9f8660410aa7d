"""Syntax tree for the authoring language.

Every node carries the span of its introducing token. Spans are excluded
from equality so that a printed-then-reparsed tree compares equal to the
original (the round-trip property).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from hazlab.lang.diagnostics import EMPTY_SPAN, Span


@dataclass(frozen=True)
class ValueNode:
    """A key/value right-hand side: string, number or bare identifier.

    ``text`` holds the decoded string, the verbatim number lexeme, or the
    identifier. ``unit`` is the optional unit identifier after a number.
    """

    kind: str
    text: str
    unit: str | None = None
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class KeyValue:
    key: str
    value: ValueNode
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class DeviationDecl:
    name: str
    axis: str
    kind: str
    action: str | None = None
    label: str | None = None
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class TaxonomyDecl:
    title: str
    deviations: tuple[DeviationDecl, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class MalfunctionDecl:
    text: str
    maps_to: str
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class FunctionDecl:
    title: str
    malfunctions: tuple[MalfunctionDecl, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class CatalogDecl:
    title: str
    functions: tuple[FunctionDecl, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class ActorDecl:
    is_ego: bool
    name: str
    entries: tuple[KeyValue, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class RequireStmt:
    action: str
    label: str | None = None
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class DesiredStmt:
    text: str
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


SegmentItem = Union[RequireStmt, DesiredStmt, KeyValue]


@dataclass(frozen=True)
class SegmentDecl:
    name: str
    body: tuple[SegmentItem, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class ScenarioDecl:
    title: str
    odd: tuple[KeyValue, ...] = ()
    actors: tuple[ActorDecl, ...] = ()
    segments: tuple[SegmentDecl, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)


Declaration = Union[TaxonomyDecl, CatalogDecl, ScenarioDecl]


@dataclass(frozen=True)
class SourceTree:
    declarations: tuple[Declaration, ...] = ()
    span: Span = field(default=EMPTY_SPAN, compare=False, repr=False)
    # origin file, so later passes can anchor their diagnostics to it
    path: str = field(default="<input>", compare=False, repr=False)
