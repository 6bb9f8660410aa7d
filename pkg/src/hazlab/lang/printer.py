"""Canonical text rendering of syntax trees.

Two-space indent, one declaration per statement line, blank line between
top-level declarations, LF line endings. Printing then reparsing yields
a structurally identical tree; printing a reparsed print is
byte-identical (the form is a fixed point).
"""

from __future__ import annotations

from hazlab.lang.ast import (
    ActorDecl,
    CatalogDecl,
    DesiredStmt,
    DeviationDecl,
    FunctionDecl,
    KeyValue,
    RequireStmt,
    ScenarioDecl,
    SegmentDecl,
    SourceTree,
    TaxonomyDecl,
    ValueNode,
)

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def quote(text: str) -> str:
    escaped = "".join(_STRING_ESCAPES.get(ch, ch) for ch in text)
    return f'"{escaped}"'


def _value(node: ValueNode) -> str:
    if node.kind == "string":
        return quote(node.text)
    if node.kind == "number" and node.unit:
        return f"{node.text} {node.unit}"
    return node.text


def _kv(entry: KeyValue, indent: str, out: list[str]) -> None:
    out.append(f"{indent}{entry.key}: {_value(entry.value)};")


def _deviation(decl: DeviationDecl, indent: str, out: list[str]) -> None:
    parts = [f"deviation {decl.name} axis {decl.axis} kind {decl.kind}"]
    if decl.action is not None:
        parts.append(f"action {decl.action}")
    if decl.label is not None:
        parts.append(f"label {quote(decl.label)}")
    out.append(indent + " ".join(parts) + ";")


def _taxonomy(decl: TaxonomyDecl, out: list[str]) -> None:
    out.append(f"taxonomy {quote(decl.title)} {{")
    for deviation in decl.deviations:
        _deviation(deviation, "  ", out)
    out.append("}")


def _function(decl: FunctionDecl, indent: str, out: list[str]) -> None:
    out.append(f"{indent}function {quote(decl.title)} {{")
    for malfunction in decl.malfunctions:
        out.append(f"{indent}  malfunction {quote(malfunction.text)} "
                   f"maps_to {malfunction.maps_to};")
    out.append(f"{indent}}}")


def _catalog(decl: CatalogDecl, out: list[str]) -> None:
    out.append(f"catalog {quote(decl.title)} {{")
    for function in decl.functions:
        _function(function, "  ", out)
    out.append("}")


def _actor(decl: ActorDecl, indent: str, out: list[str]) -> None:
    keyword = "ego" if decl.is_ego else "actor"
    out.append(f"{indent}{keyword} {decl.name} {{")
    for entry in decl.entries:
        _kv(entry, indent + "  ", out)
    out.append(f"{indent}}}")


def _segment(decl: SegmentDecl, indent: str, out: list[str]) -> None:
    out.append(f"{indent}segment {decl.name} {{")
    inner = indent + "  "
    for item in decl.body:
        if isinstance(item, RequireStmt):
            line = f"{inner}requires {item.action}"
            if item.label is not None:
                line += f" label {quote(item.label)}"
            out.append(line + ";")
        elif isinstance(item, DesiredStmt):
            out.append(f"{inner}desired {quote(item.text)};")
        else:
            _kv(item, inner, out)
    out.append(f"{indent}}}")


def _scenario(decl: ScenarioDecl, out: list[str]) -> None:
    out.append(f"scenario {quote(decl.title)} {{")
    if decl.odd:
        out.append("  odd {")
        for entry in decl.odd:
            _kv(entry, "    ", out)
        out.append("  }")
    if decl.actors:
        out.append("  actors {")
        for actor in decl.actors:
            _actor(actor, "    ", out)
        out.append("  }")
    for segment in decl.segments:
        _segment(segment, "  ", out)
    out.append("}")


def print_tree(tree: SourceTree) -> str:
    """Render the canonical LF-terminated text form; empty tree -> ""."""
    blocks: list[str] = []
    for declaration in tree.declarations:
        lines: list[str] = []
        if isinstance(declaration, TaxonomyDecl):
            _taxonomy(declaration, lines)
        elif isinstance(declaration, CatalogDecl):
            _catalog(declaration, lines)
        else:
            _scenario(declaration, lines)
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"
