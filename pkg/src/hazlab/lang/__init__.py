"""Authoring language for taxonomies, malfunction catalogs and scenarios.

The package splits along the usual pipeline: lexer and parser build a
syntax tree with diagnostics, the printer renders the canonical text
form, and lowering resolves the tree into domain model objects.
"""

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
    Span,
    TaxonomyDecl,
    ValueNode,
)
from hazlab.lang.diagnostics import Diagnostic
from hazlab.lang.lower import LowerResult, load_model, lower
from hazlab.lang.parser import ParseResult, parse
from hazlab.lang.printer import print_tree

__all__ = [
    "ActorDecl", "CatalogDecl", "DesiredStmt", "DeviationDecl", "Diagnostic",
    "FunctionDecl", "KeyValue", "LowerResult", "MalfunctionDecl",
    "ParseResult", "RequireStmt", "ScenarioDecl", "SegmentDecl", "SourceTree",
    "Span", "TaxonomyDecl", "ValueNode", "load_model", "lower", "parse",
    "print_tree",
]
