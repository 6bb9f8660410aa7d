"""Recursive-descent parser with panic-mode error recovery.

A failed production emits a diagnostic and unwinds to the nearest
statement or block boundary (next ';', or the enclosing '}'), so one
pass reports every independent problem. A tree is returned only when no
error-severity diagnostic was produced; warnings may accompany a tree.
"""

from __future__ import annotations

from dataclasses import dataclass

from hazlab.lang.ast import (
    ActorDecl,
    CatalogDecl,
    Declaration,
    DesiredStmt,
    DeviationDecl,
    FunctionDecl,
    KeyValue,
    MalfunctionDecl,
    RequireStmt,
    ScenarioDecl,
    SegmentDecl,
    SegmentItem,
    SourceTree,
    TaxonomyDecl,
    ValueNode,
)
from hazlab.lang.diagnostics import (
    EMPTY_SPAN,
    Diagnostic,
    Severity,
    error,
    has_errors,
    warning,
)
from hazlab.lang.lexer import Token, tokenize

TOP_KEYWORDS = ("taxonomy", "catalog", "scenario")

AXES = ("longitudinal", "lateral")
KINDS = ("absence", "improper")


class _Fail(Exception):
    """Raised after a diagnostic to unwind to the recovery point."""


@dataclass
class ParseResult:
    tree: SourceTree | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.tree is not None


def _describe(token: Token) -> str:
    if token.kind == "EOF":
        return "end of input"
    if token.kind == "STRING":
        return "a string"
    if token.kind == "NUMBER":
        return f"number {token.text!r}"
    return f"{token.text!r}"


class Parser:
    def __init__(self, tokens: list[Token], path: str) -> None:
        self.tokens = tokens
        self.path = path
        self.index = 0
        self.diagnostics: list[Diagnostic] = []

    # --- token plumbing ---

    def peek(self) -> Token:
        return self.tokens[self.index]

    def peek2(self) -> Token:
        return self.tokens[min(self.index + 1, len(self.tokens) - 1)]

    def at_eof(self) -> bool:
        return self.peek().kind == "EOF"

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "EOF":
            self.index += 1
        return token

    def check_word(self, word: str) -> bool:
        token = self.peek()
        return token.kind == "IDENT" and token.text == word

    def match_word(self, word: str) -> Token | None:
        if self.check_word(word):
            return self.advance()
        return None

    # --- diagnostics ---

    def report(self, code: str, message: str, token: Token,
               severity: Severity = Severity.ERROR) -> None:
        make = error if severity is Severity.ERROR else warning
        self.diagnostics.append(make(code, message, token.span, self.path))

    def fail(self, code: str, message: str, token: Token) -> None:
        self.report(code, message, token)
        raise _Fail()

    def expect(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token.kind == kind:
            return self.advance()
        self.fail("E002", f"expected {what}, found {_describe(token)}", token)
        raise AssertionError("unreachable")

    def expect_word(self, word: str) -> Token:
        token = self.peek()
        if token.kind == "IDENT" and token.text == word:
            return self.advance()
        self.fail("E002", f"expected {word!r}, found {_describe(token)}",
                  token)
        raise AssertionError("unreachable")

    # --- recovery ---

    def recover_statement(self) -> None:
        """Skip to just past the next ';' at this nesting depth, or stop
        before the '}' that closes the enclosing block."""
        depth = 0
        while not self.at_eof():
            token = self.peek()
            if token.kind == "LBRACE":
                depth += 1
            elif token.kind == "RBRACE":
                if depth == 0:
                    return
                depth -= 1
            elif token.kind == "SEMI" and depth == 0:
                self.advance()
                return
            self.advance()

    def recover_toplevel(self) -> None:
        depth = 0
        while not self.at_eof():
            token = self.peek()
            if (depth <= 0 and token.kind == "IDENT"
                    and token.text in TOP_KEYWORDS):
                return
            if token.kind == "LBRACE":
                depth += 1
            elif token.kind == "RBRACE":
                depth -= 1
            self.advance()

    # --- productions ---

    def parse_file(self) -> SourceTree:
        span = self.peek().span if not self.at_eof() else EMPTY_SPAN
        declarations: list[Declaration] = []
        while not self.at_eof():
            token = self.peek()
            production = None
            if token.kind == "IDENT" and token.text == "taxonomy":
                production = self.parse_taxonomy
            elif token.kind == "IDENT" and token.text == "catalog":
                production = self.parse_catalog
            elif token.kind == "IDENT" and token.text == "scenario":
                production = self.parse_scenario
            if production is None:
                if token.kind == "IDENT":
                    self.report("E003",
                                f"unknown keyword {token.text!r}; expected "
                                "'taxonomy', 'catalog' or 'scenario'", token)
                else:
                    self.report("E002",
                                f"expected a declaration, found "
                                f"{_describe(token)}", token)
                self.advance()
                self.recover_toplevel()
                continue
            try:
                declarations.append(production())
            except _Fail:
                self.recover_toplevel()
        return SourceTree(tuple(declarations), span=span, path=self.path)

    def parse_taxonomy(self) -> TaxonomyDecl:
        keyword = self.advance()
        title = self.expect("STRING", "taxonomy name string").text
        self.expect("LBRACE", "'{'")
        deviations: list[DeviationDecl] = []
        seen: set[str] = set()
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", "expected '}' to close taxonomy", token)
                break
            if self.check_word("deviation"):
                try:
                    decl = self.parse_deviation()
                except _Fail:
                    self.recover_statement()
                    continue
                if decl.name in seen:
                    self.report("E010",
                                f"duplicate deviation class {decl.name!r}",
                                token)
                seen.add(decl.name)
                deviations.append(decl)
            else:
                self._unexpected_in("taxonomy", "'deviation'", token)
        return TaxonomyDecl(title, tuple(deviations), span=keyword.span)

    def _unexpected_in(self, where: str, expected: str, token: Token) -> None:
        if token.kind == "IDENT":
            self.report("E003",
                        f"unknown keyword {token.text!r} inside a {where}; "
                        f"expected {expected}", token)
        else:
            self.report("E002",
                        f"expected {expected}, found {_describe(token)}",
                        token)
        self.advance()
        self.recover_statement()

    def parse_deviation(self) -> DeviationDecl:
        keyword = self.advance()
        name = self.expect("IDENT", "deviation class identifier").text
        self.expect_word("axis")
        axis_token = self.expect("IDENT", "'longitudinal' or 'lateral'")
        if axis_token.text not in AXES:
            self.fail("E002",
                      f"expected 'longitudinal' or 'lateral', found "
                      f"{axis_token.text!r}", axis_token)
        self.expect_word("kind")
        kind_token = self.expect("IDENT", "'absence' or 'improper'")
        if kind_token.text not in KINDS:
            self.fail("E002",
                      f"expected 'absence' or 'improper', found "
                      f"{kind_token.text!r}", kind_token)
        action = None
        if self.match_word("action"):
            action = self.expect("IDENT", "action identifier").text
        label = None
        if self.match_word("label"):
            label = self.expect("STRING", "label string").text
        self.expect("SEMI", "';'")
        return DeviationDecl(name, axis_token.text, kind_token.text, action,
                             label, span=keyword.span)

    def parse_catalog(self) -> CatalogDecl:
        keyword = self.advance()
        title = self.expect("STRING", "catalog name string").text
        self.expect("LBRACE", "'{'")
        functions: list[FunctionDecl] = []
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", "expected '}' to close catalog", token)
                break
            if self.check_word("function"):
                try:
                    functions.append(self.parse_function())
                except _Fail:
                    self.recover_statement()
            else:
                self._unexpected_in("catalog", "'function'", token)
        return CatalogDecl(title, tuple(functions), span=keyword.span)

    def parse_function(self) -> FunctionDecl:
        keyword = self.advance()
        title = self.expect("STRING", "function name string").text
        self.expect("LBRACE", "'{'")
        malfunctions: list[MalfunctionDecl] = []
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", "expected '}' to close function", token)
                break
            if self.check_word("malfunction"):
                try:
                    malfunctions.append(self.parse_malfunction())
                except _Fail:
                    self.recover_statement()
            else:
                self._unexpected_in("function", "'malfunction'", token)
        return FunctionDecl(title, tuple(malfunctions), span=keyword.span)

    def parse_malfunction(self) -> MalfunctionDecl:
        keyword = self.advance()
        text = self.expect("STRING", "malfunction description string").text
        self.expect_word("maps_to")
        target = self.expect("IDENT", "deviation class identifier").text
        self.expect("SEMI", "';'")
        return MalfunctionDecl(text, target, span=keyword.span)

    def parse_scenario(self) -> ScenarioDecl:
        keyword = self.advance()
        title = self.expect("STRING", "scenario title string").text
        self.expect("LBRACE", "'{'")
        odd: tuple[KeyValue, ...] = ()
        actors: tuple[ActorDecl, ...] = ()
        if self.check_word("odd") and self.peek2().kind == "LBRACE":
            odd = self.parse_odd_block()
        if self.check_word("actors") and self.peek2().kind == "LBRACE":
            actors = self.parse_actors_block()
        segments: list[SegmentDecl] = []
        seen: set[str] = set()
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", "expected '}' to close scenario", token)
                break
            if self.check_word("segment"):
                try:
                    segment = self.parse_segment()
                except _Fail:
                    self.recover_statement()
                    continue
                if segment.name in seen:
                    self.report("E010",
                                f"duplicate segment {segment.name!r}", token)
                seen.add(segment.name)
                segments.append(segment)
            elif (self.check_word("odd")
                  and self.peek2().kind == "LBRACE"):
                self.report("E002",
                            "'odd' block must appear once, before actors "
                            "and segments", token)
                self.parse_odd_block()
            elif (self.check_word("actors")
                  and self.peek2().kind == "LBRACE"):
                self.report("E002",
                            "'actors' block must appear once, before "
                            "segments", token)
                self.parse_actors_block()
            else:
                self._unexpected_in("scenario", "'segment'", token)
        return ScenarioDecl(title, odd, actors, tuple(segments),
                            span=keyword.span)

    def parse_odd_block(self) -> tuple[KeyValue, ...]:
        self.advance()
        self.expect("LBRACE", "'{'")
        return self._parse_kv_block("odd")

    def _parse_kv_block(self, where: str) -> tuple[KeyValue, ...]:
        entries: list[KeyValue] = []
        seen: set[str] = set()
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", f"expected '}}' to close {where} block",
                            token)
                break
            try:
                entry = self.parse_kv()
            except _Fail:
                self.recover_statement()
                continue
            if entry.key in seen:
                self.report("E010",
                            f"duplicate key {entry.key!r} in {where} block",
                            token)
            seen.add(entry.key)
            entries.append(entry)
        return tuple(entries)

    def parse_kv(self) -> KeyValue:
        key = self.expect("IDENT", "a key identifier")
        self.expect("COLON", "':'")
        token = self.peek()
        if token.kind == "STRING":
            self.advance()
            value = ValueNode("string", token.text, span=token.span)
        elif token.kind == "NUMBER":
            self.advance()
            unit = None
            if self.peek().kind == "IDENT":
                unit = self.advance().text
            value = ValueNode("number", token.text, unit, span=token.span)
        elif token.kind == "IDENT":
            self.advance()
            value = ValueNode("ident", token.text, span=token.span)
        else:
            self.fail("E002",
                      f"expected a value (string, number or identifier), "
                      f"found {_describe(token)}", token)
        self.expect("SEMI", "';'")
        return KeyValue(key.text, value, span=key.span)

    def parse_actors_block(self) -> tuple[ActorDecl, ...]:
        self.advance()
        self.expect("LBRACE", "'{'")
        actors: list[ActorDecl] = []
        seen: set[str] = set()
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", "expected '}' to close actors block",
                            token)
                break
            if self.check_word("ego") or self.check_word("actor"):
                try:
                    actor = self.parse_actor()
                except _Fail:
                    self.recover_statement()
                    continue
                if actor.name in seen:
                    self.report("E010", f"duplicate actor {actor.name!r}",
                                token)
                seen.add(actor.name)
                actors.append(actor)
            else:
                self._unexpected_in("actors block", "'ego' or 'actor'",
                                    token)
        return tuple(actors)

    def parse_actor(self) -> ActorDecl:
        keyword = self.advance()
        name = self.expect("IDENT", "actor identifier").text
        self.expect("LBRACE", "'{'")
        entries = self._parse_kv_block(f"actor {name!r}")
        return ActorDecl(keyword.text == "ego", name, entries,
                         span=keyword.span)

    def parse_segment(self) -> SegmentDecl:
        keyword = self.advance()
        name = self.expect("IDENT", "segment identifier").text
        self.expect("LBRACE", "'{'")
        body: list[SegmentItem] = []
        have_desired = False
        require_actions: set[str] = set()
        kv_keys: set[str] = set()
        while True:
            token = self.peek()
            if token.kind == "RBRACE":
                self.advance()
                break
            if token.kind == "EOF":
                self.report("E002", "expected '}' to close segment", token)
                break
            if (self.check_word("requires")
                    and self.peek2().kind != "COLON"):
                try:
                    stmt = self.parse_requires()
                except _Fail:
                    self.recover_statement()
                    continue
                if stmt.action in require_actions:
                    self.report("E010",
                                f"duplicate requirement {stmt.action!r} in "
                                f"segment {name!r}", token)
                require_actions.add(stmt.action)
                body.append(stmt)
            elif (self.check_word("desired")
                  and self.peek2().kind != "COLON"):
                try:
                    stmt = self.parse_desired()
                except _Fail:
                    self.recover_statement()
                    continue
                if have_desired:
                    self.report("E010",
                                f"segment {name!r} declares more than one "
                                "desired behavior", token)
                have_desired = True
                body.append(stmt)
            elif token.kind == "IDENT" and self.peek2().kind == "COLON":
                try:
                    entry = self.parse_kv()
                except _Fail:
                    self.recover_statement()
                    continue
                if entry.key in kv_keys:
                    self.report("E010",
                                f"duplicate key {entry.key!r} in segment "
                                f"{name!r}", token)
                kv_keys.add(entry.key)
                body.append(entry)
            else:
                self._unexpected_in(
                    "segment",
                    "'requires', 'desired' or a key/value entry", token)
        if not have_desired:
            self.report("W020", f"segment {name!r} has no desired behavior",
                        keyword, severity=Severity.WARNING)
        return SegmentDecl(name, tuple(body), span=keyword.span)

    def parse_requires(self) -> RequireStmt:
        keyword = self.advance()
        action = self.expect("IDENT", "action identifier").text
        label = None
        if self.match_word("label"):
            label = self.expect("STRING", "label string").text
        self.expect("SEMI", "';'")
        return RequireStmt(action, label, span=keyword.span)

    def parse_desired(self) -> DesiredStmt:
        keyword = self.advance()
        text = self.expect("STRING", "desired behavior string").text
        self.expect("SEMI", "';'")
        return DesiredStmt(text, span=keyword.span)


def parse(source: str, path: str = "<input>") -> ParseResult:
    """Parse one source text; never raises on malformed input."""
    tokens, diagnostics = tokenize(source, path)
    parser = Parser(tokens, path)
    tree = parser.parse_file()
    diagnostics = diagnostics + parser.diagnostics
    diagnostics.sort(key=lambda d: (d.span.line, d.span.column))
    if has_errors(diagnostics):
        return ParseResult(None, diagnostics)
    return ParseResult(tree, diagnostics)
