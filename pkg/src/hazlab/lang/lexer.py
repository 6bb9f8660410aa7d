"""Lexer for the authoring language.

Keywords are contextual: every lowercase word is an IDENT token and the
parser matches on its text. Strings are double-quoted with backslash
escapes for quote, backslash, newline and tab. Numbers keep their lexeme
verbatim so parameters survive round-trips unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from hazlab.lang.diagnostics import Diagnostic, Span, error

IDENT_START = "abcdefghijklmnopqrstuvwxyz"
IDENT_CONT = IDENT_START + "0123456789_"
DIGITS = "0123456789"

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


class Lexer:
    def __init__(self, source: str, path: str = "<input>") -> None:
        self.source = source
        self.path = path
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.diagnostics: list[Diagnostic] = []

    def _peek(self) -> str:
        if self.pos < len(self.source):
            return self.source[self.pos]
        return ""

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def _emit(self, kind: str, text: str, line: int, col: int,
              length: int) -> None:
        self.tokens.append(Token(kind, text, Span(line, col, length)))

    def _error(self, message: str, line: int, col: int, length: int) -> None:
        self.diagnostics.append(error(
            "E001", message, Span(line, col, length), self.path))

    def run(self) -> tuple[list[Token], list[Diagnostic]]:
        while self.pos < len(self.source):
            line, col = self.line, self.col
            ch = self._peek()
            if ch in " \t\r\n":
                self._advance()
            elif ch == "#":
                while self._peek() not in ("", "\n"):
                    self._advance()
            elif ch == "{":
                self._advance()
                self._emit("LBRACE", ch, line, col, 1)
            elif ch == "}":
                self._advance()
                self._emit("RBRACE", ch, line, col, 1)
            elif ch == ";":
                self._advance()
                self._emit("SEMI", ch, line, col, 1)
            elif ch == ":":
                self._advance()
                self._emit("COLON", ch, line, col, 1)
            elif ch == '"':
                self._string(line, col)
            elif ch in IDENT_START:
                self._ident(line, col)
            elif ch in DIGITS or (ch == "-"
                                  and self.pos + 1 < len(self.source)
                                  and self.source[self.pos + 1] in DIGITS):
                self._number(line, col)
            else:
                self._advance()
                self._error(f"unexpected character {ch!r}", line, col, 1)
        self._emit("EOF", "", self.line, self.col, 0)
        return self.tokens, self.diagnostics

    def _ident(self, line: int, col: int) -> None:
        start = self.pos
        while self._peek() in IDENT_CONT and self._peek():
            self._advance()
        text = self.source[start:self.pos]
        self._emit("IDENT", text, line, col, self.pos - start)

    def _number(self, line: int, col: int) -> None:
        start = self.pos
        if self._peek() == "-":
            self._advance()
        while self._peek() in DIGITS and self._peek():
            self._advance()
        # A dot only belongs to the number when digits follow it.
        if (self._peek() == "." and self.pos + 1 < len(self.source)
                and self.source[self.pos + 1] in DIGITS):
            self._advance()
            while self._peek() in DIGITS and self._peek():
                self._advance()
        text = self.source[start:self.pos]
        self._emit("NUMBER", text, line, col, self.pos - start)

    def _string(self, line: int, col: int) -> None:
        start = self.pos
        self._advance()
        parts: list[str] = []
        while True:
            ch = self._peek()
            if ch == "":
                self._error("unterminated string literal", line, col,
                            self.pos - start)
                break
            if ch == "\n":
                self._error("unterminated string literal", line, col,
                            self.pos - start)
                break
            if ch == '"':
                self._advance()
                break
            if ch == "\\":
                esc_line, esc_col = self.line, self.col
                self._advance()
                esc = self._peek()
                if esc == "":
                    self._error("unterminated string literal", line, col,
                                self.pos - start)
                    break
                self._advance()
                if esc in _ESCAPES:
                    parts.append(_ESCAPES[esc])
                else:
                    self._error(f"unknown escape sequence \\{esc}",
                                esc_line, esc_col, 2)
                    parts.append(esc)
            else:
                parts.append(self._advance())
        self._emit("STRING", "".join(parts), line, col, self.pos - start)


def tokenize(source: str,
             path: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    return Lexer(source, path).run()
