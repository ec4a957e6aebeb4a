"""Recursive-descent parser for the set-expression text grammar.

    expr := "nat" | "empty" | "finite{" ints "}" | "ap(" r "," m ")"
          | "blocks(" b "," p ",on=[" residues "])"
          | "union(" e "," e ")" | "inter(" e "," e ")" | "diff(" e "," e ")"
          | "compl(" e ")" | "mcopy(" e "," m ["," rule] ")"
    rule := "first" | "offset:" t | "seed:" u64

Whitespace between tokens is ignored.  ``to_text`` in :mod:`setexpr` is the
canonical printer; ``parse_set_expr(to_text(e)) == e``.
"""
from __future__ import annotations

import re

from .errors import ParseError
from .setexpr import (
    AP, Blocks, Compl, Diff, Empty, Finite, First, Inter, MCopy, Nat, Offset, Seeded, SetExprError,
    Union,
)

_TOKEN = re.compile(r"\s*(?:([a-z]+)|(\d+)|([(){}\[\],:=]))")
_KEYWORDS = ("nat", "empty", "finite", "ap", "blocks", "union", "inter", "diff", "compl", "mcopy")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            start = m.start(m.lastindex)
            self.tokens.append((m.group(m.lastindex), start, m.lastindex))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, len(self.text), 0)

    def expect(self, *options):
        tok, off, _ = self.peek()
        if tok not in options:
            found = "end of input" if tok is None else repr(tok)
            raise ParseError(f"unexpected {found}", off, options)
        self.i += 1
        return tok

    def integer(self):
        tok, off, kind = self.peek()
        if kind != 2:
            found = "end of input" if tok is None else repr(tok)
            raise ParseError(f"expected an integer, found {found}", off, ("<integer>",))
        self.i += 1
        return int(tok)

    def int_list(self, close):
        out = []
        if self.peek()[0] == close:
            return out
        out.append(self.integer())
        while self.peek()[0] == ",":
            self.i += 1
            out.append(self.integer())
        return out

    def expr(self):
        tok, off, _ = self.peek()
        word = self.expect(*_KEYWORDS)
        try:
            return self._node(word)
        except SetExprError as exc:
            raise ParseError(str(exc), off) from None

    def _node(self, word):
        if word == "nat":
            return Nat()
        if word == "empty":
            return Empty()
        if word == "finite":
            self.expect("{")
            off = self.peek()[1]
            els = self.int_list("}")
            self.expect("}")
            if any(a >= b for a, b in zip(els, els[1:])):
                raise ParseError("finite elements must be strictly increasing", off)
            return Finite(tuple(els))
        self.expect("(")
        if word == "ap":
            r = self.integer()
            self.expect(",")
            m = self.integer()
            node = AP(r, m)
        elif word == "blocks":
            b = self.integer()
            self.expect(",")
            p = self.integer()
            self.expect(",")
            self.expect("on")
            self.expect("=")
            self.expect("[")
            on = self.int_list("]")
            self.expect("]")
            node = Blocks(b, p, tuple(on))
        elif word in ("union", "inter", "diff"):
            left = self.expr()
            self.expect(",")
            right = self.expr()
            node = {"union": Union, "inter": Inter, "diff": Diff}[word](left, right)
        elif word == "compl":
            node = Compl(self.expr())
        else:
            inner = self.expr()
            self.expect(",")
            m = self.integer()
            rule = First()
            if self.peek()[0] == ",":
                self.i += 1
                kind = self.expect("first", "offset", "seed")
                if kind == "offset":
                    self.expect(":")
                    rule = Offset(self.integer())
                elif kind == "seed":
                    self.expect(":")
                    rule = Seeded(self.integer())
            node = MCopy(inner, m, rule)
        self.expect(")")
        return node


def parse_set_expr(text: str):
    """Parse set-expression text; raises ParseError with byte offset and expected tokens."""
    p = _Parser(text)
    node = p.expr()
    tok, off, _ = p.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok!r}", off, ("<end of input>",))
    return node
