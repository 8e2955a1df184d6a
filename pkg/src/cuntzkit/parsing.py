"""Text syntax for algebra elements.

Grammar::

    element := ['+'|'-'] term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := scalar | atom
    atom    := 's' '[' idx (',' idx)* ']' ["'"]
             | 's' digit+ ["'"]          (d <= 9, one digit per letter)
             | 'I'
    scalar  := decimal | '(' decimal ',' decimal ')'

A trailing apostrophe takes the adjoint of the whole atom word, so
``s12'`` is ``(s_1 s_2)* = s_2* s_1*``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .words import AlgebraElement, Word, canonicalize, compress

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_SPACE = re.compile(r"\s*")


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


@dataclass
class _Parser:
    text: str
    d: int
    pos: int = 0

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, self.pos if pos is None else pos, self.text)

    def skip(self) -> None:
        self.pos = _SPACE.match(self.text, self.pos).end()

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def number(self) -> float:
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise self.error("expected a number")
        self.pos = m.end()
        return float(m.group())

    def scalar(self) -> complex:
        if self.peek() == "(":
            self.pos += 1
            re_part = self.number()
            self.expect(",")
            im_part = self.number()
            self.expect(")")
            return complex(re_part, im_part)
        return complex(self.number())

    def letter(self, start: int) -> int:
        self.skip()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            raise self.error("expected an index")
        value = int(m.group())
        if not 1 <= value <= self.d:
            raise self.error(f"index {value} out of range 1..{self.d}", start)
        self.pos = m.end()
        return value

    def atom(self) -> AlgebraElement:
        start = self.pos
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "I":
            return AlgebraElement.unit(self.d)
        if self.pos < len(self.text) and self.text[self.pos] == "[":
            self.pos += 1
            letters = [self.letter(self.pos)]
            while self.peek() == ",":
                self.pos += 1
                letters.append(self.letter(self.pos))
            self.expect("]")
        else:
            m = re.compile(r"\d+").match(self.text, self.pos)
            if not m:
                raise self.error("expected digits or '[' after 's'")
            if self.d > 9:
                raise self.error("digit shorthand needs d <= 9; use s[i,j,...]", start)
            letters = []
            for k, c in enumerate(m.group()):
                value = int(c)
                if not 1 <= value <= self.d:
                    raise self.error(f"index {value} out of range 1..{self.d}", m.start() + k)
                letters.append(value)
            self.pos = m.end()
        word = tuple(letters)
        if self.pos < len(self.text) and self.text[self.pos] == "'":
            self.pos += 1
            return AlgebraElement.word((), word, self.d)
        return AlgebraElement.word(word, (), self.d)

    def factor(self) -> AlgebraElement | complex:
        ch = self.peek()
        if ch in ("s", "I"):
            return self.atom()
        if ch == "(" or ch == "." or ch.isdigit():
            return self.scalar()
        raise self.error(f"unexpected {ch!r}" if ch else "unexpected end of input")

    def term(self) -> AlgebraElement:
        value: AlgebraElement = AlgebraElement.unit(self.d)
        scale = 1 + 0j
        while True:
            f = self.factor()
            if isinstance(f, AlgebraElement):
                value = value * f
            else:
                scale *= f
            if self.peek() != "*":
                break
            self.pos += 1
        return value.scale(scale)

    def element(self) -> AlgebraElement:
        total = AlgebraElement.zero(self.d)
        sign = 1.0
        if self.peek() in "+-" and self.peek():
            sign = -1.0 if self.peek() == "-" else 1.0
            self.pos += 1
        total = total + self.term().scale(sign)
        while self.peek() in ("+", "-"):
            sign = -1.0 if self.peek() == "-" else 1.0
            self.pos += 1
            total = total + self.term().scale(sign)
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return total


def parse_element(text: str, d: int) -> AlgebraElement:
    """Parse ``text`` into an element of O_d."""
    if d < 2:
        raise ValueError("alphabet size d must be >= 2")
    return _Parser(text, d).element()


def _format_word(letters: tuple, d: int) -> str:
    if d <= 9:
        return "s" + "".join(str(i) for i in letters)
    return "s[" + ",".join(str(i) for i in letters) + "]"


def _format_monomial(word: Word, d: int) -> str:
    parts = []
    if word.left:
        parts.append(_format_word(word.left, d))
    if word.right:
        parts.append(_format_word(word.right, d) + "'")
    return "*".join(parts) or "I"


def _sort_key(word: Word):
    return (word.degree, len(word.right), word.left, word.right)


def format_element(a: AlgebraElement, mode: str = "canonical") -> str:
    """Deterministic text form that :func:`parse_element` reads back."""
    if mode == "canonical":
        a = canonicalize(a)
    elif mode == "compressed":
        a = compress(canonicalize(a))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if a.is_zero():
        return "0"
    out = []
    for word in sorted(a.terms, key=_sort_key):
        c = complex(a.terms[word])
        body = _format_monomial(word, a.d)
        if c.imag == 0.0:
            sign = "-" if c.real < 0 else "+"
            mag = abs(c.real)
            text = body if mag == 1.0 else f"{mag!r}*{body}"
        else:
            sign = "+"
            text = f"({c.real!r},{c.imag!r})*{body}"
        if not out:
            out.append(text if sign == "+" else "-" + text)
        else:
            out.append(f"{sign} {text}")
    return " ".join(out)
