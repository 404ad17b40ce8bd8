"""Dyck monoid with zero: letters, words, reduction and heights.

Letters are encoded as nonzero ints: ``k`` is the open bracket ``a<k>`` and
``-k`` is the close bracket ``b<k>`` (``1 <= k <= M``).  A word is a tuple of
such codes.  The reduced form of a word is either :data:`ZERO` or a canonical
pair ``(closes, opens)`` of index tuples, read as ``b..b a..a``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

Word = tuple  # tuple[int, ...] of letter codes

OPEN = "Open"
CLOSE = "Close"

_TOKEN = re.compile(r"^([ab])([1-9][0-9]*)$")


@dataclass(frozen=True)
class Symbol:
    kind: str
    index: int

    @property
    def code(self) -> int:
        return self.index if self.kind == OPEN else -self.index

    @classmethod
    def from_code(cls, code: int) -> "Symbol":
        if code == 0:
            raise ValueError("letter code 0 is not a symbol")
        return cls(OPEN if code > 0 else CLOSE, abs(code))

    def __str__(self) -> str:
        return token(self.code)


def token(code: int) -> str:
    return f"a{code}" if code > 0 else f"b{-code}"


def parse_word(text: str, M: int | None = None) -> Word:
    """Parse whitespace-separated tokens ``a1..aM`` / ``b1..bM``.

    Raises ValueError on an unknown token or an index outside ``1..M``.
    """
    out = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if m is None:
            raise ValueError(f"unknown token {tok!r}")
        k = int(m.group(2))
        if M is not None and k > M:
            raise ValueError(f"index {k} outside 1..{M} in token {tok!r}")
        out.append(k if m.group(1) == "a" else -k)
    return tuple(out)


def format_word(w: Iterable[int]) -> str:
    return " ".join(token(c) for c in w)


def word_alphabet(M: int) -> tuple[int, ...]:
    """All 2M letters in token order: a1..aM, b1..bM."""
    if M < 1:
        raise ValueError("M must be positive")
    return tuple(range(1, M + 1)) + tuple(-k for k in range(1, M + 1))


@dataclass(frozen=True)
class ReducedForm:
    """Image of a word in the Dyck monoid.

    ``closes`` and ``opens`` hold bracket indices in word order; they are
    empty for :data:`ZERO` and for the unit.
    """

    is_zero: bool = False
    closes: tuple[int, ...] = ()
    opens: tuple[int, ...] = ()

    @property
    def height(self) -> int:
        return len(self.opens) - len(self.closes)

    def is_unit(self) -> bool:
        return not self.is_zero and not self.closes and not self.opens

    def word(self) -> Word:
        if self.is_zero:
            raise ValueError("zero has no representative word")
        return tuple(-k for k in self.closes) + self.opens

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if self.is_unit():
            return "1"
        return format_word(self.word())


ZERO = ReducedForm(is_zero=True)
UNIT = ReducedForm()


def reduce_word(w: Sequence[int]) -> ReducedForm:
    """Single left-to-right reduction pass.

    An open is pushed; a close cancels the top open when the indices agree,
    yields zero when they differ, and is recorded as unmatched when no open
    is pending.
    """
    closes: list[int] = []
    opens: list[int] = []
    for c in w:
        if c > 0:
            opens.append(c)
        elif opens:
            if opens.pop() != -c:
                return ZERO
        else:
            closes.append(-c)
    return ReducedForm(False, tuple(closes), tuple(opens))


def reduced_concat(r1: ReducedForm, r2: ReducedForm) -> ReducedForm:
    if r1.is_zero or r2.is_zero:
        return ZERO
    q, p = r1.opens, r2.closes
    m = min(len(q), len(p))
    for i in range(m):
        if q[-1 - i] != p[i]:
            return ZERO
    return ReducedForm(False, r1.closes + p[m:], q[: len(q) - m] + r2.opens)


def height_profile(w: Sequence[int]) -> list[int]:
    h = 0
    out = [0]
    for c in w:
        h += 1 if c > 0 else -1
        out.append(h)
    return out


def final_height(w: Sequence[int]) -> int:
    return sum(1 if c > 0 else -1 for c in w)
