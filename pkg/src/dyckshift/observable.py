"""Locally constant observables on the Dyck shift.

An observable of depth ``k`` reads the block ``x_0 .. x_{k-1}``.  A factored
observable only sees the open/close pattern of that block; its table is keyed
by strings over ``"ab"`` (``"a"`` any open, ``"b"`` any close).  Otherwise the
table is keyed by tuples of letter codes and missing blocks evaluate to 0.
"""

from __future__ import annotations

import itertools
import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .dyck import parse_word


def pattern(block: Sequence[int]) -> str:
    return "".join("a" if c > 0 else "b" for c in block)


@dataclass(frozen=True)
class Observable:
    depth: int
    table: Mapping = field(hash=False)
    factored: bool = True

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("observable depth must be >= 1")
        if self.factored:
            want = {"".join(p) for p in itertools.product("ab", repeat=self.depth)}
            got = set(self.table)
            if got != want:
                missing = sorted(want - got)
                extra = sorted(got - want)
                raise ValueError(
                    f"factored table must cover all {len(want)} blocks "
                    f"(missing={missing}, unexpected={extra})"
                )
        else:
            for key in self.table:
                if len(key) != self.depth:
                    raise ValueError(f"block {key!r} has wrong length")

    def __call__(self, block: Sequence[int]) -> float:
        if self.factored:
            return self.table[pattern(block)]
        return self.table.get(tuple(block), 0.0)

    def bar(self, p: str) -> float:
        """Value on an open/close pattern (factored observables only)."""
        if not self.factored:
            raise ValueError("observable is not factored through open/close")
        return self.table[p]

    def value_range(self) -> tuple[float, float]:
        """Bounds on every value the observable can take."""
        vals = list(self.table.values())
        if not self.factored:
            vals.append(0.0)  # missing blocks
        return min(vals), max(vals)


def indicator_close() -> Observable:
    """1 when x_0 is a close bracket, 0 otherwise."""
    return Observable(1, {"a": 0.0, "b": 1.0})


def parse_observable_table(text: str) -> Observable:
    """Read lines ``"<block tokens over {a,b}>" <real>``.

    Blank lines and ``#`` comments are skipped.  All blocks must share one
    depth, and every open/close pattern of that depth must be present.
    """
    table: dict[str, float] = {}
    depth = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = shlex.split(line)
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '\"<block>\" <value>'")
        toks = parts[0].split()
        if not toks or any(t not in ("a", "b") for t in toks):
            raise ValueError(f"line {lineno}: block must use tokens 'a' and 'b'")
        if depth is None:
            depth = len(toks)
        elif len(toks) != depth:
            raise ValueError(f"line {lineno}: block depth {len(toks)} != {depth}")
        key = "".join(toks)
        if key in table:
            raise ValueError(f"line {lineno}: duplicate block {parts[0]!r}")
        table[key] = float(parts[1])
    if depth is None:
        raise ValueError("observable table is empty")
    return Observable(depth, table)


def load_observable(name: str) -> Observable:
    """``indicator-close`` or ``table:<path>``."""
    if name == "indicator-close":
        return indicator_close()
    if name.startswith("table:"):
        return parse_observable_table(Path(name[6:]).read_text())
    raise ValueError(f"unknown observable {name!r}")


def word_observable(depth: int, entries: Mapping[str, float]) -> Observable:
    """Non-factored observable from ``{"a1 b2": value, ...}``."""
    table = {parse_word(k): float(v) for k, v in entries.items()}
    return Observable(depth, table, factored=False)
