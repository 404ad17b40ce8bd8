"""Krieger's projections to the two full shifts on M+1 symbols and back.

Alpha words keep the opens ``a1..aM`` and collapse every close to ``b``;
beta words collapse every open to ``a`` and keep ``b1..bM``.  Both are tuples
of ints with ``0`` standing for the collapsed letter, so an alpha word uses
``{1..M} u {0}`` and a beta word ``{0} u {-1..-M}``.

The inverse maps recover the collapsed indices by height matching.  They are
only defined on periodic words and finite windows.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Sequence

from .dyck import Word, parse_word, token

_AW = re.compile(r"^a([1-9][0-9]*)$")
_BW = re.compile(r"^b([1-9][0-9]*)$")


class KriegerError(ValueError):
    pass


def parse_alpha_word(text: str, M: int | None = None) -> tuple[int, ...]:
    out = []
    for tok in text.split():
        if tok == "b":
            out.append(0)
            continue
        m = _AW.match(tok)
        if m is None or (M is not None and int(m.group(1)) > M):
            raise ValueError(f"bad alpha-word token {tok!r}")
        out.append(int(m.group(1)))
    return tuple(out)


def parse_beta_word(text: str, M: int | None = None) -> tuple[int, ...]:
    out = []
    for tok in text.split():
        if tok == "a":
            out.append(0)
            continue
        m = _BW.match(tok)
        if m is None or (M is not None and int(m.group(1)) > M):
            raise ValueError(f"bad beta-word token {tok!r}")
        out.append(-int(m.group(1)))
    return tuple(out)


def format_alpha_word(y: Sequence[int]) -> str:
    return " ".join("b" if c == 0 else token(c) for c in y)


def format_beta_word(y: Sequence[int]) -> str:
    return " ".join("a" if c == 0 else token(c) for c in y)


def phi_alpha(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(c if c > 0 else 0 for c in w)


def phi_beta(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(c if c < 0 else 0 for c in w)


def _steps_alpha(y: Sequence[int]) -> list[int]:
    return [1 if c > 0 else -1 for c in y]


def _steps_beta(y: Sequence[int]) -> list[int]:
    return [1 if c == 0 else -1 for c in y]


class _PeriodicHeights:
    """H_j on the periodic extension of one period of +-1 steps, j in Z."""

    def __init__(self, steps: Sequence[int]):
        self.n = len(steps)
        h = [0]
        for s in steps:
            h.append(h[-1] + s)
        self.h = h
        self.drift = h[-1]
        # Any attainable level is reached within this many periods.
        self.periods = (max(h) - min(h)) // max(abs(self.drift), 1) + 2

    def __getitem__(self, j: int) -> int:
        q, r = divmod(j, self.n)
        return self.h[r] + q * self.drift

    def match_left(self, i: int) -> int | None:
        """max{j <= i : H_j = H_{i+1}}, scanning a bounded number of periods."""
        target = self[i + 1]
        for j in range(i, i - self.periods * self.n - 1, -1):
            if self[j] == target:
                return j
        return None

    def match_right(self, i: int) -> int | None:
        """min{j > i : H_j = H_i} - 1, scanning a bounded number of periods."""
        target = self[i]
        for j in range(i + 1, i + self.periods * self.n + 2):
            if self[j] == target:
                return j - 1
        return None


def psi_alpha_periodic(y: Sequence[int]) -> Word:
    """Reinstate close indices of a periodic alpha word.

    Requires at least as many opens as collapsed closes per period.
    """
    n = len(y)
    if n == 0:
        raise KriegerError("empty word")
    closes = sum(1 for c in y if c == 0)
    if closes > n - closes:
        raise KriegerError("more closes than opens: image is not n-periodic")
    H = _PeriodicHeights(_steps_alpha(y))
    out = list(y)
    for i, c in enumerate(y):
        if c == 0:
            s = H.match_left(i)
            if s is None:
                raise KriegerError(f"close at {i} has no matching open")
            out[i] = -y[s % n]
    return tuple(out)


def psi_beta_periodic(y: Sequence[int]) -> Word:
    """Reinstate open indices of a periodic beta word (mirror of psi_alpha)."""
    n = len(y)
    if n == 0:
        raise KriegerError("empty word")
    opens = sum(1 for c in y if c == 0)
    if opens > n - opens:
        raise KriegerError("more opens than closes: image is not n-periodic")
    H = _PeriodicHeights(_steps_beta(y))
    out = list(y)
    for i, c in enumerate(y):
        if c == 0:
            s = H.match_right(i)
            if s is None:
                raise KriegerError(f"open at {i} has no matching close")
            out[i] = -y[s % n]
    return tuple(out)


def in_B_alpha_periodic(w: Sequence[int]) -> bool:
    """Every close of the periodic point is closed by an open to its left."""
    H = _PeriodicHeights([1 if c > 0 else -1 for c in w])
    return all(H.match_left(i) is not None for i, c in enumerate(w) if c < 0)


def in_B_beta_periodic(w: Sequence[int]) -> bool:
    """Every open of the periodic point is closed by a close to its right."""
    H = _PeriodicHeights([1 if c > 0 else -1 for c in w])
    return all(H.match_right(i) is not None for i, c in enumerate(w) if c > 0)


# --- finite windows -------------------------------------------------------


def _window_heights(window: Sequence[int], lo: int) -> dict[int, int]:
    """H_j for j in [lo, lo+len], anchored so that H_0 = 0."""
    h = {lo: 0}
    for idx, c in enumerate(window):
        h[lo + idx + 1] = h[lo + idx] + (1 if c > 0 else -1)
    shift = h[0]
    return {j: v - shift for j, v in h.items()}


def s_alpha_window(window: Sequence[int], lo: int, i: int) -> int | None:
    """s_alpha(i, y) evaluated on a window covering coordinates lo..lo+len-1.

    Returns None when the matching position falls outside the window.
    """
    if not lo <= 0 < lo + len(window):
        raise ValueError("window must contain coordinate 0")
    H = _window_heights(window, lo)
    target = H[i + 1]
    for j in range(i, lo - 1, -1):
        if H[j] == target:
            return j
    return None


def psi_alpha_window(window: Sequence[int], lo: int) -> list[int | None]:
    """psi_alpha on a finite alpha-word window; None where undetermined."""
    out: list[int | None] = []
    for idx, c in enumerate(window):
        if c != 0:
            out.append(c)
            continue
        s = s_alpha_window(window, lo, lo + idx)
        out.append(None if s is None else -window[s - lo])
    return out


def window_closes_matched(window: Sequence[int], lo: int) -> bool:
    """All closes are matched inside the window.

    Padding such a window with ``a1`` on both sides gives a point of K_alpha.
    """
    return all(x is not None for x in psi_alpha_window(window, lo))


@dataclass(frozen=True)
class WitnessPair:
    N: int
    lo: int
    hi: int
    window1: tuple[int, ...]
    window2: tuple[int, ...]
    image1: tuple
    image2: tuple
    mismatch_at: int

    def coord(self, j: int, which: int = 1) -> int:
        w = self.window1 if which == 1 else self.window2
        return w[j - self.lo]

    def to_json(self) -> str:
        def img(xs):
            return ["?" if x is None else token(x) for x in xs]

        return json.dumps(
            {
                "N": self.N,
                "coords": [self.lo, self.hi],
                "window1": format_alpha_word(self.window1).split(),
                "window2": format_alpha_word(self.window2).split(),
                "image1": img(self.image1),
                "image2": img(self.image2),
                "mismatch_at": self.mismatch_at,
            }
        )


def extension_witness(M: int, N: int, k1: int, k2: int) -> WitnessPair:
    """Two K_alpha windows that agree on [-N, N] but whose images differ at 0.

    Closes fill [-N, 0], so the close at 0 is matched N+1 opens to the left
    of -N, inside the region where the windows disagree.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    for k in (k1, k2):
        if not 1 <= k <= M:
            raise ValueError(f"index {k} outside 1..{M}")
    if k1 == k2:
        raise ValueError("k1 and k2 must differ")
    lo, hi = -(2 * N + 1), N

    def build(k: int) -> tuple[int, ...]:
        return tuple(k if j < -N else 0 if j <= 0 else 1 for j in range(lo, hi + 1))

    w1, w2 = build(k1), build(k2)
    im1, im2 = tuple(psi_alpha_window(w1, lo)), tuple(psi_alpha_window(w2, lo))
    # Every close on [-N, 0] differs; coordinate 0 is the reported one.
    if im1[-lo] is None or im1[-lo] == im2[-lo]:
        raise AssertionError("witness construction failed to separate images at 0")
    return WitnessPair(N, lo, hi, w1, w2, im1, im2, 0)


def parse_krieger_input(kind: str, text: str, M: int | None = None):
    if kind in ("phi-a", "phi-b"):
        return parse_word(text, M)
    if kind == "psi-a":
        return parse_alpha_word(text, M)
    if kind == "psi-b":
        return parse_beta_word(text, M)
    raise ValueError(f"unknown map {kind!r}")
