"""Periodic points of the Dyck shift.

A length-``n`` word ``w`` stands for the point of ``Per_n`` whose coordinates
``0..n-1`` spell ``w``; it is admissible when the bi-infinite repetition never
reduces to zero.  Words are enumerated in letter order ``a1 < .. < aM < b1 <
.. < bM``.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from typing import Iterator, Sequence

from .dyck import ZERO, final_height, reduce_word, word_alphabet
from .observable import Observable

DEFAULT_BUDGET = 10**8


class WorkBudgetExceeded(RuntimeError):
    pass


class MultiplierClass(enum.Enum):
    NEGATIVE = "neg"  # H_n > 0
    POSITIVE = "pos"  # H_n < 0
    NEUTRAL = "neutral"

    @classmethod
    def of_height(cls, h: int) -> "MultiplierClass":
        if h > 0:
            return cls.NEGATIVE
        if h < 0:
            return cls.POSITIVE
        return cls.NEUTRAL


def check_budget(M: int, n: int, budget: float = DEFAULT_BUDGET) -> None:
    if M < 2:
        raise ValueError("M must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n * math.log(M + 1) > math.log(budget):
        raise WorkBudgetExceeded(
            f"(M+1)^n = {M + 1}^{n} exceeds work budget {budget:g}"
        )


def is_periodic_admissible(w: Sequence[int]) -> bool:
    # One junction between consecutive copies decides every junction.
    if not w:
        raise ValueError("periodic word must be nonempty")
    return reduce_word(tuple(w) * 2) is not ZERO


def naive_periodic_admissible(w: Sequence[int], copies: int | None = None) -> bool:
    """Oracle: stream ``w^k`` letter by letter for every ``k <= 2|w|``.

    Zero is absorbing, so checking the running reduction at each copy
    boundary is the same as reducing every ``w^k`` separately.
    """
    n = len(w)
    if n == 0:
        raise ValueError("periodic word must be nonempty")
    copies = 2 * n if copies is None else copies
    opens: list[int] = []
    for _ in range(copies):
        for c in w:
            if c > 0:
                opens.append(c)
            elif opens and opens.pop() != -c:
                return False
    return True


def classify(w: Sequence[int]) -> MultiplierClass:
    if not is_periodic_admissible(w):
        raise ValueError("word is not periodically admissible")
    return MultiplierClass.of_height(final_height(w))


@dataclass(frozen=True)
class PeriodicCensus:
    M: int
    n: int
    total: int
    negative: int
    positive: int
    neutral: int

    def count(self, cls: MultiplierClass) -> int:
        return {
            MultiplierClass.NEGATIVE: self.negative,
            MultiplierClass.POSITIVE: self.positive,
            MultiplierClass.NEUTRAL: self.neutral,
        }[cls]


def _class_ok(cls, h: int, remaining: int) -> bool:
    if cls is None:
        return True
    if cls is MultiplierClass.NEGATIVE:
        return h + remaining > 0
    if cls is MultiplierClass.POSITIVE:
        return h - remaining < 0
    return abs(h) <= remaining


def _dfs(M: int, n: int, cls, first: int | None = None) -> Iterator[tuple[int, ...]]:
    """Depth-first walk over prefixes with an undoable reduction state.

    A prefix is cut as soon as it reduces to zero or can no longer reach the
    requested class; the cyclic junction is checked on complete words.
    """
    letters = word_alphabet(M)
    word = [0] * n
    opens: list[int] = []
    closes: list[int] = []

    def junction_ok() -> bool:
        m = min(len(opens), len(closes))
        for i in range(m):
            if opens[-1 - i] != closes[i]:
                return False
        return True

    def rec(d: int, choices) -> Iterator[tuple[int, ...]]:
        for c in choices:
            # apply
            if c > 0:
                opens.append(c)
                undo = 0
            elif opens:
                if opens[-1] != -c:
                    continue
                opens.pop()
                undo = 1
            else:
                closes.append(-c)
                undo = 2
            word[d] = c
            if _class_ok(cls, len(opens) - len(closes), n - d - 1):
                if d + 1 == n:
                    if junction_ok():
                        yield tuple(word)
                else:
                    yield from rec(d + 1, letters)
            # undo
            if undo == 0:
                opens.pop()
            elif undo == 1:
                opens.append(-c)
            else:
                closes.pop()

    yield from rec(0, letters if first is None else (first,))


def _shard_words(args) -> list[tuple[int, ...]]:
    M, n, cls, first = args
    return list(_dfs(M, n, cls, first))


def _shard_counts(args) -> Counter:
    M, n, cls, first = args
    cnt: Counter = Counter()
    for w in _dfs(M, n, cls, first):
        cnt[final_height(w)] += 1
    return cnt


def _run_shards(fn, M, n, cls, workers):
    jobs = [(M, n, cls, c) for c in word_alphabet(M)]
    if workers <= 1:
        return [fn(j) for j in jobs]
    with Pool(min(workers, len(jobs))) as pool:
        return pool.map(fn, jobs)


def enumerate_periodic(
    M: int,
    n: int,
    class_filter: MultiplierClass | None = None,
    *,
    budget: float = DEFAULT_BUDGET,
    workers: int = 1,
) -> Iterator[tuple[int, ...]]:
    """Yield every admissible length-``n`` word once, in letter order.

    With ``workers > 1`` the search is sharded by first letter and the
    shards are concatenated in letter order, so the stream is unchanged.
    """
    check_budget(M, n, budget)
    if workers <= 1:
        return _dfs(M, n, class_filter)
    shards = _run_shards(_shard_words, M, n, class_filter, workers)
    return (w for shard in shards for w in shard)


def _census_from_heights(M: int, n: int, heights: Counter) -> PeriodicCensus:
    neg = sum(v for h, v in heights.items() if h > 0)
    pos = sum(v for h, v in heights.items() if h < 0)
    neu = heights.get(0, 0)
    return PeriodicCensus(M, n, neg + pos + neu, neg, pos, neu)


def census_by_enumeration(
    M: int, n: int, *, budget: float = DEFAULT_BUDGET, workers: int = 1
) -> PeriodicCensus:
    check_budget(M, n, budget)
    total: Counter = Counter()
    for cnt in _run_shards(_shard_counts, M, n, None, workers):
        total.update(cnt)
    return _census_from_heights(M, n, total)


def pattern_weights(M: int, n: int) -> dict[tuple[int, int], int]:
    """Number of admissible periodic words by (unmatched closes, unmatched opens).

    Walks open/close patterns with a DP on ``(p, q)``.  For a fixed pattern
    each matched pair and each unmatched bracket picks its index freely,
    except that the ``min(p, q)`` brackets meeting at the cyclic junction are
    forced, giving ``M ** (matched + max(p, q))`` words.
    """
    states = {(0, 0): 1}
    for _ in range(n):
        nxt: dict[tuple[int, int], int] = {}
        for (p, q), k in states.items():
            key = (p, q + 1)
            nxt[key] = nxt.get(key, 0) + k
            key = (p, q - 1) if q else (p + 1, q)
            nxt[key] = nxt.get(key, 0) + k
        states = nxt
    return {
        (p, q): k * M ** ((n - p - q) // 2 + max(p, q)) for (p, q), k in states.items()
    }


def census(M: int, n: int, *, budget: float = DEFAULT_BUDGET) -> PeriodicCensus:
    """Exact counts of ``Per_n`` split by multiplier class."""
    check_budget(M, n, budget)
    heights: Counter = Counter()
    for (p, q), k in pattern_weights(M, n).items():
        heights[q - p] += k
    return _census_from_heights(M, n, heights)


def neutral_formula(M: int, n: int) -> int:
    return 0 if n % 2 else math.comb(n, n // 2) * M ** (n // 2)


def cyclic_blocks(w: Sequence[int], k: int) -> Iterator[tuple[int, ...]]:
    n = len(w)
    if not 1 <= k <= n:
        raise ValueError(f"block length {k} outside 1..{n}")
    ww = tuple(w) + tuple(w[: k - 1])
    for i in range(n):
        yield ww[i : i + k]


def birkhoff_sum(w: Sequence[int], f: Observable) -> float:
    return sum(f(b) for b in cyclic_blocks(w, f.depth))


def birkhoff_average(w: Sequence[int], f: Observable) -> float:
    if f.depth > len(w):
        raise ValueError(f"observable depth {f.depth} exceeds word length {len(w)}")
    return birkhoff_sum(w, f) / len(w)


def empirical_cylinders(w: Sequence[int], k: int) -> dict[tuple[int, ...], Fraction]:
    """Cyclic ``k``-block frequencies of ``w``, exact."""
    n = len(w)
    counts = Counter(cyclic_blocks(w, k))
    return {b: Fraction(c, n) for b, c in sorted(counts.items())}
