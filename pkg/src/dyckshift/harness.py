"""Finite-n experiments over exact periodic-point enumerations.

Every table here is built from integer counts; logarithms and ratios are
taken only when rows are emitted, so results do not depend on how the
enumeration was sharded.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from typing import Sequence

from .dyck import final_height, word_alphabet
from .observable import Observable
from .periodic import DEFAULT_BUDGET, MultiplierClass, _dfs, census, check_budget
from .thermo import RateModel

SCOPES = ("all", "a0", "a", "b")
BIN_EPS = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    M: int
    n_list: Sequence[int]
    observable: Observable
    bin_width: float = 0.05
    scope: str = "all"
    workers: int = 1
    budget: float = DEFAULT_BUDGET
    c0: float | None = None

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ValueError("bin_width must be positive")
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}")
        for n in self.n_list:
            check_budget(self.M, n, self.budget)


@dataclass(frozen=True)
class HistogramRow:
    n: int
    bin_lo: float
    bin_hi: float
    count: int
    total: int
    analytic_inf: float

    @property
    def emp_rate(self) -> float:
        if self.count == 0:
            return math.inf
        return (math.log(self.total) - math.log(self.count)) / self.n


@dataclass(frozen=True)
class ConcentrationRow:
    n: int
    cls: str
    symbol: str
    mean_freq: float
    target: float
    l1_total: float


@dataclass(frozen=True)
class NeutralRow:
    n: int
    rate: float
    limit: float
    gap: float


def in_scope(h: int, scope: str) -> bool:
    if scope == "all":
        return True
    if scope == "a0":
        return h >= 0
    if scope == "b":
        return h < 0
    if scope == "a":
        return h > 0
    raise ValueError(f"unknown scope {scope!r}")


def _map_shards(fn, jobs, workers):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with Pool(min(workers, len(jobs))) as pool:
        return pool.map(fn, jobs)


# -- level 1 ---------------------------------------------------------------


def bin_range(f: Observable, bw: float) -> tuple[int, int]:
    lo, hi = f.value_range()
    i0 = math.floor(lo / bw + BIN_EPS)
    i1 = max(math.ceil(hi / bw - BIN_EPS), i0 + 1)
    return i0, i1


def bin_index(x: float, bw: float, i0: int, i1: int) -> int:
    i = math.floor(x / bw + BIN_EPS)
    return min(max(i, i0), i1 - 1)  # last bin is closed


def _edge(i: int, bw: float) -> float:
    return float(format(i * bw, ".12g"))


def _level1_shard(args) -> Counter:
    M, n, first, scope, f, bw, i0, i1 = args
    k = f.depth
    hist: Counter = Counter()
    for w in _dfs(M, n, None, first):
        if not in_scope(final_height(w), scope):
            continue
        ww = w + w[: k - 1]
        total = sum(f(ww[i : i + k]) for i in range(n))
        hist[bin_index(total / n, bw, i0, i1)] += 1
    return hist


def level1_histogram(cfg: ExperimentConfig, n: int) -> tuple[dict[int, int], tuple[int, int]]:
    if cfg.observable.depth > n:
        raise ValueError(f"observable depth exceeds n={n}")
    i0, i1 = bin_range(cfg.observable, cfg.bin_width)
    jobs = [
        (cfg.M, n, c, cfg.scope, cfg.observable, cfg.bin_width, i0, i1)
        for c in word_alphabet(cfg.M)
    ]
    hist: Counter = Counter()
    for part in _map_shards(_level1_shard, jobs, cfg.workers):
        hist.update(part)
    return dict(hist), (i0, i1)


def analytic_inf(model: RateModel | None, lo: float, hi: float) -> float:
    """Infimum of the rate over the closed bin; NaN for non-factored f."""
    if model is None:
        return math.nan
    return model.inf_over(lo, hi)


def run_level1(cfg: ExperimentConfig) -> list[HistogramRow]:
    f = cfg.observable
    model = RateModel(cfg.M, f, cfg.c0) if f.factored else None
    rows = []
    inf_cache: dict[int, float] = {}
    for n in cfg.n_list:
        hist, (i0, i1) = level1_histogram(cfg, n)
        total = sum(hist.values())
        for i in range(i0, i1):
            lo, hi = _edge(i, cfg.bin_width), _edge(i + 1, cfg.bin_width)
            if i not in inf_cache:
                inf_cache[i] = analytic_inf(model, lo, hi)
            rows.append(HistogramRow(n, lo, hi, hist.get(i, 0), total, inf_cache[i]))
    return rows


# -- level 2 ---------------------------------------------------------------


def _level2_shard(args):
    M, n, first, scope = args
    cls = MultiplierClass.NEGATIVE if scope == "a" else MultiplierClass.POSITIVE
    letters: Counter = Counter()
    words = 0
    for w in _dfs(M, n, cls, first):
        words += 1
        letters.update(w)
    return words, letters


def run_level2_concentration(cfg: ExperimentConfig) -> list[ConcentrationRow]:
    """Mean 1-cylinder frequencies of one multiplier class against the
    maximal-entropy masses ``1/(M+1)``.

    Class ``a`` (negative multiplier) reports each open and the aggregate
    close mass; class ``b`` reports the aggregate open mass and each close.
    """
    scope = {"a0": "a"}.get(cfg.scope, cfg.scope)
    if scope not in ("a", "b"):
        raise ValueError("level-2 concentration needs scope 'a' or 'b'")
    M = cfg.M
    target = Fraction(1, M + 1)
    rows = []
    for n in cfg.n_list:
        jobs = [(M, n, c, scope) for c in word_alphabet(M)]
        words = 0
        letters: Counter = Counter()
        for nw, cnt in _map_shards(_level2_shard, jobs, cfg.workers):
            words += nw
            letters.update(cnt)
        if words == 0:
            continue
        denom = words * n
        opens = {k: Fraction(letters[k], denom) for k in range(1, M + 1)}
        closes = {k: Fraction(letters[-k], denom) for k in range(1, M + 1)}
        if scope == "a":
            entries = [(f"a{k}", v) for k, v in opens.items()]
            entries.append(("b", sum(closes.values())))
        else:
            entries = [("a", sum(opens.values()))]
            entries += [(f"b{k}", v) for k, v in closes.items()]
        l1 = float(sum(abs(v - target) for _, v in entries))
        rows += [ConcentrationRow(n, scope, sym, float(v), float(target), l1) for sym, v in entries]
    return rows


# -- neutral class ----------------------------------------------------------


def run_neutral_decay(M: int, n_list: Sequence[int], budget: float = DEFAULT_BUDGET) -> list[NeutralRow]:
    limit = math.log(2 * math.sqrt(M))
    rows = []
    for n in n_list:
        if n % 2:
            raise ValueError(f"neutral decay needs even n, got {n}")
        rate = math.log(census(M, n, budget=budget).neutral) / n
        rows.append(NeutralRow(n, rate, limit, limit - rate))
    return rows
