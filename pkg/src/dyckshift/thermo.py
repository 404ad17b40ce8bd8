"""Pressure, multifractal spectrum and level-1 rate functions.

Everything here works on the two full shifts on ``M + 1`` symbols obtained
by collapsing the closes (``gamma="alpha"``) or the opens (``gamma="beta"``).
A factored observable ``f`` only reads open/close patterns, so its pressure
is the log Perron root of a transfer matrix on ``{a, b}`` blocks in which the
non-collapsed letter carries multiplicity ``M``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .observable import Observable

GAMMAS = ("alpha", "beta")
POWER_TOL = 1e-14
POWER_MAX_ITER = 100_000
SOLVE_RTOL = 1e-10
# Minority masses this close to 1/2 are not trusted as certificates.
U_MARGIN = 1e-8
EDGE_TOL = 1e-9


class NumericFailure(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


def default_c0(f: Observable) -> float:
    return max(1.0, 1.0 - min(f.table.values()))


def _eig_guess(B: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eig(B)
    x = np.abs(vecs[:, int(np.argmax(vals.real))].real)
    if not np.all(np.isfinite(x)) or x.sum() <= 0:
        return np.full(B.shape[0], 1.0 / B.shape[0])
    return x / x.sum()


def perron(A: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER):
    """Perron root and right/left vectors of a nonnegative irreducible matrix.

    Power iteration with l1 normalisation; stops when successive root
    estimates agree to ``tol`` (relative) and the vectors have settled.
    The matrices are tiny, so a dense eigensolve supplies the start vector
    and the shift ``sigma``: iterating on ``A + sigma I`` leaves the Perron
    vectors alone but keeps near-periodic or nearly reducible matrices from
    stalling.
    """
    n = A.shape[0]
    sigma = float(max(np.abs(np.linalg.eigvals(A))))

    def iterate(B):
        x = _eig_guess(B)
        lam = 0.0
        for _ in range(max_iter):
            y = B @ x
            lam_new = y.sum()
            if not np.isfinite(lam_new) or lam_new <= 0:
                raise NumericFailure("power iteration produced a nonpositive root")
            y /= lam_new
            done = abs(lam_new - lam) <= tol * lam_new and np.max(np.abs(y - x)) <= 1e-13
            x, lam = y, lam_new
            if done:
                return lam, x
        raise NumericFailure(f"power iteration did not converge in {max_iter} steps")

    shift = sigma * np.eye(n)
    lam, v = iterate(A + shift)
    _, u = iterate(A.T + shift)
    return lam - sigma, v, u


def _blocks(k: int) -> list[str]:
    return ["".join(p) for p in itertools.product("ab", repeat=k)]


class BranchSystem:
    """Thermodynamic data of one full shift for a factored observable."""

    def __init__(self, M: int, gamma: str, f: Observable, c0: float | None = None):
        if M < 2:
            raise ValueError("M must be >= 2")
        if gamma not in GAMMAS:
            raise ValueError(f"gamma must be one of {GAMMAS}")
        if not f.factored:
            raise ValueError("pressure needs an observable factored through open/close")
        self.M, self.gamma, self.f = M, gamma, f
        self.c0 = default_c0(f) if c0 is None else float(c0)
        if not self.c0 > -min(f.table.values()):
            raise ValueError(f"c0={self.c0} must exceed -min f")
        self.collapsed = "b" if gamma == "alpha" else "a"
        k = f.depth
        # States are letters for k == 1 and (k-1)-blocks otherwise; an edge
        # appends one letter and reads the k-block ending in it.
        self.states = _blocks(max(k - 1, 1))
        index = {s: i for i, s in enumerate(self.states)}
        edges = []
        for i, u in enumerate(self.states):
            for x in "ab":
                block = x if k == 1 else u + x
                v = x if k == 1 else block[1:]
                mult = 1 if x == self.collapsed else M
                edges.append((i, index[v], mult, f.bar(block)))
        self.edges = edges
        n = len(self.states)
        self._mult = np.zeros((n, n))
        self._val = np.zeros((n, n))
        self._mask = np.zeros((n, n), dtype=bool)
        for i, j, m, val in edges:
            self._mult[i, j] = m
            self._val[i, j] = val + self.c0
            self._mask[i, j] = True

    # -- pressure -------------------------------------------------------

    def _reduced_costs(self, sign: float) -> np.ndarray:
        """``sign * (val - t)`` plus a potential difference, with ``t`` the
        optimal cycle mean: nonnegative everywhere, zero on optimal cycles."""
        return self._gauge(sign)[1]

    def _gauge(self, sign: float):
        key = "_gauge_pos" if sign > 0 else "_gauge_neg"
        if key not in self.__dict__:
            n = len(self.states)
            lam = self.t_minus if sign > 0 else self.t_plus
            w = {(i, j): sign * (val - lam) for i, j, _, val in self.edges}
            d = [0.0] * n
            for _ in range(n + 1):
                for (i, j), wt in w.items():
                    d[j] = min(d[j], d[i] + wt)
            R = np.full((n, n), np.inf)
            for (i, j), wt in w.items():
                R[i, j] = max(wt + d[i] - d[j], 0.0)
            self.__dict__[key] = (d, R)
        return self.__dict__[key]

    def _scaled(self, s: float):
        # Diagonal similarity by the potentials keeps the spectrum and P' but
        # pins the optimal cycles at weight 1, so no entry that matters
        # underflows however large |s| gets.
        sign = 1.0 if s <= 0 else -1.0
        R = self._reduced_costs(sign)
        tau = (self.t_minus if sign > 0 else self.t_plus) + self.c0
        with np.errstate(invalid="ignore"):
            A = np.where(self._mask, self._mult * np.exp(-abs(s) * R), 0.0)
        return A, s * tau

    def transfer_matrix(self, s: float) -> np.ndarray:
        return np.where(self._mask, self._mult * np.exp(s * self._val), 0.0)

    def _perron_data(self, s: float):
        A, shift = self._scaled(s)
        lam, v, u = perron(A)
        norm = u @ v
        dP = (u @ (A * self._val) @ v) / (lam * norm)
        return math.log(lam) + float(shift), float(dP), u, v, norm

    def pressure(self, s: float) -> tuple[float, float]:
        P, dP, *_ = self._perron_data(s)
        return P, dP

    def minority_mass(self, s: float) -> float:
        """Mass of the collapsed letter under the equilibrium state at ``s``."""
        _, _, u, v, norm = self._perron_data(s)
        pi = u * v / norm
        return float(sum(p for st, p in zip(self.states, pi) if st[-1] == self.collapsed))

    # -- domain -----------------------------------------------------------

    def _cycle_mean(self, sign: float) -> float:
        """Karp's minimum mean cycle of sign * f-bar over the block graph."""
        n = len(self.states)
        INF = math.inf
        D = [[0.0] * n] + [[INF] * n for _ in range(n)]
        for k in range(1, n + 1):
            for i, j, _, val in self.edges:
                cand = D[k - 1][i] + sign * val
                if cand < D[k][j]:
                    D[k][j] = cand
        best = INF
        for v in range(n):
            if D[n][v] == INF:
                continue
            worst = max((D[n][v] - D[k][v]) / (n - k) for k in range(n) if D[k][v] < INF)
            best = min(best, worst)
        return sign * best

    @cached_property
    def t_minus(self) -> float:
        return self._cycle_mean(1.0)

    @cached_property
    def t_plus(self) -> float:
        return self._cycle_mean(-1.0)

    def _endpoint(self, sign: float) -> tuple[float, float]:
        """Entropy and minority mass of the zero-temperature limit.

        Keeps the tight edges of the reweighted graph (those on optimal
        cycles, up to edges between components) and takes the largest
        multiplicity spectral radius among its strongly connected pieces.
        """
        n = len(self.states)
        R = self._reduced_costs(sign)
        B = np.zeros((n, n))
        for i, j, m, _ in self.edges:
            if R[i, j] <= EDGE_TOL:
                B[i, j] = m
        reach = (B > 0) | np.eye(n, dtype=bool)
        for k in range(n):
            reach = reach | (reach[:, [k]] & reach[[k], :])
        best_rho, best_mass = -1.0, 0.0
        seen = set()
        for i in range(n):
            if i in seen:
                continue
            comp = [j for j in range(n) if reach[i, j] and reach[j, i]]
            seen.update(comp)
            sub = B[np.ix_(comp, comp)]
            if not sub.any():
                continue
            vals, right = np.linalg.eig(sub)
            k = int(np.argmax(vals.real))
            rho = float(vals[k].real)
            lvals, left = np.linalg.eig(sub.T)
            kl = int(np.argmax(lvals.real))
            r, l = np.abs(right[:, k].real), np.abs(left[:, kl].real)
            pi = r * l / (r @ l)
            mass = float(
                sum(p for c, p in zip(comp, pi) if self.states[c][-1] == self.collapsed)
            )
            if rho > best_rho + 1e-12:
                best_rho, best_mass = rho, mass
            elif abs(rho - best_rho) <= 1e-12:
                best_mass = max(best_mass, mass)
        return math.log(best_rho), best_mass

    @cached_property
    def _lower_end(self):
        return self._endpoint(1.0)

    @cached_property
    def _upper_end(self):
        return self._endpoint(-1.0)

    def _at_endpoint(self, t: float) -> str | None:
        tol = 1e-12 * (1 + abs(t))
        if abs(t - self.t_minus) <= tol:
            return "lower"
        if abs(t - self.t_plus) <= tol:
            return "upper"
        return None

    # -- Legendre solve -------------------------------------------------

    def solve_s(self, t: float) -> float:
        """Solve P'(s) = t + c0 on the open domain (t_minus, t_plus)."""
        if not self.t_minus < t < self.t_plus or self._at_endpoint(t):
            raise DomainError(
                f"t={t!r} outside open domain ({self.t_minus!r}, {self.t_plus!r})"
            )
        tau = t + self.c0
        tol = SOLVE_RTOL * (1 + abs(tau))

        def g(s):
            return self.pressure(s)[1] - tau

        lo, hi = -1.0, 1.0
        while g(lo) > 0:
            lo *= 2
            if lo < -1e8:
                raise NumericFailure("could not bracket s(t) from below")
        while g(hi) < 0:
            hi *= 2
            if hi > 1e8:
                raise NumericFailure("could not bracket s(t) from above")
        s = 0.5 * (lo + hi)
        for _ in range(200):
            gs = g(s)
            if abs(gs) <= tol:
                return s
            if gs > 0:
                hi = s
            else:
                lo = s
            h = 1e-6 * max(1.0, abs(s))
            slope = (g(s + h) - g(s - h)) / (2 * h)
            step = s - gs / slope if slope > 0 else None
            s = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if abs(g(s)) <= tol:
            return s
        raise NumericFailure(f"s(t) solve did not converge at t={t!r}")

    def spectrum_point(self, t: float) -> "SpectrumPoint":
        s = self.solve_s(t)
        P, dP = self.pressure(s)
        tau = t + self.c0
        mass = self.minority_mass(s)
        return SpectrumPoint(t, s, P / tau - s, mass, mass < 0.5 - U_MARGIN, P, dP)

    def rate(self, t: float) -> "BranchRate":
        """I_{f,gamma}(t) = log(M+1) - (t + c0) b_gamma(t), tagged."""
        log_total = math.log(self.M + 1)
        end = self._at_endpoint(t)
        if end is not None:
            h, mass = self._lower_end if end == "lower" else self._upper_end
            return BranchRate(log_total - h, mass < 0.5 - U_MARGIN)
        if not self.t_minus < t < self.t_plus:
            return BranchRate(math.inf, False)
        sp = self.spectrum_point(t)
        return BranchRate(log_total - (t + self.c0) * sp.b, sp.in_U)

    @cached_property
    def t_star(self) -> float:
        """Zero of the branch rate: dI/dt = s(t) vanishes where s = 0."""
        return self.pressure(0.0)[1] - self.c0

    def inf_over(self, lo: float, hi: float) -> float:
        """inf of the convex branch rate over [lo, hi]."""
        a, b = max(lo, self.t_minus), min(hi, self.t_plus)
        if a > b:
            return math.inf
        return self.rate(min(max(self.t_star, a), b)).value

    def pressure_curve(self, s_values) -> "PressureCurve":
        samples = tuple((float(s), *self.pressure(s)) for s in s_values)
        return PressureCurve(self.gamma, self.c0, samples)


@dataclass(frozen=True)
class SpectrumPoint:
    t: float
    s_of_t: float
    b: float
    gibbs_minority_mass: float
    in_U: bool
    P: float
    Pprime: float


@dataclass(frozen=True)
class BranchRate:
    """A branch rate value; ``in_U`` False means it is the unconstrained
    Legendre value (or +inf outside the domain), not a certified one."""

    value: float
    in_U: bool

    @property
    def status(self) -> str:
        if math.isinf(self.value):
            return "outside"
        return "certified" if self.in_U else "unconstrained"

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PressureCurve:
    gamma: str
    c0: float
    samples: tuple


@dataclass(frozen=True)
class RateRow:
    t: float
    I: float
    I_alpha: float
    I_beta: float
    in_U_alpha: bool
    in_U_beta: bool
    branch: str


@dataclass(frozen=True)
class RateCurve:
    rows: tuple
    t_alpha: tuple[float, float]
    t_beta: tuple[float, float]


# -- functional surface --------------------------------------------------


def transfer_matrix(M, gamma, f, c0, s) -> np.ndarray:
    return BranchSystem(M, gamma, f, c0).transfer_matrix(s)


def pressure(M, gamma, f, c0, s) -> tuple[float, float]:
    return BranchSystem(M, gamma, f, c0).pressure(s)


def solve_s(M, gamma, f, c0, t) -> float:
    return BranchSystem(M, gamma, f, c0).solve_s(t)


def spectrum_point(M, gamma, f, c0, t) -> SpectrumPoint:
    return BranchSystem(M, gamma, f, c0).spectrum_point(t)


def rate_level1(M, gamma, f, c0, t) -> BranchRate:
    return BranchSystem(M, gamma, f, c0).rate(t)


def rate_closed_form_indicator(M: int, t: float) -> float:
    """Level-1 rate of the close-indicator observable, exact."""
    if not 0.0 <= t <= 1.0:
        return math.inf

    def xlogx(x):
        return 0.0 if x == 0 else x * math.log(x)

    ent = xlogx(t) + xlogx(1 - t)
    exponent = 1 - t if t <= 0.5 else t
    return ent + math.log(M + 1) - exponent * math.log(M)


class RateModel:
    """Both branches for one observable; evaluates I = min(I_alpha, I_beta)."""

    def __init__(self, M: int, f: Observable, c0: float | None = None):
        self.M = M
        self.alpha = BranchSystem(M, "alpha", f, c0)
        self.beta = BranchSystem(M, "beta", f, c0)

    def row(self, t: float) -> RateRow:
        a, b = self.alpha.rate(t), self.beta.rate(t)
        I = min(a.value, b.value)
        if math.isinf(I):
            branch = "none"
        elif abs(a.value - b.value) <= 1e-12 * (1 + abs(I)):
            branch = "tie"
        else:
            branch = "alpha" if a.value < b.value else "beta"
        return RateRow(t, I, a.value, b.value, a.in_U, b.in_U, branch)

    def __call__(self, t: float) -> float:
        return self.row(t).I

    def inf_over(self, lo: float, hi: float) -> float:
        return min(self.alpha.inf_over(lo, hi), self.beta.inf_over(lo, hi))

    def curve(self, grid) -> RateCurve:
        return RateCurve(
            tuple(self.row(float(t)) for t in grid),
            (self.alpha.t_minus, self.alpha.t_plus),
            (self.beta.t_minus, self.beta.t_plus),
        )


def rate_min(M, f, c0, t) -> float:
    return RateModel(M, f, c0)(t)


def rate_curve(M, f, c0, grid) -> RateCurve:
    return RateModel(M, f, c0).curve(grid)
