import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyckshift.observable import Observable, indicator_close, word_observable
from dyckshift.thermo import (
    BranchSystem,
    DomainError,
    NumericFailure,
    RateModel,
    perron,
    pressure,
    rate_closed_form_indicator,
    rate_curve,
    rate_level1,
    rate_min,
    solve_s,
    spectrum_point,
    transfer_matrix,
)

IND = indicator_close()
DEPTH2 = Observable(2, {"aa": 0.3, "ab": 1.0, "ba": -0.5, "bb": 2.0})
tables2 = st.tuples(*[st.floats(-2, 2) for _ in range(4)]).map(
    lambda v: Observable(2, dict(zip(("aa", "ab", "ba", "bb"), v)))
)


def rho(A):
    return max(abs(np.linalg.eigvals(A)))


@pytest.mark.parametrize("M", [2, 3, 5])
def test_transfer_matrix_spectral_radius(M):
    assert rho(transfer_matrix(M, "alpha", IND, 1.0, 0.0)) == pytest.approx(M + 1, rel=1e-12)
    assert rho(transfer_matrix(M, "beta", IND, 1.0, 0.0)) == pytest.approx(M + 1, rel=1e-12)
    for s in (-2.0, -0.3, 0.7, 1.5):
        A = transfer_matrix(M, "alpha", IND, 1.0, s)
        assert np.linalg.matrix_rank(A) == 1
        assert rho(A) == pytest.approx(M * math.exp(s) + math.exp(2 * s), rel=1e-12)


def _cyclic_partition(M, gamma, f, c0, s, n):
    """Sum over all n-periodic open/close patterns, weighted by multiplicity."""
    collapsed = "b" if gamma == "alpha" else "a"
    k = f.depth
    Z = 0.0
    for p in itertools.product("ab", repeat=n):
        pp = "".join(p) + "".join(p[: k - 1])
        S = sum(f.bar(pp[i : i + k]) + c0 for i in range(n))
        mult = M ** sum(1 for x in p if x != collapsed)
        Z += mult * math.exp(s * S)
    return Z


@pytest.mark.parametrize("gamma", ["alpha", "beta"])
@pytest.mark.parametrize("f", [IND, DEPTH2, Observable(3, {"".join(b): float(i % 3) for i, b in enumerate(itertools.product("ab", repeat=3))})])
def test_transfer_matrix_matches_brute_force_partition(gamma, f):
    M, c0, s, n = 3, 2.5, 0.37, 8
    A = transfer_matrix(M, gamma, f, c0, s)
    trace = float(np.trace(np.linalg.matrix_power(A, n)))
    assert trace == pytest.approx(_cyclic_partition(M, gamma, f, c0, s, n), rel=1e-10)


def test_pressure_examples():
    M = 2
    P, dP = pressure(M, "alpha", IND, 1.0, 0.0)
    assert P == pytest.approx(math.log(M + 1), abs=1e-12)
    assert dP == pytest.approx((M + 2) / (M + 1), rel=1e-12)
    _, low = pressure(M, "alpha", IND, 1.0, -40.0)
    _, high = pressure(M, "alpha", IND, 1.0, 40.0)
    assert low == pytest.approx(1.0, abs=1e-12)
    assert high == pytest.approx(2.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(tables2, st.floats(-3, 3), st.sampled_from(["alpha", "beta"]), st.integers(2, 5))
def test_pprime_matches_central_differences(f, s, gamma, M):
    sys_ = BranchSystem(M, gamma, f)
    h = 1e-5
    fd = (sys_.pressure(s + h)[0] - sys_.pressure(s - h)[0]) / (2 * h)
    assert sys_.pressure(s)[1] == pytest.approx(fd, rel=1e-8, abs=1e-8)


def test_power_iteration_against_eig():
    rng = np.random.default_rng(3)
    A = rng.random((6, 6)) + 0.05
    lam, v, u = perron(A)
    assert lam == pytest.approx(rho(A), rel=1e-12)
    assert np.allclose(A @ v, lam * v, rtol=1e-10)
    assert np.allclose(u @ A, lam * u, rtol=1e-10)


def test_power_iteration_budget():
    A = np.array([[1.0, 1.0], [1.0, 0.99]])
    with pytest.raises(NumericFailure):
        perron(A, max_iter=1)


def test_pressure_curve_invariants():
    sys_ = BranchSystem(3, "beta", DEPTH2)
    curve = sys_.pressure_curve(np.linspace(-4, 4, 81))
    P = np.array([p for _, p, _ in curve.samples])
    assert np.all(np.diff(P, 2) >= -1e-10)
    assert sys_.pressure(0.0)[0] == pytest.approx(math.log(4), abs=1e-10)


@pytest.mark.parametrize("M", [2, 5])
def test_solve_s_examples(M):
    assert solve_s(M, "alpha", IND, 1.0, 1 / (M + 1)) == pytest.approx(0.0, abs=1e-9)
    assert solve_s(M, "beta", IND, 1.0, M / (M + 1)) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(DomainError):
        solve_s(M, "alpha", IND, 1.0, 0.0)
    with pytest.raises(DomainError):
        solve_s(M, "alpha", IND, 1.0, 1.0)


@settings(max_examples=25, deadline=None)
@given(tables2, st.floats(0.02, 0.98), st.sampled_from(["alpha", "beta"]))
def test_solve_s_tolerance(f, frac, gamma):
    sys_ = BranchSystem(2, gamma, f)
    if sys_.t_plus - sys_.t_minus < 1e-3:
        return
    t = sys_.t_minus + frac * (sys_.t_plus - sys_.t_minus)
    s = sys_.solve_s(t)
    tau = t + sys_.c0
    assert abs(sys_.pressure(s)[1] - tau) <= 1e-10 * (1 + abs(tau))


def test_spectrum_point_examples():
    M = 2
    t = 1 / (M + 1)
    sp = spectrum_point(M, "alpha", IND, 1.0, t)
    assert sp.b == pytest.approx(math.log(M + 1) / (t + 1), rel=1e-10)
    assert sp.gibbs_minority_mass == pytest.approx(1 / (M + 1), rel=1e-9)
    assert sp.in_U
    assert spectrum_point(2, "alpha", IND, 1.0, 0.49).in_U
    assert not spectrum_point(2, "alpha", IND, 1.0, 0.6).in_U


def test_minority_mass_closed_form_depth1():
    M = 3
    sys_ = BranchSystem(M, "alpha", IND, 1.0)
    for s in (-1.5, 0.2, 2.0):
        w_b, w_a = math.exp(2 * s), M * math.exp(s)
        assert sys_.minority_mass(s) == pytest.approx(w_b / (w_a + w_b), rel=1e-10)


def test_rate_level1_examples():
    M = 2
    assert rate_level1(M, "alpha", IND, 1.0, 1 / 3).value == pytest.approx(0.0, abs=1e-10)
    assert rate_level1(M, "alpha", IND, 1.0, -0.1).value == math.inf
    assert rate_level1(M, "alpha", IND, 1.0, 0.0).value == pytest.approx(math.log(1.5), abs=1e-12)
    r = rate_level1(M, "alpha", IND, 1.0, 0.7)
    assert r.status == "unconstrained"
    assert rate_level1(M, "alpha", IND, 1.0, 0.2).status == "certified"
    assert rate_level1(M, "alpha", IND, 1.0, 2.0).status == "outside"


@pytest.mark.parametrize("M", [2, 3, 7])
def test_closed_form_examples(M):
    assert rate_closed_form_indicator(M, 0.5) == pytest.approx(math.log((M + 1) / math.sqrt(4 * M)), abs=1e-14)
    assert rate_closed_form_indicator(M, 1 / (M + 1)) == pytest.approx(0.0, abs=1e-14)
    assert rate_closed_form_indicator(M, M / (M + 1)) == pytest.approx(0.0, abs=1e-14)
    assert rate_closed_form_indicator(M, 1.5) == math.inf
    assert rate_closed_form_indicator(M, -0.01) == math.inf
    end = math.log((M + 1) / M)
    assert rate_closed_form_indicator(M, 0.0) == pytest.approx(end, abs=1e-14)
    assert rate_closed_form_indicator(M, 1.0) == pytest.approx(end, abs=1e-14)


def test_rate_min_examples():
    M = 2
    model = RateModel(M, IND, 1.0)
    a = model.row(1 / 3)
    assert a.I == pytest.approx(0, abs=1e-10) and a.branch == "alpha"
    b = model.row(2 / 3)
    assert b.I == pytest.approx(0, abs=1e-10) and b.branch == "beta"
    assert rate_min(M, IND, 1.0, 0.5) == pytest.approx(math.log(3 / math.sqrt(8)), abs=1e-12)
    assert model.row(0.5).branch == "tie"
    assert model.row(1.2).branch == "none"


@pytest.mark.parametrize("M", [2, 5])
def test_matches_closed_form(M):
    model = RateModel(M, IND, 1.0)
    for i in range(0, 51):
        t = i / 50
        assert model(t) == pytest.approx(rate_closed_form_indicator(M, t), abs=1e-8)


@pytest.mark.parametrize("f", [IND, DEPTH2])
def test_rate_convexity_and_domain(f):
    for gamma in ("alpha", "beta"):
        sys_ = BranchSystem(3, gamma, f)
        ts = np.linspace(sys_.t_minus, sys_.t_plus, 61)
        I = np.array([sys_.rate(t).value for t in ts])
        assert np.all(np.isfinite(I))
        assert np.all(np.diff(I, 2) >= -1e-9)
        assert sys_.rate(sys_.t_minus - 0.01).value == math.inf
        assert sys_.rate(sys_.t_plus + 0.01).value == math.inf


def _brute_cycle_means(f, max_len=5):
    means = []
    k = f.depth
    for L in range(1, max_len + 1):
        for p in itertools.product("ab", repeat=L):
            pp = "".join(p) * (k + 1)
            means.append(sum(f.bar(pp[i : i + k]) for i in range(L)) / L)
    return min(means), max(means)


@pytest.mark.parametrize("f", [IND, DEPTH2])
def test_domain_endpoints(f):
    sys_ = BranchSystem(2, "alpha", f)
    lo, hi = _brute_cycle_means(f)
    assert sys_.t_minus == pytest.approx(lo, abs=1e-12)
    assert sys_.t_plus == pytest.approx(hi, abs=1e-12)
    assert sys_.pressure(-2000)[1] - sys_.c0 == pytest.approx(lo, abs=1e-6)
    assert sys_.pressure(2000)[1] - sys_.c0 == pytest.approx(hi, abs=1e-6)


def test_endpoint_values_are_continuous_limits():
    sys_ = BranchSystem(3, "alpha", DEPTH2)
    for end, inward in ((sys_.t_minus, 1), (sys_.t_plus, -1)):
        near = sys_.rate(end + inward * 1e-7).value
        assert sys_.rate(end).value == pytest.approx(near, abs=1e-4)


def test_c0_independence():
    for f in (IND, DEPTH2):
        m1, m2 = RateModel(2, f, 2.5), RateModel(2, f, 4.0)
        lo = m1.alpha.t_minus
        hi = m1.alpha.t_plus
        for t in np.linspace(lo, hi, 23):
            assert m1(t) == pytest.approx(m2(t), abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(tables2, st.floats(0.05, 0.95), st.floats(-5, 5))
def test_legendre_supporting_line(f, frac, s_other):
    sys_ = BranchSystem(2, "alpha", f)
    if sys_.t_plus - sys_.t_minus < 1e-3:
        return
    t = sys_.t_minus + frac * (sys_.t_plus - sys_.t_minus)
    sp = sys_.spectrum_point(t)
    tau = t + sys_.c0
    assert sp.P - tau * sp.s_of_t == pytest.approx(tau * sp.b, abs=1e-10)
    P_other = sys_.pressure(s_other)[0]
    assert P_other >= tau * (s_other - sp.s_of_t) + sp.P - 1e-9


@pytest.mark.parametrize("M", [2, 3, 5])
def test_kink_at_half(M):
    h = 1e-6
    right = (rate_closed_form_indicator(M, 0.5 + h) - rate_closed_form_indicator(M, 0.5)) / h
    left = (rate_closed_form_indicator(M, 0.5) - rate_closed_form_indicator(M, 0.5 - h)) / h
    assert left == pytest.approx(math.log(M), abs=1e-4)
    assert right == pytest.approx(-math.log(M), abs=1e-4)


def test_rejects_unfactored_and_bad_c0():
    g = word_observable(1, {"a1": 1.0})
    with pytest.raises(ValueError):
        BranchSystem(2, "alpha", g)
    with pytest.raises(ValueError):
        BranchSystem(2, "alpha", IND, c0=0.0)
    with pytest.raises(ValueError):
        BranchSystem(2, "gamma", IND)


def test_constant_observable_has_singleton_domain():
    f = Observable(1, {"a": 0.25, "b": 0.25})
    model = RateModel(2, f)
    assert model(0.25) == pytest.approx(0.0, abs=1e-12)
    assert model(0.3) == math.inf


def test_rate_curve_bounds():
    curve = rate_curve(2, IND, 1.0, [-0.5, 0.0, 0.5, 1.0, 1.5])
    assert curve.t_alpha == (0.0, 1.0) and curve.t_beta == (0.0, 1.0)
    assert [r.I for r in curve.rows][::4] == [math.inf, math.inf]
    for r in curve.rows:
        assert r.I == min(r.I_alpha, r.I_beta)


@pytest.mark.parametrize("lo,hi", [(0.3, 0.35), (0.5, 0.55), (0.0, 0.05), (0.9, 1.0), (0.45, 0.55), (1.1, 1.2)])
def test_inf_over_bin_matches_dense_closed_form(lo, hi):
    model = RateModel(2, IND)
    dense = min(rate_closed_form_indicator(2, t) for t in np.linspace(lo, hi, 20001))
    exact = {(0.3, 0.35): 0.0}.get((lo, hi), dense)
    assert model.inf_over(lo, hi) == pytest.approx(exact, abs=1e-9)
