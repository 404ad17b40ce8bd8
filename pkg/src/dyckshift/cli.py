"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numeric failure, 3 work-budget
refusal.  Failures print one line ``error: <kind>: <reason>`` to stderr.
"""

from __future__ import annotations

import argparse
import sys
from multiprocessing import Pool

from . import harness, krieger, periodic, plotting, report, thermo
from .dyck import format_word, parse_word, reduce_word
from .observable import load_observable

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _M(text: str) -> int:
    v = _positive_int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("M must be >= 2")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return v


def _n_range(text: str) -> list[int]:
    """``12`` or ``2..12``."""
    try:
        if ".." in text:
            a, b = (int(x) for x in text.split("..", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <int> or <a>..<b>: {text!r}")
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return list(range(a, b + 1))


def _grid(text: str) -> list[float]:
    """``lo:hi:step``, inclusive of ``hi`` when it lies on the lattice."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    if not step > 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    count = int((hi - lo) / step + 1e-9)
    return [float(format(lo + i * step, ".15g")) for i in range(count + 1)]


def _observable(text: str):
    try:
        return load_observable(text)
    except (OSError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dyckshift", description="Dyck shift periodic points and rate functions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, workers=True, budget=True):
        if workers:
            sp.add_argument("--workers", type=_positive_int, default=1,
                            help="worker processes for sharded work; output does not depend on it (default: 1)")
        if budget:
            sp.add_argument("--budget", type=_positive_float, default=periodic.DEFAULT_BUDGET,
                            help="refuse runs with (M+1)^n above this (default: 1e8)")

    sp = sub.add_parser("census", help="periodic-point counts by multiplier class")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--n-max", type=_positive_int, required=True, help="largest period; rows for n=1..n-max")
    sp.add_argument("--method", choices=("pattern", "words"), default="pattern",
                    help="pattern: weighted open/close DP; words: word-level DFS (default: pattern)")
    sp.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: -)")
    common(sp)

    sp = sub.add_parser("enumerate", help="list admissible periodic words, one per line")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--n", type=_positive_int, required=True, help="period")
    sp.add_argument("--class", dest="cls", choices=("neg", "pos", "neutral"), default=None,
                    help="restrict to one multiplier class (default: all)")
    sp.add_argument("--out", default="-", help="output path, '-' for stdout (default: -)")
    common(sp)

    sp = sub.add_parser("reduce", help="reduce a word in the Dyck monoid; prints 0, 1 or tokens")
    sp.add_argument("--word", required=True, help='tokens such as "a1 b2"')
    sp.add_argument("--M", type=_M, default=None, help="reject indices above M (default: no check)")

    sp = sub.add_parser("krieger", help="apply phi_alpha, phi_beta, psi_alpha or psi_beta to a periodic word")
    sp.add_argument("--map", required=True, choices=("phi-a", "phi-b", "psi-a", "psi-b"), help="map to apply")
    sp.add_argument("--word", required=True,
                    help="phi: tokens over a1..aM b1..bM; psi-a: a1..aM and b; psi-b: a and b1..bM")
    sp.add_argument("--M", type=_M, default=None, help="reject indices above M (default: no check)")

    sp = sub.add_parser("witness", help="finite windows showing psi_alpha has no continuous extension (JSON)")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--N", type=_positive_int, required=True, help="agreement radius")
    sp.add_argument("--k1", type=_positive_int, required=True, help="open index left of -N in window 1")
    sp.add_argument("--k2", type=_positive_int, required=True, help="open index left of -N in window 2")

    sp = sub.add_parser("rate", help="level-1 rate function on a grid")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--observable", type=_observable, required=True,
                    help="indicator-close or table:<path> (factored table file)")
    sp.add_argument("--grid", type=_grid, required=True, help="lo:hi:step, hi inclusive")
    sp.add_argument("--c0", type=float, default=None, help="shift constant (default: max(1, 1 - min f))")
    sp.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: -)")
    sp.add_argument("--svg", default=None, help="also render the curve to this SVG (default: none)")
    common(sp, budget=False)

    sp = sub.add_parser("pressure", help="pressure P(s) and P'(s) of one branch on an s-grid")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--observable", type=_observable, required=True, help="indicator-close or table:<path>")
    sp.add_argument("--gamma", choices=thermo.GAMMAS, required=True, help="which full shift")
    sp.add_argument("--grid", type=_grid, required=True, help="lo:hi:step for s, hi inclusive")
    sp.add_argument("--c0", type=float, default=None, help="shift constant (default: max(1, 1 - min f))")
    sp.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: -)")

    sp = sub.add_parser("empirical", help="histogram of Birkhoff averages over periodic points")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--n", type=_n_range, required=True, help="period or range a..b")
    sp.add_argument("--observable", type=_observable, required=True, help="indicator-close or table:<path>")
    sp.add_argument("--bin-width", type=_positive_float, required=True, help="histogram bin width")
    sp.add_argument("--scope", choices=("all", "a0", "b"), default="all",
                    help="all points, negative+neutral (a0) or positive (b) (default: all)")
    sp.add_argument("--c0", type=float, default=None, help="shift constant for the analytic column (default: max(1, 1 - min f))")
    sp.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: -)")
    sp.add_argument("--svg", default=None, help="also render rates with the analytic curve (default: none)")
    common(sp)

    sp = sub.add_parser("concentration", help="mean 1-cylinder frequencies of one class vs maximal-entropy masses")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--n", type=_n_range, required=True, help="period or range a..b")
    sp.add_argument("--class", dest="cls", choices=("a", "b"), required=True,
                    help="a: negative multiplier, b: positive multiplier")
    sp.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: -)")
    common(sp)

    sp = sub.add_parser("neutral-decay", help="growth rate of neutral periodic points")
    sp.add_argument("--M", type=_M, required=True, help="number of bracket types")
    sp.add_argument("--n-max", type=_positive_int, required=True, help="rows for even n=2..n-max")
    sp.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: -)")
    sp.add_argument("--svg", default=None, help="also render the rows (default: none)")
    common(sp, workers=False)
    return p


_CLASSES = {
    "neg": periodic.MultiplierClass.NEGATIVE,
    "pos": periodic.MultiplierClass.POSITIVE,
    "neutral": periodic.MultiplierClass.NEUTRAL,
}


def _cmd_census(a):
    periodic.check_budget(a.M, a.n_max, a.budget)
    rows = []
    for n in range(1, a.n_max + 1):
        if a.method == "pattern":
            rows.append(periodic.census(a.M, n, budget=a.budget))
        else:
            rows.append(periodic.census_by_enumeration(a.M, n, budget=a.budget, workers=a.workers))
    report.write_text(a.out, report.census_csv(rows))


def _cmd_enumerate(a):
    words = periodic.enumerate_periodic(
        a.M, a.n, _CLASSES.get(a.cls), budget=a.budget, workers=a.workers
    )
    report.write_text(a.out, "".join(format_word(w) + "\n" for w in words))


def _cmd_reduce(a):
    print(reduce_word(parse_word(a.word, a.M)))


def _cmd_krieger(a):
    w = krieger.parse_krieger_input(a.map, a.word, a.M)
    if a.map == "phi-a":
        print(krieger.format_alpha_word(krieger.phi_alpha(w)))
    elif a.map == "phi-b":
        print(krieger.format_beta_word(krieger.phi_beta(w)))
    else:
        fn = krieger.psi_alpha_periodic if a.map == "psi-a" else krieger.psi_beta_periodic
        print(format_word(fn(w)))


def _cmd_witness(a):
    print(krieger.extension_witness(a.M, a.N, a.k1, a.k2).to_json())


def _rate_curve(M, f, c0, grid, workers):
    model = thermo.RateModel(M, f, c0)
    if workers <= 1:
        return model.curve(grid)
    with Pool(workers) as pool:
        rows = pool.map(model.row, grid)
    return thermo.RateCurve(
        tuple(rows),
        (model.alpha.t_minus, model.alpha.t_plus),
        (model.beta.t_minus, model.beta.t_plus),
    )


def _cmd_rate(a):
    curve = _rate_curve(a.M, a.observable, a.c0, a.grid, a.workers)
    report.write_text(a.out, report.rate_csv(curve))
    if a.svg:
        plotting.plot_rate(curve, (), a.svg)


def _cmd_pressure(a):
    system = thermo.BranchSystem(a.M, a.gamma, a.observable, a.c0)
    report.write_text(a.out, report.pressure_csv(system.pressure_curve(a.grid)))


def _cmd_empirical(a):
    cfg = harness.ExperimentConfig(
        a.M, a.n, a.observable, a.bin_width, a.scope, a.workers, a.budget, a.c0
    )
    rows = harness.run_level1(cfg)
    report.write_text(a.out, report.level1_csv(rows))
    if a.svg:
        curve = None
        if a.observable.factored:
            lo, hi = rows[0].bin_lo, rows[-1].bin_hi
            steps = 200
            grid = [lo + (hi - lo) * i / steps for i in range(steps + 1)]
            curve = thermo.RateModel(a.M, a.observable, a.c0).curve(grid)
        plotting.plot_rate(curve, rows, a.svg)


def _cmd_concentration(a):
    cfg = harness.ExperimentConfig(
        a.M, a.n, load_observable("indicator-close"), scope=a.cls, workers=a.workers, budget=a.budget
    )
    report.write_text(a.out, report.level2_csv(harness.run_level2_concentration(cfg)))


def _cmd_neutral(a):
    rows = harness.run_neutral_decay(a.M, list(range(2, a.n_max + 1, 2)), a.budget)
    report.write_text(a.out, report.neutral_csv(rows))
    if a.svg:
        plotting.plot_neutral(rows, a.svg)


COMMANDS = {
    "census": _cmd_census,
    "enumerate": _cmd_enumerate,
    "reduce": _cmd_reduce,
    "krieger": _cmd_krieger,
    "witness": _cmd_witness,
    "rate": _cmd_rate,
    "pressure": _cmd_pressure,
    "empirical": _cmd_empirical,
    "concentration": _cmd_concentration,
    "neutral-decay": _cmd_neutral,
}


def _fail(kind: str, exc: BaseException, code: int) -> int:
    msg = " ".join(str(exc).split()) or type(exc).__name__
    print(f"error: {kind}: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        return _fail("invalid-input", exc, EXIT_INPUT)
    try:
        COMMANDS[args.command](args)
    except periodic.WorkBudgetExceeded as exc:
        return _fail("work-budget", exc, EXIT_BUDGET)
    except (thermo.NumericFailure, ArithmeticError) as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    except (ValueError, OSError) as exc:
        return _fail("invalid-input", exc, EXIT_INPUT)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
