"""SVG figures for rate curves and harness tables.

Output is byte-stable: the SVG id salt is fixed and no date is embedded.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "svg.hashsalt": "dyckshift",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _finite(xs, ys):
    pts = [(x, y) for x, y in zip(xs, ys) if y is not None and math.isfinite(y)]
    return [p[0] for p in pts], [p[1] for p in pts]


def plot_rate(curve=None, level1_rows=(), path="rate.svg", title=None) -> Path:
    """Rate function with both branches, overlaid with empirical bin rates."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 4))
        if curve is not None and curve.rows:
            t = [r.t for r in curve.rows]
            for attr, style, label in (
                ("I_alpha", dict(ls="--", lw=1, color="tab:blue"), r"$I_{f,\alpha}$"),
                ("I_beta", dict(ls=":", lw=1.2, color="tab:orange"), r"$I_{f,\beta}$"),
                ("I", dict(ls="-", lw=1.8, color="black"), r"$I_f$"),
            ):
                x, y = _finite(t, [getattr(r, attr) for r in curve.rows])
                ax.plot(x, y, label=label, **style)
        by_n: dict[int, list] = {}
        for r in level1_rows:
            if r.count:
                by_n.setdefault(r.n, []).append(r)
        for n in sorted(by_n):
            rows = by_n[n]
            ax.plot(
                [0.5 * (r.bin_lo + r.bin_hi) for r in rows],
                [r.emp_rate for r in rows],
                "o",
                ms=3.5,
                label=f"empirical n={n}",
            )
        ax.set_xlabel("t")
        ax.set_ylabel("rate")
        if title:
            ax.set_title(title)
        if ax.lines:
            ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        return _save(fig, path)


def plot_neutral(rows=(), path="neutral.svg") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 4))
        if rows:
            ax.plot([r.n for r in rows], [r.rate for r in rows], "o-", label=r"$\frac{1}{n}\log\#\mathrm{Per}_{0,n}$")
            ax.axhline(rows[0].limit, color="gray", ls="--", lw=1, label=r"$\log(2\sqrt{M})$")
            ax.legend(frameon=False, fontsize=8)
        ax.set_xlabel("n")
        ax.set_ylabel("growth rate")
        fig.tight_layout()
        return _save(fig, path)


def export_plots(tables: dict, outdir) -> list[Path]:
    """Write one SVG per figure present in ``tables``.

    Recognised keys: ``rate`` (a RateCurve), ``level1`` (histogram rows),
    ``neutral`` (neutral-decay rows).
    """
    outdir = Path(outdir)
    written = []
    if "rate" in tables or "level1" in tables:
        written.append(
            plot_rate(tables.get("rate"), tables.get("level1", ()), outdir / "rate.svg")
        )
    if "neutral" in tables:
        written.append(plot_neutral(tables["neutral"], outdir / "neutral.svg"))
    return written
