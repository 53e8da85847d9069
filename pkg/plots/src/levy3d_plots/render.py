"""Paper-style figures from sweep CSVs.

Four figure families:

* ``cauchy-shapes``: detection time of the Cauchy walk versus projected area
  for lines, discs and balls, with the universal lower bound dashed.
* ``ratio-vs-mu``: detection time versus exponent, each size series
  normalized by its own mu = 2 cell (the Cauchy baseline sits at y = 1).
* ``delta-sweep``: detection time versus elongation, one curve per exponent.
* ``ratio-fixed``: ball/line detection-time ratio versus line length for
  matched-volume or matched-surface pairs, with the theoretical reference
  ratio dashed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .reader import MissingBaselineError, read_many  # noqa: E402

FAMILIES = ("cauchy-shapes", "ratio-vs-mu", "delta-sweep", "ratio-fixed")

# deterministic, print-friendly defaults
_RC = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "svg.hashsalt": "levy3d-plots",
}

_SHAPE_STYLE = {"ball": "o-", "disc": "s-", "line": "^-"}


@dataclass(frozen=True)
class FigureSpec:
    csv_paths: tuple
    family: str
    out: str
    log_x: bool = True
    log_y: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown figure family {self.family!r}; "
                             f"valid: {', '.join(FAMILIES)}")


def _is_cauchy(mu) -> bool:
    return abs(mu - 2.0) < 1e-9


def _series(ax, x, y, yerr, style, label):
    """A labeled data line plus unlabeled error bars (keeps get_lines clean)."""
    ax.plot(x, y, style, ms=4, label=label)
    ax.errorbar(x, y, yerr=yerr, fmt="none", capsize=0, ecolor="gray",
                elinewidth=0.8, label="_nolegend_")


def _fig_cauchy_shapes(rows, ax):
    for shape in ("line", "disc", "ball"):
        sel = sorted((r for r in rows if r["shape"] == shape),
                     key=lambda r: r["delta_P"])
        if not sel:
            continue
        _series(ax, [r["delta_P"] for r in sel], [r["mean_time"] for r in sel],
                [1.96 * r["sem_time"] for r in sel], _SHAPE_STYLE[shape], shape)
    # binding universal lower bound at each projected area
    by_dp = {}
    for r in rows:
        if r["universal_lb"] is not None:
            key = round(r["delta_P"], 9)
            by_dp[key] = min(by_dp.get(key, math.inf), r["universal_lb"])
    dps = sorted(by_dp)
    ax.plot(dps, [by_dp[k] for k in dps], "k--", label="universal lower bound")
    ax.set_xlabel("projected area $\\Delta_P$")
    ax.set_ylabel("mean detection time")
    ax.set_title("Cauchy walk across shapes of equal projected area")


def _fig_ratio_vs_mu(rows, ax):
    series = {}
    for r in rows:
        series.setdefault((r["shape"], r["p1"], r["p2"]), []).append(r)
    for key in sorted(series, key=lambda k: (k[0], k[1], k[2] or 0.0)):
        cells = sorted(series[key], key=lambda r: r["mu"])
        base = [r for r in cells if _is_cauchy(r["mu"])]
        if not base:
            raise MissingBaselineError(
                f"series {key} has no mu = 2 cell to normalize by")
        b = base[0]["mean_time"]
        shape, p1, _ = key
        label = f"{shape} $\\Delta_P$={base[0]['delta_P']:.0f}"
        ax.plot([r["mu"] for r in cells], [r["mean_time"] / b for r in cells],
                "o-", ms=3, label=label)
    ax.axhline(1.0, color="k", ls=":", lw=1, label="Cauchy baseline")
    ax.set_xlabel("Lévy exponent $\\mu$")
    ax.set_ylabel("detection time / detection time at $\\mu=2$")
    ax.set_title("Relative detection time")


def _fig_delta_sweep(rows, ax):
    by_mu = {}
    for r in rows:
        by_mu.setdefault(r["mu"], []).append(r)
    for mu in sorted(by_mu):
        cells = sorted(by_mu[mu], key=lambda r: r["elong"])
        _series(ax, [r["elong"] for r in cells], [r["mean_time"] for r in cells],
                [1.96 * r["sem_time"] for r in cells], "o-", f"$\\mu$={mu:g}")
    ax.set_xlabel("elongation $\\delta$")
    ax.set_ylabel("mean detection time")
    ax.set_title("Detection time of rectangles across elongation")


def _line_surface(r):
    return 2.0 * math.pi * r["d"] * r["p1"] + 4.0 * math.pi * r["d"] ** 2


def _ball_surface(r):
    return 4.0 * math.pi * r["p1"] ** 2


def _fig_ratio_fixed(rows, ax):
    scenario = rows[0]["scenario"] if rows else ""
    fixed_volume = "volume" in scenario
    by_mu = {}
    for r in rows:
        by_mu.setdefault(r["mu"], {"line": [], "ball": []})
    for r in rows:
        if r["shape"] in ("line", "ball"):
            by_mu[r["mu"]][r["shape"]].append(r)
    ref_x, ref_y = [], []
    for mu in sorted(by_mu):
        lines = sorted(by_mu[mu]["line"], key=lambda r: r["p1"])
        balls = sorted(by_mu[mu]["ball"], key=lambda r: r["p1"])
        if len(lines) != len(balls) or not lines:
            continue
        xs = [ln["p1"] for ln in lines]
        ys = [bl["mean_time"] / ln["mean_time"] for bl, ln in zip(balls, lines)]
        ax.plot(xs, ys, "o-", ms=4, label=f"$\\mu$={mu:g}")
        if not ref_x:
            for bl, ln in zip(balls, lines):
                ref_x.append(ln["p1"])
                if fixed_volume:
                    ref_y.append(_line_surface(ln) / _ball_surface(bl))
                else:
                    ref_y.append(ln["V"] / bl["V"])
    ref_label = ("surface-area ratio (Cauchy estimate)" if fixed_volume
                 else "volume ratio ($\\mu \\to 1$ estimate)")
    ax.plot(ref_x, ref_y, "k--", label=ref_label)
    ax.set_xlabel("line length")
    ax.set_ylabel("ball time / line time")
    kind = "volume" if fixed_volume else "surface area"
    ax.set_title(f"Ball versus line of equal {kind}")


_BUILDERS = {
    "cauchy-shapes": _fig_cauchy_shapes,
    "ratio-vs-mu": _fig_ratio_vs_mu,
    "delta-sweep": _fig_delta_sweep,
    "ratio-fixed": _fig_ratio_fixed,
}


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure for a spec (also used by tests)."""
    rows = read_many(spec.csv_paths)
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        _BUILDERS[spec.family](rows, ax)
        if spec.log_x and spec.family not in ("ratio-vs-mu", "delta-sweep"):
            ax.set_xscale("log")
        if spec.log_y:
            ax.set_yscale("log")
        ax.legend(loc="best")
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Render the figure to ``spec.out`` (PNG or SVG); deterministic bytes."""
    fig = build_figure(spec)
    try:
        metadata = {"Date": None} if spec.out.endswith(".svg") else None
        with matplotlib.rc_context(_RC):  # fixed svg hashsalt, dpi
            fig.savefig(spec.out, metadata=metadata)
    finally:
        plt.close(fig)
    return spec.out
