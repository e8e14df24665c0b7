"""Figures for experiment reports (non-interactive Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "axes": dict(labelsize=8, titlesize=8, linewidth=0.5),
    "figure": dict(figsize=[5.0, 3.2], facecolor="white"),
    "font": dict(size=8),
    "legend": dict(fontsize=7, frameon=False),
    "lines": dict(linewidth=0.8, markersize=3),
    "xtick": dict(labelsize=7),
    "ytick": dict(labelsize=7),
    "savefig": dict(dpi=150),
}

X_KEYS = ("n", "m", "trial")
# columns drawn when a report has no per-row ratio
SERIES_KEYS = ("two_var", "area_one_var", "median", "mean", "T", "lower", "upper")


def _numeric(rows, key):
    return all(isinstance(r.get(key), (int, float)) and not isinstance(r.get(key), bool) for r in rows)


def render_report(report, path: str | Path) -> Path:
    """Draw the per-row ratio (or the main numeric columns) against the natural index."""
    rows = report.rows
    path = Path(path)
    with plt.rc_context({f"{group}.{k}": v for group, vals in STYLE.items() for k, v in vals.items()}):
        fig, ax = plt.subplots()
        xkey = next((k for k in X_KEYS if rows and _numeric(rows, k)), None)
        xs = [r[xkey] for r in rows] if xkey else list(range(len(rows)))
        if rows and "theta" in rows[0]:
            for th in sorted({r["theta"] for r in rows}):
                sub = [r for r in rows if r["theta"] == th]
                ax.plot([r[xkey] for r in sub], [r["ratio"] for r in sub], "o-", label=f"theta = {th:.4g}")
            ax.set_ylabel("lhs / rhs")
        elif rows and _numeric(rows, "ratio") and report.name != "sobolev_equiv":
            ax.plot(xs, [r["ratio"] for r in rows], "o-", label="lhs / rhs")
            ax.set_ylabel("lhs / rhs")
        else:
            for key in SERIES_KEYS:
                if rows and _numeric(rows, key):
                    ax.plot(xs, [r[key] for r in rows], "o-", label=key)
        if xkey == "m":
            ax.set_xscale("log", base=2)
        ax.ticklabel_format(axis="y", useOffset=False)
        ax.set_xlabel(xkey or "row")
        ax.set_title(f"{report.name}: {'pass' if report.passed else 'fail'}")
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
