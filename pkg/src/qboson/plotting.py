"""Figure rendering for the command-line report paths.

Functions here take the same plain row mappings the JSON writers emit and
save PNG files; they return the written paths.  matplotlib is forced onto
the Agg backend so rendering works headless.  Rows with null values are
skipped point by point rather than rejected.
"""

from __future__ import annotations

import os
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

SCAN_DISTRIBUTIONS_NAME = "scan_distributions.png"
SCAN_ENERGY_NAME = "scan_internal_energy.png"
LIMITS_NAME = "limits_deviations.png"
VERIFICATION_NAME = "verification_residuals.png"

# residuals of exactly zero still need a spot on a log axis
_LOG_FLOOR = 1e-18


def _save(fig, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _series_by_key(rows: Sequence[Mapping], value_field: str):
    """Group (x, value) pairs by (gamma, variant), dropping null values."""
    series: dict[tuple, tuple[list, list]] = {}
    for r in rows:
        v = r.get(value_field)
        if v is None:
            continue
        key = (r["gamma"], r["variant"])
        xs, vs = series.setdefault(key, ([], []))
        xs.append(r["x"])
        vs.append(v)
    return series


def render_scan_figures(rows: Sequence[Mapping], out_dir: str) -> list[str]:
    """Mean occupation and energy per oscillator against x, one line per
    (gamma, variant); both figures use log axes."""
    paths = []
    for field, ylabel, name in (
            ("f", "mean occupation f", SCAN_DISTRIBUTIONS_NAME),
            ("beta_u_per_n", "beta U / N", SCAN_ENERGY_NAME)):
        fig, ax = plt.subplots(figsize=(7.0, 5.0))
        for (gamma, variant), (xs, vs) in sorted(_series_by_key(rows, field).items()):
            ax.plot(xs, vs, marker=".", markersize=3, linewidth=1.0,
                    label=f"gamma={gamma:g} {variant}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("x = E/kT")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", alpha=0.3)
        if ax.lines:
            ax.legend(fontsize=6, ncol=2)
        fig.tight_layout()
        paths.append(_save(fig, out_dir, name))
    return paths


def render_limits_figure(rows: Sequence[Mapping], out_dir: str) -> list[str]:
    """Deviation from the regime asymptote against x; points exist only
    where a regime defines an asymptote, so the two limits show up as
    separate branches."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    series: dict[float, tuple[list, list]] = {}
    for r in rows:
        dev = r.get("deviation_from_asymptote")
        if dev is None:
            continue
        xs, ds = series.setdefault(r["gamma"], ([], []))
        xs.append(r["x"])
        ds.append(max(dev, _LOG_FLOOR))
    for gamma in sorted(series):
        xs, ds = series[gamma]
        ax.plot(xs, ds, linestyle="none", marker="o", markersize=3,
                label=f"gamma={gamma:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("x = E/kT")
    ax.set_ylabel("deviation from asymptote")
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir, LIMITS_NAME)]


def render_verification_figure(report: Mapping, out_dir: str) -> list[str]:
    """Residual of every suite check against its tolerance, in suite order.
    Failing checks are drawn in red."""
    checks = report["checks"]
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    idx = list(range(len(checks)))
    residuals = [max(c["residual"], _LOG_FLOOR) for c in checks]
    tolerances = [max(c["tolerance"], _LOG_FLOOR) for c in checks]
    colors = ["tab:green" if c["pass"] else "tab:red" for c in checks]
    ax.scatter(idx, residuals, s=8, c=colors, label="residual")
    ax.plot(idx, tolerances, linestyle="none", marker="_", markersize=6,
            color="tab:gray", label="tolerance")
    ax.set_yscale("log")
    ax.set_xlabel("check index (suite order)")
    ax.set_ylabel("residual")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir, VERIFICATION_NAME)]
