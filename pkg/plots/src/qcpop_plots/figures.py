"""The four benchmark figure kinds rendered from samples.csv.

conv-hist        histograms of the Magnus convergence integral at the
                 sampled truth x* and at the solution x-hat, with the
                 pi reference line that certifies series convergence
bound-compare    relaxation lower bound against the surrogate objective
                 at x*, sample by sample
residual-compare surrogate residual at the solution against the true
                 Frobenius distance from the propagation oracle
ident-error      histograms of the per-component coupling recovery
                 errors |z-hat - z|

Rendering is deterministic: fixed Agg backend, fixed style, and the
returned arrays are exactly the parsed CSV columns so callers can verify
what was drawn.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DEFAULT_BINS = 30

# figure kind -> exact columns required; ident-error additionally needs
# at least one err_z<i> column, matched by prefix
REQUIRED_COLUMNS = {
    "conv-hist": ["conv_at_xstar", "conv_at_xhat"],
    "bound-compare": ["lower_bound", "f_relax_at_xstar"],
    "residual-compare": ["objective_at_xhat", "true_residual"],
    "ident-error": [],
}

KINDS = tuple(REQUIRED_COLUMNS)


class MissingColumnsError(ValueError):
    """CSV lacks columns the figure kind needs; carries the report."""

    def __init__(self, kind, missing, present):
        self.kind = kind
        self.missing = list(missing)
        self.present = list(present)
        super().__init__(
            f"{kind}: missing columns {self.missing}; file has {self.present}"
        )


@dataclass(frozen=True)
class FigureSpec:
    csv_path: Path
    kind: str
    out_path: Path
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.bins < 1:
            raise ValueError("bins must be positive")


def _read_columns(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        rows = [row for row in reader if row]
    return header, rows


def _numeric_column(header, rows, name):
    i = header.index(name)
    return np.array([float(r[i]) for r in rows])


def _empty_figure(spec, note):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_title(spec.kind)
    ax.annotate(
        note,
        xy=(0.5, 0.5),
        xycoords="axes fraction",
        ha="center",
        va="center",
        color="tab:red",
    )
    return fig


def render(spec: FigureSpec):
    """Write the figure and return the column arrays that were drawn.

    An empty CSV produces an empty-axes figure with a warning note (the
    run simply had no samples); missing columns raise
    MissingColumnsError so the caller can exit nonzero with the report.
    """
    header, rows = _read_columns(spec.csv_path)
    if not rows:
        fig = _empty_figure(spec, "no samples in CSV")
        fig.savefig(spec.out_path, dpi=150)
        plt.close(fig)
        return {}

    needed = list(REQUIRED_COLUMNS[spec.kind])
    if spec.kind == "ident-error":
        err_cols = sorted(
            (c for c in header if c.startswith("err_z")),
            key=lambda c: int(c[len("err_z"):]),
        )
        if not err_cols:
            raise MissingColumnsError(spec.kind, ["err_z<i>"], header)
        needed += err_cols
    missing = [c for c in needed if c not in header]
    if missing:
        raise MissingColumnsError(spec.kind, missing, header)

    data = {c: _numeric_column(header, rows, c) for c in needed}
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    draw(spec, data, ax)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return data


def draw(spec: FigureSpec, data, ax):
    """Draw one figure kind onto an existing Axes (render's workhorse)."""
    if spec.kind == "conv-hist":
        ax.hist(
            data["conv_at_xstar"], bins=spec.bins, alpha=0.6, label="at x*"
        )
        ax.hist(
            data["conv_at_xhat"], bins=spec.bins, alpha=0.6, label="at x-hat"
        )
        ax.axvline(math.pi, color="tab:red", linestyle="--", label="pi")
        ax.set_xlabel("convergence integral")
        ax.set_ylabel("samples")
    elif spec.kind == "bound-compare":
        ax.scatter(
            data["f_relax_at_xstar"], data["lower_bound"], s=12, label="samples"
        )
        lim = max(
            float(np.max(data["f_relax_at_xstar"])),
            float(np.max(data["lower_bound"])),
            1e-12,
        )
        ax.plot([0, lim], [0, lim], color="tab:gray", linewidth=0.8, label="equality")
        ax.set_xlabel("surrogate objective at x*")
        ax.set_ylabel("relaxation lower bound")
    elif spec.kind == "residual-compare":
        ax.scatter(
            data["true_residual"], data["objective_at_xhat"], s=12, label="samples"
        )
        ax.set_xlabel("true Frobenius distance")
        ax.set_ylabel("surrogate objective at x-hat")
        ax.set_xscale("symlog", linthresh=1e-12)
        ax.set_yscale("symlog", linthresh=1e-12)
    else:  # ident-error
        for col in sorted(data, key=lambda c: int(c[len("err_z"):])):
            ax.hist(data[col], bins=spec.bins, alpha=0.6, label=col)
        ax.set_xlabel("|z-hat - z|")
        ax.set_ylabel("samples")
    ax.set_title(spec.kind)
    ax.legend(loc="best")
