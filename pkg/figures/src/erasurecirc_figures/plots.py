"""Render erasurecirc CSV files as figures.

Rendering is a pure function of (CSV content, spec): input columns are
validated before anything is drawn, and no simulation results are ever
recomputed here. Decay and collapse kinds default to log-log axes;
heatmaps are linear.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .collapse import collapse_objective, noise_rescale, tau_rescale  # noqa: E402

KINDS = ("decay", "crossing", "collapse", "heatmap", "mi")

REQUIRED_COLUMNS = {
    "decay": ("t", "s_mean", "s_stderr", "n", "p", "q", "h"),
    "crossing": ("n", "p", "tau_mean", "tau_stderr", "censored_fraction"),
    "heatmap": ("n", "p", "q", "timescale_mean", "timescale_stderr", "capped_fraction"),
    "mi": ("n", "p", "q", "t_eval", "mi_mean", "mi_stderr"),
}


@dataclass
class PlotSpec:
    """One figure: input CSVs, plot kind, exponent annotations, output path."""

    inputs: list[str]
    kind: str
    out: str
    exponents: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("no input files")


def read_table(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        rows = [r for r in reader if r]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    cols: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        vals = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return cols


def _require(cols: dict, names, path: str) -> None:
    for name in names:
        if name not in cols:
            raise ValueError(f"{path}: missing required column {name!r}")


def _load(spec: PlotSpec, kind_for_columns: str | None = None):
    tables = []
    for path in spec.inputs:
        cols = read_table(path)
        if kind_for_columns:
            _require(cols, REQUIRED_COLUMNS[kind_for_columns], path)
        tables.append(cols)
    return tables


def _merge(tables) -> dict[str, np.ndarray]:
    merged = {}
    for name in tables[0]:
        merged[name] = np.concatenate([t[name] for t in tables])
    return merged


def _group_key(cols, names):
    keys = sorted({tuple(cols[n][i] for n in names) for i in range(len(cols[names[0]]))})
    for key in keys:
        mask = np.ones(len(cols[names[0]]), dtype=bool)
        for n, v in zip(names, key):
            mask &= cols[n] == v
        yield key, mask


def _render_decay(spec: PlotSpec) -> float | None:
    cols = _merge(_load(spec, "decay"))
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for (n, p, q, h), mask in _group_key(cols, ("n", "p", "q", "h")):
        order = np.argsort(cols["t"][mask])
        t = cols["t"][mask][order]
        s = cols["s_mean"][mask][order]
        label = f"n={int(n)}, p={p:g}"
        if q:
            label += f", q={q:g}"
        if h:
            label += f", h={h:g}"
        ax.plot(t[t > 0], s[t > 0], label=label, lw=1.2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t (layers)")
    ax.set_ylabel("entropy (bits)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return None


def _crossing_curves(cols, z: float):
    for (n,), mask in _group_key(cols, ("n",)):
        keep = mask & np.isfinite(cols["tau_mean"])
        if keep.sum() < 2:
            continue
        order = np.argsort(cols["p"][keep])
        yield (
            int(n),
            cols["p"][keep][order],
            cols["tau_mean"][keep][order] / n**z,
            cols["tau_stderr"][keep][order] / n**z,
        )


def _render_crossing(spec: PlotSpec) -> float | None:
    cols = _merge(_load(spec, "crossing"))
    z = spec.exponents.get("z", 0.0)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for n, p, y, e in _crossing_curves(cols, z):
        ax.errorbar(p, y, yerr=e, marker="o", ms=3, lw=1.0, label=f"n={n}")
    ax.set_xlabel("p")
    ax.set_ylabel(r"$\tau / n^{z}$" if z else r"$\tau$")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    objective = None
    if {"z", "nu", "p_c"} <= spec.exponents.keys():
        objective = _draw_collapse_inset(fig, ax, cols, spec.exponents)
        ax.axvline(spec.exponents["p_c"], color="gray", lw=0.6, ls=":")
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return objective


def _draw_collapse_inset(fig, ax, cols, exp) -> float:
    inset = ax.inset_axes([0.12, 0.12, 0.38, 0.38])
    curves = []
    for (n,), mask in _group_key(cols, ("n",)):
        keep = mask & np.isfinite(cols["tau_mean"])
        if keep.sum() < 2:
            continue
        order = np.argsort(cols["p"][keep])
        x, y, e = tau_rescale(
            n,
            cols["p"][keep][order],
            cols["tau_mean"][keep][order],
            cols["tau_stderr"][keep][order],
            exp["z"], exp["nu"], exp["p_c"],
        )
        curves.append((x, y, e))
        inset.plot(x, y, marker=".", ms=2.5, lw=0.8)
    inset.set_xlabel(r"$(p - p_c)\, n^{1/\nu}$", fontsize=7)
    inset.set_ylabel(r"$\tau / n^{z}$", fontsize=7)
    inset.tick_params(labelsize=6)
    return collapse_objective(curves)


def _render_collapse(spec: PlotSpec) -> float:
    tables = _load(spec)
    cols = _merge(tables)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    if "tau_mean" in cols:
        _require(cols, REQUIRED_COLUMNS["crossing"], spec.inputs[0])
        for key in ("z", "nu", "p_c"):
            if key not in spec.exponents:
                raise ValueError(f"collapse of a tau table needs exponent {key!r}")
        exp = spec.exponents
        curves = []
        for (n,), mask in _group_key(cols, ("n",)):
            keep = mask & np.isfinite(cols["tau_mean"])
            if keep.sum() < 2:
                continue
            order = np.argsort(cols["p"][keep])
            x, y, e = tau_rescale(
                n, cols["p"][keep][order], cols["tau_mean"][keep][order],
                cols["tau_stderr"][keep][order], exp["z"], exp["nu"], exp["p_c"],
            )
            curves.append((x, y, e))
            ax.plot(x, y, marker="o", ms=3, lw=1.0, label=f"n={int(n)}")
        ax.set_xlabel(r"$(p - p_c)\, n^{1/\nu}$")
        ax.set_ylabel(r"$\tau / n^{z}$")
        ax.set_yscale("log")
    else:
        _require(cols, REQUIRED_COLUMNS["decay"], spec.inputs[0])
        for key in ("a", "b"):
            if key not in spec.exponents:
                raise ValueError(f"collapse of decay curves needs exponent {key!r}")
        label_key = "h" if np.unique(cols["q"]).size == 1 else "q"
        curves = []
        for (v,), mask in _group_key(cols, (label_key,)):
            if v == 0:
                continue
            order = np.argsort(cols["t"][mask])
            t = cols["t"][mask][order]
            x, y, e = noise_rescale(
                v, t, cols["s_mean"][mask][order], cols["s_stderr"][mask][order],
                spec.exponents["a"], spec.exponents["b"],
            )
            curves.append((x, y, e))
            ax.plot(x[t > 0], y[t > 0], lw=1.0, label=f"{label_key}={v:g}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(rf"$t\,{label_key}^{{b}}$")
        ax.set_ylabel(rf"$S\,{label_key}^{{-a}}$")
    if len(curves) < 2:
        raise ValueError("need at least two curves to collapse")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return collapse_objective(curves)


def _render_heatmap(spec: PlotSpec) -> float | None:
    cols = _merge(_load(spec, "heatmap"))
    ps = np.unique(cols["p"])
    qs = np.unique(cols["q"])
    grid = np.full((qs.size, ps.size), np.nan)
    for i in range(len(cols["p"])):
        r = np.searchsorted(qs, cols["q"][i])
        c = np.searchsorted(ps, cols["p"][i])
        val = cols["timescale_mean"][i]
        grid[r, c] = val
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(ps, qs, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="decay timescale (layers)")
    ax.set_xlabel("p")
    ax.set_ylabel("q")
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return None


def _render_mi(spec: PlotSpec) -> float | None:
    cols = _merge(_load(spec, "mi"))
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for (n,), mask in _group_key(cols, ("n",)):
        order = np.argsort(cols["p"][mask])
        p = cols["p"][mask][order]
        y = cols["mi_mean"][mask][order]
        e = cols["mi_stderr"][mask][order]
        ax.errorbar(p, y, yerr=e, marker="o", ms=3, lw=1.0, label=f"n={int(n)}")
        peak = p[np.argmax(y)]
        ax.axvline(peak, color="gray", lw=0.5, ls=":")
    ax.set_xlabel("p")
    ax.set_ylabel("antipodal mutual information (bits)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return None


_RENDERERS = {
    "decay": _render_decay,
    "crossing": _render_crossing,
    "collapse": _render_collapse,
    "heatmap": _render_heatmap,
    "mi": _render_mi,
}


def render(spec: PlotSpec) -> float | None:
    """Write the figure; returns the collapse objective when one was computed."""
    return _RENDERERS[spec.kind](spec)
