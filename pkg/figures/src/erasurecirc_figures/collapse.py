"""Collapse rescaling and quality, formula-identical to the analysis package.

Duplicated on purpose: this package consumes only CSV files at runtime, so
the objective is re-implemented here with the same algorithm (pairwise
linear interpolation over overlapping rescaled ranges, error weights
floored at the smallest positive combined variance, pooled-variance
normalization for noise-free input). A contract test pins the two
implementations together to 1e-6.
"""
from __future__ import annotations

import numpy as np


def tau_rescale(n, p, tau, err, z: float, nu: float, p_c: float):
    """x -> (p - p_c) n^(1/nu), y -> tau / n^z."""
    x = (np.asarray(p, dtype=float) - p_c) * float(n) ** (1.0 / nu)
    scale = float(n) ** z
    return x, np.asarray(tau, dtype=float) / scale, np.asarray(err, dtype=float) / scale


def noise_rescale(v, t, s, err, a: float, b: float):
    """x -> t v^b, y -> s v^-a for a noise value v (q or h)."""
    x = np.asarray(t, dtype=float) * float(v) ** b
    scale = float(v) ** (-a)
    return x, np.asarray(s, dtype=float) * scale, np.asarray(err, dtype=float) * scale


def collapse_objective(curves) -> float:
    """Weighted squared spread of rescaled curves around each other.

    curves: list of (x, y, err) arrays, each x strictly increasing.
    """
    if len(curves) < 2:
        return 0.0
    dev2, var2, pooled = [], [], []
    for i in range(len(curves)):
        xi, yi, ei = curves[i]
        for j in range(len(curves)):
            if i == j:
                continue
            xj, yj, ej = curves[j]
            lo, hi = xj[0], xj[-1]
            mask = (xi >= lo) & (xi <= hi)
            if not mask.any():
                continue
            yint = np.interp(xi[mask], xj, yj)
            eint = np.interp(xi[mask], xj, ej)
            dev2.append((yi[mask] - yint) ** 2)
            var2.append(ei[mask] ** 2 + eint**2)
            pooled.append(yi[mask])
    if not dev2:
        raise ValueError("no x-overlap between rescaled curves")
    dev2 = np.concatenate(dev2)
    var2 = np.concatenate(var2)
    pos = var2[var2 > 0]
    if pos.size:
        w = 1.0 / np.maximum(var2, pos.min())
        return float((w * dev2).sum() / w.sum())
    if dev2.max() == 0.0:
        return 0.0
    pooled = np.concatenate(pooled)
    scale = float(pooled.var())
    if scale <= 0.0:
        scale = float(np.abs(pooled).max() ** 2) or 1.0
    return float(dev2.mean() / scale)
