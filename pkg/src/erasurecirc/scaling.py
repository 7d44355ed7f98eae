"""Decay-time extraction, crossing analysis and data-collapse fitting.

Pure functions over in-memory curves. Reference exponents of the
directed-percolation class in 1+1 dimensions are shipped as constants for
comparison; fits never substitute them silently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

DP_Z = 1.58
DP_NU = 1.09
DP_GAMMA = 0.75
DP_ETA = 2.34
DP_EXPONENTS = {"z": DP_Z, "nu": DP_NU, "gamma": DP_GAMMA, "eta": DP_ETA}

_PENALTY = 1e12


@dataclass
class DecayCurve:
    """A y(x) series with standard errors and identifying labels.

    Used both for entropy-versus-time curves (times = t) and for
    tau-versus-p curves (times = p, one curve per system size).
    """

    times: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.std_errors = np.asarray(self.std_errors, dtype=float)
        if not (self.times.shape == self.values.shape == self.std_errors.shape):
            raise ValueError("times, values and std_errors must have equal shape")
        if self.times.size >= 2 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if self.values.size and self.values.min() < 0:
            raise ValueError("values must be nonnegative")


@dataclass
class TauResult:
    tau: float | None
    censored: bool


def extract_tau(curve: DecayCurve, t0: float, fraction: float = 0.15) -> TauResult:
    """Elapsed time after t0 until the curve falls to fraction * value(t0).

    Linearly interpolates between samples; censored if the threshold is never
    reached in range, or if the curve already vanished at t0.
    """
    t, v = curve.times, curve.values
    if not t[0] <= t0 <= t[-1]:
        raise ValueError(f"t0={t0} outside the curve range [{t[0]}, {t[-1]}]")
    v0 = float(np.interp(t0, t, v))
    if v0 <= 0.0:
        return TauResult(tau=None, censored=True)
    threshold = fraction * v0
    prev_t, prev_v = t0, v0
    for i in range(t.size):
        if t[i] <= t0:
            continue
        if v[i] <= threshold:
            if prev_v <= threshold:
                return TauResult(tau=float(prev_t - t0), censored=False)
            frac = (prev_v - threshold) / (prev_v - v[i])
            cross = prev_t + frac * (t[i] - prev_t)
            return TauResult(tau=float(cross - t0), censored=False)
        prev_t, prev_v = t[i], v[i]
    return TauResult(tau=None, censored=True)


# --------------------------------------------------------------------------
# crossing analysis
# --------------------------------------------------------------------------


@dataclass
class TauPoint:
    """One decay-time measurement at system size n and error rate p."""

    n: int
    p: float
    tau: float
    stderr: float = 0.0


@dataclass
class CrossingFit:
    p_c: float
    z: float
    p_c_stderr: float
    z_stderr: float
    objective: float
    crossings: dict


class CrossingError(ValueError):
    pass


def _group_by_n(points) -> dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    by_n: dict[int, list] = {}
    for pt in points:
        if not np.isfinite(pt.tau) or pt.tau <= 0:
            raise ValueError("fit_crossing needs finite positive tau values")
        by_n.setdefault(int(pt.n), []).append(pt)
    out = {}
    for n, pts in by_n.items():
        pts = sorted(pts, key=lambda x: x.p)
        ps = np.array([x.p for x in pts])
        if np.unique(ps).size != ps.size:
            raise ValueError(f"duplicate p values for n={n}")
        out[n] = (
            ps,
            np.array([x.tau for x in pts]),
            np.array([x.stderr for x in pts]),
        )
    return out


def _pair_crossings(by_n, z: float) -> dict[tuple[int, int], float] | tuple[int, int]:
    """Crossing points of log(tau) - z log(n) curve pairs; a pair that fails
    to cross is returned as the offending (n1, n2) tuple."""
    ns = sorted(by_n)
    crossings = {}
    for a in range(len(ns)):
        for b in range(a + 1, len(ns)):
            n1, n2 = ns[a], ns[b]
            p1, t1, _ = by_n[n1]
            p2, t2, _ = by_n[n2]
            lo, hi = max(p1[0], p2[0]), min(p1[-1], p2[-1])
            if lo >= hi:
                return (n1, n2)
            grid = np.unique(np.clip(np.concatenate([p1, p2]), lo, hi))
            y1 = np.interp(grid, p1, np.log(t1)) - z * np.log(n1)
            y2 = np.interp(grid, p2, np.log(t2)) - z * np.log(n2)
            d = y1 - y2
            zeros = []
            for i in range(d.size - 1):
                if d[i] == 0.0:
                    zeros.append(grid[i])
                elif d[i] * d[i + 1] < 0:
                    frac = d[i] / (d[i] - d[i + 1])
                    zeros.append(grid[i] + frac * (grid[i + 1] - grid[i]))
            if d[-1] == 0.0:
                zeros.append(grid[-1])
            if not zeros:
                return (n1, n2)
            crossings[(n1, n2)] = float(np.mean(zeros))
    return crossings


def _crossing_objective(by_n, z: float) -> float:
    res = _pair_crossings(by_n, z)
    if isinstance(res, tuple):
        return _PENALTY
    return float(np.var(list(res.values())))


def fit_crossing(
    points,
    z_bounds: tuple[float, float] = (0.5, 3.0),
    n_bootstrap: int = 100,
    seed: int = 0,
) -> CrossingFit:
    """Find (p_c, z) minimizing the spread of pairwise crossings of tau/n^z.

    Requires at least 3 system sizes and 5 error rates spanning the crossing.
    Uncertainties come from a parametric bootstrap over the tau standard
    errors (zero when stderr inputs are all zero).
    """
    pts = list(points)
    by_n = _group_by_n(pts)
    if len(by_n) < 3:
        raise ValueError(f"need at least 3 distinct system sizes, got {len(by_n)}")
    all_p = np.unique(np.concatenate([v[0] for v in by_n.values()]))
    if all_p.size < 5:
        raise ValueError(f"need at least 5 distinct p values, got {all_p.size}")

    def best_z(groups) -> tuple[float, float]:
        zs = np.linspace(z_bounds[0], z_bounds[1], 121)
        vals = np.array([_crossing_objective(groups, z) for z in zs])
        if np.all(vals >= _PENALTY):
            fail = _pair_crossings(groups, zs[np.argmin(vals)])
            pair = fail if isinstance(fail, tuple) else (0, 0)
            raise CrossingError(
                f"tau curves for n={pair[0]} and n={pair[1]} do not cross in range"
            )
        zc = zs[int(np.argmin(vals))]
        span = zs[1] - zs[0]
        res = optimize.minimize_scalar(
            lambda z: _crossing_objective(groups, z),
            bounds=(max(z_bounds[0], zc - 2 * span), min(z_bounds[1], zc + 2 * span)),
            method="bounded",
            options={"xatol": 1e-6},
        )
        return float(res.x), float(res.fun)

    z_star, obj = best_z(by_n)
    crossings = _pair_crossings(by_n, z_star)
    if isinstance(crossings, tuple):
        raise CrossingError(
            f"tau curves for n={crossings[0]} and n={crossings[1]} do not cross in range"
        )
    p_c = float(np.mean(list(crossings.values())))

    p_c_std = z_std = 0.0
    if n_bootstrap > 0 and any(v[2].max() > 0 for v in by_n.values()):
        rng = np.random.default_rng(seed)
        boot = []
        for _ in range(n_bootstrap):
            groups = {}
            for n, (ps, taus, errs) in by_n.items():
                draw = np.maximum(taus + rng.normal(0.0, 1.0, taus.size) * errs, 1e-9)
                groups[n] = (ps, draw, errs)
            try:
                zb, _ = best_z(groups)
                cb = _pair_crossings(groups, zb)
                if isinstance(cb, tuple):
                    continue
                boot.append((float(np.mean(list(cb.values()))), zb))
            except CrossingError:
                continue
        if len(boot) > 1:
            arr = np.array(boot)
            p_c_std = float(arr[:, 0].std(ddof=1))
            z_std = float(arr[:, 1].std(ddof=1))

    return CrossingFit(
        p_c=p_c,
        z=z_star,
        p_c_stderr=p_c_std,
        z_stderr=z_std,
        objective=obj,
        crossings=crossings,
    )


# --------------------------------------------------------------------------
# data collapse
# --------------------------------------------------------------------------


@dataclass
class CollapseSpec:
    """Power-law axis rescalings with named exponents.

    x_map / y_map take (array, curve labels, params dict) and return the
    rescaled array; y_map must be linear in y so the same factor rescales
    the standard errors.
    """

    param_names: tuple[str, ...]
    x_map: Callable[[np.ndarray, dict, dict], np.ndarray]
    y_map: Callable[[np.ndarray, dict, dict], np.ndarray]
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)


def tau_crossing_spec(
    z_bounds=(0.5, 3.0), nu_bounds=(0.4, 3.0), p_c_bounds=(0.0, 0.5)
) -> CollapseSpec:
    """tau(p) curves per size n: x -> (p - p_c) n^(1/nu), y -> tau / n^z."""
    return CollapseSpec(
        param_names=("z", "nu", "p_c"),
        x_map=lambda x, lab, par: (x - par["p_c"]) * lab["n"] ** (1.0 / par["nu"]),
        y_map=lambda y, lab, par: y / lab["n"] ** par["z"],
        bounds={"z": z_bounds, "nu": nu_bounds, "p_c": p_c_bounds},
    )


def noise_collapse_spec(
    label_key: str = "q", a_bounds=(0.05, 1.5), b_bounds=(0.05, 2.0)
) -> CollapseSpec:
    """S(t) curves per noise value v: x -> t v^b, y -> S v^-a.

    a plays gamma/eta and b plays z/eta for an additive-noise perturbation.
    """
    return CollapseSpec(
        param_names=("a", "b"),
        x_map=lambda x, lab, par: x * lab[label_key] ** par["b"],
        y_map=lambda y, lab, par: y * lab[label_key] ** (-par["a"]),
        bounds={"a": a_bounds, "b": b_bounds},
    )


def collapse_objective(curves, spec: CollapseSpec, params: dict) -> float:
    """Weighted squared spread of the rescaled curves around each other.

    Every curve is linearly interpolated onto every other curve's rescaled
    x-points over the overlapping range; exactly coincident curves give 0.
    """
    if len(curves) < 2:
        return 0.0
    xs, ys, es = [], [], []
    for c in curves:
        xs.append(np.asarray(spec.x_map(c.times, c.labels, params), dtype=float))
        ys.append(np.asarray(spec.y_map(c.values, c.labels, params), dtype=float))
        es.append(np.abs(np.asarray(spec.y_map(c.std_errors, c.labels, params), dtype=float)))
    dev2 = []
    var2 = []
    pooled = []
    for i in range(len(curves)):
        for j in range(len(curves)):
            if i == j:
                continue
            lo, hi = xs[j][0], xs[j][-1]
            mask = (xs[i] >= lo) & (xs[i] <= hi)
            if not mask.any():
                continue
            yj = np.interp(xs[i][mask], xs[j], ys[j])
            ej = np.interp(xs[i][mask], xs[j], es[j])
            dev2.append((ys[i][mask] - yj) ** 2)
            var2.append(es[i][mask] ** 2 + ej**2)
            pooled.append(ys[i][mask])
    if not dev2:
        raise ValueError("no x-overlap between rescaled curves")
    dev2 = np.concatenate(dev2)
    var2 = np.concatenate(var2)
    pos = var2[var2 > 0]
    if pos.size:
        # error weighting is scale-free: errors rescale together with values
        w = 1.0 / np.maximum(var2, pos.min())
        return float((w * dev2).sum() / w.sum())
    if dev2.max() == 0.0:
        return 0.0
    # noise-free data: normalize by the pooled spread so that inflating or
    # crushing the y-axis cannot fake a good collapse
    pooled = np.concatenate(pooled)
    scale = float(pooled.var())
    if scale <= 0.0:
        scale = float(np.abs(pooled).max() ** 2) or 1.0
    return float(dev2.mean() / scale)


@dataclass
class CollapseFit:
    params: dict
    objective: float
    converged: bool
    degenerate: bool


def fit_collapse(
    curves,
    spec: CollapseSpec,
    bounds: dict | None = None,
    n_restarts: int = 8,
    seed: int = 0,
) -> CollapseFit:
    """Minimize the collapse objective with Nelder-Mead from several restarts."""
    bounds = dict(spec.bounds if bounds is None else bounds)
    missing = [p for p in spec.param_names if p not in bounds]
    if missing:
        raise ValueError(f"bounds missing for {missing}")
    names = spec.param_names
    lo = np.array([bounds[p][0] for p in names])
    hi = np.array([bounds[p][1] for p in names])
    center = 0.5 * (lo + hi)
    if len(curves) < 2:
        return CollapseFit(
            params=dict(zip(names, center)), objective=0.0, converged=False, degenerate=True
        )

    def fun(vec: np.ndarray) -> float:
        try:
            return collapse_objective(curves, spec, dict(zip(names, vec)))
        except ValueError:
            return _PENALTY

    center_value = fun(center)
    rng = np.random.default_rng(seed)
    starts = [center] + [lo + (hi - lo) * rng.random(len(names)) for _ in range(n_restarts - 1)]
    best_vec, best_val = center, center_value
    for x0 in starts:
        res = optimize.minimize(
            fun,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 2000},
        )
        if res.fun < best_val:
            best_vec, best_val = np.asarray(res.x), float(res.fun)
    converged = best_val < center_value
    return CollapseFit(
        params={n: float(v) for n, v in zip(names, best_vec)},
        objective=float(best_val),
        converged=converged,
        degenerate=False,
    )
