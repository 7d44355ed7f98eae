"""Seeded experiment drivers: entropy decay, input:output MI, antipodal MI,
perturbation sweeps.

Every driver is deterministic given (config, master_seed, n_realizations):
realization i draws its schedule from SeedSequence(master_seed,
spawn_key=(i,)), trajectories are reduced in index order, and the worker
count never changes the result. Classical runs (q = 0, no Bell reference)
use the Z-sector engine; anything else uses the full tableau.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .scaling import DecayCurve, extract_tau
from .schedule import (
    CircuitConfig,
    Layer,
    Schedule,
    brickwork_pairs,
    materialize_schedule,
    trajectory_seed,
)
from .stabilizer import StabilizerState, ZSectorState

__all__ = [
    "CircuitConfig",
    "Schedule",
    "materialize_schedule",
    "ExperimentRecord",
    "SeriesStats",
    "run_entropy_decay",
    "run_entropy_trajectories",
    "run_io_mi_decay",
    "run_antipodal_mi",
    "run_perturbation",
    "run_tau_sweep",
    "tau_from_trajectories",
    "default_depth",
    "default_t0",
    "scaling_t0",
    "IoMiDecayResult",
    "AntipodalMiResult",
    "PerturbationResult",
    "TauSweepRow",
]


@dataclass
class SeriesStats:
    """Per-time-step mean and standard error of one observable."""

    mean: np.ndarray
    stderr: np.ndarray


@dataclass
class ExperimentRecord:
    """Config, seed and aggregated time series of one experiment."""

    config: CircuitConfig
    master_seed: int
    n_realizations: int
    series: dict[str, SeriesStats]
    metadata: dict = field(default_factory=dict)


def _metadata() -> dict:
    return {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"), "version": __version__}


def _use_fast_path(config: CircuitConfig) -> bool:
    return config.q == 0.0 and config.initial_state != "referenced_bell"


def _initial_state(config: CircuitConfig):
    if _use_fast_path(config):
        if config.initial_state == "maximally_mixed":
            return ZSectorState.maximally_mixed(config.n)
        return ZSectorState.referenced_classical(config.n)
    if config.initial_state == "maximally_mixed":
        return StabilizerState.maximally_mixed(config.n)
    kind = "classical" if config.initial_state == "referenced_classical" else "bell"
    return StabilizerState.referenced(config.n, kind)


def apply_layer(state, layer: Layer) -> None:
    """Advance one time step: gates, Hadamards, junk, erasures, in that order."""
    state.apply_gate_layer(layer.gate_ids, layer.left, layer.right)
    if layer.hadamard_sites.size:
        state.apply_hadamard_sites(layer.hadamard_sites)
    for s in layer.junk_sites:
        state.apply_junk_noise(int(s))
    for s in layer.erasure_sites:
        state.apply_erasure(int(s))


def run_schedule(state, sched: Schedule) -> None:
    """Drive a state through every layer of a schedule."""
    for layer in sched.layers:
        apply_layer(state, layer)


# --------------------------------------------------------------------------
# entropy decay
# --------------------------------------------------------------------------


def _entropy_trajectory(args) -> np.ndarray:
    config, master_seed, index = args
    sched = materialize_schedule(config, trajectory_seed(master_seed, index))
    state = _initial_state(config)
    out = np.empty(config.depth + 1, dtype=np.int32)
    out[0] = state.entropy()
    # entropy 0 is absorbing only while nothing can regenerate it
    absorbing = config.q == 0.0 and config.h == 0.0
    for t, layer in enumerate(sched.layers):
        apply_layer(state, layer)
        out[t + 1] = state.entropy()
        if absorbing and out[t + 1] == 0:
            out[t + 2 :] = 0
            break
    return out


def _map_trajectories(fn, config, master_seed, n_realizations, workers) -> list:
    args = [(config, master_seed, i) for i in range(n_realizations)]
    if workers <= 1:
        return [fn(a) for a in args]
    chunk = max(1, n_realizations // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args, chunksize=chunk))


def run_entropy_trajectories(
    config: CircuitConfig, master_seed: int, n_realizations: int, workers: int = 1
) -> np.ndarray:
    """Entropy series of every realization, shape (n_realizations, depth + 1)."""
    rows = _map_trajectories(_entropy_trajectory, config, master_seed, n_realizations, workers)
    return np.stack(rows)


def _mean_stderr(samples: np.ndarray) -> SeriesStats:
    mean = samples.mean(axis=0)
    if samples.shape[0] > 1:
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(samples.shape[0])
    else:
        stderr = np.zeros_like(mean, dtype=float)
    return SeriesStats(mean=mean, stderr=stderr)


def run_entropy_decay(
    config: CircuitConfig, master_seed: int, n_realizations: int, workers: int = 1
) -> ExperimentRecord:
    """Mean system entropy versus time from the maximally mixed start."""
    if config.initial_state != "maximally_mixed":
        raise ValueError("entropy decay runs start from the maximally mixed state")
    trajs = run_entropy_trajectories(config, master_seed, n_realizations, workers)
    return ExperimentRecord(
        config=config,
        master_seed=master_seed,
        n_realizations=n_realizations,
        series={"entropy": _mean_stderr(trajs.astype(float))},
        metadata=_metadata(),
    )


# --------------------------------------------------------------------------
# input:output mutual information
# --------------------------------------------------------------------------


@dataclass
class IoMiDecayResult:
    config: CircuitConfig
    master_seed: int
    n_realizations: int
    threshold: float
    timescale_mean: float
    timescale_stderr: float
    capped_fraction: float
    times: np.ndarray  # per-realization first crossing (depth+1 where capped)


def _io_mi_trajectory(args) -> tuple[int, bool]:
    config, master_seed, index, threshold = args
    sched = materialize_schedule(config, trajectory_seed(master_seed, index))
    state = _initial_state(config)
    n = config.n
    system = np.arange(n)
    reference = np.arange(n, 2 * n)
    if state.mutual_information(system, reference) < threshold:
        return 0, False
    for t, layer in enumerate(sched.layers):
        apply_layer(state, layer)
        if state.mutual_information(system, reference) < threshold:
            return t + 1, False
    return config.depth + 1, True


def run_io_mi_decay(
    config: CircuitConfig,
    master_seed: int,
    n_realizations: int,
    threshold: float = 1.0,
    workers: int = 1,
) -> IoMiDecayResult:
    """First time I(system : reference) falls below threshold, per realization.

    Capped realizations (never decayed within depth) are excluded from the
    mean and reported through capped_fraction.
    """
    if config.initial_state == "maximally_mixed":
        raise ValueError("input:output MI needs a referenced initial state")
    fn_args = [(config, master_seed, i, threshold) for i in range(n_realizations)]
    if workers <= 1:
        results = [_io_mi_trajectory(a) for a in fn_args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_io_mi_trajectory, fn_args))
    times = np.array([t for t, _ in results], dtype=float)
    capped = np.array([c for _, c in results], dtype=bool)
    ok = times[~capped]
    if ok.size:
        mean = float(ok.mean())
        stderr = float(ok.std(ddof=1) / np.sqrt(ok.size)) if ok.size > 1 else 0.0
    else:
        mean, stderr = float("nan"), float("nan")
    return IoMiDecayResult(
        config=config,
        master_seed=master_seed,
        n_realizations=n_realizations,
        threshold=threshold,
        timescale_mean=mean,
        timescale_stderr=stderr,
        capped_fraction=float(capped.mean()),
        times=times,
    )


# --------------------------------------------------------------------------
# antipodal mutual information
# --------------------------------------------------------------------------


@dataclass
class AntipodalMiResult:
    config: CircuitConfig
    master_seed: int
    n_realizations: int
    t_eval: int
    mi_mean: float
    mi_stderr: float


def _antipodal_trajectory(args) -> int:
    config, master_seed, index = args
    sched = materialize_schedule(config, trajectory_seed(master_seed, index))
    state = _initial_state(config)
    run_schedule(state, sched)
    n4 = config.n // 4
    seg_a = np.arange(0, n4)
    seg_b = np.arange(config.n // 2, config.n // 2 + n4)
    return state.mutual_information(seg_a, seg_b)


def run_antipodal_mi(
    config: CircuitConfig,
    master_seed: int,
    n_realizations: int,
    z_exponent: float = 1.51,
    workers: int = 1,
) -> AntipodalMiResult:
    """Mean MI between antipodal length-n/4 segments, evaluated at t = n^z."""
    if config.n % 4:
        raise ValueError("antipodal MI needs n divisible by 4")
    t_eval = max(1, round(config.n**z_exponent))
    run_config = replace(config, depth=t_eval)
    vals = np.array(
        _map_trajectories(
            _antipodal_trajectory, run_config, master_seed, n_realizations, workers
        ),
        dtype=float,
    )
    stderr = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
    return AntipodalMiResult(
        config=run_config,
        master_seed=master_seed,
        n_realizations=n_realizations,
        t_eval=t_eval,
        mi_mean=float(vals.mean()),
        mi_stderr=stderr,
    )


# --------------------------------------------------------------------------
# perturbation sweeps at fixed p
# --------------------------------------------------------------------------


@dataclass
class PerturbationResult:
    sweep: str
    values: list[float]
    records: list[ExperimentRecord]
    saturation_mean: list[float]
    saturation_stderr: list[float]


def run_perturbation(
    config: CircuitConfig,
    sweep: str,
    values,
    master_seed: int,
    n_realizations: int,
    workers: int = 1,
) -> PerturbationResult:
    """S(t) family over a q- or h-sweep; saturation = mean over the final 10%."""
    if sweep not in ("q", "h"):
        raise ValueError("sweep must be 'q' or 'h'")
    if sweep == "q" and config.h != 0:
        raise ValueError("h must be 0 when sweeping q")
    if sweep == "h" and config.q != 0:
        raise ValueError("q must be 0 when sweeping h")
    records, sat_mean, sat_err = [], [], []
    tail = max(1, config.depth // 10)
    for v in values:
        cfg = replace(config, **{sweep: float(v)})
        trajs = run_entropy_trajectories(cfg, master_seed, n_realizations, workers).astype(float)
        per_traj_sat = trajs[:, -tail:].mean(axis=1)
        records.append(
            ExperimentRecord(
                config=cfg,
                master_seed=master_seed,
                n_realizations=n_realizations,
                series={"entropy": _mean_stderr(trajs)},
                metadata=_metadata(),
            )
        )
        sat_mean.append(float(per_traj_sat.mean()))
        sat_err.append(
            float(per_traj_sat.std(ddof=1) / np.sqrt(per_traj_sat.size))
            if per_traj_sat.size > 1
            else 0.0
        )
    return PerturbationResult(
        sweep=sweep,
        values=[float(v) for v in values],
        records=records,
        saturation_mean=sat_mean,
        saturation_stderr=sat_err,
    )


# --------------------------------------------------------------------------
# tau sweep over (n, p)
# --------------------------------------------------------------------------


@dataclass
class TauSweepRow:
    n: int
    p: float
    tau_mean: float
    tau_stderr: float
    censored_fraction: float


def default_depth(n: int, scale: float = 4.0, power: float = 1.6) -> int:
    return max(2, round(scale * n**power))


def default_t0(n: int) -> float:
    return float(max(10, n // 4))


def scaling_t0(n: int, power: float = 1.5, scale: float = 0.125) -> float:
    """Transient cutoff at a fixed fraction of the relaxation scale n^power.

    For crossing analysis across system sizes the anchor must scale with the
    characteristic time, or the smallest sizes measure a different portion
    of the master curve than the largest; the fixed-floor default is meant
    for single-size curves.
    """
    return scale * float(n) ** power


def _tau_with_fallback(curve: DecayCurve, t0: float, fraction: float):
    """extract_tau, but measured from t = 0 when the curve already died
    before the transient cutoff (deep in the non-coding phase there is no
    transient regime to skip)."""
    point = extract_tau(curve, t0=t0, fraction=fraction)
    if point.censored and float(np.interp(t0, curve.times, curve.values)) <= 0.0:
        return extract_tau(curve, t0=0.0, fraction=fraction), 0.0
    return point, t0


def tau_from_trajectories(
    trajs: np.ndarray,
    t0: float,
    fraction: float = 0.15,
    n_bootstrap: int = 100,
    boot_seed=0,
    labels: dict | None = None,
) -> tuple[float, float, float]:
    """(tau, stderr, censored_fraction) of the mean curve of a trajectory set.

    tau comes from the full ensemble-mean curve; the standard error and the
    censored fraction come from bootstrap resampling of realizations. A
    censored point estimate yields (nan, nan, fraction).
    """
    trajs = np.asarray(trajs, dtype=float)
    depth = trajs.shape[1] - 1
    times = np.arange(depth + 1, dtype=float)
    curve = DecayCurve(
        times=times,
        values=trajs.mean(axis=0),
        std_errors=trajs.std(axis=0, ddof=1) / np.sqrt(trajs.shape[0]),
        labels=labels or {},
    )
    point, t0_eff = _tau_with_fallback(curve, t0, fraction)
    boot_rng = np.random.default_rng(boot_seed)
    boot_taus = []
    n_censored = 0
    zeros = np.zeros(depth + 1)
    for _ in range(n_bootstrap):
        pick = boot_rng.integers(0, trajs.shape[0], size=trajs.shape[0])
        bcurve = DecayCurve(
            times=times, values=trajs[pick].mean(axis=0), std_errors=zeros, labels={}
        )
        bt = extract_tau(bcurve, t0=t0_eff, fraction=fraction)
        if bt.censored:
            n_censored += 1
        else:
            boot_taus.append(bt.tau)
    stderr = float(np.std(boot_taus, ddof=1)) if len(boot_taus) > 1 else 0.0
    if point.censored:
        return float("nan"), float("nan"), n_censored / max(n_bootstrap, 1)
    return float(point.tau), stderr, n_censored / max(n_bootstrap, 1)


def run_tau_sweep(
    n_list,
    p_list,
    master_seed: int,
    n_realizations: int,
    depth_fn=default_depth,
    t0_fn=default_t0,
    fraction: float = 0.15,
    n_bootstrap: int = 100,
    workers: int = 1,
    q: float = 0.0,
    h: float = 0.0,
) -> list[TauSweepRow]:
    """Decay time tau(n, p) from the ensemble-mean entropy curve.

    tau comes from the full mean curve; its standard error and the censored
    fraction come from bootstrap resampling of realizations.
    """
    rows = []
    for gi_n, n in enumerate(n_list):
        depth = depth_fn(n)
        t0 = t0_fn(n)
        for gi_p, p in enumerate(p_list):
            config = CircuitConfig(n=int(n), p=float(p), q=q, h=h, depth=depth)
            trajs = run_entropy_trajectories(config, master_seed, n_realizations, workers)
            tau, stderr, censored = tau_from_trajectories(
                trajs,
                t0=t0,
                fraction=fraction,
                n_bootstrap=n_bootstrap,
                boot_seed=np.random.SeedSequence(master_seed, spawn_key=(gi_n, gi_p, 1)),
                labels={"n": int(n), "p": float(p), "q": q, "h": h},
            )
            rows.append(
                TauSweepRow(
                    n=int(n), p=float(p), tau_mean=tau, tau_stderr=stderr,
                    censored_fraction=censored,
                )
            )
    return rows
