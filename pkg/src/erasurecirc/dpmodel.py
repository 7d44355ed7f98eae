"""Diffusion-reaction lattice model and the exact gate-average identity.

The model: one occupancy bit per site; a brickwork pair update sends an
empty pair to itself and any occupied pair to one of (empty, occupied),
(occupied, empty), (occupied, occupied) with probability 1/3 each; erasure
then clears each site independently. The all-empty lattice is absorbing.
The fraction of an ensemble sitting in the absorbing state estimates the
gate-averaged collision probability of the classical circuit.

The 1/3-update table and the 4x4 weight matrix encode the same Markov
kernel; verify_gate_average_identity certifies the kernel against the
gate set in exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gates import enumerate_gates
from .schedule import brickwork_pairs

__all__ = [
    "DPLattice",
    "weight_matrix",
    "pair_update",
    "step_lattice",
    "estimate_q_bar",
    "run_dp_ensemble",
    "absorption_times",
    "verify_gate_average_identity",
    "QBarEstimate",
    "DpEnsembleResult",
    "IdentityCheck",
]


@dataclass
class DPLattice:
    """Occupancy bits of the lattice; 1 = particle present."""

    occupancy: np.ndarray

    def __post_init__(self):
        self.occupancy = (np.asarray(self.occupancy, dtype=np.uint8) & 1).copy()

    @property
    def n_sites(self) -> int:
        return self.occupancy.size

    @classmethod
    def empty(cls, n_sites: int) -> "DPLattice":
        return cls(np.zeros(n_sites, dtype=np.uint8))

    @classmethod
    def full(cls, n_sites: int) -> "DPLattice":
        return cls(np.ones(n_sites, dtype=np.uint8))

    @classmethod
    def random_half(cls, n_sites: int, rng: np.random.Generator) -> "DPLattice":
        """Each site occupied with probability 1/2 (the uniform-input boundary)."""
        return cls((rng.random(n_sites) < 0.5).astype(np.uint8))

    def is_empty(self) -> bool:
        return not self.occupancy.any()


def weight_matrix() -> list[list[Fraction]]:
    """Exact 4x4 pair-update weights in configuration order (1,1),(1,x),(x,1),(x,x)."""
    third = Fraction(1, 3)
    return [
        [Fraction(1), Fraction(0), Fraction(0), Fraction(0)],
        [Fraction(0), third, third, third],
        [Fraction(0), third, third, third],
        [Fraction(0), third, third, third],
    ]


def pair_update(left: int, right: int, rng: np.random.Generator) -> tuple[int, int]:
    """One pair through the Markov kernel: empty pairs are frozen, occupied
    pairs land uniformly on the three occupied configurations."""
    if not (left or right):
        return 0, 0
    choice = int(rng.integers(1, 4))  # 1 -> (0,1), 2 -> (1,0), 3 -> (1,1)
    return (choice >> 1) & 1, choice & 1


def step_lattice(
    lattice: DPLattice, p: float, layer_parity: int, rng: np.random.Generator
) -> DPLattice:
    """One time step: pair updates on the brickwork pairs of the given parity,
    then independent erasure (particle loss) with probability p per site."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    occ = lattice.occupancy.copy()
    n = occ.size
    left, right = brickwork_pairs(n, layer_parity)
    occupied = occ[left] | occ[right]
    choice = rng.integers(1, 4, size=left.size).astype(np.uint8)
    occ[left] = ((choice >> 1) & 1) & occupied
    occ[right] = (choice & 1) & occupied
    if p > 0:
        occ &= rng.random(n) >= p
    return DPLattice(occ)


def _step_batch(occ: np.ndarray, p: float, parity: int, rng: np.random.Generator) -> None:
    """In-place step for a whole batch of trajectories (rows)."""
    n = occ.shape[1]
    left, right = brickwork_pairs(n, parity)
    occupied = occ[:, left] | occ[:, right]
    choice = rng.integers(1, 4, size=occupied.shape).astype(np.uint8)
    occ[:, left] = ((choice >> 1) & 1) & occupied
    occ[:, right] = (choice & 1) & occupied
    if p > 0:
        occ &= rng.random(occ.shape) >= p


@dataclass
class QBarEstimate:
    estimate: float
    std_error: float
    n_trajectories: int
    series: np.ndarray  # absorbed fraction after each step, length depth + 1


def estimate_q_bar(
    n: int, depth: int, p: float, n_trajectories: int, rng: np.random.Generator
) -> QBarEstimate:
    """Fraction of trajectories absorbed (all-empty) at the given depth.

    Initial occupancy is independently 1/2 per site; absorbed trajectories
    stay absorbed, so the series is non-decreasing. Standard error is
    binomial.
    """
    occ = (rng.random((n_trajectories, n)) < 0.5).astype(np.uint8)
    alive = np.flatnonzero(occ.any(axis=1))
    absorbed = np.empty(depth + 1)
    absorbed[0] = 1.0 - alive.size / n_trajectories
    for t in range(depth):
        if alive.size:
            sub = occ[alive]
            _step_batch(sub, p, t % 2, rng)
            occ[alive] = sub
            alive = alive[sub.any(axis=1)]
        absorbed[t + 1] = 1.0 - alive.size / n_trajectories
    q = absorbed[-1]
    return QBarEstimate(
        estimate=float(q),
        std_error=float(np.sqrt(max(q * (1 - q), 0.0) / n_trajectories)),
        n_trajectories=n_trajectories,
        series=absorbed,
    )


@dataclass
class DpEnsembleResult:
    density_mean: np.ndarray
    density_stderr: np.ndarray
    survival: np.ndarray
    absorbed: np.ndarray
    absorbed_stderr: np.ndarray
    n_trajectories: int


def run_dp_ensemble(
    n: int,
    depth: int,
    p: float,
    n_trajectories: int,
    rng: np.random.Generator,
    initial: str = "half",
) -> DpEnsembleResult:
    """Density and survival observables over an ensemble of trajectories.

    initial: 'half' (each site occupied with probability 1/2) or 'full'.
    """
    if initial == "half":
        occ = (rng.random((n_trajectories, n)) < 0.5).astype(np.uint8)
    elif initial == "full":
        occ = np.ones((n_trajectories, n), dtype=np.uint8)
    else:
        raise ValueError(f"unknown initial condition {initial!r}")
    density = np.zeros(depth + 1)
    density_err = np.zeros(depth + 1)
    survival = np.zeros(depth + 1)
    counts = occ.sum(axis=1, dtype=np.int64)
    alive = np.flatnonzero(counts > 0)
    dens = counts / n
    density[0] = dens.mean()
    density_err[0] = dens.std(ddof=1) / np.sqrt(n_trajectories) if n_trajectories > 1 else 0.0
    survival[0] = alive.size / n_trajectories
    # absorbed trajectories contribute exact zeros; only live rows are stepped
    for t in range(depth):
        if alive.size:
            sub = occ[alive]
            _step_batch(sub, p, t % 2, rng)
            occ[alive] = sub
            alive = alive[sub.any(axis=1)]
        counts = occ.sum(axis=1, dtype=np.int64)
        dens = counts / n
        density[t + 1] = dens.mean()
        density_err[t + 1] = (
            dens.std(ddof=1) / np.sqrt(n_trajectories) if n_trajectories > 1 else 0.0
        )
        survival[t + 1] = alive.size / n_trajectories
    absorbed = 1.0 - survival
    absorbed_err = np.sqrt(np.maximum(absorbed * (1 - absorbed), 0.0) / n_trajectories)
    return DpEnsembleResult(
        density_mean=density,
        density_stderr=density_err,
        survival=survival,
        absorbed=absorbed,
        absorbed_stderr=absorbed_err,
        n_trajectories=n_trajectories,
    )


def absorption_times(
    n: int,
    p: float,
    n_trajectories: int,
    rng: np.random.Generator,
    cap: int,
    initial: str = "full",
) -> tuple[np.ndarray, np.ndarray]:
    """First all-empty time per trajectory, capped; returns (times, capped mask)."""
    if initial == "half":
        occ = (rng.random((n_trajectories, n)) < 0.5).astype(np.uint8)
    elif initial == "full":
        occ = np.ones((n_trajectories, n), dtype=np.uint8)
    else:
        raise ValueError(f"unknown initial condition {initial!r}")
    times = np.full(n_trajectories, cap, dtype=np.int64)
    alive = np.flatnonzero(occ.any(axis=1))
    times[np.setdiff1d(np.arange(n_trajectories), alive)] = 0
    for t in range(cap):
        if alive.size == 0:
            break
        sub = occ[alive]
        _step_batch(sub, p, t % 2, rng)
        occ[alive] = sub
        still = sub.any(axis=1)
        died = alive[~still]
        times[died] = t + 1
        alive = alive[still]
    return times, times >= cap


@dataclass
class DpCriticalityFit:
    p_c: float
    z: float
    scan: list  # (p, slopes, spread) rows from the locator
    final_sizes: tuple
    final_times: np.ndarray


def _median_absorption(n: int, p: float, n_traj: int, seed_key, cap_scale: float):
    cap = int(cap_scale * n**1.6)
    rng = np.random.default_rng(np.random.SeedSequence(seed_key[0], spawn_key=seed_key[1:]))
    times, capped = absorption_times(n, p, n_traj, rng, cap=cap, initial="full")
    return float(np.median(times)), float(capped.mean())


def fit_dp_criticality(
    p_grid,
    scan_sizes=(16, 32, 64),
    final_sizes=(16, 32, 64, 128),
    n_scan: int = 1200,
    n_final: int = 2000,
    seed: int = 0,
    cap_scale: float = 40.0,
) -> DpCriticalityFit:
    """Locate the model's critical point and dynamical exponent from
    absorption-time scaling.

    At criticality the median absorption time grows as n^z, so the pairwise
    log-slopes between consecutive sizes are size-independent; below it they
    grow with size, above it they shrink. The critical point is where the
    slope spread is smallest (parabolic refinement around the grid minimum),
    and z is the mean slope re-measured there over final_sizes.
    """
    scan = []
    spreads = []
    for p in p_grid:
        meds = []
        valid = True
        for n in scan_sizes:
            med, capped = _median_absorption(n, float(p), n_scan, (seed, 0, n, int(p * 1e6)), cap_scale)
            if capped >= 0.5:
                valid = False
                break
            meds.append(med)
        if not valid:
            scan.append((float(p), [], float("inf")))
            spreads.append(float("inf"))
            continue
        slopes = [
            float(np.log(meds[i + 1] / meds[i]) / np.log(scan_sizes[i + 1] / scan_sizes[i]))
            for i in range(len(scan_sizes) - 1)
        ]
        spread = max(slopes) - min(slopes)
        scan.append((float(p), slopes, spread))
        spreads.append(spread)
    spreads = np.asarray(spreads)
    if not np.isfinite(spreads).any():
        raise ValueError("no usable grid point: absorption times exceeded the cap everywhere")
    i0 = int(np.argmin(spreads))
    p_c = float(p_grid[i0])
    if 0 < i0 < len(p_grid) - 1 and np.isfinite(spreads[[i0 - 1, i0 + 1]]).all():
        # parabolic refinement through the three points around the minimum
        x = np.asarray(p_grid[i0 - 1 : i0 + 2], dtype=float)
        y = spreads[i0 - 1 : i0 + 2]
        denom = (y[0] - 2 * y[1] + y[2])
        if denom > 0:
            shift = 0.5 * (y[0] - y[2]) / denom
            p_c = float(x[1] + shift * (x[1] - x[0]))
    final_times = []
    for n in final_sizes:
        med, capped = _median_absorption(n, p_c, n_final, (seed, 1, n), cap_scale)
        if capped >= 0.5:
            raise ValueError(f"absorption times at n={n} exceeded the cap at p_c={p_c}")
        final_times.append(med)
    final_times = np.asarray(final_times)
    z = float(np.polyfit(np.log(final_sizes), np.log(final_times), 1)[0])
    return DpCriticalityFit(
        p_c=p_c, z=z, scan=scan, final_sizes=tuple(final_sizes), final_times=final_times
    )


# --------------------------------------------------------------------------
# exact gate-average identity
# --------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    passed: bool
    max_deviation: Fraction
    failing_entry: tuple[int, int] | None


def _hat_matrix(kind: int, halved: bool) -> list[list[Fraction]]:
    """2x2 identity (kind 0) or X (kind 1), with an optional factor 1/2."""
    s = Fraction(1, 2) if halved else Fraction(1)
    if kind == 0:
        return [[s, Fraction(0)], [Fraction(0), s]]
    return [[Fraction(0), s], [s, Fraction(0)]]


def gate_average_lhs() -> list[list[Fraction]]:
    """(1/24) sum_g T_g kron T_g as exact fractions (16x16)."""
    total = np.zeros((16, 16), dtype=np.int64)
    for g in enumerate_gates():
        t = np.zeros((4, 4), dtype=np.int64)
        for beta, alpha in enumerate(g.perm):
            t[alpha, beta] = 1
        total += np.kron(t, t)
    return [[Fraction(int(total[i, j]), 24) for j in range(16)] for i in range(16)]


def gate_average_rhs(m: list[list[Fraction]] | None = None) -> list[list[Fraction]]:
    """sum over tau/sigma configurations of M * tauhat1 x tauhat2 x sighat1 x sighat2.

    Row index packs (alpha_copy1, alpha_copy2), column (beta_copy1,
    beta_copy2); the tauhat factors connect the two copies' output bits and
    the sighat factors their input bits. tauhat carries the factor 1/2.
    """
    if m is None:
        m = weight_matrix()
    out = [[Fraction(0)] * 16 for _ in range(16)]
    hats = {}
    for t1 in (0, 1):
        for t2 in (0, 1):
            for s1 in (0, 1):
                for s2 in (0, 1):
                    w = m[2 * t1 + t2][2 * s1 + s2]
                    if w == 0:
                        continue
                    th1 = hats.setdefault(("t", t1), _hat_matrix(t1, True))
                    th2 = hats.setdefault(("t", t2), _hat_matrix(t2, True))
                    sh1 = hats.setdefault(("s", s1), _hat_matrix(s1, False))
                    sh2 = hats.setdefault(("s", s2), _hat_matrix(s2, False))
                    for a1 in range(4):
                        for a2 in range(4):
                            th = th1[a1 >> 1][a2 >> 1] * th2[a1 & 1][a2 & 1]
                            if th == 0:
                                continue
                            for b1 in range(4):
                                for b2 in range(4):
                                    sh = sh1[b1 >> 1][b2 >> 1] * sh2[b1 & 1][b2 & 1]
                                    if sh == 0:
                                        continue
                                    out[4 * a1 + a2][4 * b1 + b2] += w * th * sh
    return out


def verify_gate_average_identity(m: list[list[Fraction]] | None = None) -> IdentityCheck:
    """Entrywise equality of the averaged doubled gate tensor with the
    weight-matrix form, in exact rationals. Passing requires deviation zero."""
    lhs = gate_average_lhs()
    rhs = gate_average_rhs(m)
    max_dev = Fraction(0)
    worst = None
    for i in range(16):
        for j in range(16):
            d = abs(lhs[i][j] - rhs[i][j])
            if d > max_dev:
                max_dev, worst = d, (i, j)
    return IdentityCheck(passed=max_dev == 0, max_deviation=max_dev, failing_entry=worst)
