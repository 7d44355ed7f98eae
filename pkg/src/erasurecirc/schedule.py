"""Circuit configurations and pre-materialized schedules.

A Schedule fixes every random choice of one circuit realization: the gate
drawn for each brickwork pair and the Hadamard / junk / erasure sites of
every layer. The stabilizer engines and the exact oracles consume the same
object, so cross-checks compare identical realizations rather than
statistics.

Seeding: realization i of a run derives its streams from
SeedSequence(master_seed, spawn_key=(i,)), whose four spawned children feed
the gate, Hadamard, junk and erasure draws separately. Changing q therefore
never perturbs where erasures land for a given seed.

Within one layer (one time step) the order is fixed: two-bit gates on the
parity-alternating pairs, then Hadamards, then junk noise, then erasures.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_GATES = 24

_INITIAL_KINDS = ("maximally_mixed", "referenced_classical", "referenced_bell")


@dataclass(frozen=True)
class CircuitConfig:
    """Parameters of one circuit ensemble."""

    n: int
    p: float
    q: float = 0.0
    h: float = 0.0
    depth: int = 1
    initial_state: str = "maximally_mixed"
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"n must be even and >= 2, got {self.n}")
        for name in ("p", "q", "h"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.initial_state not in _INITIAL_KINDS:
            raise ValueError(f"unknown initial_state {self.initial_state!r}")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")

    @property
    def n_total(self) -> int:
        """Total qubit count: doubled when a reference register is attached."""
        return self.n if self.initial_state == "maximally_mixed" else 2 * self.n

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "h": self.h,
            "depth": self.depth,
            "initial_state": self.initial_state,
            "boundary": self.boundary,
        }


@dataclass
class Layer:
    """One time step: gates on disjoint pairs, then the three site sets."""

    gate_ids: np.ndarray
    left: np.ndarray
    right: np.ndarray
    hadamard_sites: np.ndarray
    junk_sites: np.ndarray
    erasure_sites: np.ndarray


@dataclass
class Schedule:
    """All random choices of one realization, in application order."""

    n_qubits: int
    n_system: int
    layers: list[Layer] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.layers)


def brickwork_pairs(n_system: int, layer_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Left/right site arrays of the brickwork pairing for the given layer parity."""
    if layer_index % 2 == 0:
        left = np.arange(0, n_system, 2, dtype=np.intp)
    else:
        left = np.arange(1, n_system, 2, dtype=np.intp)
    right = (left + 1) % n_system
    return left, right


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def trajectory_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Stream root for realization `index` of a run seeded with `master_seed`."""
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def materialize_schedule(config: CircuitConfig, seed) -> Schedule:
    """Deterministically expand (config, seed) into a full Schedule."""
    root = _seed_sequence(seed)
    gates_ss, h_ss, junk_ss, erase_ss = root.spawn(4)
    rng_gates = np.random.default_rng(gates_ss)
    rng_h = np.random.default_rng(h_ss)
    rng_junk = np.random.default_rng(junk_ss)
    rng_erase = np.random.default_rng(erase_ss)

    n_sys = config.n
    empty = np.empty(0, dtype=np.intp)
    layers = []
    for t in range(config.depth):
        left, right = brickwork_pairs(n_sys, t)
        gate_ids = rng_gates.integers(0, N_GATES, size=left.size, dtype=np.int64)
        h_sites = (
            np.flatnonzero(rng_h.random(n_sys) < config.q) if config.q > 0 else empty
        )
        junk_sites = (
            np.flatnonzero(rng_junk.random(n_sys) < config.h) if config.h > 0 else empty
        )
        erase_sites = (
            np.flatnonzero(rng_erase.random(n_sys) < config.p) if config.p > 0 else empty
        )
        layers.append(Layer(gate_ids, left, right, h_sites, junk_sites, erase_sites))
    return Schedule(n_qubits=config.n_total, n_system=n_sys, layers=layers)
