"""Brute-force references for small instances.

Three independent oracles validate the stabilizer engines:

* Distribution — exact classical probability evolution (gates permute mass,
  erasure folds a bit onto 0, junk noise randomizes a bit).
* CircuitFunction — the deterministic input->output map of one gate+erasure
  realization, for input:output mutual information.
* DenseState — exact density-matrix evolution with Kraus channels, for the
  quantum side.

Site j of the circuit is bit (n-1-j) of a basis index, matching the kron
order used for dense operators; inside a gate pair the first site is the
high bit.
"""
from __future__ import annotations

import numpy as np

from .gates import enumerate_gates
from .schedule import Schedule
from .stabilizer import StabilizerState

MAX_DIST_BITS = 20
MAX_DENSE_QUBITS = 6

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
_H2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def _bitpos(n: int, site: int) -> int:
    return n - 1 - site


# --------------------------------------------------------------------------
# classical probability distributions
# --------------------------------------------------------------------------


class Distribution:
    """Probability distribution over n-bit strings, stored densely."""

    __slots__ = ("n_bits", "probs")

    def __init__(self, n_bits: int, probs: np.ndarray):
        if not 1 <= n_bits <= MAX_DIST_BITS:
            raise ValueError(f"n_bits must be in [1, {MAX_DIST_BITS}]")
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (1 << n_bits,):
            raise ValueError("probs has wrong length")
        if probs.min() < -1e-12 or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be nonnegative and sum to 1")
        self.n_bits = n_bits
        self.probs = probs

    @classmethod
    def uniform(cls, n_bits: int) -> "Distribution":
        dim = 1 << n_bits
        return cls(n_bits, np.full(dim, 1.0 / dim))

    @classmethod
    def point_mass(cls, n_bits: int, value: int) -> "Distribution":
        probs = np.zeros(1 << n_bits)
        probs[value] = 1.0
        return cls(n_bits, probs)

    def shannon_entropy(self) -> float:
        """Entropy in bits; 0 log 0 = 0."""
        p = self.probs[self.probs > 0]
        return float(-(p * np.log2(p)).sum())


def collision_probability(d: Distribution) -> float:
    """Sum of squared probabilities; never below 2^-n."""
    return float((d.probs**2).sum())


def _gate_index_map(n: int, gate_ids, left, right) -> np.ndarray:
    """Index map of one gate layer acting on basis indices of n sites."""
    x = np.arange(1 << n, dtype=np.int64)
    gates = enumerate_gates()
    for gid, i, j in zip(gate_ids, left, right):
        pi, pj = _bitpos(n, int(i)), _bitpos(n, int(j))
        bi = (x >> pi) & 1
        bj = (x >> pj) & 1
        beta = 2 * bi + bj
        perm = np.asarray(gates[int(gid)].perm, dtype=np.int64)
        out = perm[beta]
        x = (
            (x & ~((1 << pi) | (1 << pj)))
            | (((out >> 1) & 1) << pi)
            | ((out & 1) << pj)
        )
    return x


def _erasure_index_map(n: int, site: int) -> np.ndarray:
    x = np.arange(1 << n, dtype=np.int64)
    return x & ~(1 << _bitpos(n, site))


def evolve_distribution(d: Distribution, s: Schedule) -> Distribution:
    """Push the distribution through a classical realization (q must be 0)."""
    n = d.n_bits
    if s.n_qubits != n:
        raise ValueError("schedule size mismatch")
    p = d.probs.copy()
    dim = 1 << n
    for layer in s.layers:
        if layer.hadamard_sites.size:
            raise ValueError("distribution oracle cannot apply Hadamards")
        if layer.gate_ids.size:
            gmap = _gate_index_map(n, layer.gate_ids, layer.left, layer.right)
            out = np.zeros(dim)
            out[gmap] = p
            p = out
        for site in layer.junk_sites:
            b = 1 << _bitpos(n, int(site))
            x = np.arange(dim, dtype=np.int64)
            p = 0.5 * (p[x & ~b] + p[x | b])
        for site in layer.erasure_sites:
            emap = _erasure_index_map(n, int(site))
            p = np.bincount(emap, weights=p, minlength=dim)
    return Distribution(n, p)


# --------------------------------------------------------------------------
# deterministic circuit functions (gates + erasures only)
# --------------------------------------------------------------------------


class CircuitFunction:
    """One realization as a map on bit strings: map[x] = f(x)."""

    __slots__ = ("n_bits", "map")

    def __init__(self, n_bits: int, map: np.ndarray):
        map = np.asarray(map, dtype=np.int64)
        if map.shape != (1 << n_bits,):
            raise ValueError("map has wrong length")
        self.n_bits = n_bits
        self.map = map

    @classmethod
    def from_schedule(cls, s: Schedule) -> "CircuitFunction":
        """Compose the gate/erasure layers; Hadamards and junk are not functions."""
        n = s.n_qubits
        f = np.arange(1 << n, dtype=np.int64)
        for layer in s.layers:
            if layer.hadamard_sites.size or layer.junk_sites.size:
                raise ValueError("circuit function requires a gate/erasure-only schedule")
            if layer.gate_ids.size:
                f = _gate_index_map(n, layer.gate_ids, layer.left, layer.right)[f]
            for site in layer.erasure_sites:
                f = _erasure_index_map(n, int(site))[f]
        return cls(n, f)


def io_mutual_information(f: CircuitFunction, input_dist: Distribution) -> float:
    """I(X;Y) = S(X) + S(Y) - S(XY) for Y = f(X), in bits."""
    if f.n_bits != input_dist.n_bits:
        raise ValueError("size mismatch")
    px = input_dist.probs
    py = np.bincount(f.map, weights=px, minlength=1 << f.n_bits)
    # joint over (x, f(x)): one atom of weight px[x] per input string
    pj = px[px > 0]
    s_x = input_dist.shannon_entropy()
    s_y = float(-(py[py > 0] * np.log2(py[py > 0])).sum())
    s_xy = float(-(pj * np.log2(pj)).sum())
    return s_x + s_y - s_xy


# --------------------------------------------------------------------------
# dense density matrices
# --------------------------------------------------------------------------


class DenseState:
    """Exact density matrix on up to MAX_DENSE_QUBITS qubits."""

    __slots__ = ("n_qubits", "rho")

    def __init__(self, n_qubits: int, rho: np.ndarray):
        if not 1 <= n_qubits <= MAX_DENSE_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_DENSE_QUBITS}]")
        rho = np.asarray(rho, dtype=complex)
        dim = 1 << n_qubits
        if rho.shape != (dim, dim):
            raise ValueError("rho has wrong shape")
        if abs(np.trace(rho).real - 1.0) > 1e-10 or abs(np.trace(rho).imag) > 1e-10:
            raise ValueError("rho must have unit trace")
        if np.abs(rho - rho.conj().T).max() > 1e-10:
            raise ValueError("rho must be Hermitian")
        self.n_qubits = n_qubits
        self.rho = rho

    @classmethod
    def maximally_mixed(cls, n: int) -> "DenseState":
        dim = 1 << n
        return cls(n, np.eye(dim) / dim)

    @classmethod
    def basis_state(cls, n: int, value: int) -> "DenseState":
        dim = 1 << n
        rho = np.zeros((dim, dim), dtype=complex)
        rho[value, value] = 1.0
        return cls(n, rho)


def _site_op(n: int, site: int, op: np.ndarray) -> np.ndarray:
    """op at one site, identity elsewhere, in kron order (site 0 leftmost)."""
    full = np.eye(1, dtype=complex)
    for j in range(n):
        full = np.kron(full, op if j == site else _I2)
    return full


def apply_unitary(s: DenseState, u: np.ndarray) -> DenseState:
    return DenseState(s.n_qubits, u @ s.rho @ u.conj().T)


def apply_kraus(s: DenseState, kraus: list[np.ndarray]) -> DenseState:
    out = np.zeros_like(s.rho)
    for kk in kraus:
        out += kk @ s.rho @ kk.conj().T
    return DenseState(s.n_qubits, out)


def erasure_kraus(n: int, site: int) -> list[np.ndarray]:
    """Swap with a fresh |0> ancilla and trace it out: {|0><0|, |0><1|} at the site."""
    k0 = np.array([[1, 0], [0, 0]], dtype=complex)
    k1 = np.array([[0, 1], [0, 0]], dtype=complex)
    return [_site_op(n, site, k0), _site_op(n, site, k1)]


def junk_kraus(n: int, site: int) -> list[np.ndarray]:
    """Fully depolarize one site: {|a><b|}/sqrt(2) over a, b."""
    ops = []
    for a in range(2):
        for b in range(2):
            m = np.zeros((2, 2), dtype=complex)
            m[a, b] = 1.0 / np.sqrt(2.0)
            ops.append(_site_op(n, site, m))
    return ops


def evolve_dense(s: DenseState, sched: Schedule) -> DenseState:
    """Run a full schedule: gates and Hadamards conjugate, channels apply Kraus sums."""
    n = s.n_qubits
    if sched.n_qubits != n:
        raise ValueError("schedule size mismatch")
    state = DenseState(n, s.rho)
    for layer in sched.layers:
        if layer.gate_ids.size:
            gmap = _gate_index_map(n, layer.gate_ids, layer.left, layer.right)
            inv = np.empty_like(gmap)
            inv[gmap] = np.arange(gmap.size)
            state = DenseState(n, state.rho[np.ix_(inv, inv)])
        for site in layer.hadamard_sites:
            if not 0 <= site < n:
                raise IndexError("Hadamard site out of range")
            state = apply_unitary(state, _site_op(n, int(site), _H2))
        for site in layer.junk_sites:
            if not 0 <= site < n:
                raise IndexError("junk site out of range")
            state = apply_kraus(state, junk_kraus(n, int(site)))
        for site in layer.erasure_sites:
            if not 0 <= site < n:
                raise IndexError("erasure site out of range")
            state = apply_kraus(state, erasure_kraus(n, int(site)))
    return state


def von_neumann_entropy(s: DenseState) -> float:
    """-sum lambda log2 lambda over the spectrum, in bits."""
    evals = np.linalg.eigvalsh(s.rho)
    evals = evals[evals > 1e-12]
    return float(-(evals * np.log2(evals)).sum())


def partial_trace(s: DenseState, region) -> DenseState:
    """Reduced state on the given sites (complement traced out)."""
    keep = sorted(int(r) for r in region)
    n = s.n_qubits
    if any(r < 0 or r >= n for r in keep) or len(set(keep)) != len(keep):
        raise ValueError("bad region")
    if not keep:
        raise ValueError("region must be nonempty for a reduced state")
    tensor = s.rho.reshape((2,) * (2 * n))
    current = list(range(n))  # sites still present, in axis order
    for j in range(n):
        if j in keep:
            continue
        pos = current.index(j)
        m = len(current)
        tensor = np.trace(tensor, axis1=pos, axis2=pos + m)
        current.remove(j)
    dim = 1 << len(keep)
    return DenseState(len(keep), tensor.reshape(dim, dim))


def subsystem_entropy(s: DenseState, region) -> float:
    region = sorted(int(r) for r in region)
    if not region:
        return 0.0
    return von_neumann_entropy(partial_trace(s, region))


def mutual_information(s: DenseState, a, b) -> float:
    sa, sb = set(int(x) for x in a), set(int(x) for x in b)
    if sa & sb:
        raise ValueError("regions overlap")
    return (
        subsystem_entropy(s, sa)
        + subsystem_entropy(s, sb)
        - subsystem_entropy(s, sa | sb)
    )


# --------------------------------------------------------------------------
# stabilizer -> dense conversion (sign-exact)
# --------------------------------------------------------------------------


def pauli_dense(x_bits, z_bits, sign: int = 0) -> np.ndarray:
    """Dense Hermitian Pauli for bit vectors: (-1)^sign prod_j i^{x z} X^x Z^z."""
    x_bits = np.asarray(x_bits, dtype=np.uint8)
    z_bits = np.asarray(z_bits, dtype=np.uint8)
    full = np.eye(1, dtype=complex)
    for xb, zb in zip(x_bits, z_bits):
        m = np.eye(2, dtype=complex)
        if xb:
            m = m @ _X2
        if zb:
            m = m @ _Z2
        if xb and zb:
            m = 1j * m
        full = np.kron(full, m)
    return -full if sign & 1 else full


def stabilizer_to_dense(state: StabilizerState) -> DenseState:
    """Exact density matrix of a mixed stabilizer state (uses the signs)."""
    n = state.n
    if n > MAX_DENSE_QUBITS:
        raise ValueError("state too large for the dense oracle")
    dim = 1 << n
    rho = np.eye(dim, dtype=complex)
    for g in state.generators():
        gd = pauli_dense(g.x.to_dense(), g.z.to_dense(), g.sign)
        rho = rho @ (np.eye(dim) + gd) / 2.0
    return DenseState(n, rho / (1 << (n - state.k)))
