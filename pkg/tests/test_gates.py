"""Gate set: enumeration, sampling, permutation tables, symplectic action."""
import itertools

import numpy as np
import pytest
from scipy import stats

from erasurecirc.gates import (
    AffineGate,
    enumerate_gates,
    sample_gate,
    symplectic_action,
    to_permutation,
)
from erasurecirc.gf2 import symplectic_inner
from erasurecirc.oracle import pauli_dense
from erasurecirc.stabilizer import PauliString
from erasurecirc.gf2 import BitVector

CNOT = AffineGate((1, 0, 1, 1), (0, 0))


def gate_unitary(g: AffineGate) -> np.ndarray:
    u = np.zeros((4, 4), dtype=complex)
    for beta, alpha in enumerate(g.perm):
        u[alpha, beta] = 1.0
    return u


def test_enumerate_gates_has_24():
    assert len(enumerate_gates()) == 24


def test_enumerate_gates_contains_identity():
    assert AffineGate((1, 0, 0, 1), (0, 0)) in enumerate_gates()
    assert to_permutation(AffineGate((1, 0, 0, 1), (0, 0))).map == (0, 1, 2, 3)


def test_enumerate_gates_exhausts_s4():
    perms = {to_permutation(g).map for g in enumerate_gates()}
    assert perms == set(itertools.permutations(range(4)))


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        AffineGate((1, 1, 1, 1), (0, 0))


def test_sample_gate_deterministic():
    a = [sample_gate(np.random.default_rng(42)) for _ in range(10)]
    b = [sample_gate(np.random.default_rng(42)) for _ in range(10)]
    assert a == b


def test_sample_gate_counts_within_binomial_band():
    rng = np.random.default_rng(0)
    counts = {g: 0 for g in enumerate_gates()}
    for _ in range(24_000):
        counts[sample_gate(rng)] += 1
    # 1000 +- 5 sigma of Binomial(24000, 1/24)
    assert all(800 <= c <= 1200 for c in counts.values()), sorted(counts.values())


def test_sample_gate_chi_square_uniformity():
    rng = np.random.default_rng(1)
    gates = enumerate_gates()
    index = {g: i for i, g in enumerate(gates)}
    counts = np.zeros(24)
    n = 100_000
    for _ in range(n):
        counts[index[sample_gate(rng)]] += 1
    chi2 = ((counts - n / 24) ** 2 / (n / 24)).sum()
    assert chi2 < stats.chi2.ppf(1 - 1e-3, df=23)


def test_to_permutation_cnot():
    assert to_permutation(CNOT).map == (0, 1, 3, 2)


def test_to_permutation_offset_only():
    # flip of the first bit: 00->10, 01->11, 10->00, 11->01
    g = AffineGate((1, 0, 0, 1), (1, 0))
    assert to_permutation(g).map == (2, 3, 0, 1)


def test_permutation_matrix_definition():
    for g in enumerate_gates():
        t = to_permutation(g).as_matrix()
        for beta in range(4):
            assert t[g.apply(beta), beta] == 1
        assert t.sum() == 4


def test_symplectic_action_cnot_z2():
    # Z on the second qubit spreads to Z1 Z2 with no sign flip
    xp, zp, flip = symplectic_action(CNOT, (0, 0), (0, 1))
    assert (xp, zp, flip) == ((0, 0), (1, 1), 0)


def test_symplectic_action_cnot_x1():
    xp, zp, flip = symplectic_action(CNOT, (1, 0), (0, 0))
    assert (xp, zp, flip) == ((1, 1), (0, 0), 0)


def test_symplectic_action_bitflip_conjugates_z():
    g = AffineGate((1, 0, 0, 1), (1, 0))  # X on the first qubit
    xp, zp, flip = symplectic_action(g, (0, 0), (1, 0))
    assert (xp, zp) == ((0, 0), (1, 0))
    assert flip == 1


def test_symplectic_action_matches_dense_conjugation():
    for g in enumerate_gates():
        u = gate_unitary(g)
        for xb in itertools.product((0, 1), repeat=2):
            for zb in itertools.product((0, 1), repeat=2):
                xp, zp, flip = symplectic_action(g, xb, zb)
                expect = u @ pauli_dense(xb, zb) @ u.conj().T
                assert np.allclose(expect, pauli_dense(xp, zp, flip), atol=1e-12)


def test_symplectic_action_preserves_symplectic_inner():
    def pauli(xb, zb):
        return PauliString(BitVector.from_bits(xb), BitVector.from_bits(zb))

    paulis = list(itertools.product(itertools.product((0, 1), repeat=2), repeat=2))
    for g in enumerate_gates():
        for (xa, za), (xb, zb) in itertools.product(paulis, repeat=2):
            before = symplectic_inner(pauli(xa, za), pauli(xb, zb))
            xa2, za2, _ = symplectic_action(g, xa, za)
            xb2, zb2, _ = symplectic_action(g, xb, zb)
            after = symplectic_inner(pauli(xa2, za2), pauli(xb2, zb2))
            assert before == after


def test_symplectic_action_closes_sectors():
    for g in enumerate_gates():
        for bits in itertools.product((0, 1), repeat=2):
            _, zp, _ = symplectic_action(g, bits, (0, 0))
            assert zp == (0, 0)
            xp, _, _ = symplectic_action(g, (0, 0), bits)
            assert xp == (0, 0)


def test_unitary_maps_basis_states_like_permutation():
    for g in enumerate_gates():
        u = gate_unitary(g)
        for beta in range(4):
            vec = np.zeros(4)
            vec[beta] = 1.0
            out = u @ vec
            assert np.flatnonzero(out)[0] == g.apply(beta)
