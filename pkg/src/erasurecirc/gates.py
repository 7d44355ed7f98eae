"""The 24 reversible two-bit gates in affine GF(2) form, with their Clifford action.

A gate is x -> A x + b with A an invertible 2x2 GF(2) matrix; the 24 such
maps realize every permutation of the four two-bit strings. Bit convention,
used everywhere a pair of sites is indexed: the first (lower-index) site is
the high bit of the string index, so the string b0 b1 has index 2*b0 + b1.

The Clifford extension closes both the Z-string and X-string sectors:
X-parts transform by A, Z-parts by inverse-transpose(A), and the sign picks
up z . (A^-1 b) plus the phase from any change in the number of Y factors.
"""
from __future__ import annotations

import itertools

import numpy as np

__all__ = [
    "AffineGate",
    "PermutationTable",
    "enumerate_gates",
    "gate_table",
    "sample_gate",
    "to_permutation",
    "symplectic_action",
]


def _matvec2(m: tuple[int, int, int, int], x: tuple[int, int]) -> tuple[int, int]:
    return ((m[0] & x[0]) ^ (m[1] & x[1]), (m[2] & x[0]) ^ (m[3] & x[1]))


class AffineGate:
    """Invertible affine map on two bits: g(x) = A x + b over GF(2).

    Immutable; instances precompute the inverse, inverse-transpose and
    permutation table once at construction.
    """

    __slots__ = ("a", "b", "a_inv", "a_inv_t", "a_inv_b", "perm")

    def __init__(self, a: tuple[int, int, int, int], b: tuple[int, int]):
        a = tuple(int(v) & 1 for v in a)
        b = tuple(int(v) & 1 for v in b)
        if (a[0] & a[3]) ^ (a[1] & a[2]) != 1:
            raise ValueError(f"matrix {a} is singular over GF(2)")
        self.a = a
        self.b = b
        # inverse of [[a0,a1],[a2,a3]] with det 1 is [[a3,a1],[a2,a0]]
        self.a_inv = (a[3], a[1], a[2], a[0])
        self.a_inv_t = (self.a_inv[0], self.a_inv[2], self.a_inv[1], self.a_inv[3])
        self.a_inv_b = _matvec2(self.a_inv, b)
        self.perm = tuple(self._apply_bits(beta) for beta in range(4))

    def _apply_bits(self, beta: int) -> int:
        x = (beta >> 1, beta & 1)
        y = _matvec2(self.a, x)
        return ((y[0] ^ self.b[0]) << 1) | (y[1] ^ self.b[1])

    def apply(self, beta: int) -> int:
        """Image of the two-bit string with index beta (first bit = high bit)."""
        return self.perm[beta]

    def __eq__(self, other) -> bool:
        return isinstance(other, AffineGate) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"AffineGate(a={self.a}, b={self.b})"


class PermutationTable:
    """Bijection on {0,1,2,3}; map[beta] = image of beta."""

    __slots__ = ("map",)

    def __init__(self, map: tuple[int, int, int, int]):
        if sorted(map) != [0, 1, 2, 3]:
            raise ValueError(f"{map} is not a bijection on 4 elements")
        self.map = tuple(map)

    def as_matrix(self) -> np.ndarray:
        """4x4 0/1 matrix T with T[alpha, beta] = 1 iff map[beta] = alpha."""
        t = np.zeros((4, 4), dtype=np.int64)
        for beta, alpha in enumerate(self.map):
            t[alpha, beta] = 1
        return t

    def __eq__(self, other) -> bool:
        return isinstance(other, PermutationTable) and self.map == other.map

    def __hash__(self):
        return hash(self.map)

    def __repr__(self):
        return f"PermutationTable({self.map})"


_GATES: tuple[AffineGate, ...] | None = None


def enumerate_gates() -> tuple[AffineGate, ...]:
    """All 24 affine gates in a fixed order (lexicographic in A then b)."""
    global _GATES
    if _GATES is None:
        gates = []
        for a in itertools.product((0, 1), repeat=4):
            if (a[0] & a[3]) ^ (a[1] & a[2]) != 1:
                continue
            for b in itertools.product((0, 1), repeat=2):
                gates.append(AffineGate(a, b))
        _GATES = tuple(gates)
    return _GATES


def gate_table() -> np.ndarray:
    """Per-gate coefficient table used by the vectorized layer kernels.

    Row g = (a00, a01, a10, a11, t00, t01, t10, t11, c0, c1) where t is
    inverse-transpose(A) and c = A^-1 b, all for gate index g in the
    enumerate_gates order.
    """
    gates = enumerate_gates()
    table = np.zeros((len(gates), 10), dtype=np.uint8)
    for i, g in enumerate(gates):
        table[i, 0:4] = g.a
        table[i, 4:8] = g.a_inv_t
        table[i, 8:10] = g.a_inv_b
    return table


def sample_gate(rng: np.random.Generator) -> AffineGate:
    """Uniform draw from the 24 gates, deterministic given the generator state."""
    gates = enumerate_gates()
    return gates[int(rng.integers(0, len(gates)))]


def to_permutation(g: AffineGate) -> PermutationTable:
    """Permutation table of the gate under the high-bit-first index convention."""
    return PermutationTable(g.perm)


def symplectic_action(
    g: AffineGate,
    x_pair: tuple[int, int],
    z_pair: tuple[int, int],
) -> tuple[tuple[int, int], tuple[int, int], int]:
    """Conjugate a two-site Pauli (x_pair | z_pair) by the gate's Clifford unitary.

    Returns (x_pair', z_pair', sign_flip). The sign flip combines
    z . (A^-1 b) with the phase from the change in Y-factor count.
    """
    u = (int(x_pair[0]) & 1, int(x_pair[1]) & 1)
    v = (int(z_pair[0]) & 1, int(z_pair[1]) & 1)
    up = _matvec2(g.a, u)
    vp = _matvec2(g.a_inv_t, v)
    flip = (v[0] & g.a_inv_b[0]) ^ (v[1] & g.a_inv_b[1])
    n_y = (u[0] & v[0]) + (u[1] & v[1])
    n_y_after = (up[0] & vp[0]) + (up[1] & vp[1])
    if (n_y - n_y_after) % 4 == 2:
        flip ^= 1
    return up, vp, flip
