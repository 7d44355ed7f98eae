"""GF(2) core: rank, row reduction, column restriction, symplectic form."""
import itertools

import numpy as np
import pytest

from erasurecirc import gf2
from erasurecirc.stabilizer import PauliString


def brute_rank(rows: list[int], width: int) -> int:
    """log2 of the span size, by enumerating all XOR combinations."""
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return int(np.log2(len(span)))


def as_ints(m: gf2.BitMatrix) -> list[int]:
    dense = m.to_dense()
    return [int("".join(str(b) for b in row[::-1]), 2) if row.size else 0 for row in dense]


def test_bitvector_roundtrip():
    bits = [1, 0, 1, 1, 0, 0, 1] * 23  # length 161 spans three words
    v = gf2.BitVector.from_bits(bits)
    assert v.length == 161
    assert v.to_dense().tolist() == bits
    assert v.get(0) == 1 and v.get(1) == 0
    v.set(1, 1)
    assert v.get(1) == 1
    v.set(1, 0)
    assert v.get(1) == 0


def test_bitvector_xor_self_is_zero():
    rng = np.random.default_rng(7)
    v = gf2.BitVector.from_dense(rng.integers(0, 2, size=130, dtype=np.uint8))
    assert (v ^ v).is_zero()


def test_bitvector_tail_bits_stay_zero():
    v = gf2.BitVector.from_dense(np.ones(70, dtype=np.uint8))
    w = v ^ v
    assert w.words.tolist() == [0, 0]
    v.set(69, 1)
    assert v.words[1] >> 6 == 0  # nothing beyond bit 69


def test_rank_identity():
    assert gf2.rank(gf2.BitMatrix.from_dense(np.eye(3, dtype=np.uint8))) == 3


def test_rank_zero_matrix():
    assert gf2.rank(gf2.BitMatrix.from_dense(np.zeros((4, 4), dtype=np.uint8))) == 0


def test_rank_dependent_rows():
    # third row is the XOR of the first two; brute-force oracle agrees
    rows = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(rows)
    assert gf2.rank(m) == 2
    assert brute_rank(as_ints(m), 3) == 2


def test_rank_empty_matrix():
    assert gf2.rank(gf2.BitMatrix(0, 0)) == 0
    assert gf2.rank(gf2.BitMatrix(3, 0)) == 0


def test_rank_matches_brute_force_random():
    rng = np.random.default_rng(3)
    for _ in range(40):
        rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 9))
        dense = rng.integers(0, 2, size=(rows, cols), dtype=np.uint8)
        m = gf2.BitMatrix.from_dense(dense)
        assert gf2.rank(m) == brute_rank(as_ints(m), cols)


def test_rank_wide_matrix_multiword():
    rng = np.random.default_rng(11)
    dense = rng.integers(0, 2, size=(40, 200), dtype=np.uint8)
    got = gf2.rank(gf2.BitMatrix.from_dense(dense))
    # numpy oracle: eliminate over uint8
    a = dense.copy()
    r = 0
    for c in range(200):
        piv = np.flatnonzero(a[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        r += 1
    assert got == r


def test_rank_does_not_modify_input():
    dense = np.array([[1, 1], [1, 0]], dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    before = m.words.copy()
    gf2.rank(m)
    assert np.array_equal(m.words, before)


def test_row_reduce_identity():
    m = gf2.BitMatrix.from_dense(np.eye(3, dtype=np.uint8))
    red, pivots = gf2.row_reduce(m)
    assert pivots == [0, 1, 2]
    assert red == m


def test_row_reduce_duplicate_rows():
    m = gf2.BitMatrix.from_dense(np.array([[1, 1], [1, 1]], dtype=np.uint8))
    red, pivots = gf2.row_reduce(m)
    assert pivots == [0]
    assert red.to_dense().tolist() == [[1, 1], [0, 0]]


def test_row_reduce_preserves_span():
    rng = np.random.default_rng(5)
    dense = rng.integers(0, 2, size=(6, 6), dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    red, _ = gf2.row_reduce(m)

    def span(ints):
        s = {0}
        for r in ints:
            s |= {x ^ r for x in s}
        return s

    assert span(as_ints(m)) == span(as_ints(red))


def test_row_reduce_rank_consistency():
    rng = np.random.default_rng(9)
    for _ in range(20):
        dense = rng.integers(0, 2, size=(5, 8), dtype=np.uint8)
        m = gf2.BitMatrix.from_dense(dense)
        red, pivots = gf2.row_reduce(m)
        assert gf2.rank(red) == gf2.rank(m) == len(pivots)


def test_rank_invariant_under_row_ops():
    rng = np.random.default_rng(13)
    dense = rng.integers(0, 2, size=(6, 10), dtype=np.uint8)
    base_rank = gf2.rank_dense(dense)
    for _ in range(25):
        a, b = rng.integers(0, 6, size=2)
        if a != b and rng.random() < 0.5:
            dense[[a, b]] = dense[[b, a]]
        elif a != b:
            dense[a] ^= dense[b]
        assert gf2.rank_dense(dense) == base_rank


def test_restrict_columns_all_and_none():
    dense = np.array([[1, 0, 1, 0], [0, 1, 1, 0]], dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    assert gf2.restrict_columns(m, range(4)) == m
    empty = gf2.restrict_columns(m, [])
    assert empty.n_rows == 2 and empty.n_cols == 0
    assert gf2.rank(empty) == 0


def test_restrict_columns_selection():
    dense = np.array([[1, 0, 1, 0], [0, 1, 1, 0]], dtype=np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    sub = gf2.restrict_columns(m, {1, 2})
    assert sub.to_dense().tolist() == [[0, 1], [1, 1]]


def test_restrict_columns_out_of_range():
    m = gf2.BitMatrix.from_dense(np.eye(2, dtype=np.uint8))
    with pytest.raises(IndexError):
        gf2.restrict_columns(m, [0, 2])


def _pauli(n, xs, zs):
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    for i in xs:
        x[i] = 1
    for i in zs:
        z[i] = 1
    return PauliString(gf2.BitVector.from_dense(x), gf2.BitVector.from_dense(z))


def test_symplectic_inner_basic():
    assert gf2.symplectic_inner(_pauli(2, [0], []), _pauli(2, [], [0])) == 1
    assert gf2.symplectic_inner(_pauli(2, [0], []), _pauli(2, [0], [])) == 0
    # X1 Z2 vs Z1 X2: the two anticommutations cancel
    assert gf2.symplectic_inner(_pauli(2, [0], [1]), _pauli(2, [1], [0])) == 0


def test_symplectic_inner_matches_commutator_oracle():
    from erasurecirc.oracle import pauli_dense

    for xa, za, xb, zb in itertools.product(range(4), repeat=4):
        a = _pauli(2, [i for i in range(2) if xa >> i & 1], [i for i in range(2) if za >> i & 1])
        b = _pauli(2, [i for i in range(2) if xb >> i & 1], [i for i in range(2) if zb >> i & 1])
        da = pauli_dense(a.x.to_dense(), a.z.to_dense())
        db = pauli_dense(b.x.to_dense(), b.z.to_dense())
        commute = np.allclose(da @ db, db @ da)
        assert gf2.symplectic_inner(a, b) == (0 if commute else 1)


def test_symplectic_inner_symmetric_bilinear():
    rng = np.random.default_rng(17)
    n = 9
    for _ in range(30):
        a = _pauli(n, np.flatnonzero(rng.integers(0, 2, n)), np.flatnonzero(rng.integers(0, 2, n)))
        b = _pauli(n, np.flatnonzero(rng.integers(0, 2, n)), np.flatnonzero(rng.integers(0, 2, n)))
        c = _pauli(n, np.flatnonzero(rng.integers(0, 2, n)), np.flatnonzero(rng.integers(0, 2, n)))
        assert gf2.symplectic_inner(a, b) == gf2.symplectic_inner(b, a)
        bc = PauliString(b.x ^ c.x, b.z ^ c.z)
        assert gf2.symplectic_inner(a, bc) == (
            gf2.symplectic_inner(a, b) ^ gf2.symplectic_inner(a, c)
        )


def test_symplectic_inner_length_mismatch():
    with pytest.raises(ValueError):
        gf2.symplectic_inner(_pauli(2, [0], []), _pauli(3, [0], []))
