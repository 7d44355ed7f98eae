"""Packed GF(2) linear algebra: bit vectors, bit matrices, rank, row reduction.

Vectors are stored in 64-bit words (bit j of the vector = bit j % 64 of
word j // 64), so row operations are whole-word XORs. All stabilizer
entropy computations reduce to ranks of these matrices.
"""
from __future__ import annotations

import numpy as np

_WORD = 64


def _n_words(length: int) -> int:
    return (length + _WORD - 1) // _WORD


class BitVector:
    """Vector over GF(2), packed into uint64 words. Bits past `length` stay zero."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray | None = None):
        if length < 0:
            raise ValueError("length must be nonnegative")
        self.length = length
        if words is None:
            self.words = np.zeros(_n_words(length), dtype=np.uint64)
        else:
            if words.shape != (_n_words(length),):
                raise ValueError("word count does not match length")
            self.words = words.astype(np.uint64, copy=True)
            self._mask_tail()

    def _mask_tail(self) -> None:
        rem = self.length % _WORD
        if rem and self.words.size:
            self.words[-1] &= np.uint64((1 << rem) - 1)

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        arr = np.asarray(list(bits), dtype=np.uint8)
        return cls.from_dense(arr)

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "BitVector":
        """Build from a 1-D 0/1 array."""
        arr = np.asarray(arr, dtype=np.uint8) & 1
        length = arr.shape[0]
        packed = np.packbits(arr, bitorder="little")
        buf = np.zeros(8 * _n_words(length), dtype=np.uint8)
        buf[: packed.size] = packed
        v = cls(length)
        v.words = buf.view(np.uint64)
        return v

    def to_dense(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return bits[: self.length].copy()

    def get(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(f"bit index {j} out of range for length {self.length}")
        return int((self.words[j // _WORD] >> np.uint64(j % _WORD)) & np.uint64(1))

    def set(self, j: int, value: int) -> None:
        if not 0 <= j < self.length:
            raise IndexError(f"bit index {j} out of range for length {self.length}")
        bit = np.uint64(1) << np.uint64(j % _WORD)
        if value & 1:
            self.words[j // _WORD] |= bit
        else:
            self.words[j // _WORD] &= ~bit

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        out = BitVector(self.length)
        out.words = self.words ^ other.words
        return out

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.length == other.length
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.length, self.words.tobytes()))

    def __repr__(self):
        return f"BitVector({''.join(str(b) for b in self.to_dense())})"


class BitMatrix:
    """Matrix over GF(2): rows of equal length, packed words, shape (n_rows, n_words)."""

    __slots__ = ("n_rows", "n_cols", "words")

    def __init__(self, n_rows: int, n_cols: int, words: np.ndarray | None = None):
        self.n_rows = n_rows
        self.n_cols = n_cols
        if words is None:
            self.words = np.zeros((n_rows, _n_words(n_cols)), dtype=np.uint64)
        else:
            if words.shape != (n_rows, _n_words(n_cols)):
                raise ValueError("word array shape mismatch")
            self.words = words.astype(np.uint64, copy=True)

    @classmethod
    def from_rows(cls, rows: list[BitVector]) -> "BitMatrix":
        if not rows:
            return cls(0, 0)
        n_cols = rows[0].length
        if any(r.length != n_cols for r in rows):
            raise ValueError("rows must share a common length")
        m = cls(len(rows), n_cols)
        for i, r in enumerate(rows):
            m.words[i] = r.words
        return m

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "BitMatrix":
        """Build from a 2-D 0/1 array."""
        arr = np.atleast_2d(np.ascontiguousarray(arr, dtype=np.uint8) & 1)
        n_rows, n_cols = arr.shape
        m = cls(n_rows, n_cols)
        if n_rows and n_cols:
            packed = np.packbits(arr, axis=1, bitorder="little")
            buf = np.zeros((n_rows, 8 * _n_words(n_cols)), dtype=np.uint8)
            buf[:, : packed.shape[1]] = packed
            m.words = buf.view(np.uint64)
        return m

    def to_dense(self) -> np.ndarray:
        if self.n_rows == 0 or self.n_cols == 0:
            return np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        bits = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n_cols].copy()

    def row(self, i: int) -> BitVector:
        v = BitVector(self.n_cols)
        v.words = self.words[i].copy()
        return v

    def rows(self) -> list[BitVector]:
        return [self.row(i) for i in range(self.n_rows)]

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j // _WORD] >> np.uint64(j % _WORD)) & np.uint64(1))

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.n_rows, self.n_cols, self.words)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.n_rows == other.n_rows
            and self.n_cols == other.n_cols
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.n_rows, self.n_cols, self.words.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.n_rows}x{self.n_cols})"


def _eliminate(words: np.ndarray, n_rows: int, n_cols: int) -> list[int]:
    """In-place RREF over GF(2) on a packed word array; returns pivot columns.

    Row updates XOR whole word-rows (vectorized over the row axis), never
    individual bits.
    """
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        w, s = c // _WORD, np.uint64(c % _WORD)
        colbits = (words[r:, w] >> s) & np.uint64(1)
        hits = np.flatnonzero(colbits)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        # clear column c in every other row that has it set
        mask = ((words[:, w] >> s) & np.uint64(1)).astype(bool)
        mask[r] = False
        if mask.any():
            words[mask] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def rank(m: BitMatrix) -> int:
    """GF(2) row rank; the input is left untouched."""
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    words = m.words.copy()
    return len(_eliminate(words, m.n_rows, m.n_cols))


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row-echelon form over GF(2) and its pivot columns; span preserved."""
    out = m.copy()
    if m.n_rows == 0 or m.n_cols == 0:
        return out, []
    pivots = _eliminate(out.words, out.n_rows, out.n_cols)
    return out, pivots


def restrict_columns(m: BitMatrix, cols) -> BitMatrix:
    """Submatrix with only the selected columns, row order preserved."""
    cols = sorted(int(c) for c in cols)
    if any(c < 0 or c >= m.n_cols for c in cols):
        raise IndexError("column index out of range")
    if m.n_rows == 0 or not cols:
        return BitMatrix(m.n_rows, len(cols))
    dense = m.to_dense()
    return BitMatrix.from_dense(dense[:, cols])


def rank_dense(arr: np.ndarray) -> int:
    """Rank of a dense 0/1 array (packed internally before elimination)."""
    arr = np.atleast_2d(arr)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return 0
    return rank(BitMatrix.from_dense(arr))


def symplectic_inner(a, b) -> int:
    """Symplectic inner product of two Pauli strings: 0 = commute, 1 = anticommute.

    Accepts any objects carrying x and z BitVector attributes of equal length.
    """
    if a.x.length != b.x.length:
        raise ValueError("qubit count mismatch")
    acc = np.bitwise_count(a.x.words & b.z.words).sum()
    acc += np.bitwise_count(a.z.words & b.x.words).sum()
    return int(acc) & 1
