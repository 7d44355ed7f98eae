"""Mixed stabilizer states under affine gates, Hadamards, erasure and junk noise.

A state on N qubits is held as k <= N independent, pairwise-commuting Pauli
generators (no destabilizer rows); entropy is N - k bits. The erasure and
junk channels are deterministic pivot eliminations, not sampled measurements.

Two synchronized engines live here: StabilizerState (full X/Z tableau with
sign tracking) and ZSectorState (Z-strings only, valid whenever no Hadamards
act and the initial generators are Z-strings). They must agree bit-for-bit
on all observables; signs never feed any observable.

Pauli convention: a row (x | z) with sign bit s is (-1)^s i^{x.z} X^x Z^z,
i.e. the Hermitian string whose site factors are I, X, Z or Y.
"""
from __future__ import annotations

import numpy as np

from . import gf2
from .gates import AffineGate, gate_table

_TABLE = None


def _table() -> np.ndarray:
    global _TABLE
    if _TABLE is None:
        _TABLE = gate_table()
    return _TABLE


class PauliString:
    """Pauli operator as x/z bit vectors plus a sign bit (0 = +, 1 = -)."""

    __slots__ = ("x", "z", "sign")

    def __init__(self, x: gf2.BitVector, z: gf2.BitVector, sign: int = 0):
        if x.length != z.length:
            raise ValueError("x and z must have equal length")
        self.x = x
        self.z = z
        self.sign = int(sign) & 1

    @property
    def n_qubits(self) -> int:
        return self.x.length

    def __repr__(self):
        letters = [
            "IXZY"[xb + 2 * zb]
            for xb, zb in zip(self.x.to_dense(), self.z.to_dense())
        ]
        return ("-" if self.sign else "+") + "".join(letters)


def _parse_region(region, n: int) -> np.ndarray:
    sites = np.unique(np.asarray(sorted(int(s) for s in region), dtype=np.intp))
    if sites.size and (sites[0] < 0 or sites[-1] >= n):
        raise IndexError("region site out of range")
    return sites


class StabilizerState:
    """Mixed stabilizer state: k generators over n qubits, full X/Z storage."""

    __slots__ = ("n", "k", "_x", "_z", "_signs")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.k = 0
        self._x = np.zeros((n, n), dtype=np.uint8)
        self._z = np.zeros((n, n), dtype=np.uint8)
        self._signs = np.zeros(n, dtype=np.uint8)

    # ------------------------------------------------------------------ build

    @classmethod
    def maximally_mixed(cls, n: int) -> "StabilizerState":
        """The uniform mixture over all 2^n basis states: no generators, entropy n."""
        return cls(n)

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerState":
        """|0...0>: generators +Z_i."""
        s = cls(n)
        s.k = n
        s._z[np.arange(n), np.arange(n)] = 1
        return s

    @classmethod
    def referenced(cls, n: int, kind: str = "classical") -> "StabilizerState":
        """System of n qubits plus n reference qubits holding its initial state.

        classical: generators Z_i Z_{i+n} (n bits of correlation);
        bell: generators X_i X_{i+n} and Z_i Z_{i+n} (2n bits).
        """
        if n < 1:
            raise ValueError("need at least one system qubit")
        s = cls(2 * n)
        idx = np.arange(n)
        if kind == "classical":
            s.k = n
            s._z[idx, idx] = 1
            s._z[idx, idx + n] = 1
        elif kind == "bell":
            s.k = 2 * n
            s._z[idx, idx] = 1
            s._z[idx, idx + n] = 1
            s._x[idx + n, idx] = 1
            s._x[idx + n, idx + n] = 1
        else:
            raise ValueError(f"unknown reference kind {kind!r}")
        return s

    @classmethod
    def from_generators(cls, n: int, gens: list[PauliString]) -> "StabilizerState":
        """Build from explicit generators; validates commutation and independence."""
        s = cls(n)
        s.k = len(gens)
        if s.k > n:
            raise ValueError("more generators than qubits")
        for i, g in enumerate(gens):
            if g.n_qubits != n:
                raise ValueError("generator length mismatch")
            s._x[i] = g.x.to_dense()
            s._z[i] = g.z.to_dense()
            s._signs[i] = g.sign
        x, z = s._x[: s.k], s._z[: s.k]
        comm = ((x.astype(np.int64) @ z.T) + (z.astype(np.int64) @ x.T)) % 2
        if comm.any():
            raise ValueError("generators do not pairwise commute")
        if gf2.rank_dense(np.concatenate([x, z], axis=1)) != s.k:
            raise ValueError("generators are not independent")
        return s

    def copy(self) -> "StabilizerState":
        s = StabilizerState(self.n)
        s.k = self.k
        s._x = self._x.copy()
        s._z = self._z.copy()
        s._signs = self._signs.copy()
        return s

    def generators(self) -> list[PauliString]:
        return [
            PauliString(
                gf2.BitVector.from_dense(self._x[i]),
                gf2.BitVector.from_dense(self._z[i]),
                int(self._signs[i]),
            )
            for i in range(self.k)
        ]

    # ------------------------------------------------------------ unitaries

    def apply_gate(self, g: AffineGate, site: int) -> None:
        """Two-bit gate on (site, site+1 mod n)."""
        if not 0 <= site < self.n:
            raise IndexError(f"site {site} out of range")
        self.apply_gate_pair(g, site, (site + 1) % self.n)

    def apply_gate_pair(self, g: AffineGate, i: int, j: int) -> None:
        """Two-bit gate on the explicit pair (i, j); i is the gate's first bit."""
        if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
            raise IndexError(f"bad pair ({i}, {j})")
        k = self.k
        if k == 0:
            return
        xl, xr = self._x[:k, i].copy(), self._x[:k, j].copy()
        zl, zr = self._z[:k, i].copy(), self._z[:k, j].copy()
        a = g.a
        t = g.a_inv_t
        c = g.a_inv_b
        nxl = (a[0] & xl) ^ (a[1] & xr)
        nxr = (a[2] & xl) ^ (a[3] & xr)
        nzl = (t[0] & zl) ^ (t[1] & zr)
        nzr = (t[2] & zl) ^ (t[3] & zr)
        flip = (c[0] & zl) ^ (c[1] & zr)
        ny_before = (xl & zl) + (xr & zr)
        ny_after = (nxl & nzl) + (nxr & nzr)
        flip ^= ((ny_before != ny_after) & (ny_before + ny_after == 2)).astype(np.uint8)
        self._x[:k, i], self._x[:k, j] = nxl, nxr
        self._z[:k, i], self._z[:k, j] = nzl, nzr
        self._signs[:k] ^= flip

    def apply_gate_layer(self, gate_ids: np.ndarray, left: np.ndarray, right: np.ndarray) -> None:
        """Apply one brickwork layer of gates at once (disjoint pairs)."""
        k = self.k
        if k == 0 or len(gate_ids) == 0:
            return
        coef = _table()[gate_ids]
        xl, xr = self._x[:k][:, left], self._x[:k][:, right]
        zl, zr = self._z[:k][:, left], self._z[:k][:, right]
        nxl = (coef[:, 0] & xl) ^ (coef[:, 1] & xr)
        nxr = (coef[:, 2] & xl) ^ (coef[:, 3] & xr)
        nzl = (coef[:, 4] & zl) ^ (coef[:, 5] & zr)
        nzr = (coef[:, 6] & zl) ^ (coef[:, 7] & zr)
        flip = (coef[:, 8] & zl) ^ (coef[:, 9] & zr)
        ny_b = (xl & zl) + (xr & zr)
        ny_a = (nxl & nzl) + (nxr & nzr)
        flip ^= (ny_b != ny_a) & (ny_b + ny_a == 2)
        self._x[:k, left], self._x[:k, right] = nxl, nxr
        self._z[:k, left], self._z[:k, right] = nzl, nzr
        self._signs[:k] ^= (flip.sum(axis=1, dtype=np.int64) & 1).astype(np.uint8)

    def apply_hadamard(self, site: int) -> None:
        """Swap X and Z at one site; sign flips where both bits are set."""
        if not 0 <= site < self.n:
            raise IndexError(f"site {site} out of range")
        k = self.k
        if k == 0:
            return
        xcol = self._x[:k, site].copy()
        zcol = self._z[:k, site]
        self._signs[:k] ^= xcol & zcol
        self._x[:k, site] = zcol
        self._z[:k, site] = xcol

    def apply_hadamard_sites(self, sites: np.ndarray) -> None:
        k = self.k
        if k == 0 or len(sites) == 0:
            return
        xb = self._x[:k][:, sites]
        zb = self._z[:k][:, sites]
        self._signs[:k] ^= ((xb & zb).sum(axis=1, dtype=np.int64) & 1).astype(np.uint8)
        self._x[:k][:, sites] = zb
        self._z[:k][:, sites] = xb

    # ------------------------------------------------------------- channels

    def apply_erasure(self, site: int) -> None:
        """rho -> |0><0|_site (x) Tr_site(rho): eliminate the site, then pin +Z."""
        if not 0 <= site < self.n:
            raise IndexError(f"site {site} out of range")
        self._eliminate_site(site)
        self._x[self.k] = 0
        self._z[self.k] = 0
        self._z[self.k, site] = 1
        self._signs[self.k] = 0
        self.k += 1

    def apply_junk_noise(self, site: int) -> None:
        """rho -> (I/2)_site (x) Tr_site(rho): eliminate the site, leave it mixed."""
        if not 0 <= site < self.n:
            raise IndexError(f"site {site} out of range")
        self._eliminate_site(site)

    def _eliminate_site(self, i: int) -> None:
        # one pivot clears every other x-bit at i, one clears the leftover z-bits;
        # surviving rows then act trivially at i and generate Tr_i of the state
        rows = np.flatnonzero(self._x[: self.k, i])
        if rows.size:
            piv = int(rows[0])
            if rows.size > 1:
                self._rowsum(rows[1:], piv)
            self._drop_row(piv)
        rows = np.flatnonzero(self._z[: self.k, i])
        if rows.size:
            piv = int(rows[0])
            if rows.size > 1:
                self._rowsum(rows[1:], piv)
            self._drop_row(piv)

    def _rowsum(self, targets: np.ndarray, src: int) -> None:
        """g_t <- g_t * g_src for each target row, with exact sign bookkeeping."""
        u1, v1 = self._x[targets], self._z[targets]
        u2, v2 = self._x[src], self._z[src]
        nx = u1 ^ u2
        nz = v1 ^ v2
        delta = (
            (u1 & v1).sum(axis=1, dtype=np.int64)
            + int((u2 & v2).sum())
            + 2 * (v1 & u2).sum(axis=1, dtype=np.int64)
            - (nx & nz).sum(axis=1, dtype=np.int64)
        )
        self._signs[targets] ^= self._signs[src] ^ ((delta % 4) // 2).astype(np.uint8)
        self._x[targets] = nx
        self._z[targets] = nz

    def _drop_row(self, row: int) -> None:
        self.k -= 1
        last = self.k
        if row != last:
            self._x[row] = self._x[last]
            self._z[row] = self._z[last]
            self._signs[row] = self._signs[last]

    # ----------------------------------------------------------- observables

    def entropy(self) -> int:
        """Entropy in bits: n - k (von Neumann = every Renyi for stabilizer states)."""
        return self.n - self.k

    def subsystem_entropy(self, region) -> int:
        """|A| minus the number of independent generators supported inside A."""
        sites = _parse_region(region, self.n)
        if sites.size == 0:
            return 0
        if self.k == 0:
            return int(sites.size)
        comp = np.setdiff1d(np.arange(self.n), sites, assume_unique=True)
        if comp.size == 0:
            return self.entropy()
        stacked = np.concatenate(
            [self._x[: self.k][:, comp], self._z[: self.k][:, comp]], axis=1
        )
        r = gf2.rank_dense(stacked)
        return int(sites.size) - (self.k - r)

    def mutual_information(self, a, b) -> int:
        """S_A + S_B - S_AB for disjoint regions."""
        sa = _parse_region(a, self.n)
        sb = _parse_region(b, self.n)
        if np.intersect1d(sa, sb).size:
            raise ValueError("regions overlap")
        return (
            self.subsystem_entropy(sa)
            + self.subsystem_entropy(sb)
            - self.subsystem_entropy(np.concatenate([sa, sb]))
        )

    # ---------------------------------------------------------------- checks

    def check_invariants(self) -> None:
        """Raise if generators fail to commute or are dependent (test hook)."""
        x, z = self._x[: self.k], self._z[: self.k]
        comm = ((x.astype(np.int64) @ z.T) + (z.astype(np.int64) @ x.T)) % 2
        if comm.any():
            raise AssertionError("generators do not pairwise commute")
        if gf2.rank_dense(np.concatenate([x, z], axis=1)) != self.k:
            raise AssertionError("generators are not independent")

    def __repr__(self):
        return f"StabilizerState(n={self.n}, k={self.k})"


class ZSectorState:
    """Fast engine for Z-string-only states (no Hadamards anywhere in the run).

    Holds only the Z bit matrix; gates act by inverse-transpose(A) on the
    pair columns, erasure and junk noise are single-column pivot
    eliminations. Signs are not tracked: no observable depends on them.
    """

    __slots__ = ("n", "k", "_z")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.k = 0
        self._z = np.zeros((n, n), dtype=np.uint8)

    @classmethod
    def maximally_mixed(cls, n: int) -> "ZSectorState":
        return cls(n)

    @classmethod
    def referenced_classical(cls, n: int) -> "ZSectorState":
        s = cls(2 * n)
        idx = np.arange(n)
        s.k = n
        s._z[idx, idx] = 1
        s._z[idx, idx + n] = 1
        return s

    def apply_gate_layer(self, gate_ids: np.ndarray, left: np.ndarray, right: np.ndarray) -> None:
        k = self.k
        if k == 0 or len(gate_ids) == 0:
            return
        coef = _table()[gate_ids]
        zl, zr = self._z[:k][:, left], self._z[:k][:, right]
        self._z[:k, left] = (coef[:, 4] & zl) ^ (coef[:, 5] & zr)
        self._z[:k, right] = (coef[:, 6] & zl) ^ (coef[:, 7] & zr)

    def apply_gate_pair(self, g: AffineGate, i: int, j: int) -> None:
        k = self.k
        if k == 0:
            return
        t = g.a_inv_t
        zl, zr = self._z[:k, i].copy(), self._z[:k, j]
        self._z[:k, i] = (t[0] & zl) ^ (t[1] & zr)
        self._z[:k, j] = (t[2] & zl) ^ (t[3] & zr)

    def apply_erasure(self, site: int) -> None:
        self._eliminate_site(site)
        self._z[self.k] = 0
        self._z[self.k, site] = 1
        self.k += 1

    def apply_junk_noise(self, site: int) -> None:
        self._eliminate_site(site)

    def _eliminate_site(self, i: int) -> None:
        rows = np.flatnonzero(self._z[: self.k, i])
        if rows.size:
            piv = int(rows[0])
            if rows.size > 1:
                self._z[rows[1:]] ^= self._z[piv]
            self.k -= 1
            if piv != self.k:
                self._z[piv] = self._z[self.k]

    def entropy(self) -> int:
        return self.n - self.k

    def is_pure(self) -> bool:
        return self.k == self.n

    def subsystem_entropy(self, region) -> int:
        sites = _parse_region(region, self.n)
        if sites.size == 0:
            return 0
        if self.k == 0:
            return int(sites.size)
        comp = np.setdiff1d(np.arange(self.n), sites, assume_unique=True)
        if comp.size == 0:
            return self.entropy()
        r = gf2.rank_dense(self._z[: self.k][:, comp])
        return int(sites.size) - (self.k - r)

    def mutual_information(self, a, b) -> int:
        sa = _parse_region(a, self.n)
        sb = _parse_region(b, self.n)
        if np.intersect1d(sa, sb).size:
            raise ValueError("regions overlap")
        return (
            self.subsystem_entropy(sa)
            + self.subsystem_entropy(sb)
            - self.subsystem_entropy(np.concatenate([sa, sb]))
        )

    def __repr__(self):
        return f"ZSectorState(n={self.n}, k={self.k})"
