"""Cross-validation suite: stabilizer engines against the exact oracles.

Run by the `verify` CLI subcommand and by the acceptance tests. Each check
is independent; the report carries one line per check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import dpmodel, oracle
from .gates import enumerate_gates, symplectic_action, to_permutation
from .schedule import CircuitConfig, materialize_schedule
from .stabilizer import StabilizerState, ZSectorState

TOL = 1e-9

_PARAM_CHOICES = (0.0, 0.2, 0.5, 1.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))


# --------------------------------------------------------------------------
# individual checks
# --------------------------------------------------------------------------


def check_gate_average_identity() -> CheckResult:
    res = dpmodel.verify_gate_average_identity()
    detail = "exact rational equality" if res.passed else (
        f"deviation {res.max_deviation} at entry {res.failing_entry}"
    )
    return CheckResult("gate-average identity", res.passed, detail)


def check_weight_matrix() -> CheckResult:
    m = dpmodel.weight_matrix()
    rows_ok = all(sum(row) == 1 for row in m)
    cols_ok = all(sum(m[i][j] for i in range(4)) == 1 for j in range(4))
    return CheckResult("weight matrix doubly stochastic", rows_ok and cols_ok)


def check_gateset() -> CheckResult:
    gates = enumerate_gates()
    perms = {to_permutation(g).map for g in gates}
    all_perms = set(itertools.permutations(range(4)))
    if len(gates) != 24 or perms != all_perms:
        return CheckResult("gate set completeness", False, f"{len(perms)} permutations")
    # dense conjugation oracle over every gate and every two-qubit Pauli
    for g in gates:
        u = np.zeros((4, 4), dtype=complex)
        for beta, alpha in enumerate(g.perm):
            u[alpha, beta] = 1.0
        for xb in itertools.product((0, 1), repeat=2):
            for zb in itertools.product((0, 1), repeat=2):
                w = oracle.pauli_dense(xb, zb)
                expect = u @ w @ u.conj().T
                xp, zp, flip = symplectic_action(g, xb, zb)
                got = oracle.pauli_dense(xp, zp, flip)
                if not np.allclose(expect, got, atol=1e-12):
                    return CheckResult(
                        "gate set completeness", False,
                        f"conjugation mismatch for gate {g} on ({xb}, {zb})",
                    )
        for beta in range(4):
            vec = np.zeros(4)
            vec[beta] = 1.0
            image = np.flatnonzero(u @ vec)[0]
            if image != g.apply(beta):
                return CheckResult("gate set completeness", False, "basis-state mismatch")
    return CheckResult("gate set completeness", True, "24 gates, all conjugations exact")


def _compare_states(stab: StabilizerState, dense: oracle.DenseState) -> float:
    """Worst deviation across density matrix, entropies and mutual informations."""
    n = stab.n
    worst = 0.0
    rho_stab = oracle.stabilizer_to_dense(stab).rho
    worst = max(worst, float(np.abs(rho_stab - dense.rho).max()))
    worst = max(worst, abs(stab.entropy() - oracle.von_neumann_entropy(dense)))
    sites = list(range(n))
    for r in range(1, n):
        for region in itertools.combinations(sites, r):
            worst = max(
                worst,
                abs(stab.subsystem_entropy(region) - oracle.subsystem_entropy(dense, region)),
            )
    pairs = [((0,), (1,)), ((0,), tuple(range(1, n)))]
    if n >= 4:
        pairs.append(((0, 1), (2, 3)))
    for a, b in pairs:
        worst = max(worst, abs(stab.mutual_information(a, b) - oracle.mutual_information(dense, a, b)))
    return worst


def check_oracle_equivalence(n_schedules: int = 200, seed: int = 0) -> CheckResult:
    """Random N=4 schedules spanning p, q, h in {0, 0.2, 0.5, 1}: the
    stabilizer engine must match the dense oracle within TOL, and classical
    runs must match the distribution oracle exactly."""
    n = 4
    rng = np.random.default_rng(seed)
    grid = list(itertools.product(_PARAM_CHOICES, repeat=3))
    worst = 0.0
    classical_checked = 0
    for i in range(n_schedules):
        p, q, h = grid[i % len(grid)]
        depth = int(rng.integers(3, 9))
        config = CircuitConfig(n=n, p=p, q=q, h=h, depth=depth)
        sched = materialize_schedule(config, int(rng.integers(2**32)))
        stab = StabilizerState.maximally_mixed(n)
        dense = oracle.DenseState.maximally_mixed(n)
        for layer in sched.layers:
            stab.apply_gate_layer(layer.gate_ids, layer.left, layer.right)
            for s in layer.hadamard_sites:
                stab.apply_hadamard(int(s))
            for s in layer.junk_sites:
                stab.apply_junk_noise(int(s))
            for s in layer.erasure_sites:
                stab.apply_erasure(int(s))
        dense = oracle.evolve_dense(dense, sched)
        stab.check_invariants()
        worst = max(worst, _compare_states(stab, dense))
        if q == 0:
            fast = ZSectorState.maximally_mixed(n)
            for layer in sched.layers:
                fast.apply_gate_layer(layer.gate_ids, layer.left, layer.right)
                for s in layer.junk_sites:
                    fast.apply_junk_noise(int(s))
                for s in layer.erasure_sites:
                    fast.apply_erasure(int(s))
            if fast.entropy() != stab.entropy():
                return CheckResult("oracle equivalence", False, "fast path entropy mismatch")
            dist = oracle.evolve_distribution(oracle.Distribution.uniform(n), sched)
            if abs(dist.shannon_entropy() - stab.entropy()) > TOL:
                return CheckResult(
                    "oracle equivalence", False,
                    f"distribution entropy {dist.shannon_entropy()} != {stab.entropy()}",
                )
            classical_checked += 1
    passed = worst <= TOL
    return CheckResult(
        "oracle equivalence", passed,
        f"{n_schedules} schedules, {classical_checked} classical, worst {worst:.2e}",
    )


def check_io_mutual_information(n_io: int = 100, seed: int = 1) -> CheckResult:
    """Gate+erasure realizations at N <= 4: I(X;Y) = S(Y) for uniform input,
    and both equal the referenced-state stabilizer quantities."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_io):
        n = int(rng.choice([2, 4]))
        depth = int(rng.integers(2, 7))
        p = float(rng.choice([0.1, 0.2, 0.5, 0.8]))
        config = CircuitConfig(n=n, p=p, depth=depth)
        sched = materialize_schedule(config, int(rng.integers(2**32)))
        f = oracle.CircuitFunction.from_schedule(sched)
        uniform = oracle.Distribution.uniform(n)
        mi = oracle.io_mutual_information(f, uniform)
        s_y = oracle.evolve_distribution(uniform, sched).shannon_entropy()
        worst = max(worst, abs(mi - s_y))
        # same realization through the referenced stabilizer state
        ref = ZSectorState.referenced_classical(n)
        for layer in sched.layers:
            ref.apply_gate_layer(layer.gate_ids, layer.left, layer.right)
            for s in layer.erasure_sites:
                ref.apply_erasure(int(s))
        stab_mi = ref.mutual_information(range(n), range(n, 2 * n))
        worst = max(worst, abs(stab_mi - mi))
        sys_state = ZSectorState.maximally_mixed(n)
        for layer in sched.layers:
            sys_state.apply_gate_layer(layer.gate_ids, layer.left, layer.right)
            for s in layer.erasure_sites:
                sys_state.apply_erasure(int(s))
        worst = max(worst, abs(sys_state.entropy() - s_y))
    return CheckResult(
        "input:output mutual information", worst <= TOL, f"{n_io} realizations, worst {worst:.2e}"
    )


def run_verification(n_schedules: int = 200, n_io: int = 100, seed: int = 0) -> VerifyReport:
    report = VerifyReport()
    for check in (
        check_gate_average_identity(),
        check_weight_matrix(),
        check_gateset(),
        check_oracle_equivalence(n_schedules=n_schedules, seed=seed),
        check_io_mutual_information(n_io=n_io, seed=seed + 1),
    ):
        report.checks.append(check)
    return report
