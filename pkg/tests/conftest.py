import numpy as np

from erasurecirc.gates import sample_gate
from erasurecirc.stabilizer import StabilizerState


def random_stabilizer_state(n: int, rng: np.random.Generator, moves: int = 20) -> StabilizerState:
    """A valid random mixed stabilizer state, built by randomly driving a
    random initial state through gates, Hadamards and channels."""
    start = rng.integers(0, 3)
    if start == 0:
        state = StabilizerState.maximally_mixed(n)
    elif start == 1:
        state = StabilizerState.zero_state(n)
    else:
        state = StabilizerState.maximally_mixed(n)
        for i in range(n):
            state.apply_erasure(i)
    for _ in range(moves):
        op = rng.integers(0, 4)
        site = int(rng.integers(0, n))
        if op == 0:
            state.apply_gate(sample_gate(rng), site)
        elif op == 1:
            state.apply_hadamard(site)
        elif op == 2:
            state.apply_erasure(site)
        else:
            state.apply_junk_noise(site)
    return state
