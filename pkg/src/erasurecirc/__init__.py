"""Random classical and semi-classical circuits with erasure errors.

Simulation of brickwork circuits built from the 24 two-bit reversible
gates (plus optional Hadamards), subject to erasure and junk-noise
channels, together with the exact small-instance oracles, the
diffusion-reaction lattice model, and the finite-size-scaling analysis
used to locate the encoding transition and its crossover.
"""

__version__ = "0.1.0"
