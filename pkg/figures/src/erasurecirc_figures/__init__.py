"""Plotting companion for erasurecirc: renders its CSV outputs as figures.

Strictly a CSV consumer: nothing here simulates, and the only coupling to
the simulation package is the documented file schemas.
"""

__version__ = "0.1.0"
