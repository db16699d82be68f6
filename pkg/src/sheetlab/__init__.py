"""Simulation and verification laboratory for sheet-type Gaussian random
fields: fractional Brownian sheets, the Brownian sheet, and mild solutions
of the 1-D linear stochastic wave equation."""

__version__ = "0.1.0"
