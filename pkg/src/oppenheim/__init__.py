"""Values of indefinite quadratic forms at integral points, and the lattice
flows behind them: an exact and numerical laboratory."""

__version__ = "0.1.0"
