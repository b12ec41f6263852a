"""Steady-state squeezing of a cavity fed by a parametric amplifier and
dressed by a dispersively coupled qubit.

Two tiers are provided: a self-consistent Gaussian model (:mod:`sqzc.meanfield`)
and the full truncated master equation (:mod:`sqzc.fock`).
"""
from .effective import CircuitParams, reduce
from .errors import (
    AboveThresholdError,
    ConfigError,
    ConvergenceError,
    SolverError,
    SqzcError,
)
from .meanfield import optimum_detuning, self_consistent_solve

__version__ = "0.1.0"

__all__ = [
    "CircuitParams",
    "reduce",
    "self_consistent_solve",
    "optimum_detuning",
    "SqzcError",
    "ConfigError",
    "SolverError",
    "ConvergenceError",
    "AboveThresholdError",
    "__version__",
]
