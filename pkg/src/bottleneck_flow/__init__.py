"""Stationary density profiles in a corridor with a bottleneck.

Singular (eps = 0) profiles built from layer jumps and reduced orbits,
the (alpha, beta) region atlas, and finite-eps solutions of the stiff
boundary value problem.
"""
from .analysis import ConvergenceReport, SweepTable, convergence_rate, hausdorff_distance, sweep
from .atlas import RegionLabel, classify
from .bvp import EpsSolution, SolverOptions, continuation_solve, solve
from .errors import (
    AssumptionViolated,
    BottleneckError,
    DegenerateParameters,
    DimensionMismatch,
    DomainError,
    NoConvergence,
    OutOfScope,
)
from .singular import SingularOrbit, build_singular, flux_singular
from .slowfast import CanardData, canard_data, reduced_orbit
from .width import BottleneckInfo, WidthProfile, parse_profile, validate, validate_default

__version__ = "0.1.0"
