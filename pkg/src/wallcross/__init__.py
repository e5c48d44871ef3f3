"""Exact wall-crossing factorizations on a rank-2 charge lattice."""

from .autos import (
    OrdinaryAutoDescription,
    TorusAuto,
    commutator,
    compose,
    compose_all,
    hamiltonian_flow,
    invert,
    lie_bracket,
    make_theta,
    poisson_bracket,
    untwist,
)
from .factor import Direction, FactorizationError, RaySpectrum, dilog_forward, dilog_invert, factorize, spectrum_to_auto
from .lattice import Charge, Pairing, QuadraticRefinement, pair, primitive_decompose, refine, slope_compare
from .series import ConeSeries, dilog_truncated, series_exp, series_log, twisted_mul, unit_pow
from .stability import (
    CentralCharge,
    QuadraticForm,
    StabilityData,
    Wall,
    check_support,
    cross_wall,
    find_walls,
    lift_path,
)

__version__ = "0.1.0"
