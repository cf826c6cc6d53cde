"""Magnetic nanoparticle colloids: chains, rings, inverse-decay bounds and dynamics."""
from ._accel import USE_NUMBA
from .errors import (
    ConvergenceError,
    DomainError,
    HypothesisError,
    IntegratorError,
    OverlapError,
)
from .potential import (
    DistanceSet,
    LJParams,
    alpha_dag,
    alpha_star,
    characteristic_distances,
    lj_d1,
    lj_d2,
    lj_value,
    zeta,
)
from .spear import SpacingVector, SpearSolution, solve_spear, spear_energy
from .ring import RingSolution, ring_configuration, ring_radius, ring_sums
from .gershgorin import DecayMatrixSpec, check_inverse_decay, decay_bound
from .dynamics import PhysicalParams, SystemState, run, step

__version__ = "0.1.0"
