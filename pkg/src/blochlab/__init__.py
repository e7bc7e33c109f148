"""Bloch bands, states and barrier-region probability for the biparabolic lattice."""

from .basis import Mode, SolutionPair, barrier_pair, well_pair
from .bloch import (
    AnomalyEntry,
    BlochState,
    DensitySurface,
    anomaly_report,
    anomaly_scan,
    assemble_state,
    barrier_probability,
    conjugate_state,
    evaluate_density,
    psi,
    well_probability,
)
from .config import RunConfig
from .dispersion import Band, EdgeCondition, find_bands, g_quad, quasimomentum_of, rhs_dispersion, top_band
from .errors import BlochLabError
from .oracle import Monodromy, integrate, kp_trace_analytic, monodromy_of
from .potential import PotentialKind, PotentialSpec, eval_potential, make_biparabolic, make_kronig_penney

__version__ = "0.1.0"

__all__ = [
    "Mode",
    "SolutionPair",
    "well_pair",
    "barrier_pair",
    "AnomalyEntry",
    "BlochState",
    "DensitySurface",
    "anomaly_report",
    "anomaly_scan",
    "assemble_state",
    "barrier_probability",
    "conjugate_state",
    "evaluate_density",
    "psi",
    "well_probability",
    "RunConfig",
    "Band",
    "EdgeCondition",
    "find_bands",
    "g_quad",
    "quasimomentum_of",
    "rhs_dispersion",
    "top_band",
    "BlochLabError",
    "Monodromy",
    "integrate",
    "kp_trace_analytic",
    "monodromy_of",
    "PotentialKind",
    "PotentialSpec",
    "eval_potential",
    "make_biparabolic",
    "make_kronig_penney",
]
