"""Heights of p-adic and adelic matrix data, checked in exact arithmetic."""

from .exactnum import (
    FINITE,
    GLOBAL,
    REAL,
    abs_p,
    gm_heights,
    height_tuple,
    valuation,
)
from .lattice_heights import (
    IntegralAutomorphism,
    LatticeHom,
    compose_with_automorphisms,
    conjugate_representation,
    hom_height_f,
    hom_height_p,
)
from .minkowski import minkowski_constant, minkowski_torsion_check
from .orbit_index import (
    Experiment,
    LatticeClass,
    OrbitReport,
    cyclic_exp_index,
    lattice_orbit_index,
    verify_global_bound,
    verify_local_bound,
)
from .padic import (
    BoundViolation,
    ConvergenceError,
    PadicMatrix,
    char_poly,
    exp_converges,
    exp_matrix,
    log_criterion,
    log_exp_roundtrip,
    log_matrix,
    matrix_norm,
)
from .siegel import SiegelParams, check_siegel_claim, iwasawa, p_map, siegel_member

__version__ = "0.1.0"

__all__ = [
    "FINITE", "GLOBAL", "REAL", "BoundViolation", "ConvergenceError", "Experiment",
    "IntegralAutomorphism", "LatticeClass", "LatticeHom", "OrbitReport", "PadicMatrix",
    "SiegelParams", "abs_p", "char_poly", "check_siegel_claim", "compose_with_automorphisms",
    "conjugate_representation", "cyclic_exp_index", "exp_converges", "exp_matrix",
    "gm_heights", "height_tuple", "hom_height_f", "hom_height_p", "iwasawa",
    "lattice_orbit_index", "log_criterion", "log_exp_roundtrip", "log_matrix",
    "matrix_norm", "minkowski_constant", "minkowski_torsion_check", "p_map",
    "siegel_member", "valuation", "verify_global_bound", "verify_local_bound",
]
