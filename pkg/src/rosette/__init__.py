"""Rosette central configurations of the planar (2n+1)-body problem."""

from .bifurcation import (
    CountResult,
    HmaxCurve,
    LemmaReport,
    bifurcation_curve,
    count_configurations,
    hmax,
    scan_hmax_n3,
    verify_lemma_main,
)
from .errors import (
    CollisionError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    FoldNotFoundError,
    FoldSuspectedError,
    PoleError,
    RosetteError,
)
from .oracle import OracleResult, PlanarConfiguration, build_configuration, check_central, newtonian
from .potential import (
    AngleTable,
    RosetteParams,
    angle_table,
    center_mass,
    center_mass_dx,
    center_mass_parts,
    critical_center_mass,
    lemma_bounds,
    mismatch_numerator,
    pole_coefficient,
    polygon_potential,
    polygon_potential_lower,
    shape_residual,
    shape_residual_dx,
)
from .rootfind import Bracket, FoldPoint, RootSet, bracket_roots, find_fold, refine_root

__version__ = "0.1.0"
