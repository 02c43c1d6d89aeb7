"""Numerical laboratory for multiple Hurwitz zeta-functions."""

from .errors import (
    ArityError,
    BudgetError,
    CompatibilityError,
    ContourError,
    ConvergenceError,
    CostError,
    DomainError,
    LabError,
    PoleError,
    RangeError,
    SignError,
    UnimodularError,
)
from .numcore import DEFAULT_CUTOFF, SmoothCutoff, beta, gamma, mb_kernel, phi_eval, phi_mellin
from .hurwitz import (
    DirichletCharacter,
    HurwitzParam,
    character_table,
    dirichlet_L,
    hurwitz_afe,
    hurwitz_smoothed,
    hurwitz_zeta,
    permissibility_scan,
)
from .multizeta import (
    CompactBox,
    ContourSpec,
    zeta_diag_powersum,
    zeta_eval,
    zeta_mb,
    zeta_smoothed,
    zeta_trunc,
    zeta_values,
)
from .twist import (
    TwistFunction,
    WeylTargetSpec,
    make_twist,
    partial_sum_growth,
    twist_value,
    twisted_zeta_trunc,
    weyl_set_measure,
)
from .decomp import MonomialTableau, Polynomial, decompose, parse_polynomial, verify_tableau
from .lab import (
    Continuous,
    Discrete,
    Line,
    ScanSpec,
    ShiftRecord,
    ZeroRecord,
    find_zeros,
    mean_square,
    scan_shifts,
    sup_distance,
)
from .config import RunConfig

__version__ = "0.1.0"
