"""Verified numerics for the statistical mechanics of deformed boson
oscillators: basis numbers, occupation distributions with and without the
zero-point term, partition functions, and the thermodynamic potential and
internal energy built from them.  Every closed form ships with an
independent series or finite-difference cross-check in qboson.oracle.
"""

from .errors import (
    BasisOverflowError,
    DomainError,
    NonConvergenceError,
    SingularDecompositionError,
)
from .qmath import (
    SMALL_GAMMA_THRESHOLD,
    UNDEFORMED,
    BasisNumberValue,
    DeformationParameter,
    basis_number,
    basis_number_value,
    make_deformation,
)
from .distributions import (
    DistributionResult,
    ModePoint,
    PartialFractionCoefficients,
    Variant,
    deformed_distribution_fugacity,
    deformed_distribution_no_zpe,
    deformed_distribution_zpe,
    evaluate_distribution,
    occupation_probability,
    partial_fraction_coefficients,
    undeformed_distribution,
)
from .thermo import (
    EnsembleSpec,
    Regime,
    RegimeReport,
    RegimeThresholds,
    high_t_leading_correction,
    internal_energy,
    internal_energy_factored,
    log_partition_fugacity_per_mode,
    log_partition_per_mode,
    regime_report,
    thermodynamic_potential,
)
from .oracle import (
    DEFAULT_TOLERANCES,
    SeriesEstimate,
    VerificationCheck,
    VerificationReport,
    check_beta_derivative,
    check_fugacity_derivative,
    default_verification_grid,
    partial_series_sum,
    run_verification_suite,
    series_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BasisNumberValue",
    "BasisOverflowError",
    "DEFAULT_TOLERANCES",
    "DeformationParameter",
    "DistributionResult",
    "DomainError",
    "EnsembleSpec",
    "ModePoint",
    "NonConvergenceError",
    "PartialFractionCoefficients",
    "Regime",
    "RegimeReport",
    "RegimeThresholds",
    "SMALL_GAMMA_THRESHOLD",
    "SeriesEstimate",
    "SingularDecompositionError",
    "UNDEFORMED",
    "VerificationCheck",
    "VerificationReport",
    "Variant",
    "basis_number",
    "basis_number_value",
    "check_beta_derivative",
    "check_fugacity_derivative",
    "default_verification_grid",
    "deformed_distribution_fugacity",
    "deformed_distribution_no_zpe",
    "deformed_distribution_zpe",
    "evaluate_distribution",
    "high_t_leading_correction",
    "internal_energy",
    "internal_energy_factored",
    "log_partition_fugacity_per_mode",
    "log_partition_per_mode",
    "make_deformation",
    "occupation_probability",
    "partial_fraction_coefficients",
    "partial_series_sum",
    "regime_report",
    "run_verification_suite",
    "series_distribution",
    "thermodynamic_potential",
    "undeformed_distribution",
    "__version__",
]
