"""Partition functions, thermodynamic potential, internal energy, regimes.

Everything is returned in dimensionless form: ln Z per mode, beta*Omega, and
beta*U.  Mode energies enter only through x_k = beta * E_k, so no separate
temperature variable exists; multiply by 1/beta yourself if you need absolute
units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .distributions import ModePoint, deformed_distribution_zpe
from .errors import DomainError
from .qmath import DeformationParameter

_LN2 = math.log(2.0)


def _log1mexp(t: float) -> float:
    # log(1 - e^{-t}) for t > 0; form switch at ln 2 keeps full precision
    if t <= 0.0:
        raise DomainError(f"log(1 - exp(-t)) needs t > 0, got {t}")
    if t < _LN2:
        return math.log(-math.expm1(-t))
    return math.log1p(-math.exp(-t))


@dataclass(frozen=True)
class EnsembleSpec:
    """N identical oscillators per mode, with dimensionless mode energies.

    mode_x holds x_k = beta * E_k > 0.  The deformation applies to every
    mode.  Extensive quantities are accumulated per mode in listed order,
    each term already multiplied by n_oscillators, so an ensemble equals the
    sum of its single-mode ensembles bit-exactly.
    """

    n_oscillators: int
    mode_x: tuple[float, ...]
    deformation: DeformationParameter

    def __post_init__(self) -> None:
        if self.n_oscillators != int(self.n_oscillators) or self.n_oscillators < 1:
            raise DomainError(
                f"n_oscillators must be a positive integer, got {self.n_oscillators!r}")
        object.__setattr__(self, "n_oscillators", int(self.n_oscillators))
        modes = tuple(float(x) for x in self.mode_x)
        for x in modes:
            if not math.isfinite(x) or x <= 0.0:
                raise DomainError(f"mode x values must be positive finite reals, got {x!r}")
        object.__setattr__(self, "mode_x", modes)

    def mode_points(self) -> list[ModePoint]:
        return [ModePoint(x, self.deformation) for x in self.mode_x]


class Regime(enum.Enum):
    LOW_T = "LowT"
    HIGH_T = "HighT"
    INTERMEDIATE = "Intermediate"


@dataclass(frozen=True)
class RegimeThresholds:
    """Classification thresholds; defaults define the supported regimes.

    LowT:  x >= low_t_x_min and gamma <= x * low_t_max_gamma_fraction.
    HighT: x <= high_t_x_max and gamma <= x**2.
    The small-deformation flag holds when gamma <= x * small_deformation_max_ratio.
    """

    low_t_x_min: float = 10.0
    low_t_max_gamma_fraction: float = 0.01
    high_t_x_max: float = 0.01
    small_deformation_max_ratio: float = 0.1


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    small_deformation: bool
    asymptote: Optional[float]
    deviation: Optional[float]


def log_partition_per_mode(p: ModePoint, zpe: bool, deformed: bool) -> float:
    """ln Z for a single mode.

    undeformed, no ZPE:  ln(e^x/(e^x - 1))          = -ln(1 - e^{-x})
    undeformed, ZPE:     -ln(2 sinh(x/2))           = -x/2 - ln(1 - e^{-x})
    deformed,  ZPE:      -(1/2) ln(2 (cosh x - cosh g))
                         = -x/2 - (1/2) ln((1 - e^{-(x-g)})(1 - e^{-(x+g)}))

    The deformed ZPE form is the working definition validated by the two
    derivative identities (see the oracle module); it reduces bit-exactly to
    the undeformed ZPE form at gamma = 0.  The deformed theory without the
    zero-point term has no partition function here and raises.
    """
    x = p.x
    if deformed:
        if not zpe:
            raise DomainError(
                "the deformed partition function is defined only with the "
                "zero-point energy included (zpe=True)")
        p.require_above_pole()
        g = p.gamma
        return -0.5 * x - 0.5 * (_log1mexp(x - g) + _log1mexp(x + g))
    if zpe:
        return -0.5 * x - _log1mexp(x)
    return -_log1mexp(x)


def log_partition_fugacity_per_mode(p: ModePoint, z: float) -> float:
    """ln Z for one deformed ZPE mode with fugacity z, the unique form whose
    z-derivative reproduces the four-term distribution: the zero-fugacity
    expression shifted to x_eff = x - ln z.  Domain: q z e^{-x} < 1."""
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"fugacity z must be a positive finite real, got {z!r}")
    x_eff = p.x - math.log(z)
    g = p.gamma
    if x_eff <= g:
        raise DomainError(
            "divergent regime: q z e^(-x) must stay below 1 "
            f"(x - ln z = {x_eff} does not exceed gamma = {g})")
    return -0.5 * x_eff - 0.5 * (_log1mexp(x_eff - g) + _log1mexp(x_eff + g))


def thermodynamic_potential(e: EnsembleSpec, z: float = 1.0) -> float:
    """beta * Omega = -ln Z_total for the deformed ZPE ensemble.

    Per-mode contributions -(N * ln Z_k) are summed in listed order.  At
    z = 1 each mode reduces to log_partition_per_mode(..., zpe=True,
    deformed=True).
    """
    total = 0.0
    for p in e.mode_points():
        total += -(e.n_oscillators * log_partition_fugacity_per_mode(p, z))
    return total


def internal_energy(e: EnsembleSpec) -> float:
    """beta * U = sum_k N x_k f(x_k) with f the deformed ZPE mean occupation,
    i.e. U = sum_k N E_k (1/2) sinh(x_k) / (cosh x_k - cosh gamma)."""
    total = 0.0
    for p in e.mode_points():
        f = deformed_distribution_zpe(p).value
        total += e.n_oscillators * (p.x * f)
    return total


def _mean_occupation_factored(x: float, g: float) -> float:
    # (1/2) sinh(x/2) cosh(x/2) / (sinh((x+g)/2) sinh((x-g)/2))
    num = 0.5 * math.sinh(0.5 * x) * math.cosh(0.5 * x)
    den = math.sinh(0.5 * (x + g)) * math.sinh(0.5 * (x - g))
    return num / den


def internal_energy_factored(e: EnsembleSpec) -> float:
    """Same quantity as internal_energy via the product-of-sinh representation

        U = sum_k N E_k (1/2) sinh(x/2) cosh(x/2)
            / (sinh((x+g)/2) sinh((x-g)/2))

    kept as an independent representation for cross-checking.
    """
    total = 0.0
    for p in e.mode_points():
        p.require_above_pole()
        total += e.n_oscillators * (p.x * _mean_occupation_factored(p.x, p.gamma))
    return total


def regime_report(p: ModePoint, n_oscillators: int = 1,
                  thresholds: Optional[RegimeThresholds] = None) -> RegimeReport:
    """Classify (x, gamma) against the asymptotes of the deformed ZPE energy.

    LowT:  U -> N E / 2 (pure zero-point); asymptote reported as N/2 in
           units of E, deviation |U/(N E/2) - 1| = |2 f - 1|.
    HighT: U -> N k T;  asymptote N/x in units of E, deviation
           |beta U / N - 1| = |x f - 1|; leading correction
           x^2/12 + gamma^2/x^2.
    Intermediate points report no asymptote.
    """
    t = thresholds if thresholds is not None else RegimeThresholds()
    if n_oscillators < 1:
        raise DomainError(f"n_oscillators must be >= 1, got {n_oscillators}")
    p.require_above_pole()
    x, g = p.x, p.gamma
    f = deformed_distribution_zpe(p).value
    small = g <= x * t.small_deformation_max_ratio
    if x >= t.low_t_x_min and g <= x * t.low_t_max_gamma_fraction:
        return RegimeReport(Regime.LOW_T, small, 0.5 * n_oscillators,
                            abs(2.0 * f - 1.0))
    if x <= t.high_t_x_max and g <= x * x:
        return RegimeReport(Regime.HIGH_T, small, n_oscillators / x,
                            abs(x * f - 1.0))
    return RegimeReport(Regime.INTERMEDIATE, small, None, None)


def high_t_leading_correction(x: float, gamma: float) -> float:
    """Predicted leading deviation of beta*U/N from 1 deep in the
    high-temperature regime: x^2/12 + gamma^2/x^2."""
    return x * x / 12.0 + (gamma * gamma) / (x * x)
