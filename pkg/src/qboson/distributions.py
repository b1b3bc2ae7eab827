"""Mean-occupation distributions for deformed and undeformed oscillators.

Four variants: {undeformed, deformed} x {without, with zero-point energy}.
The deformed forms are the first-order iteration that averages basis numbers
with the *undeformed* occupation weights, which resums to closed rational
expressions in e^x.  All closed forms are evaluated through expm1-based
factorizations of cosh(x) - cosh(gamma), which stay accurate next to the
pole at x = gamma and never build an e^{2x} intermediate:

    2 (cosh x - cosh g) = e^x (1 - e^{-(x-g)}) (1 - e^{-(x+g)})
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, SingularDecompositionError
from .qmath import UNDEFORMED, DeformationParameter


class Variant(enum.Enum):
    """Distribution variants, keyed by their command-line tokens."""

    UNDEFORMED_NO_ZPE = "undeformed-no-zpe"
    UNDEFORMED_ZPE = "undeformed-zpe"
    DEFORMED_NO_ZPE = "deformed-no-zpe"
    DEFORMED_ZPE = "deformed-zpe"

    @property
    def deformed(self) -> bool:
        return self in (Variant.DEFORMED_NO_ZPE, Variant.DEFORMED_ZPE)

    @property
    def zpe(self) -> bool:
        return self in (Variant.UNDEFORMED_ZPE, Variant.DEFORMED_ZPE)

    @classmethod
    def from_token(cls, token: str) -> "Variant":
        try:
            return cls(token)
        except ValueError:
            valid = ", ".join(v.value for v in cls)
            raise ValueError(
                f"unknown variant {token!r}; expected one of {valid}") from None


@dataclass(frozen=True)
class ModePoint:
    """One oscillator mode at one temperature.

    x = (mode energy)/(kT) is dimensionless and must be positive.  The pole
    condition x > gamma is enforced by the deformed evaluations themselves,
    so a ModePoint may hold any positive x.
    """

    x: float
    deformation: DeformationParameter = UNDEFORMED

    def __post_init__(self) -> None:
        x = float(self.x)
        if not math.isfinite(x) or x <= 0.0:
            raise DomainError(f"x must be a positive finite real, got {self.x!r}")
        object.__setattr__(self, "x", x)

    @property
    def gamma(self) -> float:
        return self.deformation.gamma

    def require_above_pole(self) -> None:
        """Enforce x > gamma, the shared pole/convergence condition of every
        deformed closed form and of the defining series (ratio q*e^{-x} < 1)."""
        if self.x <= self.gamma:
            raise DomainError(
                "x must exceed gamma: the deformed distribution has a pole at "
                f"x = gamma (got x={self.x}, gamma={self.gamma})")


@dataclass(frozen=True)
class DistributionResult:
    value: float
    variant: Variant


@dataclass(frozen=True)
class PartialFractionCoefficients:
    """c1 = q/(q - 1/q) and c2 = -(1/q)/(q - 1/q); c1 + c2 = 1."""

    c1: float
    c2: float


def _pole_factors(x: float, gamma: float) -> float:
    # (1 - e^{-(x-g)})(1 - e^{-(x+g)}) = e^{-x} * 2 (cosh x - cosh g)
    return (-math.expm1(gamma - x)) * (-math.expm1(-gamma - x))


def occupation_probability(n: int, p: ModePoint, zpe: bool = False) -> float:
    """Normalized occupation probability of level n for the undeformed
    oscillator, the zeroth-iteration weight that also seeds the deformed
    averages.

    Without zero-point energy the weight is e^{-n x} (1 - e^{-x}); with it,
    2 sinh(x/2) e^{-(n+1/2) x}.  The two are identical (the half-quantum
    shift cancels against the normalization), so one stable expression
    serves both flags.
    """
    if n != int(n) or n < 0:
        raise DomainError(f"occupation number must be an integer >= 0, got {n!r}")
    return math.exp(-int(n) * p.x) * -math.expm1(-p.x)


def undeformed_distribution(p: ModePoint, zpe: bool = False) -> DistributionResult:
    """Mean occupation of the ordinary oscillator: 1/(e^x - 1), plus 1/2
    when the zero-point term is kept (equivalently coth(x/2)/2)."""
    bose = 1.0 / math.expm1(p.x)
    if zpe:
        return DistributionResult(0.5 + bose, Variant.UNDEFORMED_ZPE)
    return DistributionResult(bose, Variant.UNDEFORMED_NO_ZPE)


def deformed_distribution_no_zpe(p: ModePoint) -> DistributionResult:
    """Deformed mean occupation without the zero-point term.

    Closed form (e^x - 1)/((q e^x - 1)(q^{-1} e^x - 1)), evaluated as

        e^{-x} (1 - e^{-x}) / ((1 - e^{-(x-g)})(1 - e^{-(x+g)}))

    Reduces to 1/(e^x - 1) at gamma = 0.  Domain: x > gamma.
    """
    p.require_above_pole()
    x = p.x
    value = math.exp(-x) * -math.expm1(-x) / _pole_factors(x, p.gamma)
    return DistributionResult(value, Variant.DEFORMED_NO_ZPE)


def deformed_distribution_zpe(p: ModePoint) -> DistributionResult:
    """Deformed mean occupation with the zero-point term.

    Closed form (1/2) sinh(x) / (cosh x - cosh gamma), evaluated as

        (1/2) (1 - e^{-2x}) / ((1 - e^{-(x-g)})(1 - e^{-(x+g)}))

    Tends to 1/2 as x -> inf and to coth(x/2)/2 as gamma -> 0.
    Domain: x > gamma.
    """
    p.require_above_pole()
    x = p.x
    value = 0.5 * -math.expm1(-2.0 * x) / _pole_factors(x, p.gamma)
    return DistributionResult(value, Variant.DEFORMED_ZPE)


def evaluate_distribution(p: ModePoint, variant: Variant) -> DistributionResult:
    """Dispatch to the closed form for the requested variant."""
    if variant is Variant.UNDEFORMED_NO_ZPE:
        return undeformed_distribution(p, zpe=False)
    if variant is Variant.UNDEFORMED_ZPE:
        return undeformed_distribution(p, zpe=True)
    if variant is Variant.DEFORMED_NO_ZPE:
        return deformed_distribution_no_zpe(p)
    if variant is Variant.DEFORMED_ZPE:
        return deformed_distribution_zpe(p)
    raise ValueError(f"unknown variant {variant!r}")


def partial_fraction_coefficients(d: DeformationParameter) -> PartialFractionCoefficients:
    """Coefficients of the partial-fraction split of the deformed ZPE form.

    c1 = q/(q - 1/q).  c2 is evaluated as 1 - c1, which is algebraically
    identical to -(1/q)/(q - 1/q) and makes the sum rule c1 + c2 = 1 exact
    in floating point even when the coefficients individually blow up as
    gamma -> 0.
    """
    if not d.is_deformed:
        raise SingularDecompositionError(
            "partial-fraction coefficients are individually singular at gamma = 0; "
            "use the undeformed closed form instead")
    g = d.gamma
    c1 = math.exp(g) / (2.0 * math.sinh(g))
    return PartialFractionCoefficients(c1=c1, c2=1.0 - c1)


def deformed_distribution_fugacity(p: ModePoint, z: float) -> float:
    """Four-term partial-fraction form of the deformed ZPE distribution with
    fugacity z reinstated through e^{-x} -> z e^{-x}:

        f = (1/2) [ c1/(1 - q w) + c2/(1 - w/q)
                    + c2/(1/(q w) - 1) + c1/(q/w - 1) ],   w = z e^{-x}

    At z = 1 the four terms collapse to deformed_distribution_zpe (tested
    identity).  Domain: q z e^{-x} < 1, i.e. x - ln z > gamma, and gamma > 0
    for the coefficients to exist.
    """
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"fugacity z must be a positive finite real, got {z!r}")
    coeffs = partial_fraction_coefficients(p.deformation)
    q = p.deformation.q
    w = z * math.exp(-p.x)
    if q * w >= 1.0:
        raise DomainError(
            "divergent regime: the factor (1 - q z e^(-x)) requires "
            f"q z e^(-x) < 1, got {q * w}")
    c1, c2 = coeffs.c1, coeffs.c2
    return 0.5 * (c1 / (1.0 - q * w)
                  + c2 / (1.0 - w / q)
                  + c2 / (1.0 / (q * w) - 1.0)
                  + c1 / (q / w - 1.0))
