"""Deformation parameters and numerically stable q-basis numbers.

The deformation is parameterized by gamma = ln(q); gamma = 0 is the ordinary
boson oscillator.  Basis numbers generalize the non-negative integers:

    [n] = (q**n - q**-n) / (q - q**-1) = sinh(n*gamma) / sinh(gamma)

with [n] -> n as gamma -> 0.  Everything here is double precision; a result
that leaves the double range raises instead of returning inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BasisOverflowError, DomainError

# Below this the sinh ratio is evaluated by its quadratic expansion in gamma,
# which avoids the 0/0 cancellation while staying continuous at gamma = 0.
SMALL_GAMMA_THRESHOLD = 1e-6


@dataclass(frozen=True)
class DeformationParameter:
    """Canonical deformation strength gamma = ln(q).

    Every quantity in this package is invariant under q <-> 1/q, so
    construction canonicalizes to the representative with gamma >= 0
    (q >= 1).  q is always derived as exp(gamma), never stored.
    """

    gamma: float

    def __post_init__(self) -> None:
        g = float(self.gamma)
        if not math.isfinite(g):
            raise DomainError(f"gamma must be finite, got {self.gamma!r}")
        object.__setattr__(self, "gamma", abs(g))

    @property
    def q(self) -> float:
        return math.exp(self.gamma)

    @property
    def is_deformed(self) -> bool:
        return self.gamma != 0.0

    @classmethod
    def from_q(cls, q: float) -> "DeformationParameter":
        q = float(q)
        if not math.isfinite(q) or q <= 0.0:
            raise DomainError(f"q must be a finite positive real, got {q!r}")
        return cls(math.log(q))

    @classmethod
    def from_gamma(cls, gamma: float) -> "DeformationParameter":
        return cls(gamma)


UNDEFORMED = DeformationParameter(0.0)


def make_deformation(value: float, kind: str = "from_q") -> DeformationParameter:
    """Build a DeformationParameter from q (kind="from_q") or from gamma
    (kind="from_gamma").  Both constructors canonicalize, so
    make_deformation(x, "from_q") == make_deformation(1/x, "from_q")."""
    if kind == "from_q":
        return DeformationParameter.from_q(value)
    if kind == "from_gamma":
        return DeformationParameter.from_gamma(value)
    raise ValueError(f"kind must be 'from_q' or 'from_gamma', got {kind!r}")


def basis_number(n: int, d: DeformationParameter) -> float:
    """Evaluate the basis number [n] = sinh(n*gamma)/sinh(gamma).

    Satisfies [0] = 0, [1] = 1, the recurrence
    [n+1] = (q + 1/q)[n] - [n-1], and [n] -> n as gamma -> 0.

    For gamma >= SMALL_GAMMA_THRESHOLD the ratio is evaluated as

        exp((n-1)*gamma) * expm1(-2*n*gamma) / expm1(-2*gamma)

    so neither sinh overflows before the result itself does; a final value
    outside the double range raises BasisOverflowError.
    """
    if n != int(n):
        raise DomainError(f"occupation number must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise DomainError(f"occupation number must be >= 0, got {n}")
    if n == 0:
        return 0.0
    g = d.gamma
    if g == 0.0:
        return float(n)
    if g < SMALL_GAMMA_THRESHOLD:
        # n * (1 + (n^2 - 1) gamma^2 / 6); next correction O((n*gamma)^4)
        return n * (1.0 + (n * n - 1) * g * g / 6.0)
    ratio = math.expm1(-2.0 * n * g) / math.expm1(-2.0 * g)
    try:
        scale = math.exp((n - 1) * g)
    except OverflowError:
        raise BasisOverflowError(
            f"[{n}] at gamma={g} exceeds the double-precision range"
        ) from None
    value = scale * ratio
    if math.isinf(value):
        raise BasisOverflowError(
            f"[{n}] at gamma={g} exceeds the double-precision range")
    return value


@dataclass(frozen=True)
class BasisNumberValue:
    """A basis number together with the occupation it belongs to."""

    n: int
    value: float


def basis_number_value(n: int, d: DeformationParameter) -> BasisNumberValue:
    return BasisNumberValue(n=int(n), value=basis_number(n, d))
