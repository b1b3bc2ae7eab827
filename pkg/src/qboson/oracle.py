"""Independent oracles and the verification suite.

Every closed form in this package is cross-checked against a slower route
that shares no algebra with it: distributions against their defining series
(term-by-term, compensated summation, rigorous geometric tail bound), and
the partition-function/potential formulas against central-difference
derivatives with one Richardson extrapolation step.
run_verification_suite executes the full battery over a grid and returns a
deterministic, serializable report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .distributions import (
    ModePoint,
    Variant,
    deformed_distribution_fugacity,
    deformed_distribution_no_zpe,
    deformed_distribution_zpe,
    evaluate_distribution,
    occupation_probability,
    partial_fraction_coefficients,
)
from .errors import DomainError, NonConvergenceError
from .qmath import DeformationParameter, basis_number
from .thermo import (
    EnsembleSpec,
    _mean_occupation_factored,
    high_t_leading_correction,
    internal_energy,
    log_partition_per_mode,
    thermodynamic_potential,
)

DEFAULT_SERIES_TOL = 1e-12
DEFAULT_SERIES_N_MAX = 10**6

DEFAULT_GRID_GAMMAS = (0.0, 0.01, 0.05, 0.1, 0.3)
DEFAULT_GRID_X_COUNT = 25
DEFAULT_GRID_X_MAX = 10.0
DEFAULT_GRID_X_MARGIN = 0.5   # grid starts at gamma + margin

# Family tolerances for the suite; keys match check-name prefixes.  Series
# comparisons add the oracle's reported tail bound on top of the family
# value per point.
DEFAULT_TOLERANCES: dict[str, float] = {
    "series-closed-no-zpe": 1e-12,
    "series-closed-zpe": 1e-12,
    "oracle-self-consistency": 1e-10,
    # the bound is about the exact series; doubling the term count and
    # comparing in floats adds a few ulps of the sum, hence not exactly 0
    "tail-bound-soundness": 1e-15,
    "fugacity-z1-identity": 1e-12,
    "partial-fraction-sum": 1e-15,
    "beta-derivative": 1e-7,
    "fugacity-derivative": 1e-7,
    "energy-representation": 1e-12,
    "q-inverse-symmetry": 1e-12,
    "zpe-dominance": 0.0,
    "zpe-dominance-half-limit": 1e-12,
    "monotonic-in-x": 0.0,
    "limit-chain-gamma": 0.0,
    "additivity": 0.0,
    "basis-recurrence": 1e-12,
    "basis-undeformed-limit": 1e-7,
    "undeformed-limit-no-zpe": 1e-6,
    "undeformed-limit-zpe": 1e-6,
    "undeformed-limit-log-partition": 1e-6,
    "undeformed-limit-energy": 1e-6,
    "low-t-limit": 1e-12,
    "high-t-limit": 1e-5,
    "high-t-correction-match": 2.0,
    "classical-limit-undeformed": 1e-5,
    "skip": 0.0,
}


@dataclass(frozen=True)
class SeriesEstimate:
    """Truncated series value with the number of terms consumed and a bound
    on the discarded tail."""

    value: float
    terms_used: int
    tail_bound: float


@dataclass(frozen=True)
class VerificationCheck:
    name: str
    x: float
    gamma: float
    residual: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[VerificationCheck, ...]
    overall_pass: bool

    @classmethod
    def from_checks(cls, checks: Sequence[VerificationCheck]) -> "VerificationReport":
        cs = tuple(checks)
        return cls(checks=cs, overall_pass=all(c.passed for c in cs))

    def to_json_dict(self) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "point": {"x": c.x, "gamma": c.gamma},
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
            "overall_pass": self.overall_pass,
        }


class _KahanSum:
    """Compensated accumulator; the carry recovers low-order bits that a
    plain running sum would drop."""

    __slots__ = ("total", "carry")

    def __init__(self) -> None:
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        y = value - self.carry
        t = self.total + y
        self.carry = (t - self.total) - y
        self.total = t


def log_spaced(lo: float, hi: float, count: int) -> list[float]:
    """count points spaced uniformly in log between lo and hi inclusive."""
    if not (0.0 < lo < hi) or count < 2:
        raise ValueError(f"need 0 < lo < hi and count >= 2, got {lo}, {hi}, {count}")
    a, b = math.log(lo), math.log(hi)
    pts = [math.exp(a + i * (b - a) / (count - 1)) for i in range(count)]
    pts[0], pts[-1] = lo, hi
    return pts


def linear_spaced(lo: float, hi: float, count: int) -> list[float]:
    if not (lo < hi) or count < 2:
        raise ValueError(f"need lo < hi and count >= 2, got {lo}, {hi}, {count}")
    pts = [lo + i * (hi - lo) / (count - 1) for i in range(count)]
    pts[0], pts[-1] = lo, hi
    return pts


def default_verification_grid(
    gammas: Sequence[float] = DEFAULT_GRID_GAMMAS,
    x_count: int = DEFAULT_GRID_X_COUNT,
    x_max: float = DEFAULT_GRID_X_MAX,
) -> list[ModePoint]:
    """Per gamma, x_count log-spaced x on [gamma + 0.5, x_max]."""
    points = []
    for g in gammas:
        d = DeformationParameter.from_gamma(g)
        for x in log_spaced(d.gamma + DEFAULT_GRID_X_MARGIN, x_max, x_count):
            points.append(ModePoint(x, d))
    return points


def _series_term(n: int, p: ModePoint, variant: Variant) -> float:
    w = occupation_probability(n, p, zpe=variant.zpe)
    if variant is Variant.UNDEFORMED_NO_ZPE:
        return n * w
    if variant is Variant.UNDEFORMED_ZPE:
        return (n + 0.5) * w
    if variant is Variant.DEFORMED_NO_ZPE:
        return basis_number(n, p.deformation) * w
    return 0.5 * (basis_number(n + 1, p.deformation)
                  + basis_number(n, p.deformation)) * w


def _ratio_bound(n: int, p: ModePoint, variant: Variant) -> float:
    """Rigorous bound on term_{m+1}/term_m for every m >= n >= 1.

    The weight contributes exactly e^{-x} per step.  The bracket ratio is
    decreasing in n: (n+1)/n, (n+3/2)/(n+1/2), and for basis numbers
    [n+1]/[n] = cosh g + sinh g / tanh(n g), each largest at the current n.
    """
    g = p.gamma
    decay = math.exp(-p.x)
    if variant.deformed and g > 0.0:
        return decay * (math.cosh(g) + math.sinh(g) / math.tanh(n * g))
    if variant.zpe:
        return decay * (n + 1.5) / (n + 0.5)
    return decay * (n + 1.0) / n


def series_distribution(
    p: ModePoint,
    variant: Variant,
    tol: float = DEFAULT_SERIES_TOL,
    n_max: int = DEFAULT_SERIES_N_MAX,
) -> SeriesEstimate:
    """Sum the defining occupation series of the requested variant.

    Terms are accumulated in ascending n with compensated summation; the
    loop stops once the geometric tail bound drops to tol.  Exhausting
    n_max first raises NonConvergenceError carrying the partial estimate.
    Deformed variants require x > gamma (divergent otherwise).
    """
    if not (tol > 0.0) or not math.isfinite(tol):
        raise DomainError(f"tol must be a positive finite real, got {tol!r}")
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if variant.deformed:
        p.require_above_pole()
    acc = _KahanSum()
    bound = math.inf
    for n in range(n_max + 1):
        term = _series_term(n, p, variant)
        acc.add(term)
        if n >= 1:
            rho = _ratio_bound(n, p, variant)
            if rho < 1.0:
                bound = term * rho / (1.0 - rho)
                if bound <= tol:
                    return SeriesEstimate(acc.total, n + 1, bound)
    raise NonConvergenceError(
        f"series for {variant.value} at x={p.x}, gamma={p.gamma} did not reach "
        f"tol={tol} within {n_max} terms",
        SeriesEstimate(acc.total, n_max + 1, bound))


def partial_series_sum(p: ModePoint, variant: Variant, terms: int) -> float:
    """Plain compensated sum of the first `terms` series terms, no stopping
    rule; verification plumbing for tail-bound soundness checks."""
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    if variant.deformed:
        p.require_above_pole()
    acc = _KahanSum()
    for n in range(terms):
        acc.add(_series_term(n, p, variant))
    return acc.total


def _richardson_central(f: Callable[[float], float], t: float, h: float) -> float:
    # central differences at h and h/2, one Richardson level: error O(h^4)
    d1 = (f(t + h) - f(t - h)) / (2.0 * h)
    d2 = (f(t + 0.5 * h) - f(t - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def check_beta_derivative(p: ModePoint, h_rel: float = 1e-5) -> float:
    """Relative residual of the identity U = -d(ln Z)/d(beta) for one mode.

    With E fixed and x = beta E, the identity reads
    -d(ln Z)/dx = f(x); the left side is evaluated by Richardson-extrapolated
    central differences with step h = h_rel * x.  Requires a pole margin
    x - gamma >= 2 h_rel x.
    """
    if not (0.0 < h_rel < 0.5):
        raise DomainError(f"h_rel must be in (0, 0.5), got {h_rel}")
    x, g = p.x, p.gamma
    if x - g < 2.0 * h_rel * x:
        raise DomainError(
            "insufficient pole margin for differentiation: need "
            f"x - gamma >= 2*h_rel*x = {2.0 * h_rel * x}, got {x - g}")
    d = p.deformation

    def neg_log_z(xv: float) -> float:
        return -log_partition_per_mode(ModePoint(xv, d), zpe=True, deformed=True)

    u_numeric = _richardson_central(neg_log_z, x, h_rel * x)
    f_closed = deformed_distribution_zpe(p).value
    return abs(u_numeric - f_closed) / abs(f_closed)


def check_fugacity_derivative(p: ModePoint, z: float = 1.0,
                              h_rel: float = 1e-5) -> float:
    """Relative residual of f = -beta z dOmega/dz against the four-term
    fugacity form, for a single-mode, single-oscillator ensemble.

    thermodynamic_potential returns beta*Omega, so the left side is
    -z d(beta Omega)/dz by Richardson-extrapolated central differences with
    step h = h_rel * z.  Requires gamma > 0 (the four-term form needs the
    partial fractions) and a log-margin x - gamma - ln z > 2 h_rel.
    """
    if not (0.0 < h_rel < 0.5):
        raise DomainError(f"h_rel must be in (0, 0.5), got {h_rel}")
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"fugacity z must be a positive finite real, got {z!r}")
    if p.x - p.gamma - math.log(z) <= 2.0 * h_rel:
        raise DomainError(
            "insufficient margin for differentiation in z: need "
            f"x - gamma - ln z > {2.0 * h_rel}")
    e = EnsembleSpec(1, (p.x,), p.deformation)
    f_numeric = -z * _richardson_central(
        lambda zv: thermodynamic_potential(e, zv), z, h_rel * z)
    f_closed = deformed_distribution_fugacity(p, z)
    return abs(f_numeric - f_closed) / abs(f_closed)


def _raw_rational_zpe(x: float, q: float) -> float:
    # (1/2)(e^{2x} - 1)/((e^x - q)(e^x - 1/q)): the textbook rational form,
    # deliberately un-stabilized, used only as an independent reference
    ex = math.exp(x)
    return 0.5 * (ex * ex - 1.0) / ((ex - q) * (ex - 1.0 / q))


def _basis_recurrence_residual(d: DeformationParameter,
                               n_limit: int = 1000) -> float:
    """Worst relative residual of [n+1] = (q + 1/q)[n] - [n-1] over a sample
    of n <= n_limit, restricted to where the values are representable."""
    two_cosh = 2.0 * math.cosh(d.gamma)
    ns = list(range(1, 32)) + [50, 75, 100, 150, 200, 300, 500, 750, n_limit - 1]
    worst = 0.0
    for n in ns:
        if n + 1 > n_limit:
            continue
        if d.gamma > 0.0 and (n * d.gamma) > 690.0:
            continue  # [n+1] not representable in doubles
        b_prev = basis_number(n - 1, d)
        b_cur = basis_number(n, d)
        b_next = basis_number(n + 1, d)
        resid = abs(two_cosh * b_cur - b_prev - b_next) / abs(b_next)
        worst = max(worst, resid)
    return worst


def _group_by_gamma(points: Sequence[ModePoint]) -> list[tuple[DeformationParameter, list[ModePoint]]]:
    groups: list[tuple[DeformationParameter, list[ModePoint]]] = []
    index: dict[float, int] = {}
    for p in points:
        g = p.gamma
        if g not in index:
            index[g] = len(groups)
            groups.append((p.deformation, []))
        groups[index[g]][1].append(p)
    return groups


def run_verification_suite(
    grid: Optional[Sequence[ModePoint]] = None,
    tolerances: Optional[Mapping[str, float]] = None,
) -> VerificationReport:
    """Execute every cross-check over the grid and return the report.

    Layout, in deterministic order: per-point checks in grid order, then
    per-gamma checks in order of first appearance, then cross-gamma and
    fixed limit-point checks.  Grid points with x <= gamma are excluded
    with an explicit skip entry.  An empty grid yields an empty report
    with a vacuous overall pass; the fixed-point checks run only when the
    grid contributed at least one valid point.  `tolerances` overrides
    entries of DEFAULT_TOLERANCES by family name; unknown names raise
    ValueError.
    """
    if grid is None:
        grid = default_verification_grid()
    tol_map = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = sorted(set(tolerances) - set(tol_map))
        if unknown:
            raise ValueError(f"unknown tolerance names: {', '.join(unknown)}")
        tol_map.update(tolerances)

    checks: list[VerificationCheck] = []

    def add(name: str, x: float, g: float, residual: float,
            tolerance: float, passed: Optional[bool] = None) -> None:
        ok = (residual <= tolerance) if passed is None else passed
        checks.append(VerificationCheck(name, x, g, residual, tolerance, ok))

    valid: list[ModePoint] = []
    for p in grid:
        if p.x <= p.gamma:
            add("skip/x-not-above-gamma", p.x, p.gamma, 0.0, tol_map["skip"], True)
        else:
            valid.append(p)

    # --- per-point checks -------------------------------------------------
    for p in valid:
        x, g = p.x, p.gamma

        for variant, family in ((Variant.DEFORMED_NO_ZPE, "series-closed-no-zpe"),
                                (Variant.DEFORMED_ZPE, "series-closed-zpe")):
            est = series_distribution(p, variant, tol=DEFAULT_SERIES_TOL)
            closed = evaluate_distribution(p, variant).value
            add(family, x, g, abs(closed - est.value),
                tol_map[family] + est.tail_bound)

            loose = series_distribution(p, variant, tol=1e-10)
            add(f"oracle-self-consistency/{variant.value}", x, g,
                abs(loose.value - est.value), tol_map["oracle-self-consistency"])

            doubled = partial_series_sum(p, variant, 2 * est.terms_used)
            overshoot = max(0.0, abs(doubled - est.value) - est.tail_bound)
            add(f"tail-bound-soundness/{variant.value}", x, g, overshoot,
                tol_map["tail-bound-soundness"])

        add("beta-derivative", x, g, check_beta_derivative(p),
            tol_map["beta-derivative"])

        f_zpe = deformed_distribution_zpe(p).value
        f_nozpe = deformed_distribution_no_zpe(p).value

        if p.deformation.is_deformed:
            add("fugacity-z1-identity", x, g,
                abs(deformed_distribution_fugacity(p, 1.0) - f_zpe),
                tol_map["fugacity-z1-identity"])
            coeffs = partial_fraction_coefficients(p.deformation)
            add("partial-fraction-sum", x, g, abs(coeffs.c1 + coeffs.c2 - 1.0),
                tol_map["partial-fraction-sum"])
            for z in (0.5, 1.0):
                add(f"fugacity-derivative/z={z}", x, g,
                    check_fugacity_derivative(p, z),
                    tol_map["fugacity-derivative"])
        else:
            add("skip/fugacity-checks-need-deformation", x, g, 0.0,
                tol_map["skip"], True)

        cosh_form = 0.5 * math.sinh(x) / (math.cosh(x) - math.cosh(g))
        factored = _mean_occupation_factored(x, g)
        rep_residual = max(abs(f_zpe - cosh_form), abs(f_zpe - factored)) / f_zpe
        add("energy-representation", x, g, rep_residual,
            tol_map["energy-representation"])

        q = p.deformation.q
        sym_residual = max(abs(_raw_rational_zpe(x, q) - f_zpe),
                           abs(_raw_rational_zpe(x, 1.0 / q) - f_zpe)) / f_zpe
        add("q-inverse-symmetry", x, g, sym_residual,
            tol_map["q-inverse-symmetry"])

        diff = f_zpe - f_nozpe
        add("zpe-dominance", x, g, max(0.0, -diff), tol_map["zpe-dominance"],
            passed=diff > 0.0)

    # grid-independent checks are still conditional on the grid having
    # contributed something: an empty grid must yield an empty report
    if not valid:
        return VerificationReport.from_checks(checks)

    # --- per-gamma checks -------------------------------------------------
    groups = _group_by_gamma(valid)
    for d, pts in groups:
        g = d.gamma
        xs = sorted(p.x for p in pts)
        x0 = xs[0]

        if len(xs) >= 2:
            for variant in Variant:
                vals = [evaluate_distribution(ModePoint(xv, d), variant).value
                        for xv in xs]
                worst = max(b - a for a, b in zip(vals, vals[1:]))
                add(f"monotonic-in-x/{variant.value}", x0, g,
                    max(0.0, worst), tol_map["monotonic-in-x"],
                    passed=worst < 0.0)

        if g < 50.0:
            p50 = ModePoint(50.0, d)
            diff50 = (deformed_distribution_zpe(p50).value
                      - deformed_distribution_no_zpe(p50).value)
            add("zpe-dominance-half-limit", 50.0, g, abs(diff50 - 0.5),
                tol_map["zpe-dominance-half-limit"])

        add("basis-recurrence", x0, g, _basis_recurrence_residual(d),
            tol_map["basis-recurrence"])

    # --- cross-gamma and fixed limit points --------------------------------
    distinct = sorted({d.gamma for d, _ in groups})
    if len(distinct) >= 2:
        g_top = distinct[-1]
        top_xs = sorted(p.x for d, pts in groups
                        if d.gamma == g_top for p in pts)
        for xv in top_xs:
            us = [xv * deformed_distribution_zpe(
                ModePoint(xv, DeformationParameter.from_gamma(gv))).value
                for gv in distinct]
            worst = max(a - b for a, b in zip(us, us[1:]))
            add("limit-chain-gamma", xv, g_top, max(0.0, worst),
                tol_map["limit-chain-gamma"], passed=worst < 0.0)

    d_ref = DeformationParameter.from_gamma(0.1)
    single_a = EnsembleSpec(3, (0.8,), d_ref)
    single_b = EnsembleSpec(3, (1.7,), d_ref)
    both = EnsembleSpec(3, (0.8, 1.7), d_ref)
    additivity_residual = max(
        abs(internal_energy(both)
            - (internal_energy(single_a) + internal_energy(single_b))),
        abs(thermodynamic_potential(both)
            - (thermodynamic_potential(single_a)
               + thermodynamic_potential(single_b))))
    add("additivity", 0.8, d_ref.gamma, additivity_residual,
        tol_map["additivity"])

    d_tiny = DeformationParameter.from_gamma(1e-8)
    worst_basis = max(abs(basis_number(n, d_tiny) - n) / n
                      for n in range(1, 101))
    add("basis-undeformed-limit", 1.0, d_tiny.gamma, worst_basis,
        tol_map["basis-undeformed-limit"])

    limit_xs = log_spaced(0.1, 20.0, 25)
    worst_nozpe = worst_zpe = worst_lnz = worst_energy = 0.0
    for xv in limit_xs:
        pt = ModePoint(xv, d_tiny)
        ref_nozpe = 1.0 / math.expm1(xv)
        worst_nozpe = max(worst_nozpe, abs(
            deformed_distribution_no_zpe(pt).value - ref_nozpe) / ref_nozpe)
        ref_zpe = 0.5 + ref_nozpe
        worst_zpe = max(worst_zpe, abs(
            deformed_distribution_zpe(pt).value - ref_zpe) / ref_zpe)
        ref_lnz = -math.log(2.0 * math.sinh(0.5 * xv))
        worst_lnz = max(worst_lnz, abs(
            log_partition_per_mode(pt, zpe=True, deformed=True) - ref_lnz)
            / abs(ref_lnz))
        ref_u = xv * ref_zpe
        worst_energy = max(worst_energy, abs(
            internal_energy(EnsembleSpec(1, (xv,), d_tiny)) - ref_u) / ref_u)
    add("undeformed-limit-no-zpe", limit_xs[0], d_tiny.gamma, worst_nozpe,
        tol_map["undeformed-limit-no-zpe"])
    add("undeformed-limit-zpe", limit_xs[0], d_tiny.gamma, worst_zpe,
        tol_map["undeformed-limit-zpe"])
    add("undeformed-limit-log-partition", limit_xs[0], d_tiny.gamma, worst_lnz,
        tol_map["undeformed-limit-log-partition"])
    add("undeformed-limit-energy", limit_xs[0], d_tiny.gamma, worst_energy,
        tol_map["undeformed-limit-energy"])

    p_low = ModePoint(50.0, DeformationParameter.from_gamma(0.01))
    add("low-t-limit", p_low.x, p_low.gamma,
        abs(2.0 * deformed_distribution_zpe(p_low).value - 1.0),
        tol_map["low-t-limit"])

    p_high = ModePoint(1e-3, DeformationParameter.from_gamma(1e-6))
    measured = abs(p_high.x * deformed_distribution_zpe(p_high).value - 1.0)
    add("high-t-limit", p_high.x, p_high.gamma, measured,
        tol_map["high-t-limit"])
    predicted = high_t_leading_correction(p_high.x, p_high.gamma)
    ratio = max(measured / predicted, predicted / measured)
    add("high-t-correction-match", p_high.x, p_high.gamma, ratio,
        tol_map["high-t-correction-match"])

    p_classical = ModePoint(1e-3)
    add("classical-limit-undeformed", p_classical.x, 0.0,
        abs(p_classical.x * deformed_distribution_zpe(p_classical).value - 1.0),
        tol_map["classical-limit-undeformed"])

    return VerificationReport.from_checks(checks)
