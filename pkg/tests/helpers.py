"""High-precision reference implementations for the tests.

Everything here evaluates the defining formulas directly with mpmath at
40 significant digits and shares no code with the package.  Series
references are brute-force partial sums with enough terms that the
discarded tail is far below double precision.
"""

import mpmath as mp

mp.mp.dps = 40


def basis_ref(n: int, gamma: float) -> float:
    if gamma == 0.0:
        return float(n)
    g = mp.mpf(gamma)
    return float(mp.sinh(n * g) / mp.sinh(g))


def occupation_ref(n: int, x: float) -> float:
    # normalized Boltzmann weight of level n; identical with and without
    # the zero-point shift since it cancels in the normalization
    xm = mp.mpf(x)
    return float((1 - mp.e**-xm) * mp.e**(-n * xm))


def undeformed_ref(x: float, zpe: bool) -> float:
    xm = mp.mpf(x)
    f = 1 / mp.expm1(xm)
    if zpe:
        f += mp.mpf(1) / 2
    return float(f)


def deformed_no_zpe_ref(x: float, gamma: float) -> float:
    xm, g = mp.mpf(x), mp.mpf(gamma)
    num = mp.e**-xm * (1 - mp.e**-xm)
    den = (1 - mp.e**(g - xm)) * (1 - mp.e**(-g - xm))
    return float(num / den)


def deformed_zpe_ref(x: float, gamma: float) -> float:
    xm, g = mp.mpf(x), mp.mpf(gamma)
    return float(mp.sinh(xm) / (2 * (mp.cosh(xm) - mp.cosh(g))))


def fugacity_ref(x: float, gamma: float, z: float) -> float:
    # the four-term partial-fraction sum collapses to the zero-chemical-
    # potential form evaluated at x - ln z
    return deformed_zpe_ref(float(mp.mpf(x) - mp.log(mp.mpf(z))), gamma)


def series_ref(x: float, gamma: float, zpe: bool, terms: int = 800) -> float:
    """Brute-force partial sum of the defining occupation series."""
    xm, g = mp.mpf(x), mp.mpf(gamma)

    def bracket(n):
        if gamma == 0.0:
            return mp.mpf(n)
        return mp.sinh(n * g) / mp.sinh(g)

    total = mp.mpf(0)
    norm = 1 - mp.e**-xm
    for n in range(terms):
        w = norm * mp.e**(-n * xm)
        if zpe:
            total += (bracket(n + 1) + bracket(n)) / 2 * w
        else:
            total += bracket(n) * w
    return float(total)


def log_partition_ref(x: float, gamma: float, zpe: bool,
                      deformed: bool) -> float:
    xm, g = mp.mpf(x), mp.mpf(gamma)
    if not deformed:
        if zpe:
            return float(-mp.log(2 * mp.sinh(xm / 2)))
        return float(xm - mp.log(mp.expm1(xm)))
    if not zpe:
        raise ValueError("no reference for the deformed no-ZPE partition")
    return float(-mp.log(2 * (mp.cosh(xm) - mp.cosh(g))) / 2)


def internal_energy_ref(n_osc: int, xs, gamma: float) -> float:
    total = mp.mpf(0)
    for x in xs:
        xm, g = mp.mpf(x), mp.mpf(gamma)
        total += n_osc * xm * mp.sinh(xm) / (2 * (mp.cosh(xm) - mp.cosh(g)))
    return float(total)
