"""Closed-form values of J+, J1 and J2 for T_{k,l}-type orbits.

All values are exact: J+ and J2 are ints, J1 is a ``Fraction`` with
denominator 1 or 2.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from kjplus.kepler import (
    GUARD_BAND,
    Direction,
    InvalidSpecError,
    TorusOrbitSpec,
    check_pair,
    critical_eccentricity,
)


class Regime(str, enum.Enum):
    DIRECT_BELOW = "direct-below-threshold"
    DIRECT_ABOVE = "direct-above-threshold"
    RETRO = "retrograde"


class GuardBandError(InvalidSpecError):
    pass


def regime_of(spec: TorusOrbitSpec, guard: float = GUARD_BAND) -> Regime:
    if spec.direction is Direction.RETROGRADE:
        return Regime.RETRO
    crit = critical_eccentricity(spec.k, spec.l)
    if abs(spec.e - crit) < guard:
        raise GuardBandError(
            f"e={spec.e} is within the guard band {guard} of the threshold {crit:.6f} "
            f"for ({spec.k}, {spec.l}); the orbit is near a cusp"
        )
    return Regime.DIRECT_BELOW if spec.e < crit else Regime.DIRECT_ABOVE


def winding_formula(k: int, l: int, regime: Regime) -> int:
    return k + l if regime is Regime.RETRO else l - k


def _uses_retro_family(k: int, l: int, regime: Regime) -> bool:
    """True where the k < l formulas coincide with the retrograde ones."""
    return regime is Regime.RETRO or (k < l and regime is Regime.DIRECT_ABOVE)


def jplus_formula(k: int, l: int, regime: Regime) -> int:
    check_pair(k, l)
    if regime is Regime.RETRO:
        return 1 - k - k * l - l * l
    if k > l or regime is Regime.DIRECT_ABOVE:
        return 1 - k + k * l - l * l
    return 1 - k - 2 * k * k + 3 * k * l - l * l


def j1_formula(k: int, l: int, regime: Regime) -> Fraction:
    check_pair(k, l)
    if k > l or _uses_retro_family(k, l, regime):
        return 1 - k + Fraction(k * k - l * l, 2)
    return 1 - k + Fraction(-3 * k * k + 4 * k * l - l * l, 2)


def j2_formula(k: int, l: int, regime: Regime) -> Fraction | int:
    """J2 from the six-case polynomial table (direction, threshold, parity).

    For ``k < l`` with even winding these polynomials disagree with the
    layer sum they are meant to simplify (the first is odd for ``(3, 5)``,
    which no J+ value can be); :func:`j2_layer_formula` gives the summed
    values. Integral results come back as int, others as ``Fraction``.
    """
    check_pair(k, l)
    odd = (k + l) % 2 == 1
    if k > l:
        value = (k - 1) ** 2 - l * l if odd else 1 - k + Fraction(k * k - l * l, 4)
    elif _uses_retro_family(k, l, regime):
        value = (k - 1) ** 2 - l * l if odd else 1 - k - Fraction(k * l + l * l, 2)
    elif odd:
        value = 1 - 2 * k - 3 * k * k + 4 * k * l - l * l
    else:
        value = 1 - k - k * k + Fraction(3 * k * l - l * l, 2)
    value = Fraction(value)
    return int(value) if value.denominator == 1 else value


def j2_layer_formula(k: int, l: int, regime: Regime) -> int:
    """J2 from the layered structure of the Levi-Civita preimage.

    A preimage component winding ``m`` times around the origin with
    ``m - 1`` layers of ``c`` faces gives ``J+ = 1 + c (m - 1) - m^2``.
    Odd winding: one component, ``m = |w|`` and ``c = 2k``. Even winding:
    two components, ``m = |w| / 2`` and ``c = k``. Above the threshold for
    ``k < l`` the family value equals the retrograde one.
    """
    check_pair(k, l)
    w = abs(winding_formula(k, l, Regime.RETRO if _uses_retro_family(k, l, regime) else Regime.DIRECT_BELOW))
    if w % 2:
        m, c = w, 2 * k
    else:
        m, c = w // 2, k
    return 1 + c * (m - 1) - m * m


def closed_form_triple(
    k: int, l: int, regime: Regime, *, corrected: bool = False
) -> tuple[int, Fraction, Fraction | int]:
    j2 = j2_layer_formula(k, l, regime) if corrected else j2_formula(k, l, regime)
    return jplus_formula(k, l, regime), j1_formula(k, l, regime), j2
