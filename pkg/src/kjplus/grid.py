"""The validation grid: representative orbits per regime, checked against
the closed forms."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from kjplus.homotopy import EventKind, scan_family
from kjplus.kepler import GUARD_BAND, Direction, TorusOrbitSpec, critical_eccentricity


def coprime_pairs(k_max: int) -> list[tuple[int, int]]:
    """Coprime (k, l) with max(k, l) <= k_max, excluding (1, 1)."""
    return [
        (k, l)
        for k in range(1, k_max + 1)
        for l in range(1, k_max + 1)
        if math.gcd(k, l) == 1 and (k, l) != (1, 1)
    ]


def representative_eccentricities(k: int, l: int, guard: float = GUARD_BAND) -> list[tuple[Direction, float]]:
    """Eccentricities well inside each regime of the (k, l) family.

    For k < l the point above the loop threshold is the midpoint of
    ``(e_-inf, 1)`` unless a tangency event sits at or below it, in which
    case the midpoint between the threshold and the first tangency is
    used instead.
    """
    crit = critical_eccentricity(k, l)
    if k > l:
        return [
            (Direction.DIRECT, 0.15 * crit),
            (Direction.DIRECT, 0.6 * crit),
            (Direction.RETROGRADE, 0.2),
            (Direction.RETROGRADE, 0.5),
        ]
    above = crit + 0.5 * (1.0 - crit)
    tangencies = [ev.eccentricity for ev in scan_family(k, l) if ev.kind is EventKind.II_PLUS]
    if tangencies and tangencies[0] - guard <= above:
        above = 0.5 * (crit + tangencies[0])
    return [
        (Direction.DIRECT, 0.5 * crit),
        (Direction.DIRECT, above),
        (Direction.RETROGRADE, 0.3),
    ]


@dataclass(frozen=True)
class CellResult:
    spec: TorusOrbitSpec
    regime: str | None
    numeric: tuple[int, Fraction, int] | None
    table: tuple | None
    layered: tuple | None
    double_points: int | None
    preimage_double_points: int | None
    preimage_components: int | None
    error: str | None = None

    def passed(self, oracle: str = "cases") -> bool:
        if self.numeric is None:
            return False
        return self.numeric == (self.table if oracle == "cases" else self.layered)


def run_cell(spec: TorusOrbitSpec, n_samples: int | None = None) -> CellResult:
    from kjplus.invariants import invariant_report

    try:
        r = invariant_report(spec, n_samples)
    except Exception as exc:  # reported per cell, never swallowed silently
        return CellResult(spec, None, None, None, None, None, None, None, error=f"{type(exc).__name__}: {exc}")
    return CellResult(
        spec,
        r.regime.value,
        r.triple,
        r.closed_form,
        r.closed_form_layered,
        r.double_point_count,
        r.preimage_double_points,
        r.preimage_components,
    )


def grid_specs(k_max: int) -> list[TorusOrbitSpec]:
    return [
        TorusOrbitSpec(k, l, e, d)
        for k, l in coprime_pairs(k_max)
        for d, e in representative_eccentricities(k, l)
    ]


def run_grid(k_max: int, n_samples: int | None = None, jobs: int = 1) -> list[CellResult]:
    specs = grid_specs(k_max)
    if jobs <= 1:
        return [run_cell(s, n_samples) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_cell, specs, [n_samples] * len(specs)))
