"""Events along the eccentricity family of T_{k,l}-type orbits."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from kjplus.closed_form import Regime, regime_of
from kjplus.kepler import (
    GUARD_BAND,
    Direction,
    TorusOrbitSpec,
    check_pair,
    critical_eccentricity,
    orbit_params,
)

DEFAULT_GRID = 200
REFINE_FACTOR = 10
REFINE_WINDOW = 0.05
EVENT_XTOL = 1e-9


class EventKind(str, enum.Enum):
    I0 = "I0"
    I_INFINITY = "IInfinity"
    I_MINUS_INFINITY = "IMinusInfinity"
    II_PLUS = "IIPlus"
    III = "III"
    DIRECT_TANGENCY = "DirectTangency"
    ENDPOINT = "Endpoint"


FORBIDDEN = frozenset({EventKind.III, EventKind.DIRECT_TANGENCY})


class ScanWarning(UserWarning):
    pass


@dataclass(frozen=True)
class HomotopyEvent:
    kind: EventKind
    eccentricity: float
    branch: Direction
    detail: str = ""

    def __post_init__(self) -> None:
        if self.kind in FORBIDDEN:
            raise AssertionError(f"{self.kind.value} events cannot occur in the rotating Kepler problem")

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "eccentricity": self.eccentricity,
            "branch": self.branch.value,
            "detail": self.detail,
        }


def tangency_phase(k: int, l: int, e: float) -> float:
    """Angular gap, in units of pi/k, between neighbouring strands on r = r_inv.

    On the direct branch a self-tangency can only sit on the circle
    ``r = sqrt(-L)``, where the rotating velocity is purely radial. The
    orbit meets that circle at the eccentric anomaly ``u*`` with
    ``a (1 - e cos u*) = r_inv``. The returned quantity measures how far
    the crossing point has drifted from the loop's symmetry ray; two
    strands touch when it passes through a positive integer. Returns
    ``nan`` when the orbit does not reach the circle.
    """
    p = orbit_params(TorusOrbitSpec(k, l, e, Direction.DIRECT))
    r_inv = math.sqrt(-p.L)
    if not p.r_min < r_inv < p.r_max:
        return math.nan
    cos_u = (1.0 - r_inv / p.a) / e
    u = math.acos(max(-1.0, min(1.0, cos_u)))
    t_star = (l / k) * (u - e * math.sin(u))
    nu = 2.0 * math.atan2(math.sqrt(1 + e) * math.sin(u / 2), math.sqrt(1 - e) * math.cos(u / 2))
    if k > l:
        gap = (math.pi * l / k - t_star) - (math.pi - nu)
    else:
        gap = abs(t_star - nu)
    return gap * k / math.pi


def _default_grid(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 2)[1:-1]


def _refined_grid(grid: np.ndarray, centers: list[float]) -> np.ndarray:
    extra = []
    step = (grid[-1] - grid[0]) / max(len(grid) - 1, 1) / REFINE_FACTOR
    for c in centers:
        lo, hi = max(grid[0], c - REFINE_WINDOW), min(grid[-1], c + REFINE_WINDOW)
        extra.append(np.arange(lo, hi, step))
    return np.unique(np.concatenate([grid, *extra])) if extra else grid


def _tangency_events(k: int, l: int, grid: np.ndarray) -> list[HomotopyEvent]:
    phase = np.array([tangency_phase(k, l, float(e)) for e in grid])
    events = []
    for i in range(len(grid) - 1):
        a, b = phase[i], phase[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        lo, hi = sorted((a, b))
        for n in range(max(1, math.floor(lo) + 1), math.floor(hi) + 1):
            if lo == n:
                continue
            e_star = brentq(lambda x: tangency_phase(k, l, x) - n, grid[i], grid[i + 1], xtol=EVENT_XTOL)
            p = orbit_params(TorusOrbitSpec(k, l, e_star, Direction.DIRECT))
            events.append(
                HomotopyEvent(
                    EventKind.II_PLUS,
                    e_star,
                    Direction.DIRECT,
                    f"inverse self-tangency of order {n} on r_inv={math.sqrt(-p.L):.6f}",
                )
            )
    return events


def scan_family(k: int, l: int, e_grid: np.ndarray | None = None) -> list[HomotopyEvent]:
    """All events of the e-family, sorted by (eccentricity, branch)."""
    check_pair(k, l)
    if k == l:
        raise ValueError("k = l has no e-family")
    grid = _default_grid(DEFAULT_GRID) if e_grid is None else np.asarray(e_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0) or grid[0] <= 0 or grid[-1] >= 1:
        raise ValueError("e_grid must be a strictly increasing grid inside (0, 1)")
    crit = critical_eccentricity(k, l)
    events = [
        HomotopyEvent(EventKind.ENDPOINT, 0.0, Direction.DIRECT, f"{abs(k - l)}-fold covered direct circle"),
        HomotopyEvent(EventKind.ENDPOINT, 0.0, Direction.RETROGRADE, f"{k + l}-fold covered retrograde circle"),
    ]
    if k > l:
        events.append(
            HomotopyEvent(EventKind.I_INFINITY, crit, Direction.DIRECT, f"{k} exterior loops born at aphelia")
        )
    else:
        events.append(
            HomotopyEvent(EventKind.I_MINUS_INFINITY, crit, Direction.DIRECT, f"{k} interior loops born at perihelia")
        )
    coarse = _tangency_events(k, l, grid)
    fine = _tangency_events(k, l, _refined_grid(grid, [crit] + [ev.eccentricity for ev in coarse]))
    if len(fine) != len(coarse):
        warnings.warn(
            f"tangency events changed from {len(coarse)} to {len(fine)} under refinement; grid is under-resolved",
            ScanWarning,
            stacklevel=2,
        )
    events.extend(fine)
    events.append(HomotopyEvent(EventKind.I0, 1.0, Direction.DIRECT, "collision; family passes to the retrograde branch"))
    order = {EventKind.ENDPOINT: 0}
    events.sort(key=lambda ev: (ev.eccentricity, order.get(ev.kind, 1), ev.branch.value))
    return events


@dataclass
class ConstancyReport:
    k: int
    l: int
    samples: dict[tuple[str, float], tuple] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def constancy_check(
    k: int,
    l: int,
    e_samples: dict[Direction | str, list[float]],
    n_samples: int | None = None,
    *,
    guard: float = GUARD_BAND,
) -> ConstancyReport:
    """Check that the invariants stay put where the family cannot change them.

    Samples are grouped into classes: the retrograde branch with, for
    k < l, the direct orbits above the loop threshold; and the direct
    orbits below it (for k > l, all direct orbits). J+ must be constant
    inside each (direction, regime) group; J1 and J2 must be constant
    inside each class, and for k > l across both classes.
    """
    from kjplus.invariants import invariant_report

    report = ConstancyReport(k, l)
    groups: dict[tuple, list] = {}
    classes: dict[str, list] = {}
    for raw_dir, values in e_samples.items():
        direction = Direction.parse(raw_dir)
        for e in values:
            spec = TorusOrbitSpec(k, l, float(e), direction)
            regime = regime_of(spec, guard)
            r = invariant_report(spec, n_samples, guard=guard)
            report.samples[(direction.value, float(e))] = r.triple
            groups.setdefault((direction, regime), []).append((e, r.triple))
            cls = "all" if k > l else ("below" if regime is Regime.DIRECT_BELOW else "above-or-retro")
            classes.setdefault(cls, []).append((direction.value, e, r.triple[1:]))
    for key, rows in groups.items():
        values = {t[0] for _, t in rows}
        if len(values) > 1:
            report.violations.append(f"J+ varies within {key[0].value}/{key[1].value}: {rows}")
    for cls, rows in classes.items():
        values = {t for *_, t in rows}
        if len(values) > 1:
            report.violations.append(f"(J1, J2) varies within class {cls}: {rows}")
    return report
