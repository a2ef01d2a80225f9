"""The Stark-Zeeman invariants J1 and J2 of curves in the punctured plane."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from kjplus.closed_form import Regime, closed_form_triple, regime_of
from kjplus.curve import PolylineCurve
from kjplus.kepler import InvalidSpecError, TorusOrbitSpec, sample_orbit
from kjplus.topology import (
    DEDUP_RELATIVE,
    Arrangement,
    TopologyError,
    build_arrangement,
    j_plus,
    winding_at,
)

MAX_BRANCH_STEP = np.pi / 4


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


def _check_avoids_origin(curve: PolylineCurve) -> None:
    if curve.radii().min() <= DEDUP_RELATIVE * curve.diameter:
        raise TopologyError("curve passes through or too near the origin")


def origin_winding(curve: PolylineCurve) -> int:
    _check_avoids_origin(curve)
    return winding_at(curve, (0.0, 0.0))


def j1(curve: PolylineCurve, arrangement: Arrangement | None = None) -> Fraction:
    """``J+ + w0^2 / 2`` with ``w0`` the winding number around the origin."""
    w0 = origin_winding(curve)
    arr = build_arrangement(curve) if arrangement is None else arrangement
    return j_plus(arr) + Fraction(w0 * w0, 2)


def _densify_angles(z: np.ndarray, max_step: float) -> np.ndarray:
    """Subdivide segments of the closed polygon ``z`` that turn too far about 0."""
    nxt = np.roll(z, -1)
    step = np.abs(np.angle(nxt / z))
    if step.max() < max_step:
        return z
    pieces = []
    for a, b, s in zip(z, nxt, step):
        m = int(np.ceil(s / (0.5 * max_step))) if s >= max_step else 1
        pieces.append(a + (b - a) * np.arange(m) / m)
    return np.concatenate(pieces)


def levi_civita_preimage(curve: PolylineCurve) -> list[PolylineCurve]:
    """Preimage of ``curve`` under the squaring map ``v -> v^2``.

    The square root is tracked continuously along the curve. If the lift
    closes after one traversal the preimage is two curves related by
    ``v -> -v``; otherwise one traversal continues into the other and the
    preimage is a single curve with twice as many vertices.
    """
    _check_avoids_origin(curve)
    z = _densify_angles(curve.as_complex(), MAX_BRANCH_STEP)
    steps = np.angle(np.roll(z, -1) / z)
    if np.abs(steps).max() >= MAX_BRANCH_STEP:
        raise TopologyError("square-root branch is ambiguous; curve is under-sampled around the origin")
    theta = np.angle(z[0]) + np.concatenate([[0.0], np.cumsum(steps[:-1])])
    total = theta[-1] + steps[-1] - theta[0]
    turns = int(round(total / (2 * np.pi)))
    v = np.sqrt(np.abs(z)) * np.exp(0.5j * theta)
    if turns % 2 == 0:
        first, second = v, -v
        if not 0.0 <= np.angle(first[0]) < np.pi:
            first, second = second, first
        return [
            PolylineCurve.from_complex(first, label="preimage-0"),
            PolylineCurve.from_complex(second, label="preimage-1"),
        ]
    return [PolylineCurve.from_complex(np.concatenate([v, -v]), label="preimage")]


def j2(curve: PolylineCurve, *, check_components: bool = False) -> int:
    """J+ of the Levi-Civita preimage (one component when it splits)."""
    comps = levi_civita_preimage(curve)
    value = j_plus(build_arrangement(comps[0]))
    if check_components and len(comps) == 2:
        other = j_plus(build_arrangement(comps[1]))
        if other != value:
            raise TopologyError(f"preimage components disagree: J+ = {value} and {other}")
    return value


@dataclass(frozen=True)
class InvariantReport:
    j_plus: int
    w0: int
    j1: Fraction
    j2: int
    double_point_count: int
    face_count: int
    preimage_components: int
    preimage_double_points: int
    preimage_winding: int
    spec: TorusOrbitSpec | None = None
    regime: Regime | None = None
    closed_form: tuple[int, Fraction, int | Fraction] | None = None
    closed_form_layered: tuple[int, Fraction, int] | None = None

    def __post_init__(self) -> None:
        if self.j1 != self.j_plus + Fraction(self.w0 * self.w0, 2):
            raise ArithmeticError("J1 does not equal J+ + w0^2/2")
        if self.w0 % 2 and (self.preimage_components != 1 or self.j2 != 2 * self.j1 - 1):
            raise ArithmeticError("odd winding must give a connected preimage with J2 = 2 J1 - 1")
        if self.w0 % 2 == 0 and self.preimage_components != 2:
            raise ArithmeticError("even winding must give a two-component preimage")

    @property
    def triple(self) -> tuple[int, Fraction, int]:
        return (self.j_plus, self.j1, self.j2)

    @property
    def match(self) -> bool | None:
        if self.closed_form is None:
            return None
        return self.triple == self.closed_form

    @property
    def match_layered(self) -> bool | None:
        if self.closed_form_layered is None:
            return None
        return self.triple == self.closed_form_layered


def curve_report(curve: PolylineCurve) -> InvariantReport:
    return _report(curve)


def _report(
    curve: PolylineCurve,
    spec: TorusOrbitSpec | None = None,
    regime: Regime | None = None,
) -> InvariantReport:
    try:
        arr = build_arrangement(curve)
        jp = j_plus(arr)
    except Exception as exc:
        raise PipelineError("arrangement", exc) from exc
    try:
        w0 = origin_winding(curve)
    except Exception as exc:
        raise PipelineError("winding", exc) from exc
    try:
        comps = levi_civita_preimage(curve)
        pre = build_arrangement(comps[0])
        jj2 = j_plus(pre)
        pre_w = winding_at(comps[0], (0.0, 0.0))
    except Exception as exc:
        raise PipelineError("preimage", exc) from exc
    closed = layered = None
    if spec is not None and regime is not None:
        closed = closed_form_triple(spec.k, spec.l, regime)
        layered = closed_form_triple(spec.k, spec.l, regime, corrected=True)
    return InvariantReport(
        j_plus=jp,
        w0=w0,
        j1=jp + Fraction(w0 * w0, 2),
        j2=jj2,
        double_point_count=arr.n_double_points,
        face_count=arr.n_faces,
        preimage_components=len(comps),
        preimage_double_points=pre.n_double_points,
        preimage_winding=pre_w,
        spec=spec,
        regime=regime,
        closed_form=closed,
        closed_form_layered=layered,
    )


def invariant_report(
    spec: TorusOrbitSpec, n_samples: int | None = None, *, guard: float = 1e-3
) -> InvariantReport:
    """Sample the orbit, compute J+, J1, J2 and attach the closed-form values."""
    if spec.e < guard:
        raise InvalidSpecError(
            f"e={spec.e} is within {guard} of the circular endpoint; multiply covered circles are not generic"
        )
    if 1.0 - spec.e < guard:
        raise InvalidSpecError(f"e={spec.e} is within {guard} of the collision orbit")
    regime = regime_of(spec, guard)
    try:
        curve = sample_orbit(spec, n_samples, guard=guard)
    except Exception as exc:
        raise PipelineError("sampling", exc) from exc
    return _report(curve, spec, regime)
