"""T_{k,l}-type orbits of the rotating Kepler problem in closed form.

Units are the usual normalized ones: gravitational parameter 1 and a
frame rotating with unit angular velocity, so the Hamiltonian is
``H = E + L`` with Kepler energy ``E`` and angular momentum ``L``.
Every orbit is gauged so that the underlying Kepler ellipse has its
perihelion on the positive x-axis at ``t = 0``.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from kjplus._roots import bracketed_root
from kjplus.curve import Point2, PolylineCurve

CRITICAL_JACOBI = -1.5
GUARD_BAND = 1e-3


class InvalidSpecError(ValueError):
    pass


class KeplerConvergenceError(RuntimeError):
    pass


class DegenerateOrbitWarning(UserWarning):
    """The orbit is close to a cusp, collision or circular endpoint."""


class Direction(str, enum.Enum):
    DIRECT = "direct"
    RETROGRADE = "retrograde"

    @classmethod
    def parse(cls, value: str | Direction) -> Direction:
        if isinstance(value, Direction):
            return value
        v = value.strip().lower()
        for d in cls:
            if d.value.startswith(v) and v:
                return d
        raise InvalidSpecError(f"unknown direction {value!r}")

    @property
    def sign(self) -> int:
        """Sign of the angular momentum."""
        return -1 if self is Direction.DIRECT else 1


def check_pair(k: int, l: int) -> None:
    if int(k) != k or int(l) != l or k < 1 or l < 1:
        raise InvalidSpecError(f"k and l must be positive integers, got ({k}, {l})")
    if math.gcd(int(k), int(l)) != 1:
        raise InvalidSpecError(f"k and l must be coprime, got ({k}, {l})")
    if k == 1 and l == 1:
        raise InvalidSpecError("(k, l) = (1, 1) is the Kepler ellipse family and is excluded")


@dataclass(frozen=True)
class TorusOrbitSpec:
    k: int
    l: int
    e: float
    direction: Direction = Direction.DIRECT

    def __post_init__(self) -> None:
        check_pair(self.k, self.l)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        e = float(self.e)
        if not (0.0 <= e < 1.0) or math.isnan(e):
            raise InvalidSpecError(f"eccentricity must lie in [0, 1), got {self.e}")
        object.__setattr__(self, "e", e)

    @property
    def winding(self) -> int:
        """Winding number about the origin."""
        if self.direction is Direction.DIRECT:
            return self.l - self.k
        return self.k + self.l


@dataclass(frozen=True)
class OrbitParams:
    spec: TorusOrbitSpec
    E: float
    a: float
    L: float
    r_min: float
    r_max: float
    period: float
    c: float

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def l(self) -> int:
        return self.spec.l

    @property
    def e(self) -> float:
        return self.spec.e

    @property
    def kepler_period(self) -> float:
        return 2.0 * math.pi * self.spec.l / self.spec.k


def torus_energy(k: int, l: int) -> float:
    if k < 1 or l < 1:
        raise InvalidSpecError("k and l must be positive")
    return -0.5 * (k / l) ** (2.0 / 3.0)


def orbit_params(spec: TorusOrbitSpec) -> OrbitParams:
    E = torus_energy(spec.k, spec.l)
    e = spec.e
    L = spec.direction.sign * math.sqrt((1.0 - e * e) / (-2.0 * E))
    return OrbitParams(
        spec=spec,
        E=E,
        a=-1.0 / (2.0 * E),
        L=L,
        r_min=(1.0 - e) / (-2.0 * E),
        r_max=(1.0 + e) / (-2.0 * E),
        period=2.0 * math.pi * spec.l,
        c=E + L,
    )


def solve_kepler(M: float, e: float, maxiter: int = 100) -> float:
    """Solve ``u - e sin u = M`` for the eccentric anomaly ``u``."""
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must lie in [0, 1), got {e}")
    if e == 0.0:
        return float(M)
    lo, hi = M - e, M + e
    u = M + e * math.sin(M)
    for _ in range(maxiter):
        f = u - e * math.sin(u) - M
        if abs(f) < 1e-14:
            return u
        if f > 0:
            hi = min(hi, u)
        else:
            lo = max(lo, u)
        un = u - f / (1.0 - e * math.cos(u))
        if not lo <= un <= hi:
            un = 0.5 * (lo + hi)
        if un == u:
            return u
        u = un
    raise KeplerConvergenceError(f"Kepler equation did not converge for M={M}, e={e}")


def eccentric_anomaly(M: np.ndarray, e: float, maxiter: int = 100) -> np.ndarray:
    """Vectorized :func:`solve_kepler`."""
    M = np.asarray(M, dtype=float)
    if e == 0.0:
        return M.copy()
    lo, hi = M - e, M + e
    u = M + e * np.sin(M)
    for _ in range(maxiter):
        f = u - e * np.sin(u) - M
        if np.max(np.abs(f), initial=0.0) < 1e-14:
            return u
        hi = np.where(f > 0, np.minimum(hi, u), hi)
        lo = np.where(f <= 0, np.maximum(lo, u), lo)
        un = u - f / (1.0 - e * np.cos(u))
        bad = (un < lo) | (un > hi)
        u = np.where(bad, 0.5 * (lo + hi), un)
    f = u - e * np.sin(u) - M
    if np.max(np.abs(f), initial=0.0) > 1e-12:
        raise KeplerConvergenceError(f"Kepler equation did not converge for e={e}")
    return u


def _inertial(t: np.ndarray, params: OrbitParams) -> np.ndarray:
    e, a = params.e, params.a
    sigma = 1.0 if params.L >= 0 else -1.0
    u = eccentric_anomaly(params.k / params.l * np.asarray(t, dtype=float), e)
    return a * (np.cos(u) - e) + 1j * sigma * a * math.sqrt(1.0 - e * e) * np.sin(u)


def inertial_position(t: float, params: OrbitParams) -> Point2:
    z = complex(_inertial(np.array([t]), params)[0])
    return (z.real, z.imag)


def rotating_positions(t: np.ndarray, params: OrbitParams) -> np.ndarray:
    """Complex positions ``exp(i t) * gamma(t)`` of the rotating-frame orbit."""
    t = np.asarray(t, dtype=float)
    return np.exp(1j * t) * _inertial(t, params)


def rotating_position(t: float, params: OrbitParams) -> Point2:
    z = complex(rotating_positions(np.array([t]), params)[0])
    return (z.real, z.imag)


def default_samples(k: int, l: int) -> int:
    override = os.environ.get("KJPLUS_SAMPLES")
    if override:
        return int(override)
    return max(4096, 1024 * k * (abs(k - l) + l))


def proximity_warnings(spec: TorusOrbitSpec, band: float = GUARD_BAND) -> list[str]:
    msgs = []
    if spec.k != spec.l and spec.direction is Direction.DIRECT:
        crit = critical_eccentricity(spec.k, spec.l)
        if abs(spec.e - crit) < band:
            msgs.append(f"e={spec.e} is within {band} of the loop-birth threshold {crit:.6f}")
    if abs(spec.e - 1.0) < band:
        msgs.append(f"e={spec.e} is within {band} of the collision orbit e=1")
    return msgs


def sample_orbit(
    spec: TorusOrbitSpec, n_samples: int | None = None, *, guard: float = GUARD_BAND
) -> PolylineCurve:
    """Polyline through ``alpha(t_i)`` with ``t_i`` uniform on ``[0, 2 pi l)``."""
    n = default_samples(spec.k, spec.l) if n_samples is None else int(n_samples)
    if n < 8:
        raise ValueError(f"n_samples too small: {n}")
    for msg in proximity_warnings(spec, guard):
        warnings.warn(msg, DegenerateOrbitWarning, stacklevel=2)
    params = orbit_params(spec)
    t = params.period * np.arange(n) / n
    z = rotating_positions(t, params)
    z[0] = params.r_min  # exact perihelion start
    return PolylineCurve.from_complex(z, label=f"T_{spec.k},{spec.l} {spec.direction.value} e={spec.e:g}")


def approx_orbit(spec: TorusOrbitSpec, t: float | np.ndarray) -> complex | np.ndarray:
    """First-order-in-``e`` epicycle approximation of the orbit.

    The rotation sign follows the historical convention (minus for direct),
    which mirrors the exact parametrization; mirror images share all
    orientation-free invariants.
    """
    p = orbit_params(spec)
    nu = spec.k / spec.l
    t_arr = np.asarray(t, dtype=float)
    zeta = p.a * (-2.0 * spec.e + (1.0 + spec.e * np.cos(nu * t_arr)) * np.exp(1j * nu * t_arr))
    sign = 1.0 if spec.direction is Direction.RETROGRADE else -1.0
    z = np.exp(1j * sign * t_arr) * zeta
    return complex(z) if np.ndim(z) == 0 else z


def approx_curve(spec: TorusOrbitSpec, n_samples: int | None = None) -> PolylineCurve:
    n = default_samples(spec.k, spec.l) if n_samples is None else int(n_samples)
    t = 2.0 * math.pi * spec.l * np.arange(n) / n
    return PolylineCurve.from_complex(approx_orbit(spec, t), label="approx")


def critical_eccentricity(k: int, l: int) -> float:
    """Eccentricity at which direct orbits touch the Hill boundary.

    For ``k > l`` this solves ``(1+e)^3 = (k/l)^2 (1-e)``, for ``k < l``
    it solves ``(1-e)^3 = (k/l)^2 (1+e)``.
    """
    if k == l:
        raise InvalidSpecError("no loop-birth threshold when k == l")
    q = (k / l) ** 2
    if k > l:
        f = lambda e: (1 + e) ** 3 - q * (1 - e)  # noqa: E731
        df = lambda e: 3 * (1 + e) ** 2 + q  # noqa: E731
    else:
        f = lambda e: (1 - e) ** 3 - q * (1 + e)  # noqa: E731
        df = lambda e: -3 * (1 - e) ** 2 - q  # noqa: E731
    return bracketed_root(f, 0.0, 1.0, df)


def threshold_residual(k: int, l: int, e: float) -> float:
    """Residual of the defining cubic ``8(1 -+ e) E^3 + (1 +- e)^3``."""
    E = torus_energy(k, l)
    if k > l:
        return 8 * (1 - e) * E**3 + (1 + e) ** 3
    return 8 * (1 + e) * E**3 + (1 - e) ** 3


def effective_potential(r: float) -> float:
    return -1.0 / r - 0.5 * r * r


def hill_radii(c: float) -> tuple[float, float]:
    """Radii ``r1 < 1 < r2`` of the Hill boundary circles at Jacobi energy ``c``."""
    if c >= CRITICAL_JACOBI:
        raise ValueError(
            f"c={c} is not below the critical Jacobi energy -3/2; "
            "the Hill region is the whole punctured plane"
        )
    g = lambda r: effective_potential(r) - c  # noqa: E731
    dg = lambda r: 1.0 / (r * r) - r  # noqa: E731
    # g -> -inf at 0+, g(1) = c_J - c > 0, g -> -inf at infinity
    r1 = bracketed_root(g, min(0.5, -0.5 / c), 1.0, dg)
    hi = 2.0
    while g(hi) > 0:
        hi *= 2.0
    r2 = bracketed_root(g, 1.0, hi, dg)
    return r1, r2


def circular_kepler_energies(c: float) -> tuple[float, float, float]:
    """Kepler energies of the circular orbits at Jacobi energy ``c < -3/2``.

    Returns ``(E_retro, E_direct, E_direct_u)``: the roots of
    ``2E(c-E)^2 + 1 = 0`` ordered ``E_retro < E_direct < -1/2 < E_direct_u < 0``.
    """
    if c >= CRITICAL_JACOBI:
        raise ValueError(f"c={c} is not below the critical Jacobi energy -3/2")
    p = lambda E: 2 * E * (c - E) ** 2 + 1  # noqa: E731
    dp = lambda E: 2 * (c - E) ** 2 - 4 * E * (c - E)  # noqa: E731
    # p(-inf) < 0, p(c) = 1, p(-1/2) = 1 - (c + 1/2)^2 < 0, p(0) = 1
    lo = c - 1.0
    while p(lo) > 0:
        lo = c + 2 * (lo - c)
    E1 = bracketed_root(p, lo, c, dp)
    E2 = bracketed_root(p, c, -0.5, dp)
    E3 = bracketed_root(p, -0.5, 0.0, dp)
    return E1, E2, E3


def circular_angular_momenta(c: float) -> tuple[float, float, float]:
    E1, E2, E3 = circular_kepler_energies(c)
    return (
        1.0 / math.sqrt(-2 * E1),
        -1.0 / math.sqrt(-2 * E2),
        -1.0 / math.sqrt(-2 * E3),
    )


@dataclass(frozen=True)
class CircularData:
    tau_direct: float
    tau_retro: float
    c_direct: float
    c_retro: float
    omega_direct: float
    omega_retro: float
    cover_direct: int
    cover_retro: int


def circular_data(k: int, l: int) -> CircularData:
    """Circular orbits at both ends of the T_{k,l} family."""
    if k == l:
        raise InvalidSpecError("k == l has no direct circular endpoint")
    E = torus_energy(k, l)
    return CircularData(
        tau_direct=2 * math.pi * l / abs(k - l),
        tau_retro=2 * math.pi * l / (k + l),
        c_direct=E - 1 / math.sqrt(-2 * E),
        c_retro=E + 1 / math.sqrt(-2 * E),
        omega_direct=1 - k / l,
        omega_retro=1 + k / l,
        cover_direct=abs(k - l),
        cover_retro=k + l,
    )


def tangency_radius(params: OrbitParams) -> float | None:
    """Radius of the circle where the angular velocity vanishes, if any."""
    if params.L >= 0:
        return None
    return math.sqrt(-params.L)
