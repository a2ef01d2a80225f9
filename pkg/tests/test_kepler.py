import math
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from kjplus.kepler import (
    DegenerateOrbitWarning,
    Direction,
    InvalidSpecError,
    TorusOrbitSpec,
    approx_orbit,
    circular_angular_momenta,
    circular_data,
    circular_kepler_energies,
    critical_eccentricity,
    default_samples,
    effective_potential,
    hill_radii,
    inertial_position,
    orbit_params,
    rotating_position,
    sample_orbit,
    solve_kepler,
    tangency_radius,
    threshold_residual,
    torus_energy,
)


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestTorusEnergy:
    def test_equal_pair(self):
        assert torus_energy(1, 1) == -0.5

    def test_five_two(self):
        assert torus_energy(5, 2) == pytest.approx(-0.92101, abs=1e-5)

    def test_three_five(self):
        # -0.5 * 0.6**(2/3)
        assert torus_energy(3, 5) == pytest.approx(-0.35569, abs=1e-5)
        assert torus_energy(3, 5) > -0.5

    @pytest.mark.parametrize("k,l", [(2, 1), (5, 2), (1, 3), (4, 7)])
    def test_trichotomy(self, k, l):
        assert (torus_energy(k, l) < -0.5) == (k > l)


class TestSpecValidation:
    def test_rejects_non_coprime(self):
        with pytest.raises(InvalidSpecError, match="coprime"):
            TorusOrbitSpec(4, 2, 0.1)

    def test_rejects_one_one(self):
        with pytest.raises(InvalidSpecError):
            TorusOrbitSpec(1, 1, 0.1)

    @pytest.mark.parametrize("e", [-0.1, 1.0, 1.5, float("nan")])
    def test_rejects_bad_eccentricity(self, e):
        with pytest.raises(InvalidSpecError):
            TorusOrbitSpec(5, 2, e)

    def test_direction_parsing(self):
        assert TorusOrbitSpec(5, 2, 0.1, "retro").direction is Direction.RETROGRADE
        with pytest.raises(InvalidSpecError):
            Direction.parse("sideways")


class TestOrbitParams:
    def test_five_two_direct(self):
        p = orbit_params(TorusOrbitSpec(5, 2, 0.2, Direction.DIRECT))
        assert p.a == pytest.approx(0.54289, abs=2e-5)
        assert p.L == pytest.approx(-0.72193, abs=2e-5)
        assert p.r_min == pytest.approx(0.43431, abs=2e-5)
        assert p.r_max == pytest.approx(0.65147, abs=2e-5)
        assert p.c == pytest.approx(-1.64294, abs=2e-5)
        # independent route to |L|
        assert p.L**2 == pytest.approx((0.2**2 - 1) / (2 * p.E), rel=1e-14)

    def test_retrograde_flips_only_L(self):
        d = orbit_params(TorusOrbitSpec(5, 2, 0.2, Direction.DIRECT))
        r = orbit_params(TorusOrbitSpec(5, 2, 0.2, Direction.RETROGRADE))
        assert (r.a, r.r_min, r.r_max) == (d.a, d.r_min, d.r_max)
        assert r.L == -d.L > 0

    def test_circular(self):
        p = orbit_params(TorusOrbitSpec(3, 5, 0.0))
        assert p.r_min == p.r_max == p.a

    def test_period(self):
        assert orbit_params(TorusOrbitSpec(3, 5, 0.3)).period == pytest.approx(10 * math.pi)


class TestSolveKepler:
    def test_zero_mean_anomaly(self):
        assert solve_kepler(0.0, 0.7) == 0.0

    def test_circular(self):
        assert solve_kepler(1.234, 0.0) == 1.234

    def test_against_bisection(self):
        u = solve_kepler(math.pi / 2, 0.5)
        oracle = bisect(lambda x: x - 0.5 * math.sin(x) - math.pi / 2, 0.0, math.pi)
        assert u == pytest.approx(oracle, abs=1e-12)
        assert u == pytest.approx(2.02098, abs=1e-5)

    @pytest.mark.parametrize("e", [0.0, 0.3, 0.9, 0.999])
    def test_residual_and_monotone(self, e):
        M = np.linspace(-10, 10, 401)
        u = np.array([solve_kepler(m, e) for m in M])
        assert np.max(np.abs(u - e * np.sin(u) - M)) < 1e-12
        assert np.all(np.diff(u) > 0)

    def test_rejects_bad_e(self):
        with pytest.raises(ValueError):
            solve_kepler(1.0, 1.0)


class TestPositions:
    P = orbit_params(TorusOrbitSpec(5, 2, 0.3))

    def test_perihelion_start(self):
        x, y = inertial_position(0.0, self.P)
        assert (x, y) == pytest.approx((self.P.r_min, 0.0))

    def test_aphelion_half_period(self):
        x, y = inertial_position(self.P.kepler_period / 2, self.P)
        assert (x, y) == pytest.approx((-self.P.r_max, 0.0), abs=1e-12)

    def test_ellipse_periodic(self):
        assert inertial_position(self.P.kepler_period, self.P) == pytest.approx((self.P.r_min, 0.0), abs=1e-12)

    def test_orientation_follows_L(self):
        _, y_direct = inertial_position(0.1, self.P)
        _, y_retro = inertial_position(0.1, orbit_params(TorusOrbitSpec(5, 2, 0.3, "retrograde")))
        assert y_direct < 0 < y_retro

    def test_rotating_closes(self):
        a = complex(*rotating_position(0.0, self.P))
        b = complex(*rotating_position(self.P.period, self.P))
        assert abs(a - b) < 1e-12

    def test_rotating_symmetry(self):
        t = 0.37
        T = self.P.kepler_period
        a = complex(*rotating_position(t, self.P))
        b = complex(*rotating_position(t + T, self.P))
        assert abs(b - np.exp(1j * T) * a) < 1e-12


class TestSampleOrbit:
    def test_radial_range(self):
        spec = TorusOrbitSpec(5, 2, 0.2)
        p = orbit_params(spec)
        c = sample_orbit(spec, 4000)
        r = c.radii()
        assert len(c) == 4000
        assert r.min() == pytest.approx(p.r_min, abs=1e-12)
        assert r.max() == pytest.approx(p.r_max, rel=1e-5)
        assert tuple(c.vertices[0]) == (p.r_min, 0.0)

    def test_default_density(self, monkeypatch):
        monkeypatch.delenv("KJPLUS_SAMPLES", raising=False)
        assert default_samples(5, 2) == 1024 * 5 * 5
        assert default_samples(2, 1) == 4096
        monkeypatch.setenv("KJPLUS_SAMPLES", "777")
        assert default_samples(5, 2) == 777

    def test_warns_near_threshold(self):
        crit = critical_eccentricity(5, 2)
        with pytest.warns(DegenerateOrbitWarning):
            sample_orbit(TorusOrbitSpec(5, 2, crit + 1e-4), 200)

    def test_no_warning_when_safe(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            sample_orbit(TorusOrbitSpec(5, 2, 0.2), 200)


class TestApproxOrbit:
    def test_circle_when_circular(self):
        spec = TorusOrbitSpec(4, 1, 0.0)
        z = approx_orbit(spec, np.linspace(0, 5, 50))
        assert np.allclose(np.abs(z), orbit_params(spec).a)

    def test_start(self):
        spec = TorusOrbitSpec(4, 1, 0.1)
        p = orbit_params(spec)
        assert approx_orbit(spec, 0.0) == pytest.approx(p.a * (1 - 0.1))


class TestThresholds:
    def test_five_two(self):
        e = critical_eccentricity(5, 2)
        assert e == pytest.approx(0.481, abs=1e-3)
        assert abs(threshold_residual(5, 2, e)) < 1e-12

    def test_three_five(self):
        e = critical_eccentricity(3, 5)
        assert e == pytest.approx(0.24, abs=1e-2)
        assert abs(threshold_residual(3, 5, e)) < 1e-12

    def test_two_one_against_brentq(self):
        oracle = brentq(lambda e: (1 + e) ** 3 - 4 * (1 - e), 0, 1, xtol=1e-15)
        assert critical_eccentricity(2, 1) == pytest.approx(oracle, abs=1e-12)

    def test_equal_pair_rejected(self):
        with pytest.raises(InvalidSpecError):
            critical_eccentricity(1, 1)


class TestHill:
    def test_minus_two_against_cubic(self):
        # -1/r - r^2/2 = -2  <=>  r^3 - 4 r + 2 = 0
        roots = np.sort([r.real for r in np.roots([1, 0, -4, 2]) if abs(r.imag) < 1e-12 and r.real > 0])
        r1, r2 = hill_radii(-2.0)
        assert (r1, r2) == pytest.approx(tuple(roots), abs=1e-12)
        assert (r1, r2) == pytest.approx((0.5392, 1.6751), abs=1e-4)

    def test_near_critical(self):
        r1, r2 = hill_radii(-1.5 - 1e-8)
        assert r1 == pytest.approx(1.0, abs=1e-3) and r2 == pytest.approx(1.0, abs=1e-3)

    def test_deep(self):
        r1, r2 = hill_radii(-10.0)
        assert r1 == pytest.approx(0.1, abs=1e-3)
        assert effective_potential(r2) == pytest.approx(-10.0, abs=1e-12)

    def test_rejects_above_critical(self):
        with pytest.raises(ValueError, match="punctured plane"):
            hill_radii(-1.0)


class TestCircular:
    @pytest.mark.parametrize("c", [-2.0, -3.0, -1.6])
    def test_energies_against_numpy_roots(self, c):
        # 2E(c-E)^2 + 1 = 2E^3 - 4cE^2 + 2c^2 E + 1
        oracle = np.sort(np.roots([2, -4 * c, 2 * c * c, 1]).real)
        got = circular_kepler_energies(c)
        assert got == pytest.approx(tuple(oracle), abs=1e-12)
        assert got[0] < got[1] < -0.5 < got[2] < 0

    def test_minus_two_values(self):
        assert circular_kepler_energies(-2.0) == pytest.approx((-2.4516, -1.4030, -0.1454), abs=1e-4)

    def test_critical_rejected(self):
        with pytest.raises(ValueError):
            circular_kepler_energies(-1.5)

    def test_angular_momenta_consistent(self):
        c = -2.0
        Es = circular_kepler_energies(c)
        for E, L in zip(Es, circular_angular_momenta(c)):
            assert E + L == pytest.approx(c, abs=1e-12)

    def test_circular_data_five_two(self):
        d = circular_data(5, 2)
        assert d.tau_direct == pytest.approx(4 * math.pi / 3)
        assert d.tau_retro == pytest.approx(4 * math.pi / 7)
        assert d.omega_direct == pytest.approx(-1.5)
        assert d.omega_retro == pytest.approx(3.5)
        E = torus_energy(5, 2)
        assert d.c_direct == pytest.approx(E - 1 / math.sqrt(-2 * E))
        assert d.c_direct == pytest.approx(-1.6578, abs=1e-4)
        assert (d.cover_direct, d.cover_retro) == (3, 7)

    def test_three_five_counterclockwise(self):
        assert circular_data(3, 5).omega_direct == pytest.approx(0.4)


class TestTangencyRadius:
    def test_direct(self):
        assert tangency_radius(orbit_params(TorusOrbitSpec(5, 2, 0.2))) == pytest.approx(0.84966, abs=1e-5)

    def test_retrograde_none(self):
        assert tangency_radius(orbit_params(TorusOrbitSpec(5, 2, 0.2, "retrograde"))) is None

    def test_loops_exist_above_threshold(self):
        p = orbit_params(TorusOrbitSpec(5, 2, 0.6))
        assert tangency_radius(p) <= p.r_max
