from fractions import Fraction

import numpy as np
import pytest

from kjplus.closed_form import GuardBandError
from kjplus.invariants import (
    InvariantReport,
    PipelineError,
    invariant_report,
    j1,
    j2,
    levi_civita_preimage,
    origin_winding,
)
from kjplus.kepler import InvalidSpecError, TorusOrbitSpec, sample_orbit
from kjplus.shapes import circle
from kjplus.topology import TopologyError, build_arrangement, j_plus, winding_at


class TestJ1:
    def test_circle_about_origin(self):
        assert j1(circle()) == Fraction(1, 2)

    def test_orbit(self):
        assert j1(sample_orbit(TorusOrbitSpec(5, 2, 0.2))) == Fraction(13, 2)
        assert j1(sample_orbit(TorusOrbitSpec(5, 2, 0.3, "retrograde"))) == Fraction(13, 2)

    def test_three_five_below(self):
        assert j1(sample_orbit(TorusOrbitSpec(3, 5, 0.1))) == 2

    def test_origin_on_curve(self):
        c = circle(center=1.0 + 0j)
        with pytest.raises(TopologyError):
            origin_winding(c)


class TestPreimage:
    def test_circle(self):
        comps = levi_civita_preimage(circle(radius=4.0))
        assert len(comps) == 1
        assert np.allclose(comps[0].radii(), 2.0)
        assert winding_at(comps[0], (0.0, 0.0)) == 1

    def test_squares_back(self):
        c = sample_orbit(TorusOrbitSpec(5, 2, 0.2), 2000)
        (v,) = levi_civita_preimage(c)
        z = v.as_complex()
        assert np.allclose(z[: len(c)] ** 2, c.as_complex())

    def test_odd_winding_connected(self):
        c = sample_orbit(TorusOrbitSpec(4, 1, 0.3))
        comps = levi_civita_preimage(c)
        assert len(comps) == 1
        assert winding_at(comps[0], (0.0, 0.0)) == -3
        assert build_arrangement(comps[0]).n_double_points == 16

    def test_even_winding_splits(self):
        c = sample_orbit(TorusOrbitSpec(5, 1, 0.3))
        comps = levi_civita_preimage(c)
        assert len(comps) == 2
        for comp in comps:
            assert winding_at(comp, (0.0, 0.0)) == -2
            assert build_arrangement(comp).n_double_points == 5
        assert 0 <= np.angle(comps[0].as_complex()[0]) < np.pi
        assert np.allclose(comps[1].as_complex(), -comps[0].as_complex())

    def test_coarse_input_is_densified(self):
        # a square around the origin turns a quarter per edge
        comps = levi_civita_preimage(circle(n=4))
        assert len(comps) == 1
        assert winding_at(comps[0], (0.0, 0.0)) == 1


class TestJ2:
    def test_five_two(self):
        assert j2(sample_orbit(TorusOrbitSpec(5, 2, 0.2))) == 12

    def test_five_one(self):
        assert j2(sample_orbit(TorusOrbitSpec(5, 1, 0.3)), check_components=True) == 2

    def test_three_two(self):
        assert j2(sample_orbit(TorusOrbitSpec(3, 2, 0.1))) == 0


class TestReport:
    def test_five_two_direct(self):
        r = invariant_report(TorusOrbitSpec(5, 2, 0.2))
        assert (r.j_plus, r.w0, r.j1, r.j2) == (2, -3, Fraction(13, 2), 12)
        assert r.match and r.match_layered
        assert (r.double_point_count, r.face_count) == (10, 12)

    def test_five_two_retro(self):
        r = invariant_report(TorusOrbitSpec(5, 2, 0.3, "retrograde"))
        assert (r.j_plus, r.w0, r.j1, r.j2) == (-18, 7, Fraction(13, 2), 12)
        assert r.match

    def test_three_five_below(self):
        r = invariant_report(TorusOrbitSpec(3, 5, 0.1))
        assert (r.j_plus, r.w0, r.j1) == (0, 2, 2)
        # the even-winding table polynomial says -1, an odd value no J+ can take
        assert r.j2 == 0
        assert r.closed_form[2] == -1
        assert r.match is False and r.match_layered is True

    def test_identities_enforced(self):
        with pytest.raises(ArithmeticError):
            InvariantReport(0, 1, Fraction(1), 0, 0, 2, 1, 0, 1)

    def test_guard_band(self):
        with pytest.raises(GuardBandError):
            invariant_report(TorusOrbitSpec(5, 2, 0.4805))

    def test_circular_rejected(self):
        with pytest.raises(InvalidSpecError):
            invariant_report(TorusOrbitSpec(5, 2, 0.0))

    def test_stage_named(self):
        with pytest.raises(PipelineError) as info:
            invariant_report(TorusOrbitSpec(5, 2, 0.2), n_samples=4)
        assert info.value.stage == "sampling"

    def test_component_independence(self):
        c = sample_orbit(TorusOrbitSpec(1, 3, 0.2))
        a, b = levi_civita_preimage(c)
        assert j_plus(build_arrangement(a)) == j_plus(build_arrangement(b))
