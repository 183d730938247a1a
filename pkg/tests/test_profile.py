import numpy as np
import pytest

from varband.profile import (
    AdmissibilityReport,
    Interval,
    PiecewiseConstantProfile,
    ProfileError,
    SmoothProfile,
    UnsupportedProfileError,
    admissibility_check,
    blend_profile,
    constant_profile,
    max_gap_delta,
    profile_from_config,
    toy_profile,
)


@pytest.fixture
def step14():
    return toy_profile(1.0, 4.0)


@pytest.fixture
def smooth12():
    return blend_profile(1.0, 2.0, R=1.0, kind="cubic")


class TestEval:
    def test_constant(self):
        p = PiecewiseConstantProfile([], [1.0])
        assert p.eval_p(3.7) == 1.0

    def test_step_right_limit_convention(self, step14):
        assert step14.eval_p(-0.5) == 1.0
        assert step14.eval_p(0.5) == 4.0
        # at the breakpoint the right plateau applies
        assert step14.eval_p(0.0) == 4.0

    def test_smooth_plateau(self, smooth12):
        assert smooth12.eval_p(2.0) == pytest.approx(2.0)
        assert smooth12.eval_p(-5.0) == pytest.approx(1.0)

    def test_vectorized(self, step14):
        out = step14.eval_p(np.array([-1.0, 1.0]))
        assert np.allclose(out, [1.0, 4.0])

    def test_validation(self):
        with pytest.raises(ProfileError):
            PiecewiseConstantProfile([0.0], [1.0, -2.0])
        with pytest.raises(ProfileError):
            PiecewiseConstantProfile([1.0, 0.0], [1.0, 2.0, 3.0])


class TestMu:
    def test_identity(self):
        p = PiecewiseConstantProfile([], [1.0])
        assert p.mu(Interval(0.0, 2.0)) == pytest.approx(2.0)

    def test_step_closed_form(self, step14):
        assert p_mu(step14, -1.0, 1.0) == pytest.approx(1.5)

    def test_empty(self, step14, smooth12):
        assert p_mu(step14, 0.3, 0.3) == 0.0
        assert smooth12.mu((1.1, 1.1)) == 0.0

    def test_additive(self, smooth12):
        a, b, c = -0.7, 0.2, 1.9
        assert smooth12.mu((a, c)) == pytest.approx(
            smooth12.mu((a, b)) + smooth12.mu((b, c)), abs=1e-10
        )

    def test_sandwich(self, smooth12):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rng.uniform(-3, 2)
            b = a + rng.uniform(0.1, 3)
            mu = smooth12.mu((a, b))
            assert mu <= (b - a) / np.sqrt(smooth12.lower) + 1e-12
            assert mu >= (b - a) / np.sqrt(smooth12.upper) - 1e-12


def p_mu(profile, a, b):
    return profile.mu((a, b))


class TestWarp:
    def test_identity_warp(self):
        p = constant_profile(1.0)
        xs = np.linspace(-7, 7, 41)
        assert np.max(np.abs(p.zeta(xs) - xs)) < 1e-10

    def test_constant_scaling(self):
        p = PiecewiseConstantProfile([], [4.0])
        assert p.zeta(3.0) == pytest.approx(1.5)
        assert p.zeta_inv(1.5) == pytest.approx(3.0)

    def test_step_value(self, step14):
        assert step14.zeta(2.0) == pytest.approx(1.0)

    def test_zero_anchor(self, step14, smooth12):
        assert step14.zeta(0.0) == 0.0
        assert abs(smooth12.zeta(0.0)) < 1e-12

    def test_roundtrip(self, smooth12, step14):
        xs = np.linspace(-12, 12, 201)
        for prof in (smooth12, step14):
            back = prof.zeta_inv(prof.zeta(xs))
            assert np.max(np.abs(back - xs) / (1 + np.abs(xs))) < 1e-9

    def test_monotone(self, smooth12):
        xs = np.linspace(-4, 4, 301)
        assert np.all(np.diff(smooth12.zeta(xs)) > 0)

    def test_forward_inverse_consistency(self, smooth12):
        zs = np.linspace(smooth12.zeta(-10), smooth12.zeta(10), 101)
        assert np.max(np.abs(smooth12.zeta(smooth12.zeta_inv(zs)) - zs)) < 1e-11

    def test_eta_roundtrip(self, smooth12, step14):
        xs = np.linspace(-9, 9, 101)
        for prof in (smooth12, step14):
            assert np.max(np.abs(prof.eta_inv(prof.eta(xs)) - xs)) < 1e-8

    def test_eta_constant(self):
        p = PiecewiseConstantProfile([], [2.0])
        assert p.eta(3.0) == pytest.approx(1.5)
        assert p.eta_inv(1.5) == pytest.approx(3.0)


class TestPotential:
    def test_constant_is_zero(self):
        p = constant_profile(3.0)
        xs = np.linspace(-3, 3, 31)
        assert np.max(np.abs(p.potential_q(xs))) == 0.0

    def test_outside_support(self, smooth12):
        assert smooth12.potential_q(1.5) == 0.0
        assert smooth12.potential_q(-7.0) == 0.0

    def test_matches_finite_differences(self, smooth12):
        h = 1e-4
        for x in [-0.6, -0.1, 0.4, 0.8]:
            pv = smooth12.p_func
            d2 = (pv(x + h) - 2 * pv(x) + pv(x - h)) / h**2
            d1 = (pv(x + h) - pv(x - h)) / (2 * h)
            expected = d2 / 4 - d1**2 / (16 * pv(x))
            assert smooth12.potential_q(x) == pytest.approx(expected, abs=1e-6)

    def test_step_profile_unsupported(self, step14):
        with pytest.raises(UnsupportedProfileError):
            step14.potential_q(0.5)

    def test_compact_support_in_warped_coordinate(self, smooth12):
        a = smooth12.warped_support_radius
        for s in [a + 0.1, -a - 0.1, 3 * a]:
            assert smooth12.potential_q_warped(s) == 0.0

    def test_derivative_guard(self):
        with pytest.raises(ProfileError):
            SmoothProfile(
                p=lambda x: 1.0 + 0 * np.asarray(x, float),
                dp=lambda x: 1.0 + 0 * np.asarray(x, float),  # wrong on purpose
                ddp=lambda x: 0 * np.asarray(x, float),
                R=1.0, p_minus=1.0, p_plus=1.0,
            )


class TestMaxGap:
    def test_unit_lattice(self):
        p = constant_profile(1.0)
        assert max_gap_delta(p, np.arange(-5, 6, dtype=float)) == pytest.approx(1.0)

    def test_step_uses_open_gap_infimum(self, step14):
        # the gap (0, 1) lies in the fast plateau, so it weighs half
        assert max_gap_delta(step14, np.array([-1.0, 0.0, 1.0])) == pytest.approx(1.0)
        assert max_gap_delta(step14, np.array([0.0, 1.0])) == pytest.approx(0.5)

    def test_pass_example(self):
        p = constant_profile(1.0)
        delta = max_gap_delta(p, np.array([0.0, np.pi / 2]))
        assert delta == pytest.approx(np.pi / 2)
        assert delta < np.pi

    def test_needs_two_points(self, step14):
        with pytest.raises(ProfileError):
            max_gap_delta(step14, np.array([1.0]))


class TestAdmissibility:
    def test_constant_passes(self):
        rep = admissibility_check(constant_profile(1.0))
        assert isinstance(rep, AdmissibilityReport)
        assert rep.passed

    def test_step_passes(self, step14):
        assert admissibility_check(step14).passed

    def test_zero_plateau_fails(self):
        with pytest.raises(ProfileError):
            PiecewiseConstantProfile([0.0], [1.0, 0.0])


class TestConfig:
    def test_piecewise(self):
        p = profile_from_config({"kind": "piecewise", "breakpoints": [0.0],
                                 "values": [1.0, 4.0]})
        assert p.eval_p(-1.0) == 1.0

    def test_smooth(self):
        p = profile_from_config({"kind": "smooth_blend", "p_minus": 1.0,
                                 "p_plus": 2.0, "R": 1.0, "blend": "quintic"})
        assert p.eval_p(3.0) == pytest.approx(2.0)

    def test_unknown(self):
        with pytest.raises(ProfileError):
            profile_from_config({"kind": "mystery"})
