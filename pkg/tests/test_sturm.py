import numpy as np
import pytest

from varband.profile import constant_profile, toy_profile
from varband.sturm import (
    IntegrationError,
    SpectralDensityError,
    rk4_final,
    rk4_path,
    solve_eigen,
    toy_fundamental,
    toy_spectral_density,
    toy_wronskian_value,
    wronskian,
)


class TestClosedForms:
    def test_equal_plateaus_give_plane_wave(self):
        xs = np.linspace(-5, 5, 41)
        fp, fmn = toy_fundamental(1.0, 1.0, 2.0, xs)
        assert np.max(np.abs(fp - np.exp(1j * np.sqrt(2.0) * xs))) < 1e-14
        assert np.max(np.abs(fmn - np.exp(-1j * np.sqrt(2.0) * xs))) < 1e-14

    def test_continuity_at_jump(self):
        for (pm, pp) in [(1, 4), (2, 3), (4, 1)]:
            lam = 1.7
            lp, lm = toy_fundamental(pm, pp, lam, -1e-13)
            rp, rm = toy_fundamental(pm, pp, lam, 1e-13)
            assert abs(lp - rp) < 1e-12
            assert abs(lm - rm) < 1e-12

    def test_lambda_validation(self):
        with pytest.raises(SpectralDensityError):
            toy_fundamental(1.0, 4.0, 0.0, 0.5)

    def test_matches_ode_integration(self):
        # integrate the pure transmitted branch from the right plateau back
        pm, pp, lam = 1.0, 4.0, 1.0
        prof = toy_profile(pm, pp)
        x0 = 1.0
        phi0, _ = toy_fundamental(pm, pp, lam, x0)
        kp = np.sqrt(lam / pp)
        init = (phi0, pp * 1j * kp * phi0)
        sol = solve_eigen(prof, lam, init, x0, (-2.0, 2.0), step=1e-3)
        xs = np.linspace(-2, 2, 37)
        ref = toy_fundamental(pm, pp, lam, xs)[0]
        assert np.max(np.abs(sol.phi(xs) - ref)) < 1e-7


class TestSolveEigen:
    def test_cosine(self):
        prof = constant_profile(1.0)
        sol = solve_eigen(prof, 1.0, (1.0, 0.0), 0.0, (0.0, 10.0), step=1e-3)
        xs = np.linspace(0, 10, 101)
        assert np.max(np.abs(sol.phi(xs) - np.cos(xs))) < 1e-8

    def test_lambda_zero_constant(self):
        prof = toy_profile(1.0, 4.0)
        sol = solve_eigen(prof, 0.0, (1.0, 0.0), 0.0, (-3.0, 3.0), step=1e-2)
        xs = np.linspace(-3, 3, 25)
        assert np.max(np.abs(sol.phi(xs) - 1.0)) < 1e-12

    def test_bad_span(self):
        with pytest.raises(IntegrationError):
            solve_eigen(constant_profile(1.0), 1.0, (1.0, 0.0), 5.0, (0.0, 1.0))

    def test_state_continuous_across_jump(self):
        prof = toy_profile(1.0, 4.0)
        sol = solve_eigen(prof, 2.0, (1.0, 0.5), 0.0, (-1.0, 1.0), step=1e-3)
        eps = 1e-6
        assert abs(sol.phi(-eps) - sol.phi(eps)) < 1e-5
        assert abs(sol.pdphi(-eps) - sol.pdphi(eps)) < 1e-4

    def test_csv_export(self, tmp_path):
        prof = constant_profile(1.0)
        sol = solve_eigen(prof, 1.0, (1.0, 0.0), 0.0, (0.0, 1.0), step=1e-2)
        path = tmp_path / "sol.csv"
        sol.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "x,re_phi,im_phi,re_pdphi,im_pdphi"


class TestWronskian:
    def test_constant_along_solutions(self):
        pm, pp, lam = 2.0, 3.0, 1.3
        prof = toy_profile(pm, pp)
        span = (-3.0, 3.0)
        fp0, _ = toy_fundamental(pm, pp, lam, 2.0)
        kp = np.sqrt(lam / pp)
        sol1 = solve_eigen(prof, lam, (fp0, pp * 1j * kp * fp0), 2.0, span, step=1e-3)
        _, fm0 = toy_fundamental(pm, pp, lam, -2.0)
        km = np.sqrt(lam / pm)
        sol2 = solve_eigen(prof, lam, (fm0, pm * (-1j) * km * fm0), -2.0, span, step=1e-3)
        xs = np.linspace(-2.5, 2.5, 11)
        w = wronskian(sol1, sol2, xs)
        expected = toy_wronskian_value(pm, pp, lam)
        assert np.max(np.abs(w - expected)) / abs(expected) < 1e-6


class TestSpectralDensity:
    def test_equal_plateaus(self):
        d = toy_spectral_density(1.0, 1.0, 1.0)
        assert np.allclose(d, np.eye(2) / (4 * np.pi))

    def test_diagonal_psd(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            pm, pp, lam = rng.uniform(0.5, 5, 3)
            d = toy_spectral_density(pm, pp, lam)
            assert d[0, 1] == 0 and d[1, 0] == 0
            assert np.all(np.linalg.eigvalsh(d) >= 0)

    def test_integral_closed_form(self):
        from scipy.integrate import quad

        pm, pp, om = 2.0, 3.0, 1.7
        integral, _ = quad(lambda l: toy_spectral_density(pm, pp, l)[0, 0], 0, om)
        expected = np.sqrt(pm) * 2 * np.sqrt(om) / (np.pi * (np.sqrt(pm) + np.sqrt(pp)) ** 2)
        assert integral == pytest.approx(expected, rel=1e-8)

    def test_endpoint_error(self):
        with pytest.raises(SpectralDensityError):
            toy_spectral_density(1.0, 4.0, 0.0)


class TestIntegratorCore:
    def test_path_and_final_agree(self):
        def f(x, y):
            return np.stack([y[1], -2.0 * y[0]])

        y0 = np.array([1.0, 0.0], dtype=complex)
        _, path = rk4_path(f, 0.0, 3.0, y0, 1e-3)
        final = rk4_final(f, 0.0, 3.0, y0, 1e-3)
        assert np.max(np.abs(path[-1] - final)) == 0.0

    def test_breakpoint_nodes_present(self):
        def f(x, y):
            return np.zeros_like(y)

        g, _ = rk4_path(f, 0.0, 1.0, np.array([1.0, 0.0]), 0.3, breakpoints=(0.5,))
        assert np.min(np.abs(g - 0.5)) < 1e-14

    def test_step_validation(self):
        with pytest.raises(IntegrationError):
            rk4_path(lambda x, y: y, 0.0, 1.0, np.array([1.0, 0.0]), -1.0)
