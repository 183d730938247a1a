"""Fundamental solutions of -(p phi')' = lambda phi and the two-plateau spectral measure.

The first-order system used throughout is u = (phi, p phi'); both components
are continuous across jumps of p, so carrying the state vector through a
breakpoint IS the matching condition.  A generic fixed-step RK4 driver with
mandatory breakpoint nodes is shared with the scattering module.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline


class IntegrationError(RuntimeError):
    pass


class SpectralDensityError(ValueError):
    pass


def rk4_path(f, x0, x1, y0, step, breakpoints=()):
    """Classical RK4 for y' = f(x, y) from x0 to x1 (either direction).

    y0 has shape (2, ...) and f must broadcast over the trailing axes, so a
    whole frequency sweep integrates in one pass.  Points of `breakpoints`
    strictly between x0 and x1 become mandatory grid nodes, so no step
    straddles a coefficient discontinuity.  Returns (grid, states) with grid
    ascending in integration order and states of shape (len(grid), 2, ...).
    """
    if step <= 0:
        raise IntegrationError("step must be positive")
    y0 = np.asarray(y0, dtype=complex)
    if x1 == x0:
        return np.array([x0]), y0[None, ...]
    lo, hi = min(x0, x1), max(x0, x1)
    inner = sorted(b for b in breakpoints if lo < b < hi)
    edges = [x0] + (inner if x1 > x0 else inner[::-1]) + [x1]
    xs = [np.array([x0])]
    ys = [y0[None, ...]]
    y = y0
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(np.ceil(abs(b - a) / step)))
        h = (b - a) / n
        seg = a + h * np.arange(1, n + 1)
        seg[-1] = b
        # evaluate coefficients strictly inside the open segment so stages at
        # a breakpoint never pick the wrong one-sided limit
        slo, shi = (a, b) if b > a else (b, a)
        eps = 1e-9 * abs(h)
        cl = lambda t: min(max(t, slo + eps), shi - eps)
        out = np.empty((n,) + y.shape, dtype=complex)
        x = a
        for i in range(n):
            k1 = f(cl(x), y)
            k2 = f(cl(x + h / 2), y + (h / 2) * k1)
            k3 = f(cl(x + h / 2), y + (h / 2) * k2)
            k4 = f(cl(x + h), y + h * k3)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            x = a + (i + 1) * h
            out[i] = y
        xs.append(seg)
        ys.append(out)
    return np.concatenate(xs), np.concatenate(ys)


def rk4_final(f, x0, x1, y0, step, breakpoints=()):
    """Like `rk4_path` but keeps only the final state (O(1) memory)."""
    if step <= 0:
        raise IntegrationError("step must be positive")
    y = np.asarray(y0, dtype=complex)
    if x1 == x0:
        return y
    lo, hi = min(x0, x1), max(x0, x1)
    inner = sorted(b for b in breakpoints if lo < b < hi)
    edges = [x0] + (inner if x1 > x0 else inner[::-1]) + [x1]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(np.ceil(abs(b - a) / step)))
        h = (b - a) / n
        slo, shi = (a, b) if b > a else (b, a)
        eps = 1e-9 * abs(h)
        cl = lambda t: min(max(t, slo + eps), shi - eps)
        for i in range(n):
            x = a + i * h
            k1 = f(cl(x), y)
            k2 = f(cl(x + h / 2), y + (h / 2) * k1)
            k3 = f(cl(x + h / 2), y + (h / 2) * k2)
            k4 = f(cl(x + h), y + h * k3)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _default_step(profile, lam, step):
    # resolve the plateau wavelength 2 pi sqrt(p / lambda)
    if lam > 0:
        wavelength = 2 * np.pi * np.sqrt(profile.lower / lam)
        return min(step, wavelength / 50.0)
    return step


@dataclass
class EigenSolution:
    """Sampled (phi, p phi') along a grid, with cubic Hermite interpolation."""

    lam: float
    profile: object
    grid: np.ndarray
    states: np.ndarray  # shape (n, 2)

    def __post_init__(self):
        order = np.argsort(self.grid)
        self.grid = self.grid[order]
        self.states = self.states[order]
        # drop duplicated nodes produced by two-sided integration
        keep = np.concatenate(([True], np.diff(self.grid) > 0))
        self.grid = self.grid[keep]
        self.states = self.states[keep]
        self._splines = self._build_splines()

    def _build_splines(self):
        # phi' = (p phi')/p jumps where p jumps, so interpolate per smooth piece
        bp = getattr(self.profile, "breakpoints", np.array([]))
        cuts = [b for b in np.atleast_1d(bp) if self.grid[0] < b < self.grid[-1]]
        edges = np.concatenate(([self.grid[0]], cuts, [self.grid[-1]]))
        splines = []
        for a, b in zip(edges[:-1], edges[1:]):
            sel = (self.grid >= a - 1e-14) & (self.grid <= b + 1e-14)
            x = self.grid[sel]
            if x.size < 2:
                splines.append((a, b, None))
                continue
            if getattr(self.profile, "is_smooth", False):
                p_here = np.atleast_1d(np.asarray(self.profile.eval_p(x), dtype=float))
            else:
                # p is constant on the open piece; the midpoint value avoids
                # picking up the wrong one-sided limit at the edges
                p_here = np.full(x.size, float(self.profile.eval_p(0.5 * (a + b))))
            dphi = self.states[sel, 1] / p_here
            splines.append((a, b, CubicHermiteSpline(x, self.states[sel, 0], dphi)))
        return splines

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        flat_x = np.atleast_1d(x)
        flat_o = np.atleast_1d(out)
        for a, b, sp in self._splines:
            if sp is None:
                continue
            sel = (flat_x >= a) & (flat_x <= b)
            flat_o[sel] = sp(flat_x[sel])
        return flat_o.reshape(x.shape) if x.ndim else complex(flat_o[0])

    def pdphi(self, x):
        """Interpolated p(x) phi'(x)."""
        x = np.asarray(x, dtype=float)
        flat_x = np.atleast_1d(x)
        flat_o = np.zeros(flat_x.shape, dtype=complex)
        for a, b, sp in self._splines:
            if sp is None:
                continue
            sel = (flat_x >= a) & (flat_x <= b)
            pv = np.atleast_1d(np.asarray(self.profile.eval_p(flat_x[sel]), dtype=float))
            flat_o[sel] = sp.derivative()(flat_x[sel]) * pv
        return flat_o.reshape(x.shape) if x.ndim else complex(flat_o[0])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "re_phi", "im_phi", "re_pdphi", "im_pdphi"])
            for x, (u, v) in zip(self.grid, self.states):
                w.writerow([x, u.real, u.imag, v.real, v.imag])


def solve_eigen(profile, lam, init, x0, span, step=1e-3):
    """Integrate (phi, p phi') across `span` from initial data at x0.

    x0 must lie in span; integration proceeds to both endpoints.
    """
    a, b = span if not hasattr(span, "a") else (span.a, span.b)
    if not (a <= x0 <= b):
        raise IntegrationError(f"x0={x0} outside span [{a}, {b}]")
    h = _default_step(profile, lam, step)
    bp = np.atleast_1d(getattr(profile, "breakpoints", np.array([])))

    def rhs(x, u):
        p = profile.eval_p(x)
        return np.stack([u[1] / p, -lam * u[0]])

    grids, states = [], []
    for target in (a, b):
        if target == x0:
            continue
        g, s = rk4_path(rhs, x0, target, np.asarray(init, dtype=complex), h, bp)
        grids.append(g)
        states.append(s)
    if not grids:
        raise IntegrationError("degenerate span")
    grid = np.concatenate(grids)
    st = np.concatenate(states)
    return EigenSolution(float(lam), profile, grid, st)


def wronskian(sol1, sol2, x):
    """W_p(phi1, phi2)(x) = (p phi1') phi2 - phi1 (p phi2')."""
    return sol1.pdphi(x) * sol2.phi(x) - sol1.phi(x) * sol2.pdphi(x)


def toy_fundamental(p_minus, p_plus, lam, x):
    """Closed-form fundamental pair (phi_plus, phi_minus) for the step profile.

    phi_plus is the solution that is a pure right-moving wave e^{i kappa_+ x}
    on the right plateau; phi_minus the mirrored left one.  Vectorized in x.
    """
    if lam <= 0:
        raise SpectralDensityError("closed forms require lambda > 0")
    x = np.asarray(x, dtype=float)
    km = np.sqrt(lam / p_minus)
    kp = np.sqrt(lam / p_plus)
    right = x > 0
    phi_p = np.where(
        right,
        np.exp(1j * kp * x),
        np.cos(km * x) + 1j * np.sqrt(p_plus / p_minus) * np.sin(km * x),
    )
    phi_m = np.where(
        right,
        np.cos(kp * x) - 1j * np.sqrt(p_minus / p_plus) * np.sin(kp * x),
        np.exp(-1j * km * x),
    )
    if x.ndim:
        return phi_p, phi_m
    return complex(phi_p), complex(phi_m)


def toy_spectral_density(p_minus, p_plus, lam):
    """Diagonal density of the step-profile spectral measure at lambda > 0."""
    if lam <= 0:
        raise SpectralDensityError("spectral density has a 1/sqrt(lambda) endpoint at 0")
    sm, sp = np.sqrt(p_minus), np.sqrt(p_plus)
    c = 1.0 / (np.pi * (sm + sp) ** 2 * np.sqrt(lam))
    return np.diag([sm * c, sp * c])


def toy_wronskian_value(p_minus, p_plus, lam):
    """W_p(phi_plus, phi_minus) of the closed-form pair, constant in x."""
    return 1j * np.sqrt(lam) * (np.sqrt(p_plus) + np.sqrt(p_minus))
