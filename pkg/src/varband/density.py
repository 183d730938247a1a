"""Beurling densities adapted to the bandwidth profile, on finite windows.

All counting happens in the warped coordinate z = zeta(x), where an interval
of mu_p-length r is an ordinary interval of length r.  Finite windows only
allow finite-r surrogates of the asymptotic densities; reports always carry
the scanned r values and never claim the true limit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .sampling import SampleSet, frame_bounds_estimate
from .spectral import SpectralSet, uniform_quadrature


class DensityError(ValueError):
    pass


@dataclass
class DensityReport:
    r_values: list
    lower: list  # inf count / r per r
    upper: list  # sup count / r per r
    window: tuple
    monotone_trend: bool = False

    @property
    def d_minus(self):
        return self.lower[-1]

    @property
    def d_plus(self):
        return self.upper[-1]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "inf_count_over_r", "sup_count_over_r"])
            for r, lo, hi in zip(self.r_values, self.lower, self.upper):
                w.writerow([r, lo, hi])


def _warped_points(profile, X):
    pts = X.points if isinstance(X, SampleSet) else np.asarray(X, dtype=float)
    return np.sort(np.atleast_1d(profile.zeta(pts)))


def sliding_counts(z, window_z, r, step_frac=50):
    """(min, max) of #(z in [t, t+r)) over positions t inside the window."""
    a, b = window_z
    if b - a < r:
        raise DensityError(f"window of warped length {b - a:g} too small for r={r:g}")
    positions = np.arange(a, b - r + 1e-12, r / step_frac)
    lo = np.searchsorted(z, positions, side="left")
    hi = np.searchsorted(z, positions + r, side="left")
    counts = hi - lo
    return int(counts.min()), int(counts.max())


def beurling_density(profile, X, r_list, window, step_frac=50):
    """Finite-window estimates of the adapted lower/upper Beurling densities."""
    z = _warped_points(profile, X)
    a, b = (window.a, window.b) if hasattr(window, "a") else window
    wz = (float(profile.zeta(a)), float(profile.zeta(b)))
    r_list = sorted(float(r) for r in r_list)
    if r_list and r_list[-1] > (wz[1] - wz[0]) / 4:
        raise DensityError("largest r exceeds a quarter of the warped window")
    lower, upper = [], []
    for r in r_list:
        cmin, cmax = sliding_counts(z, wz, r, step_frac)
        lower.append(cmin / r)
        upper.append(cmax / r)
    trend = all(x <= y + 1e-12 for x, y in zip(lower, lower[1:]))
    return DensityReport(r_list, lower, upper, wz, monotone_trend=trend)


def separation(profile, X):
    """(min consecutive mu_p gap, relative-separation constant n0).

    n0 is the max number of points in a sliding unit mu_p interval.
    """
    z = _warped_points(profile, X)
    if z.size < 2:
        raise DensityError("need at least two points")
    min_gap = float(np.min(np.diff(z)))
    span = (z[0] - 0.5, z[-1] + 0.5)
    _, n0 = sliding_counts(z, span, 1.0, step_frac=200)
    return min_gap, int(n0)


def gap_density_bound(profile, X, window=None, r_max=None):
    """Max-gap eta and the induced density lower bound.

    Returns (eta, 1/eta, measured D_p^-, holds) where the inequality is
    checked with the finite-window slack 3 / r_max.
    """
    pts = X.points if isinstance(X, SampleSet) else np.asarray(X, dtype=float)
    eta = profile.max_gap_delta(pts)
    z = _warped_points(profile, X)
    if window is None:
        wz = (float(z[0]), float(z[-1]))
    else:
        a, b = (window.a, window.b) if hasattr(window, "a") else window
        wz = (float(profile.zeta(a)), float(profile.zeta(b)))
    if r_max is None:
        r_max = (wz[1] - wz[0]) / 4
    cmin, _ = sliding_counts(z, wz, r_max)
    d_minus = cmin / r_max
    holds = bool(d_minus >= 1.0 / eta - 3.0 / r_max)
    return float(eta), 1.0 / float(eta), float(d_minus), holds


def quasi_uniform_set(profile, density, window):
    """Points with exact mu_p-density: zeta_inv of a uniform lattice."""
    a, b = (window.a, window.b) if hasattr(window, "a") else window
    za, zb = float(profile.zeta(a)), float(profile.zeta(b))
    n = int(np.floor((zb - za) * density))
    if n < 2:
        raise DensityError("window too small for the requested density")
    zs = za + (np.arange(n) + 0.5) / density
    return np.asarray(profile.zeta_inv(zs), dtype=float)


@dataclass
class LandauSweepResult:
    densities: list
    windows: list
    a_table: np.ndarray  # (n_density, n_window)
    b_table: np.ndarray
    gram_min_table: np.ndarray
    threshold_low: float
    threshold_high: float
    critical: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["density", "window_halfwidth", "A_est", "B_est", "gram_min"])
            for i, d in enumerate(self.densities):
                for j, win in enumerate(self.windows):
                    w.writerow([d, win, self.a_table[i, j], self.b_table[i, j],
                                self.gram_min_table[i, j]])


def landau_sweep(model_builder, profile, sset, density_grid, window_halfwidths,
                 degeneration_cut=0.2):
    """Empirical frame-bound sweep over target mu_p-densities.

    ``model_builder(warped_halfwidth)`` must return a spectral model whose
    quadrature is matched to the warped window (spacing pi / W keeps the
    degrees of freedom honest).  For each density the sample set is quasi
    uniform in warped coordinates.  A density cell counts as degenerating if
    A_est / B_est at the largest window has dropped below `degeneration_cut`
    times its value at the smallest; the reported bracket is the last
    degenerating and first stabilizing density.  Finite-window estimate only.
    """
    if not isinstance(sset, SpectralSet):
        sset = SpectralSet(sset)
    densities = sorted(float(d) for d in density_grid)
    windows = sorted(float(w) for w in window_halfwidths)
    nd, nw = len(densities), len(windows)
    A = np.zeros((nd, nw))
    B = np.zeros((nd, nw))
    Gm = np.zeros((nd, nw))
    for j, wz in enumerate(windows):
        model = model_builder(wz)
        x_lo = float(profile.zeta_inv(-wz))
        x_hi = float(profile.zeta_inv(wz))
        for i, d in enumerate(densities):
            X = quasi_uniform_set(profile, d, (x_lo, x_hi))
            a_est, b_est = frame_bounds_estimate(model, X, window=(x_lo, x_hi))
            A[i, j], B[i, j] = a_est, b_est
            # interpolation-side diagnostic: smallest eigenvalue of the
            # normalized Gram of the kernel sections
            K = model.kernel_matrix(X, X)
            dk = np.sqrt(np.clip(np.diag(K), 1e-300, None))
            Gm[i, j] = float(np.linalg.eigvalsh(K / np.outer(dk, dk)).min())
    ratios = (A[:, -1] / np.maximum(B[:, -1], 1e-300)) / np.maximum(
        A[:, 0] / np.maximum(B[:, 0], 1e-300), 1e-300
    )
    degenerating = ratios < degeneration_cut
    thr_low = max((d for d, bad in zip(densities, degenerating) if bad), default=float("nan"))
    thr_high = min((d for d, bad in zip(densities, degenerating) if not bad), default=float("nan"))
    critical = sset.sqrt_measure / np.pi
    return LandauSweepResult(densities, windows, A, B, Gm, thr_low, thr_high, critical)


def matched_free_model_builder(sset):
    """Standard builder for `landau_sweep` on the unwarped free case."""
    from .kernel import free_model

    if not isinstance(sset, SpectralSet):
        sset = SpectralSet(sset)

    def build(wz):
        return free_model(sset, quad=uniform_quadrature(sset, np.pi / wz))

    return build
