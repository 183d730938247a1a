"""Experiment runner: config-driven subcommands emitting CSV tables and JSON reports.

    varband <subcommand> --config cfg.json --out DIR [--seed N]

Subcommands: kernel, scatter, reconstruct, shannon, density, landau, selftest.
Every run writes ``report.json`` with the config hash, package versions and
timings next to its CSV artifacts; identical config and seed give identical
output.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .density import (beurling_density, gap_density_bound, landau_sweep,
                      matched_free_model_builder, quasi_uniform_set, separation)
from .kernel import (LiouvilleModel, SchrodingerModel, ToyModel, free_model,
                     toy_kernel)
from .paleywiener import random_smooth_function
from .profile import blend_profile, constant_profile, profile_from_config
from .sampling import (frame_bounds_estimate, reconstruct_iterative,
                       samples_from_csv, shannon_basis_toy)
from .schrodinger import ScatteringSweep
from .spectral import SpectralSet, uniform_quadrature


class ConfigError(ValueError):
    pass


def _require(cfg, key, where="config"):
    if key not in cfg:
        raise ConfigError(f"missing field {key!r} in {where}")
    return cfg[key]


def _sset(cfg):
    return SpectralSet(_require(cfg, "spectral_set"))


def _profile(cfg):
    return profile_from_config(_require(cfg, "profile"))


def _model(cfg, x_max=None):
    kind = cfg.get("model", "free")
    sset = _sset(cfg)
    x_max = x_max or cfg.get("x_max", 25.0)
    if kind == "free":
        return free_model(sset, x_max=x_max)
    if kind == "toy":
        p = _require(cfg, "profile")
        return ToyModel(p["values"][0], p["values"][-1], sset, x_max=x_max)
    if kind == "liouville":
        return LiouvilleModel(_profile(cfg), sset, x_max=x_max)
    if kind == "schrodinger":
        prof = _profile(cfg)
        return SchrodingerModel(prof.potential_q_warped, prof.warped_support_radius,
                                sset, x_max=x_max)
    raise ConfigError(f"unknown model kind {kind!r}")


def _write_report(out_dir, cfg, extra, t0):
    payload = {
        "config_sha256": hashlib.sha256(
            json.dumps(cfg, sort_keys=True).encode()
        ).hexdigest(),
        "versions": {"varband": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "elapsed_seconds": round(time.time() - t0, 3),
    }
    payload.update(extra)
    with open(Path(out_dir) / "report.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


# -- subcommands -----------------------------------------------------------


def cmd_kernel(cfg, out_dir, rng, tol_scale):
    t0 = time.time()
    model = _model(cfg)
    g = cfg.get("grid", {})
    lo, hi, n = g.get("lo", -10.0), g.get("hi", 10.0), g.get("n", 101)
    xs = np.linspace(lo, hi, n)
    K = model.kernel_matrix(xs, xs, keep_complex=True)
    with open(Path(out_dir) / "kernel_grid.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x\\y"] + [f"{y:.12g}" for y in xs])
        for i, x in enumerate(xs):
            w.writerow([f"{x:.12g}"] + [f"{K[i, j].real:.12g}" for j in range(n)])
    model.dump_csv(Path(out_dir) / "kernel_pairs.csv", xs[:: max(1, n // 20)],
                   xs[:: max(1, n // 20)])
    _write_report(out_dir, cfg, {"subcommand": "kernel",
                                 "diagonal_max": float(np.max(np.diag(K).real))}, t0)
    return 0


def cmd_scatter(cfg, out_dir, rng, tol_scale):
    t0 = time.time()
    prof = _profile(cfg)
    om = cfg.get("omega_grid", {})
    omegas = np.linspace(om.get("lo", 0.05), om.get("hi", 5.0), om.get("n", 200))
    sweep = ScatteringSweep(prof.potential_q_warped, prof.warped_support_radius,
                            omegas, store_interior=False)
    sweep.to_csv(Path(out_dir) / "scattering.csv")
    defect = sweep.unitarity_defect()
    _write_report(out_dir, cfg, {"subcommand": "scatter",
                                 "max_unitarity_defect": defect}, t0)
    return 0 if defect < 1e-7 * tol_scale else 1


def cmd_reconstruct(cfg, out_dir, rng, tol_scale, samples_path=None):
    t0 = time.time()
    prof = _profile(cfg)
    sset = _sset(cfg)
    omega_max = sset.lambda_max
    window = tuple(_require(cfg, "window"))
    wz = 0.5 * (prof.zeta(window[1]) - prof.zeta(window[0]))
    quad = uniform_quadrature(sset, np.pi / wz)
    kind = cfg.get("model", "free")
    if kind == "toy":
        p = _require(cfg, "profile")
        model = ToyModel(p["values"][0], p["values"][-1], sset, quad=quad)
    else:
        model = free_model(sset, quad=quad)
    if samples_path:
        pts, vals = samples_from_csv(samples_path)
    else:
        raise ConfigError("reconstruct requires --samples CSV (x, re, im)")
    f_rec, report = reconstruct_iterative(
        model, prof, pts, vals, omega_max, window,
        n_max=cfg.get("n_max", 40), tol=cfg.get("tol", 0.0),
    )
    xs = np.linspace(window[0], window[1], cfg.get("output_points", 801))
    f_rec.dump_csv(Path(out_dir) / "reconstruction.csv", xs)
    with open(Path(out_dir) / "reconstruction_report.json", "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
    _write_report(out_dir, cfg, {"subcommand": "reconstruct",
                                 "delta": report.delta,
                                 "gap_condition_passes": report.passes}, t0)
    return 0 if report.passes else 1


def cmd_shannon(cfg, out_dir, rng, tol_scale):
    t0 = time.time()
    p = _require(cfg, "profile")
    pm, pp = p["values"][0], p["values"][-1]
    omega_max = _sset(cfg).lambda_max
    j_max = cfg.get("j_max", 20)
    nodes, wts = shannon_basis_toy(pm, pp, omega_max, j_max)
    K = toy_kernel(pm, pp, omega_max, nodes[:, None], nodes[None, :])
    c = np.sqrt(np.pi * wts / np.sqrt(omega_max))
    G = c[:, None] * K * c[None, :]
    dev = np.abs(G - np.eye(nodes.size))
    with open(Path(out_dir) / "gram.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "gram", "deviation"])
        for i in range(nodes.size):
            for j in range(nodes.size):
                w.writerow([i - j_max, j - j_max, f"{G[i, j]:.15g}", f"{dev[i, j]:.3g}"])
    max_offdiag = float(np.max(dev))
    _write_report(out_dir, cfg, {"subcommand": "shannon",
                                 "max_gram_deviation": max_offdiag}, t0)
    return 0 if max_offdiag < 1e-8 * tol_scale else 1


def cmd_density(cfg, out_dir, rng, tol_scale):
    t0 = time.time()
    prof = _profile(cfg)
    window = tuple(_require(cfg, "window"))
    if "points" in cfg:
        pts = np.asarray(cfg["points"], dtype=float)
    else:
        pts = quasi_uniform_set(prof, cfg.get("target_density", 0.5), window)
    r_list = cfg.get("r_values", [5.0, 10.0, 20.0])
    rep = beurling_density(prof, pts, r_list, window)
    rep.to_csv(Path(out_dir) / "density.csv")
    eta, bound, d_minus, holds = gap_density_bound(prof, pts, window=window)
    gap, n0 = separation(prof, pts)
    _write_report(out_dir, cfg, {
        "subcommand": "density",
        "finite_window_estimates": True,
        "d_minus": rep.d_minus, "d_plus": rep.d_plus,
        "eta": eta, "gap_bound": bound, "gap_bound_holds": holds,
        "min_mu_gap": gap, "relative_separation": n0,
    }, t0)
    return 0 if holds else 1


def cmd_landau(cfg, out_dir, rng, tol_scale):
    t0 = time.time()
    prof_cfg = cfg.get("profile", {"kind": "piecewise", "breakpoints": [], "values": [1.0]})
    sset = _sset(cfg)
    crit = sset.sqrt_measure / np.pi
    grid = cfg.get("density_grid") or list(crit * np.arange(0.65, 1.4, 0.1))
    windows = cfg.get("window_halfwidths", [40.0, 80.0, 160.0])
    if prof_cfg.get("kind") == "smooth_blend":
        prof = profile_from_config(prof_cfg)

        def builder(wz):
            return LiouvilleModel(prof, sset, quad=uniform_quadrature(sset, np.pi / wz))
    else:
        prof = constant_profile(1.0)
        builder = matched_free_model_builder(sset)
    res = landau_sweep(builder, prof, sset, grid, windows)
    res.to_csv(Path(out_dir) / "landau_sweep.csv")
    bracketed = bool(res.threshold_low <= res.critical <= res.threshold_high
                     if np.isfinite(res.threshold_low) and np.isfinite(res.threshold_high)
                     else False)
    _write_report(out_dir, cfg, {
        "subcommand": "landau", "finite_window_estimates": True,
        "critical_density": res.critical,
        "last_degenerating": res.threshold_low,
        "first_stabilizing": res.threshold_high,
        "brackets_critical": bracketed,
    }, t0)
    return 0 if bracketed else 1


def cmd_selftest(cfg, out_dir, rng, tol_scale):
    t0 = time.time()
    failures = []

    def check(name, ok, detail=""):
        print(("PASS" if ok else "FAIL"), name, detail)
        if not ok:
            failures.append(name)

    # free-case reduction across representations
    sset = SpectralSet([(0.0, 2.0)])
    xs = rng.uniform(-15, 15, 100)
    ys = rng.uniform(-15, 15, 100)
    fm = free_model(sset, x_max=16)
    ref = toy_kernel(1.0, 1.0, 2.0, xs, ys)
    check("free_reduction_quadrature",
          float(np.max(np.abs(fm.kernel_pairs(xs, ys) - ref))) < 1e-7 * tol_scale)
    lm = LiouvilleModel(constant_profile(1.0), sset, x_max=16)
    check("free_reduction_warped",
          float(np.max(np.abs(lm.kernel_pairs(xs, ys) - ref))) < 1e-7 * tol_scale)

    # step-profile closed form vs quadrature
    tm = ToyModel(1.0, 4.0, sset, x_max=16)
    dev = float(np.max(np.abs(tm.kernel_pairs(xs, ys) - toy_kernel(1.0, 4.0, 2.0, xs, ys))))
    check("step_kernel_cross_validation", dev < 1e-6 * tol_scale, f"dev={dev:.2e}")

    # orthonormal basis
    nodes, wts = shannon_basis_toy(1.0, 4.0, 1.0, 20)
    K = toy_kernel(1.0, 4.0, 1.0, nodes[:, None], nodes[None, :])
    c = np.sqrt(np.pi * wts)
    G = c[:, None] * K * c[None, :]
    check("orthonormal_basis_gram",
          float(np.max(np.abs(G - np.eye(nodes.size)))) < 1e-8 * tol_scale)

    # scattering unitarity
    prof = blend_profile(1.0, 4.0, R=1.0)
    sweep = ScatteringSweep(prof.potential_q_warped, prof.warped_support_radius,
                            np.linspace(0.05, 5.0, 50), store_interior=False)
    check("scattering_unitarity", sweep.unitarity_defect() < 1e-7 * tol_scale)

    # density gap bound on a perturbed lattice
    pts = np.sort(np.arange(-60, 61) * 1.0 + rng.uniform(-0.2, 0.2, 121))
    prof1 = constant_profile(1.0)
    _, _, _, holds = gap_density_bound(prof1, pts)
    check("gap_density_bound", holds)

    # frame bounds on the critical lattice
    wz = 40 * np.pi
    fm2 = free_model(SpectralSet([(0.0, 1.0)]),
                     quad=uniform_quadrature(SpectralSet([(0.0, 1.0)]), np.pi / wz))
    X = np.arange(-wz + np.pi / 2, wz, np.pi)
    a_est, b_est = frame_bounds_estimate(fm2, X, window=(-wz, wz))
    check("tight_frame_on_shannon_grid", abs(a_est / b_est - 1) < 0.05,
          f"A={a_est:.4f} B={b_est:.4f}")

    _write_report(out_dir, cfg, {"subcommand": "selftest",
                                 "failures": failures}, t0)
    return 0 if not failures else 1


COMMANDS = {
    "kernel": cmd_kernel,
    "scatter": cmd_scatter,
    "reconstruct": cmd_reconstruct,
    "shannon": cmd_shannon,
    "density": cmd_density,
    "landau": cmd_landau,
    "selftest": cmd_selftest,
}


def main(argv=None):
    ap = argparse.ArgumentParser(prog="varband",
                                 description="variable-bandwidth sampling experiments")
    ap.add_argument("subcommand", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=Path("."))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--tolerance-scale", type=float, default=1.0)
    ap.add_argument("--samples", type=Path, default=None,
                    help="sample CSV for the reconstruct subcommand")
    args = ap.parse_args(argv)
    cfg = {}
    if args.config is not None:
        with open(args.config) as fh:
            cfg = json.load(fh)
    args.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    try:
        if args.subcommand == "reconstruct":
            return cmd_reconstruct(cfg, args.out, rng, args.tolerance_scale,
                                   samples_path=args.samples)
        return COMMANDS[args.subcommand](cfg, args.out, rng, args.tolerance_scale)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
