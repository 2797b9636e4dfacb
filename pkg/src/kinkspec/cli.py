"""Batch command-line interface.

Subcommands: spectrum | transform | kernels | mass-shift | wavepacket | fock
| check.  Every table is written with its cutoff/grid provenance columns and
deterministic formatting, so identical config and seed give byte-identical
output.  Exit codes: 0 success, 2 configuration error, 3 numerical-resolution
error, 4 acceptance-check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import checks as _checks
from .config import ConfigError, RunConfig
from .distorted_transform import DistortedTransform
from .fock_sim import (
    FockSpace,
    WickKernel,
    kernel_norm,
    modeset_from_gl,
    quadratic_evolution,
    weighted_wick_norm,
    zero_mode_growth_ratio,
    zero_mode_norms,
)
from .io import (
    write_csv,
    write_fock_kernel,
    write_json,
    write_kernel_binary,
    write_kernel_csv,
    write_spectral_cache,
    write_state_json,
)
from .mass_shift import dhn_closed_form, extrapolate_mass_shift, mass_shift_grid, naive_mass_shift, sweep_mass_shift
from .mollifier import Mollifier, gamma_kappa
from .params import Grid, GridResolutionError, momentum_grid
from .regularization_kernels import build_s_matrix, kernel_A3, log_det_factor, zero_point_discrepancy
from .spectral_core import discrete_eigenpairs, eigen_residual, generalized_eigenfunction, scattering_phase
from .wavepackets import WavePacket, chi_eval


def _provenance(cfg: RunConfig, **extra):
    base = {"m": cfg.m, "g": cfg.g, "grid_n": cfg.grid_n, "grid_x_max": cfg.grid_x_factor / cfg.m}
    base.update(extra)
    return base


def cmd_spectrum(cfg: RunConfig, out: Path, fmts) -> int:
    p = cfg.model()
    grid = cfg.grid()
    kgrid = momentum_grid(p, k_max=cfg.k_max_factor * p.m, order=cfg.k_order)
    zero, shape = discrete_eigenpairs(grid, p)
    w = grid.weights
    report = {
        "provenance": _provenance(cfg, k_max=kgrid.k_max),
        "psi0_norm": float(np.sqrt(np.dot(zero.values**2, w))),
        "psi1_norm": float(np.sqrt(np.dot(shape.values**2, w))),
        "psi0_psi1_overlap": float(np.dot(zero.values * w, shape.values)),
    }
    dt = DistortedTransform(grid, kgrid, p)
    u = np.exp(-((grid.nodes * p.m) ** 2) / 2.0) * np.cos(p.m * grid.nodes)
    rec = dt.inverse(dt.forward(u))
    report["completeness_residual_l2"] = float(grid.norm(rec - u))

    ks = np.array(sorted({0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, kgrid.k_max / p.m})) * p.m
    rows = []
    stride = max(1, grid.n // 256)
    for k in ks:
        st = generalized_eigenfunction(k, grid, p)
        report.setdefault("eigen_residuals", {})[f"{k:g}"] = eigen_residual(st, p)
        for j in range(0, grid.n, stride):
            rows.append((k, st.delta, grid.nodes[j], st.values[j].real, st.values[j].imag))
    if "csv" in fmts:
        write_csv(out / "phases.csv", ("k", "delta", "grid_n", "k_max"),
                  [(k, float(scattering_phase(k, p)), grid.n, kgrid.k_max) for k in ks])
        write_csv(out / "spectral.csv", ("k", "re_delta", "x", "re_E", "im_E"), rows)
        E = np.array([generalized_eigenfunction(k, grid, p).values[::stride] for k in ks])
        write_spectral_cache(out / "spectral.bin", ks, scattering_phase(ks, p), grid.nodes[::stride], E)
    if "json" in fmts:
        write_json(out / "spectrum_report.json", report)
    return 0


def cmd_transform(cfg: RunConfig, out: Path, fmts) -> int:
    p = cfg.model()
    grid = cfg.grid()
    kgrid = momentum_grid(p, k_max=cfg.k_max_factor * p.m, order=cfg.k_order)
    dt = DistortedTransform(grid, kgrid, p)
    u = np.exp(-((grid.nodes * p.m - 1.0) ** 2)) * np.cos(2.0 * p.m * grid.nodes)
    sc = dt.forward(u)
    rec = dt.inverse(sc)
    n2 = float(np.real(grid.dot(u, u)))
    report = {
        "provenance": _provenance(cfg, k_max=kgrid.k_max),
        "c0": sc.c0,
        "c1": sc.c1,
        "parseval_rel_err": abs(sc.norm_squared() - n2) / n2,
        "roundtrip_l2_err": float(grid.norm(rec - u)),
        "warnings": sc.warnings,
    }
    if "csv" in fmts:
        order = np.argsort(kgrid.nodes)
        write_csv(out / "transform.csv", ("k", "re_u_tilde", "im_u_tilde"),
                  [(kgrid.nodes[i], sc.u_tilde[i].real, sc.u_tilde[i].imag) for i in order])
    if "json" in fmts:
        write_json(out / "transform_report.json", report)
    return 0


def cmd_kernels(cfg: RunConfig, out: Path, fmts) -> int:
    p = cfg.model()
    grid = Grid(x_max=20.0 / p.m, n=min(cfg.grid_n, 1024))
    s0 = build_s_matrix(0.0, grid, p, theta_ref=p.m**2)
    s_theta = s0.shift(cfg.theta)
    lam = s0.eigenvalues
    report = {
        "provenance": _provenance(cfg, kernel_grid_n=grid.n, theta=cfg.theta),
        "s0_min_eigenvalue": float(lam[np.argmin(np.abs(lam + 1.0))]),
        "s0_trace_norm": s0.trace_norm,
        "s0_tail_fraction_200": s0.tail_fraction(200),
        "log_det_factor_theta": log_det_factor(s_theta),
    }
    if "csv" in fmts:
        write_csv(out / "s_eigenvalues.csv", ("n", "lambda", "theta", "kernel_grid_n"),
                  [(i, float(v), 0.0, grid.n) for i, v in enumerate(lam)])
        a3 = kernel_A3(cfg.theta, grid, p)
        write_kernel_binary(out / "a3_kernel.bin", a3.matrix)
        stride = max(1, grid.n // 64)
        write_kernel_csv(out / "a3_kernel_coarse.csv", a3.matrix[::stride, ::stride])
    if "json" in fmts:
        write_json(out / "kernels_report.json", report)
    return 0


def cmd_mass_shift(cfg: RunConfig, out: Path, fmts) -> int:
    p = cfg.model()
    mol = Mollifier()
    grid = mass_shift_grid(p, n=min(cfg.grid_n, 1024))
    rows = sweep_mass_shift(mol, cfg.kappa_list, grid, p)
    ex = extrapolate_mass_shift([(r.kappa, r.total_half) for r in rows])
    naive = naive_mass_shift(p)
    table = [
        (r.kappa, r.discrete_term, r.j0, r.j1, r.j2, r.j3, r.c0_term, r.total_half, ex.value, grid.n)
        for r in rows
    ]
    if "csv" in fmts:
        write_csv(out / "mass_shift.csv",
                  ("kappa", "discrete", "j0", "j1", "j2", "j3", "c0", "total_half", "extrapolated", "grid_n"),
                  table)
    if "json" in fmts:
        write_json(out / "mass_shift_report.json", {
            "provenance": _provenance(cfg, mass_grid_n=grid.n, kappa_list=list(cfg.kappa_list)),
            "naive": naive,
            "extrapolated": ex.value,
            "closed_form": dhn_closed_form(p),
            "fit_slope": ex.slope,
            "fit_residual": ex.residual,
            "fit_warnings": list(ex.warnings),
            "gamma_kappa": {f"{r.kappa:g}": gamma_kappa(mol, p, r.kappa) for r in rows},
            "rows": [r.__dict__ for r in rows],
        })
    return 0


def cmd_wavepacket(cfg: RunConfig, out: Path, fmts) -> int:
    p = cfg.model()
    sigma = 1.0 / np.sqrt(2.0 * p.m_cl)  # tau = 1/m-scale packet
    wp = WavePacket(0, sigma, p)
    Q = np.linspace(-30 * sigma, 30 * sigma, 601)
    rows = []
    norms = []
    for t in np.linspace(0.0, 3.0 * wp.tau, 7):
        chi = chi_eval(wp, t, Q)
        nrm = float(np.sum(np.abs(chi) ** 2) * (Q[1] - Q[0]))
        norms.append((t, nrm))
        for j in range(0, Q.size, 8):
            rows.append((t, Q[j], chi[j].real, chi[j].imag, abs(chi[j]) ** 2))
    if "csv" in fmts:
        write_csv(out / "wavepacket.csv", ("t", "Q", "re_chi", "im_chi", "abs2"), rows)
    if "json" in fmts:
        write_json(out / "wavepacket_report.json", {
            "provenance": _provenance(cfg, sigma=sigma, tau=wp.tau),
            "norms": norms,
        })
    return 0


def cmd_fock(cfg: RunConfig, out: Path, fmts) -> int:
    p = cfg.model()
    rng = np.random.default_rng(cfg.seed)
    modes = modeset_from_gl(p, M=cfg.fock_modes, k_max=cfg.fock_k_max * p.m)
    space = FockSpace(modes, cfg.fock_n_max)
    rows = []
    violations = 0
    for trial in range(20):
        m_out, n_in = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        arr = rng.normal(size=(modes.n_modes,) * (m_out + n_in)) + 1j * rng.normal(size=(modes.n_modes,) * (m_out + n_in))
        wk = WickKernel(m_out=m_out, n_in=n_in, array=arr)
        lhs, rhs = weighted_wick_norm(wk, space), kernel_norm(wk)
        violations += int(lhs > rhs * (1 + 1e-9))
        rows.append((trial, m_out, n_in, lhs, rhs, cfg.fock_modes, cfg.fock_n_max))
        if trial == 0:
            write_fock_kernel(out / "wick_kernel_0.bin", wk)
    vac = space.vacuum()
    ev = quadratic_evolution(vac, 1.0 / p.m)
    write_state_json(out / "vacuum_state.json", ev)
    a, b = zero_mode_norms(p)
    if "csv" in fmts:
        write_csv(out / "wick_bounds.csv",
                  ("trial", "m_out", "n_in", "weighted_norm", "kernel_norm", "modes", "n_max"), rows)
    if "json" in fmts:
        write_json(out / "fock_report.json", {
            "provenance": _provenance(cfg, fock_modes=cfg.fock_modes, n_max=cfg.fock_n_max),
            "bound_violations": violations,
            "space_dim": space.dim,
            "zero_mode_norms": [a, b],
            "growth_ratio_t1000": zero_mode_growth_ratio(1e3 / p.m, p),
        })
    return 0 if violations == 0 else 4


def cmd_check(cfg: RunConfig, out: Path, fmts) -> int:
    results = _checks.run_all(cfg)
    if "json" in fmts:
        write_json(out / "acceptance_report.json",
                   {r.name: {"passed": r.passed, "details": r.details} for r in results})
    return 0 if all(r.passed for r in results) else 4


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "transform": cmd_transform,
    "kernels": cmd_kernels,
    "mass-shift": cmd_mass_shift,
    "wavepacket": cmd_wavepacket,
    "fock": cmd_fock,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kinkspec", description=__doc__)
    ap.add_argument("command", choices=sorted(_COMMANDS))
    ap.add_argument("--config", type=str, default=None, help="run configuration file (INI sections)")
    ap.add_argument("--out", type=str, default=None, help="output directory")
    ap.add_argument("--format", type=str, default=None, help="csv, json or csv,json")
    ap.add_argument("--kappa-list", type=str, default=None, help="comma-separated cutoffs (units of m)")
    ap.add_argument("--seed", type=int, default=None, help="seed for randomized bound tests")
    ap.add_argument("--check", action="store_true", help="run the acceptance checks after the command")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        if args.format:
            cfg.formats = tuple(v.strip() for v in args.format.split(","))
        if args.kappa_list:
            cfg.kappa_list = tuple(float(v) * cfg.m for v in args.kappa_list.split(","))
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out:
            cfg.out_dir = args.out
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        rc = _COMMANDS[args.command](cfg, out, cfg.formats)
        if args.check and args.command != "check":
            rc = max(rc, cmd_check(cfg, out, cfg.formats))
        return rc
    except GridResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        if "too coarse" in str(exc) or "resolve" in str(exc):
            print(f"resolution error: {exc}", file=sys.stderr)
            return 3
        raise


if __name__ == "__main__":
    sys.exit(main())
