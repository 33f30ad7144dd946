"""Command-line entry points.

Configuration comes from an optional JSON file (--config) with per-key flag
overrides; flags win.  Unknown keys, in either source, are rejected by name.
Exit codes: 0 success, 1 validation failure, 2 numerical abort, 3 property
or assertion failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .estimates import (
    bilinear_ratio,
    flow_ensemble_stats,
    local_smoothing_ratio,
    radial_square_sobolev_ratio,
    strichartz_ratio,
)
from .fieldio import read_checkpoint, write_checkpoint, write_field
from .grid import Grid, SpectralField, build_grid, l2_norm
from .morawetz import interaction_functional, morawetz_report
from .norms import (
    critical_proxy_norm,
    dispersive_norm,
    mixed_norm,
    sobolev_norm,
    uniform_norm,
)
from .projectors import free_propagate, make_unit_partition
from .randomize import make_plan, randomize, sum_cube_l2_squared, synthesize_data, tail_check
from .reporting import (
    output_root,
    run_directory,
    sha256_file,
    write_csv,
    write_json,
    write_manifest,
)
from .solver import (
    SolverConfig,
    energy,
    evolve_full,
    evolve_perturbation,
    free_trajectory,
    mass,
    reconstruct_sum,
)
from .experiments import (
    HighLowSetup,
    highlow_run,
    n0_sweep,
    scattering_diagnostic,
    split_data,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_PROPERTY = 3


class CliError(Exception):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    if str(text).lower() in ("1", "true", "yes", "on"):
        return True
    if str(text).lower() in ("0", "false", "no", "off"):
        return False
    raise CliError(f"expected a boolean, got {text!r}")


_GRID_KEYS = {
    "dim": (int, 1, "spatial dimension"),
    "n": (int, 64, "points per axis (power of two)"),
    "box_length": (float, 2.0 * np.pi, "physical period L"),
}
_SOLVER_KEYS = {
    "dt": (float, 1e-3, "time step"),
    "t_final": (float, 1.0, "horizon"),
    "mu": (float, 1.0, "nonlinearity sign (+1 defocusing, -1 focusing, 0 linear)"),
    "dealias": (_bool, True, "2/3-rule dealiasing"),
    "save_stride": (int, 10, "steps between saves"),
    "scheme": (str, "strang", "splitting scheme: strang | lie"),
}
_DATA_KEYS = {
    "preset": (str, "plane-wave", "plane-wave | gaussian | power-law | compact-bump"),
    "amplitude": (float, 1.0, "data amplitude"),
    "mode_k": (int, 1, "plane-wave lattice mode index"),
    "sigma": (float, 0.5, "gaussian width"),
    "s": (float, 0.5, "target regularity"),
    "epsilon": (float, 0.05, "regularity margin / minus-exponent surrogate"),
    "radial": (_bool, True, "radial synthesized data"),
    "phase_seed": (int, 0, "phase stream seed"),
    "band_limit": (float, 0.0, "zero modes above this |xi| (0 = off)"),
}

_SCHEMAS = {
    "simulate": {
        **_GRID_KEYS,
        **_SOLVER_KEYS,
        **_DATA_KEYS,
        "resume": (str, "", "checkpoint prefix to resume from"),
    },
    "perturb": {
        **_GRID_KEYS,
        **_SOLVER_KEYS,
        **_DATA_KEYS,
        "n0": (int, 4, "high-low cutoff"),
        "seed": (int, 0, "randomization seed"),
        "cross_check": (_bool, True, "also run the full equation and compare"),
    },
    "randomize": {
        **_GRID_KEYS,
        **_DATA_KEYS,
        "seed": (int, 0, "randomization seed"),
        "emit_field": (_bool, True, "write the sampled field"),
    },
    "norms": {
        **_GRID_KEYS,
        **_DATA_KEYS,
        "seed": (int, 0, "randomization seed"),
        "t_final": (float, 1.0, "flow horizon"),
        "n_times": (int, 17, "flow samples"),
        "norm_s": (float, 0.4, "regularity for the composite bundles"),
    },
    "morawetz": {
        **_GRID_KEYS,
        **_SOLVER_KEYS,
        **_DATA_KEYS,
        "n0": (int, 0, "high-low cutoff (0 = full equation, no linear flow)"),
        "seed": (int, 0, "randomization seed"),
    },
    "inequality": {
        **_GRID_KEYS,
        "kind": (str, "strichartz",
                 "strichartz | bilinear | local-smoothing | radial-square | tail | ensemble"),
        "q": (float, 4.0, "time exponent"),
        "r": (float, 3.0, "space exponent"),
        "t_final": (float, 1.0, "flow horizon"),
        "n_times": (int, 33, "flow samples"),
        "seeds": (int, 20, "seed count"),
        "scale_n": (int, 16, "high block scale"),
        "scale_m": (int, 2, "low block scale"),
        "s": (float, 0.5, "data regularity"),
        "epsilon": (float, 0.05, "regularity margin"),
        "coeff_len": (int, 64, "tail-check coefficient count"),
    },
    "highlow": {
        **_GRID_KEYS,
        **_SOLVER_KEYS,
        **_DATA_KEYS,
        "n0": (int, 4, "high-low cutoff"),
        "seed": (int, 0, "randomization seed"),
    },
    "sweep": {
        **_GRID_KEYS,
        **_SOLVER_KEYS,
        **_DATA_KEYS,
        "n0_list": (str, "4,8,16", "comma-separated cutoffs"),
        "seeds": (int, 3, "seeds per cutoff"),
        "slack": (float, 0.3, "allowed slope excess over 2(1-s)"),
        "jobs": (int, 1, "parallel sweep cells"),
    },
    "scatter": {
        **_GRID_KEYS,
        **_SOLVER_KEYS,
        **_DATA_KEYS,
        "n0": (int, 4, "high-low cutoff"),
        "seed": (int, 0, "randomization seed"),
        "trend_threshold": (float, 0.0, "max allowed trend statistic"),
    },
    "selftest": {},
}


def _parse_args(argv):
    if not argv or argv[0] in ("-h", "--help"):
        _print_usage()
        raise SystemExit(EXIT_OK)
    command = argv[0]
    if command not in _SCHEMAS:
        raise CliError(f"unknown subcommand {command!r}; one of {sorted(_SCHEMAS)}")
    schema = _SCHEMAS[command]
    values = {key: default for key, (_, default, _) in schema.items()}

    # config file first, then flag overrides
    rest = list(argv[1:])
    out_dir = None
    i = 0
    overrides = {}
    while i < len(rest):
        token = rest[i]
        if not token.startswith("--"):
            raise CliError(f"unexpected argument {token!r}")
        key = token[2:].replace("-", "_")
        if key == "help":
            _print_command_help(command, schema)
            raise SystemExit(EXIT_OK)
        if i + 1 >= len(rest):
            raise CliError(f"flag --{key} is missing a value")
        val = rest[i + 1]
        i += 2
        if key == "config":
            try:
                loaded = json.loads(Path(val).read_text())
            except OSError as exc:
                raise CliError(f"cannot read config file: {exc}")
            except json.JSONDecodeError as exc:
                raise CliError(f"config file is not valid JSON: {exc}")
            for ckey, cval in loaded.items():
                if ckey not in schema:
                    raise CliError(f"unknown config key {ckey!r} for {command}")
                values[ckey] = schema[ckey][0](cval)
            continue
        if key == "out":
            out_dir = val
            continue
        if key not in schema:
            raise CliError(f"unknown flag --{key} for {command}")
        overrides[key] = val
    for key, val in overrides.items():
        values[key] = schema[key][0](val)
    return command, values, out_dir


def _print_usage():
    print("usage: nlsprobe <command> [--config FILE] [--out DIR] [--key value ...]")
    print("commands:", ", ".join(sorted(_SCHEMAS)))
    print(f"version {__version__}")


def _print_command_help(command, schema):
    print(f"nlsprobe {command}")
    for key, (_, default, help_text) in schema.items():
        print(f"  --{key:<14} {help_text} (default {default})")


def _build_data(grid: Grid, cfg: dict) -> SpectralField:
    preset = cfg["preset"]
    amp = cfg["amplitude"]
    if preset == "plane-wave":
        x = grid.x_axis
        xi0 = grid.xi_axis[cfg["mode_k"] % grid.n]
        vals = amp * np.exp(1j * xi0 * x)
        for _ in range(grid.dim - 1):
            vals = vals[..., None] * np.ones(grid.n)
        return SpectralField(grid, vals)
    if preset == "gaussian":
        r = grid.radius()
        return SpectralField(grid, amp * np.exp(-(r**2) / (2.0 * cfg["sigma"] ** 2)))
    if preset in ("power-law", "compact-bump"):
        band = cfg["band_limit"] if cfg["band_limit"] > 0 else None
        return synthesize_data(
            grid,
            cfg["s"],
            cfg["epsilon"],
            profile=preset,
            radial=cfg["radial"],
            phase_seed=cfg["phase_seed"],
            band_limit=band,
            amplitude=amp,
        )
    raise CliError(f"unknown preset {preset!r}")


def _grid(cfg) -> Grid:
    return build_grid(cfg["dim"], cfg["n"], cfg["box_length"])


def _solver_config(cfg) -> SolverConfig:
    return SolverConfig(
        dt=cfg["dt"],
        t_final=cfg["t_final"],
        mu=cfg["mu"],
        dealias=cfg["dealias"],
        save_stride=cfg["save_stride"],
        scheme=cfg["scheme"],
    )


def _conserved_rows(traj, mu):
    m0 = mass(traj.fields[0])
    e0 = energy(traj.fields[0], mu)
    rows = []
    for t, f in zip(traj.times, traj.fields):
        m = mass(f)
        e = energy(f, mu)
        rows.append(
            [t, m, e, abs(m - m0) / m0 if m0 else 0.0,
             abs(e - e0) / abs(e0) if e0 else 0.0]
        )
    return rows


def _cmd_simulate(cfg, outdir) -> int:
    grid = _grid(cfg)
    config = _solver_config(cfg)
    input_hashes = {}
    if cfg["resume"]:
        field, sidecar = read_checkpoint(cfg["resume"])
        input_hashes["checkpoint"] = sha256_file(Path(cfg["resume"]).with_suffix(".specf"))
        t0 = field.time
        remaining = config.t_final - t0
        if remaining <= 0:
            raise CliError("checkpoint is already at or past t_final")
        run_cfg = SolverConfig(
            dt=config.dt,
            t_final=remaining,
            mu=config.mu,
            dealias=config.dealias,
            save_stride=config.save_stride,
            scheme=config.scheme,
        )
        u0 = field
    else:
        t0 = 0.0
        run_cfg = config
        u0 = _build_data(grid, cfg)
    traj = evolve_full(u0, run_cfg)
    rows = _conserved_rows(traj, config.mu)
    for row in rows:
        row[0] += t0
    write_csv(outdir / "conserved.csv",
              ["time", "mass", "energy", "mass_drift", "energy_drift"], rows)
    final = traj.fields[-1].with_values(traj.fields[-1].values, time=t0 + traj.t_final)
    write_field(outdir / "final.specf", final)
    write_checkpoint(outdir / "checkpoint", final, cfg,
                     {"mass": mass(final), "energy": energy(final, config.mu)})
    write_manifest(outdir, "simulate", cfg, input_hashes)
    if traj.aborted:
        print(f"numerical abort at t = {traj.t_final + t0:.6g}")
        return EXIT_NUMERICAL
    print(f"simulate: {len(traj)} saves -> {outdir}")
    return EXIT_OK


def _cmd_perturb(cfg, outdir) -> int:
    grid = _grid(cfg)
    config = _solver_config(cfg)
    f = _build_data(grid, cfg)
    plan = make_plan(grid)
    sample = randomize(f, plan, seed=cfg["seed"])
    w0, v0 = split_data(sample, cfg["n0"])
    traj = evolve_perturbation(w0, v0, config)
    rows = _conserved_rows(traj, config.mu)
    write_csv(outdir / "w_conserved.csv",
              ["time", "mass", "energy", "mass_drift", "energy_drift"], rows)
    report = {"n0": cfg["n0"], "seed": cfg["seed"], "aborted": traj.aborted}
    if cfg["cross_check"]:
        full = evolve_full(sample, config)
        rec = reconstruct_sum(traj)
        diffs = [l2_norm(a - b) for a, b in zip(rec.fields, full.fields)]
        report["cross_check_max_l2"] = max(diffs)
    write_json(outdir / "perturb.json", report)
    write_manifest(outdir, "perturb", cfg)
    if traj.aborted:
        return EXIT_NUMERICAL
    print(f"perturb: {len(traj)} saves -> {outdir}")
    return EXIT_OK


def _cmd_randomize(cfg, outdir) -> int:
    grid = _grid(cfg)
    f = _build_data(grid, cfg)
    plan = make_plan(grid)
    sample = randomize(f, plan, seed=cfg["seed"])
    stats = {
        "seed": cfg["seed"],
        "norms": {
            "l2_base": l2_norm(f),
            "l2_sample": l2_norm(sample),
            "sum_cube_l2_squared": sum_cube_l2_squared(f, plan),
        },
        "flags": {},
    }
    write_json(outdir / "ensemble.json", stats)
    if cfg["emit_field"]:
        write_field(outdir / "sample.specf", sample)
    write_manifest(outdir, "randomize", cfg)
    print(f"randomize -> {outdir}")
    return EXIT_OK


def _cmd_norms(cfg, outdir) -> int:
    grid = _grid(cfg)
    f = _build_data(grid, cfg)
    plan = make_plan(grid)
    sample = randomize(f, plan, seed=cfg["seed"])
    times = np.linspace(0.0, cfg["t_final"], cfg["n_times"])
    traj = free_trajectory(sample, times)
    s = cfg["norm_s"]
    disp = dispersive_norm(traj, s)
    disp_ext = dispersive_norm(traj, s, gain_term=True)
    unif = uniform_norm(traj, s)
    proxy = critical_proxy_norm(traj, 0.5)
    report = {}
    for name, comp in (
        ("dispersive", disp),
        ("dispersive_extended", disp_ext),
        ("uniform", unif),
        ("critical_proxy", proxy),
    ):
        report[name] = {
            "value": comp.value,
            "constituents": comp.constituents,
            "epsilon": comp.epsilon,
            "caps": comp.cap,
        }
    report["sobolev_s"] = {"value": sobolev_norm(sample, s), "constituents": {},
                           "epsilon": 0.0, "caps": 0.0}
    write_json(outdir / "norms.json", report)
    write_manifest(outdir, "norms", cfg)
    print(f"norms -> {outdir}")
    return EXIT_OK


def _cmd_morawetz(cfg, outdir) -> int:
    grid = _grid(cfg)
    config = _solver_config(cfg)
    f = _build_data(grid, cfg)
    if cfg["n0"] > 0:
        plan = make_plan(grid)
        sample = randomize(f, plan, seed=cfg["seed"])
        w0, v0 = split_data(sample, cfg["n0"])
        traj = evolve_perturbation(w0, v0, config)
        v_traj = free_trajectory(v0, traj.times)
    else:
        traj = evolve_full(f, config)
        v_traj = None
    report = morawetz_report(traj, v_traj, mu=config.mu)
    write_json(outdir / "morawetz.json", report.to_dict())
    write_csv(
        outdir / "morawetz.csv",
        ["time", "M", "dM_dt", "flux_residual"],
        [
            [t, m, d, r]
            for t, m, d, r in zip(
                report.times, report.functional, report.d_functional_dt,
                report.flux_residual,
            )
        ],
    )
    write_manifest(outdir, "morawetz", cfg)
    if traj.aborted:
        return EXIT_NUMERICAL
    print(f"morawetz: ratio {report.ratio:.6g} -> {outdir}")
    return EXIT_OK


def _cmd_inequality(cfg, outdir) -> int:
    grid = _grid(cfg)
    kind = cfg["kind"]
    code = EXIT_OK
    if kind == "strichartz":
        f = synthesize_data(grid, cfg["s"], cfg["epsilon"], radial=False,
                            phase_seed=1, band_limit=grid.nyquist / 2.0)
        ratio = strichartz_ratio(f, cfg["q"], cfg["r"], cfg["t_final"], cfg["n_times"])
        write_json(outdir / "fit.json", {"kind": kind, "q": cfg["q"], "r": cfg["r"],
                                         "ratio": ratio})
    elif kind == "bilinear":
        sweep = bilinear_ratio(
            grid, cfg["scale_n"], cfg["scale_m"], cfg["q"], cfg["r"],
            cfg["seeds"], cfg["t_final"], cfg["n_times"],
        )
        header, rows = sweep.table()
        write_csv(outdir / "sweep.csv", header, rows)
        ratios = sweep.column("ratio")
        write_json(outdir / "fit.json", {
            "kind": kind, "median_ratio": float(np.median(ratios)),
            "dispersion": float(ratios.max() / ratios.min()),
        })
    elif kind == "local-smoothing":
        f = synthesize_data(grid, cfg["s"], cfg["epsilon"], radial=True)
        fhat = f.frequency().values.copy()
        fhat[(0,) * grid.dim] = 0.0
        f = f.with_values(fhat)
        r_list = [grid.box_length / 16.0, grid.box_length / 8.0, grid.box_length / 4.0]
        sweep = local_smoothing_ratio(f, r_list, cfg["t_final"], cfg["n_times"])
        header, rows = sweep.table()
        write_csv(outdir / "sweep.csv", header, rows)
        write_json(outdir / "fit.json", {
            "kind": kind, "sup_ratio": float(sweep.column("ratio").max()),
        })
    elif kind == "radial-square":
        f = synthesize_data(grid, cfg["s"], cfg["epsilon"], radial=True)
        plan = make_plan(grid)
        result = radial_square_sobolev_ratio(f, cfg["r"], cfg["epsilon"], plan)
        write_json(outdir / "fit.json", {"kind": kind, **result})
    elif kind == "tail":
        c = 1.0 / (1.0 + np.arange(cfg["coeff_len"]))
        report = tail_check(c, max(cfg["seeds"], 1000), require_negative_slope=False)
        write_csv(
            outdir / "tail.csv",
            ["lambda", "empirical_prob", "bound"],
            list(zip(report.lambdas, report.probs, report.reference)),
        )
        write_json(outdir / "fit.json", {
            "kind": kind,
            "quad_slope": report.quad_slope,
            "quad_r2": report.quad_r2,
            "linear_slope": report.linear_slope,
            "moments": report.moments,
        })
        if not report.slope_negative:
            code = EXIT_PROPERTY
    elif kind == "ensemble":
        f = synthesize_data(grid, cfg["s"], cfg["epsilon"], radial=True)
        plan = make_plan(grid)
        spec_s = cfg["s"]

        def norm_fn(traj):
            return mixed_norm(traj, 4.0, 6.0)

        stats = flow_ensemble_stats(
            f, plan, max(cfg["seeds"], 8), norm_fn, spec_s, cfg["t_final"],
            n_times=cfg["n_times"],
        )
        write_json(outdir / "fit.json", {
            "kind": kind,
            "moments": stats.moments,
            "normalized": stats.normalized,
            "monotone_ok": stats.monotone_ok,
            "tail_slope": stats.tail_slope,
        })
        if not stats.monotone_ok:
            code = EXIT_PROPERTY
    else:
        raise CliError(f"unknown inequality kind {kind!r}")
    write_manifest(outdir, "inequality", cfg)
    print(f"inequality {kind} -> {outdir}")
    return code


def _cmd_highlow(cfg, outdir) -> int:
    grid = _grid(cfg)
    config = _solver_config(cfg)
    f = _build_data(grid, cfg)
    plan = make_plan(grid)
    setup = HighLowSetup(f=f, s=cfg["s"], n0=cfg["n0"], seed=cfg["seed"],
                         plan=plan, config=config)
    result = highlow_run(setup)
    track = result.track
    write_csv(
        outdir / "energy_track.csv",
        ["time", "energy", "mass", "ratio"],
        list(zip(track.times, track.energy, track.mass, track.ratio)),
    )
    write_json(outdir / "highlow.json", {
        "n0": cfg["n0"], "seed": cfg["seed"], "s": cfg["s"],
        "max_ratio": track.max_ratio, "initial_ratio": float(track.ratio[0]),
        "growth_flag": result.growth_flag,
    })
    write_manifest(outdir, "highlow", cfg)
    print(f"highlow: max ratio {track.max_ratio:.6g} -> {outdir}")
    return EXIT_PROPERTY if result.growth_flag else EXIT_OK


def _cmd_sweep(cfg, outdir) -> int:
    grid = _grid(cfg)
    config = _solver_config(cfg)
    f = _build_data(grid, cfg)
    plan = make_plan(grid)
    n0_list = [int(tok) for tok in str(cfg["n0_list"]).split(",") if tok]
    result = n0_sweep(f, cfg["s"], n0_list, cfg["seeds"], plan, config,
                      slack=cfg["slack"], jobs=cfg["jobs"])
    header, rows = result.table()
    write_csv(outdir / "sweep.csv", header, rows)
    write_json(outdir / "fit.json", {
        "slope": result.slope, "intercept": result.intercept, "r2": result.r2,
        "predicted_slope": result.predicted_slope, "slope_ok": result.slope_ok,
    })
    write_manifest(outdir, "sweep", cfg)
    print(f"sweep: slope {result.slope:.4g} vs {result.predicted_slope:.4g} -> {outdir}")
    return EXIT_OK if result.slope_ok else EXIT_PROPERTY


def _cmd_scatter(cfg, outdir) -> int:
    grid = _grid(cfg)
    config = _solver_config(cfg)
    f = _build_data(grid, cfg)
    plan = make_plan(grid)
    sample = randomize(f, plan, seed=cfg["seed"])
    w0, v0 = split_data(sample, cfg["n0"])
    traj = evolve_perturbation(w0, v0, config)
    diag = scattering_diagnostic(traj, trend_threshold=cfg["trend_threshold"])
    n = len(diag.times)
    write_csv(
        outdir / "dispersion_matrix.csv",
        ["t_i"] + [f"d_{j}" for j in range(n)],
        [[diag.times[i]] + list(diag.dispersion_matrix[i]) for i in range(n)],
    )
    write_json(outdir / "scatter.json", {
        "trend": diag.trend, "non_increasing": diag.non_increasing,
    })
    write_manifest(outdir, "scatter", cfg)
    if traj.aborted:
        return EXIT_NUMERICAL
    print(f"scatter: trend {diag.trend:.4g} -> {outdir}")
    return EXIT_OK if diag.non_increasing else EXIT_PROPERTY


def _selftest() -> int:
    checks = []

    def check(name, value, tol):
        ok = value <= tol
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name}: {value:.3e} (tol {tol:.0e})")

    rng = np.random.default_rng(0)
    g1 = build_grid(1, 64, 2.0 * np.pi)
    g2 = build_grid(2, 32, 8.0 * np.pi)

    f = SpectralField(g2, rng.standard_normal(g2.shape) + 1j * rng.standard_normal(g2.shape))
    back = f.frequency().physical()
    check("transform round trip", float(np.abs(back.values - f.values).max()), 1e-12)
    check("parseval", abs(l2_norm(f) - l2_norm(f.frequency())) / l2_norm(f), 1e-10)

    part = make_unit_partition(g2)
    check("partition of unity", float(np.abs(part.partition_sum() - 1.0).max()), 1e-12)
    total = np.zeros(g2.shape)
    for k in part.centers():
        total = total + part.cube_multiplier(k)
    check("cube reconstruction", float(np.abs(total - 1.0).max()), 1e-10)

    from .projectors import block_multiplier, dyadic_scales

    blocks = sum(block_multiplier(g2, s) for s in dyadic_scales(g2, cap=None))
    check("dyadic reconstruction", float(np.abs(blocks - 1.0).max()), 1e-10)

    mode = SpectralField(g1, np.exp(1j * g1.xi_axis[2] * g1.x_axis))
    flowed = free_propagate(free_propagate(mode, 0.3), -0.3)
    check("propagator group law", l2_norm(flowed - mode.frequency()), 1e-12)

    A, k = 0.5, g1.xi_axis[1]
    u0 = SpectralField(g1, A * np.exp(1j * k * g1.x_axis))
    traj = evolve_full(u0, SolverConfig(dt=1e-3, t_final=0.2, mu=1.0, save_stride=200))
    exact = A * np.exp(1j * (k * g1.x_axis - (k**2 + A**2) * traj.t_final))
    check("plane wave", l2_norm(traj.fields[-1].physical() - SpectralField(g1, exact)), 1e-8)

    plan = make_plan(g2, seed=11)
    base = synthesize_data(g2, 0.5, 0.1, radial=True)
    s1 = randomize(base, plan).values
    s2 = randomize(base, plan).values
    check("randomization determinism", float(np.abs(s1 - s2).max()), 0.0)

    w = SpectralField(g2, rng.standard_normal(g2.shape) + 1j * rng.standard_normal(g2.shape))
    m_fft = interaction_functional(w, "fft")
    m_dir = interaction_functional(w, "direct")
    check("interaction functional fft vs direct",
          abs(m_fft - m_dir) / max(abs(m_dir), 1e-30), 1e-6)

    zero = SpectralField(g1, np.zeros(g1.shape, dtype=complex))
    z_traj = evolve_full(zero, SolverConfig(dt=1e-3, t_final=0.05, mu=1.0, save_stride=50))
    check("zero data stays zero", l2_norm(z_traj.fields[-1]), 0.0)

    return EXIT_OK if all(checks) else EXIT_PROPERTY


_COMMANDS = {
    "simulate": _cmd_simulate,
    "perturb": _cmd_perturb,
    "randomize": _cmd_randomize,
    "norms": _cmd_norms,
    "morawetz": _cmd_morawetz,
    "inequality": _cmd_inequality,
    "highlow": _cmd_highlow,
    "sweep": _cmd_sweep,
    "scatter": _cmd_scatter,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        command, cfg, out_dir = _parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:
        return int(exc.code or 0)
    if command == "selftest":
        return _selftest()
    try:
        outdir = (
            Path(out_dir) if out_dir is not None
            else run_directory(output_root(), command, cfg)
        )
        outdir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[command](cfg, outdir)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
