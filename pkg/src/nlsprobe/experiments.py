"""Desk-scale end-to-end experiments: high-low decomposition runs, cutoff
scaling sweeps of the energy bound, and scattering diagnostics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .estimates import loglog_fit, mann_kendall
from .grid import Grid, SpectralField
from .norms import sobolev_norm
from .projectors import dyadic_multiplier, free_propagate
from .randomize import RandomizationPlan, randomize
from .solver import (
    SolverConfig,
    Trajectory,
    energy,
    evolve_perturbation,
    evolve_with_observer,
    mass,
)


def recurrence_time(grid: Grid) -> float:
    """Torus revival scale L^2 / (2 pi); dispersion diagnostics are only
    meaningful over windows shorter than this."""
    return grid.box_length**2 / (2.0 * np.pi)


def _clamp_horizon(grid: Grid, config: SolverConfig) -> SolverConfig:
    cap = 0.5 * recurrence_time(grid)
    if config.t_final > cap:
        warnings.warn(
            f"horizon {config.t_final:g} clamped to half the box recurrence {cap:g}"
        )
        return replace(config, t_final=cap)
    return config


@dataclass(frozen=True)
class HighLowSetup:
    """Inputs of one high-low decomposition run."""

    f: SpectralField
    s: float
    n0: int
    seed: int
    plan: RandomizationPlan
    config: SolverConfig

    def __post_init__(self):
        n0 = self.n0
        if n0 < 1 or (n0 & (n0 - 1)) != 0:
            raise ValueError(f"cutoff must be dyadic, got {n0}")
        if 2 * n0 > self.f.grid.nyquist:
            raise ValueError(
                f"cutoff {n0} too close to the grid Nyquist {self.f.grid.nyquist:g}"
            )


@dataclass
class EnergyTrack:
    times: np.ndarray
    energy: np.ndarray
    mass: np.ndarray
    ratio: np.ndarray  # energy / n0^(2(1-s))
    n0: int
    s: float

    @property
    def max_ratio(self) -> float:
        return float(self.ratio.max())

    @property
    def sup_energy(self) -> float:
        return float(self.energy.max())


@dataclass
class HighLowResult:
    setup: HighLowSetup
    track: EnergyTrack
    trajectory: Trajectory | None
    v0: SpectralField
    w0: SpectralField
    growth_flag: bool  # max normalized ratio exceeded 2x its initial value


def split_data(sample: SpectralField, n0: int):
    """Low piece (smooth cutoff at n0) and the complementary high piece.

    The high projector is identity minus the low one, so the two overlap on
    one octave; the high piece is supported in |xi| >= n0/2 by the cutoff
    profile.
    """
    grid = sample.grid
    low = dyadic_multiplier(grid, float(n0), "leq")
    shat = sample.frequency()
    w0 = shat.with_values(shat.values * low)
    v0 = shat.with_values(shat.values * (1.0 - low))
    return w0, v0


def highlow_run(setup: HighLowSetup, keep_fields: bool = False) -> HighLowResult:
    """Randomize, split at the cutoff, evolve the low piece against the
    exactly-propagated high flow, and track the normalized energy."""
    grid = setup.f.grid
    config = _clamp_horizon(grid, setup.config)
    sample = randomize(setup.f, setup.plan, seed=setup.seed)
    w0, v0 = split_data(sample, setup.n0)

    times, energies, masses = [], [], []

    def on_save(t, what):
        f = SpectralField(grid, what, "frequency", time=t)
        times.append(t)
        energies.append(energy(f, mu=config.mu))
        masses.append(mass(f))

    if keep_fields:
        traj = evolve_perturbation(w0, v0, config)
        for t, f in zip(traj.times, traj.fields):
            times.append(float(t))
            energies.append(energy(f, mu=config.mu))
            masses.append(mass(f))
    else:
        evolve_with_observer(w0, v0, config, on_save)
        traj = None

    norm_scale = float(setup.n0) ** (2.0 * (1.0 - setup.s))
    track = EnergyTrack(
        times=np.asarray(times),
        energy=np.asarray(energies),
        mass=np.asarray(masses),
        ratio=np.asarray(energies) / norm_scale,
        n0=setup.n0,
        s=setup.s,
    )
    growth_flag = bool(track.max_ratio > 2.0 * track.ratio[0]) if track.ratio[0] > 0 else False
    return HighLowResult(
        setup=setup, track=track, trajectory=traj, v0=v0, w0=w0, growth_flag=growth_flag
    )


@dataclass
class SweepResult:
    rows: list  # dicts: n0, seed, sup_energy, initial_energy
    slope: float
    intercept: float
    r2: float
    predicted_slope: float
    slope_ok: bool

    def table(self):
        header = ["n0", "seed", "sup_energy", "initial_energy", "predicted_slope"]
        rows = [
            [row["n0"], row["seed"], row["sup_energy"], row["initial_energy"],
             self.predicted_slope]
            for row in self.rows
        ]
        return header, rows


def _sweep_cell(args) -> dict:
    f, s, n0, seed, plan, config = args
    setup = HighLowSetup(f=f, s=s, n0=int(n0), seed=int(seed), plan=plan, config=config)
    result = highlow_run(setup)
    return {
        "n0": int(n0),
        "seed": int(seed),
        "sup_energy": result.track.sup_energy,
        "initial_energy": float(result.track.energy[0]),
    }


def n0_sweep(
    f: SpectralField,
    s: float,
    n0_list,
    seeds,
    plan: RandomizationPlan,
    config: SolverConfig,
    slack: float = 0.3,
    jobs: int = 1,
) -> SweepResult:
    """Fit log sup_t E(w) against log n0 and compare with the 2(1-s) scaling.

    Sweep cells are independent; with jobs > 1 they run in worker processes,
    collected in submission order so the result is reproducible.
    """
    n0_list = list(n0_list)
    if len(n0_list) < 2:
        raise ValueError("degenerate sweep: need at least two cutoff values")
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    cells = [(f, s, n0, seed, plan, config) for n0 in n0_list for seed in seeds]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(cell) for cell in cells]
    fit = loglog_fit([r["n0"] for r in rows], [r["sup_energy"] for r in rows])
    predicted = 2.0 * (1.0 - s)
    return SweepResult(
        rows=rows,
        slope=fit.slope,
        intercept=fit.intercept,
        r2=fit.r2,
        predicted_slope=predicted,
        slope_ok=bool(fit.slope <= predicted + slack),
    )


@dataclass
class ScatteringDiagnostic:
    times: np.ndarray
    dispersion_matrix: np.ndarray  # D[i, j] = || e^{-t_i L} w_i - e^{-t_j L} w_j ||_{H^1}
    trend: float  # sign-trend statistic of D(t_i, t_end) in i
    non_increasing: bool


def scattering_diagnostic(
    w_traj: Trajectory, indices=None, trend_threshold: float = 0.0
) -> ScatteringDiagnostic:
    """Cauchy matrix of the undone-flow states; a settling solution makes
    D(t, t_end) shrink as t grows."""
    if len(w_traj) < 3:
        raise ValueError("need at least three saved samples")
    span = w_traj.times[-1] - w_traj.times[0]
    if span > 0.5 * recurrence_time(w_traj.grid) * (1.0 + 1e-12):
        warnings.warn("window exceeds half the box recurrence; trend may be spurious")
    if indices is None:
        indices = range(len(w_traj))
    indices = list(indices)
    times = w_traj.times[indices]
    undone = [
        free_propagate(w_traj.fields[i], -float(w_traj.times[i])) for i in indices
    ]
    n = len(indices)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            diff = undone[i] - undone[j]
            D[i, j] = D[j, i] = sobolev_norm(diff, 1.0)
    tail = D[:-1, -1]
    trend = mann_kendall(tail)
    return ScatteringDiagnostic(
        times=times,
        dispersion_matrix=D,
        trend=trend,
        non_increasing=bool(trend <= trend_threshold),
    )
