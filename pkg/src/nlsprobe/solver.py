"""Split-step Fourier integration of the cubic Schrodinger equation, the
perturbation equation driven by an exactly-propagated linear flow, conserved
quantities, and a fixed-point (Duhamel) iterator."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .grid import FREQUENCY, Grid, SpectralField, l2_norm

_SCHEMES = ("strang", "lie")


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_final: float
    mu: float = 1.0
    dealias: bool = True
    save_stride: int = 1
    scheme: str = "strang"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.save_stride < 1:
            raise ValueError("save_stride must be >= 1")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}")
        if self.mu not in (-1.0, 0.0, 1.0):
            raise ValueError("mu must be -1, 0, or +1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))


@dataclass
class Trajectory:
    """Time-stamped sequence of saved fields plus solver metadata."""

    grid: Grid
    times: np.ndarray
    fields: list
    config: SolverConfig | None = None
    kind: str = "full"  # full | perturbation | free | picard
    v0: SpectralField | None = None
    aborted: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if len(self.fields) != len(self.times):
            raise ValueError("times and fields length mismatch")

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(self.fields)

    @property
    def t_final(self) -> float:
        return float(self.times[-1])


def mass(field: SpectralField) -> float:
    """Conserved L^2 mass, integral of |u|^2."""
    return l2_norm(field) ** 2


def energy(field: SpectralField, mu: float = 1.0) -> float:
    """Conserved energy: (1/2)|grad u|^2 + (mu/4)|u|^4, integrated.

    The gradient term is summed in frequency, the quartic term in physical
    space.
    """
    grid = field.grid
    fhat = field.frequency().values
    kinetic = 0.5 * float(np.sum(grid.xi_squared * np.abs(fhat) ** 2)) * grid.cell_volume
    u = field.physical().values
    quartic = 0.25 * mu * float(np.sum(np.abs(u) ** 4)) * grid.cell_volume
    return kinetic + quartic


def dealias_mask(grid: Grid) -> np.ndarray:
    """Two-thirds rule: keep per-axis mode numbers |m| <= n/3."""
    keep_1d = np.abs(np.fft.fftfreq(grid.n) * grid.n) <= grid.n / 3.0
    mask = np.ones(grid.shape, dtype=bool)
    for j in range(grid.dim):
        shape = [1] * grid.dim
        shape[j] = grid.n
        mask &= keep_1d.reshape(shape)
    return mask


def _check_cfl(grid: Grid, dt: float) -> None:
    if dt * grid.nyquist**2 > np.pi:
        warnings.warn(
            f"dt * xi_max^2 = {dt * grid.nyquist**2:.3g} > pi; splitting error "
            "may dominate (the linear phase itself stays exact)"
        )


def evolve_full(u0: SpectralField, config: SolverConfig) -> Trajectory:
    """Evolve i u_t + Lap u = mu |u|^2 u by split-step Fourier.

    The linear multiplier and the nonlinear phase rotation are both unitary;
    dealiasing (a projection) is the only non-unitary step.  Aborts on NaN,
    keeping the trajectory up to the last finite state.
    """
    return _evolve(u0, None, config, kind="full")


def evolve_perturbation(
    w0: SpectralField, v0: SpectralField, config: SolverConfig
) -> Trajectory:
    """Evolve the remainder w with source |v + w|^2 (v + w), where v is the
    free flow of v0, computed by exact frequency-side propagation each step.

    The nonlinear substep rotates the reconstructed sum v + w exactly and
    dealiases it as a whole, so v + w reproduces evolve_full(v0 + w0) up to
    rounding.
    """
    if v0.grid != w0.grid:
        raise ValueError("v0 and w0 live on different grids")
    return _evolve(w0, v0, config, kind="perturbation")


def evolve_with_observer(w0, v0, config, on_save) -> Trajectory:
    """Run an evolution without storing intermediate fields; ``on_save`` is
    called with (t, w_hat) at t=0 and every save point.  The returned
    trajectory holds only the final state."""
    kind = "full" if v0 is None else "perturbation"
    return _evolve(w0, v0, config, kind=kind, on_save=on_save, keep_fields=False)


def _evolve(
    w0: SpectralField,
    v0: SpectralField | None,
    config: SolverConfig,
    kind: str,
    on_save=None,
    keep_fields: bool = True,
) -> Trajectory:
    grid = w0.grid
    _check_cfl(grid, config.dt)
    dt = config.dt
    n_steps = config.n_steps
    half = np.exp(-0.5j * dt * grid.xi_squared)
    full = half * half
    mask = dealias_mask(grid) if config.dealias else None
    mu = config.mu

    what = w0.frequency().values.copy()
    v0hat = v0.frequency().values if v0 is not None else None

    def v_hat(t: float) -> np.ndarray:
        return v0hat * np.exp(-1j * t * grid.xi_squared)

    def rotate(uhat: np.ndarray) -> np.ndarray:
        u = _fft.ifftn(uhat, norm="ortho")
        u = u * np.exp(-1j * mu * dt * np.abs(u) ** 2)
        out = _fft.fftn(u, norm="ortho")
        if mask is not None:
            out = out * mask
        return out

    times = [0.0]
    fields = [SpectralField(grid, what, FREQUENCY, time=0.0)] if keep_fields else []
    if on_save is not None:
        on_save(0.0, what)
    aborted = False
    t_last = 0.0

    for step in range(n_steps):
        t = step * dt
        if config.scheme == "strang":
            new = what * half
            if mu != 0.0:
                if v0hat is None:
                    new = rotate(new)
                else:
                    vmid = v_hat(t + 0.5 * dt)
                    new = rotate(new + vmid) - vmid
            new = new * half
        else:  # lie: full linear step, then nonlinear rotation
            new = what * full
            if mu != 0.0:
                if v0hat is None:
                    new = rotate(new)
                else:
                    vend = v_hat(t + dt)
                    new = rotate(new + vend) - vend
        if not np.all(np.isfinite(new)):
            aborted = True
            break
        what = new
        t_last = (step + 1) * dt
        if (step + 1) % config.save_stride == 0 or step + 1 == n_steps:
            times.append(t_last)
            if keep_fields:
                fields.append(SpectralField(grid, what, FREQUENCY, time=t_last))
            if on_save is not None:
                on_save(t_last, what)

    if not keep_fields:
        times = [t_last] if t_last > 0.0 else [0.0]
        fields = [SpectralField(grid, what, FREQUENCY, time=times[-1])]
    return Trajectory(
        grid=grid,
        times=np.asarray(times),
        fields=fields,
        config=config,
        kind=kind,
        v0=v0,
        aborted=aborted,
    )


def free_trajectory(f: SpectralField, times) -> Trajectory:
    """Sample the free flow of f at the given times by exact propagation."""
    times = np.asarray(times, dtype=float)
    grid = f.grid
    fhat = f.frequency().values
    fields = [
        SpectralField(grid, fhat * np.exp(-1j * t * grid.xi_squared), FREQUENCY, time=t)
        for t in times
    ]
    return Trajectory(grid=grid, times=times, fields=fields, kind="free")


def reconstruct_sum(traj: Trajectory) -> Trajectory:
    """v + w at the saved times of a perturbation trajectory."""
    if traj.kind != "perturbation" or traj.v0 is None:
        raise ValueError("reconstruction needs a perturbation trajectory")
    grid = traj.grid
    v0hat = traj.v0.frequency().values
    fields = []
    for t, w in zip(traj.times, traj.fields):
        vhat = v0hat * np.exp(-1j * t * grid.xi_squared)
        fields.append(SpectralField(grid, w.frequency().values + vhat, FREQUENCY, time=t))
    return Trajectory(grid=grid, times=traj.times, fields=fields, kind="full")


# ---------------------------------------------------------------------------
# Duhamel fixed-point iteration
# ---------------------------------------------------------------------------


@dataclass
class PicardResult:
    iterates: list  # list of Trajectory
    differences: list  # sup-in-time H^{1/2} distance between successive iterates
    diverged: bool


def picard_iterate(
    w0: SpectralField,
    v_traj: Trajectory,
    iterations: int,
    mu: float = 1.0,
) -> PicardResult:
    """Iterate the integral map w -> e^{itL} w0 - i int_0^t e^{i(t-s)L} F(s) ds
    with F = mu |v+w|^2 (v+w), the time integral by composite trapezoid on
    the saved samples of v.

    Divergence (two successive growths of the iterate distance) is flagged,
    not raised: it signals leaving the contraction regime, not a fault.
    """
    grid = w0.grid
    times = v_traj.times
    if len(times) < 2:
        raise ValueError("v trajectory needs at least two samples")
    xi2 = grid.xi_squared
    w0hat = w0.frequency().values
    vhats = [f.frequency().values for f in v_traj.fields]
    linear = [w0hat * np.exp(-1j * t * xi2) for t in times]
    weight = np.sqrt(1.0 + xi2)  # inhomogeneous half-derivative weight, squared

    def sup_h_half(deltas) -> float:
        best = 0.0
        for d in deltas:
            val = np.sqrt(np.sum(weight * np.abs(d) ** 2) * grid.cell_volume)
            best = max(best, float(val))
        return best

    current = [w.copy() for w in linear]
    iterates = [_traj_from_hats(grid, times, current)]
    differences = []
    diverged = False

    for _ in range(iterations):
        gs = []
        for t, vhat, what in zip(times, vhats, current):
            u = _fft.ifftn(vhat + what, norm="ortho")
            f = mu * (np.abs(u) ** 2) * u
            gs.append(_fft.fftn(f, norm="ortho") * np.exp(1j * t * xi2))
        nxt = [linear[0].copy()]
        acc = np.zeros_like(w0hat)
        for i in range(1, len(times)):
            h = times[i] - times[i - 1]
            acc = acc + (0.5 * h) * (gs[i - 1] + gs[i])
            nxt.append(linear[i] - 1j * acc * np.exp(-1j * times[i] * xi2))
        differences.append(sup_h_half([a - b for a, b in zip(nxt, current)]))
        current = nxt
        iterates.append(_traj_from_hats(grid, times, current))
        if len(differences) >= 3 and differences[-1] > differences[-2] > differences[-3]:
            diverged = True
            break

    return PicardResult(iterates=iterates, differences=differences, diverged=diverged)


def _traj_from_hats(grid, times, hats) -> Trajectory:
    fields = [SpectralField(grid, h, FREQUENCY, time=t) for t, h in zip(times, hats)]
    return Trajectory(grid=grid, times=np.asarray(times), fields=fields, kind="picard")
