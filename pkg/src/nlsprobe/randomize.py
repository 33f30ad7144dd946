"""Unit-scale frequency randomization of initial data, synthetic rough data,
and Monte Carlo checks of the tail machinery behind it."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import streams
from .grid import FREQUENCY, Grid, SpectralField
from .norms import dispersive_norm, lebesgue_norm, sobolev_norm, uniform_norm
from .projectors import UnitPartition, dyadic_multiplier, make_unit_partition, smooth_step
from .solver import free_trajectory


@dataclass(frozen=True)
class RandomizationPlan:
    """Partition weights plus the seeded Gaussian stream parameters.

    The coefficient attached to cube k is a pure function of (seed, k), so
    ensembles are reproducible regardless of evaluation order.
    """

    grid: Grid
    partition: UnitPartition
    seed: int = 0
    sigma2: float = 1.0

    def with_seed(self, seed: int) -> "RandomizationPlan":
        return replace(self, seed=seed)

    def cube_coefficients(self, seed: int | None = None) -> np.ndarray:
        """Dense tensor of g_k over the per-axis cube-center boxes."""
        if seed is None:
            seed = self.seed
        axes = self.partition.k_axes
        mesh = np.meshgrid(*axes, indexing="ij")
        counters = streams.pack_coords(*mesh)
        return streams.complex_gaussians(seed, counters, sigma2=self.sigma2)

    def coefficient_multiplier(self, seed: int | None = None) -> np.ndarray:
        """Frequency multiplier sum_k g_k psi_k(xi) on the full lattice."""
        g = self.cube_coefficients(seed)
        out = g
        for w in self.partition.weights:
            out = np.tensordot(out, w, axes=([0], [0]))
        return out


def make_plan(grid: Grid, seed: int = 0, sigma2: float = 1.0) -> RandomizationPlan:
    return RandomizationPlan(
        grid=grid, partition=make_unit_partition(grid), seed=seed, sigma2=sigma2
    )


def randomize(f: SpectralField, plan: RandomizationPlan, seed: int | None = None) -> SpectralField:
    """Multiply each unit-cube frequency piece of f by its Gaussian weight.

    Computed as a single frequency-side multiply; deterministic per seed.
    """
    if plan.grid != f.grid:
        raise ValueError("plan built on a different grid")
    fhat = f.frequency()
    return fhat.with_values(fhat.values * plan.coefficient_multiplier(seed))


def sum_cube_l2_squared(f: SpectralField, plan: RandomizationPlan) -> float:
    """sum_k ||cube_k f||_{L^2}^2 via the separable sum of squared weights."""
    fhat = f.frequency()
    s2 = plan.partition.sum_of_squares()
    return float(np.sum(s2 * np.abs(fhat.values) ** 2) * f.grid.cell_volume)


@dataclass
class Ensemble:
    """A base field, distinct seeds, and per-seed scalar statistics."""

    base: SpectralField
    seeds: list
    statistics: dict

    def __post_init__(self):
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("ensemble seeds must be pairwise distinct")
        for name, vals in self.statistics.items():
            if len(vals) != len(self.seeds):
                raise ValueError(f"statistic {name!r} length != seed count")


# ---------------------------------------------------------------------------
# Synthetic rough data
# ---------------------------------------------------------------------------


def synthesize_data(
    grid: Grid,
    s: float,
    epsilon: float,
    profile: str = "power-law",
    radial: bool = False,
    phase_seed: int = 0,
    band_limit: float | None = None,
    amplitude: float = 1.0,
) -> SpectralField:
    """Data of prescribed roughness: |fhat(xi)| = <xi>^(-s - dim/2 - epsilon)
    for the power-law profile, so the H^sigma tail sum converges for
    sigma <= s and diverges for sigma > s + epsilon as the lattice grows.

    With ``radial`` the coefficients are a real function of |xi|; otherwise
    each mode gets a seeded uniform phase.  ``band_limit`` zeroes all modes
    above the given |xi| (useful to keep experiments inside the dealiased
    band).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if profile == "power-law":
        amp = (1.0 + grid.xi_squared) ** (0.5 * (-s - grid.dim / 2.0 - epsilon))
    elif profile == "compact-bump":
        radius = grid.nyquist / 4.0
        amp = smooth_step(grid.xi_abs / radius - 1.0)
    else:
        raise ValueError(f"unknown profile {profile!r}")
    if band_limit is not None:
        amp = np.where(grid.xi_abs <= band_limit, amp, 0.0)
    if radial:
        values = amp.astype(np.complex128)
    else:
        counters = np.arange(grid.n**grid.dim, dtype=np.uint64).reshape(grid.shape)
        phases = np.exp(2j * np.pi * streams.uniforms(phase_seed, counters))
        values = amp * phases
    return SpectralField(grid, amplitude * values, FREQUENCY)


def profile_norm_sum(grid: Grid, s: float, epsilon: float, sigma: float) -> float:
    """Closed-form lattice sum of the power-law profile's H^sigma mass.

    Independent of the field/norm machinery: pure lattice arithmetic,
    usable as an oracle for tail growth under refinement.
    """
    w = (1.0 + grid.xi_squared) ** (sigma - s - grid.dim / 2.0 - epsilon)
    return float(np.sqrt(np.sum(w) * grid.cell_volume))


# ---------------------------------------------------------------------------
# Large-deviation tail checks
# ---------------------------------------------------------------------------


@dataclass
class TailReport:
    lambdas: np.ndarray
    probs: np.ndarray
    reference: np.ndarray  # exact circular-Gaussian tail exp(-lambda^2/|c|^2)
    c_norm: float
    n_seeds: int
    quad_slope: float
    quad_intercept: float
    quad_r2: float
    linear_slope: float  # auxiliary fit of log P against lambda / |c|^2
    moments: dict

    @property
    def slope_negative(self) -> bool:
        return self.quad_slope < 0.0


def _fit_line(x: np.ndarray, y: np.ndarray):
    coeffs = np.polyfit(x, y, 1)
    pred = np.polyval(coeffs, x)
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coeffs[0]), float(coeffs[1]), r2


def tail_check(
    c,
    seeds,
    lambda_grid=None,
    p_list=(2, 4, 8, 16),
    require_negative_slope: bool = True,
) -> TailReport:
    """Empirical tail of |sum_n c_n g_n| over seeded draws.

    Fits log P against lambda^2/|c|^2 (the sub-Gaussian shape) and, as
    auxiliary output, against lambda/|c|^2; empty-tail lambdas (zero counts)
    are dropped from the fits.
    """
    c = np.asarray(c, dtype=np.complex128).ravel()
    c_norm = float(np.sqrt(np.sum(np.abs(c) ** 2)))
    if c_norm == 0.0:
        raise ValueError("degenerate coefficient sequence c = 0")
    if isinstance(seeds, int):
        seeds = range(seeds)
    seeds = np.asarray(list(seeds), dtype=np.int64)
    if len(seeds) < 1000:
        raise ValueError("tail check needs at least 1000 seeds")
    counters = np.arange(len(c), dtype=np.uint64)
    sums = np.empty(len(seeds), dtype=np.complex128)
    for i, seed in enumerate(seeds):
        g = streams.complex_gaussians(int(seed), counters)
        sums[i] = np.sum(c * g)
    mags = np.abs(sums)
    if lambda_grid is None:
        lambda_grid = np.linspace(1.0, 4.0, 13) * c_norm
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    probs = np.array([(mags > lam).mean() for lam in lambda_grid])
    reference = np.exp(-(lambda_grid**2) / c_norm**2)

    keep = probs > 0
    if keep.sum() < 3:
        raise ValueError("tail grid too coarse: fewer than 3 nonempty levels")
    x_quad = (lambda_grid[keep] / c_norm) ** 2
    x_lin = lambda_grid[keep] / c_norm**2
    logp = np.log(probs[keep])
    quad_slope, quad_intercept, quad_r2 = _fit_line(x_quad, logp)
    linear_slope, _, _ = _fit_line(x_lin, logp)

    moments = {
        int(p): float(np.mean(mags**p) ** (1.0 / p)) for p in p_list
    }
    report = TailReport(
        lambdas=lambda_grid,
        probs=probs,
        reference=reference,
        c_norm=c_norm,
        n_seeds=len(seeds),
        quad_slope=quad_slope,
        quad_intercept=quad_intercept,
        quad_r2=quad_r2,
        linear_slope=linear_slope,
        moments=moments,
    )
    if require_negative_slope and not report.slope_negative:
        raise AssertionError(f"fitted tail slope {quad_slope:.3g} is not negative")
    return report


# ---------------------------------------------------------------------------
# Good-set fractions
# ---------------------------------------------------------------------------


@dataclass
class GoodSetReport:
    m_grid: np.ndarray
    fractions: np.ndarray
    flow_quantity: np.ndarray  # per-seed size of the randomized data and flow
    low_quantity: np.ndarray  # per-seed scaled low-frequency energy quantity
    f_norm: float
    t_max: float
    complement_slope: float  # fitted d log(1-fraction) / d M^2, NaN if empty


def good_set_fraction(
    f: SpectralField,
    plan: RandomizationPlan,
    seeds,
    m_grid,
    n0: int,
    s: float,
    t_max: float,
    n_times: int = 9,
    epsilon: float = 0.01,
) -> GoodSetReport:
    """Fraction of seeds whose realized norms stay below M * ||f||_{H^s}.

    Per seed the two thresholded quantities are (i) the data H^s norm plus
    the dispersive/uniform bundle of the high-frequency free flow on
    [0, t_max] and (ii) the scaled gradient norm plus L^4 norm of the
    low-frequency piece.  Fractions are nondecreasing in M by construction.
    """
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    seeds = list(seeds)
    if not seeds:
        raise ValueError("empty seed batch")
    m_grid = np.asarray(m_grid, dtype=float)
    grid = f.grid
    f_norm = sobolev_norm(f, s)
    if f_norm == 0.0:
        raise ValueError("base field has zero H^s norm")
    high = dyadic_multiplier(grid, float(n0), "geq")
    low = dyadic_multiplier(grid, float(n0), "leq")
    times = np.linspace(0.0, t_max, n_times)

    flow_q = np.empty(len(seeds))
    low_q = np.empty(len(seeds))
    for i, seed in enumerate(seeds):
        sample = randomize(f, plan, seed=seed)
        data_norm = sobolev_norm(sample, s)
        vhat = sample.with_values(sample.values * high)
        traj = free_trajectory(vhat, times)
        bundle = (
            dispersive_norm(traj, s, epsilon=epsilon, gain_term=True).value
            + uniform_norm(traj, s, epsilon=epsilon).value
        )
        w0 = sample.with_values(sample.values * low)
        flow_q[i] = data_norm + bundle
        low_q[i] = float(n0) ** (s - 1.0) * sobolev_norm(
            w0, 1.0, homogeneous=True
        ) + lebesgue_norm(w0, 4)

    fractions = np.array(
        [
            np.mean((flow_q < m * f_norm) & (low_q < m * f_norm))
            for m in m_grid
        ]
    )
    comp = 1.0 - fractions
    keep = comp > 0
    if keep.sum() >= 3:
        slope, _, _ = _fit_line(m_grid[keep] ** 2, np.log(comp[keep]))
    else:
        slope = float("nan")
    return GoodSetReport(
        m_grid=m_grid,
        fractions=fractions,
        flow_quantity=flow_q,
        low_quantity=low_q,
        f_norm=f_norm,
        t_max=t_max,
        complement_slope=slope,
    )
