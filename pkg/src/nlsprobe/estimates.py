"""Empirical ratio checks of dispersive inequalities over parameter sweeps.

Every ratio is homogeneous of degree zero in its inputs; sweeps report
log-log fits with residuals so that assertions fire on fitted slopes,
never on single points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import streams
from .grid import FREQUENCY, Grid, SpectralField, l2_norm
from .norms import mixed_norm, mixed_norm_values, sobolev_norm
from .projectors import fractional_derivative
from .randomize import RandomizationPlan, randomize
from .solver import free_trajectory


@dataclass
class FitResult:
    slope: float
    intercept: float
    r2: float
    residuals: np.ndarray


def loglog_fit(x, y) -> FitResult:
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    coeffs = np.polyfit(x, y, 1)
    pred = np.polyval(coeffs, x)
    res = y - pred
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(res**2)) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(coeffs[0]), float(coeffs[1]), r2, res)


def mann_kendall(values) -> float:
    """Normalized trend sign statistic in [-1, 1]."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n < 2:
        raise ValueError("trend statistic needs at least two values")
    s = 0
    for i in range(n - 1):
        s += int(np.sign(v[i + 1 :] - v[i]).sum())
    return 2.0 * s / (n * (n - 1))


@dataclass
class RatioSweep:
    axes: list
    rows: list = field(default_factory=list)

    def add(self, point: dict):
        self.rows.append(point)

    def column(self, name) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)

    def fit(self, axis: str, value: str = "ratio") -> FitResult:
        return loglog_fit(self.column(axis), self.column(value))

    def table(self):
        header = list(self.axes) + ["lhs", "rhs", "ratio"]
        rows = [[row.get(k, float("nan")) for k in header] for row in self.rows]
        return header, rows


def admissibility_defect(q: float, r: float, d: int) -> float:
    return abs(2.0 / q + d / r - d / 2.0)


def check_admissible(q: float, r: float, d: int, exclude_endpoint: bool = True) -> None:
    defect = admissibility_defect(q, r, d)
    if q < 2 or r < 2 or defect > 1e-9 or (q, r, d) == (2, np.inf, 2):
        raise ValueError(
            f"(q, r) = ({q:g}, {r:g}) is not L^2-admissible in d={d}: defect {defect:.3g}"
        )
    if exclude_endpoint and q == 2:
        raise ValueError("endpoint q = 2 excluded (finite-box constants degrade)")


def default_times(t_final: float, n_times: int = 33) -> np.ndarray:
    return np.linspace(0.0, t_final, n_times)


def random_band_limited(grid: Grid, scale: float, seed: int, tag: int = 0) -> SpectralField:
    """Unit-variance complex Gaussians on the dyadic annulus scale/2 < |xi| <= scale."""
    mask = (grid.xi_abs > scale / 2.0) & (grid.xi_abs <= scale)
    if not np.any(mask):
        raise ValueError(f"annulus at scale {scale:g} is empty on this grid")
    counters = np.arange(grid.n**grid.dim, dtype=np.uint64).reshape(grid.shape)
    g = streams.complex_gaussians(seed ^ (0x5851F42D << tag), counters)
    return SpectralField(grid, np.where(mask, g, 0.0), FREQUENCY)


def strichartz_ratio(
    phi: SpectralField,
    q: float,
    r: float,
    t_final: float,
    n_times: int = 33,
    exclude_endpoint: bool = True,
) -> float:
    """|| free flow of phi ||_{L^q_t L^r_x([0,T])} / ||phi||_{L^2}."""
    check_admissible(q, r, phi.grid.dim, exclude_endpoint)
    denom = l2_norm(phi)
    if denom == 0.0:
        raise ValueError("zero input field")
    traj = free_trajectory(phi, default_times(t_final, n_times))
    return mixed_norm(traj, q, r) / denom


def bilinear_ratio(
    grid: Grid,
    n_scale: float,
    m_scale: float,
    q: float,
    r: float,
    seeds,
    t_final: float,
    n_times: int = 33,
    conjugate: bool = False,
) -> RatioSweep:
    """Product-of-flows norm against the frequency-separated reference
    M^(4 - 4/r - 2/q) / N^(1 - 1/r) * ||phi_N|| * ||psi_M||, one row per seed.
    """
    if not (1.0 <= q <= 2.0 and 1.0 <= r <= 2.0):
        raise ValueError("bilinear check needs 1 <= q, r <= 2")
    if 1.0 / q + 2.0 / r >= 2.0:
        raise ValueError(f"need 1/q + 2/r < 2, got {1.0 / q + 2.0 / r:g}")
    if m_scale > n_scale / 8.0:
        raise ValueError(
            f"frequency separation violated: M = {m_scale:g} > N/8 = {n_scale / 8.0:g}"
        )
    if n_scale > grid.nyquist:
        raise ValueError(f"block {n_scale:g} above the grid Nyquist {grid.nyquist:g}")
    if isinstance(seeds, int):
        seeds = range(seeds)
    times = default_times(t_final, n_times)
    power = 4.0 - 4.0 / r - 2.0 / q
    sweep = RatioSweep(axes=["N", "M", "seed"])
    for seed in seeds:
        phi = random_band_limited(grid, n_scale, seed, tag=0)
        psi = random_band_limited(grid, m_scale, seed, tag=1)
        hi = free_trajectory(phi, times)
        lo = free_trajectory(psi, times)
        prods = []
        for a, b in zip(hi.fields, lo.fields):
            bv = b.physical().values
            if conjugate:
                bv = np.conj(bv)
            prods.append(a.physical().values * bv)
        lhs = mixed_norm_values(times, prods, grid, q, r)
        rhs = (
            m_scale**power / n_scale ** (1.0 - 1.0 / r) * l2_norm(phi) * l2_norm(psi)
        )
        sweep.add(
            {"N": n_scale, "M": m_scale, "seed": seed, "lhs": lhs, "rhs": rhs,
             "ratio": lhs / rhs}
        )
    return sweep


def local_smoothing_ratio(
    f: SpectralField,
    r_list,
    t_final: float,
    n_times: int = 33,
) -> RatioSweep:
    """Per ball radius R: R^(-1/2) || flow ||_{L^2_t L^2(|x|<=R)} over the
    half-derivative-smoothed data norm; the sweep's sup is the tracked value.
    """
    grid = f.grid
    fhat = f.frequency().values
    dc = abs(fhat[(0,) * grid.dim])
    if dc > 1e-10 * np.sqrt(np.sum(np.abs(fhat) ** 2)):
        raise ValueError("local smoothing check needs zero-mean data")
    denom = l2_norm(fractional_derivative(f, -0.5))
    radius = grid.radius()
    times = default_times(t_final, n_times)
    traj = free_trajectory(f, times)
    phys = [np.abs(g.physical().values) ** 2 for g in traj.fields]
    sweep = RatioSweep(axes=["R"])
    for R in np.asarray(r_list, dtype=float):
        if R > grid.box_length / 4.0:
            raise ValueError(f"R = {R:g} exceeds box_length/4")
        mask = radius <= R
        inner = np.array([np.sqrt(np.sum(p[mask]) * grid.cell_volume) for p in phys])
        lhs = float(np.sqrt(np.trapezoid(inner**2, times)))
        ratio = R ** (-0.5) * lhs / denom
        sweep.add({"R": R, "lhs": lhs, "rhs": denom, "ratio": ratio})
    return sweep


def radial_symmetry_residual(f: SpectralField) -> float:
    """Max spread of |fhat| over lattice shells of equal |xi|, relative."""
    grid = f.grid
    fhat = f.frequency().values
    shell = np.round(grid.xi_squared / grid.freq_spacing**2).astype(np.int64).ravel()
    vals = fhat.ravel()
    order = np.argsort(shell, kind="stable")
    shell = shell[order]
    vals = vals[order]
    scale = np.abs(vals).max() + 1e-300
    bounds = np.flatnonzero(np.diff(shell)) + 1
    worst = 0.0
    for group in np.split(vals, bounds):
        if len(group) > 1:
            worst = max(worst, float(np.abs(group - group.mean()).max()) / scale)
    return worst


def radial_square_sobolev_ratio(
    f: SpectralField,
    r: float,
    epsilon: float,
    plan: RandomizationPlan,
) -> dict:
    """Weighted L^r size of the unit-cube square function against the
    epsilon-regularity norm of radial data."""
    if radial_symmetry_residual(f) > 1e-8:
        raise ValueError("input is not radial on the frequency lattice")
    if r < 2:
        raise ValueError("r must be in [2, inf]")
    grid = f.grid
    fhat = f.frequency().values
    square = np.zeros(grid.shape)
    for k in plan.partition.centers():
        mult = plan.partition.cube_multiplier(k)
        piece = np.fft.ifftn(mult * fhat, norm="ortho")
        square += np.abs(piece) ** 2
    sq = np.sqrt(square)
    weight = grid.radius() ** (1.0 - 2.0 / r) if not np.isinf(r) else grid.radius()
    if np.isinf(r):
        lhs = float((weight * sq).max())
    else:
        lhs = float((np.sum((weight * sq) ** r) * grid.cell_volume) ** (1.0 / r))
    rhs = sobolev_norm(f, epsilon)
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}


@dataclass
class EnsembleStats:
    values: np.ndarray
    moments: dict  # p -> (E |X|^p)^(1/p)
    normalized: dict  # p -> moment / (sqrt(p) * ||f||_{H^s})
    monotone_ok: bool
    tail_slope: float
    f_norm: float


def flow_ensemble_stats(
    f: SpectralField,
    plan: RandomizationPlan,
    seeds,
    norm_fn,
    s: float,
    t_final: float,
    n_times: int = 17,
    p_list=(2, 4, 8),
) -> EnsembleStats:
    """Distribution of a space-time norm of the randomized free flow.

    ``norm_fn`` maps a sampled trajectory to a scalar.  Reports empirical
    moments, the moment table normalized by sqrt(p) times the data norm
    (checked non-increasing in p), and the quadratic log-slope of the
    upper tail.
    """
    if isinstance(seeds, int):
        seeds = range(seeds)
    seeds = list(seeds)
    if len(seeds) < 8:
        raise ValueError("ensemble statistics need at least 8 seeds")
    times = default_times(t_final, n_times)
    values = np.empty(len(seeds))
    for i, seed in enumerate(seeds):
        sample = randomize(f, plan, seed=seed)
        values[i] = norm_fn(free_trajectory(sample, times))
    f_norm = sobolev_norm(f, s)
    moments = {int(p): float(np.mean(values**p) ** (1.0 / p)) for p in p_list}
    normalized = {p: m / (np.sqrt(p) * f_norm) for p, m in moments.items()}
    ordered = [normalized[int(p)] for p in sorted(p_list)]
    monotone_ok = all(a >= b * (1.0 - 1e-9) for a, b in zip(ordered, ordered[1:]))

    med = float(np.median(values))
    sigma = float(values.std()) + 1e-300
    lam = np.linspace(0.5, 2.5, 9) * sigma
    tail = np.array([np.mean(values > med + L) for L in lam])
    keep = tail > 0
    if keep.sum() >= 3:
        x = (lam[keep] / sigma) ** 2
        coeffs = np.polyfit(x, np.log(tail[keep]), 1)
        tail_slope = float(coeffs[0])
    else:
        tail_slope = float("nan")
    return EnsembleStats(
        values=values,
        moments=moments,
        normalized=normalized,
        monotone_ok=monotone_ok,
        tail_slope=tail_slope,
        f_norm=f_norm,
    )
