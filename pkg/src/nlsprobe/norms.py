"""Discrete Sobolev, mixed space-time, dyadic-block, and composite norms.

Spatial integrals use grid quadrature (dx^dim weights), L^infinity is the
grid max, and the outer time integral is composite trapezoid on the saved
stride.  "Minus" exponents (s-) are realized as s - epsilon with a single
configurable epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, SpectralField
from .projectors import block_multiplier, dyadic_scales, sobolev_multiplier
from .solver import Trajectory

DEFAULT_EPSILON = 0.01


def lebesgue_norm(field: SpectralField, r: float) -> float:
    """Spatial L^r norm by grid quadrature; r = inf is the grid max."""
    u = np.abs(field.physical().values)
    if np.isinf(r):
        return float(u.max())
    if r < 1:
        raise ValueError("r must be >= 1")
    return float((np.sum(u**r) * field.grid.cell_volume) ** (1.0 / r))


def sobolev_norm(field: SpectralField, s: float, homogeneous: bool = False) -> float:
    """H^s (or homogeneous) norm as a frequency-side weighted sum."""
    grid = field.grid
    fhat = field.frequency().values
    if homogeneous and s < 0:
        dc = abs(fhat[(0,) * grid.dim])
        scale = np.sqrt(np.sum(np.abs(fhat) ** 2)) + 1e-300
        if dc > 1e-10 * scale:
            raise ValueError("negative-order homogeneous norm needs zero mean")
    weight = sobolev_multiplier(grid, s, homogeneous) ** 2
    return float(np.sqrt(np.sum(weight * np.abs(fhat) ** 2) * grid.cell_volume))


def _time_outer(times: np.ndarray, inner: np.ndarray, q: float) -> float:
    if np.isinf(q):
        return float(inner.max())
    if q < 1:
        raise ValueError("q must be >= 1")
    return float(np.trapezoid(inner**q, times) ** (1.0 / q))


def mixed_norm(traj: Trajectory, q: float, r: float) -> float:
    """Mixed L^q_t L^r_x norm of a sampled trajectory."""
    if len(traj) < 2:
        raise ValueError("mixed norm needs at least two time samples")
    inner = np.array([lebesgue_norm(f, r) for f in traj.fields])
    return _time_outer(traj.times, inner, q)


def mixed_norm_values(times, values, grid: Grid, q: float, r: float) -> float:
    """Mixed norm of raw physical samples (used for pointwise products)."""
    times = np.asarray(times, dtype=float)
    if len(times) < 2:
        raise ValueError("mixed norm needs at least two time samples")
    if np.isinf(r):
        inner = np.array([np.abs(v).max() for v in values])
    else:
        inner = np.array(
            [(np.sum(np.abs(v) ** r) * grid.cell_volume) ** (1.0 / r) for v in values]
        )
    return _time_outer(times, inner, q)


@dataclass
class DyadicMixedResult:
    value: float
    per_block: dict
    cap: float
    coverage: float  # share of the trajectory's L^2 content inside the cap


def dyadic_mixed_norm(
    traj: Trajectory,
    a: float,
    q: float,
    r: float,
    cap: float | None = None,
    inhomogeneous: bool = False,
) -> DyadicMixedResult:
    """Square-summed dyadic blocks: ( sum_N || D^a P_N u ||_{L^q_t L^r_x}^2 )^{1/2}.

    Blocks are capped at the grid Nyquist by default; the cap and the L^2
    share it covers are reported alongside the value.
    """
    grid = traj.grid
    if cap is None:
        cap = grid.nyquist
    scales = dyadic_scales(grid, cap=cap)
    if len(scales) < 2:
        raise ValueError("fewer than two dyadic blocks on this grid; sum is meaningless")
    weight = sobolev_multiplier(grid, a, homogeneous=not inhomogeneous)
    hats = [f.frequency().values for f in traj.fields]
    per_block = {}
    total = 0.0
    for scale in scales:
        mult = block_multiplier(grid, scale) * weight
        samples = [SpectralField(grid, h * mult, "frequency") for h in hats]
        inner = np.array([lebesgue_norm(f, r) for f in samples])
        block_value = _time_outer(traj.times, inner, q)
        per_block[scale] = block_value
        total += block_value**2
    covered = _coverage(grid, hats, scales)
    return DyadicMixedResult(
        value=float(np.sqrt(total)), per_block=per_block, cap=float(cap), coverage=covered
    )


def _coverage(grid: Grid, hats, scales) -> float:
    blocks = sum(block_multiplier(grid, s) for s in scales)
    num = 0.0
    den = 0.0
    for h in hats:
        p2 = np.abs(h) ** 2
        num += float(np.sum(np.minimum(blocks, 1.0) * p2))
        den += float(np.sum(p2))
    return num / den if den > 0 else 1.0


@dataclass
class CompositeNorm:
    value: float
    constituents: dict
    epsilon: float
    cap: float


def dispersive_norm(
    traj: Trajectory,
    s: float,
    epsilon: float = DEFAULT_EPSILON,
    gain_term: bool = False,
    cap: float | None = None,
) -> CompositeNorm:
    """Bundle of space-time norms measuring the dispersive decay of a flow.

    Sum of dyadic-block and plain mixed constituents; with ``gain_term`` the
    half-derivative-gain block norm (L^2_t L^inf_x) is added.
    """
    eps = epsilon
    parts = {}
    parts["blocks_d^s_Lt4_Lx4.5"] = dyadic_mixed_norm(traj, s, 4, 4.5, cap=cap).value
    parts["blocks_d^s_Lt6_Lx6"] = dyadic_mixed_norm(traj, s, 6, 6, cap=cap).value
    parts["blocks_d^s_Lt4_Lx18"] = dyadic_mixed_norm(traj, s, 4, 18, cap=cap).value
    parts["blocks_Lt20/7_Lx10"] = dyadic_mixed_norm(traj, 0.0, 20.0 / 7.0, 10, cap=cap).value
    parts["Lt4_Lx12"] = mixed_norm(traj, 4, 12)
    parts["Lt3_Lxinf"] = mixed_norm(traj, 3, np.inf)
    parts["Lt4_Lx6"] = mixed_norm(traj, 4, 6)
    parts["Lt3_Lx6"] = mixed_norm(traj, 3, 6)
    parts["Lt3/(1-e)_Lx6/(1-3e)"] = mixed_norm(traj, 3.0 / (1.0 - eps), 6.0 / (1.0 - 3.0 * eps))
    q2 = 4.0 * (4.0 - 3.0 * eps) / (5.0 + 3.0 * eps)
    r2 = 2.0 * (4.0 - 3.0 * eps) / (1.0 - 3.0 * eps)
    parts["Ltq2_Lxr2"] = mixed_norm(traj, q2, r2)
    if gain_term:
        parts["blocks_d^(s+1/2-e)_Lt2_Lxinf"] = dyadic_mixed_norm(
            traj, s + 0.5 - eps, 2, np.inf, cap=cap
        ).value
    grid = traj.grid
    return CompositeNorm(
        value=float(sum(parts.values())),
        constituents=parts,
        epsilon=eps,
        cap=float(cap if cap is not None else grid.nyquist),
    )


def uniform_norm(
    traj: Trajectory,
    s: float,
    epsilon: float = DEFAULT_EPSILON,
    cap: float | None = None,
) -> CompositeNorm:
    """Bundle of uniform-in-time block norms (no decay credited)."""
    parts = {
        "blocks_<d>^(s-e)_Ltinf_Lxinf": dyadic_mixed_norm(
            traj, s - epsilon, np.inf, np.inf, cap=cap, inhomogeneous=True
        ).value,
        "blocks_<d>^s_Ltinf_Lx2": dyadic_mixed_norm(
            traj, s, np.inf, 2, cap=cap, inhomogeneous=True
        ).value,
    }
    grid = traj.grid
    return CompositeNorm(
        value=float(sum(parts.values())),
        constituents=parts,
        epsilon=epsilon,
        cap=float(cap if cap is not None else grid.nyquist),
    )


DEFAULT_ADMISSIBLE_PAIRS = (
    (np.inf, 2.0),
    (8.0, 12.0 / 5.0),
    (6.0, 18.0 / 7.0),
    (4.0, 3.0),
    (10.0 / 3.0, 10.0 / 3.0),
)


def critical_proxy_norm(
    traj: Trajectory,
    l: float,
    pairs=DEFAULT_ADMISSIBLE_PAIRS,
    cap: float | None = None,
) -> CompositeNorm:
    """Lower-bound proxy for the scale-l critical space-time size:
    ( sum_N N^{2l} sup over admissible (q,r) of ||P_N w||^2 )^{1/2}.

    This is NOT equivalent to the atomic-space norm it stands in for; each
    mixed norm is dominated by that norm, so the proxy is a lower bound.
    """
    grid = traj.grid
    if cap is None:
        cap = grid.nyquist
    scales = dyadic_scales(grid, cap=cap)
    hats = [f.frequency().values for f in traj.fields]
    per_block = {}
    total = 0.0
    for scale in scales:
        mult = block_multiplier(grid, scale)
        fields = [SpectralField(grid, h * mult, "frequency") for h in hats]
        best = 0.0
        for q, r in pairs:
            inner = np.array([lebesgue_norm(f, r) for f in fields])
            best = max(best, _time_outer(traj.times, inner, q))
        per_block[scale] = best
        total += float(scale) ** (2.0 * l) * best**2
    return CompositeNorm(
        value=float(np.sqrt(total)),
        constituents=per_block,
        epsilon=0.0,
        cap=float(cap),
    )


@dataclass
class NormSpec:
    """Declarative norm selector used by ensemble statistics and the CLI."""

    kind: str  # sobolev | mixed | dyadic_mixed | dispersive | uniform | proxy
    s: float = 0.0
    q: float = 2.0
    r: float = 2.0
    epsilon: float = DEFAULT_EPSILON
    homogeneous: bool = True
    gain_term: bool = False
    params: dict = field(default_factory=dict)

    def evaluate(self, traj: Trajectory) -> float:
        if self.kind == "sobolev":
            return sobolev_norm(traj.fields[-1], self.s, homogeneous=self.homogeneous)
        if self.kind == "mixed":
            return mixed_norm(traj, self.q, self.r)
        if self.kind == "dyadic_mixed":
            return dyadic_mixed_norm(
                traj, self.s, self.q, self.r, inhomogeneous=not self.homogeneous
            ).value
        if self.kind == "dispersive":
            return dispersive_norm(
                traj, self.s, epsilon=self.epsilon, gain_term=self.gain_term
            ).value
        if self.kind == "uniform":
            return uniform_norm(traj, self.s, epsilon=self.epsilon).value
        if self.kind == "proxy":
            return critical_proxy_norm(traj, self.s).value
        raise ValueError(f"unknown norm kind {self.kind!r}")
