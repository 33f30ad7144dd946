"""Frequency projectors: unit-cube partition, dyadic cutoffs, fractional
derivatives, and the free propagator. All are Fourier multipliers."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .grid import Grid, SpectralField, apply_multiplier


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 1 for t <= 0, 0 for t >= 1, exp(1 - 1/(1 - t^2)) between."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t <= 0.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    out[mid] = np.exp(1.0 - 1.0 / (1.0 - tm**2))
    return out


def bump(r: np.ndarray) -> np.ndarray:
    """Even bump: 1 on [-1/2, 1/2], 0 outside (-1, 1), smooth between."""
    return smooth_step(2.0 * np.abs(r) - 1.0)


def radial_cutoff(r: np.ndarray) -> np.ndarray:
    """Radial cutoff: 1 on [0, 1], 0 on [2, inf), smooth between."""
    return smooth_step(np.asarray(r, dtype=float) - 1.0)


# ---------------------------------------------------------------------------
# Unit-cube partition of unity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitPartition:
    """Separable partition-of-unity weights on the frequency lattice.

    Per axis j, ``weights[j][i]`` holds psi(xi - k) evaluated on the axis
    lattice for the integer center ``k = k_axes[j][i]``.  A cube weight is
    the outer product of one row per axis; rows sum to one exactly, so the
    cube weights sum to one at every lattice frequency.
    """

    grid: Grid
    k_axes: tuple
    weights: tuple

    def axis_index(self, j: int, k: int):
        idx = np.searchsorted(self.k_axes[j], k)
        if idx >= len(self.k_axes[j]) or self.k_axes[j][idx] != k:
            return None
        return int(idx)

    def cube_multiplier(self, k) -> np.ndarray:
        """Dense psi_k on the lattice; zero (with a warning) off-range k."""
        k = tuple(int(c) for c in k)
        if len(k) != self.grid.dim:
            raise ValueError(f"cube center {k} has wrong dimension")
        rows = []
        for j, kj in enumerate(k):
            idx = self.axis_index(j, kj)
            if idx is None:
                warnings.warn(f"cube center {k} outside lattice range, zero field")
                return np.zeros(self.grid.shape)
            rows.append(self.weights[j][idx])
        return _outer(rows)

    def centers(self):
        """All cube centers with somewhere-nonzero weight, lexicographic order."""
        grids = np.meshgrid(*self.k_axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def partition_sum(self) -> np.ndarray:
        return _outer([w.sum(axis=0) for w in self.weights])

    def sum_of_squares(self) -> np.ndarray:
        """Pointwise sum over cubes of psi_k^2 (separable product of axis sums)."""
        return _outer([(w**2).sum(axis=0) for w in self.weights])


def _outer(rows) -> np.ndarray:
    dim = len(rows)
    if dim == 1:
        return rows[0].copy()
    shaped = []
    for j, row in enumerate(rows):
        shape = [1] * dim
        shape[j] = row.shape[0]
        shaped.append(row.reshape(shape))
    return reduce(np.multiply, shaped)


def make_unit_partition(grid: Grid) -> UnitPartition:
    """Build the unit-cube partition weights for a grid.

    Requires frequency spacing 2*pi/L <= 1 so the lattice resolves unit cubes.
    """
    if grid.freq_spacing > 1.0 + 1e-12:
        raise ValueError(
            f"frequency spacing {grid.freq_spacing:.6g} > 1; "
            "box too small for unit-cube decomposition"
        )
    xi = grid.xi_axis
    kmax = int(np.floor(np.abs(xi).max())) + 1
    ks = np.arange(-kmax, kmax + 1)
    k_axes, weights = [], []
    for _ in range(grid.dim):
        raw = bump(xi[None, :] - ks[:, None])
        denom = raw.sum(axis=0)
        w = raw / denom
        keep = np.any(w > 0.0, axis=1)
        k_axes.append(ks[keep].copy())
        weights.append(w[keep])
    return UnitPartition(grid=grid, k_axes=tuple(k_axes), weights=tuple(weights))


def cube_project(field: SpectralField, k, partition: UnitPartition) -> SpectralField:
    """Restrict to the unit frequency cube centered at integer k."""
    if partition.grid != field.grid:
        raise ValueError("partition built on a different grid")
    return apply_multiplier(field, partition.cube_multiplier(k))


# ---------------------------------------------------------------------------
# Dyadic (Littlewood-Paley) projectors
# ---------------------------------------------------------------------------


def _leq_multiplier(grid: Grid, scale: float) -> np.ndarray:
    return radial_cutoff(grid.xi_abs / scale)


def dyadic_multiplier(grid: Grid, scale: float, mode: str = "exact") -> np.ndarray:
    """Multiplier for the dyadic projector at the given scale.

    ``exact`` is the annulus difference of two low cutoffs, ``leq`` the low
    cutoff itself, and ``geq`` its complement (identity minus ``leq``).
    """
    if mode == "leq":
        return _leq_multiplier(grid, scale)
    if mode == "geq":
        return 1.0 - _leq_multiplier(grid, scale)
    if mode == "exact":
        mult = _leq_multiplier(grid, scale) - _leq_multiplier(grid, scale / 2.0)
        if not np.any(mult > 0.0):
            warnings.warn(
                f"dyadic block {scale:g} beyond the grid Nyquist {grid.nyquist:.6g}; "
                "zero field"
            )
            return np.zeros(grid.shape)
        return mult
    raise ValueError(f"unknown dyadic mode {mode!r}")


def dyadic_project(field: SpectralField, scale: float, mode: str = "exact") -> SpectralField:
    return apply_multiplier(field, dyadic_multiplier(field.grid, scale, mode))


def dyadic_scales(grid: Grid, cap: float | None = None) -> list:
    """Dyadic block scales carried by the grid, smallest first.

    The base block is the low cutoff at scale 1 (``leq`` mode); blocks 2, 4,
    ... are annuli.  With ``cap`` unset the list runs to full lattice
    coverage, so the base plus annuli telescope to the identity; a finite
    cap truncates the list (blocks above the cap are dropped, not folded).
    """
    top = grid.lattice_max_abs if cap is None else min(cap, grid.lattice_max_abs)
    scales = [1]
    scale = 2
    while scale / 2.0 < top:
        scales.append(scale)
        scale *= 2
    return scales


def block_multiplier(grid: Grid, scale: float) -> np.ndarray:
    """Multiplier of one block in the composite decomposition (base = leq 1)."""
    mode = "leq" if scale == 1 else "exact"
    return dyadic_multiplier(grid, scale, mode)


# ---------------------------------------------------------------------------
# Fractional derivatives and the free propagator
# ---------------------------------------------------------------------------


def fractional_derivative(
    field: SpectralField, s: float, homogeneous: bool = True
) -> SpectralField:
    """Apply |grad|^s (homogeneous) or <grad>^s (inhomogeneous).

    Homogeneous with s < 0 requires a zero DC mode; the DC entry of the
    homogeneous multiplier is 0 for every s.
    """
    grid = field.grid
    fhat = field.frequency()
    if homogeneous:
        if s < 0:
            dc = abs(fhat.values[(0,) * grid.dim])
            scale = np.sqrt(np.mean(np.abs(fhat.values) ** 2)) + 1e-300
            if dc > 1e-10 * scale * grid.n ** (grid.dim / 2.0):
                raise ValueError("negative-order homogeneous derivative needs zero mean")
        with np.errstate(divide="ignore"):
            mult = np.where(grid.xi_abs > 0.0, grid.xi_abs, 1.0) ** s
        mult[(0,) * grid.dim] = 0.0
    else:
        mult = (1.0 + grid.xi_squared) ** (s / 2.0)
    return fhat.with_values(fhat.values * mult)


def sobolev_multiplier(grid: Grid, s: float, homogeneous: bool) -> np.ndarray:
    if homogeneous:
        with np.errstate(divide="ignore"):
            mult = np.where(grid.xi_abs > 0.0, grid.xi_abs, 1.0) ** s
        mult[(0,) * grid.dim] = 0.0
        return mult
    return (1.0 + grid.xi_squared) ** (s / 2.0)


def free_propagate(field: SpectralField, t: float) -> SpectralField:
    """Free Schrodinger flow: frequency multiplier exp(-i t |xi|^2)."""
    if t == 0.0:
        fhat = field.frequency()
        return fhat.with_values(fhat.values.copy())
    fhat = field.frequency()
    phase = np.exp(-1j * t * field.grid.xi_squared)
    return fhat.with_values(fhat.values * phase, time=field.time + t)
