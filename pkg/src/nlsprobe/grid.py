"""Periodic-box grid and complex scalar fields with physical/frequency views."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

PHYSICAL = "physical"
FREQUENCY = "frequency"
_VIEWS = (PHYSICAL, FREQUENCY)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform discretization of the periodic box [0, L)^dim.

    Physical lattice: x_j = j * dx with dx = L / n.
    Frequency lattice (FFT layout): xi in (2*pi/L) * {-n/2, ..., n/2 - 1}
    per axis, stored in wrap order so multipliers apply directly to
    unshifted transforms.
    """

    dim: int
    n: int
    box_length: float
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    @property
    def dx(self) -> float:
        # n is a power of two, so dx * n rounds back to box_length exactly
        return self.box_length / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def freq_spacing(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def nyquist(self) -> float:
        """Largest per-axis frequency magnitude, pi * n / L."""
        return np.pi * self.n / self.box_length

    @property
    def xi_axis(self) -> np.ndarray:
        if "xi_axis" not in self._cache:
            self._cache["xi_axis"] = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        return self._cache["xi_axis"]

    def _axis_reshaped(self, j: int) -> np.ndarray:
        shape = [1] * self.dim
        shape[j] = self.n
        return self.xi_axis.reshape(shape)

    @property
    def xi_squared(self) -> np.ndarray:
        """Dense |xi|^2 on the full frequency lattice (wrap order)."""
        if "xi_squared" not in self._cache:
            out = np.zeros(self.shape)
            for j in range(self.dim):
                out = out + self._axis_reshaped(j) ** 2
            self._cache["xi_squared"] = out
        return self._cache["xi_squared"]

    @property
    def xi_abs(self) -> np.ndarray:
        if "xi_abs" not in self._cache:
            self._cache["xi_abs"] = np.sqrt(self.xi_squared)
        return self._cache["xi_abs"]

    @property
    def lattice_max_abs(self) -> float:
        """Largest |xi| over the lattice (corner mode)."""
        return float(np.sqrt(self.dim) * np.abs(self.xi_axis).max())

    @property
    def x_axis(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    def radius(self) -> np.ndarray:
        """Torus distance to the origin, min over periodic images per axis."""
        if "radius" not in self._cache:
            ax = self.x_axis
            folded = np.minimum(ax, self.box_length - ax)
            out = np.zeros(self.shape)
            for j in range(self.dim):
                shape = [1] * self.dim
                shape[j] = self.n
                out = out + folded.reshape(shape) ** 2
            self._cache["radius"] = np.sqrt(out)
        return self._cache["radius"]


def build_grid(dim: int, n: int, box_length: float) -> Grid:
    """Construct a grid, rejecting non-power-of-two n and dim outside 1..3."""
    return Grid(dim=dim, n=int(n), box_length=float(box_length))


@dataclass(frozen=True)
class SpectralField:
    """Complex scalar field on a Grid, tagged with its current view.

    Treated as an immutable snapshot: the value buffer is copied on
    construction and marked read-only, so all operations return new fields.
    """

    grid: Grid
    values: np.ndarray
    view: str = PHYSICAL
    time: float = 0.0

    def __post_init__(self):
        if self.view not in _VIEWS:
            raise ValueError(f"unknown view {self.view!r}")
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if vals is self.values:
            vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values, view=None, time=None) -> "SpectralField":
        return SpectralField(
            grid=self.grid,
            values=values,
            view=self.view if view is None else view,
            time=self.time if time is None else time,
        )

    def in_view(self, view: str) -> "SpectralField":
        if view == self.view:
            return self
        return transform(self, view, _validate=False)

    def physical(self) -> "SpectralField":
        return self.in_view(PHYSICAL)

    def frequency(self) -> "SpectralField":
        return self.in_view(FREQUENCY)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_compatible(self, other)
        other = other.in_view(self.view)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_compatible(self, other)
        other = other.in_view(self.view)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar) -> "SpectralField":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def _check_compatible(a: SpectralField, b: SpectralField) -> None:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def zero_field(grid: Grid, view: str = FREQUENCY, time: float = 0.0) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128), view, time)


def transform(field: SpectralField, target_view: str, _validate: bool = True) -> SpectralField:
    """Switch between views with the unitary DFT (round trip is the identity).

    Rejects non-finite input; unitary normalization makes Parseval an identity.
    """
    if target_view not in _VIEWS:
        raise ValueError(f"unknown view {target_view!r}")
    if _validate and not np.all(np.isfinite(field.values)):
        raise ValueError("field contains NaN or Inf")
    if target_view == field.view:
        return field
    if target_view == FREQUENCY:
        vals = _fft.fftn(field.values, norm="ortho")
    else:
        vals = _fft.ifftn(field.values, norm="ortho")
    return field.with_values(vals, view=target_view)


def apply_multiplier(field: SpectralField, multiplier: np.ndarray) -> SpectralField:
    """Apply a frequency-side multiplier; result stays in the frequency view."""
    fhat = field.frequency()
    return fhat.with_values(fhat.values * multiplier)


def l2_norm(field: SpectralField) -> float:
    """Box L^2 norm; identical in either view by unitarity."""
    return float(
        np.sqrt(np.sum(np.abs(field.values) ** 2) * field.grid.cell_volume)
    )
