"""Uniform 1D finite-volume grid, ghost cells and face/cell operators.

Cell arrays carry ``n_ghost`` ghost values on each side when padded. Face
arrays hold the ``n_cells + 1`` faces ``x_{-1/2} .. x_{n-1/2}``, boundary
faces included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "Grid1D",
    "CellField",
    "FacePair",
    "build_grid",
    "pad",
    "apply_periodic",
    "apply_dirichlet_zero",
    "delta_face",
    "mu_cell",
    "face_gradient",
    "minmod",
    "reconstruct",
]

N_GHOST = 2
BOUNDARY_RULES = ("periodic", "dirichlet_zero", "none")
LIMITERS = ("none", "minmod")


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    x_min: float
    x_max: float
    n_ghost: int = N_GHOST

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


def build_grid(n_cells: int, x_min: float = 0.0, x_max: float = 1.0) -> Grid1D:
    if int(n_cells) != n_cells or n_cells < 4:
        raise ConfigurationError(f"n_cells must be an integer >= 4, got {n_cells!r}")
    if not (np.isfinite(x_min) and np.isfinite(x_max)) or x_max <= x_min:
        raise ConfigurationError(f"need x_max > x_min, got [{x_min}, {x_max}]")
    return Grid1D(int(n_cells), float(x_min), float(x_max))


def _fill_periodic(data: np.ndarray, ng: int) -> None:
    n = data.size - 2 * ng
    data[:ng] = data[n : n + ng]
    data[n + ng :] = data[ng : 2 * ng]


def _fill_dirichlet_zero(data: np.ndarray, ng: int) -> None:
    # odd reflection about each boundary face, so face values interpolate to 0
    n = data.size - 2 * ng
    data[:ng] = -data[2 * ng - 1 : ng - 1 : -1]
    data[n + ng :] = -data[n + ng - 1 : n - 1 : -1]


def pad(values: np.ndarray, bc: str, ng: int = N_GHOST) -> np.ndarray:
    """Return ``values`` with ``ng`` ghost cells on each side filled by ``bc``."""
    values = np.asarray(values, dtype=float)
    if values.size < ng:
        raise ValueError("too few cells for the requested ghost width")
    data = np.empty(values.size + 2 * ng)
    data[ng:-ng] = values
    if bc == "periodic":
        _fill_periodic(data, ng)
    elif bc == "dirichlet_zero":
        _fill_dirichlet_zero(data, ng)
    elif bc == "none":
        data[:ng] = np.nan
        data[-ng:] = np.nan
    else:
        raise ConfigurationError(f"unknown boundary rule {bc!r}")
    return data


@dataclass
class CellField:
    """Cell values plus ghosts, tagged with the boundary rule last applied."""

    data: np.ndarray
    bc: str = "none"
    ng: int = N_GHOST

    @classmethod
    def from_interior(cls, values, bc: str = "none", ng: int = N_GHOST) -> "CellField":
        return cls(pad(values, bc, ng), bc, ng)

    @property
    def interior(self) -> np.ndarray:
        return self.data[self.ng : -self.ng]

    @property
    def n_cells(self) -> int:
        return self.data.size - 2 * self.ng


def apply_periodic(field: CellField) -> CellField:
    _fill_periodic(field.data, field.ng)
    field.bc = "periodic"
    return field


def apply_dirichlet_zero(field: CellField) -> CellField:
    _fill_dirichlet_zero(field.data, field.ng)
    field.bc = "dirichlet_zero"
    return field


def _padded(w, ng=N_GHOST):
    if isinstance(w, CellField):
        return w.data, w.ng
    return np.asarray(w, dtype=float), ng


def delta_face(f: np.ndarray) -> np.ndarray:
    """Cell-wise difference ``f_{i+1/2} - f_{i-1/2}`` of an ``n + 1`` face array."""
    f = np.asarray(f)
    if f.ndim != 1 or f.size < 2:
        raise ValueError("face array must be 1D with at least two faces")
    return f[1:] - f[:-1]


def mu_cell(w, ng: int = N_GHOST) -> np.ndarray:
    """Face average ``(w_i + w_{i+1}) / 2`` on all ``n + 1`` faces of a padded array."""
    data, ng = _padded(w, ng)
    return 0.5 * (data[ng - 1 : -ng] + data[ng : data.size - ng + 1])


def face_gradient(w, dx: float, ng: int = N_GHOST) -> np.ndarray:
    """Compact face gradient ``(w_{i+1} - w_i) / dx`` on all ``n + 1`` faces."""
    data, ng = _padded(w, ng)
    return (data[ng : data.size - ng + 1] - data[ng - 1 : -ng]) / dx


def minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


@dataclass(frozen=True)
class FacePair:
    """Left (``minus``) and right (``plus``) reconstructed states on each face."""

    minus: np.ndarray
    plus: np.ndarray


def reconstruct(w, limiter: str = "minmod", ng: int = N_GHOST) -> FacePair:
    """Piecewise linear reconstruction onto the ``n + 1`` faces of a padded array."""
    data, ng = _padded(w, ng)
    if ng < 2:
        raise ValueError("linear reconstruction needs two ghost cells")
    # slopes on cells -1 .. n
    left = data[1:-1] - data[:-2]
    right = data[2:] - data[1:-1]
    if limiter == "minmod":
        slope = minmod(left, right)
    elif limiter == "none":
        slope = 0.5 * (left + right)
    else:
        raise ConfigurationError(f"unknown limiter {limiter!r}")
    cells = data[ng - 1 : data.size - ng + 1]
    s = slope[ng - 2 : slope.size - ng + 2]
    minus = cells[:-1] + 0.5 * s[:-1]
    plus = cells[1:] - 0.5 * s[1:]
    return FacePair(minus, plus)
