"""Discrete elliptic problems for the potential.

Both problems are discretised with the compact, face-based operator
``D(c G phi)`` where ``G`` is the face gradient ``(phi_{i+1} - phi_i)/dx``,
``D`` the cell divergence of face values and ``c`` a positive face
coefficient. Ghost values ``phi_{-1} = -phi_0``, ``phi_n = -phi_{n-1}`` place
``phi = 0`` on the two boundary faces.

Systems are stored with the sign flipped (``-D(c G phi) = -rhs``) so the
diagonal is positive and the matrix is symmetric positive definite.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, SingularSystemError
from .mesh import Grid1D, mu_cell, pad
from .model import check_density

__all__ = [
    "TridiagonalSystem",
    "assemble_face_operator",
    "assemble_variable_poisson",
    "solve_tridiagonal",
    "solve_standard_poisson",
    "solve_variable_poisson",
]

DEBUG = bool(os.environ.get("QNEP_DEBUG"))


@dataclass(frozen=True)
class TridiagonalSystem:
    """``sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]``.

    ``sub[0]`` and ``sup[-1]`` are zero.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[1:] += self.sub[1:] * x[:-1]
        y[:-1] += self.sup[:-1] * x[1:]
        return y

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)

    def residual(self, x) -> np.ndarray:
        return self.matvec(x) - self.rhs


def assemble_face_operator(face_coef, rhs, dx: float) -> TridiagonalSystem:
    """System for ``D(c G phi) = rhs`` with Dirichlet ghosts, sign flipped."""
    c = np.asarray(face_coef, dtype=float) / dx**2
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.size
    if c.size != n + 1:
        raise ValueError(f"need {n + 1} face coefficients, got {c.size}")
    diag = c[1:] + c[:-1]
    diag[0] += c[0]
    diag[-1] += c[-1]
    sub = np.zeros(n)
    sup = np.zeros(n)
    sub[1:] = -c[1:-1]
    sup[:-1] = -c[1:-1]
    return TridiagonalSystem(sub, diag, sup, -rhs)


def assemble_variable_poisson(rho_e, eps, dt, a_kk, rhs, grid: Grid1D) -> TridiagonalSystem:
    """Reformulated potential equation of one implicit stage.

    ``D((eps**2 + dt**2 a_kk**2 mu(rho_E)) G phi) = rhs`` where the caller
    supplies ``rhs = rho_hat - dt a_kk div(q_hat) - 1`` (plus any explicit mass
    terms of the stage).
    """
    rho_e = check_density(rho_e)
    if eps < 0 or dt <= 0 or a_kk < 0:
        raise ConfigurationError(
            f"need eps >= 0, dt > 0, a_kk >= 0 (got {eps}, {dt}, {a_kk})"
        )
    if rho_e.size != grid.n_cells or np.size(rhs) != grid.n_cells:
        raise ValueError("rho_E and rhs must have n_cells entries")
    coef = eps**2 + (dt * a_kk) ** 2 * mu_cell(pad(rho_e, "periodic"))
    if not np.min(coef) > 0:
        raise SingularSystemError("elliptic face coefficient vanishes (eps = 0 and a_kk = 0)")
    return assemble_face_operator(coef, rhs, grid.dx)


def solve_tridiagonal(sys: TridiagonalSystem, check: bool | None = None) -> np.ndarray:
    """Direct solve of a diagonally dominant tridiagonal system (LAPACK ``gtsv`` path)."""
    off = np.abs(sys.sub) + np.abs(sys.sup)
    if np.any(np.abs(sys.diag) < off * (1.0 - 1e-12)):
        raise SingularSystemError("tridiagonal system is not diagonally dominant")
    if np.any(sys.diag == 0.0):
        raise SingularSystemError("zero pivot in tridiagonal system")
    n = sys.n
    ab = np.zeros((3, n))
    ab[0, 1:] = sys.sup[:-1]
    ab[1] = sys.diag
    ab[2, :-1] = sys.sub[1:]
    try:
        x = scipy.linalg.solve_banded((1, 1), ab, sys.rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(str(exc)) from exc
    if check if check is not None else DEBUG:
        scale = np.max(np.abs(sys.rhs)) + np.max(np.abs(sys.diag) + off) * np.max(np.abs(x))
        if np.max(np.abs(sys.residual(x))) > 1e-12 * scale:
            raise SingularSystemError("tridiagonal residual above tolerance")
    return x


def solve_variable_poisson(rho_e, eps, dt, a_kk, rhs, grid: Grid1D) -> np.ndarray:
    return solve_tridiagonal(assemble_variable_poisson(rho_e, eps, dt, a_kk, rhs, grid))


def solve_standard_poisson(rho, eps, grid: Grid1D) -> np.ndarray:
    """Solve ``eps**2 D G phi = rho - 1`` with homogeneous Dirichlet potential."""
    if not eps > 0:
        raise SingularSystemError("classical Poisson singular at eps = 0")
    rho = np.asarray(rho, dtype=float)
    coef = np.full(grid.n_cells + 1, float(eps) ** 2)
    return solve_tridiagonal(assemble_face_operator(coef, rho - 1.0, grid.dx))
