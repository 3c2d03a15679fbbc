"""Double Butcher tableaux for the IMEX Runge-Kutta integrators.

Four pairs are registered:

``imex_euler_111``
    First-order semi-implicit Euler pair (explicit ``[[0]]``, implicit ``[[1]]``).
``dirk_111_classical``
    First-order pair of the classical splitting, stored with two stages.
``ars222``
    Ascher-Ruuth-Spiteri (2,2,2), three stages, first implicit stage explicit.
``lsdirk222``
    L-stable SDIRK(2,2,2), two stages, both implicit stages with ``gamma`` on the
    diagonal.

All implicit parts are stiffly accurate: the last row of ``a`` equals ``w``, so
the step result is the last implicit stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import UnknownTableauError

__all__ = [
    "Tableau",
    "Check",
    "ValidationReport",
    "TABLEAU_IDS",
    "load_tableau",
    "validate_tableau",
]

TOL = 1e-13


@dataclass(frozen=True)
class Tableau:
    id: str
    a_tilde: np.ndarray
    a: np.ndarray
    c_tilde: np.ndarray
    c: np.ndarray
    w_tilde: np.ndarray
    w: np.ndarray
    order: int

    def __post_init__(self):
        for name in ("a_tilde", "a", "c_tilde", "c", "w_tilde", "w"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def s(self) -> int:
        return self.a.shape[0]

    @property
    def implicit_diagonal(self) -> np.ndarray:
        return np.diag(self.a)

    @property
    def globally_stiffly_accurate(self) -> bool:
        """True when the explicit part is also stiffly accurate (last row of
        ``a_tilde`` equals ``w_tilde``). Informational only."""
        return bool(np.allclose(self.a_tilde[-1], self.w_tilde, rtol=0, atol=TOL))


def _imex_euler_111() -> Tableau:
    return Tableau(
        id="imex_euler_111",
        a_tilde=[[0.0]],
        a=[[1.0]],
        c_tilde=[0.0],
        c=[1.0],
        w_tilde=[1.0],
        w=[1.0],
        order=1,
    )


def _dirk_111_classical() -> Tableau:
    # The printed node columns read (0, 0); row sums give (0, 1), used here.
    return Tableau(
        id="dirk_111_classical",
        a_tilde=[[0.0, 0.0], [1.0, 0.0]],
        a=[[0.0, 0.0], [0.0, 1.0]],
        c_tilde=[0.0, 1.0],
        c=[0.0, 1.0],
        w_tilde=[1.0, 0.0],
        w=[0.0, 1.0],
        order=1,
    )


def _ars222() -> Tableau:
    g = 1.0 - sqrt(2.0) / 2.0
    sigma = 1.0 / (2.0 * g)
    d = 1.0 - sigma
    return Tableau(
        id="ars222",
        a_tilde=[[0.0, 0.0, 0.0], [g, 0.0, 0.0], [d, 1.0 - d, 0.0]],
        a=[[0.0, 0.0, 0.0], [0.0, g, 0.0], [0.0, 1.0 - g, g]],
        c_tilde=[0.0, g, 1.0],
        c=[0.0, g, 1.0],
        w_tilde=[d, 1.0 - d, 0.0],
        w=[0.0, 1.0 - g, g],
        order=2,
    )


def _lsdirk222() -> Tableau:
    g = 1.0 - sqrt(2.0) / 2.0
    sigma = 1.0 / (2.0 * g)
    return Tableau(
        id="lsdirk222",
        a_tilde=[[0.0, 0.0], [sigma, 0.0]],
        a=[[g, 0.0], [1.0 - g, g]],
        c_tilde=[0.0, sigma],
        c=[g, 1.0],
        w_tilde=[1.0 - g, g],
        w=[1.0 - g, g],
        order=2,
    )


_REGISTRY = {
    "imex_euler_111": _imex_euler_111,
    "dirk_111_classical": _dirk_111_classical,
    "ars222": _ars222,
    "lsdirk222": _lsdirk222,
}

TABLEAU_IDS = tuple(_REGISTRY)


def load_tableau(id: str) -> Tableau:
    """Return the registered tableau ``id`` with exact (closed-form) coefficients."""
    try:
        factory = _REGISTRY[id]
    except KeyError:
        raise UnknownTableauError(id) from None
    return factory()


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float


@dataclass
class ValidationReport:
    tableau_id: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def validate_tableau(t: Tableau, tol: float = TOL) -> ValidationReport:
    """Run structural and order-condition checks; failures are reported, not raised."""
    report = ValidationReport(t.id)

    def add(name, residual):
        residual = float(abs(residual))
        report.checks.append(Check(name, residual <= tol, residual))

    add("explicit_strictly_lower", np.max(np.abs(np.triu(t.a_tilde))))
    add("implicit_lower", np.max(np.abs(np.triu(t.a, k=1))))
    add("stiffly_accurate", np.max(np.abs(t.a[-1] - t.w)))
    add("explicit_row_sums", np.max(np.abs(t.a_tilde.sum(axis=1) - t.c_tilde)))
    add("implicit_row_sums", np.max(np.abs(t.a.sum(axis=1) - t.c)))
    add("order1_w", t.w.sum() - 1.0)
    add("order1_w_tilde", t.w_tilde.sum() - 1.0)
    if t.order >= 2:
        add("order2_w_c", t.w @ t.c - 0.5)
        add("order2_w_tilde_c_tilde", t.w_tilde @ t.c_tilde - 0.5)
        add("coupling_w_c_tilde", t.w @ t.c_tilde - 0.5)
        add("coupling_w_tilde_c", t.w_tilde @ t.c - 0.5)
    return report
