"""Time integrators: classical IMEX-RK-DAE and the semi-implicit AP scheme.

Both steppers are Runge-Kutta loops over the stages of a double tableau
``(a_tilde, a)``. The classical scheme treats the whole Euler flux explicitly
and only the electric source implicitly, so each stage needs a standard Poisson
solve with ``eps > 0``. The AP scheme freezes the density in the momentum flux
and in the electric source, and eliminates the implicit mass flux to obtain a
variable-coefficient elliptic equation that stays solvable at ``eps = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .elliptic import solve_standard_poisson, solve_variable_poisson
from .errors import ConfigurationError, SingularSystemError, StepError
from .mesh import LIMITERS, Grid1D, delta_face, face_gradient, mu_cell, pad
from .model import GasLaw, check_density, max_wavespeed
from .spatial import (
    classical_flux_differences,
    momentum_flux_difference,
    source_difference,
    viscosity_difference,
)
from .tableaux import Tableau, load_tableau, validate_tableau

__all__ = [
    "SchemeConfig",
    "State",
    "StageWorkspace",
    "Diagnostics",
    "RunReport",
    "compute_dt",
    "si_stages",
    "si_imex_step",
    "classical_imex_step",
    "dense_stage_oracle",
    "step",
    "diagnose",
    "run",
]

SCHEME_KINDS = ("classical", "si_ap")
DEFAULT_DT_MAX_FACTOR = 0.45


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme choice, CFL number and time-step guards.

    ``dt_max=None`` means ``0.45 * dx`` of the grid in use.
    ``mass_viscosity`` switches the artificial viscosity of the implicit mass
    update of the AP scheme.
    """

    scheme_kind: str = "si_ap"
    tableau: str = "lsdirk222"
    cfl_nu: float = 0.45
    eps: float = 1e-4
    gas: GasLaw = field(default_factory=GasLaw)
    limiter: str = "minmod"
    dt_max: float | None = None
    wavespeed_floor: float = 1e-12
    enforce_classical_eps_restriction: bool = True
    mass_viscosity: bool = True
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if self.scheme_kind not in SCHEME_KINDS:
            raise ConfigurationError(f"scheme must be one of {SCHEME_KINDS}, got {self.scheme_kind!r}")
        load_tableau(self.tableau)
        if not 0.0 < self.cfl_nu < 1.0:
            raise ConfigurationError("cfl must lie in (0,1)")
        if not self.eps >= 0.0:
            raise ConfigurationError(f"eps must be >= 0, got {self.eps}")
        if self.limiter not in LIMITERS:
            raise ConfigurationError(f"limiter must be one of {LIMITERS}, got {self.limiter!r}")
        if self.dt_max is not None and not self.dt_max > 0.0:
            raise ConfigurationError(f"dt_max must be positive, got {self.dt_max}")
        if not self.wavespeed_floor > 0.0:
            raise ConfigurationError("wavespeed_floor must be positive")
        if not self.blowup_threshold > 0.0:
            raise ConfigurationError("blowup_threshold must be positive")

    def dt_cap(self, grid: Grid1D) -> float:
        return self.dt_max if self.dt_max is not None else DEFAULT_DT_MAX_FACTOR * grid.dx


@dataclass(frozen=True)
class State:
    """Cell values at time ``t``; ``q_face`` is the last stage's face mass flux."""

    rho: np.ndarray
    q: np.ndarray
    phi: np.ndarray
    t: float = 0.0
    q_face: np.ndarray | None = None

    @property
    def u(self) -> np.ndarray:
        return self.q / self.rho

    def face_momentum(self) -> np.ndarray:
        if self.q_face is not None:
            return self.q_face
        return mu_cell(pad(self.q, "periodic"))


@dataclass
class StageWorkspace:
    """Per-stage arrays of one AP step (lists indexed by stage, 0-based)."""

    rho_e: list = field(default_factory=list)
    q_e: list = field(default_factory=list)
    rho_hat: list = field(default_factory=list)
    q_hat: list = field(default_factory=list)
    visc: list = field(default_factory=list)
    rho_i: list = field(default_factory=list)
    q_i: list = field(default_factory=list)
    phi_i: list = field(default_factory=list)
    mass_flux: list = field(default_factory=list)
    d_mom_flux: list = field(default_factory=list)
    source: list = field(default_factory=list)


@lru_cache(maxsize=None)
def _checked_tableau(tableau_id: str) -> Tableau:
    t = load_tableau(tableau_id)
    report = validate_tableau(t)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise ConfigurationError(f"tableau {tableau_id!r} fails validation: {names}")
    return t


def _resolve_tableau(cfg: SchemeConfig, tableau) -> Tableau:
    if tableau is None:
        return _checked_tableau(cfg.tableau)
    if isinstance(tableau, str):
        return _checked_tableau(tableau)
    return tableau


def compute_dt(state: State, grid: Grid1D, cfg: SchemeConfig) -> float:
    """CFL time step with the floor, the absolute cap and the classical ``dt <= eps`` clip."""
    speed = max_wavespeed(state.rho, state.q, cfg.gas, cfg.scheme_kind)
    dt = cfg.cfl_nu * grid.dx / max(speed, cfg.wavespeed_floor)
    dt = min(dt, cfg.dt_cap(grid))
    if cfg.scheme_kind == "classical" and cfg.enforce_classical_eps_restriction:
        dt = min(dt, cfg.eps)
    return float(dt)


def si_stages(state: State, cfg: SchemeConfig, tableau: Tableau, grid: Grid1D, dt: float) -> StageWorkspace:
    """Run all stages of one AP step and return the stage arrays.

    Stage ``k``: explicit density and momentum, explicit momentum flux, the
    hatted implicit predictors, then the elliptic solve for ``phi``, the
    momentum correction and the mass correction with the face mass flux
    ``mu(q_hat) + dt a_kk mu(rho_E) G phi``.
    """
    nu = dt / grid.dx
    at, a = tableau.a_tilde, tableau.a
    rho_n = check_density(state.rho)
    q_n = np.asarray(state.q, dtype=float)
    ws = StageWorkspace()
    for k in range(tableau.s):
        rho_e = rho_n.copy()
        q_e = q_n.copy()
        rho_hat = rho_n.copy()
        q_hat = q_n.copy()
        for l in range(k):
            dmass = delta_face(ws.mass_flux[l])
            rho_e -= nu * at[k, l] * dmass
            q_e += nu * at[k, l] * (ws.source[l] - ws.d_mom_flux[l])
            rho_hat -= nu * a[k, l] * dmass
            q_hat += nu * a[k, l] * (ws.source[l] - ws.d_mom_flux[l])
        check_density(rho_e)
        d_mom = momentum_flux_difference(rho_e, q_e, cfg.gas, cfg.limiter)
        akk = a[k, k]
        q_hat -= nu * akk * d_mom

        visc = akk * viscosity_difference(rho_e) if cfg.mass_viscosity else np.zeros_like(rho_e)
        mu_q_hat = mu_cell(pad(q_hat, "periodic"))
        rhs = rho_hat + visc - 1.0 - dt * akk * delta_face(mu_q_hat) / grid.dx
        phi = solve_variable_poisson(rho_e, cfg.eps, dt, akk, rhs, grid)

        g = face_gradient(pad(phi, "dirichlet_zero"), grid.dx)
        flux = mu_q_hat + dt * akk * mu_cell(pad(rho_e, "periodic")) * g
        source = rho_e * source_difference(phi)
        q_i = q_hat + nu * akk * source
        rho_i = rho_hat + visc - nu * akk * delta_face(flux)

        ws.rho_e.append(rho_e)
        ws.q_e.append(q_e)
        ws.rho_hat.append(rho_hat)
        ws.q_hat.append(q_hat)
        ws.visc.append(visc)
        ws.rho_i.append(rho_i)
        ws.q_i.append(q_i)
        ws.phi_i.append(phi)
        ws.mass_flux.append(flux)
        ws.d_mom_flux.append(d_mom)
        ws.source.append(source)
    return ws


def si_imex_step(state: State, cfg: SchemeConfig, tableau=None, grid: Grid1D = None, dt: float | None = None) -> State:
    """One step of the AP scheme; the result is the last stage (stiff accuracy)."""
    tableau = _resolve_tableau(cfg, tableau)
    if dt is None:
        dt = compute_dt(state, grid, cfg)
    ws = si_stages(state, cfg, tableau, grid, dt)
    rho = check_density(ws.rho_i[-1])
    return State(rho, ws.q_i[-1], ws.phi_i[-1], state.t + dt, ws.mass_flux[-1])


def classical_imex_step(state: State, cfg: SchemeConfig, tableau=None, grid: Grid1D = None, dt: float | None = None) -> State:
    """One step of the classical scheme: explicit Rusanov flux, implicit electric source."""
    tableau = _resolve_tableau(cfg, tableau)
    if not cfg.eps > 0:
        raise SingularSystemError("classical Poisson singular at eps = 0")
    if dt is None:
        dt = compute_dt(state, grid, cfg)
    nu = dt / grid.dx
    at, a = tableau.a_tilde, tableau.a
    rho_n = check_density(state.rho)
    q_n = np.asarray(state.q, dtype=float)
    d_rho, d_q, src = [], [], []
    rho = q = phi = None
    for k in range(tableau.s):
        rho = rho_n.copy()
        q = q_n.copy()
        for l in range(k):
            rho -= nu * at[k, l] * d_rho[l]
            q -= nu * at[k, l] * d_q[l]
            q += nu * a[k, l] * src[l]
        check_density(rho)
        phi = solve_standard_poisson(rho, cfg.eps, grid)
        src.append(rho * source_difference(phi))
        q += nu * a[k, k] * src[k]
        fr, fq = classical_flux_differences(rho, q, cfg.gas, cfg.limiter)
        d_rho.append(fr)
        d_q.append(fq)
    return State(rho, q, phi, state.t + dt)


def step(state: State, cfg: SchemeConfig, grid: Grid1D, dt: float | None = None) -> State:
    if cfg.scheme_kind == "si_ap":
        return si_imex_step(state, cfg, None, grid, dt)
    return classical_imex_step(state, cfg, None, grid, dt)


def dense_stage_oracle(state: State, cfg: SchemeConfig, tableau, grid: Grid1D, k: int, dt: float):
    """Solve implicit stage ``k`` (0-based) of the AP step as one coupled linear system.

    The explicit data of stage ``k`` (``rho_E``, ``rho_hat``, ``q_hat`` and the
    viscosity term) is taken from the reformulated run. The unknowns
    ``rho`` (n cells), face mass flux ``f`` (n + 1 faces), ``q`` (n cells) and
    ``phi`` (n cells) then satisfy, without any elimination::

        rho + nu a_kk delta f          = rho_hat + visc
        f - dt a_kk mu(rho_E) G phi    = mu(q_hat)
        q - nu a_kk rho_E delta S(phi) = q_hat
        eps**2 D G phi - rho           = -1
    """
    tableau = _resolve_tableau(cfg, tableau)
    n = grid.n_cells
    if n > 64:
        raise ConfigurationError("dense oracle is limited to n <= 64")
    ws = si_stages(state, cfg, tableau, grid, dt)
    akk = tableau.a[k, k]
    nu = dt / grid.dx
    dx = grid.dx
    rho_e, rho_hat, q_hat, visc = ws.rho_e[k], ws.rho_hat[k], ws.q_hat[k], ws.visc[k]

    ir, jf, iq, ip = 0, n, 2 * n + 1, 3 * n + 1
    m = 4 * n + 1
    A = np.zeros((m, m))
    b = np.zeros(m)

    def phi_col(j):
        # column and sign of cell j, with odd reflection across the walls
        if j < 0:
            return ip + (-j - 1), -1.0
        if j >= n:
            return ip + (2 * n - 1 - j), -1.0
        return ip + j, 1.0

    for i in range(n):
        A[ir + i, ir + i] = 1.0
        A[ir + i, jf + i + 1] += nu * akk
        A[ir + i, jf + i] -= nu * akk
        b[ir + i] = rho_hat[i] + visc[i]
    for j in range(n + 1):
        rho_face = 0.5 * (rho_e[(j - 1) % n] + rho_e[j % n])
        c = dt * akk * rho_face / dx
        A[jf + j, jf + j] = 1.0
        col, sgn = phi_col(j)
        A[jf + j, col] -= c * sgn
        col, sgn = phi_col(j - 1)
        A[jf + j, col] += c * sgn
        b[jf + j] = 0.5 * (q_hat[(j - 1) % n] + q_hat[j % n])
    for i in range(n):
        A[iq + i, iq + i] = 1.0
        col, sgn = phi_col(i + 1)
        A[iq + i, col] -= 0.5 * nu * akk * rho_e[i] * sgn
        col, sgn = phi_col(i - 1)
        A[iq + i, col] += 0.5 * nu * akk * rho_e[i] * sgn
        b[iq + i] = q_hat[i]
    e2 = cfg.eps**2 / dx**2
    for i in range(n):
        for j, w in ((i - 1, 1.0), (i, -2.0), (i + 1, 1.0)):
            col, sgn = phi_col(j)
            A[ip + i, col] += e2 * w * sgn
        A[ip + i, ir + i] = -1.0
        b[ip + i] = -1.0
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"dense stage system singular: {exc}") from exc
    return x[ir:jf], x[iq:ip], x[ip:]


@dataclass(frozen=True)
class Diagnostics:
    t: float
    dt: float
    max_rho_defect: float
    max_div_q: float
    total_mass: float
    phi_inf: float


def diagnose(state: State, grid: Grid1D, dt: float) -> Diagnostics:
    """Defects measured on the compact face divergence of the face mass flux."""
    div = delta_face(state.face_momentum()) / grid.dx
    return Diagnostics(
        t=float(state.t),
        dt=float(dt),
        max_rho_defect=float(np.max(np.abs(state.rho - 1.0))),
        max_div_q=float(np.max(np.abs(div))),
        total_mass=float(np.sum(state.rho) * grid.dx),
        phi_inf=float(np.max(np.abs(state.phi))),
    )


@dataclass
class RunReport:
    """Outcome of :func:`run`. ``status`` is ``completed``, ``blow_up`` or ``error``."""

    grid: Grid1D
    config: SchemeConfig
    initial: State
    final: State
    diagnostics: list = field(default_factory=list)
    status: str = "completed"
    blowup_time: float | None = None
    message: str = ""
    snapshots: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return len(self.diagnostics) - 1

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(d, name) for d in self.diagnostics])

    def max_relative_mass_drift(self) -> float:
        m = self.series("total_mass")
        if m.size < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(m)) / np.abs(m[:-1])))


def _blown_up(state: State, threshold: float) -> bool:
    for arr in (state.rho, state.q, state.phi):
        if not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > threshold:
            return True
    return False


def run(
    state: State,
    grid: Grid1D,
    cfg: SchemeConfig,
    t_end: float,
    callbacks: Iterable[Callable] = (),
    snapshot_times: Iterable[float] = (),
    max_steps: int | None = None,
) -> RunReport:
    """Advance ``state`` to ``t_end``; the last step is shortened to land on it.

    Each callback is called as ``cb(step_index, state, diagnostics)`` after
    every step. Snapshot times are hit exactly by shortening the step.
    Failures inside a step are wrapped in :class:`StepError`.
    """
    if t_end < state.t:
        raise ConfigurationError(f"t_end {t_end} precedes the initial time {state.t}")
    callbacks = list(callbacks)
    stops = sorted(t for t in snapshot_times if state.t < t < t_end)
    report = RunReport(grid, cfg, state, state, [diagnose(state, grid, 0.0)])
    _checked_tableau(cfg.tableau)
    n = 0
    span = max(abs(t_end), 1.0)
    while state.t < t_end and (t_end - state.t) > 1e-14 * span:
        if max_steps is not None and n >= max_steps:
            report.status = "error"
            report.message = f"max_steps={max_steps} reached at t={state.t}"
            break
        try:
            dt = compute_dt(state, grid, cfg)
            target = stops[0] if stops else t_end
            last = state.t + dt >= target - 1e-14 * span
            if last:
                dt = target - state.t
            new = step(state, cfg, grid, dt)
            if last:
                new = replace(new, t=target)
                if stops:
                    report.snapshots[target] = new
                    stops.pop(0)
        except Exception as exc:
            raise StepError(n + 1, state.t, exc) from exc
        n += 1
        state = new
        diag = diagnose(state, grid, dt)
        report.diagnostics.append(diag)
        report.final = state
        for cb in callbacks:
            cb(n, state, diag)
        if _blown_up(state, cfg.blowup_threshold):
            report.status = "blow_up"
            report.blowup_time = float(state.t)
            break
    return report

