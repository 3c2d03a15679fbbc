"""Experiment drivers, error norms, AOC tables and CSV output."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .integrate import RunReport, SchemeConfig, State, run
from .mesh import build_grid
from .model import GasLaw
from .tableaux import TABLEAU_IDS

__all__ = [
    "RunConfig",
    "AocRow",
    "AocTable",
    "parse_config",
    "experiment_perturbation",
    "experiment_maxwellian",
    "experiment_aoc",
    "run_experiment",
    "perturbation_state",
    "maxwellian_state",
    "write_report",
    "l2_error",
    "restrict",
    "write_csv",
    "write_fields_csv",
    "write_diagnostics_csv",
    "write_aoc_csv",
    "read_fields_csv",
    "read_diagnostics_csv",
    "read_aoc_csv",
    "FIELDS_HEADER",
    "DIAGNOSTICS_HEADER",
    "AOC_HEADER",
]

EXPERIMENTS = ("perturbation", "maxwellian", "aoc")
REFERENCE_MODES = ("fine_grid", "zero_potential", "both")
DEFAULT_TABLEAU = {"si_ap": "lsdirk222", "classical": "ars222"}

FIELDS_HEADER = ["x", "rho", "u", "phi"]
DIAGNOSTICS_HEADER = ["t", "dt", "max_rho_defect", "max_div_q", "total_mass", "phi_inf"]
AOC_HEADER = ["N", "l2_error_phi", "aoc"]

# per-experiment defaults; delta=None means eps**2
_DEFAULTS = {
    "perturbation": dict(eps=1e-4, n_cells=100, t_end=0.1, delta=None, domain=(0.0, 1.0)),
    "maxwellian": dict(eps=1e-4, n_cells=100, t_end=0.1, delta=1e-2, kappa=2220.0, domain=(0.0, 1.0)),
    "aoc": dict(eps=1e-6, n_cells=80, t_end=0.1, delta=1e-2, domain=(0.0, 10.0),
                n_list=(80, 160, 320, 640)),
}

_KEYS = {
    "experiment": str,
    "eps": float,
    "n_cells": int,
    "cfl": float,
    "scheme": str,
    "tableau": str,
    "t_end": float,
    "gamma": float,
    "limiter": str,
    "dt_max": float,
    "enforce_eps_restriction": bool,
    "mass_viscosity": bool,
    "blowup_threshold": float,
    "delta": float,
    "kappa": float,
    "domain": list,
    "n_list": list,
    "reference": str,
    "snapshot_times": list,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated experiment configuration."""

    experiment: str
    scheme: SchemeConfig
    n_cells: int
    domain: tuple
    t_end: float
    delta: float
    kappa: float = 2220.0
    n_list: tuple = ()
    reference: str = "fine_grid"
    snapshot_times: tuple = ()

    def parameters(self) -> dict:
        """Flat record of every physical and numerical parameter, for provenance."""
        s = self.scheme
        return {
            "experiment": self.experiment,
            "scheme": s.scheme_kind,
            "tableau": s.tableau,
            "cfl": s.cfl_nu,
            "eps": s.eps,
            "gamma": s.gas.gamma,
            "limiter": s.limiter,
            "dt_max": s.dt_max,
            "enforce_eps_restriction": s.enforce_classical_eps_restriction,
            "mass_viscosity": s.mass_viscosity,
            "n_cells": self.n_cells,
            "domain": list(self.domain),
            "t_end": self.t_end,
            "delta": self.delta,
            "kappa": self.kappa,
            "n_list": list(self.n_list),
            "reference": self.reference,
        }


def _typed(key, value, kind):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{key} must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigurationError(f"{key} must be an integer, got {value!r}")
        return int(value)
    if not isinstance(value, kind):
        raise ConfigurationError(f"{key} must be of type {kind.__name__}, got {value!r}")
    return value


def parse_config(text_or_dict) -> RunConfig:
    """Validate a flat JSON object (text or already-decoded dict).

    Unknown keys are rejected by name. Missing keys take the defaults of the
    selected experiment (``perturbation`` when ``experiment`` is absent).
    """
    if isinstance(text_or_dict, dict):
        raw = dict(text_or_dict)
    else:
        try:
            raw = json.loads(text_or_dict)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a flat JSON object")
    for key in raw:
        if key not in _KEYS:
            raise ConfigurationError(f"unknown config key {key!r}")
    cfg = {k: _typed(k, v, _KEYS[k]) for k, v in raw.items()}

    experiment = cfg.get("experiment", "perturbation")
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    d = _DEFAULTS[experiment]

    cfl = cfg.get("cfl", 0.45)
    if not 0.0 < cfl < 1.0:
        raise ConfigurationError("cfl must lie in (0,1)")
    eps = cfg.get("eps", d["eps"])
    if not eps >= 0.0:
        raise ConfigurationError(f"eps must be >= 0, got {eps}")
    scheme = cfg.get("scheme", "si_ap")
    if scheme not in DEFAULT_TABLEAU:
        raise ConfigurationError(f"scheme must be 'si_ap' or 'classical', got {scheme!r}")
    tableau = cfg.get("tableau", DEFAULT_TABLEAU[scheme])
    if tableau not in TABLEAU_IDS:
        raise ConfigurationError(f"tableau must be one of {TABLEAU_IDS}, got {tableau!r}")
    if scheme == "classical" and eps == 0.0:
        raise ConfigurationError("eps must be positive for the classical scheme")

    domain = tuple(cfg.get("domain", d["domain"]))
    if len(domain) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in domain):
        raise ConfigurationError("domain must be a pair [x_min, x_max]")
    domain = (float(domain[0]), float(domain[1]))
    if not domain[1] > domain[0]:
        raise ConfigurationError("domain must satisfy x_max > x_min")
    n_cells = cfg.get("n_cells", d["n_cells"])
    if n_cells < 4:
        raise ConfigurationError(f"n_cells must be >= 4, got {n_cells}")
    t_end = cfg.get("t_end", d["t_end"])
    if not t_end >= 0.0:
        raise ConfigurationError(f"t_end must be >= 0, got {t_end}")
    delta = cfg.get("delta", d.get("delta"))
    if delta is None:
        delta = eps**2
    kappa = cfg.get("kappa", d.get("kappa", 2220.0))

    n_list = tuple(cfg.get("n_list", d.get("n_list", ())))
    for n in n_list:
        _typed("n_list", n, int)
    n_list = tuple(int(n) for n in n_list)
    if experiment == "aoc":
        _check_nested(n_list)
    reference = cfg.get("reference", "fine_grid")
    if reference not in REFERENCE_MODES:
        raise ConfigurationError(f"reference must be one of {REFERENCE_MODES}, got {reference!r}")
    snaps = tuple(_typed("snapshot_times", t, float) for t in cfg.get("snapshot_times", ()))

    scheme_cfg = SchemeConfig(
        scheme_kind=scheme,
        tableau=tableau,
        cfl_nu=cfl,
        eps=eps,
        gas=GasLaw(cfg.get("gamma", 5.0 / 3.0)),
        limiter=cfg.get("limiter", "minmod"),
        dt_max=cfg.get("dt_max"),
        enforce_classical_eps_restriction=cfg.get("enforce_eps_restriction", True),
        mass_viscosity=cfg.get("mass_viscosity", True),
        blowup_threshold=cfg.get("blowup_threshold", 1e6),
    )
    return RunConfig(experiment, scheme_cfg, n_cells, domain, t_end, delta, kappa, n_list,
                     reference, snaps)


def _check_nested(n_list):
    if len(n_list) < 2:
        raise ConfigurationError("n_list needs at least two grids")
    for n in n_list:
        if n < 4:
            raise ConfigurationError(f"n_list entries must be >= 4, got {n}")
    for a, b in zip(n_list, n_list[1:]):
        if b < a or b % a:
            raise ConfigurationError(f"n_list must be nested (each N divides the next), got {list(n_list)}")


def _grid(cfg: RunConfig, n_cells=None):
    return build_grid(n_cells or cfg.n_cells, *cfg.domain)


def perturbation_state(grid, delta) -> State:
    x = grid.centers
    n = grid.n_cells
    return State(np.ones(n), 1.0 + delta * np.cos(2.0 * np.pi * x), np.zeros(n))


def maxwellian_state(grid, delta, kappa) -> State:
    x = grid.centers
    n = grid.n_cells
    return State(1.0 + delta * np.sin(kappa * np.pi * x), np.zeros(n), np.zeros(n))


def _finish(report: RunReport, cfg: RunConfig) -> RunReport:
    report.parameters = cfg.parameters()
    return report


def experiment_perturbation(cfg: RunConfig, callbacks=()) -> RunReport:
    """Small cosine velocity perturbation of the quasineutral state ``rho = 1, u = 1``."""
    grid = _grid(cfg)
    state = perturbation_state(grid, cfg.delta)
    report = run(state, grid, cfg.scheme, cfg.t_end, callbacks, cfg.snapshot_times)
    return _finish(report, cfg)


def experiment_maxwellian(cfg: RunConfig, callbacks=()) -> RunReport:
    """Density perturbation ``delta sin(kappa pi x)`` of a fluid at rest."""
    grid = _grid(cfg)
    state = maxwellian_state(grid, cfg.delta, cfg.kappa)
    report = run(state, grid, cfg.scheme, cfg.t_end, callbacks, cfg.snapshot_times)
    return _finish(report, cfg)


def l2_error(field, reference, dx: float) -> float:
    """Discrete L2 norm ``sqrt(dx * sum((field - reference)**2))``."""
    field = np.asarray(field, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if field.shape != reference.shape:
        raise ValueError(f"length mismatch: {field.shape} vs {reference.shape}")
    return float(math.sqrt(dx * np.sum((field - reference) ** 2)))


def restrict(values, factor: int) -> np.ndarray:
    """Average groups of ``factor`` nested fine cells onto the coarse grid."""
    values = np.asarray(values, dtype=float)
    if values.size % factor:
        raise ValueError(f"{values.size} cells cannot be restricted by {factor}")
    return values.reshape(-1, factor).mean(axis=1)


@dataclass(frozen=True)
class AocRow:
    n: int
    error: float
    aoc: float | None


@dataclass
class AocTable:
    rows: list
    metadata: dict = field(default_factory=dict)
    reports: list = field(default_factory=list, repr=False, compare=False)

    @classmethod
    def from_errors(cls, n_list, errors, metadata=None) -> "AocTable":
        rows = []
        for j, (n, e) in enumerate(zip(n_list, errors)):
            aoc = None
            if j:
                with np.errstate(divide="ignore", invalid="ignore"):
                    aoc = float(np.log2(np.float64(errors[j - 1]) / np.float64(e)))
            rows.append(AocRow(int(n), float(e), aoc))
        return cls(rows, dict(metadata or {}))

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    @property
    def aocs(self) -> np.ndarray:
        return np.array([r.aoc for r in self.rows[1:]], dtype=float)


def experiment_aoc(cfg: RunConfig, reference: str | None = None) -> AocTable:
    """L2 error in ``phi`` for each N of ``cfg.n_list`` and the observed rates.

    ``fine_grid`` compares with the same scheme at 4x the finest N, restricted by
    cell averaging; ``zero_potential`` compares with ``phi = 0``.
    """
    reference = reference or cfg.reference
    if reference not in ("fine_grid", "zero_potential"):
        raise ConfigurationError(f"reference must be 'fine_grid' or 'zero_potential', got {reference!r}")
    _check_nested(cfg.n_list)
    reports = []
    n_ref = 4 * max(cfg.n_list)
    ref_phi = None
    if reference == "fine_grid":
        grid = _grid(cfg, n_ref)
        ref = run(perturbation_state(grid, cfg.delta), grid, cfg.scheme, cfg.t_end)
        _require_completed(ref, n_ref)
        reports.append(ref)
        ref_phi = ref.final.phi
    errors = []
    for n in cfg.n_list:
        grid = _grid(cfg, n)
        rep = run(perturbation_state(grid, cfg.delta), grid, cfg.scheme, cfg.t_end)
        _require_completed(rep, n)
        reports.append(rep)
        target = np.zeros(n) if ref_phi is None else restrict(ref_phi, n_ref // n)
        errors.append(l2_error(rep.final.phi, target, grid.dx))
    meta = cfg.parameters()
    meta["reference"] = reference
    meta["reference_description"] = (
        f"same scheme at N={n_ref}, restricted by cell averaging"
        if reference == "fine_grid"
        else "phi = 0 (quasineutral limit with Dirichlet potential)"
    )
    table = AocTable.from_errors(cfg.n_list, errors, meta)
    table.reports = reports
    return table


def _require_completed(report: RunReport, n):
    if report.status != "completed":
        raise ConfigurationError(f"AOC run with N={n} ended with status {report.status}")


def run_experiment(cfg: RunConfig):
    if cfg.experiment == "perturbation":
        return experiment_perturbation(cfg)
    if cfg.experiment == "maxwellian":
        return experiment_maxwellian(cfg)
    return experiment_aoc(cfg)


# CSV

def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _read_rows(path, header):
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows or rows[0] != header:
        raise ValueError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def write_fields_csv(x, rho, u, phi, path):
    rows = [[_fmt(a), _fmt(b), _fmt(c), _fmt(d)] for a, b, c, d in zip(x, rho, u, phi)]
    _write_rows(path, FIELDS_HEADER, rows)


def read_fields_csv(path) -> dict:
    rows = _read_rows(path, FIELDS_HEADER)
    cols = np.array([[float(v) for v in r] for r in rows]).reshape(-1, 4)
    return {name: cols[:, j].copy() for j, name in enumerate(FIELDS_HEADER)}


def write_diagnostics_csv(diagnostics, path):
    rows = [[_fmt(getattr(d, name)) for name in DIAGNOSTICS_HEADER] for d in diagnostics]
    _write_rows(path, DIAGNOSTICS_HEADER, rows)


def read_diagnostics_csv(path) -> list:
    from .integrate import Diagnostics

    return [Diagnostics(*(float(v) for v in r)) for r in _read_rows(path, DIAGNOSTICS_HEADER)]


def write_aoc_csv(table: AocTable, path):
    rows = [[str(r.n), _fmt(r.error), _fmt(r.aoc)] for r in table.rows]
    _write_rows(path, AOC_HEADER, rows)


def read_aoc_csv(path) -> AocTable:
    rows = [
        AocRow(int(n), float(e), float(a) if a != "" else None)
        for n, e, a in _read_rows(path, AOC_HEADER)
    ]
    return AocTable(rows)


def write_csv(obj, path, kind: str = "fields"):
    """Write a :class:`RunReport` (``kind`` = ``fields`` or ``diagnostics``) or an :class:`AocTable`."""
    if isinstance(obj, AocTable):
        return write_aoc_csv(obj, path)
    if isinstance(obj, RunReport):
        if kind == "fields":
            s = obj.final
            return write_fields_csv(obj.grid.centers, s.rho, s.u, s.phi, path)
        if kind == "diagnostics":
            return write_diagnostics_csv(obj.diagnostics, path)
        raise ValueError(f"unknown report kind {kind!r}")
    raise TypeError(f"cannot write {type(obj).__name__} as CSV")


def write_report(report: RunReport, out_dir, stem: str) -> list:
    """Write fields, diagnostics and snapshot files; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / f"{stem}_fields.csv", out_dir / f"{stem}_diagnostics.csv"]
    write_csv(report, paths[0], "fields")
    write_csv(report, paths[1], "diagnostics")
    for t, s in sorted(report.snapshots.items()):
        p = out_dir / f"{stem}_fields_t{t:g}.csv"
        write_fields_csv(report.grid.centers, s.rho, s.u, s.phi, p)
        paths.append(p)
    return paths
