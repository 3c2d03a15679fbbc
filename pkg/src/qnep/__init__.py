"""Finite-volume solvers for the scaled 1D Euler-Poisson system."""

from .errors import (
    ConfigurationError,
    QnepError,
    SingularSystemError,
    StepError,
    UnknownTableauError,
    VacuumError,
)
from .integrate import RunReport, SchemeConfig, State, run
from .mesh import build_grid
from .model import GasLaw
from .tableaux import load_tableau, validate_tableau

__version__ = "0.1.0"
