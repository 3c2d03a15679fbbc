"""Scaled one-fluid Euler-Poisson model: pressure law, fluxes and diagnostics.

Unknowns are the electron density ``rho``, momentum ``q = rho u`` and the
electric potential ``phi``; ``eps`` is the scaled Debye length and the ion
background density is 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, VacuumError

__all__ = [
    "GasLaw",
    "VACUUM_RHO",
    "check_density",
    "pressure",
    "sound_speed",
    "euler_flux",
    "max_wavespeed",
    "linear_mode_solution",
    "wellpreparedness_defect",
]

VACUUM_RHO = 1e-12
SCHEME_KINDS = ("classical", "si_ap")


@dataclass(frozen=True)
class GasLaw:
    """Isentropic pressure ``p = rho**gamma``."""

    gamma: float = 5.0 / 3.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigurationError(f"gamma must exceed 1, got {self.gamma}")


def check_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    bad = ~(rho >= VACUUM_RHO)
    if np.any(bad):
        idx = int(np.flatnonzero(bad.ravel())[0])
        raise VacuumError(idx, rho.ravel()[idx])
    return rho


def pressure(rho, gas: GasLaw):
    rho = check_density(rho)
    return rho**gas.gamma


def sound_speed(rho, gas: GasLaw):
    rho = check_density(rho)
    return np.sqrt(gas.gamma * rho ** (gas.gamma - 1.0))


def euler_flux(rho, q, gas: GasLaw):
    """Physical flux ``(q, q**2/rho + p)``."""
    rho = check_density(rho)
    q = np.asarray(q, dtype=float)
    return q, q * q / rho + rho**gas.gamma


def max_wavespeed(rho, q, gas: GasLaw, scheme_kind: str = "classical") -> float:
    """Largest explicit characteristic speed over all cells.

    ``classical`` treats the whole Euler flux explicitly (``|u| + c_s``);
    ``si_ap`` only the momentum flux with frozen density, whose largest
    eigenvalue is ``2|u|``.
    """
    rho = check_density(rho)
    u = np.abs(np.asarray(q, dtype=float) / rho)
    if scheme_kind == "classical":
        return float(np.max(u + sound_speed(rho, gas)))
    if scheme_kind == "si_ap":
        return float(np.max(2.0 * u))
    raise ConfigurationError(f"unknown scheme kind {scheme_kind!r}")


def linear_mode_solution(xi, eps, c_s, rho0_hat, u0_hat, t):
    """Exact Fourier mode of the Euler-Poisson system linearised about ``(1, 0, 0)``.

    Eliminating ``phi_hat = -rho_hat / (eps**2 xi**2)`` leaves a harmonic
    oscillator with angular frequency ``omega = sqrt(c_s**2 xi**2 + 1/eps**2)``.
    Returns ``(rho_hat, u_hat, phi_hat)`` at time ``t`` (``t`` may be an array).
    """
    if xi == 0:
        raise ValueError("wavenumber must be nonzero")
    if not eps > 0:
        raise ValueError("eps must be positive for the linear mode solution")
    omega = np.sqrt(c_s**2 * xi**2 + 1.0 / eps**2)
    t = np.asarray(t, dtype=float)
    cos, sin = np.cos(omega * t), np.sin(omega * t)
    rho0_hat = complex(rho0_hat)
    u0_hat = complex(u0_hat)
    rho_hat = rho0_hat * cos - 1j * (xi / omega) * u0_hat * sin
    u_hat = u0_hat * cos - 1j * (omega / xi) * rho0_hat * sin
    phi_hat = -rho_hat / (eps**2 * xi**2)
    return rho_hat, u_hat, phi_hat


def wellpreparedness_defect(rho, q, dx: float):
    """``(max|rho - 1|, max|div q|)`` with the periodic central divergence."""
    rho = np.asarray(rho, dtype=float)
    q = np.asarray(q, dtype=float)
    div = (np.roll(q, -1) - np.roll(q, 1)) / (2.0 * dx)
    return float(np.max(np.abs(rho - 1.0))), float(np.max(np.abs(div)))
