"""Numerical fluxes and flux-difference residuals of the finite-volume scheme.

Hydrodynamic fields use periodic ghosts, the potential uses homogeneous
Dirichlet ghosts. All ``*_difference`` helpers take interior cell arrays and
return cell arrays of ``delta_x`` of the corresponding face quantity (not yet
divided by ``dx``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .mesh import delta_face, mu_cell, pad, reconstruct
from .model import GasLaw, check_density, sound_speed

__all__ = [
    "ExplicitResiduals",
    "central_mass_flux",
    "rusanov_momentum_flux",
    "rusanov_flux",
    "central_source_flux",
    "mass_viscosity_face",
    "mass_flux_difference",
    "momentum_flux_difference",
    "classical_flux_differences",
    "source_difference",
    "viscosity_difference",
    "assemble_explicit_residuals",
]


def central_mass_flux(q_left_cell, q_right_cell):
    return 0.5 * (np.asarray(q_left_cell) + np.asarray(q_right_cell))


def rusanov_momentum_flux(rho_l, q_l, rho_r, q_r, gas: GasLaw):
    """Rusanov flux for the momentum equation of the semi-implicit splitting.

    The dissipation speed is ``2 max(|u_L|, |u_R|)``, the largest eigenvalue of
    the momentum flux Jacobian with the density frozen.
    """
    rho_l = check_density(rho_l)
    rho_r = check_density(rho_r)
    q_l = np.asarray(q_l, dtype=float)
    q_r = np.asarray(q_r, dtype=float)
    f_l = q_l * q_l / rho_l + rho_l**gas.gamma
    f_r = q_r * q_r / rho_r + rho_r**gas.gamma
    alpha = 2.0 * np.maximum(np.abs(q_l / rho_l), np.abs(q_r / rho_r))
    return 0.5 * (f_l + f_r) - 0.5 * alpha * (q_r - q_l)


def rusanov_flux(rho_l, q_l, rho_r, q_r, gas: GasLaw):
    """Rusanov flux of the full Euler flux ``(q, q**2/rho + p)``; speed ``|u| + c_s``."""
    rho_l = check_density(rho_l)
    rho_r = check_density(rho_r)
    u_l = q_l / rho_l
    u_r = q_r / rho_r
    alpha = np.maximum(
        np.abs(u_l) + sound_speed(rho_l, gas), np.abs(u_r) + sound_speed(rho_r, gas)
    )
    f_rho = 0.5 * (q_l + q_r) - 0.5 * alpha * (rho_r - rho_l)
    f_q = 0.5 * (q_l * u_l + rho_l**gas.gamma + q_r * u_r + rho_r**gas.gamma)
    f_q = f_q - 0.5 * alpha * (q_r - q_l)
    return f_rho, f_q


def central_source_flux(phi_left_cell, phi_right_cell):
    return 0.5 * (np.asarray(phi_left_cell) + np.asarray(phi_right_cell))


def mass_viscosity_face(rho_e_left, rho_e_right, nu: float):
    if not nu > 0:
        raise ConfigurationError(f"mesh ratio must be positive, got {nu}")
    return (np.asarray(rho_e_right) - np.asarray(rho_e_left)) / nu


def mass_flux_difference(q_i):
    """``delta_x`` of the central mass flux built from cell momenta."""
    return delta_face(mu_cell(pad(q_i, "periodic")))


def momentum_flux_difference(rho_e, q_e, gas: GasLaw, limiter: str = "minmod"):
    r = reconstruct(pad(rho_e, "periodic"), limiter)
    m = reconstruct(pad(q_e, "periodic"), limiter)
    return delta_face(rusanov_momentum_flux(r.minus, m.minus, r.plus, m.plus, gas))


def classical_flux_differences(rho, q, gas: GasLaw, limiter: str = "minmod"):
    """``delta_x`` of the full Rusanov flux, as ``(d_rho, d_q)``."""
    r = reconstruct(pad(rho, "periodic"), limiter)
    m = reconstruct(pad(q, "periodic"), limiter)
    f_rho, f_q = rusanov_flux(r.minus, m.minus, r.plus, m.plus, gas)
    return delta_face(f_rho), delta_face(f_q)


def source_difference(phi):
    """``delta_x`` of the central source flux: ``(phi_{i+1} - phi_{i-1}) / 2``."""
    ph = pad(phi, "dirichlet_zero")
    return delta_face(central_source_flux(ph[1:-2], ph[2:-1]))


def viscosity_difference(rho_e):
    """``nu * delta_x G``, i.e. the second difference of ``rho_e`` (independent of nu)."""
    r = pad(rho_e, "periodic")
    return r[3:-1] - 2.0 * r[2:-2] + r[1:-3]


@dataclass(frozen=True)
class ExplicitResiduals:
    d_mass: np.ndarray
    d_mom_flux: np.ndarray
    d_source: np.ndarray
    d_visc: np.ndarray


def assemble_explicit_residuals(
    rho_e,
    q_e,
    q_i,
    phi_i,
    gas: GasLaw,
    limiter: str = "minmod",
    mass_flux=None,
):
    """Flux differences of one stage.

    ``d_mass`` comes from the implicit momenta: the face mass flux
    ``mass_flux`` when given, otherwise the central average of the cell
    momenta ``q_i``. ``d_source`` is the non-conservative
    ``delta_x S`` (multiply by ``rho_E`` when updating the momentum).
    """
    if mass_flux is not None:
        mass_flux = np.asarray(mass_flux, dtype=float)
        if mass_flux.size != np.size(rho_e) + 1:
            raise ValueError("mass flux must live on n_cells + 1 faces")
        d_mass = delta_face(mass_flux)
    else:
        d_mass = mass_flux_difference(q_i)
    sizes = {np.size(rho_e), np.size(q_e), np.size(phi_i), d_mass.size}
    if len(sizes) != 1:
        raise ValueError("stage arrays must share the grid size")
    return ExplicitResiduals(
        d_mass=d_mass,
        d_mom_flux=momentum_flux_difference(rho_e, q_e, gas, limiter),
        d_source=source_difference(phi_i),
        d_visc=viscosity_difference(rho_e),
    )
