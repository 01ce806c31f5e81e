"""Kinematic scattering amplitudes and the damped CM coefficients.

Wave vectors are in nm^-1, positions in nm, widths in pm. Amplitudes carry an
arbitrary overall scale set by ``coulomb_prefactor`` (the ``e^2`` in
``Z e^2 / q^2``); every observable downstream is a ratio and does not see it.
"""

from __future__ import annotations

import math

import numpy as np

from .sample import AtomWavefunction, Lattice, SampleState, UnsupportedWavefunction, as_vec3
from .units import PLANCK, ELECTRON_MASS, ELEMENTARY_CHARGE, SPEED_OF_LIGHT, Quantity, exp_neg

COULOMB_PREFACTOR = 1.0


class ForwardBeamError(ValueError):
    """q = 0: the Rutherford envelope diverges."""


def _q_norm(q) -> float:
    qn = float(np.linalg.norm(as_vec3(q)))
    if qn == 0.0:
        raise ForwardBeamError("momentum transfer q = 0 is excluded (forward beam)")
    return qn


def gaussian_exponent(q_per_nm: float, sigma_pm: float) -> float:
    """Dimensionless ``(|q| sigma)^2`` from domain units."""
    x = (Quantity.of(q_per_nm, "1/nm") * Quantity.of(sigma_pm, "pm")) ** 2
    return float(x)


def damping_factor(q_per_nm: float, sigma0_pm: float) -> float:
    """``exp(-q^2 sigma0^2 / 2)``, the CM damping on a single coefficient."""
    return exp_neg(gaussian_exponent(q_per_nm, sigma0_pm) / 2)


def structure_factor(lattice: Lattice, q) -> complex:
    """Lattice sum ``sum_j exp(-i q . R_j)``."""
    phases = lattice.positions @ as_vec3(q)
    return complex(np.exp(-1j * phases).sum())


def f_q(lattice: Lattice, wf: AtomWavefunction, q,
        coulomb_prefactor: float = COULOMB_PREFACTOR) -> complex:
    """Conventional Bragg amplitude: Rutherford envelope x atomic factor x structure factor.

    For a Gaussian atomic density of std ``sigma`` the atomic factor
    ``<phi| exp(-i q X) |phi>`` is ``exp(-q^2 sigma^2 / 2)``.
    """
    qn = _q_norm(q)
    if not wf.is_gaussian:
        raise UnsupportedWavefunction(
            f"f_q has a closed form only for Gaussian atoms; route {wf.kind} atoms to the oracle")
    envelope = coulomb_prefactor * lattice.atomic_number / qn**2
    atomic = exp_neg(gaussian_exponent(qn, wf.sigma) / 2)
    return envelope * atomic * structure_factor(lattice, q)


def c_q_asymptotic(state: SampleState, lattice: Lattice, wf: AtomWavefunction, q,
                   coulomb_prefactor: float = COULOMB_PREFACTOR) -> complex:
    qv = as_vec3(q)
    phase = np.exp(1j * float(qv @ state.cm_mean))
    return damping_factor(_q_norm(qv), state.sigma0) * phase * f_q(lattice, wf, qv, coulomb_prefactor)


def c_q_gaussian_exact(lattice: Lattice, wf: AtomWavefunction, q,
                       coulomb_prefactor: float = COULOMB_PREFACTOR) -> complex:
    """Exact coefficient for ``n`` independent Gaussian atoms at any ``n``.

    ``X_bar - X_j`` has variance ``sigma^2 (1 - 1/n)`` because each atom is
    correlated with the centre of mass. Relative to ``f_q`` this is a factor
    ``exp(+q^2 sigma0^2 / 2)``, not the ``exp(-q^2 sigma0^2 / 2)`` of
    :func:`c_q_asymptotic`; the two differ by ``exp(q^2 sigma0^2)``.
    """
    qv = as_vec3(q)
    qn = _q_norm(qv)
    sigma0 = wf.sigma / math.sqrt(lattice.n)
    cm = lattice.positions.mean(axis=0)
    phase = np.exp(1j * float(qv @ cm))
    boost = math.exp(gaussian_exponent(qn, sigma0) / 2)
    return boost * phase * f_q(lattice, wf, qv, coulomb_prefactor)


def electron_wavelength(kinetic_energy_kev: float) -> float:
    """Relativistic de Broglie wavelength in pm."""
    if not kinetic_energy_kev > 0:
        raise ValueError("kinetic energy must be positive")
    e = kinetic_energy_kev * 1e3 * ELEMENTARY_CHARGE
    mc2 = ELECTRON_MASS * SPEED_OF_LIGHT**2
    p = math.sqrt(2 * ELECTRON_MASS * e * (1 + e / (2 * mc2)))
    return PLANCK / p * 1e12


def wavenumber(kinetic_energy_kev: float) -> float:
    """``|k0| = 2 pi / lambda`` in nm^-1."""
    return 2 * math.pi / (electron_wavelength(kinetic_energy_kev) * 1e-3)
