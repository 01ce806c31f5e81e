"""Scatterer description: rigid lattice, single-atom wavefunction, CM state.

Units on these types follow the domain convention: positions in nm, widths in
pm, masses in amu. Conversion to SI happens inside the numerical routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class UnsupportedWavefunction(ValueError):
    """The requested analytic route needs a Gaussian single-atom density."""


def as_vec3(v) -> np.ndarray:
    """Coerce a scalar (taken as the z component) or 3-sequence to a float (3,) array."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        return np.array([0.0, 0.0, float(arr)])
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Lattice:
    positions: np.ndarray  # (n, 3), nm
    atomic_number: int = 6
    atom_mass: float = 12.0  # amu

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must be a non-empty (n, 3) array")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if int(self.atomic_number) < 1 or int(self.atomic_number) != self.atomic_number:
            raise ValueError("atomic_number must be a positive integer")
        if not self.atom_mass > 0:
            raise ValueError("atom_mass must be positive")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def total_mass(self) -> float:
        return self.n * self.atom_mass

    def translated(self, d) -> Lattice:
        return Lattice(self.positions + as_vec3(d), self.atomic_number, self.atom_mass)


def linear_chain(n: int, spacing: float, atomic_number: int = 6,
                 atom_mass: float = 12.0) -> Lattice:
    """``n`` atoms along z at ``0, spacing, ..., (n-1)*spacing`` (nm)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    pos = np.zeros((n, 3))
    pos[:, 2] = np.arange(n) * spacing
    return Lattice(pos, atomic_number, atom_mass)


@dataclass(frozen=True, eq=False)
class AtomWavefunction:
    """Single-atom position profile.

    ``width`` is in pm and means: the density standard deviation for
    ``gaussian``, the full width for ``box``, the half width for ``triangle``.
    ``tabulated`` carries ``grid = (x_nm, amplitude)`` instead.
    """

    kind: str
    width: float = 0.0
    grid: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    KINDS = ("gaussian", "box", "triangle", "tabulated")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown wavefunction kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.grid is None:
                raise ValueError("tabulated wavefunction needs a grid")
            x = np.asarray(self.grid[0], dtype=float)
            amp = np.asarray(self.grid[1], dtype=complex)
            if x.ndim != 1 or x.shape != amp.shape or x.size < 2:
                raise ValueError("grid positions and amplitudes must be 1D of equal length")
            if np.any(np.diff(x) <= 0):
                raise ValueError("grid positions must be strictly increasing")
            norm = np.trapezoid(np.abs(amp) ** 2, x)
            if abs(norm - 1.0) > 1e-8:
                raise ValueError(f"tabulated density integrates to {norm!r}, not 1")
            object.__setattr__(self, "grid", (x, amp))
        elif not self.width > 0:
            raise ValueError(f"{self.kind} width must be positive")

    @classmethod
    def gaussian(cls, sigma: float) -> AtomWavefunction:
        return cls("gaussian", sigma)

    @classmethod
    def box(cls, width: float) -> AtomWavefunction:
        return cls("box", width)

    @classmethod
    def triangle(cls, half_width: float) -> AtomWavefunction:
        return cls("triangle", half_width)

    @classmethod
    def tabulated(cls, x_nm, amplitude) -> AtomWavefunction:
        return cls("tabulated", grid=(x_nm, amplitude))

    @property
    def is_gaussian(self) -> bool:
        return self.kind == "gaussian"

    @property
    def sigma(self) -> float:
        """Standard deviation of the density ``|phi|^2`` in pm."""
        if self.kind == "gaussian":
            return self.width
        if self.kind == "box":
            return self.width / math.sqrt(12.0)
        if self.kind == "triangle":
            return self.width / math.sqrt(6.0)
        x, amp = self.grid
        rho = np.abs(amp) ** 2
        mean = np.trapezoid(x * rho, x)
        var = np.trapezoid((x - mean) ** 2 * rho, x)
        return math.sqrt(var) * 1e3


@dataclass(frozen=True, eq=False)
class SampleState:
    """Gaussian centre-of-mass description of the scatterer.

    ``cm_mean`` in nm, ``sigma0`` in pm, ``total_mass`` in amu. ``sigma0 = 0``
    is allowed and stands for the perfectly localized (static) scatterer.
    """

    cm_mean: np.ndarray
    sigma0: float
    total_mass: float

    def __post_init__(self):
        object.__setattr__(self, "cm_mean", as_vec3(self.cm_mean))
        if not (self.sigma0 >= 0 and math.isfinite(self.sigma0)):
            raise ValueError("sigma0 must be finite and >= 0")
        if not self.total_mass > 0:
            raise ValueError("total_mass must be positive")

    def with_sigma0(self, sigma0: float) -> SampleState:
        return SampleState(self.cm_mean, sigma0, self.total_mass)

    def shifted(self, d) -> SampleState:
        return SampleState(self.cm_mean + as_vec3(d), self.sigma0, self.total_mass)


def cm_state_from_lattice(lattice: Lattice, wf: AtomWavefunction) -> SampleState:
    """CM state of ``n`` independent Gaussian atoms: ``sigma0 = sigma / sqrt(n)``."""
    if not wf.is_gaussian:
        raise UnsupportedWavefunction(
            f"{wf.kind} atoms have no closed-form CM state; use the oracle module")
    return SampleState(
        cm_mean=lattice.positions.mean(axis=0),
        sigma0=wf.sigma / math.sqrt(lattice.n),
        total_mass=lattice.total_mass,
    )
