"""Brute-force reference for the analytic pipeline.

Evaluates the general single-scattering expressions for a product state of
``n`` independent atoms in one dimension. Because the state is a product,
every ``n``-dimensional expectation value splits into ``n`` one-dimensional
integrals, each done by composite Gauss-Legendre quadrature (trapezoid for
tabulated wavefunctions).

Sign convention: coefficients use ``<I| sum_j exp(i q (X_bar - X_j)) |I>``,
which matches :func:`amplitudes.c_q_asymptotic` (CM phase ``exp(+i q X_bar)``,
structure factor ``exp(-i q R_j)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .density import BeamSet, DensityMatrix, normalized
from .sample import AtomWavefunction, Lattice

MAX_ATOMS = 8
ACCURACY_TOL = 1e-8
GAUSSIAN_SUPPORT = 8.0  # in units of sigma


class QuadratureError(ArithmeticError):
    """Estimated quadrature error exceeds the accuracy tolerance."""


def _support(wf: AtomWavefunction) -> tuple[float, float]:
    w = wf.width * 1e-3  # pm -> nm
    if wf.kind == "gaussian":
        return -GAUSSIAN_SUPPORT * w, GAUSSIAN_SUPPORT * w
    if wf.kind == "box":
        return -w / 2, w / 2
    if wf.kind == "triangle":
        return -w, w
    raise ValueError(wf.kind)


def _density(wf: AtomWavefunction, x: np.ndarray) -> np.ndarray:
    w = wf.width * 1e-3
    if wf.kind == "gaussian":
        return np.exp(-0.5 * (x / w) ** 2) / (w * math.sqrt(2 * math.pi))
    if wf.kind == "box":
        return np.full_like(x, 1.0 / w)
    if wf.kind == "triangle":
        return np.clip(w - np.abs(x), 0.0, None) / (w * w)
    raise ValueError(wf.kind)


def quadrature_rule(wf: AtomWavefunction, panels: int, nodes_per_panel: int, stride: int = 1):
    """Nodes (nm, relative to the atom site) and density-weighted weights.

    Tabulated wavefunctions use the trapezoid rule on every ``stride``-th
    native grid point; ``panels`` and ``nodes_per_panel`` do not apply.
    """
    if wf.kind == "tabulated":
        x, amp = wf.grid
        idx = np.arange(0, x.size, stride)
        if idx[-1] != x.size - 1:
            idx = np.append(idx, x.size - 1)
        x = x[idx]
        w = np.zeros_like(x)
        dx = np.diff(x)
        w[:-1] += dx / 2
        w[1:] += dx / 2
        return x, w * np.abs(amp[idx]) ** 2
    a, b = _support(wf)
    t, tw = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    w = (half[:, None] * tw[None, :]).ravel()
    return x, w * _density(wf, x)


@dataclass(frozen=True, eq=False)
class ProductState:
    """``n`` identical atoms with 1D sites ``shifts`` (nm), independent of each other."""

    wavefunction: AtomWavefunction
    shifts: np.ndarray
    atomic_number: int = 6
    panels: int = 16
    nodes_per_panel: int = 16
    max_atoms: int = MAX_ATOMS
    coulomb_prefactor: float = 1.0
    stride: int = 1
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        shifts = np.atleast_1d(np.asarray(self.shifts, dtype=float))
        if shifts.ndim != 1 or shifts.size < 1:
            raise ValueError("shifts must be a non-empty 1D array")
        if shifts.size > self.max_atoms:
            raise ValueError(f"n = {shifts.size} exceeds the oracle cap of {self.max_atoms} atoms")
        object.__setattr__(self, "shifts", shifts)
        x, w = quadrature_rule(self.wavefunction, self.panels, self.nodes_per_panel, self.stride)
        norm = w.sum()
        if self.stride == 1 and abs(norm - 1.0) > ACCURACY_TOL:
            raise QuadratureError(f"single-atom density integrates to {norm!r} on the grid")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_lattice(cls, lattice: Lattice, wf: AtomWavefunction, **kw) -> ProductState:
        """Use the z coordinates of a lattice whose atoms all sit on the z axis."""
        pos = lattice.positions
        if np.any(pos[:, :2] != 0):
            raise ValueError("the oracle is one-dimensional; atoms must lie on the z axis")
        return cls(wf, pos[:, 2].copy(), lattice.atomic_number, **kw)

    @property
    def n(self) -> int:
        return self.shifts.size

    @property
    def sigma0(self) -> float:
        """CM standard deviation in pm."""
        return self.wavefunction.sigma / math.sqrt(self.n)

    def refined(self) -> ProductState:
        return replace(self, panels=2 * self.panels)

    def error_partner(self) -> tuple[ProductState, float]:
        """A second rule for error estimation and the factor applied to the difference.

        Analytic densities are compared against twice the panels. A tabulated
        grid cannot be refined, so it is compared against every other point
        and the trapezoid Richardson factor 1/3 is applied.
        """
        if self.wavefunction.kind == "tabulated":
            return replace(self, stride=2 * self.stride), 1.0 / 3.0
        return self.refined(), 1.0

    def atom_characteristic(self, k) -> np.ndarray:
        """``<phi_j| exp(i k X_j) |phi_j>`` for every atom ``j``; shape ``(n,)`` or ``(len(k), n)``."""
        k = np.asarray(k, dtype=float)
        local = np.exp(1j * np.multiply.outer(k, self.nodes)) @ self.weights
        return np.multiply.outer(local, np.ones(self.n)) * np.exp(1j * np.multiply.outer(k, self.shifts))


def _checked(fn, state: ProductState, *args, check: bool = True):
    value = fn(state, *args)
    if check:
        partner, factor = state.error_partner()
        err = factor * np.max(np.abs(np.asarray(fn(partner, *args)) - value))
        if err > ACCURACY_TOL:
            raise QuadratureError(f"estimated quadrature error {err:.3g} exceeds {ACCURACY_TOL}")
    return value


def _cm_char(state: ProductState, k: float) -> complex:
    if k == 0.0:
        return 1.0 + 0.0j  # normalization, by definition
    return complex(np.prod(state.atom_characteristic(k / state.n)))


def _c_exact(state: ProductState, q: float) -> complex:
    n = state.n
    own = state.atom_characteristic(-q * (1.0 - 1.0 / n))
    other = state.atom_characteristic(q / n)
    total = 0j
    for j in range(n):
        total += own[j] * np.prod(np.delete(other, j))
    return state.coulomb_prefactor * state.atomic_number / q**2 * total


def cm_characteristic(state: ProductState, k: float, check: bool = True) -> complex:
    """``<I| exp(i k X_bar) |I>`` with ``k`` in nm^-1."""
    return _checked(_cm_char, state, float(k), check=check)


def c_q_exact(state: ProductState, q: float, check: bool = True) -> complex:
    """``(Z e^2 / q^2) <I| sum_j exp(i q (X_bar - X_j)) |I>``.

    Atom ``j`` carries ``exp(-i q X_j (1 - 1/n))`` and every other atom
    ``exp(i q X_m / n)``; the expectation is the product of those factors.
    """
    q = float(q)
    if q == 0.0:
        raise ValueError("q = 0 is excluded")
    return _checked(_c_exact, state, q, check=check)


@dataclass(frozen=True, eq=False)
class OracleResult:
    c_q_table: dict
    overlap_table: dict
    rho: DensityMatrix

    @property
    def gamma(self) -> np.ndarray:
        return self.rho.gamma


def _beam_z(beams: BeamSet) -> np.ndarray:
    qs = beams.transfers
    if np.any(qs[:, :2] != 0):
        raise ValueError("the oracle is one-dimensional; beams must lie along z")
    return qs[:, 2]


def run_oracle(state: ProductState, beams: BeamSet, check: bool = True) -> OracleResult:
    qz = _beam_z(beams)
    c = np.array([c_q_exact(state, q, check=check) for q in qz])
    overlap = {}
    for qi in qz:
        for qj in qz:
            # <Phi_q'|Phi_q> = <I| exp(i (q' - q) X_bar) |I>
            overlap[(qi, qj)] = cm_characteristic(state, qj - qi, check=check)
    ov = np.array([[overlap[(qi, qj)] for qj in qz] for qi in qz])
    rho = normalized(beams, np.outer(c, c.conj()) * ov)
    return OracleResult(dict(zip(qz.tolist(), c)), overlap, rho)


def build_rho_oracle(state: ProductState, beams: BeamSet, check: bool = True) -> DensityMatrix:
    return run_oracle(state, beams, check=check).rho


@dataclass(frozen=True)
class CLTRow:
    n: int
    k_sigma0: float
    deviation: float

    CSV_HEADER = ("n", "k_sigma0", "deviation")


def clt_convergence(wf: AtomWavefunction, n_values, k_sigma0: float, **kw) -> list[CLTRow]:
    """Distance of the CM characteristic function from its Gaussian limit.

    For each ``n`` all atoms sit at the origin and ``k`` is chosen so that
    ``k sigma0 = k_sigma0`` with ``sigma0 = sigma / sqrt(n)``.
    """
    x, w = quadrature_rule(wf, kw.get("panels", 16), kw.get("nodes_per_panel", 16), kw.get("stride", 1))
    mean = float(np.sum(x * w))  # nm
    rows = []
    for n in n_values:
        state = ProductState(wf, np.zeros(int(n)), **kw)
        sigma0_nm = state.sigma0 * 1e-3
        k = k_sigma0 / sigma0_nm
        limit = np.exp(1j * k * mean) * math.exp(-0.5 * k_sigma0**2)
        dev = abs(cm_characteristic(state, k) - limit)
        rows.append(CLTRow(int(n), float(k_sigma0), float(dev)))
    return rows
