"""Reduced density matrix of the probe electron over a finite beam set.

The basis is ``{|k0 + q>}`` for the momentum transfers ``q`` of a
:class:`BeamSet`. Matrices are normalized to unit trace at build time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import amplitudes
from .sample import AtomWavefunction, Lattice, SampleState, as_vec3
from .units import convert

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-12
CLIP_TOL = 1e-10
CONTRAST_SAMPLES = 1024


class DensityMatrixError(ValueError):
    """A matrix violates Hermiticity, unit trace or positivity."""


class DegenerateNormalization(ValueError):
    """Every amplitude vanished, so the trace cannot be normalized."""


class UnsupportedBasis(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BeamSet:
    """Ordered momentum transfers (nm^-1); ``k0`` only labels the basis."""

    transfers: np.ndarray
    k0: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        qs = np.asarray(self.transfers, dtype=float)
        if qs.ndim == 1:
            qs = np.array([as_vec3(q) for q in qs])
        if qs.ndim != 2 or qs.shape[1] != 3 or qs.shape[0] < 1:
            raise ValueError("transfers must be a non-empty list of 3-vectors")
        if not np.all(np.isfinite(qs)):
            raise ValueError("transfers must be finite")
        if np.any(np.linalg.norm(qs, axis=1) == 0):
            raise amplitudes.ForwardBeamError("q = 0 is not allowed in a beam set")
        if len({tuple(q) for q in qs}) != len(qs):
            raise ValueError("duplicate momentum transfer in beam set")
        qs.setflags(write=False)
        object.__setattr__(self, "transfers", qs)
        object.__setattr__(self, "k0", as_vec3(self.k0))

    @classmethod
    def along_z(cls, qz, k0=0.0) -> BeamSet:
        return cls(np.array([[0.0, 0.0, float(q)] for q in qz]), as_vec3(k0))

    @classmethod
    def two_beam(cls, g) -> BeamSet:
        """Symmetric ``{-G, +G}`` basis, in that order."""
        g = as_vec3(g)
        return cls(np.array([-g, g]))

    @property
    def d(self) -> int:
        return self.transfers.shape[0]

    def __len__(self):
        return self.d


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: BeamSet
    gamma: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma, dtype=complex)
        if g.shape != (self.basis.d, self.basis.d):
            raise DensityMatrixError(f"gamma shape {g.shape} does not match basis size {self.basis.d}")
        check_density_matrix(g)
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def d(self) -> int:
        return self.basis.d

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.gamma)


def check_density_matrix(g: np.ndarray, hermitian_tol=HERMITIAN_TOL,
                         trace_tol=TRACE_TOL, psd_tol=PSD_TOL) -> None:
    norm = np.linalg.norm(g)
    if np.linalg.norm(g - g.conj().T) > hermitian_tol * max(norm, 1.0):
        raise DensityMatrixError("matrix is not Hermitian")
    tr = np.trace(g)
    if abs(tr - 1.0) > trace_tol:
        raise DensityMatrixError(f"trace is {tr!r}, not 1")
    ev = np.linalg.eigvalsh(g)
    if ev[0] < -psd_tol * ev[-1]:
        raise DensityMatrixError(f"matrix is not positive semidefinite (min eigenvalue {ev[0]!r})")


def normalized(basis: BeamSet, raw: np.ndarray) -> DensityMatrix:
    tr = float(np.real(np.trace(raw)))
    if not tr > 0 or not math.isfinite(tr):
        raise DegenerateNormalization("all scattering amplitudes vanish; cannot normalize")
    g = raw / tr
    # enforce exact Hermitian symmetry lost to rounding
    g = 0.5 * (g + g.conj().T)
    return DensityMatrix(basis, g)


def overlap_gaussian(state: SampleState, q, q_prime) -> complex:
    """``<F_q'|F_q>`` for boosted Gaussian CM states."""
    dq = as_vec3(q_prime) - as_vec3(q)
    if not np.any(dq):
        return 1.0 + 0.0j
    phase = np.exp(1j * float(dq @ state.cm_mean))
    damp = math.exp(-amplitudes.gaussian_exponent(float(np.linalg.norm(dq)), state.sigma0) / 2)
    return complex(phase * damp)


def entanglement_exponents(sigma0_pm: float, beams: BeamSet) -> np.ndarray:
    """Matrix of ``(|q|^2 + |q'|^2 - q.q') sigma0^2`` (dimensionless)."""
    s = convert(sigma0_pm, "pm", "nm")
    qs = beams.transfers * s
    sq = np.einsum("ij,ij->i", qs, qs)
    return sq[:, None] + sq[None, :] - qs @ qs.T


def rho_from_amplitudes(state: SampleState, beams: BeamSet, f) -> DensityMatrix:
    """Asymptotic matrix from explicit conventional amplitudes ``f_q``."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (beams.d,):
        raise ValueError("need one amplitude per beam")
    if not np.any(f):
        raise DegenerateNormalization("all scattering amplitudes vanish; cannot normalize")
    # work in logs and shift by the largest diagonal so heavy damping cannot underflow
    with np.errstate(divide="ignore"):
        log_f = np.log(np.abs(f))
    log_mag = -entanglement_exponents(state.sigma0, beams) + log_f[:, None] + log_f[None, :]
    shift = np.max(np.diag(log_mag))
    if not np.isfinite(shift):
        raise DegenerateNormalization("all scattering amplitudes vanish; cannot normalize")
    unit = np.where(f != 0, f / np.where(f != 0, np.abs(f), 1.0), 0.0)
    raw = np.exp(log_mag - shift) * np.outer(unit, unit.conj())
    return normalized(beams, raw)


def rho_factorized(state: SampleState, beams: BeamSet, c) -> DensityMatrix:
    """``gamma ~ c_q c_q'^* <F_q'|F_q>`` from damped coefficients ``c_q``."""
    c = np.asarray(c, dtype=complex)
    qs = beams.transfers
    ov = np.array([[overlap_gaussian(state, qi, qj) for qj in qs] for qi in qs])
    return normalized(beams, np.outer(c, c.conj()) * ov)


def build_rho_asymptotic(state: SampleState, lattice: Lattice, wf: AtomWavefunction,
                         beams: BeamSet, path: str = "direct") -> DensityMatrix:
    """Large-``n`` density matrix.

    ``path="direct"`` uses the combined exponent on ``f_q f_q'^*``;
    ``path="factorized"`` multiplies damped ``c_q`` by the CM overlap. The two
    agree to rounding.
    """
    if path == "direct":
        f = [amplitudes.f_q(lattice, wf, q) for q in beams.transfers]
        return rho_from_amplitudes(state, beams, f)
    if path == "factorized":
        c = [amplitudes.c_q_asymptotic(state, lattice, wf, q) for q in beams.transfers]
        return rho_factorized(state, beams, c)
    raise ValueError(f"unknown path {path!r}")


def build_rho_gaussian_exact(lattice: Lattice, wf: AtomWavefunction, beams: BeamSet) -> DensityMatrix:
    """Exact matrix for independent Gaussian atoms at finite ``n``.

    Same CM overlap as the asymptotic form, but with the correlated
    coefficients of :func:`amplitudes.c_q_gaussian_exact`.
    """
    from .sample import cm_state_from_lattice

    state = cm_state_from_lattice(lattice, wf)
    c = [amplitudes.c_q_gaussian_exact(lattice, wf, q) for q in beams.transfers]
    return rho_factorized(state, beams, c)


def purity(rho: DensityMatrix) -> float:
    return float(np.sum(np.abs(rho.gamma) ** 2))


def clipped_eigenvalues(rho: DensityMatrix) -> np.ndarray:
    ev = rho.eigenvalues()
    if ev[0] < -CLIP_TOL or ev[-1] > 1 + CLIP_TOL:
        raise DensityMatrixError(f"eigenvalues outside [0, 1]: {ev[0]!r}, {ev[-1]!r}")
    return np.clip(ev, 0.0, 1.0)


def von_neumann_entropy(rho: DensityMatrix, base: str = "nats") -> float:
    """``-sum lambda ln lambda`` over the spectrum; ``base="bits"`` for log2."""
    ev = clipped_eigenvalues(rho)
    ev = ev[ev > 0]
    s = max(float(-np.sum(ev * np.log(ev))), 0.0)
    if base == "bits":
        return s / math.log(2)
    if base != "nats":
        raise ValueError(f"unknown entropy base {base!r}")
    return s


def intensity(rho: DensityMatrix, r) -> np.ndarray | float:
    """Real-space diagonal ``<r|rho|r>`` at one point or an ``(m, 3)`` array of points (nm).

    Averages to 1 over a fringe period since the trace is 1.
    """
    pts = np.asarray(r, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    phases = np.exp(1j * pts @ rho.basis.transfers.T)  # (m, d): e^{i q.r}
    vals = np.einsum("mi,ij,mj->m", phases, rho.gamma, phases.conj())
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(vals.real))):
        raise DensityMatrixError("intensity has a non-negligible imaginary part")
    out = vals.real
    return float(out[0]) if single else out


def fringe_period(rho: DensityMatrix, g_direction) -> float:
    """Fringe period (nm) along ``g_direction`` for a two-beam matrix."""
    if rho.d != 2:
        raise UnsupportedBasis(f"fringe contrast needs a two-beam basis, got d={rho.d}")
    u = as_vec3(g_direction)
    u = u / np.linalg.norm(u)
    dq = rho.basis.transfers[0] - rho.basis.transfers[1]
    proj = abs(float(dq @ u))
    if proj == 0.0:
        raise UnsupportedBasis("no fringes along a direction orthogonal to q - q'")
    return 2 * math.pi / proj


def fringe_contrast(rho: DensityMatrix, g_direction) -> float:
    """``(I_max - I_min) / (I_max + I_min)`` scanned over one period along ``g_direction``.

    The grid extremum is polished with a bounded scalar search so that an
    off-grid fringe phase does not bias the result.
    """
    period = fringe_period(rho, g_direction)
    u = as_vec3(g_direction) / np.linalg.norm(g_direction)
    s = np.arange(CONTRAST_SAMPLES) * (period / CONTRAST_SAMPLES)
    vals = intensity(rho, s[:, None] * u)
    step = period / CONTRAST_SAMPLES

    def polish(i, sign):
        res = minimize_scalar(lambda x: -sign * intensity(rho, x * u),
                              bounds=(s[i] - step, s[i] + step), method="bounded",
                              options={"xatol": step * 1e-10})
        return max(sign * vals[i], -res.fun) * sign

    i_max = polish(int(np.argmax(vals)), 1.0)
    i_min = polish(int(np.argmin(vals)), -1.0)
    return float((i_max - i_min) / (i_max + i_min))
