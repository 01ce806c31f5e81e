"""Free dispersion of the scatterer's CM and the resulting decoherence time."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .sample import SampleState, as_vec3
from .units import HBAR, convert


class AlreadyDecohered(ValueError):
    """``|q| sigma0 >= 1``: the damping is already below 1/e at t = 0."""


def _q_magnitude(q) -> float:
    if np.ndim(q) == 0:
        return abs(float(q))
    return float(np.linalg.norm(as_vec3(q)))


def spreading_time(state: SampleState) -> float:
    """``M sigma0^2 / hbar`` in seconds; the CM width grows by sqrt(2) over this time."""
    m = convert(state.total_mass, "amu", "kg")
    s = convert(state.sigma0, "pm", "m")
    return m * s * s / HBAR


def dispersed_sigma0(state: SampleState, t: float) -> float:
    """CM width (pm) after free Gaussian spreading for ``t`` seconds."""
    if t < 0:
        raise ValueError("drift time must be >= 0")
    if not state.sigma0 > 0:
        raise ValueError("dispersion needs sigma0 > 0")
    if t == 0:
        return state.sigma0
    ratio = t / spreading_time(state)
    return state.sigma0 * math.sqrt(1.0 + ratio * ratio)


def drifted(state: SampleState, t: float) -> SampleState:
    return state.with_sigma0(dispersed_sigma0(state, t))


def decoherence_time(state: SampleState, q) -> float:
    """Drift time (s) after which ``exp(-|q|^2 sigma0(t)^2)`` has fallen to 1/e.

    ``q`` is a wave vector or its magnitude, in nm^-1.
    """
    if not state.sigma0 > 0:
        raise ValueError("decoherence time needs sigma0 > 0")
    x = _q_magnitude(q) * convert(state.sigma0, "pm", "nm")
    if not 0 < x < 1:
        raise AlreadyDecohered(f"|q| sigma0 = {x!r}; decoherence time needs 0 < |q| sigma0 < 1")
    return spreading_time(state) * math.sqrt(1.0 / (x * x) - 1.0)


@dataclass(frozen=True)
class TauRow:
    mass_amu: float
    sigma0_pm: float
    q_per_nm: float
    tau_s: float
    status: str

    CSV_HEADER = ("mass_amu", "sigma0_pm", "q_per_nm", "tau_s", "status")


def sweep_tau(masses, sigma0s, qs) -> list[TauRow]:
    """Decoherence time over the Cartesian product of the inputs.

    Rows outside the formula's domain get ``tau_s = nan`` and
    ``status = "undefined"`` instead of aborting the sweep.
    """
    masses, sigma0s, qs = list(masses), list(sigma0s), list(qs)
    if not (masses and sigma0s and qs):
        raise ValueError("masses, sigma0s and qs must all be non-empty")
    rows = []
    for m, s, q in itertools.product(masses, sigma0s, qs):
        try:
            tau = decoherence_time(SampleState(np.zeros(3), s, m), q)
            status = "ok"
        except (AlreadyDecohered, ValueError):
            tau, status = float("nan"), "undefined"
        rows.append(TauRow(float(m), float(s), float(q), tau, status))
    return rows


BENCHMARK_SIGMA0_PM = 3.0
BENCHMARK_Q_PER_NM = 10.0
BENCHMARK_MASSES_AMU = (720.0, 1e6, 2e9)


def benchmark_tau_rows() -> list[TauRow]:
    """The three benchmark scatterers: C60, 1e6 amu and 2e9 amu."""
    return sweep_tau(BENCHMARK_MASSES_AMU, [BENCHMARK_SIGMA0_PM], [BENCHMARK_Q_PER_NM])
