"""Reduced density matrix of a probe electron after elastic scattering on a finite-mass lattice."""

from .amplitudes import c_q_asymptotic, c_q_gaussian_exact, electron_wavelength, f_q
from .decoherence import decoherence_time, dispersed_sigma0, sweep_tau
from .density import (BeamSet, DensityMatrix, build_rho_asymptotic, build_rho_gaussian_exact,
                      fringe_contrast, intensity, overlap_gaussian, purity, rho_from_amplitudes,
                      von_neumann_entropy)
from .oracle import ProductState, build_rho_oracle, c_q_exact, clt_convergence, cm_characteristic
from .sample import AtomWavefunction, Lattice, SampleState, cm_state_from_lattice, linear_chain
from .units import convert

__version__ = "0.1.0"
