import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bragg_decoherence.amplitudes import ForwardBeamError
from bragg_decoherence.density import (BeamSet, DegenerateNormalization, DensityMatrix,
                                       DensityMatrixError, UnsupportedBasis, build_rho_asymptotic,
                                       entanglement_exponents, fringe_contrast, intensity,
                                       overlap_gaussian, purity, rho_from_amplitudes,
                                       von_neumann_entropy)
from bragg_decoherence.sample import AtomWavefunction, Lattice, SampleState, linear_chain

G = np.array([0.0, 0.0, 10.0])


def state(sigma0, cm=(0, 0, 0), mass=720.0):
    return SampleState(np.array(cm, dtype=float), sigma0, mass)


def two_beam(sigma0, cm=(0, 0, 0), g=G):
    return rho_from_amplitudes(state(sigma0, cm), BeamSet.two_beam(g), [1.0, 1.0])


def test_beamset_validation():
    with pytest.raises(ForwardBeamError):
        BeamSet([[0, 0, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        BeamSet([[0, 0, 1], [0, 0, 1]])
    assert BeamSet.along_z([-1, 2]).d == 2


def test_density_matrix_rejects_invalid():
    b = BeamSet.along_z([-1, 1])
    with pytest.raises(DensityMatrixError):
        DensityMatrix(b, [[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(DensityMatrixError):
        DensityMatrix(b, [[0.6, 0], [0, 0.6]])
    with pytest.raises(DensityMatrixError):
        DensityMatrix(b, [[0.5, 0.9], [0.9, 0.5]])


def test_overlap_examples():
    s = state(3.0)
    assert overlap_gaussian(s, G, G) == 1.0
    # (q' - q)^2 sigma0^2 / 2 = (2 * 10 nm^-1 * 3 pm)^2 / 2 = 0.0018
    assert overlap_gaussian(s, G, -G) == pytest.approx(math.exp(-0.0018), rel=1e-14)
    assert overlap_gaussian(s, G, -G).real == pytest.approx(0.99820, abs=1e-5)
    assert abs(overlap_gaussian(state(1e9), G, -G)) == 0.0


@given(st.tuples(*[st.floats(-20, 20)] * 3), st.tuples(*[st.floats(-20, 20)] * 3),
       st.floats(0, 100))
def test_overlap_hermitian_and_bounded(q, qp, sigma0):
    s = state(sigma0, cm=(0.1, -0.3, 0.7))
    a, b = overlap_gaussian(s, q, qp), overlap_gaussian(s, qp, q)
    assert a == pytest.approx(np.conj(b), abs=1e-15)
    assert abs(a) <= 1 + 1e-15


def test_separable_limit_is_outer_product():
    f = np.array([1.0, 0.5j, -0.3 + 0.2j])
    beams = BeamSet.along_z([-10, 10, 20])
    rho = rho_from_amplitudes(state(0.0), beams, f)
    v = f / np.linalg.norm(f)
    np.testing.assert_allclose(rho.gamma, np.outer(v, v.conj()), atol=1e-15)
    assert purity(rho) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("sigma0", [0.0, 3.0, 30.0, 200.0])
def test_two_beam_matrix(sigma0):
    rho = two_beam(sigma0)
    a = math.exp(-2 * (10 * sigma0 * 1e-3) ** 2)
    np.testing.assert_allclose(rho.gamma, 0.5 * np.array([[1, a], [a, 1]]), atol=1e-15)


def test_degenerate_normalization():
    with pytest.raises(DegenerateNormalization):
        rho_from_amplitudes(state(1.0), BeamSet.along_z([-1, 1]), [0, 0])
    with pytest.raises(DegenerateNormalization):
        build_rho_asymptotic(state(3.0), Lattice([[0, 0, 0]]), AtomWavefunction.gaussian(3.0),
                             BeamSet.along_z([-1e5, 1e5]))


def test_strong_damping_does_not_underflow():
    rho = two_beam(1e5)
    np.testing.assert_allclose(rho.gamma, np.eye(2) / 2, atol=1e-300)


def test_purity_examples():
    assert purity(two_beam(0.0)) == pytest.approx(1.0, abs=1e-15)
    # G = 10 nm^-1, sigma0 = 30 pm: a = exp(-0.18) = 0.83527, purity = (1 + a^2) / 2
    assert purity(two_beam(30.0)) == pytest.approx(0.84884, abs=1e-5)


def test_entropy_examples():
    assert von_neumann_entropy(two_beam(0.0)) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(two_beam(1e6)) == pytest.approx(math.log(2), abs=1e-12)
    assert von_neumann_entropy(two_beam(1e6), base="bits") == pytest.approx(1.0, abs=1e-12)
    # eigenvalues (1 +- a)/2 with a = exp(-0.18), evaluated independently
    assert von_neumann_entropy(two_beam(30.0)) == pytest.approx(0.284507607, abs=1e-8)


def test_entropy_rejects_negative_spectrum():
    class Fake:
        def eigenvalues(self):
            return np.array([-1e-6, 1.0 + 1e-6])
    with pytest.raises(DensityMatrixError):
        von_neumann_entropy(Fake())


def test_intensity_examples():
    sigma0 = 30.0
    a = math.exp(-2 * (10 * sigma0 * 1e-3) ** 2)
    rho = two_beam(sigma0)
    assert intensity(rho, [0, 0, 0]) == pytest.approx(1 + a, abs=1e-14)
    # 2 G r = pi
    assert intensity(rho, [0, 0, np.pi / 20]) == pytest.approx(1 - a, abs=1e-14)
    single = rho_from_amplitudes(state(5.0), BeamSet.along_z([7.0]), [2.0])
    pts = np.random.default_rng(0).uniform(-3, 3, size=(50, 3))
    np.testing.assert_allclose(intensity(single, pts), 1.0, atol=1e-15)


def test_intensity_matches_plane_wave_sum():
    # <r|rho|r> from explicit plane-wave superposition per eigenvector
    beams = BeamSet([[1.0, 0, 3.0], [0, -2.0, 1.0], [0.5, 0.5, -4.0]])
    rho = rho_from_amplitudes(state(40.0, cm=(0.1, 0.2, 0.3)), beams, [1.0, 0.7j, 0.4])
    ev, vec = np.linalg.eigh(rho.gamma)
    r = np.array([0.3, -0.7, 1.1])
    waves = np.exp(1j * beams.transfers @ r)
    expected = sum(l * abs(waves @ vec[:, i]) ** 2 for i, l in enumerate(ev))
    assert intensity(rho, r) == pytest.approx(expected, abs=1e-14)


def test_intensity_period_and_mean():
    rho = two_beam(20.0, cm=(0, 0, 0.37))
    period = np.pi / 10
    s = np.linspace(0, period, 4096, endpoint=False)
    vals = intensity(rho, s[:, None] * np.array([0, 0, 1.0]))
    shifted = intensity(rho, (s + period)[:, None] * np.array([0, 0, 1.0]))
    np.testing.assert_allclose(vals, shifted, atol=1e-12)
    assert vals.mean() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("sigma0, expected", [
    (0.0, 1.0),
    (3.0, math.exp(-0.0018)),
    (1e6, 0.0),
])
def test_fringe_contrast_examples(sigma0, expected):
    assert fringe_contrast(two_beam(sigma0), G) == pytest.approx(expected, abs=1e-9)


def test_fringe_contrast_with_offgrid_phase():
    rho = two_beam(30.0, cm=(0, 0, 0.0123))
    f = np.array([1.0, np.exp(0.77j)])
    rho2 = rho_from_amplitudes(state(30.0), BeamSet.two_beam(G), f)
    for r in (rho, rho2):
        assert fringe_contrast(r, G) == pytest.approx(2 * abs(r.gamma[0, 1]), abs=1e-9)


def test_fringe_contrast_needs_two_beams():
    rho = rho_from_amplitudes(state(3.0), BeamSet.along_z([-10, 10, 20]), [1, 1, 1])
    with pytest.raises(UnsupportedBasis):
        fringe_contrast(rho, G)
    with pytest.raises(UnsupportedBasis):
        fringe_contrast(two_beam(3.0), [1, 0, 0])


def test_exponent_bookkeeping():
    beams = BeamSet([[1.0, 2.0, 3.0], [-4.0, 0.5, 2.0], [0.0, 0.0, -7.0]])
    s = 25.0 * 1e-3
    E = entanglement_exponents(25.0, beams)
    for i, q in enumerate(beams.transfers):
        for j, qp in enumerate(beams.transfers):
            split = (q @ q + qp @ qp) * s**2 / 2 + (q - qp) @ (q - qp) * s**2 / 2
            assert E[i, j] == pytest.approx(split, rel=1e-13)


lattice_strategy = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.tuples(*[st.floats(-1, 1)] * 3), min_size=n, max_size=n))
beams_strategy = st.lists(st.tuples(*[st.integers(-25, 25)] * 3), min_size=1, max_size=6,
                          unique=True).filter(lambda qs: all(any(c) for c in qs))


@settings(max_examples=60, deadline=None)
@given(lattice_strategy, beams_strategy, st.floats(0, 40), st.tuples(*[st.floats(-1, 1)] * 3))
def test_density_invariants(pos, qs, sigma0, cm):
    lat = Lattice(np.array(pos))
    wf = AtomWavefunction.gaussian(2.0)
    beams = BeamSet(np.array(qs, dtype=float))
    s = state(sigma0, cm)
    try:
        rho = build_rho_asymptotic(s, lat, wf, beams)
    except DegenerateNormalization:
        return
    g = rho.gamma
    assert np.linalg.norm(g - g.conj().T) <= 1e-12 * np.linalg.norm(g)
    assert abs(np.trace(g) - 1) <= 1e-12
    ev = np.linalg.eigvalsh(g)
    assert ev[0] >= -1e-12 * ev[-1]
    assert purity(rho) == pytest.approx(np.trace(g @ g).real, abs=1e-12)
    assert 1 / rho.d - 1e-12 <= purity(rho) <= 1 + 1e-12
    rf = build_rho_asymptotic(s, lat, wf, beams, path="factorized")
    assert np.linalg.norm(rf.gamma - g) <= 1e-12
    # rigid CM shift: observables unchanged
    r2 = build_rho_asymptotic(s.shifted([0.3, -0.2, 0.5]), lat, wf, beams)
    assert purity(r2) == pytest.approx(purity(rho), abs=1e-12)
    assert von_neumann_entropy(r2) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


def test_mixed_whenever_spread_and_two_beams():
    lat = linear_chain(3, 0.2)
    wf = AtomWavefunction.gaussian(5.0)
    beams = BeamSet.along_z([-5.0, 5.0, 15.0])
    rho = build_rho_asymptotic(state(2.0), lat, wf, beams)
    assert purity(rho) < 1
    assert von_neumann_entropy(rho) > 0


def test_pure_iff_zero_entropy():
    for sigma0 in (0.0, 1e-3, 1.0, 10.0):
        rho = two_beam(sigma0)
        p, s = purity(rho), von_neumann_entropy(rho)
        assert (abs(p - 1) < 1e-12) == (s < 1e-9) or sigma0 == 1e-3


def test_two_beam_monotone_in_sigma0():
    sig = np.linspace(0.5, 200, 80)
    p = [purity(two_beam(s)) for s in sig]
    e = [von_neumann_entropy(two_beam(s)) for s in sig]
    assert np.all(np.diff(p) < 0)
    assert np.all(np.diff(e) > 0)
