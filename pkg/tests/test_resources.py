import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrmetrology.channels import build_model, kerr_phase, make_params
from kerrmetrology.errors import TruncationError
from kerrmetrology.fock import coherent_amplitudes
from kerrmetrology.resources import (
    coherence_l1,
    gaussian_entropy,
    gaussian_reference,
    non_gaussianity,
    von_neumann_entropy,
)


def poisson(nbar, dim):
    return np.abs(coherent_amplitudes(math.sqrt(nbar), dim)) ** 2


def thermal(nbar, dim):
    n = np.arange(dim)
    return np.diag(nbar ** n / (1 + nbar) ** (n + 1))


def projector(alpha, dim=30):
    c = coherent_amplitudes(alpha, dim)
    return np.outer(c, c.conj())


class TestEntropy:
    def test_pure_state(self):
        assert von_neumann_entropy(projector(1.0)) == pytest.approx(0.0, abs=1e-8)

    def test_qubit_mixture(self):
        assert von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(math.log(2), rel=1e-14)

    def test_phase_averaged_coherent_state(self):
        p = poisson(1.0, 40)
        assert von_neumann_entropy(np.diag(p)) == pytest.approx(-np.sum(p * np.log(p)), rel=1e-12)

    def test_invariant_under_kerr_conjugation(self):
        rho = build_model(make_params("dephasing", 0.3, 0.0, 1.0)).rho
        k = np.diag(kerr_phase(0.8, rho.shape[0]))
        assert von_neumann_entropy(k @ rho @ k.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-10)


class TestGaussianReference:
    def test_coherent_state(self):
        ref = gaussian_reference(projector(1.0))
        np.testing.assert_allclose(ref.mean, [math.sqrt(2), 0.0], atol=1e-10)
        np.testing.assert_allclose(ref.cov, 0.5 * np.eye(2), atol=1e-10)
        assert ref.symplectic_eigenvalue == pytest.approx(0.5, abs=1e-8)

    def test_imaginary_amplitude(self):
        ref = gaussian_reference(projector(1j))
        np.testing.assert_allclose(ref.mean, [0.0, math.sqrt(2)], atol=1e-10)

    def test_phase_averaged_coherent_state(self):
        ref = gaussian_reference(np.diag(poisson(1.0, 40)))
        np.testing.assert_allclose(ref.mean, [0, 0], atol=1e-14)
        np.testing.assert_allclose(ref.cov, 1.5 * np.eye(2), atol=1e-10)
        assert ref.symplectic_eigenvalue == pytest.approx(1.5, abs=1e-10)

    def test_diagonal_state(self):
        p = np.array([0.2, 0.5, 0.1, 0.2])
        ref = gaussian_reference(np.diag(p))
        assert ref.symplectic_eigenvalue == pytest.approx(np.dot(np.arange(4), p) + 0.5, rel=1e-12)

    def test_covariance_psd(self):
        ref = gaussian_reference(build_model(make_params("lossy", 0.5, 0.7, 2.0)).rho)
        assert np.linalg.eigvalsh(ref.cov).min() >= 0
        assert ref.symplectic_eigenvalue >= 0.5 - 1e-10

    def test_unphysical_moments(self):
        # a squeezed-looking covariance that violates the uncertainty bound
        rho = np.zeros((3, 3), dtype=complex)
        rho[0, 0] = 1.0
        rho[0, 2] = rho[2, 0] = 0.6
        with pytest.raises(TruncationError):
            gaussian_reference(rho)


class TestNonGaussianity:
    def test_gaussian_entropy_limits(self):
        assert gaussian_entropy(0.5) == 0.0
        assert gaussian_entropy(1.5) == pytest.approx(2 * math.log(2), rel=1e-14)

    @pytest.mark.parametrize("rho", [projector(1.0), projector(0.7 + 0.3j), thermal(0.8, 80)])
    def test_gaussian_states(self, rho):
        assert abs(non_gaussianity(rho)) < 1e-6

    def test_attenuated_coherent(self):
        assert abs(non_gaussianity(build_model(make_params("lossy", 0.6, 0.0, 2.0)).rho)) < 1e-6

    def test_kerr_state_is_non_gaussian(self):
        assert non_gaussianity(build_model(make_params("lossy", 0.5, 0.8, 1.0)).rho) > 0.1

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(["lossy", "dephasing"]), st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.05, 3.0))
    def test_non_negative(self, scenario, noise, delta, nbar):
        assert non_gaussianity(build_model(make_params(scenario, noise, delta, nbar)).rho) >= -1e-8


class TestCoherence:
    def test_diagonal_state(self):
        assert coherence_l1(np.diag(poisson(1.0, 20))) == 0.0

    def test_two_level_superposition(self):
        assert coherence_l1(np.full((2, 2), 0.5)) == pytest.approx(1.0)

    def test_invariant_under_diagonal_phases(self):
        rho = build_model(make_params("lossy", 0.5, 0.3, 1.5)).rho
        rng = np.random.default_rng(11)
        for _ in range(5):
            u = np.diag(np.exp(1j * rng.uniform(0, 2 * math.pi, rho.shape[0])))
            assert coherence_l1(u @ rho @ u.conj().T) == pytest.approx(coherence_l1(rho), abs=1e-12)

    def test_invariant_under_kerr_phase(self):
        a = build_model(make_params("dephasing", 0.2, 0.0, 1.0)).rho
        b = build_model(make_params("dephasing", 0.2, 0.9, 1.0)).rho
        assert coherence_l1(b) == pytest.approx(coherence_l1(a), abs=1e-12)
