import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrmetrology.acceptance import fidelity_qfi
from kerrmetrology.channels import (
    LossyKerrParams,
    build_model,
    lossy_kerr_pure_approx,
    lossy_kerr_pure_approx_derivatives,
    make_params,
)
from kerrmetrology.errors import DegenerateModelError, InvalidInputError, NumericalError
from kerrmetrology.estimation import (
    fidelity,
    kerr_qfi,
    loss_qfi,
    qfi_pure,
    qfim,
    qfim_expansion_lossy,
    quantum_info,
    quantumness,
    scalar_bound,
    sld,
    uhlmann,
    uhlmann_commutator,
)
from kerrmetrology.fock import coherent_amplitudes


def model(scenario, noise, delta, nbar, dim=None):
    return build_model(make_params(scenario, noise, delta, nbar), dim)


class TestClosedForms:
    def test_loss_qfi(self):
        h = qfim(model("lossy", 0.5, 0.0, 1.0))
        assert h[0, 0] == pytest.approx(np.exp(-0.5), rel=1e-4)
        assert h[0, 0] == pytest.approx(0.60653, abs=1e-5)

    def test_kerr_qfi(self):
        h = qfim(model("lossy", 0.0, 0.1, 1.0))
        assert h[1, 1] == pytest.approx(44.0, rel=1e-3)
        assert kerr_qfi(1.0) == 44.0

    @pytest.mark.parametrize("scenario", ["lossy", "dephasing"])
    def test_vacuum_probe_carries_no_information(self, scenario):
        np.testing.assert_array_equal(qfim(model(scenario, 0.5, 0.3, 0.0)), np.zeros((2, 2)))

    def test_expansion_values(self):
        h_tau, h_delta = qfim_expansion_lossy(LossyKerrParams(0.01, 0.01, 1.0))
        assert h_tau == pytest.approx(np.exp(-0.01) * (1 + 4e-4), rel=1e-12)
        assert h_delta == pytest.approx(44 - 4 * 19 * 0.01, rel=1e-12)

    def test_expansion_at_zero_nonlinearity(self):
        p = LossyKerrParams(0.2, 0.0, np.sqrt(2.0))
        h_tau, h_delta = qfim_expansion_lossy(p)
        assert h_tau == pytest.approx(loss_qfi(0.2, 2.0))
        assert h_delta == pytest.approx(kerr_qfi(2.0) - 4 * 2 * (1 + 20 + 64) * 0.2)

    def test_expansion_matches_full_qfim(self):
        h = qfim(model("lossy", 0.01, 0.01, 1.0))
        h_tau, h_delta = qfim_expansion_lossy(LossyKerrParams(0.01, 0.01, 1.0))
        assert h[0, 0] == pytest.approx(h_tau, rel=0.02)
        assert h[1, 1] == pytest.approx(h_delta, rel=0.02)


class TestSLD:
    @pytest.fixture
    def m(self):
        return model("lossy", 0.5, 0.1, 1.0)

    def test_zero_mean(self, m):
        for mu in range(2):
            assert abs(np.trace(m.rho @ sld(m, mu))) < 1e-10

    def test_reproduces_qfim(self, m):
        h = qfim(m)
        ls = [sld(m, mu) for mu in range(2)]
        for mu in range(2):
            for nu in range(2):
                assert np.trace(ls[mu] @ m.d_rho[nu]).real == pytest.approx(h[mu, nu], rel=1e-8, abs=1e-10)

    def test_solves_lyapunov_equation(self, m):
        for mu in range(2):
            l = sld(m, mu)
            lhs = (l @ m.rho + m.rho @ l) / 2
            assert np.abs(lhs - m.d_rho[mu]).max() < 1e-8 * np.abs(m.d_rho[mu]).max()

    def test_hermitian(self, m):
        l = sld(m, 1)
        np.testing.assert_allclose(l, l.conj().T, atol=1e-14)

    def test_bad_index(self, m):
        with pytest.raises(InvalidInputError):
            sld(m, 2)


class TestQFIM:
    def test_dephasing_is_diagonal_and_delta_invariant(self):
        ref = quantum_info(model("dephasing", 0.3, 0.0, 1.5))
        for delta in (0.1, 0.5):
            info = quantum_info(model("dephasing", 0.3, delta, 1.5))
            assert abs(info.qfim[0, 1]) <= 1e-8 * info.qfim.max()
            np.testing.assert_allclose(info.qfim, ref.qfim, rtol=1e-8, atol=1e-10)
            np.testing.assert_allclose(info.uhlmann, ref.uhlmann, rtol=1e-8, atol=1e-10)
            assert info.quantumness == pytest.approx(ref.quantumness, rel=1e-8)

    def test_hdelta_decreasing_in_tau(self):
        vals = [qfim(model("lossy", t, 0.5, 1.0))[1, 1] for t in np.linspace(0, 3, 16)]
        assert np.all(np.diff(vals) < 0)

    @pytest.mark.parametrize("scenario,noise,delta,nbar", [
        ("lossy", 0.5, 0.1, 1.0), ("lossy", 1.3, 0.7, 3.0), ("dephasing", 0.4, 0.2, 2.0)])
    def test_truncation_stability(self, scenario, noise, delta, nbar):
        a = qfim(model(scenario, noise, delta, nbar))
        m = model(scenario, noise, delta, nbar)
        b = qfim(model(scenario, noise, delta, nbar, m.dim + 5))
        assert np.abs(a - b).max() < 1e-5 * np.abs(b).max()

    def test_eigenvalue_cutoff_stability(self):
        m = model("lossy", 0.5, 0.3, 2.0)
        a, b = qfim(m, 1e-12), qfim(m, 1e-13)
        assert np.abs(a - b).max() < 1e-5 * np.abs(a).max()

    @pytest.mark.parametrize("scenario,noise,delta,nbar", [
        ("lossy", 0.7, 0.4, 1.5), ("dephasing", 0.6, 0.3, 0.8)])
    def test_fidelity_oracle(self, scenario, noise, delta, nbar):
        m = model(scenario, noise, delta, nbar)
        h = qfim(m)
        for mu in range(2):
            assert fidelity_qfi(m, mu) == pytest.approx(h[mu, mu], rel=0.01)

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(["lossy", "dephasing"]), st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.0, 3.0))
    def test_psd_and_symmetric(self, scenario, noise, delta, nbar):
        h = qfim(model(scenario, noise, delta, nbar))
        np.testing.assert_array_equal(h, h.T)
        assert np.linalg.eigvalsh(h).min() >= -1e-9 * max(1.0, np.abs(h).max())


class TestPureModel:
    def test_pure_kerr_state(self):
        p = LossyKerrParams(0.0, 0.3, 1.0)
        h = qfi_pure(lossy_kerr_pure_approx(p, 30), lossy_kerr_pure_approx_derivatives(p, 30))
        assert h[1, 1] == pytest.approx(44.0, rel=1e-10)

    def test_matches_mixed_state_qfim_without_nonlinearity(self):
        p = LossyKerrParams(0.005, 0.0, 1.0)
        h_pure = qfi_pure(lossy_kerr_pure_approx(p, 30), lossy_kerr_pure_approx_derivatives(p, 30))
        np.testing.assert_allclose(np.diag(h_pure), np.diag(qfim(build_model(p, 30))), rtol=1e-3)

    def test_nonlinearity_entry_near_origin(self):
        p = LossyKerrParams(0.005, 0.005, 1.0)
        h_pure = qfi_pure(lossy_kerr_pure_approx(p, 30), lossy_kerr_pure_approx_derivatives(p, 30))
        h = qfim(build_model(p, 30))
        assert h_pure[1, 1] == pytest.approx(h[1, 1], rel=1e-3)

    def test_loss_entry_near_origin_exceeds_pure_approximation(self):
        # the mixed-state loss QFI carries a delta^2/tau term the first-order pure state lacks;
        # the fidelity oracle arbitrates
        p = LossyKerrParams(0.005, 0.005, 1.0)
        m = build_model(p, 30)
        h_pure = qfi_pure(lossy_kerr_pure_approx(p, 30), lossy_kerr_pure_approx_derivatives(p, 30))
        h = qfim(m)
        assert h[0, 0] == pytest.approx(fidelity_qfi(m, 0, h=1e-4), rel=1e-5)
        assert h[0, 0] > h_pure[0, 0]

    def test_unencoded_direction_is_zero(self):
        c = coherent_amplitudes(1.0, 20)
        h = qfi_pure(c, [np.zeros(20), 1j * np.arange(20) * c])
        assert h[0, 0] == 0.0
        assert h[1, 1] == pytest.approx(4.0, rel=1e-8)

    def test_norm_check(self):
        with pytest.raises(InvalidInputError):
            qfi_pure(2 * coherent_amplitudes(1.0, 20), [np.zeros(20), np.zeros(20)])


class TestUhlmann:
    @pytest.mark.parametrize("scenario,noise,delta,nbar", [
        ("lossy", 0.5, 0.1, 1.0), ("lossy", 2.0, 1.0, 2.0), ("dephasing", 0.3, 0.1, 1.0)])
    def test_dual_formulas_agree(self, scenario, noise, delta, nbar):
        m = model(scenario, noise, delta, nbar)
        u = uhlmann(m, check=False)
        alt = uhlmann_commutator(m)
        assert abs(u[0, 1] - alt[0, 1]) <= 1e-8 * max(1.0, abs(u[0, 1]))

    def test_antisymmetric_with_zero_diagonal(self):
        u = uhlmann(model("lossy", 0.5, 0.1, 1.0))
        assert u[0, 0] == 0.0 and u[1, 1] == 0.0
        assert u[0, 1] == -u[1, 0]

    def test_pure_limit(self):
        m = model("lossy", 1e-3, 1e-3, 1.0)
        assert abs(uhlmann(m, check=False)[0, 1] - uhlmann_commutator(m)[0, 1]) < 1e-8 * max(1.0, abs(uhlmann(m)[0, 1]))


class TestQuantumness:
    def test_zero_curvature(self):
        assert quantumness(np.diag([1.0, 2.0]), np.zeros((2, 2))) == 0.0

    def test_singular_qfim(self):
        with pytest.raises(DegenerateModelError):
            quantumness(np.zeros((2, 2)), np.zeros((2, 2)))

    def test_exceeding_one_fails(self):
        with pytest.raises(NumericalError):
            quantumness(np.eye(2), np.array([[0, 2.0], [-2.0, 0]]))

    def test_in_unit_interval(self):
        info = quantum_info(model("lossy", 0.5, 0.1, 1.0))
        assert 0 < info.quantumness <= 1


class TestScalarBound:
    def test_harmonic(self):
        assert scalar_bound(np.diag([2.0, 6.0])) == pytest.approx(1.5)
        assert scalar_bound(np.eye(2)) == 0.5

    def test_singular(self):
        with pytest.raises(DegenerateModelError):
            scalar_bound(np.zeros((2, 2)))

    def test_pipeline(self):
        info = quantum_info(model("lossy", 0.5, 0.1, 1.0))
        h = info.qfim
        assert info.scalar_bound == pytest.approx(1 / np.trace(np.linalg.inv(h)), rel=1e-12)


def test_fidelity_of_identical_states():
    m = model("lossy", 0.5, 0.1, 1.0)
    assert fidelity(m.rho, m.rho) == pytest.approx(1.0, abs=1e-10)
