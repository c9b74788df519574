import math

import numpy as np
import pytest

from kerrmetrology.channels import build_model, make_params
from kerrmetrology.errors import DegenerateModelError, InvalidInputError, TruncationError
from kerrmetrology.estimation import qfim
from kerrmetrology.fock import coherent_amplitudes
from kerrmetrology.measurements import (
    QuadratureGrid,
    converged_homodyne_grid,
    default_half_width,
    dh_pdf,
    fi_direct,
    fim_double_homodyne,
    fim_homodyne,
    fim_ratios,
    homodyne_pdf,
    measurement_fim,
    optimize_phase,
)


def model(scenario, noise, delta, nbar):
    return build_model(make_params(scenario, noise, delta, nbar))


def projector(alpha, dim=30):
    c = coherent_amplitudes(alpha, dim)
    return np.outer(c, c.conj())


@pytest.fixture(scope="module")
def lossy_point():
    m = model("lossy", 0.5, 0.1, 1.0)
    return m, converged_homodyne_grid(m)


class TestGrid:
    def test_integrates_constant(self):
        g = QuadratureGrid.for_nbar(1.0)
        assert g.weights.sum() == pytest.approx(2 * g.half_width, abs=1e-12)
        assert g.half_width == pytest.approx(5 + 3 * math.sqrt(3))

    def test_refinement_doubles(self):
        g = QuadratureGrid.build(4.0)
        assert len(g) == 257
        assert len(g.refined()) == 514

    def test_half_width_grows_with_energy(self):
        assert default_half_width(4.0) > default_half_width(1.0)


class TestHomodynePDF:
    def test_vacuum(self):
        x = np.linspace(-4, 4, 9)
        np.testing.assert_allclose(homodyne_pdf(projector(0.0), 0.3, x), np.exp(-x ** 2) / math.sqrt(math.pi), atol=1e-14)

    def test_coherent_state_marginal(self):
        x = np.linspace(-3, 5, 17)
        ref = np.exp(-(x - math.sqrt(2)) ** 2) / math.sqrt(math.pi)
        np.testing.assert_allclose(homodyne_pdf(projector(1.0), 0.0, x), ref, atol=1e-10)

    def test_quarter_turn_centres_at_origin(self):
        x = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(homodyne_pdf(projector(1.0), math.pi / 2, x),
                                   np.exp(-x ** 2) / math.sqrt(math.pi), atol=1e-10)

    def test_scalar_input(self):
        assert isinstance(homodyne_pdf(projector(0.0), 0.0, 0.0), float)

    def test_normalized(self, lossy_point):
        m, g = lossy_point
        for th in (0.0, 1.1, 2.5):
            assert abs(g.weights @ homodyne_pdf(m.rho, th, g.nodes) - 1) < 1e-6

    def test_negative_density_rejected(self):
        bad = np.diag([0.5, -1.0, 0.5])
        with pytest.raises(TruncationError):
            homodyne_pdf(bad, 0.0, np.linspace(-1, 1, 5))


class TestDoubleHomodynePDF:
    def test_vacuum(self):
        x, y = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-2, 2, 5))
        np.testing.assert_allclose(dh_pdf(projector(0.0), x, y), np.exp(-(x ** 2 + y ** 2) / 2) / (2 * math.pi), atol=1e-14)

    def test_coherent_state(self):
        beta = 0.8 - 0.5j
        x, y = np.meshgrid(np.linspace(-3, 4, 8), np.linspace(-3, 3, 7))
        x0, y0 = math.sqrt(2) * beta.real, math.sqrt(2) * beta.imag
        ref = np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / 2) / (2 * math.pi)
        np.testing.assert_allclose(dh_pdf(projector(beta), x, y), ref, atol=1e-10)

    def test_peak_value(self):
        assert dh_pdf(projector(0.0), 0.0, 0.0) == pytest.approx(1 / (2 * math.pi))


class TestHomodyneFIM:
    @pytest.mark.parametrize("tau,nbar", [(0.5, 1.0), (1.0, 2.0)])
    def test_optimal_for_pure_loss(self, tau, nbar):
        f = fim_homodyne(model("lossy", tau, 0.0, nbar), 0.0)
        assert f[0, 0] == pytest.approx(math.exp(-tau) * nbar, rel=1e-3)

    def test_pi_periodic(self, lossy_point):
        m, g = lossy_point
        for th in (0.2, 1.3):
            a = fim_homodyne(m, th, g, refine=False)
            b = fim_homodyne(m, th + math.pi, g, refine=False)
            assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()

    def test_grid_converged(self, lossy_point):
        m, g = lossy_point
        a = fim_homodyne(m, 0.7, g, refine=False)
        b = fim_homodyne(m, 0.7, g.refined(), refine=False)
        assert np.abs(a - b).max() < 1e-6 * np.abs(b).max()

    def test_data_processing(self, lossy_point):
        m, g = lossy_point
        h = qfim(m)
        for th in np.linspace(0, math.pi, 9, endpoint=False):
            f = fim_homodyne(m, th, g, refine=False)
            assert np.linalg.eigvalsh(h - f).min() >= -1e-8
            assert np.linalg.eigvalsh(f).min() >= -1e-10


class TestPhaseOptimization:
    @pytest.mark.parametrize("criterion", ["a", "b", "c"])
    def test_beats_random_phases(self, lossy_point, criterion):
        m, g = lossy_point
        res = optimize_phase(m, criterion, g)
        assert 0 <= res.theta_opt < math.pi
        rng = np.random.default_rng(3)
        k = {"a": lambda f: f[0, 0], "b": lambda f: f[1, 1],
             "c": lambda f: np.linalg.det(f) / np.trace(f)}[criterion]
        best = max(k(fim_homodyne(m, th, g, refine=False)) for th in rng.uniform(0, math.pi, 128))
        assert k(res.fim) >= best - 1e-9 * abs(best)

    def test_flat_objective_is_flagged(self):
        res = optimize_phase(model("lossy", 0.5, 0.1, 0.0), "c")
        assert res.degenerate and res.theta_opt == 0.0

    def test_unknown_criterion(self, lossy_point):
        m, g = lossy_point
        with pytest.raises(InvalidInputError):
            optimize_phase(m, "d", g)

    def test_deterministic(self, lossy_point):
        m, g = lossy_point
        assert optimize_phase(m, "b", g).theta_opt == optimize_phase(m, "b", g).theta_opt


class TestDoubleHomodyne:
    def test_half_of_loss_qfi_without_nonlinearity(self):
        m = model("lossy", 0.5, 0.0, 1.0)
        f = fim_double_homodyne(m)
        assert f[0, 0] == pytest.approx(0.5 * math.exp(-0.5), rel=1e-3)
        assert fim_ratios(f, qfim(m))[0] == pytest.approx(0.5, rel=1e-3)

    @pytest.mark.parametrize("tau,delta,nbar", [(0.5, 0.1, 1.0), (0.5, 0.5, 2.0), (1.0, 0.1, 0.5)])
    def test_loss_ratio_below_half_with_nonlinearity(self, tau, delta, nbar):
        m = model("lossy", tau, delta, nbar)
        assert fim_ratios(fim_double_homodyne(m), qfim(m))[0] < 0.5

    def test_data_processing(self):
        m = model("dephasing", 0.3, 0.1, 1.0)
        f = fim_double_homodyne(m)
        assert np.linalg.eigvalsh(qfim(m) - f).min() >= -1e-8


class TestDirectDetection:
    @pytest.mark.parametrize("delta", [0.0, 0.1, 0.5, 2.0])
    def test_loss_information_independent_of_nonlinearity(self, delta):
        f = fi_direct(model("lossy", 0.5, delta, 1.0))
        assert f[0, 0] == pytest.approx(math.exp(-0.5), rel=1e-6)
        assert abs(f[1, 1]) < 1e-12

    def test_blind_to_dephasing(self):
        np.testing.assert_array_equal(fi_direct(model("dephasing", 0.4, 0.3, 1.0)), np.zeros((2, 2)))


class TestRatios:
    def test_identity(self):
        h = np.array([[2.0, 0.3], [0.3, 5.0]])
        assert fim_ratios(h, h) == (1.0, 1.0)

    def test_zero_qfi_entry(self):
        with pytest.raises(DegenerateModelError):
            fim_ratios(np.eye(2), np.diag([1.0, 0.0]))


class TestWrapper:
    def test_povms(self, lossy_point):
        m, _ = lossy_point
        assert measurement_fim(m, "direct").povm == "direct"
        assert measurement_fim(m, "homodyne", "a").theta_opt is not None
        with pytest.raises(InvalidInputError):
            measurement_fim(m, "heterodyne")
