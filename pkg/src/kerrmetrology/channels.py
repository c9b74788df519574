"""Statistical models of the lossy-Kerr and dephasing-Kerr channels.

Both channels act on a coherent probe and have closed-form Fock matrix
elements, so states and their parameter derivatives are built entrywise.
Parameter order is always ``(noise, delta)``: ``(tau, delta)`` for the lossy
channel, ``(sigma, delta)`` for the dephasing channel.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InvalidInputError, NumericalError
from .fock import EPS_TRUNC, TRUNC_MARGIN, coherent_amplitudes, model_dimension

TAU_LIMIT = 1e-12
_SERIES_RADIUS = 1e-2


def _check_param(name, value):
    if not np.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value}")
    if value < 0:
        raise InvalidInputError(f"{name} must be >= 0, got {value}")


def _check_alpha(alpha):
    alpha = complex(alpha)
    if not (np.isfinite(alpha.real) and np.isfinite(alpha.imag)):
        raise InvalidInputError(f"alpha must be finite, got {alpha!r}")
    return alpha


@dataclass(frozen=True)
class LossyKerrParams:
    """Loss ``tau = Gamma t``, nonlinearity ``delta = kappa t``, probe amplitude."""

    tau: float
    delta: float
    alpha: complex = 1.0

    def __post_init__(self):
        _check_param("tau", self.tau)
        _check_param("delta", self.delta)
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))

    @property
    def nbar(self):
        return abs(self.alpha) ** 2

    @property
    def values(self):
        return (self.tau, self.delta)

    def replace(self, noise=None, delta=None):
        return LossyKerrParams(
            self.tau if noise is None else noise,
            self.delta if delta is None else delta,
            self.alpha,
        )


@dataclass(frozen=True)
class DephasingKerrParams:
    """Phase-noise amplitude ``sigma = sqrt(gamma t)``, nonlinearity, probe amplitude."""

    sigma: float
    delta: float
    alpha: complex = 1.0

    def __post_init__(self):
        _check_param("sigma", self.sigma)
        _check_param("delta", self.delta)
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))

    @property
    def nbar(self):
        return abs(self.alpha) ** 2

    @property
    def values(self):
        return (self.sigma, self.delta)

    def replace(self, noise=None, delta=None):
        return DephasingKerrParams(
            self.sigma if noise is None else noise,
            self.delta if delta is None else delta,
            self.alpha,
        )


def _prefactor(alpha, dim):
    """``alpha^n conj(alpha)^m / sqrt(n! m!)`` built from the coherent recurrence."""
    c = coherent_amplitudes(alpha, dim) * np.exp(abs(alpha) ** 2 / 2)
    return np.outer(c, c.conj())


def _relax(z):
    """``f(z) = (1 - exp(-z)) / z`` and ``f'(z)``, analytic through ``z = 0``."""
    z = np.asarray(z, dtype=complex)
    f = np.empty_like(z)
    df = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small]
    # f(z) = sum_k (-z)^k / (k+1)!
    f_s = np.zeros_like(zs)
    df_s = np.zeros_like(zs)
    for k in range(9):
        f_s += (-zs) ** k / math.factorial(k + 1)
        if k >= 1:
            df_s += (-1) ** k * k * zs ** (k - 1) / math.factorial(k + 1)
    f[small] = f_s
    df[small] = df_s
    zl = z[~small]
    em = np.exp(-zl)
    f[~small] = -np.expm1(-zl) / zl
    df[~small] = (em * (1 + zl) - 1) / zl ** 2
    return f, df


def _lossy_exponent(p, dim):
    n = np.arange(dim)
    diff = n[:, None] - n[None, :]
    tot = n[:, None] + n[None, :]
    z = p.tau + 2j * p.delta * diff
    f, df = _relax(z)
    nbar = p.nbar
    g = -tot * z / 2 - nbar * (1 - p.tau * f)
    dg_tau = -tot / 2 + nbar * (f + p.tau * df)
    dg_delta = 2j * diff * (-tot / 2 + nbar * p.tau * df)
    return g, dg_tau, dg_delta


def lossy_kerr_state(p, dim):
    """Fock matrix of a coherent probe after the lossy-Kerr channel.

    The exponent is evaluated through ``tau*Delta = tau + 2i delta (n-m)`` and
    ``(1 - exp(-tau Delta))/Delta = tau f(tau Delta)``, which is regular at
    ``tau = 0`` where the state reduces to the Kerr-evolved coherent state.
    """
    if dim < 1:
        raise InvalidInputError(f"dim must be >= 1, got {dim}")
    if p.tau < TAU_LIMIT:
        n = np.arange(dim)
        c = coherent_amplitudes(p.alpha, dim) * np.exp(-1j * p.delta * n ** 2)
        return np.outer(c, c.conj())
    g, _, _ = _lossy_exponent(p, dim)
    rho = _prefactor(p.alpha, dim) * np.exp(g)
    return _hermitize(rho, "lossy-Kerr state")


def lossy_kerr_derivatives(p, dim):
    """Entrywise analytic ``(d rho/d tau, d rho/d delta)``."""
    g, dg_tau, dg_delta = _lossy_exponent(p, dim)
    rho = _prefactor(p.alpha, dim) * np.exp(g)
    return (
        _hermitize(rho * dg_tau, "d/dtau"),
        _hermitize(rho * dg_delta, "d/ddelta"),
    )


def lossy_kerr_pure_approx(p, dim):
    """Amplitudes of the pure-state approximation valid for small ``tau, delta``."""
    n = np.arange(dim)
    nbar = p.nbar
    c = coherent_amplitudes(p.alpha, dim) * np.exp(nbar / 2)
    return c * np.exp(
        -p.tau * n / 2 - 1j * p.delta * n ** 2 - nbar * (np.exp(-p.tau) / 2 + 1j * p.tau * p.delta * n)
    )


def lossy_kerr_pure_approx_derivatives(p, dim):
    """``(d c/d tau, d c/d delta)`` of :func:`lossy_kerr_pure_approx`."""
    n = np.arange(dim)
    nbar = p.nbar
    c = lossy_kerr_pure_approx(p, dim)
    d_tau = c * (-n / 2 + nbar * np.exp(-p.tau) / 2 - 1j * nbar * p.delta * n)
    d_delta = c * (-1j * n ** 2 - 1j * nbar * p.tau * n)
    return d_tau, d_delta


def dephasing_kerr_state(p, dim):
    """Fock matrix of a coherent probe after phase diffusion plus self-Kerr."""
    if dim < 1:
        raise InvalidInputError(f"dim must be >= 1, got {dim}")
    n = np.arange(dim)
    diff = n[:, None] - n[None, :]
    sq = (n ** 2)[:, None] - (n ** 2)[None, :]
    rho = _prefactor(p.alpha, dim) * np.exp(
        -p.nbar - 1j * p.delta * sq - p.sigma ** 2 / 2 * diff ** 2
    )
    return _hermitize(rho, "dephasing-Kerr state")


def dephasing_kerr_derivatives(p, dim):
    """``(d rho/d sigma, d rho/d delta)`` in closed form."""
    rho = dephasing_kerr_state(p, dim)
    n = np.arange(dim)
    diff = n[:, None] - n[None, :]
    sq = (n ** 2)[:, None] - (n ** 2)[None, :]
    return (
        _hermitize(-p.sigma * diff ** 2 * rho, "d/dsigma"),
        _hermitize(-1j * sq * rho, "d/ddelta"),
    )


def kerr_phase(delta, dim):
    """Diagonal of the Kerr unitary ``exp(-i delta (a^H a)^2)``."""
    n = np.arange(dim)
    return np.exp(-1j * delta * n ** 2)


def _hermitize(m, what):
    scale = np.abs(m).max()
    asym = np.abs(m - m.conj().T).max()
    if scale > 0 and asym > 1e-10 * scale:
        raise NumericalError(f"{what} not Hermitian (asymmetry {asym:.3e})", residual=asym)
    return (m + m.conj().T) / 2


@dataclass(frozen=True)
class StatisticalModel:
    """A channel state together with its two parameter derivatives."""

    params: object
    dim: int
    rho: np.ndarray = field(repr=False)
    d_rho: tuple = field(repr=False)

    @property
    def scenario(self):
        return "lossy" if isinstance(self.params, LossyKerrParams) else "dephasing"

    @property
    def param_names(self):
        return ("tau", "delta") if self.scenario == "lossy" else ("sigma", "delta")


def build_model(params, dim=None, epsilon=EPS_TRUNC, margin=TRUNC_MARGIN):
    """Assemble a :class:`StatisticalModel`; ``dim`` defaults to the truncation rule."""
    if dim is None:
        dim = model_dimension(abs(params.alpha) ** 2, epsilon, margin)
    if isinstance(params, LossyKerrParams):
        rho = lossy_kerr_state(params, dim)
        d_rho = lossy_kerr_derivatives(params, dim)
    elif isinstance(params, DephasingKerrParams):
        rho = dephasing_kerr_state(params, dim)
        d_rho = dephasing_kerr_derivatives(params, dim)
    else:
        raise InvalidInputError(f"unknown parameter type {type(params).__name__}")
    return StatisticalModel(params, dim, rho, d_rho)


def make_params(scenario, noise, delta, nbar=None, alpha=None):
    """Parameters for ``scenario`` in ``{'lossy', 'dephasing'}``; ``alpha = sqrt(nbar)`` by default."""
    if alpha is None:
        if nbar is None:
            raise InvalidInputError("either nbar or alpha is required")
        _check_param("nbar", nbar)
        alpha = math.sqrt(nbar)
    if scenario == "lossy":
        return LossyKerrParams(noise, delta, alpha)
    if scenario == "dephasing":
        return DephasingKerrParams(noise, delta, alpha)
    raise InvalidInputError(f"unknown scenario {scenario!r}")
