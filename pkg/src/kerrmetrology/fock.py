"""Truncated Fock-space substrate: coherent amplitudes, Hermite functions,
hermitian eigendecomposition and truncation selection.

Factorials only ever appear inside recurrences, so nothing here overflows for
the dimensions used in practice (d of a few hundred at most).
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidInputError, NumericalError, TruncationError

EPS_TRUNC = 1e-5
TRUNC_MARGIN = 5
EIG_FLOOR = -1e-10


def coherent_amplitudes(alpha, dim):
    """Fock amplitudes ``exp(-|a|^2/2) a^n / sqrt(n!)`` for ``n < dim``."""
    alpha = complex(alpha)
    if not (np.isfinite(alpha.real) and np.isfinite(alpha.imag)):
        raise InvalidInputError(f"alpha must be finite, got {alpha!r}")
    if dim < 1:
        raise InvalidInputError(f"dim must be >= 1, got {dim}")
    c = np.empty(dim, dtype=complex)
    c[0] = np.exp(-abs(alpha) ** 2 / 2)
    for n in range(dim - 1):
        c[n + 1] = c[n] * alpha / np.sqrt(n + 1)
    return c


def coherent_amplitudes_batch(zeta, dim):
    """Vectorized :func:`coherent_amplitudes` over an array of amplitudes.

    Returns an array of shape ``zeta.shape + (dim,)``.
    """
    zeta = np.asarray(zeta, dtype=complex)
    out = np.empty(zeta.shape + (dim,), dtype=complex)
    out[..., 0] = np.exp(-np.abs(zeta) ** 2 / 2)
    for n in range(dim - 1):
        out[..., n + 1] = out[..., n] * zeta / np.sqrt(n + 1)
    return out


def poisson_tail(nbar, dim):
    """P(N >= dim) for N ~ Poisson(nbar), summed from above to avoid cancellation."""
    if nbar == 0:
        return 0.0 if dim >= 1 else 1.0
    # pmf via log-gamma; sum the upper tail directly.
    upper = int(max(dim, nbar + 40 * math.sqrt(nbar) + 60))
    n = np.arange(dim, upper + 1)
    logp = -nbar + n * math.log(nbar) - np.array([math.lgamma(k + 1) for k in n])
    return float(np.exp(logp).sum())


def choose_truncation(nbar, epsilon=EPS_TRUNC):
    """Smallest ``d`` whose Poisson(nbar) tail beyond ``d - 1`` is below ``epsilon``."""
    if not (np.isfinite(nbar) and nbar >= 0):
        raise InvalidInputError(f"nbar must be finite and >= 0, got {nbar}")
    if not 0 < epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if nbar == 0:
        return 1
    # tail is decreasing in d: walk up from the mean, then back down if overshot
    d = max(1, int(nbar))
    while poisson_tail(nbar, d) >= epsilon:
        d += 1
    while d > 1 and poisson_tail(nbar, d - 1) < epsilon:
        d -= 1
    return d


def model_dimension(nbar, epsilon=EPS_TRUNC, margin=TRUNC_MARGIN):
    """Working dimension for a channel model: truncation plus safety margin."""
    return choose_truncation(nbar, epsilon) + margin


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in descending order and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(a, density=False):
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    The input is symmetrized as ``(A + A^H) / 2`` first. With ``density=True``
    eigenvalues below ``EIG_FLOOR`` raise :class:`TruncationError` and the rest
    are clamped to zero from below.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    a = (a + a.conj().T) / 2
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}", residual=np.inf) from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    scale = max(np.abs(a).max(), 1e-300)
    resid = np.abs((v * w) @ v.conj().T - a).max()
    if resid > 1e-10 * scale:
        raise NumericalError(f"eigendecomposition residual {resid:.3e}", residual=resid)
    if density:
        if w[-1] < EIG_FLOOR:
            raise TruncationError(
                f"density operator has eigenvalue {w[-1]:.3e} below {EIG_FLOOR}",
                residual=w[-1],
            )
        np.clip(w, 0.0, None, out=w)
    return EigenSystem(w, v)


def hermite_functions(x, dim):
    """Orthonormal Hermite functions ``psi_n(x)`` for ``n < dim``.

    ``x`` may be a scalar or an array; the result has shape ``x.shape + (dim,)``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (dim,))
    if dim == 0:
        return out
    out[..., 0] = np.pi ** -0.25 * np.exp(-x ** 2 / 2)
    if dim > 1:
        out[..., 1] = np.sqrt(2.0) * x * out[..., 0]
    for n in range(1, dim - 1):
        out[..., n + 1] = (
            np.sqrt(2.0 / (n + 1)) * x * out[..., n] - np.sqrt(n / (n + 1)) * out[..., n - 1]
        )
    return out


def annihilation(dim):
    """Truncated ladder operator ``a`` with ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def is_density_operator(rho, eps_trunc=EPS_TRUNC):
    rho = np.asarray(rho)
    scale = np.abs(rho).max()
    herm = np.abs(rho - rho.conj().T).max() <= 1e-12 * scale
    tr = np.trace(rho)
    return bool(herm and 1 - tr.real < eps_trunc and abs(tr.imag) < 1e-12)
