"""Resource monotones: von Neumann entropy, non-Gaussianity and l1 coherence."""

from dataclasses import dataclass

import numpy as np

from .errors import TruncationError
from .fock import hermitian_eig

ENTROPY_CUTOFF = 1e-15


@dataclass(frozen=True)
class GaussianReference:
    """First and second moments of the moment-matched Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray
    symplectic_eigenvalue: float


def von_neumann_entropy(rho):
    """``-Tr rho ln rho`` (natural log)."""
    w = hermitian_eig(rho, density=True).eigenvalues
    w = w[w >= ENTROPY_CUTOFF]
    return float(max(-(w * np.log(w)).sum(), 0.0))


def _ladder_moments(rho):
    """``<a>``, ``<a^2>``, ``<a^H a>`` read off the Fock matrix elements.

    These only involve couplings inside the truncated space, so no ladder
    matrix edge effects enter.
    """
    rho = np.asarray(rho)
    d = rho.shape[0]
    n = np.arange(d)
    # Tr(rho a) = sum_n sqrt(n) rho_{n, n-1}
    a1 = np.sum(np.sqrt(n[1:]) * np.diag(rho, -1))
    a2 = np.sum(np.sqrt(n[2:] * n[1:-1]) * np.diag(rho, -2)) if d > 2 else 0.0
    num = np.sum(n * np.diag(rho).real)
    return complex(a1), complex(a2), float(num)


def gaussian_reference(rho):
    """Mean vector and covariance of ``q = (a + a^H)/sqrt 2``, ``p = i(a^H - a)/sqrt 2``."""
    a1, a2, num = _ladder_moments(rho)
    mean = np.sqrt(2) * np.array([a1.real, a1.imag])
    qq = a2.real + num + 0.5 - mean[0] ** 2
    pp = -a2.real + num + 0.5 - mean[1] ** 2
    qp = a2.imag - mean[0] * mean[1]
    cov = np.array([[qq, qp], [qp, pp]])
    det = np.linalg.det(cov)
    nu = float(np.sqrt(max(det, 0.0)))
    if nu < 0.5 - 1e-6:
        raise TruncationError(f"unphysical covariance: symplectic eigenvalue {nu:.8f} < 1/2", residual=nu)
    return GaussianReference(mean, cov, nu)


def gaussian_entropy(nu):
    """Entropy of a single-mode Gaussian state with symplectic eigenvalue ``nu``."""
    if nu <= 0.5:
        return 0.0
    hi, lo = nu + 0.5, nu - 0.5
    return float(hi * np.log(hi) - lo * np.log(lo))


def non_gaussianity(rho):
    """Entropic non-Gaussianity ``S(rho_G) - S(rho)``."""
    ref = gaussian_reference(rho)
    return gaussian_entropy(ref.symplectic_eigenvalue) - von_neumann_entropy(rho)


def coherence_l1(rho):
    """Sum of absolute off-diagonal Fock matrix elements."""
    a = np.abs(np.asarray(rho))
    return float(a.sum() - np.trace(a))
