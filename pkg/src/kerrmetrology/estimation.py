"""Quantum figures of merit of a two-parameter statistical model.

Everything is computed in the eigenbasis of rho. Pairs of eigenvalues whose
sum is below ``EPS_EIG`` are dropped; those terms are numerical noise on the
(near-)kernel of rho.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, InvalidInputError, NumericalError
from .fock import hermitian_eig

EPS_EIG = 1e-12


@dataclass(frozen=True)
class QuantumInfoResult:
    qfim: np.ndarray
    uhlmann: np.ndarray
    quantumness: float
    scalar_bound: float
    eig_cutoff_used: float = EPS_EIG


class _Spectral:
    """Eigen-data of a model shared by qfim, sld and uhlmann."""

    def __init__(self, model, eps_eig=EPS_EIG):
        es = hermitian_eig(model.rho, density=True)
        self.eig = es
        v = es.eigenvectors
        self.vals = es.eigenvalues
        self.d = [v.conj().T @ dr @ v for dr in model.d_rho]
        s = self.vals[:, None] + self.vals[None, :]
        self.keep = s >= eps_eig
        self.denom = np.where(self.keep, s, 1.0)
        if np.any(self.denom[self.keep] < eps_eig):
            raise NumericalError("retained eigenvalue pair below cutoff")
        self.eps_eig = eps_eig


def _spectral(model, eps_eig, spectral):
    if spectral is None:
        return _Spectral(model, eps_eig)
    return spectral


def qfim(model, eps_eig=EPS_EIG, spectral=None):
    """Quantum Fisher information matrix from the spectral formula."""
    sp = _spectral(model, eps_eig, spectral)
    h = np.empty((2, 2))
    for mu in range(2):
        for nu in range(mu, 2):
            # <k|d_mu|j><j|d_nu|k> = d_mu[k, j] * d_nu[j, k]
            terms = sp.d[mu] * sp.d[nu].T / sp.denom
            val = 2 * terms[sp.keep].sum()
            scale = max(abs(val), 1.0)
            if abs(val.imag) > 1e-10 * scale:
                raise NumericalError(f"QFIM entry has imaginary part {val.imag:.3e}")
            h[mu, nu] = h[nu, mu] = val.real
    return h


def sld(model, which, eps_eig=EPS_EIG, spectral=None):
    """Symmetric logarithmic derivative for parameter index ``which`` (0 or 1)."""
    if which not in (0, 1):
        raise InvalidInputError(f"parameter index must be 0 or 1, got {which}")
    sp = _spectral(model, eps_eig, spectral)
    lk = np.where(sp.keep, 2 * sp.d[which] / sp.denom, 0.0)
    v = sp.eig.eigenvectors
    lmat = v @ lk @ v.conj().T
    return (lmat + lmat.conj().T) / 2


def uhlmann(model, eps_eig=EPS_EIG, spectral=None, check=True):
    """Uhlmann curvature, with the SLD commutator form as a fail-closed self-check."""
    sp = _spectral(model, eps_eig, spectral)
    w = np.where(sp.keep, sp.vals[:, None] / sp.denom ** 2, 0.0)
    u12 = 4 * (w * (sp.d[0] * sp.d[1].T).imag).sum()
    u = np.array([[0.0, u12], [-u12, 0.0]])
    if check:
        alt = uhlmann_commutator(model, eps_eig, sp)
        if abs(alt[0, 1] - u12) > 1e-8 * max(1.0, abs(u12)):
            raise NumericalError(
                f"Uhlmann formulas disagree: {u12:.12e} vs {alt[0, 1]:.12e}",
                residual=abs(alt[0, 1] - u12),
            )
    return u


def uhlmann_commutator(model, eps_eig=EPS_EIG, spectral=None):
    """``-(i/2) Tr(rho [L_mu, L_nu])`` evaluated in the Fock basis."""
    sp = _spectral(model, eps_eig, spectral)
    l0 = sld(model, 0, eps_eig, sp)
    l1 = sld(model, 1, eps_eig, sp)
    val = -0.5j * np.trace(model.rho @ (l0 @ l1 - l1 @ l0))
    return np.array([[0.0, val.real], [-val.real, 0.0]])


def qfi_pure(state, d_state):
    """QFIM of a pure model ``|psi(lambda)>`` from the state and its two derivatives.

    Uses the standard ``4 Re[<d_mu psi|d_nu psi> - <d_mu psi|psi><psi|d_nu psi>]``.
    """
    state = np.asarray(state, dtype=complex)
    norm = np.vdot(state, state).real
    if abs(norm - 1) > 1e-3:
        raise InvalidInputError(f"state norm {norm:.6f} deviates from 1 by more than 1e-3")
    d = [np.asarray(x, dtype=complex) for x in d_state]
    h = np.empty((2, 2))
    for mu in range(2):
        for nu in range(2):
            h[mu, nu] = 4 * (
                np.vdot(d[mu], d[nu]) - np.vdot(d[mu], state) * np.vdot(state, d[nu])
            ).real
    return (h + h.T) / 2


def qfim_expansion_lossy(p):
    """Small-(tau, delta) expansions of the two lossy-Kerr QFIs."""
    nbar = p.nbar
    h_tau0 = np.exp(-p.tau) * nbar
    h_delta0 = kerr_qfi(nbar)
    h_tau = h_tau0 * (1 + 4 * nbar ** 2 * p.delta ** 2)
    h_delta = h_delta0 - 4 * nbar * (1 + 10 * nbar + 8 * nbar ** 3) * p.tau
    return h_tau, h_delta


def loss_qfi(tau, nbar):
    """QFI of pure loss on a coherent probe, ``exp(-tau) nbar``."""
    return np.exp(-tau) * nbar


def kerr_qfi(nbar):
    """QFI of lossless self-Kerr on a coherent probe, ``4 Var(n^2)``."""
    return 4 * nbar * (1 + 6 * nbar + 4 * nbar ** 2)


def quantumness(h, u):
    """Two-parameter incompatibility ``sqrt(det U / det H)``, in [0, 1]."""
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    det_h = np.linalg.det(h)
    if det_h <= 0:
        raise DegenerateModelError(f"QFIM is singular (det = {det_h:.3e})")
    det_u = max(np.linalg.det(u), 0.0)
    r = np.sqrt(det_u / det_h)
    if r > 1 + 1e-6:
        raise NumericalError(f"quantumness {r:.8f} exceeds 1")
    return float(min(r, 1.0))


def scalar_bound(m):
    """Trace scalar bound ``1 / Tr[M^-1]`` of a 2x2 information matrix (one repetition)."""
    m = np.asarray(m, dtype=float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-300:
        raise DegenerateModelError("information matrix is singular")
    # Tr[M^-1] = (m00 + m11) / det for a 2x2 matrix
    return float(det / (m[0, 0] + m[1, 1]))


def quantum_info(model, eps_eig=EPS_EIG):
    """QFIM, Uhlmann curvature, quantumness and scalar bound in one pass."""
    sp = _Spectral(model, eps_eig)
    h = qfim(model, eps_eig, sp)
    u = uhlmann(model, eps_eig, sp)
    return QuantumInfoResult(h, u, quantumness(h, u), scalar_bound(h), eps_eig)


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(Tr |sqrt(rho) sqrt(sigma)|)^2``."""
    def _sqrt(m):
        es = hermitian_eig(m)
        w = np.sqrt(np.clip(es.eigenvalues, 0, None))
        return (es.eigenvectors * w) @ es.eigenvectors.conj().T

    s = np.linalg.svd(_sqrt(rho) @ _sqrt(sigma), compute_uv=False)
    return float(s.sum() ** 2)
