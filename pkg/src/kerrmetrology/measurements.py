"""Classical Fisher information of homodyne, double-homodyne and direct detection.

Quadratures follow ``x = (a + a^H)/sqrt(2)`` (shot-noise variance 1/2), so the
homodyne density is ``sum_nm rho_nm psi_n(x) psi_m(x) exp(i(n-m) theta)`` with
orthonormal Hermite functions ``psi_n``. Outcome densities are linear in rho,
so derivative densities come from the same formulas applied to ``d rho``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateModelError, InvalidInputError, QuadratureError, TruncationError
from .estimation import scalar_bound
from .fock import coherent_amplitudes, coherent_amplitudes_batch, hermite_functions

BASE_NODES = 257
MAX_REFINEMENTS = 4
GRID_RTOL = 1e-6
EPS_P = 1e-14
PDF_FLOOR = -1e-10
N_COARSE_PHASES = 64
PHASE_TOL = 1e-6
CRITERIA = ("a", "b", "c")


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Legendre rule on ``[-half_width, half_width]``."""

    half_width: float
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, half_width, n_nodes=BASE_NODES):
        x, w = np.polynomial.legendre.leggauss(n_nodes)
        return cls(float(half_width), half_width * x, half_width * w)

    @classmethod
    def for_nbar(cls, nbar, n_nodes=BASE_NODES):
        return cls.build(default_half_width(nbar), n_nodes)

    def refined(self):
        return QuadratureGrid.build(self.half_width, 2 * len(self.nodes))

    def __len__(self):
        return len(self.nodes)


def default_half_width(nbar):
    return 5 + 3 * math.sqrt(2 * nbar + 1)


@dataclass(frozen=True)
class MeasurementFIM:
    povm: str
    fim: np.ndarray
    scalar_bound: float
    theta_opt: float = None
    criterion: str = None
    degenerate: bool = False


# --- outcome densities -------------------------------------------------------

def _phased_hermite(x, theta, dim):
    psi = hermite_functions(x, dim)
    return psi * np.exp(1j * np.arange(dim) * theta)


def _quadratic_form(b, mat):
    """``Re(b_i^T M conj(b_i))`` row by row."""
    return np.einsum("in,nm,im->i", b, mat, b.conj()).real


def _check_pdf(p, what):
    if p.size and p.min() < PDF_FLOOR:
        raise TruncationError(f"{what} density reaches {p.min():.3e}", residual=p.min())
    return np.clip(p, 0.0, None)


def homodyne_pdf(rho, theta, x):
    """Homodyne density of the quadrature at phase ``theta`` at point(s) ``x``."""
    rho = np.asarray(rho)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    b = _phased_hermite(x_arr, theta, rho.shape[0])
    p = _check_pdf(_quadratic_form(b, rho), "homodyne")
    return float(p[0]) if np.ndim(x) == 0 else p


def dh_pdf(rho, x, y):
    """Double-homodyne density ``<zeta|rho|zeta>/(2 pi)``, ``zeta = (x + i y)/sqrt(2)``."""
    rho = np.asarray(rho)
    zeta = (np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)) / math.sqrt(2)
    scalar = zeta.ndim == 0
    v = coherent_amplitudes_batch(np.atleast_1d(zeta).ravel(), rho.shape[0])
    # <zeta|rho|zeta> = sum conj(v_n) rho_nm v_m
    p = np.einsum("in,nm,im->i", v.conj(), rho, v).real / (2 * math.pi)
    p = _check_pdf(p, "double-homodyne")
    return float(p[0]) if scalar else p.reshape(np.atleast_1d(zeta).shape)


# --- Fisher information from sampled densities ----------------------------------

def _fim_from_samples(w, p, dps):
    keep = p > EPS_P * p.max()
    wk = w[keep] / p[keep]
    f = np.empty((2, 2))
    for mu in range(2):
        for nu in range(mu, 2):
            f[mu, nu] = f[nu, mu] = np.sum(wk * dps[mu][keep] * dps[nu][keep])
    return f


def _homodyne_fim_on_grid(model, theta, grid):
    b = _phased_hermite(grid.nodes, theta, model.dim)
    p = _check_pdf(_quadratic_form(b, model.rho), "homodyne")
    dps = [_quadratic_form(b, dr) for dr in model.d_rho]
    return _fim_from_samples(grid.weights, p, dps)


def _dh_basis(grid, dim):
    xx, yy = np.meshgrid(grid.nodes, grid.nodes, indexing="ij")
    ww = np.outer(grid.weights, grid.weights).ravel()
    v = coherent_amplitudes_batch(((xx + 1j * yy) / math.sqrt(2)).ravel(), dim)
    return v, ww


def _dh_fim_on_grid(model, grid):
    v, ww = _dh_basis(grid, model.dim)
    vc = v.conj()

    def form(mat):
        return np.einsum("in,nm,im->i", vc, mat, v).real / (2 * math.pi)

    p = _check_pdf(form(model.rho), "double-homodyne")
    return _fim_from_samples(ww, p, [form(dr) for dr in model.d_rho])


def _converge(evaluate, grid, rtol=GRID_RTOL, max_refinements=MAX_REFINEMENTS):
    """Refine ``grid`` until two successive FIMs agree; returns (fim, grid)."""
    prev = evaluate(grid)
    for _ in range(max_refinements):
        finer = grid.refined()
        cur = evaluate(finer)
        scale = max(np.abs(cur).max(), 1e-300)
        if np.abs(cur - prev).max() <= rtol * scale:
            return cur, grid
        prev, grid = cur, finer
    raise QuadratureError(
        f"grid not converged after {max_refinements} refinements",
        residual=float(np.abs(cur - prev).max() / scale),
    )


def fim_homodyne(model, theta, grid=None, refine=True):
    """Homodyne FIM at phase ``theta``; the grid is refined until converged unless ``refine=False``."""
    if grid is None:
        grid = QuadratureGrid.for_nbar(model.params.nbar)
    if not refine:
        return _homodyne_fim_on_grid(model, theta, grid)
    f, _ = _converge(lambda g: _homodyne_fim_on_grid(model, theta, g), grid)
    return f


def converged_homodyne_grid(model, thetas=(0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)):
    """A grid on which the homodyne FIM is converged for every probe phase in ``thetas``."""
    grid = QuadratureGrid.for_nbar(model.params.nbar)
    for th in thetas:
        _, g = _converge(lambda g: _homodyne_fim_on_grid(model, th, g), grid)
        if len(g) > len(grid):
            grid = g
    return grid


def fim_double_homodyne(model, grid=None, refine=True):
    """Double-homodyne FIM on a tensor-product grid."""
    if grid is None:
        grid = QuadratureGrid.for_nbar(model.params.nbar)
    if not refine:
        return _dh_fim_on_grid(model, grid)
    f, _ = _converge(lambda g: _dh_fim_on_grid(model, g), grid, max_refinements=2)
    return f


def fi_direct(model):
    """Photon-counting FIM from the Fock diagonal of rho."""
    p = np.diag(model.rho).real.copy()
    dps = [np.diag(dr).real for dr in model.d_rho]
    if p.max() <= 0:
        raise DegenerateModelError("empty photon-number distribution")
    return _fim_from_samples(np.ones_like(p), p, dps)


# --- phase optimisation ---------------------------------------------------------

def _objective(f, criterion):
    if criterion == "a":
        return f[0, 0]
    if criterion == "b":
        return f[1, 1]
    det = f[0, 0] * f[1, 1] - f[0, 1] ** 2
    tr = f[0, 0] + f[1, 1]
    return det / tr if tr > 0 else 0.0


def _golden_max(fun, lo, hi, tol=PHASE_TOL):
    invphi = (math.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = fun(d)
    return (lo + hi) / 2


def optimize_phase(model, criterion, grid=None, n_coarse=N_COARSE_PHASES):
    """Homodyne phase in ``[0, pi)`` maximizing criterion ``a`` (noise FI),
    ``b`` (nonlinearity FI) or ``c`` (``1/Tr F^-1``).

    A coarse scan of ``n_coarse`` phases is refined by golden-section search
    around the best coarse phase. A flat objective yields ``theta = 0`` with
    ``degenerate=True``; ties resolve to the smallest phase.
    """
    if criterion not in CRITERIA:
        raise InvalidInputError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    if grid is None:
        grid = converged_homodyne_grid(model)
    step = math.pi / n_coarse
    thetas = step * np.arange(n_coarse)
    cache = {}

    def fim_at(th):
        th = th % math.pi
        if th not in cache:
            cache[th] = _homodyne_fim_on_grid(model, th, grid)
        return cache[th]

    vals = np.array([_objective(fim_at(th), criterion) for th in thetas])
    if vals.max() - vals.min() < 1e-12:
        f = fim_at(0.0)
        return MeasurementFIM("homodyne", f, _safe_bound(f), 0.0, criterion, degenerate=True)
    i = int(np.argmax(vals))
    th = _golden_max(lambda t: _objective(fim_at(t), criterion), thetas[i] - step, thetas[i] + step)
    th = th % math.pi
    # never return worse than the best coarse phase
    if _objective(fim_at(th), criterion) < vals[i]:
        th = thetas[i]
    f = fim_at(th)
    return MeasurementFIM("homodyne", f, _safe_bound(f), float(th), criterion)


def _safe_bound(f):
    try:
        return scalar_bound(f)
    except DegenerateModelError:
        return 0.0


def fim_ratios(f, h):
    """Diagonal ratios ``(F_11/H_11, F_22/H_22)``."""
    f = np.asarray(f)
    h = np.asarray(h)
    if h[0, 0] <= 0 or h[1, 1] <= 0:
        raise DegenerateModelError("QFIM has a vanishing diagonal entry")
    return float(f[0, 0] / h[0, 0]), float(f[1, 1] / h[1, 1])


def measurement_fim(model, povm, criterion=None):
    """Convenience wrapper returning a :class:`MeasurementFIM` for ``povm``."""
    if povm == "homodyne":
        return optimize_phase(model, criterion or "c")
    if povm == "double_homodyne":
        f = fim_double_homodyne(model)
    elif povm == "direct":
        f = fi_direct(model)
    else:
        raise InvalidInputError(f"unknown POVM {povm!r}")
    return MeasurementFIM(povm, f, _safe_bound(f))
