"""Acceptance checks with their tolerances pinned.

Each check returns a :class:`CheckResult`; ``run_all`` prints one PASS/FAIL
line per check. The oracles used here (fidelity finite differences, Monte
Carlo sampling, central finite differences) are never used by the
production code path.
"""

from dataclasses import dataclass
import math

import numpy as np

from .channels import build_model, make_params
from .estimation import (
    fidelity,
    kerr_qfi,
    loss_qfi,
    qfim,
    qfim_expansion_lossy,
    quantum_info,
    uhlmann,
    uhlmann_commutator,
)
from .measurements import (
    QuadratureGrid,
    _dh_basis,
    converged_homodyne_grid,
    fi_direct,
    fim_double_homodyne,
    fim_homodyne,
    fim_ratios,
    homodyne_pdf,
    optimize_phase,
)
from .resources import coherence_l1, non_gaussianity

SEED = 20240917


@dataclass
class CheckResult:
    id: str
    title: str
    passed: bool
    measured: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id:>4}  {self.title}: {self.measured}"


def _model(scenario, noise, delta, nbar, dim=None):
    return build_model(make_params(scenario, noise, delta, nbar), dim)


def _rel(a, b):
    return abs(a - b) / abs(b)


# --- 1-11 -----------------------------------------------------------------------

def check_loss_qfi():
    worst = 0.0
    for tau in (0.1, 0.5, 1.0, 2.0):
        for nbar in (0.5, 1.0, 2.0, 4.0):
            h = qfim(_model("lossy", tau, 0.0, nbar))
            worst = max(worst, _rel(h[0, 0], loss_qfi(tau, nbar)))
    return CheckResult("1", "loss QFI = exp(-tau) nbar (rel 1e-4)", worst <= 1e-4, f"max rel err {worst:.2e}")


def check_kerr_qfi():
    worst = 0.0
    for delta in (0.0, 0.1, 0.5):
        for nbar in (0.5, 1.0, 2.0):
            h = qfim(_model("lossy", 0.0, delta, nbar))
            worst = max(worst, _rel(h[1, 1], kerr_qfi(nbar)))
    return CheckResult("2", "Kerr QFI = 4n(1+6n+4n^2) at tau=0 (rel 1e-3)", worst <= 1e-3,
                       f"max rel err {worst:.2e}")


def check_expansions():
    m = _model("lossy", 0.01, 0.01, 1.0)
    h = qfim(m)
    e_tau, e_delta = qfim_expansion_lossy(m.params)
    r1, r2 = _rel(h[0, 0], e_tau), _rel(h[1, 1], e_delta)
    return CheckResult("3", "small-parameter expansions at tau=delta=0.01 (rel 2%)", max(r1, r2) <= 0.02,
                       f"H_tau {h[0, 0]:.6f} vs {e_tau:.6f} ({r1:.2%}); H_delta {h[1, 1]:.4f} vs {e_delta:.4f} ({r2:.2%})")


def check_enhancement():
    tau = 0.05
    deltas = np.linspace(0.0, 4.0, 81)
    ratios = [qfim(_model("lossy", tau, d, 1.0))[0, 0] / loss_qfi(tau, 1.0) for d in deltas]
    i = int(np.argmax(ratios))
    return CheckResult("4", "max_delta H_tau/H_tau^(0) at nbar=1, tau=0.05 (>= 10)", ratios[i] >= 10,
                       f"{ratios[i]:.2f} at delta={deltas[i]:.2f}")


def check_homodyne_optimal():
    worst = 0.0
    for tau, nbar in ((0.5, 1.0), (0.1, 2.0), (1.0, 0.5)):
        f = fim_homodyne(_model("lossy", tau, 0.0, nbar), 0.0)
        worst = max(worst, _rel(f[0, 0], loss_qfi(tau, nbar)))
    return CheckResult("5", "homodyne F_tau(theta=0) = H_tau^(0) at delta=0 (rel 1e-3)", worst <= 1e-3,
                       f"max rel err {worst:.2e}")


def check_dh_half():
    worst = 0.0
    ratio_err = 0.0
    for tau, nbar in ((0.5, 1.0), (0.1, 2.0), (1.0, 0.5)):
        m = _model("lossy", tau, 0.0, nbar)
        f = fim_double_homodyne(m)
        worst = max(worst, _rel(f[0, 0], 0.5 * loss_qfi(tau, nbar)))
        ratio_err = max(ratio_err, abs(fim_ratios(f, qfim(m))[0] - 0.5))
    ok = worst <= 1e-3 and ratio_err <= 5e-4
    return CheckResult("6", "double-homodyne F_tau = H_tau^(0)/2, R_dh(tau) = 0.5 (rel 1e-3)", ok,
                       f"max rel err {worst:.2e}, max |R_dh - 0.5| {ratio_err:.2e}")


def check_direct():
    worst = 0.0
    nonzero = 0.0
    for tau, nbar in ((0.5, 1.0), (1.0, 2.0)):
        for delta in (0.0, 0.1, 0.5):
            f = fi_direct(_model("lossy", tau, delta, nbar))
            worst = max(worst, abs(f[0, 0] - loss_qfi(tau, nbar)))
            nonzero = max(nonzero, abs(f[1, 1]), abs(f[0, 1]))
    ok = worst <= 1e-6 and nonzero == 0.0
    return CheckResult("7", "direct detection F_tau = exp(-tau) nbar (abs 1e-6), delta column 0", ok,
                       f"max abs err {worst:.2e}, max |delta column| {nonzero:.1e}")


def check_homodyne_bands_lossy():
    nbars = (0.25, 0.5, 1.0, 1.5, 2.0)
    rows = []
    for nbar in nbars:
        m = _model("lossy", 0.5, 0.1, nbar)
        h = qfim(m)
        grid = converged_homodyne_grid(m)
        fa = optimize_phase(m, "a", grid).fim
        fb = optimize_phase(m, "b", grid).fim
        rows.append((nbar, fa[0, 0] / h[0, 0], fb[1, 1] / h[1, 1]))
    ok = all(ra >= 0.9 for _, ra, _ in rows)
    worst = min(rows, key=lambda r: r[1])
    band = ", ".join(f"{n:g}:{rb:.3f}" for n, _, rb in rows)
    return CheckResult("8", "F^(a)_h,tau >= 0.9 H_tau for nbar <= 2 at (tau,delta)=(0.5,0.1)", ok,
                       f"min ratio {worst[1]:.4f} at nbar={worst[0]:g}; recorded F^(b)_h,delta/H_delta {band}")


def check_quantumness_saturation():
    r = quantum_info(_model("lossy", 3.0, 0.1, 1.0)).quantumness
    return CheckResult("9", "quantumness R = 0.8 +- 0.05 at nbar=1, tau=3, delta=0.1", abs(r - 0.8) <= 0.05,
                       f"R = {r:.4f}")


def check_dephasing_structure():
    for nbar in (0.5, 1.0, 2.0):
        for sigma in (0.1, 0.5, 1.0):
            infos = [quantum_info(_model("dephasing", sigma, d, nbar)) for d in (0.0, 0.1, 0.5)]
            h0 = infos[0].qfim
            scale = max(h0[0, 0], h0[1, 1])
            for info in infos:
                if abs(info.qfim[0, 1]) > 1e-8 * scale:
                    return CheckResult("10", "dephasing QFIM diagonal, H/U/R independent of delta", False,
                                       f"H_12 = {info.qfim[0, 1]:.2e} at sigma={sigma}, nbar={nbar}")
                dh = np.abs(info.qfim - h0).max() / scale
                du = abs(info.uhlmann[0, 1] - infos[0].uhlmann[0, 1]) / max(abs(infos[0].uhlmann[0, 1]), 1)
                dr = abs(info.quantumness - infos[0].quantumness)
                if max(dh, du, dr) > 1e-8:
                    return CheckResult("10", "dephasing QFIM diagonal, H/U/R independent of delta", False,
                                       f"delta dependence {max(dh, du, dr):.2e} at sigma={sigma}, nbar={nbar}")
    return CheckResult("10", "dephasing QFIM diagonal, H/U/R independent of delta (1e-8)", True,
                       "all sampled points within tolerance")


def check_dephasing_suboptimal():
    nbars = (0.25, 0.5, 1.0, 1.5, 2.0, 2.25, 3.0, 4.0)
    worst_a = worst_dh = 0.0
    min_b = math.inf
    for nbar in nbars:
        m = _model("dephasing", 0.1, 0.1, nbar)
        h = qfim(m)
        grid = converged_homodyne_grid(m)
        worst_a = max(worst_a, optimize_phase(m, "a", grid).fim[0, 0] / h[0, 0])
        worst_dh = max(worst_dh, fim_double_homodyne(m)[0, 0] / h[0, 0])
        if nbar <= 2.25:
            min_b = min(min_b, optimize_phase(m, "b", grid).fim[1, 1] / h[1, 1])
    ok = worst_a < 0.25 and worst_dh < 0.2 and min_b >= 0.8
    return CheckResult("11", "dephasing: F^(a)_h,sigma < 0.25 H, F_dh,sigma < 0.2 H, F^(b)_h,delta >= 0.8 H", ok,
                       f"max F^(a)/H {worst_a:.4f}, max F_dh/H {worst_dh:.4f}, min F^(b)/H (nbar<=2.25) {min_b:.4f}")


# --- 12: property suites ------------------------------------------------------------

SPOT_POINTS = (
    ("lossy", 0.5, 0.1, 1.0),
    ("lossy", 0.2, 0.5, 2.0),
    ("lossy", 1.0, 0.0, 0.5),
    ("dephasing", 0.1, 0.1, 1.0),
    ("dephasing", 0.5, 0.3, 2.0),
)


def check_data_processing():
    worst = math.inf
    for pt in SPOT_POINTS:
        m = _model(*pt)
        h = qfim(m)
        grid = converged_homodyne_grid(m)
        fims = [fim_double_homodyne(m), fi_direct(m)]
        fims += [optimize_phase(m, c, grid).fim for c in "abc"]
        fims += [fim_homodyne(m, th, grid, refine=False) for th in np.linspace(0, np.pi, 7, endpoint=False)]
        tol = 1e-8 * max(1.0, np.abs(h).max())
        for f in fims:
            worst = min(worst, np.linalg.eigvalsh(h - f).min() / tol)
    return CheckResult("12a", "data processing: H - F PSD for every POVM (>= -1e-8)", worst >= -1,
                       f"min eigenvalue of H - F = {worst:.3g} x tolerance")


def check_pdf_normalization():
    worst = 0.0
    for pt in SPOT_POINTS:
        m = _model(*pt)
        grid = converged_homodyne_grid(m)
        for th in (0.0, 0.7, 1.9):
            p = homodyne_pdf(m.rho, th, grid.nodes)
            worst = max(worst, abs(np.dot(grid.weights, p) - 1))
        v, ww = _dh_basis(QuadratureGrid.for_nbar(m.params.nbar), m.dim)
        p = np.einsum("in,nm,im->i", v.conj(), m.rho, v).real / (2 * np.pi)
        worst = max(worst, abs(np.dot(ww, p) - 1))
    return CheckResult("12b", "homodyne and double-homodyne PDFs normalized (1e-6)", worst <= 1e-6,
                       f"max |int p - 1| {worst:.2e}")


def _fd_derivatives(model):
    p = model.params
    out = []
    for mu in range(2):
        lam = p.values[mu]
        h = 1e-5 * max(1.0, abs(lam))
        up = list(p.values)
        dn = list(p.values)
        up[mu] += h
        dn[mu] -= h
        r_up = build_model(p.replace(*up), model.dim).rho
        r_dn = build_model(p.replace(*dn), model.dim).rho
        out.append((r_up - r_dn) / (2 * h))
    return out


def check_fd_derivatives():
    worst = 0.0
    for pt in [q for q in SPOT_POINTS if min(q[1:]) > 0] + [("lossy", 2.0, 1.0, 4.0)]:
        m = _model(*pt)
        for analytic, fd in zip(m.d_rho, _fd_derivatives(m)):
            scale = np.abs(analytic).max()
            if scale > 0:
                worst = max(worst, np.abs(analytic - fd).max() / scale)
    return CheckResult("12c", "analytic derivatives vs central finite differences (rel 1e-6)", worst <= 1e-6,
                       f"max rel err {worst:.2e}")


def fidelity_qfi(model, mu, h=1e-3):
    """Diagonal QFI from the Bures expansion ``8(1 - sqrt F)/h^2`` with a symmetric step."""
    p = model.params
    up = list(p.values)
    dn = list(p.values)
    up[mu] += h / 2
    dn[mu] -= h / 2
    f = fidelity(build_model(p.replace(*up), model.dim).rho, build_model(p.replace(*dn), model.dim).rho)
    return 8 * (1 - math.sqrt(min(f, 1.0))) / h ** 2


def random_interior_points(scenario, n=10, seed=SEED):
    rng = np.random.default_rng(seed)
    noise_hi = 2.0 if scenario == "lossy" else 1.5
    return [
        (scenario, float(rng.uniform(0.1, noise_hi)), float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.25, 3.0)))
        for _ in range(n)
    ]


def check_fidelity_oracle():
    worst = 0.0
    for scenario in ("lossy", "dephasing"):
        for pt in random_interior_points(scenario):
            m = _model(*pt)
            h = qfim(m)
            for mu in range(2):
                worst = max(worst, _rel(fidelity_qfi(m, mu), h[mu, mu]))
    return CheckResult("12d", "fidelity-oracle QFI on 10 random interior points per scenario (rel 1%)",
                       worst <= 0.01, f"max rel err {worst:.2e}")


def monte_carlo_fim(model, theta, n_samples=1_000_000, seed=SEED, chunk=200_000):
    """Empirical homodyne FIM and its standard errors from inverse-CDF samples."""
    rng = np.random.default_rng(seed)
    grid = QuadratureGrid.for_nbar(model.params.nbar)
    x = np.linspace(-grid.half_width, grid.half_width, 40001)
    p = homodyne_pdf(model.rho, theta, x)
    cdf = np.concatenate([[0.0], np.cumsum((p[1:] + p[:-1]) / 2 * np.diff(x))])
    cdf /= cdf[-1]
    acc = np.zeros((2, 2))
    acc2 = np.zeros((2, 2))
    done = 0
    from .measurements import _phased_hermite, _quadratic_form

    while done < n_samples:
        k = min(chunk, n_samples - done)
        xs = np.interp(rng.uniform(size=k), cdf, x)
        b = _phased_hermite(xs, theta, model.dim)
        ps = _quadratic_form(b, model.rho)
        s = np.array([_quadratic_form(b, dr) / ps for dr in model.d_rho])
        prod = s[:, None, :] * s[None, :, :]
        acc += prod.sum(axis=2)
        acc2 += (prod ** 2).sum(axis=2)
        done += k
    mean = acc / n_samples
    se = np.sqrt(np.maximum(acc2 / n_samples - mean ** 2, 0) / n_samples)
    return mean, se


def check_monte_carlo():
    worst = 0.0
    for pt, theta in ((("lossy", 0.5, 0.1, 1.0), 0.4), (("lossy", 0.3, 0.3, 0.5), 1.2),
                      (("dephasing", 0.3, 0.1, 1.0), 0.8)):
        m = _model(*pt)
        f = fim_homodyne(m, theta)
        emp, se = monte_carlo_fim(m, theta)
        worst = max(worst, (np.abs(emp - f) / se).max())
    return CheckResult("12e", "Monte-Carlo homodyne FIM within 3 standard errors on 3 spot points", worst <= 3,
                       f"max deviation {worst:.2f} SE")


def _outputs(model, eps_eig=1e-12):
    info = quantum_info(model, eps_eig)
    return info.qfim, info.uhlmann[0, 1], info.quantumness


def _stability_points():
    pts = list(SPOT_POINTS)
    pts += [("lossy", 0.05, 0.05, 1.0), ("lossy", 2.0, 1.0, 4.0), ("dephasing", 1.5, 0.5, 4.0)]
    return pts


def _output_drift(a, b):
    ha, ua, ra = a
    hb, ub, rb = b
    return max(np.abs(ha - hb).max() / np.abs(ha).max(), abs(ua - ub) / abs(ua), abs(ra - rb) / ra)


def check_truncation_stability():
    worst = 0.0
    for pt in _stability_points():
        m = _model(*pt)
        m5 = _model(*pt, dim=m.dim + 5)
        worst = max(worst, _output_drift(_outputs(m), _outputs(m5)))
    return CheckResult("12f", "truncation stability: d -> d+5 changes H, U, R < 1e-5 rel", worst < 1e-5,
                       f"max rel change {worst:.2e}")


def check_cutoff_stability():
    worst = 0.0
    for pt in _stability_points():
        m = _model(*pt)
        worst = max(worst, _output_drift(_outputs(m, 1e-12), _outputs(m, 1e-13)))
    return CheckResult("12g", "eigenvalue cutoff 1e-12 -> 1e-13 changes H, U, R < 1e-5 rel", worst < 1e-5,
                       f"max rel change {worst:.2e}")


def check_grid_stability():
    worst = 0.0
    for pt in SPOT_POINTS:
        m = _model(*pt)
        grid = converged_homodyne_grid(m)
        for th in (0.0, 1.1):
            f1 = fim_homodyne(m, th, grid, refine=False)
            f2 = fim_homodyne(m, th, grid.refined(), refine=False)
            worst = max(worst, np.abs(f1 - f2).max() / np.abs(f2).max())
        g = QuadratureGrid.for_nbar(m.params.nbar)
        d1 = fim_double_homodyne(m, g, refine=False)
        d2 = fim_double_homodyne(m, g.refined(), refine=False)
        worst = max(worst, np.abs(d1 - d2).max() / np.abs(d2).max())
    return CheckResult("12h", "grid stability: doubling nodes changes FIMs < 1e-6 rel", worst < 1e-6,
                       f"max rel change {worst:.2e}")


def check_uhlmann_dual():
    worst = 0.0
    zero_diag = True
    for pt in _stability_points() + [("lossy", 0.005, 0.005, 1.0)]:
        m = _model(*pt)
        u = uhlmann(m, check=False)
        alt = uhlmann_commutator(m)
        worst = max(worst, abs(u[0, 1] - alt[0, 1]) / max(1.0, abs(u[0, 1])))
        zero_diag &= u[0, 0] == 0.0 and u[1, 1] == 0.0
    ok = worst <= 1e-8 and zero_diag
    return CheckResult("12i", "Uhlmann spectral vs commutator form (1e-8); diagonal exactly 0", ok,
                       f"max diff {worst:.2e}, zero diagonal: {zero_diag}")


def check_non_gaussianity():
    gauss = max(abs(non_gaussianity(_model("lossy", tau, 0.0, nbar).rho))
                for tau in (0.0, 0.5, 2.0) for nbar in (0.5, 1.0, 3.0))
    lowest = min(non_gaussianity(_model(*pt).rho) for pt in _stability_points())
    ok = gauss <= 1e-6 and lowest >= -1e-8
    return CheckResult("12j", "nG = 0 on Gaussian states (1e-6), nG >= 0 elsewhere", ok,
                       f"max |nG| Gaussian {gauss:.2e}, min nG {lowest:.3e}")


def check_coherence_invariance():
    worst = 0.0
    for sigma in (0.1, 0.5, 1.0):
        for nbar in (0.5, 2.0):
            c0 = coherence_l1(_model("dephasing", sigma, 0.0, nbar).rho)
            for delta in (0.1, 0.5, 2.0):
                worst = max(worst, abs(coherence_l1(_model("dephasing", sigma, delta, nbar).rho) - c0))
    return CheckResult("12k", "dephasing l1 coherence invariant under Kerr phase (1e-12)", worst <= 1e-12,
                       f"max change {worst:.2e}")


# --- 13: curve shapes ----------------------------------------------------------------

def check_htau_interior_max():
    # first local maximum in delta, followed by a decrease; whether it is also
    # the global maximum on the grid is reported, not asserted
    deltas = np.linspace(0.0, 4.0, 81)
    found = []
    for nbar in (0.5, 1.0, 2.0):
        vals = np.array([qfim(_model("lossy", 0.5, d, nbar))[0, 0] for d in deltas])
        peaks = [i for i in range(1, len(vals) - 1) if vals[i - 1] < vals[i] >= vals[i + 1]]
        if peaks:
            i = peaks[0]
            found.append((nbar, deltas[i], True, vals[i] >= vals.max() - 1e-12))
        else:
            found.append((nbar, float("nan"), False, False))
    ok = all(f[2] for f in found)
    return CheckResult("13a", "H_tau has an interior maximum in delta at tau=0.5", ok,
                       ", ".join(f"nbar={n:g}: delta_max={d:.2f}{' (global)' if g else ' (local)'}"
                                 for n, d, _, g in found))


def check_hdelta_decreasing():
    taus = np.linspace(0.0, 3.0, 31)
    ok = True
    for delta in (0.1, 0.5, 1.0):
        vals = np.array([qfim(_model("lossy", t, delta, 1.0))[1, 1] for t in taus])
        ok &= bool(np.all(np.diff(vals) < 0))
    return CheckResult("13b", "H_delta strictly decreasing in tau (nbar=1)", ok, f"checked {len(taus)} taus x 3 deltas")


def check_r_sigma_nonmonotone():
    sigmas = np.linspace(0.05, 3.0, 60)
    found = []
    for nbar in (0.5, 1.0, 2.0):
        r = [quantum_info(_model("dephasing", s, 0.1, nbar)).quantumness for s in sigmas]
        i = int(np.argmax(r))
        found.append((nbar, sigmas[i], r[i], r[-1], 0 < i < len(sigmas) - 1 and r[-1] < r[i]))
    ok = all(f[4] for f in found)
    return CheckResult("13c", "dephasing R(sigma) non-monotone with an interior maximum", ok,
                       ", ".join(f"nbar={n:g}: max {rm:.3f} at sigma={s:.2f}, R(3)={re:.3f}" for n, s, rm, re, _ in found))


def _circ_dist(theta, target):
    d = (theta - target) % math.pi
    return min(d, math.pi - d)


def check_theta_b():
    m = _model("lossy", 0.5, 0.1, 0.05)
    low = optimize_phase(m, "b").theta_opt
    low_ok = _circ_dist(low, math.pi / 2) < 0.05 * math.pi
    nbars = np.arange(3.0, 6.01, 0.1)
    dists = []
    for nbar in nbars:
        th = optimize_phase(_model("lossy", 0.5, 0.1, nbar), "b").theta_opt
        dists.append(_circ_dist(th, 0.0))
    i = int(np.argmin(dists))
    hi_ok = dists[i] < 0.02 * math.pi
    return CheckResult("13d", "theta*^(b) ~ pi/2 at nbar << 1, reaches the q quadrature at a threshold", low_ok and hi_ok,
                       f"theta*(nbar=0.05) = {low / math.pi:.3f} pi; closest to q at nbar0 ~ {nbars[i]:.1f} "
                       f"(distance {dists[i] / math.pi:.4f} pi)")


CHECKS = {
    "1": check_loss_qfi,
    "2": check_kerr_qfi,
    "3": check_expansions,
    "4": check_enhancement,
    "5": check_homodyne_optimal,
    "6": check_dh_half,
    "7": check_direct,
    "8": check_homodyne_bands_lossy,
    "9": check_quantumness_saturation,
    "10": check_dephasing_structure,
    "11": check_dephasing_suboptimal,
    "12a": check_data_processing,
    "12b": check_pdf_normalization,
    "12c": check_fd_derivatives,
    "12d": check_fidelity_oracle,
    "12e": check_monte_carlo,
    "12f": check_truncation_stability,
    "12g": check_cutoff_stability,
    "12h": check_grid_stability,
    "12i": check_uhlmann_dual,
    "12j": check_non_gaussianity,
    "12k": check_coherence_invariance,
    "13a": check_htau_interior_max,
    "13b": check_hdelta_decreasing,
    "13c": check_r_sigma_nonmonotone,
    "13d": check_theta_b,
}


def run_all(ids=None, echo=print):
    results = []
    for cid, fn in CHECKS.items():
        if ids and cid not in ids:
            continue
        res = fn()
        if echo:
            echo(res.line())
        results.append(res)
    return results
