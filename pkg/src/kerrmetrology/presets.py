"""Figure-reproduction presets.

Axis ranges are fixed choices; each emitted table records its grid and
panel description in the metadata.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .sweep import SweepSpec, run_sweep

DEFAULT_POINTS = 41
FIG14_DELTA_RANGE = (0.0, 2.0)


@dataclass(frozen=True)
class Panel:
    name: str
    scenario: str
    noise: object
    delta: object
    nbar: object
    quantities: tuple
    note: str = ""


def _axis(lo, hi, points):
    return [float(x) for x in np.linspace(lo, hi, points)]


def _panels(fig, n, delta_range=FIG14_DELTA_RANGE):
    nbar = _axis(0.05, 4.0, n)
    if fig == "fig01":
        return [Panel("fig01", "lossy", _axis(0, 2, n), _axis(0, 1, n), [1.0], ("qfim",),
                      "H_tau (a) and H_delta (b) over (tau, delta) at alpha=1")]
    if fig == "fig02":
        return [
            Panel("fig02a", "lossy", [0.5], [0.0, 0.1, 0.2, 0.5, 1.0], nbar, ("qfim",),
                  "H_tau vs nbar at tau=0.5 for several delta"),
            Panel("fig02b", "lossy", [0.0, 0.1, 0.5, 1.0], [0.1], nbar, ("qfim",),
                  "H_delta vs nbar at delta=0.1 for several tau"),
        ]
    if fig == "fig03":
        return [
            Panel("fig03a", "lossy", [0.5], _axis(0, 2, n), nbar, ("qfim",),
                  "H_tau over (delta, nbar) at tau=0.5"),
            Panel("fig03b", "lossy", _axis(0.05, 3, n), _axis(0.01, 2, n), [1.0], ("qfim", "quantumness"),
                  "quantumness over (tau, delta) at nbar=1"),
        ]
    if fig in ("fig04", "fig05"):
        return [Panel(fig, "lossy", [0.5], [0.1], nbar,
                      ("qfim", "fim_homodyne", "fi_direct"),
                      "optimized homodyne FIs and phases at tau=0.5, delta=0.1")]
    if fig == "fig06":
        return [
            Panel("fig06a", "lossy", [0.5], [0.0, 0.1, 0.5], nbar, ("qfim", "fim_dh"),
                  "double-homodyne loss FI and ratio at tau=0.5"),
            Panel("fig06b", "lossy", [0.0, 0.1, 0.5, 1.0], [0.1], nbar, ("qfim", "fim_dh"),
                  "double-homodyne nonlinearity FI and ratio at delta=0.1"),
        ]
    if fig == "fig07":
        return [Panel("fig07", "lossy", [0.5], [0.1], nbar,
                      ("qfim", "fim_homodyne", "fim_dh", "scalar_bounds"),
                      "trace scalar bounds at tau=0.5, delta=0.1")]
    if fig in ("fig08", "fig09"):
        return [Panel(fig, "dephasing", _axis(0.01, 2, n), [0.1], [0.5, 1.0, 2.0, 4.0],
                      ("qfim", "uhlmann", "quantumness"),
                      "dephasing QFIs, Uhlmann curvature and quantumness vs sigma")]
    if fig in ("fig10", "fig11"):
        return [Panel(fig, "dephasing", [0.1], [0.1], nbar, ("qfim", "fim_homodyne"),
                      "optimized homodyne FIs and phases at sigma=0.1, delta=0.1")]
    if fig == "fig12":
        return [
            Panel("fig12a", "dephasing", [0.1], [0.0, 0.1, 0.5], nbar, ("qfim", "fim_dh"),
                  "double-homodyne dephasing FI at sigma=0.1"),
            Panel("fig12b", "dephasing", [0.1, 0.3, 0.5], [0.1], nbar, ("qfim", "fim_dh"),
                  "double-homodyne nonlinearity FI and ratio at delta=0.1"),
        ]
    if fig == "fig13":
        return [Panel("fig13", "dephasing", [0.1], [0.1], nbar,
                      ("qfim", "fim_homodyne:a,b", "fim_dh", "scalar_bounds"),
                      "trace scalar bounds at sigma=0.1, delta=0.1")]
    if fig == "fig14":
        return [
            Panel("fig14a", "lossy", [0.5], _axis(*delta_range, n), nbar, ("ng",),
                  "non-Gaussianity over (delta, nbar) at tau=0.5"),
            Panel("fig14b", "lossy", [0.5], _axis(*delta_range, n), [0.5, 1.0, 2.0], ("qfim", "ng"),
                  "H_tau vs non-Gaussianity, delta varied, tau=0.5"),
        ]
    raise InvalidInputError(f"unknown figure id {fig!r}")


FIGURES = tuple(f"fig{i:02d}" for i in range(1, 15))


def preset_panels(figure_id, points=DEFAULT_POINTS, delta_range=None):
    """Panels of a figure preset; ``delta_range`` overrides the fig14 delta axis."""
    figure_id = figure_id.lower()
    if figure_id not in FIGURES:
        raise InvalidInputError(f"unknown figure id {figure_id!r}; expected one of {', '.join(FIGURES)}")
    if int(points) < 2:
        raise InvalidInputError("points per axis must be >= 2")
    if delta_range is None:
        delta_range = FIG14_DELTA_RANGE
    lo, hi = map(float, delta_range)
    if not (0 <= lo < hi):
        raise InvalidInputError(f"delta range must satisfy 0 <= lo < hi, got {delta_range}")
    return _panels(figure_id, int(points), (lo, hi))


def reproduce(figure_id, out_dir=None, points=DEFAULT_POINTS, threads=None, delta_range=None):
    """Run every panel of a figure preset; returns ``{panel_name: SweepTable}``."""
    tables = {}
    for panel in preset_panels(figure_id, points, delta_range):
        spec = SweepSpec(panel.scenario, panel.noise, panel.delta, panel.nbar, list(panel.quantities),
                         threads=threads)
        table = run_sweep(spec)
        table.metadata.update({"figure": figure_id.lower(), "panel": panel.name, "description": panel.note,
                               "points_per_axis": int(points)})
        if out_dir is not None:
            table.to_csv(Path(out_dir) / f"{panel.name}.csv")
        tables[panel.name] = table
    return tables
