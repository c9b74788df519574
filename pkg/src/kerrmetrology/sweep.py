"""Parameter sweeps over (noise, delta, nbar) grids and CSV emission."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import csv
import itertools
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .channels import build_model, make_params
from .errors import InvalidInputError, KerrMetrologyError, NumericalError
from .estimation import EPS_EIG, qfim, quantum_info, scalar_bound
from .fock import EPS_TRUNC
from .measurements import (
    converged_homodyne_grid,
    fi_direct,
    fim_double_homodyne,
    fim_ratios,
    optimize_phase,
)
from .resources import coherence_l1, non_gaussianity, von_neumann_entropy

SCENARIOS = ("lossy", "dephasing")
BASE_QUANTITIES = (
    "qfim",
    "uhlmann",
    "quantumness",
    "fim_homodyne",
    "fim_dh",
    "fi_direct",
    "scalar_bounds",
    "ng",
    "coherence",
    "entropy",
)
KEY_COLUMNS = ("scenario", "noise", "delta", "nbar")


def normalize_quantities(quantities):
    """Canonical quantity names; ``fim_homodyne`` expands to criteria a, b, c.

    ``fim_homodyne:<criterion>`` selects one criterion.
    """
    if isinstance(quantities, str):
        quantities = [quantities]
    out = []
    for q in quantities:
        base, _, crit = q.partition(":")
        if base not in BASE_QUANTITIES:
            raise InvalidInputError(f"unknown quantity {q!r}")
        if base == "fim_homodyne":
            crits = crit.split(",") if crit else ["a", "b", "c"]
            for c in crits:
                if c not in ("a", "b", "c"):
                    raise InvalidInputError(f"unknown homodyne criterion {c!r}")
                name = f"fim_homodyne:{c}"
                if name not in out:
                    out.append(name)
        elif crit:
            raise InvalidInputError(f"quantity {base!r} takes no criterion")
        elif base not in out:
            out.append(base)
    if not out:
        raise InvalidInputError("at least one quantity is required")
    return out


def _matrix_cols(prefix):
    return [f"{prefix}_11", f"{prefix}_22", f"{prefix}_12"]


def quantity_columns(quantities):
    """Output column names, in a fixed order, for the normalized ``quantities``."""
    qs = normalize_quantities(quantities)
    cols = ["dim"]
    for q in qs:
        if q == "qfim":
            cols += _matrix_cols("H")
        elif q == "uhlmann":
            cols.append("U_12")
        elif q == "quantumness":
            cols.append("R")
        elif q.startswith("fim_homodyne:"):
            c = q[-1]
            cols += _matrix_cols(f"Fh_{c}") + [f"theta_{c}", f"Rh_{c}_1", f"Rh_{c}_2"]
        elif q == "fim_dh":
            cols += _matrix_cols("Fdh") + ["Rdh_1", "Rdh_2"]
        elif q == "fi_direct":
            cols += _matrix_cols("Fn")
        elif q == "ng":
            cols.append("nG")
        elif q == "coherence":
            cols.append("C_l1")
        elif q == "entropy":
            cols.append("S")
    if "scalar_bounds" in qs:
        cols.append("C_H")
        for q in qs:
            if q.startswith("fim_homodyne:"):
                cols.append(f"C_h_{q[-1]}")
        if "fim_dh" in qs:
            cols.append("C_dh")
        if "fi_direct" in qs:
            cols.append("C_n")
    return cols


def _put_matrix(row, prefix, m):
    row[f"{prefix}_11"] = float(m[0, 0])
    row[f"{prefix}_22"] = float(m[1, 1])
    row[f"{prefix}_12"] = float(m[0, 1])


def _bound(m):
    try:
        return scalar_bound(m)
    except KerrMetrologyError:
        return 0.0


def evaluate_point(scenario, noise, delta, nbar, quantities, epsilon_trunc=EPS_TRUNC, epsilon_eig=EPS_EIG):
    """All requested quantities at one grid point, as a ``{column: value}`` dict."""
    qs = normalize_quantities(quantities)
    model = build_model(make_params(scenario, noise, delta, nbar), epsilon=epsilon_trunc)
    row = {"dim": model.dim}
    needs_h = any(q in qs for q in ("qfim", "scalar_bounds", "fim_dh")) or any(
        q.startswith("fim_homodyne") for q in qs
    )
    h = None
    if "uhlmann" in qs or "quantumness" in qs:
        info = quantum_info(model, epsilon_eig)
        h = info.qfim
        row["U_12"] = float(info.uhlmann[0, 1])
        row["R"] = info.quantumness
    elif needs_h:
        h = qfim(model, epsilon_eig)
    if "qfim" in qs:
        _put_matrix(row, "H", h)
    homodyne = [q for q in qs if q.startswith("fim_homodyne:")]
    bounds = {}
    if homodyne:
        grid = converged_homodyne_grid(model)
        row["_grid_nodes"] = len(grid)
        for q in homodyne:
            c = q[-1]
            res = optimize_phase(model, c, grid)
            _put_matrix(row, f"Fh_{c}", res.fim)
            row[f"theta_{c}"] = res.theta_opt
            row[f"Rh_{c}_1"], row[f"Rh_{c}_2"] = fim_ratios(res.fim, h)
            bounds[f"C_h_{c}"] = _bound(res.fim)
    if "fim_dh" in qs:
        f = fim_double_homodyne(model)
        _put_matrix(row, "Fdh", f)
        row["Rdh_1"], row["Rdh_2"] = fim_ratios(f, h)
        bounds["C_dh"] = _bound(f)
    if "fi_direct" in qs:
        f = fi_direct(model)
        _put_matrix(row, "Fn", f)
        bounds["C_n"] = _bound(f)
    if "ng" in qs:
        row["nG"] = non_gaussianity(model.rho)
    if "coherence" in qs:
        row["C_l1"] = coherence_l1(model.rho)
    if "entropy" in qs:
        row["S"] = von_neumann_entropy(model.rho)
    if "scalar_bounds" in qs:
        row["C_H"] = _bound(h)
        row.update(bounds)
    return row


def _as_list(v):
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(x) for x in v]


@dataclass
class SweepSpec:
    """A rectangular grid over ``(noise, delta, nbar)`` for one channel."""

    scenario: str
    noise: list
    delta: list
    nbar: list
    quantities: list
    epsilon_trunc: float = EPS_TRUNC
    epsilon_eig: float = EPS_EIG
    output_path: str = None
    threads: int = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidInputError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        self.noise = sorted(_as_list(self.noise))
        self.delta = sorted(_as_list(self.delta))
        self.nbar = sorted(_as_list(self.nbar))
        for name in ("noise", "delta", "nbar"):
            axis = getattr(self, name)
            if not axis:
                raise InvalidInputError(f"grid axis {name!r} is empty")
            if not all(math.isfinite(x) and x >= 0 for x in axis):
                raise InvalidInputError(f"grid axis {name!r} must be finite and >= 0")
        self.quantities = normalize_quantities(self.quantities)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        # accept the scenario-specific name of the noise axis
        for alias in ("tau", "sigma"):
            if alias in d and "noise" not in d:
                d["noise"] = d.pop(alias)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"unknown sweep fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def points(self):
        return list(itertools.product(self.noise, self.delta, self.nbar))

    @property
    def noise_name(self):
        return "tau" if self.scenario == "lossy" else "sigma"


@dataclass
class SweepTable:
    """Rows in lexicographic grid order plus an error log for failed points."""

    scenario: str
    columns: list
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([r[name] for r in self.rows])

    def select(self, **fixed):
        """Rows whose key columns equal the given values."""
        return [r for r in self.rows if all(math.isclose(r[k], v) for k, v in fixed.items())]

    def write_csv(self, fh, columns=None):
        """Write the header and rows to an open text stream."""
        cols = list(KEY_COLUMNS) + list(columns or self.columns)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in cols])

    def to_csv(self, path, columns=None):
        """Write ``path`` plus ``.meta.json`` and, if any point failed, ``.errors.csv``."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh, columns)
        with open(path.with_suffix(".meta.json"), "w", encoding="utf-8") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
        if self.errors:
            with open(path.with_suffix(".errors.csv"), "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(list(KEY_COLUMNS) + ["kind", "message"])
                for e in self.errors:
                    w.writerow([_fmt(e[c]) for c in KEY_COLUMNS] + [e["kind"], e["message"]])
        return path


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12e}"


def _evaluate_safe(spec, point):
    noise, delta, nbar = point
    try:
        return evaluate_point(
            spec.scenario, noise, delta, nbar, spec.quantities, spec.epsilon_trunc, spec.epsilon_eig
        ), None
    except KerrMetrologyError as exc:
        return None, (type(exc).__name__, str(exc))


def run_sweep(spec):
    """Evaluate ``spec`` at every grid point, in parallel over points.

    Failed points land in ``table.errors``; only a sweep where every point
    fails raises.
    """
    points = spec.points()
    threads = spec.threads or os.cpu_count() or 1
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _evaluate_safe(spec, p), points))
    else:
        results = [_evaluate_safe(spec, p) for p in points]

    columns = quantity_columns(spec.quantities)
    table = SweepTable(spec.scenario, columns)
    for (noise, delta, nbar), (row, err) in zip(points, results):
        key = {"scenario": spec.scenario, "noise": noise, "delta": delta, "nbar": nbar}
        if err is None:
            table.rows.append({**key, **{c: row.get(c, math.nan) for c in columns}})
        else:
            table.errors.append({**key, "kind": err[0], "message": err[1]})
    if not table.rows:
        kinds = sorted({e["kind"] for e in table.errors})
        raise NumericalError(f"every sweep point failed ({', '.join(kinds)})")
    table.metadata = {
        "tool_version": __version__,
        "scenario": spec.scenario,
        "noise_parameter": spec.noise_name,
        "quantities": spec.quantities,
        "epsilon_trunc": spec.epsilon_trunc,
        "epsilon_eig": spec.epsilon_eig,
        "dims": sorted({int(r["dim"]) for r in table.rows}),
        "homodyne_grid_nodes": sorted({int(row["_grid_nodes"]) for row, _ in results if row and "_grid_nodes" in row}),
        "n_points": len(points),
        "n_failed": len(table.errors),
        "grid": {"noise": spec.noise, "delta": spec.delta, "nbar": spec.nbar},
    }
    if spec.output_path:
        table.to_csv(spec.output_path)
    return table


def spec_to_dict(spec):
    return asdict(spec)
