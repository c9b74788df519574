"""scikit-learn transformer mapping channel parameter points to figures of merit.

Each input row is a point ``(noise, delta, nbar)``; each output column is one
of the sweep columns (``H_11``, ``R``, ``Fh_a_22``, ...). There is nothing to
learn, so ``fit`` only validates and records the output layout.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import InvalidInputError
from .estimation import EPS_EIG
from .fock import EPS_TRUNC
from .sweep import SCENARIOS, evaluate_point, normalize_quantities, quantity_columns

INPUT_FEATURES = ("noise", "delta", "nbar")


def check_parameter_grid(X):
    """Validate an ``(n_points, 3)`` array of non-negative finite parameters."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 3:
        raise InvalidInputError(f"expected 3 columns (noise, delta, nbar), got {X.shape[1]}")
    if np.any(X < 0):
        raise InvalidInputError("channel parameters must be >= 0")
    return X


class KerrChannelTransformer(TransformerMixin, BaseEstimator):
    """Evaluate QFIM, FIM and resource quantities at parameter points.

    Parameters
    ----------
    scenario : {'lossy', 'dephasing'}
    quantities : sequence of str
        Any of the sweep quantity names, e.g. ``('qfim', 'quantumness')``
        or ``('fim_homodyne:a', 'fim_dh')``.
    epsilon_trunc, epsilon_eig : float
        Fock truncation and eigenvalue-pair cutoffs.
    """

    def __init__(self, scenario="lossy", quantities=("qfim",), epsilon_trunc=EPS_TRUNC, epsilon_eig=EPS_EIG):
        self.scenario = scenario
        self.quantities = quantities
        self.epsilon_trunc = epsilon_trunc
        self.epsilon_eig = epsilon_eig

    def fit(self, X, y=None):
        if self.scenario not in SCENARIOS:
            raise InvalidInputError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        check_parameter_grid(X)
        self.quantities_ = normalize_quantities(self.quantities)
        self.columns_ = [c for c in quantity_columns(self.quantities_) if c != "dim"]
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "columns_")
        X = check_parameter_grid(X)
        out = np.empty((X.shape[0], len(self.columns_)))
        for i, (noise, delta, nbar) in enumerate(X):
            row = evaluate_point(
                self.scenario, noise, delta, nbar, self.quantities_, self.epsilon_trunc, self.epsilon_eig
            )
            out[i] = [row[c] for c in self.columns_]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "columns_")
        return np.asarray(self.columns_, dtype=object)
