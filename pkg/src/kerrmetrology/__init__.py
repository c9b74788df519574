"""Multiparameter estimation toolkit for lossy-Kerr and dephasing-Kerr channels."""

__version__ = "0.1.0"

from .channels import (  # noqa: E402
    DephasingKerrParams,
    LossyKerrParams,
    StatisticalModel,
    build_model,
    make_params,
)
from .errors import (  # noqa: E402
    DegenerateModelError,
    InvalidInputError,
    KerrMetrologyError,
    NumericalError,
    QuadratureError,
    TruncationError,
)
from .estimation import qfim, quantum_info, scalar_bound, sld, uhlmann, quantumness  # noqa: E402
from .measurements import (  # noqa: E402
    fi_direct,
    fim_double_homodyne,
    fim_homodyne,
    optimize_phase,
)
