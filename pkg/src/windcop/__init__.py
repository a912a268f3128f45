"""Wind-speed regression and bivariate copula dependence modelling."""

__version__ = "0.1.0"

from . import copulas, joint, kernels, marginals, preprocess, regression, stats_core  # noqa: E402
from .copulas import CopulaFit, CopulaSpec, copula_fit, copula_select, copula_tau  # noqa: E402
from .errors import (  # noqa: E402
    DataError,
    DegenerateError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    SingularDesignError,
    WindcopError,
)
from .joint import JointModel, build_joint, gof, joint_cdf, joint_pdf, joint_sample  # noqa: E402
from .marginals import MarginalFit, fit_marginal  # noqa: E402
from .preprocess import Dataset  # noqa: E402
from .regression import RegressionModel  # noqa: E402

__all__ = [
    "CopulaFit", "CopulaSpec", "DataError", "Dataset", "DegenerateError", "DomainError", "InsufficientDataError",
    "JointModel", "MarginalFit", "NumericalError", "RegressionModel", "SingularDesignError", "WindcopError",
    "__version__", "build_joint", "copula_fit", "copula_select", "copula_tau", "copulas", "fit_marginal", "gof",
    "joint", "joint_cdf", "joint_pdf", "joint_sample", "kernels", "marginals", "preprocess", "regression",
    "stats_core",
]
