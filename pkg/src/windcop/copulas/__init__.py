"""Bivariate copulas: evaluation, sampling, maximum-likelihood fitting and selection."""

from .core import (
    ASYMMETRIC,
    CODES,
    EPS,
    CopulaSpec,
    copula_cdf,
    copula_h,
    copula_hinv,
    copula_logpdf,
    copula_pdf,
    copula_sample,
    copula_tau,
    family_specs,
    parse_family,
)
from .families import FAMILIES, joe_tau_closed, tau_archimedean, tau_numeric
from .fitting import CopulaFit, Selection, check_pobs, copula_fit, copula_loglik, copula_select

__all__ = [
    "ASYMMETRIC", "CODES", "EPS", "FAMILIES", "CopulaFit", "CopulaSpec", "Selection", "check_pobs",
    "copula_cdf", "copula_fit", "copula_h", "copula_hinv", "copula_loglik", "copula_logpdf", "copula_pdf",
    "copula_sample", "copula_select", "copula_tau", "family_specs", "joe_tau_closed", "parse_family",
    "tau_archimedean", "tau_numeric",
]
