"""Special-function kernel: gamma, beta and normal-distribution functions."""

from specfun.beta import log_beta, reg_inc_beta, reg_inc_beta_c, reg_inc_beta_inv
from specfun.gamma import digamma, log_gamma, reg_inc_gamma_lower, reg_inc_gamma_upper
from specfun.normal import std_normal_cdf, std_normal_sf

__all__ = [
    "digamma",
    "log_beta",
    "log_gamma",
    "reg_inc_beta",
    "reg_inc_beta_c",
    "reg_inc_beta_inv",
    "reg_inc_gamma_lower",
    "reg_inc_gamma_upper",
    "std_normal_cdf",
    "std_normal_sf",
]
