from fitting.likelihood import bgl_score, log_likelihood
from fitting.mle import FitConfig, FitResult, fit_mle

__all__ = ["FitConfig", "FitResult", "bgl_score", "fit_mle", "log_likelihood"]
