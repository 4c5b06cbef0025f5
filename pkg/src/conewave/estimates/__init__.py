"""Desk-scale witnesses for the dispersive, Strichartz, smoothing, Hardy,
resolvent and uniform Sobolev inequalities on cones."""
from .dispersive import DispersiveFit, dispersive_decay_scan
from .ensembles import Ensemble, random_ensemble
from .gfunction import g_function_check, g_function_sweep, within_witness
from .hardy import (hardy_p_window, hardy_quotient, sharp_mode_constant, single_mode_hardy,
                    weighted_hardy_check, weighted_hardy_terms)
from .report import STABILITY_TOL, GFunctionSample, QuotientReport
from .resolvent import (kernel_resolvent_norm, resolvent_sup_scan, sigma_grid,
                        weighted_resolvent_norm)
from .smoothing import local_smoothing_quotient
from .sobolev import SobolevProbe, sobolev_quotient, uniform_sobolev_probe
from .strichartz import is_admissible, strichartz_quotient, strichartz_scan

__all__ = [
    "DispersiveFit", "dispersive_decay_scan", "Ensemble", "random_ensemble",
    "g_function_check", "g_function_sweep", "within_witness", "hardy_p_window",
    "hardy_quotient", "sharp_mode_constant", "single_mode_hardy", "weighted_hardy_check",
    "weighted_hardy_terms", "STABILITY_TOL", "GFunctionSample", "QuotientReport",
    "kernel_resolvent_norm", "resolvent_sup_scan", "sigma_grid", "weighted_resolvent_norm",
    "local_smoothing_quotient", "SobolevProbe", "sobolev_quotient", "uniform_sobolev_probe",
    "is_admissible", "strichartz_quotient", "strichartz_scan",
]
