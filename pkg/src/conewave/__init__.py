"""Spectral tools for Schrodinger flows on metric cones with inverse-square potentials."""
from .calculus import apply_spectral_multiplier, propagate, resolvent_kernel, sobolev_norm
from .cross_section import (ConeGeometry, CrossSectionModel, build_custom_spectrum,
                            build_dipole_sphere, build_flat_sphere)
from .errors import ConewaveError
from .fields import ConeField, ConeGrid, project_modes, reconstruct_field
from .hankel import plan_dht

__version__ = "0.1.0"

__all__ = [
    "ConeGeometry", "CrossSectionModel", "build_custom_spectrum", "build_dipole_sphere",
    "build_flat_sphere", "ConeField", "ConeGrid", "project_modes", "reconstruct_field",
    "plan_dht", "apply_spectral_multiplier", "propagate", "resolvent_kernel", "sobolev_norm",
    "ConewaveError",
]
