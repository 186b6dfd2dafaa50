"""Aharonov-Bohm scattering off an impenetrable magnetic vortex.

Three tiers: exact partial waves (:mod:`.partialwave`), short-wavelength
closed forms (:mod:`.quasiclassical`) and classical rays (:mod:`.classical`),
cross-checked by :mod:`.validate`.
"""
from .core import (AngleGrid, Kinematics, RegionKind, ScatterConfig, Spin,
                   classify_region, effective_flux, opening_angle, reduce_flux)
from .kernels import BACKEND

__version__ = "0.1.0"
