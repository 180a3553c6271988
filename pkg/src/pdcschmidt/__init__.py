"""Schmidt number of low-gain parametric down-conversion in 1, 2 and 3 dimensions."""

from .dispersion import Crystal, CrystalConfig, DispersionScales, derive_scales
from .phasematch import BandwidthLimits, ExactPhaseMatch, QuadraticPhaseMatch, v_integral
from .pump import PumpConfig, npwpa_check, pump_for_beta
from .schmidt import (
    McParams,
    ModelSpec,
    SchmidtResult,
    beta_sweep,
    factorizability_gap,
    schmidt_analytic,
    schmidt_mc,
    schmidt_npwpa_integral,
)

__all__ = [
    "BandwidthLimits", "Crystal", "CrystalConfig", "DispersionScales", "ExactPhaseMatch",
    "McParams", "ModelSpec", "PumpConfig", "QuadraticPhaseMatch", "SchmidtResult",
    "beta_sweep", "derive_scales", "factorizability_gap", "npwpa_check", "pump_for_beta",
    "schmidt_analytic", "schmidt_mc", "schmidt_npwpa_integral", "v_integral",
]
