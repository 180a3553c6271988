"""Schmidt number against the collected frequency band, collinear 3D.

A 600 um, 1 ps pump.  The box-function closed form is compared with Monte
Carlo on the quadratic phase matching.  Sample counts are reduced here, so the
error bars are a few percent.
"""

import math

from pdcschmidt import BandwidthLimits, CrystalConfig, McParams, ModelSpec, PumpConfig, schmidt_analytic, schmidt_mc
from pdcschmidt.dispersion import derive_scales

cc = CrystalConfig.collinear()
sc = derive_scales(cc)
pump = PumpConfig(600.0, 1000.0)
params = McParams(samples_n=300_000, samples_b=1_500_000, seed=4, shards=4)

print(f"{'Omegabar':>9} {'K analytic':>12} {'K MC':>12} {'+-':>8}")
for obar in (0.5, 1.0, 2.0, 4.0):
    lim = BandwidthLimits.normalized(math.inf, obar, q0=sc.q0, omega0=sc.omega0)
    spec = ModelSpec(3, cc, pump, lim)
    ka = schmidt_analytic(spec).K
    r = schmidt_mc(spec, params)
    print(f"{obar:9.2f} {ka:12.4g} {r.K:12.4g} {r.K_err:8.2g}")
