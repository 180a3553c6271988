"""Phase-matching scales of a 4 mm BBO crystal pumped at 527 nm.

Solves the collinear type-I angle, then prints the diffraction and dispersion
bandwidths that set the units of every later calculation.  The two Sellmeier
sets bracket the group-velocity mismatch.
"""

import math

from pdcschmidt import Crystal, CrystalConfig
from pdcschmidt.dispersion import SELLMEIER_SETS

for name, sellmeier in SELLMEIER_SETS.items():
    sc = Crystal(CrystalConfig.collinear(sellmeier=sellmeier)).scales()
    print(f"{name}")
    print(f"  pump angle       {math.degrees(sc.theta_p):8.3f} deg")
    print(f"  q0               {sc.q0:8.4f} 1/um")
    print(f"  Omega0           {sc.omega0:8.3e} rad/s")
    print(f"  GVM delay        {sc.tau_gvm_fs:8.1f} fs")
    print(f"  walk-off         {sc.l_walkoff_um:8.1f} um")

# Tilting the crystal away from collinear tuning opens an emission ring at
# q = sqrt(D0 lc) q0.
ring = Crystal(CrystalConfig(delta0_lc=23.38))
sc = ring.scales()
print(f"\nnon-collinear: theta = {math.degrees(sc.theta_p):.3f} deg, ring at {math.sqrt(23.38) * sc.q0:.4f} 1/um")
