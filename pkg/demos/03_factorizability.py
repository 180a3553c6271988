"""Does the 3D Schmidt number factor into spatial times temporal parts?

With narrow collection the joint amplitude separates and the ratio
K_3D/(K_1D K_2D) is one.  Past the box breakpoint the spatial and temporal
bands couple through the phase matching and K_3D keeps growing while the
product saturates.
"""

from pdcschmidt import CrystalConfig, PumpConfig, factorizability_gap

rows = factorizability_gap(CrystalConfig.collinear(), PumpConfig(600.0, 1000.0),
                           (0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 4.0))
print(f"{'bar':>5} {'K_3D':>11} {'K_1D*K_2D':>11} {'ratio':>7}")
for r in rows:
    print(f"{r.bar:5.1f} {r.K3:11.4g} {r.product:11.4g} {r.ratio:7.3f}")
