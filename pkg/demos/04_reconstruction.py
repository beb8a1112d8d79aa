"""Rebuilding a surface from its fundamental data (F, A, B).

The data of an integrated surface satisfies three compatibility equations;
marching the expansions from a seeded corner quadrangle then reproduces
the surface up to an affine map.  Corrupting a single coefficient breaks
the two-way extension certificate.
"""

import numpy as np

import affmin as am
from affmin import FundamentalData, IncompatibleData

field = am.minimal_cubic(am.GridDomain(1, 13, 1, 13))
surface = am.integrate(field)
data = am.extract_fundamental_data(surface)

r0, r1, r2 = am.compatibility_residuals(data)
print(f"compatibility residuals: {r0:.2e}, {r1:.2e}, {r2:.2e}")

# Round trip with the surface's own corner quadrangle: vertex-for-vertex.
p = surface.positions.values
seed = np.stack([p[0, 0], p[1, 0], p[0, 1], p[1, 1]])
rebuilt = am.reconstruct(data, seed)
gap = np.abs(rebuilt.positions.values - p).max()
print("own-seed reconstruction gap:", gap)

# Canonical seed: a different representative of the same affine class.
canonical = am.reconstruct(data)
mapping = am.affine_equivalence(canonical, surface)
print("canonical seed is affinely equivalent, det =", mapping.det)
print("linear part:")
print(mapping.linear)

# Break one cubic coefficient: the data no longer describes any surface.
bad = np.array(data.u_coeff.values)
bad[5, 6] += 1.0
try:
    am.reconstruct(
        FundamentalData(data.areas, data.u_coeff.with_values(bad), data.v_coeff),
        seed,
    )
except IncompatibleData as exc:
    print("corrupted data rejected:", exc)
