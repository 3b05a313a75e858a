"""Walk through the geometric substrate: general position, hull facets,
orthonormal frames, and the hyperplane-fixing shear family.

Run as: python demos/01_geometry_and_shear.py
"""

import numpy as np

from robloc import (
    DataSet,
    apply_map,
    basis_from_normal,
    bundled_dataset,
    check_general_position,
    enumerate_facets,
    shear_transform,
)

# --- general position -------------------------------------------------------
# A dataset is in general position when no k+1 points share an affine
# hyperplane. Uniform draws have this property almost surely; hand-built
# degenerate sets do not.

triangle = DataSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
collinear = DataSet(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))

print("triangle in general position:", check_general_position(triangle).ok)
report = check_general_position(collinear)
print("collinear set in general position:", report.ok, "- witness:", report.witness)

# --- hull facets ------------------------------------------------------------
# Under general position every hull face is spanned by exactly k points.
# Enumeration is brute force over all k-subsets: at desk scale that is both
# fast and beyond suspicion.

X = bundled_dataset("demo10_2d")
facets = enumerate_facets(X)
print(f"\nbundled 10-point cloud has {len(facets)} hull edges:")
for f in facets:
    print(f"  edge {f.indices}  inward normal {np.round(f.inward_normal, 3)}"
          f"  support {f.support_value:.3f}")

# Every non-facet point projects strictly above the facet's support value:
f = facets[0]
others = [i for i in range(X.n) if i not in f.indices]
clearances = X.points[others] @ f.inward_normal - f.support_value
print("smallest clearance above the first edge:", round(float(clearances.min()), 4))

# --- shear transforms --------------------------------------------------------
# Anchor a frame on a facet: e_1 is the inward normal, the remaining
# directions span the facet hyperplane. The shear with slope gamma fixes
# that hyperplane pointwise and slides parallel layers sideways in
# proportion to their height. Its matrix is unipotent: volume is preserved
# no matter how violent the slope.

basis = basis_from_normal(f.inward_normal, X.points[list(f.indices)].mean(axis=0))
for gamma in (1.0, 100.0, 1e4):
    g = shear_transform(gamma, basis)
    moved = apply_map(g, X)
    travel = np.linalg.norm(moved.points - X.points, axis=1)
    heights = np.abs(X.points @ f.inward_normal - f.support_value)
    print(f"gamma={gamma:>8g}:  det={np.linalg.det(g.matrix):.12f}  "
          f"max travel {travel.max():.4g}  (= gamma * height: "
          f"{np.allclose(travel, gamma * heights, rtol=1e-9)})")

# The family is a one-parameter group: composing slopes adds them.
g_sum = shear_transform(2.5, basis).compose(shear_transform(4.0, basis))
g_direct = shear_transform(6.5, basis)
probe = np.array([3.0, 7.0])
print("group law deviation at a probe point:",
      float(np.linalg.norm(g_sum.apply(probe) - g_direct.apply(probe))))
