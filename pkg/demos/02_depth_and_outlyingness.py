"""Univariate medians and MAD variants, projection outlyingness, and exact
halfspace depth in the plane.

Run as: python demos/02_depth_and_outlyingness.py
"""

import numpy as np

from robloc import (
    DataSet,
    DirectionBudget,
    bundled_dataset,
    mad,
    outlyingness,
    tukey_depth,
    univariate_median,
)
from robloc.depth import OutlyingnessEvaluator

# --- set-valued medians -------------------------------------------------------
# For even sample sizes the median is honestly an interval; the midpoint is
# just its conventional representative.

for sample in ([1, 2, 3], [1, 2, 3, 4], [3, 1, 4, 1, 5]):
    m = univariate_median(sample)
    print(f"median{sample} = [{m.low}, {m.high}]  midpoint {m.midpoint}")

# --- MAD and its order-statistic shifts -----------------------------------------
# The ordinary MAD takes the middle deviation; shifting the order statistic
# upward buys breakdown at the price of bias. The shifted variant is what
# the projection median uses.

vals = [0.0, 1.0, 2.0, 3.0, 100.0]
print("\nsample", vals)
for j in (0, 1, 2, 4):
    print(f"  mad shift j={j}: {mad(vals, j)}")

# --- projection outlyingness -----------------------------------------------------
# Outlyingness of x is the worst standardized distance of x from the
# projected sample over a probe set of directions: seeded random ones plus
# every hyperplane normal through k data points. In one dimension it
# collapses to |x - median| / MAD.

X1 = DataSet(np.array([0.0, 1.0, 2.0, 3.0, 4.0]))
budget = DirectionBudget(random_count=500, include_data_directions=True, seed=42)
print("\n1-D outlyingness of 10.0:", outlyingness(np.array([10.0]), X1, 0, budget),
      " (|10-2|/1 = 8)")

X = bundled_dataset("demo10_2d")
evaluator = OutlyingnessEvaluator(X, scale_shift=0, budget=budget)
scores = evaluator.batch(X.points)
order = np.argsort(scores)
print("\nbundled cloud, points by outlyingness (most central first):")
for i in order:
    print(f"  point {i} {np.round(X.points[i], 2)}  out = {scores[i]:.3f}")

# A direction in which the projected sample has zero scale but the query
# does not sends outlyingness to infinity; that mechanism is exactly what
# breaks projection estimators whose scale collapses.
flat = DataSet(np.array([[0.0, 0.0], [0.0, 1.0], [0.0, 2.0], [0.0, 3.5]]))
ev = OutlyingnessEvaluator(flat, 0, directions=np.array([[1.0, 0.0]]))
print("\nzero-scale direction blowup:", ev(np.array([0.5, 0.0])))

# --- exact halfspace depth ---------------------------------------------------------
# In the plane the angular sweep is exact: depth 0 outside the hull, 1 at a
# vertex, and at least 3 = k+1 for decently central points.

for label, point in [("far outside", [50.0, 50.0]),
                     ("hull vertex", X.points[5]),
                     ("coordinatewise median", np.median(X.points, axis=0))]:
    print(f"depth at {label}: {tukey_depth(point, X)}")
