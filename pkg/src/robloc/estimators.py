"""Location estimators behind a single set-valued interface.

Estimators return an :class:`EstimateSet`: a finite nonempty set of
candidate locations plus a canonical representative. Set-valuedness is not
decoration; exhaustive subset estimators produce genuine ties on symmetric
data, and the breakdown machinery measures divergence over all members.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable

import numpy as np

from .dataset import DataSet
from .depth import DirectionBudget, OutlyingnessEvaluator
from .errors import (
    CombinatorialBudgetError,
    DegenerateSampleError,
    EstimatorError,
    ParameterError,
)
from .univariate import univariate_median

__all__ = [
    "EstimateSet",
    "LocationEstimator",
    "coordinatewise_median",
    "weighted_mean",
    "MCDResult",
    "mcd_exhaustive",
    "default_mcd_coverage",
    "trimmed_mean",
    "projection_median",
    "ESTIMATOR_NAMES",
    "make_estimator",
]

# Members closer than this (Euclidean) are collapsed into one.
_DEDUP_ATOL = 1e-12

# Exhaustive MCD refuses to enumerate more subsets than this.
_MCD_SUBSET_BUDGET = 10_000_000

# Fixed fallback budget for estimators whose callers did not supply one:
# 2000 random probes plus the data-derived hyperplane normals. The seed is
# a package constant so the fallback stays deterministic.
_DEFAULT_PROBE_SEED = 1729
_DEFAULT_PROBE_COUNT = 2000


@dataclass(frozen=True)
class EstimateSet:
    """Finite nonempty set of location estimates with a canonical member.

    Members are deduplicated within 1e-12. ``canonical`` is the conventional
    point representative (for interval-valued estimators it may be an
    interval midpoint that is not itself a member).
    """

    members: np.ndarray = field(repr=False)
    canonical: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.members, dtype=float)
        if m.ndim == 1:
            m = m.reshape(1, -1)
        if m.shape[0] == 0:
            raise EstimatorError("estimate set must be nonempty")
        if not np.all(np.isfinite(m)):
            raise EstimatorError("estimate members must be finite")
        # O(m^2) dedup preserving first occurrences; member counts stay tiny
        rows = []
        for row in m:
            if not any(np.linalg.norm(row - r) <= _DEDUP_ATOL for r in rows):
                rows.append(row)
        m = np.array(rows)
        c = np.asarray(self.canonical, dtype=float).reshape(-1)
        if c.size != m.shape[1]:
            raise EstimatorError("canonical point dimension mismatch")
        m.setflags(write=False)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "members", m)
        object.__setattr__(self, "canonical", c)

    @classmethod
    def of(cls, members, canonical=None) -> "EstimateSet":
        m = np.asarray(members, dtype=float)
        if m.ndim == 1:
            m = m.reshape(1, -1)
        if m.shape[0] == 0:
            raise EstimatorError("estimate set must be nonempty")
        if canonical is None:
            canonical = m[0]
        return cls(m, np.asarray(canonical, dtype=float))

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def k(self) -> int:
        return self.members.shape[1]


@dataclass(frozen=True)
class LocationEstimator:
    """Named estimator with a declared equivariance class.

    ``evaluate`` must be deterministic given the input dataset and whatever
    seed was frozen into it at construction time.
    """

    name: str
    equivariance_class: str  # "translation" | "affine"
    evaluate: Callable[[DataSet], EstimateSet] = field(repr=False)

    def __post_init__(self):
        if self.equivariance_class not in ("translation", "affine"):
            raise ParameterError(f"unknown equivariance class {self.equivariance_class!r}")

    def __call__(self, X: DataSet) -> EstimateSet:
        return self.evaluate(X)


def coordinatewise_median(X: DataSet) -> EstimateSet:
    """Per-coordinate median interval, as a corner set plus midpoint.

    Members are the corners of the coordinatewise interval box (at most 2^k
    of them); the canonical representative is the box midpoint, which for
    even n need not be a member.
    """
    intervals = [univariate_median(X.points[:, j]) for j in range(X.k)]
    axes = [(iv.low,) if iv.is_point else (iv.low, iv.high) for iv in intervals]
    corners = np.array([corner for corner in product(*axes)], dtype=float)
    midpoint = np.array([iv.midpoint for iv in intervals])
    return EstimateSet.of(corners, canonical=midpoint)


def weighted_mean(X: DataSet, weights) -> np.ndarray:
    """Weighted average of the data points, weights in [0, 1]."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size != X.n:
        raise ParameterError(f"need {X.n} weights, got {w.size}")
    if np.any(w < 0) or np.any(w > 1):
        raise ParameterError("weights must lie in [0, 1]")
    total = w.sum()
    if total <= 0:
        raise ParameterError("weights must not all be zero")
    return (w @ X.points) / total


def default_mcd_coverage(n: int, k: int) -> int:
    """Coverage floor((n + k + 1) / 2): the choice with maximal breakdown."""
    return (n + k + 1) // 2


@dataclass(frozen=True)
class MCDResult:
    estimates: EstimateSet
    objective: float
    optimal_subsets: tuple


def mcd_exhaustive(X: DataSet, coverage: int | None = None) -> MCDResult:
    """Minimum covariance determinant location by full subset enumeration.

    Every coverage-subset is scored by the determinant of its sample
    covariance; the estimate set holds the means of all subsets tying for
    the minimum within a relative tolerance of 1e-9. Subsets with singular
    covariance score 0 and are excluded unless every subset is singular.

    The determinant is evaluated through the singular values of the
    centered subset (det = prod(s_i^2) / (h-1)^k) rather than by
    factorizing an explicitly formed covariance matrix. Contamination
    sweeps feed this estimator subsets that are extremely elongated affine
    images of compact ones; forming the covariance squares the condition
    number and loses the tiny determinant to cancellation long before the
    singular values do.

    Enumeration order is deterministic (lexicographic index tuples), which
    makes tie reporting and the canonical member reproducible.
    """
    n, k = X.n, X.k
    h = default_mcd_coverage(n, k) if coverage is None else int(coverage)
    if h < k + 1 or h > n:
        raise ParameterError(f"coverage must be in [k+1, n] = [{k + 1}, {n}], got {h}")
    total = 1
    for i in range(h):
        total = total * (n - i) // (i + 1)
    if total > _MCD_SUBSET_BUDGET:
        raise CombinatorialBudgetError(
            f"C({n},{h}) = {total} exceeds the exhaustive-MCD budget {_MCD_SUBSET_BUDGET}"
        )

    subsets = np.array(list(combinations(range(n), h)), dtype=int)
    groups = X.points[subsets]  # (S, h, k)
    means = groups.mean(axis=1)  # (S, k)
    centered = groups - means[:, None, :]
    svals = np.linalg.svd(centered, compute_uv=False)  # (S, k), h >= k+1 > k
    dets = np.prod(svals, axis=1) ** 2 / float(h - 1) ** k

    valid = np.isfinite(dets) & (dets > 0.0)
    if not np.any(valid):
        raise DegenerateSampleError("every coverage subset has singular covariance")
    best = float(dets[valid].min())
    tie_tol = 1e-9 * best
    winners = np.flatnonzero(valid & (dets <= best + tie_tol))
    members = means[winners]
    opt_subsets = tuple(tuple(int(i) for i in subsets[w]) for w in winners)
    return MCDResult(
        estimates=EstimateSet.of(members, canonical=members[0]),
        objective=best,
        optimal_subsets=opt_subsets,
    )


def _probe_budget(X: DataSet, budget: DirectionBudget | None) -> DirectionBudget:
    if budget is not None:
        return budget
    return DirectionBudget(
        random_count=_DEFAULT_PROBE_COUNT,
        include_data_directions=True,
        seed=_DEFAULT_PROBE_SEED,
    )


def trimmed_mean(
    X: DataSet,
    trim_count: int,
    scale_shift: int = 0,
    budget: DirectionBudget | None = None,
) -> np.ndarray:
    """Mean of the n - trim_count points of smallest projection outlyingness.

    Ranking ties break by point index. The default probe budget is fixed so
    the estimator is deterministic without caller-supplied seeds.
    """
    t = int(trim_count)
    if t < 0 or X.n - t < X.k + 1:
        raise ParameterError(f"trim_count must satisfy 0 <= t <= n-k-1 = {X.n - X.k - 1}, got {t}")
    if t == 0:
        return X.points.mean(axis=0)
    evaluator = OutlyingnessEvaluator(X, scale_shift, _probe_budget(X, budget))
    scores = evaluator.batch(X.points)
    order = np.lexsort((np.arange(X.n), scores))
    keep = np.sort(order[: X.n - t])
    weights = np.zeros(X.n)
    weights[keep] = 1.0
    return weighted_mean(X, weights)


def projection_median(
    X: DataSet,
    scale_shift: int | None = None,
    budget: DirectionBudget | None = None,
    grid_refinements: int = 8,
) -> EstimateSet:
    """Maximizer of projection depth 1 / (1 + outlyingness) over a candidate set.

    Candidates are the data points, the coordinatewise-median midpoint, and
    a refining lattice around the incumbent: a box with initial side equal
    to the data diameter, halved ``grid_refinements`` times, recentered on
    the best point found so far. All candidates within a relative tie
    tolerance of 1e-9 of the best depth are returned.

    ``scale_shift`` defaults to k - 1: the order-statistic shift that keeps
    the per-direction scale positive as long as at most k points tie in
    projection.
    """
    k = X.k
    shift = (k - 1) if scale_shift is None else int(scale_shift)
    evaluator = OutlyingnessEvaluator(X, shift, _probe_budget(X, budget))

    def depth_of(pts: np.ndarray) -> np.ndarray:
        out = evaluator.batch(pts)
        return 1.0 / (1.0 + out)

    candidates = [X.points, coordinatewise_median(X).canonical.reshape(1, -1)]
    cand = np.vstack(candidates)
    depths = depth_of(cand)
    best_idx = int(np.argmax(depths))
    best_depth = float(depths[best_idx])
    incumbent = cand[best_idx]

    all_pts = [cand]
    all_depths = [depths]
    width = max(X.diameter, 1e-12)
    offsets = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    for level in range(int(grid_refinements)):
        half = width / 2.0 ** (level + 1)
        axes = [incumbent[j] + half * offsets for j in range(k)]
        lattice = np.array(list(product(*axes)))
        d = depth_of(lattice)
        all_pts.append(lattice)
        all_depths.append(d)
        top = int(np.argmax(d))
        if float(d[top]) > best_depth:
            best_depth = float(d[top])
            incumbent = lattice[top]

    pts = np.vstack(all_pts)
    dep = np.concatenate(all_depths)
    if not np.any(dep > 0.0):
        raise DegenerateSampleError("projection depth vanished at every candidate")
    tie_tol = 1e-9 * best_depth
    winners = pts[dep >= best_depth - tie_tol]
    # Deterministic member order: first occurrence in candidate order.
    return EstimateSet.of(winners, canonical=incumbent)


ESTIMATOR_NAMES = ("cmedian", "mcd", "tmean", "pm", "wmean")


def make_estimator(name: str, seed: int | None = None, **params) -> LocationEstimator:
    """Resolve an estimator by registry name.

    Recognized names and their parameters:

    * ``cmedian`` -- coordinatewise median (translation equivariant).
    * ``mcd`` -- exhaustive MCD; ``coverage`` (default floor((n+k+1)/2)).
    * ``tmean`` -- outlyingness-trimmed mean; ``trim_count`` (default 1),
      ``scale_shift``, ``random_count``.
    * ``pm`` -- projection median; ``scale_shift`` (default k-1),
      ``random_count`` (default 2000), ``grid_refinements`` (default 8).
      Requires ``seed``.
    * ``wmean`` -- unweighted mean (all weights 1, affine equivariant).
    """
    name = str(name)
    unknown = set(params) - {"coverage", "trim_count", "scale_shift", "random_count", "grid_refinements"}
    if unknown:
        raise ParameterError(f"unknown estimator parameters: {sorted(unknown)}")

    if name == "cmedian":
        return LocationEstimator("cmedian", "translation", coordinatewise_median)

    if name == "wmean":
        def _wmean(X: DataSet) -> EstimateSet:
            return EstimateSet.of(weighted_mean(X, np.ones(X.n)))
        return LocationEstimator("wmean", "affine", _wmean)

    if name == "mcd":
        coverage = params.get("coverage")
        def _mcd(X: DataSet) -> EstimateSet:
            return mcd_exhaustive(X, coverage=coverage).estimates
        return LocationEstimator("mcd", "affine", _mcd)

    if name == "tmean":
        trim = int(params.get("trim_count", 1))
        shift = params.get("scale_shift", 0)
        count = int(params.get("random_count", _DEFAULT_PROBE_COUNT))
        probe_seed = _DEFAULT_PROBE_SEED if seed is None else int(seed)
        def _tmean(X: DataSet) -> EstimateSet:
            b = DirectionBudget(count, True, probe_seed)
            return EstimateSet.of(trimmed_mean(X, trim, int(shift), b))
        return LocationEstimator("tmean", "translation", _tmean)

    if name == "pm":
        if seed is None:
            raise ParameterError("estimator 'pm' requires a seed")
        shift = params.get("scale_shift")
        count = int(params.get("random_count", 2000))
        refinements = int(params.get("grid_refinements", 8))
        def _pm(X: DataSet) -> EstimateSet:
            b = DirectionBudget(count, True, int(seed))
            s = (X.k - 1) if shift is None else int(shift)
            return projection_median(X, scale_shift=s, budget=b, grid_refinements=refinements)
        return LocationEstimator("pm", "translation", _pm)

    raise EstimatorError(f"unknown estimator {name!r}; known: {', '.join(ESTIMATOR_NAMES)}")
