"""Adversarial replacement-contamination engine and breakdown bound tables.

The shear attack turns an existence proof into a search procedure. Fix a
hull facet, keep h of its points (they pin a hyperplane L), and shear the
rest parallel to L with slope gamma. Because the shear fixes L pointwise
and is volume-preserving, two dual contamination families arise for the
same replacement budget: replace the far half of the remaining points with
their sheared images, or replace the near half with their inverse-sheared
preimages. The second family is the exact affine preimage of the first, so
an affine equivariant estimator that stays put on both families as gamma
grows contradicts itself; recording the larger of the two displacements per
gamma is guaranteed to diverge for any estimator that keeps a margin above
the hull boundary.

Breakdown is declared at a finite, scale-free proxy for "unbounded": a
recorded estimate-set distance beyond ``threshold_factor`` times the data
diameter. A certificate that no attack in the suite succeeded is exactly
that, never a proof of a breakdown lower bound.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dataset import DataSet
from .errors import (
    GeneralPositionError,
    ParameterError,
    RoblocError,
)
from .estimators import EstimateSet, LocationEstimator
from .geometry import (
    GP_RTOL,
    Facet,
    basis_from_normal,
    check_general_position,
    enumerate_facets,
    require_general_position,
    shear_transform,
    unit_direction,
)
from .metric import estimate_set_distance

__all__ = [
    "BoundTable",
    "theoretical_bounds",
    "PartitionRule",
    "AttackRecord",
    "AttackTrace",
    "shear_attack",
    "translation_cluster_attack",
    "AttackSuite",
    "BreakdownCertificate",
    "FsbvResult",
    "empirical_fsbv",
    "pm_counterexample",
    "config_digest",
    "DEFAULT_GAMMA_GRID",
    "DEFAULT_RADIUS_GRID",
    "DEFAULT_THRESHOLD_FACTOR",
    "SURVIVED_MARKER",
]

DEFAULT_GAMMA_GRID = tuple(10.0**p for p in range(1, 9))
DEFAULT_RADIUS_GRID = tuple(10.0**p for p in range(1, 10))
DEFAULT_THRESHOLD_FACTOR = 1e6
SURVIVED_MARKER = "no attack in suite succeeded (not a proof of robustness)"

# Relative size of the single gamma nudge allowed to restore general position.
_NUDGE_REL = 1e-6
# Tolerance for the inline check that family two is the affine preimage of
# family one.
_IDENTITY_RTOL = 1e-9


def config_digest(mapping: dict) -> str:
    """Stable short hash over every parameter that affects a result."""
    blob = json.dumps(mapping, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Bound tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundTable:
    """Exact upper bounds on replacement breakdown, as unreduced fractions.

    * ``translation``: bound for all translation equivariant location
      estimators, floor((n+1)/2) / n.
    * ``affine_condition_h``: bound for affine equivariant estimators whose
      projection clears every h-fold tied minimum, floor((n-h+1)/2) / n.
    * ``scatter``: the h = k value floor((n-k+1)/2) / n, the sharp bound for
      affine equivariant scatter and the value attained by MVE/MCD-type
      locations.
    * ``projection_median``: floor((n-k+2)/2) / n, attained by the
      projection median through its shifted scale estimator.
    """

    n: int
    k: int
    h: int
    translation: tuple
    affine_condition_h: tuple
    scatter: tuple
    projection_median: tuple

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "h": self.h,
            "translation": list(self.translation),
            "affine_condition_h": list(self.affine_condition_h),
            "scatter": list(self.scatter),
            "projection_median": list(self.projection_median),
        }


def theoretical_bounds(n: int, k: int, h: int) -> BoundTable:
    """Exact breakdown bound catalogue for sample size n, dimension k, tie
    order h. All four values are (numerator, denominator) integer pairs,
    deliberately left unreduced."""
    n, k, h = int(n), int(k), int(h)
    if not (n > k >= 1):
        raise ParameterError(f"need n > k >= 1, got n={n}, k={k}")
    if not (1 <= h <= k):
        raise ParameterError(f"need 1 <= h <= k, got h={h}, k={k}")
    return BoundTable(
        n=n,
        k=k,
        h=h,
        translation=((n + 1) // 2, n),
        affine_condition_h=((n - h + 1) // 2, n),
        scatter=((n - k + 1) // 2, n),
        projection_median=((n - k + 2) // 2, n),
    )


# ---------------------------------------------------------------------------
# Attack traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionRule:
    """How the shear attack splits the non-kept points and picks the kept ones.

    ``b_rule`` chooses which side of the hyperplane-distance ordering gets
    replaced by sheared images ("largest_projection" or
    "smallest_projection"; ties break by index). ``s_choice`` optionally
    fixes the kept h-subset of the facet's points (default: the h smallest
    indices).
    """

    b_rule: str = "largest_projection"
    s_choice: tuple | None = None

    def __post_init__(self):
        if self.b_rule not in ("largest_projection", "smallest_projection"):
            raise ParameterError(f"unknown b_rule {self.b_rule!r}")


@dataclass(frozen=True)
class AttackRecord:
    """One contaminated dataset and what the estimator did on it."""

    family: str
    parameter: float
    requested_parameter: float
    replaced_indices: tuple
    estimate: EstimateSet
    distance: float

    @property
    def nudged(self) -> bool:
        return self.parameter != self.requested_parameter

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "parameter": float(self.parameter),
            "requested_parameter": float(self.requested_parameter),
            "nudged": self.nudged,
            "replaced_indices": list(self.replaced_indices),
            "estimate_members": [[float(v) for v in row] for row in self.estimate.members],
            "distance": float(self.distance),
        }


@dataclass(frozen=True)
class AttackTrace:
    """Full record of one contamination family swept over its grid."""

    family: str
    estimator: str
    n: int
    k: int
    m: int
    h: int | None
    parameters: tuple
    records: tuple
    divergence_threshold: float
    details: dict = field(repr=False)

    @property
    def diverged(self) -> bool:
        return any(r.distance > self.divergence_threshold for r in self.records)

    @property
    def max_distance(self) -> float:
        return max((r.distance for r in self.records), default=0.0)

    @property
    def witness_record(self) -> AttackRecord | None:
        for r in self.records:
            if r.distance > self.divergence_threshold:
                return r
        return None

    def distances_per_parameter(self) -> list:
        """Max recorded distance at each grid parameter, in grid order."""
        out = []
        for p in self.parameters:
            ds = [r.distance for r in self.records if r.requested_parameter == p]
            out.append(max(ds) if ds else float("nan"))
        return out

    def curve_rows(self) -> list:
        """(parameter, distance) rows for CSV plotting output."""
        return list(zip(self.parameters, self.distances_per_parameter()))

    def to_dict(self) -> dict:
        witness = self.witness_record
        body = {
            "estimator": self.estimator,
            "n": self.n,
            "k": self.k,
            "h": self.h,
            "m": self.m,
            "family": self.family,
            "grid": [float(p) for p in self.parameters],
            "distances": [float(d) for d in self.distances_per_parameter()],
            "diverged": self.diverged,
            "witness_gamma": None if witness is None else float(witness.parameter),
            "divergence_threshold": float(self.divergence_threshold),
            "seed": self.details.get("seed"),
            "details": {k: v for k, v in sorted(self.details.items())},
            "records": [r.to_dict() for r in self.records],
        }
        body["config_hash"] = config_digest(
            {
                "estimator": self.estimator,
                "family": self.family,
                "grid": body["grid"],
                "h": self.h,
                "m": self.m,
                "threshold": body["divergence_threshold"],
                "details": body["details"],
            }
        )
        return body


# ---------------------------------------------------------------------------
# Shear attack
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ShearFrame:
    facet: Facet
    kept: tuple  # h indices pinned on the hyperplane
    normal: np.ndarray = field(repr=False)
    level: float
    origin: np.ndarray = field(repr=False)


def _verify_tie_direction(
    X: DataSet, u: np.ndarray, kept: tuple, theta: np.ndarray, tol: float
):
    """Check u ties exactly the kept points at the minimal projection with
    the estimate strictly above; return (level, ok)."""
    proj = X.points @ u
    kept_list = list(kept)
    level = float(np.mean(proj[kept_list]))
    if np.abs(proj[kept_list] - level).max() > tol:
        return level, False
    others = np.setdiff1d(np.arange(X.n), kept_list, assume_unique=True)
    if others.size and np.min(proj[others] - level) <= tol:
        return level, False
    if float(u @ theta) - level <= tol:
        return level, False
    return level, True


def _cone_direction(
    X: DataSet,
    facets: list,
    kept: tuple,
    theta: np.ndarray,
    tol: float,
    seed: int,
    samples: int = 64,
) -> tuple | None:
    """Sample a verified direction in the normal cone of an h-point face."""
    incident = [f for f in facets if set(kept) <= set(f.indices)]
    if len(incident) < 2:
        return None
    normals = np.array([f.inward_normal for f in incident])
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        w = rng.dirichlet(np.ones(len(incident)))
        u = w @ normals
        norm = np.linalg.norm(u)
        if norm <= 1e-12:
            continue
        u = u / norm
        level, ok = _verify_tie_direction(X, u, kept, theta, tol)
        if ok:
            return u, level
    return None


def _shear_frames(
    X: DataSet,
    theta: np.ndarray,
    h: int,
    all_s_choices: bool,
    cone_seed: int,
    s_choice: tuple | None = None,
) -> list:
    """All workable (facet, kept-subset, direction) frames, best facet first.

    A facet whose halfspace strictly contains the estimate is exactly a
    k-data-point face of the hull of the data plus the estimate that does
    not contain the estimate; at least one always exists because the facet
    normals positively span the space. Working with the facets of X alone
    avoids degeneracies when the estimate lands on a data hyperplane.
    """
    tol = GP_RTOL * max(X.diameter, 1e-300)
    frames = []
    facets = enumerate_facets(X)
    admissible = [f for f in facets if f.margin_of(theta) > tol]
    admissible.sort(key=lambda f: (-f.margin_of(theta), f.indices))
    for facet in admissible:
        if s_choice is not None:
            if not set(s_choice) <= set(facet.indices):
                continue
            subsets = [tuple(sorted(s_choice))]
        elif all_s_choices:
            subsets = [tuple(s) for s in combinations(facet.indices, h)]
        else:
            subsets = [tuple(sorted(facet.indices)[:h])]
        for kept in subsets:
            if h == X.k:
                u = facet.inward_normal
                level, ok = _verify_tie_direction(X, u, kept, theta, tol)
                if not ok:
                    continue
            else:
                found = _cone_direction(X, facets, kept, theta, tol, seed=cone_seed)
                if found is None:
                    continue
                u, level = found
            origin = X.points[list(kept)].mean(axis=0)
            frames.append(_ShearFrame(facet, kept, u, level, origin))
    return frames


def _partition(X: DataSet, frame: _ShearFrame, m: int, b_rule: str) -> tuple:
    """Split the non-kept indices into (kept-out A, replaced B) with |B| = m."""
    rest = np.setdiff1d(np.arange(X.n), list(frame.kept), assume_unique=True)
    proj = X.points[rest] @ frame.normal - frame.level
    if b_rule == "largest_projection":
        order = np.lexsort((rest, -proj))
    else:
        order = np.lexsort((rest, proj))
    b_idx = np.sort(rest[order[:m]])
    a_idx = np.setdiff1d(rest, b_idx, assume_unique=True)
    return tuple(int(i) for i in a_idx), tuple(int(i) for i in b_idx)


class _ShearPositionScreen:
    """General-position test for shear-contaminated datasets, stable in gamma.

    Replacing points i in R by their shear images adds gamma * a_i * e2 to
    them (a_i is the point's offset along the pinned normal). In the
    difference matrix of any (k+1)-subset every row then reads
    dq_j + gamma * dc_j * e2, and since terms with two e2 rows vanish, the
    subset determinant is exactly linear: D0 + gamma * D1, with D0 and D1
    computed from original-scale quantities. Evaluating the raw coordinates
    instead would lose these determinants to cancellation around
    gamma ~ 1e6 (coordinates grow like gamma while the determinant stays
    put). The finitely many degenerate gamma values of the construction are
    exactly the roots -D0/D1.

    Thresholds are judged against the uncontaminated data diameter, for the
    same reason: the shear preserves determinants while stretching subset
    diameters without bound.
    """

    def __init__(self, X: DataSet):
        n, k = X.n, X.k
        pts = X.points
        self.k = k
        self.tol = GP_RTOL * max(X.diameter, 1e-300) ** k
        self.subsets = np.array(list(combinations(range(n), k + 1)), dtype=int)
        base = pts[self.subsets]  # (S, k+1, k)
        self.rows = base[:, 1:, :] - base[:, :1, :]  # (S, k, k)
        self.d0 = np.linalg.det(self.rows)

    def row_replacements(self, e2: np.ndarray) -> np.ndarray:
        """det of each subset's difference matrix with row j replaced by e2."""
        S, k = self.rows.shape[0], self.k
        M = np.empty((S, k))
        for j in range(k):
            mod = self.rows.copy()
            mod[:, j, :] = e2
            M[:, j] = np.linalg.det(mod)
        return M

    def linear_coeff(self, M: np.ndarray, c: np.ndarray) -> np.ndarray:
        """D1 per subset for displacement coefficients c (zero off the
        replaced set)."""
        cs = c[self.subsets]  # (S, k+1)
        dc = cs[:, 1:] - cs[:, :1]  # (S, k)
        return (dc * M).sum(axis=1)

    def gamma_ok(self, gamma: float, d1_list) -> tuple:
        for d1 in d1_list:
            vals = np.abs(self.d0 + gamma * d1)
            j = int(np.argmin(vals))
            if vals[j] <= self.tol:
                return False, tuple(int(i) for i in self.subsets[j])
        return True, None


def _run_shear_sweep(
    T: LocationEstimator,
    X: DataSet,
    baseline: EstimateSet,
    frame: _ShearFrame,
    m: int,
    gamma_grid,
    b_rule: str,
    threshold: float,
    seed: int | None,
    screen: _ShearPositionScreen | None = None,
) -> AttackTrace:
    n, k = X.n, X.k
    a_idx, b_idx = _partition(X, frame, m, b_rule)
    include_preimage_family = 0 < len(a_idx) <= m
    basis = basis_from_normal(frame.normal, frame.origin)
    pts = X.points

    screen = screen or _ShearPositionScreen(X)
    row_dets = screen.row_replacements(basis.e(2))
    offsets = pts @ frame.normal - frame.level
    c_far = np.zeros(n)
    c_far[list(b_idx)] = offsets[list(b_idx)]
    d1_list = [screen.linear_coeff(row_dets, c_far)]
    if include_preimage_family:
        c_near = np.zeros(n)
        c_near[list(a_idx)] = -offsets[list(a_idx)]
        d1_list.append(screen.linear_coeff(row_dets, c_near))

    def image_of(g: float, indices) -> np.ndarray:
        return shear_transform(g, basis).apply(pts[list(indices)])

    records = []
    for gamma in gamma_grid:
        g_used = None
        witness = None
        for g in (float(gamma), float(gamma) * (1.0 + _NUDGE_REL)):
            ok, witness = screen.gamma_ok(g, d1_list)
            if ok:
                g_used = g
                break
        if g_used is None:
            raise GeneralPositionError(
                f"contaminated dataset not in general position even after nudging gamma={gamma!r}",
                witness=witness,
            )
        Xb = X.with_replaced(b_idx, image_of(g_used, b_idx))
        est_b = T(Xb)
        records.append(
            AttackRecord(
                family="shear_replace_far",
                parameter=g_used,
                requested_parameter=float(gamma),
                replaced_indices=b_idx,
                estimate=est_b,
                distance=estimate_set_distance(est_b, baseline),
            )
        )
        if include_preimage_family:
            Xa = X.with_replaced(a_idx, image_of(-g_used, a_idx))
            _check_preimage_identity(Xb, Xa, g_used, basis, offsets, frame.kept)
            est_a = T(Xa)
            records.append(
                AttackRecord(
                    family="shear_replace_near",
                    parameter=g_used,
                    requested_parameter=float(gamma),
                    replaced_indices=a_idx,
                    estimate=est_a,
                    distance=estimate_set_distance(est_a, baseline),
                )
            )
    details = {
        "facet": list(frame.facet.indices),
        "kept": list(frame.kept),
        "kept_out": list(a_idx),
        "replaced_far": list(b_idx),
        "normal": [float(v) for v in frame.normal],
        "level": float(frame.level),
        "origin": [float(v) for v in frame.origin],
        "b_rule": b_rule,
        "seed": seed,
        "preimage_family_included": include_preimage_family,
    }
    return AttackTrace(
        family="shear",
        estimator=T.name,
        n=n,
        k=k,
        m=m,
        h=len(frame.kept),
        parameters=tuple(float(g) for g in gamma_grid),
        records=tuple(records),
        divergence_threshold=threshold,
        details=details,
    )


def _check_preimage_identity(
    Xb: DataSet,
    Xa: DataSet,
    gamma: float,
    basis,
    offsets: np.ndarray,
    kept,
) -> None:
    """The far-replacement dataset must be the shear image of the
    near-replacement dataset, row for row. Checked on every sweep step.

    The identity is exact coefficient algebra once points are written as
    q_i + gamma * c_i * e2: applying the shear adds gamma * a_i * e2 (the
    normal offset a_i is shear-invariant because e1 is orthogonal to e2),
    and the coefficients then match term by term. Two things can actually
    break and are verified here at 1e-9: the stored basis orthogonality,
    and the pinned points' residual offsets (scaled by gamma). A direct
    coordinate comparison of the generated arrays is kept as a guard
    against bookkeeping bugs, but at a conditioning-aware tolerance:
    recovering a preimage's offset from coordinates of magnitude
    gamma * scale carries an unavoidable error of order eps * gamma, which
    exceeds 1e-9 relative once gamma is beyond about 1e6.
    """
    e1, e2 = basis.e(1), basis.e(2)
    blown = max(1.0, float(np.abs(Xb.points).max()), float(np.abs(Xa.points).max()))
    orth = abs(float(e1 @ e2))
    if orth > 1e-12:
        raise RoblocError(f"shear basis lost orthogonality: |e1.e2| = {orth:.3e}")
    pinned_travel = abs(gamma) * float(np.abs(offsets[list(kept)]).max())
    if pinned_travel > _IDENTITY_RTOL * blown:
        raise RoblocError(
            f"pinned points travel {pinned_travel:.3e} under the shear, beyond "
            f"{_IDENTITY_RTOL * blown:.3e}"
        )
    g = shear_transform(gamma, basis)
    diff = float(np.abs(g.apply(Xa.points) - Xb.points).max())
    eps = float(np.finfo(float).eps)
    bound = max(_IDENTITY_RTOL, 8.0 * eps * abs(gamma)) * blown
    if diff > bound:
        raise RoblocError(
            f"shear families lost their preimage identity: max deviation {diff:.3e} > {bound:.3e}"
        )


def shear_attack(
    T: LocationEstimator,
    X: DataSet,
    h: int,
    gamma_grid=DEFAULT_GAMMA_GRID,
    partition_rule: PartitionRule = PartitionRule(),
    m: int | None = None,
    divergence_threshold: float | None = None,
    cone_seed: int = 0,
) -> AttackTrace:
    """Run the hyperplane-fixing shear contamination against an estimator.

    Construction: pin h points of a hull facet whose halfspace strictly
    contains the original estimate (facets tried in decreasing clearance
    until one admits a verified tie direction), shear everything else
    parallel to the pinned hyperplane, and for each gamma build both dual
    families: replace the m points farthest along the normal by their
    sheared images, and -- when it fits the same budget -- replace the
    remaining points by their inverse-sheared preimages. Gamma values that
    break general position are nudged once by +1e-6 relative.

    ``m`` defaults to floor((n - h + 1) / 2), the largest budget for which
    both families stay within m replacements.
    """
    require_general_position(X, "shear_attack")
    if X.k < 2:
        raise ParameterError("shear attack requires k >= 2")
    if not (1 <= h <= X.k):
        raise ParameterError(f"need 1 <= h <= k, got h={h}")
    if len(tuple(gamma_grid)) == 0:
        raise ParameterError("gamma grid must be nonempty")
    n = X.n
    m_eff = (n - h + 1) // 2 if m is None else int(m)
    if not (1 <= m_eff <= n - h):
        raise ParameterError(f"need 1 <= m <= n - h = {n - h}, got m={m_eff}")
    baseline = T(X)
    theta = baseline.canonical
    frames = _shear_frames(
        X, theta, h, all_s_choices=False, cone_seed=cone_seed, s_choice=partition_rule.s_choice
    )
    if not frames:
        raise NoFacetAdmitsEstimateError(T.name)
    threshold = (
        DEFAULT_THRESHOLD_FACTOR * max(X.diameter, 1e-300)
        if divergence_threshold is None
        else float(divergence_threshold)
    )
    return _run_shear_sweep(
        T, X, baseline, frames[0], m_eff, tuple(gamma_grid), partition_rule.b_rule, threshold, cone_seed
    )


class NoFacetAdmitsEstimateError(RoblocError):
    """The estimate cleared no facet halfspace: it sits on or outside every
    supporting hyperplane, so no shear frame exists."""

    def __init__(self, estimator_name: str):
        super().__init__(
            f"estimator {estimator_name!r}: no hull facet strictly contains the "
            "estimate in its halfspace; cannot anchor a shear frame"
        )


# ---------------------------------------------------------------------------
# Translation cluster attack
# ---------------------------------------------------------------------------


def translation_cluster_attack(
    T: LocationEstimator,
    X: DataSet,
    m: int,
    radius_grid=DEFAULT_RADIUS_GRID,
    direction=None,
    divergence_threshold: float | None = None,
) -> AttackTrace:
    """Replace the m points farthest along a direction with a distant cluster.

    The cluster sits at the original estimate plus radius times the
    direction, with deterministic per-copy jitter of relative size 1e-6
    cycling through the coordinate axes so the copies do not create exact
    degeneracies on their own.
    """
    n, k = X.n, X.k
    if m < 0 or m > n:
        raise ParameterError(f"need 0 <= m <= n, got m={m}")
    if direction is None:
        direction = np.eye(k)[0]
    u = unit_direction(direction)
    baseline = T(X)
    theta = baseline.canonical
    scores = X.points @ u
    order = np.lexsort((np.arange(n), -scores))
    replaced = tuple(int(i) for i in np.sort(order[:m]))
    threshold = (
        DEFAULT_THRESHOLD_FACTOR * max(X.diameter, 1e-300)
        if divergence_threshold is None
        else float(divergence_threshold)
    )
    records = []
    for radius in radius_grid:
        R = float(radius)
        cluster = np.empty((m, k))
        for i in range(m):
            jitter = np.zeros(k)
            jitter[i % k] = _NUDGE_REL * R * (i + 1)
            cluster[i] = theta + R * u + jitter
        Xc = X.with_replaced(replaced, cluster) if m > 0 else X
        est = T(Xc)
        records.append(
            AttackRecord(
                family="cluster",
                parameter=R,
                requested_parameter=R,
                replaced_indices=replaced,
                estimate=est,
                distance=estimate_set_distance(est, baseline),
            )
        )
    details = {
        "direction": [float(v) for v in u],
        "anchor": [float(v) for v in theta],
        "seed": None,
    }
    return AttackTrace(
        family="cluster",
        estimator=T.name,
        n=n,
        k=k,
        m=m,
        h=None,
        parameters=tuple(float(r) for r in radius_grid),
        records=tuple(records),
        divergence_threshold=threshold,
        details=details,
    )


# ---------------------------------------------------------------------------
# Empirical breakdown certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AttackSuite:
    """Configuration of the certification sweep."""

    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    radius_grid: tuple = DEFAULT_RADIUS_GRID
    h_values: tuple | None = None  # default: 1..k
    cluster_directions: tuple | None = None  # default: +/- each axis
    partition_rules: tuple = ("largest_projection", "smallest_projection")
    all_s_choices: bool = True
    cone_seed: int = 0
    stop_m_on_divergence: bool = True

    def resolved_h_values(self, k: int) -> tuple:
        if self.h_values is not None:
            return tuple(self.h_values)
        return tuple(range(1, k + 1))

    def resolved_directions(self, k: int) -> tuple:
        if self.cluster_directions is not None:
            return tuple(tuple(float(v) for v in d) for d in self.cluster_directions)
        eye = np.eye(k)
        dirs = [tuple(row) for row in eye] + [tuple(-row) for row in eye]
        return tuple(dirs)

    def to_dict(self) -> dict:
        return {
            "gamma_grid": [float(g) for g in self.gamma_grid],
            "radius_grid": [float(r) for r in self.radius_grid],
            "h_values": None if self.h_values is None else list(self.h_values),
            "cluster_directions": None
            if self.cluster_directions is None
            else [list(d) for d in self.cluster_directions],
            "partition_rules": list(self.partition_rules),
            "all_s_choices": self.all_s_choices,
            "cone_seed": self.cone_seed,
            "stop_m_on_divergence": self.stop_m_on_divergence,
        }


@dataclass(frozen=True)
class BreakdownCertificate:
    """Verdict for one replacement budget m."""

    m: int
    n: int
    status: str  # "broken" | "survived"
    attack_families_tried: tuple
    max_distance: float
    witness: AttackTrace | None

    def to_dict(self) -> dict:
        d = {
            "m": self.m,
            "n": self.n,
            "status": self.status,
            "attack_families_tried": list(self.attack_families_tried),
            "max_distance": float(self.max_distance),
        }
        if self.witness is not None:
            w = self.witness.witness_record
            d["witness"] = self.witness.to_dict()
            d["witness_parameter"] = None if w is None else float(w.parameter)
        else:
            d["witness"] = None
            d["note"] = SURVIVED_MARKER
        return d


@dataclass(frozen=True)
class FsbvResult:
    """Smallest certified breakdown fraction plus the per-m evidence."""

    estimator: str
    n: int
    k: int
    fraction: tuple | None  # (numerator, denominator), unreduced
    certificates: dict
    threshold_factor: float
    suite: AttackSuite

    @property
    def survived_all(self) -> bool:
        return self.fraction is None

    def to_dict(self) -> dict:
        body = {
            "estimator": self.estimator,
            "n": self.n,
            "k": self.k,
            "fraction": None if self.fraction is None else list(self.fraction),
            "marker": SURVIVED_MARKER if self.fraction is None else "broken",
            "threshold_factor": float(self.threshold_factor),
            "suite": self.suite.to_dict(),
            "certificates": {str(m): c.to_dict() for m, c in sorted(self.certificates.items())},
        }
        body["config_hash"] = config_digest(
            {
                "estimator": self.estimator,
                "n": self.n,
                "k": self.k,
                "threshold_factor": body["threshold_factor"],
                "suite": body["suite"],
            }
        )
        return body


def empirical_fsbv(
    T: LocationEstimator,
    X: DataSet,
    suite: AttackSuite | None = None,
    threshold_factor: float = DEFAULT_THRESHOLD_FACTOR,
) -> FsbvResult:
    """Sweep replacement budgets m = 1..ceil(n/2) through the attack suite.

    For each m the suite runs every shear frame (all admissible facets, all
    kept-subset choices, both partition rules, both dual families when they
    fit the budget) and the translation cluster attack along each configured
    direction. The certified fraction is the smallest m whose certificate is
    "broken", as the unreduced pair (m, n); when nothing breaks the result
    carries the survived marker instead of a fabricated fraction.
    """
    if threshold_factor < 1e3:
        raise ParameterError("threshold_factor must be at least 1e3 to mean anything")
    suite = suite or AttackSuite()
    n, k = X.n, X.k
    threshold = threshold_factor * max(X.diameter, 1e-300)
    baseline = T(X)
    theta = baseline.canonical

    frames_by_h: dict[int, list] = {}
    screen = None
    if k >= 2:
        require_general_position(X, "empirical_fsbv")
        screen = _ShearPositionScreen(X)
        for h in suite.resolved_h_values(k):
            frames_by_h[h] = _shear_frames(
                X, theta, h, all_s_choices=suite.all_s_choices, cone_seed=suite.cone_seed
            )

    certificates = {}
    first_broken = None
    for m in range(1, -(-n // 2) + 1):
        families = []
        max_distance = 0.0
        witness = None
        for h, frames in frames_by_h.items():
            if m > n - h:
                continue
            for frame in frames:
                for b_rule in suite.partition_rules:
                    trace = _run_shear_sweep(
                        T, X, baseline, frame, m, suite.gamma_grid, b_rule, threshold,
                        suite.cone_seed, screen=screen,
                    )
                    families.append(f"shear(h={h},facet={frame.facet.indices},rule={b_rule})")
                    max_distance = max(max_distance, trace.max_distance)
                    if trace.diverged and witness is None:
                        witness = trace
                    if witness is not None and suite.stop_m_on_divergence:
                        break
                if witness is not None and suite.stop_m_on_divergence:
                    break
            if witness is not None and suite.stop_m_on_divergence:
                break
        if witness is None or not suite.stop_m_on_divergence:
            for direction in suite.resolved_directions(k):
                trace = translation_cluster_attack(
                    T, X, m, suite.radius_grid, direction, divergence_threshold=threshold
                )
                families.append(f"cluster(direction={direction})")
                max_distance = max(max_distance, trace.max_distance)
                if trace.diverged and witness is None:
                    witness = trace
                if witness is not None and suite.stop_m_on_divergence:
                    break
        status = "broken" if witness is not None else "survived"
        certificates[m] = BreakdownCertificate(
            m=m,
            n=n,
            status=status,
            attack_families_tried=tuple(families),
            max_distance=max_distance,
            witness=witness,
        )
        if status == "broken" and first_broken is None:
            first_broken = m
    return FsbvResult(
        estimator=T.name,
        n=n,
        k=k,
        fraction=None if first_broken is None else (first_broken, n),
        certificates=certificates,
        threshold_factor=threshold_factor,
        suite=suite,
    )


# ---------------------------------------------------------------------------
# Projection-median counterexample generator
# ---------------------------------------------------------------------------


def pm_counterexample(m: int, delta: float, noise_scale: float = 0.1, seed: int = 0) -> DataSet:
    """Bivariate dataset on which the projection median collapses to the
    origin as delta shrinks.

    Two anchor points sit at (0, +/-delta). m points lie near the diagonal
    y = x with abscissas equispaced on [10, 20] and ordinates x_i plus
    delta times bounded noise; their m mirror images across the x-axis lie
    near y = -x. The n = 2m + 2 points are redrawn until they pass the
    general-position test.
    """
    if m < 2:
        raise ParameterError(f"need m >= 2, got {m}")
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"need 0 < delta < 1, got {delta}")
    if noise_scale <= 0.0:
        raise ParameterError(f"need noise_scale > 0, got {noise_scale}")
    rng = np.random.default_rng(seed)
    xs = np.linspace(10.0, 20.0, m)
    for _ in range(200):
        noise = rng.uniform(-noise_scale, noise_scale, size=m)
        ys = xs + delta * noise
        pts = np.vstack(
            [
                [0.0, delta],
                [0.0, -delta],
                np.column_stack([xs, ys]),
                np.column_stack([xs, -ys]),
            ]
        )
        X = DataSet(pts)
        if check_general_position(X).ok:
            return X
    raise GeneralPositionError(
        f"counterexample generator exhausted its redraw budget (m={m}, delta={delta})"
    )
