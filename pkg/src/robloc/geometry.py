"""Convex-hull facets, general-position tests, orthonormal bases, shear maps.

Everything here is brute force by design: at desk scale (n <= 20, k <= 4)
exhaustive subset enumeration is fast and trustworthy enough to serve as its
own oracle, and the attack machinery built on top needs geometric answers it
can rely on, not approximations.

Tolerances are relative. Exact general position is a measure-one property of
continuous data; the floating-point stand-in used throughout is a threshold
of ``1e-9`` times the relevant diameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .dataset import DataSet
from .errors import GeneralPositionError, ParameterError

__all__ = [
    "GP_RTOL",
    "GeneralPositionReport",
    "check_general_position",
    "Facet",
    "enumerate_facets",
    "hyperplane_normal",
    "unit_direction",
    "OrthonormalBasis",
    "basis_from_normal",
    "AffineMap",
    "shear_transform",
    "apply_map",
]

GP_RTOL = 1e-9

# Unit vectors are accepted if their norm is within this of 1.
_UNIT_ATOL = 1e-12
# Orthonormal bases must have Gram residual below this.
_GRAM_ATOL = 1e-10


class GeneralPositionReport(NamedTuple):
    ok: bool
    witness: tuple | None

    def __bool__(self):
        return self.ok


def unit_direction(u) -> np.ndarray:
    """Validate and return a unit vector (norm within 1e-12 of 1)."""
    u = np.asarray(u, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > _UNIT_ATOL:
        raise ParameterError(f"direction is not unit-norm (|u| = {norm!r})")
    return u


def check_general_position(X: DataSet, reference_diameter: float | None = None) -> GeneralPositionReport:
    """Test whether no k+1 points of X lie on a common affine hyperplane.

    Every (k+1)-subset is tested for affine independence via the determinant
    of its k x k difference matrix, with threshold ``1e-9`` relative to the
    subset diameter (the determinant scales like diameter**k, so the
    comparison is scale-free). Returns ``(ok, witness)`` where ``witness``
    is one violating index subset when ``ok`` is false.

    ``reference_diameter`` pins the threshold scale instead of using each
    subset's own diameter. The contamination engine needs this: a shear
    preserves every subset determinant while stretching subset diameters
    without bound, so the subset-relative test would reject arbitrarily
    large shears that are in exact general position. Degeneracy of a
    contaminated set is judged at the scale of the data it came from.

    Attack sweeps re-test every contaminated dataset, so the subset loop is
    batched through numpy.
    """
    pts = X.points
    n, k = X.n, X.k
    if n < k + 1:
        return GeneralPositionReport(True, None)
    subsets = np.array(list(combinations(range(n), k + 1)), dtype=int)  # (S, k+1)
    groups = pts[subsets]  # (S, k+1, k)
    diffs = groups[:, 1:, :] - groups[:, :1, :]  # (S, k, k)
    dets = np.abs(np.linalg.det(diffs))
    if reference_diameter is None:
        pair = groups[:, :, None, :] - groups[:, None, :, :]
        diams = np.sqrt((pair * pair).sum(axis=3)).max(axis=(1, 2))
    else:
        diams = np.full(len(subsets), float(reference_diameter))
    bad = dets <= GP_RTOL * diams**k
    if np.any(bad):
        witness = tuple(int(i) for i in subsets[int(np.flatnonzero(bad)[0])])
        return GeneralPositionReport(False, witness)
    return GeneralPositionReport(True, None)


def require_general_position(X: DataSet, context: str = "operation") -> None:
    report = check_general_position(X)
    if not report.ok:
        raise GeneralPositionError(
            f"{context} requires general position; points {report.witness} lie on a common hyperplane",
            witness=report.witness,
        )


def _subset_diameter(pts: np.ndarray) -> float:
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2)).max())


def hyperplane_normal(pts: np.ndarray) -> np.ndarray:
    """Unit normal of the affine hyperplane spanned by k points in R^k.

    Computed as the smallest right singular vector of the difference matrix;
    the sign is canonicalized so the first nonzero component is positive.
    Raises if the points do not span a full (k-1)-dimensional hyperplane.
    """
    pts = np.asarray(pts, dtype=float)
    k = pts.shape[1]
    if pts.shape[0] != k:
        raise ParameterError(f"need exactly k={k} points, got {pts.shape[0]}")
    if k == 1:
        return np.array([1.0])
    diffs = pts[1:] - pts[0]
    scale = max(1.0, float(np.abs(diffs).max()))
    _, svals, vt = np.linalg.svd(diffs)
    if svals.size < k - 1 or svals[-1] <= 1e-12 * scale:
        raise GeneralPositionError("points are affinely dependent; hyperplane is not unique")
    normal = vt[-1]
    nz = np.flatnonzero(np.abs(normal) > 1e-14)
    if nz.size and normal[nz[0]] < 0:
        normal = -normal
    return normal / np.linalg.norm(normal)


@dataclass(frozen=True)
class Facet:
    """A hull face spanned by exactly k data points.

    ``inward_normal`` points toward the rest of the data; ``support_value``
    is the common projection of the facet points onto that normal, so every
    non-facet point projects strictly above it.
    """

    indices: tuple
    inward_normal: np.ndarray = field(repr=False)
    support_value: float

    def margin_of(self, x) -> float:
        """Signed distance of a point above the facet hyperplane."""
        return float(self.inward_normal @ np.asarray(x, dtype=float) - self.support_value)


def enumerate_facets(X: DataSet) -> list[Facet]:
    """Enumerate all hull facets of a general-position dataset.

    Brute force over all C(n, k) point subsets: a subset spans a facet iff
    every other point lies strictly on one side of its hyperplane. Strictness
    threshold is ``1e-9`` times the data diameter. A non-facet point landing
    on a subset hyperplane within tolerance is a general-position violation
    and raises.
    """
    n, k = X.n, X.k
    if k < 2:
        raise ParameterError("facet enumeration requires k >= 2")
    if n <= k:
        raise ParameterError(f"facet enumeration requires n > k, got n={n}, k={k}")
    pts = X.points
    tol = GP_RTOL * max(X.diameter, 1e-300)
    facets = []
    for subset in combinations(range(n), k):
        idx = list(subset)
        try:
            normal = hyperplane_normal(pts[idx])
        except GeneralPositionError:
            raise GeneralPositionError(
                f"facet points {subset} are affinely dependent", witness=subset
            ) from None
        support = float(np.mean(pts[idx] @ normal))
        others = np.setdiff1d(np.arange(n), idx, assume_unique=True)
        side = pts[others] @ normal - support
        on_plane = np.abs(side) <= tol
        if np.any(on_plane):
            extra = int(others[np.flatnonzero(on_plane)[0]])
            raise GeneralPositionError(
                f"point {extra} lies on the hyperplane through {subset}",
                witness=tuple(sorted(subset + (extra,))),
            )
        if np.all(side > tol):
            facets.append(Facet(tuple(subset), normal, support))
        elif np.all(side < -tol):
            facets.append(Facet(tuple(subset), -normal, -support))
    return facets


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal vectors e_1..e_k plus the origin they are anchored at.

    ``vectors`` holds e_i in its columns. ``origin_shift`` places the
    reference hyperplane {x : e_1 . (x - origin_shift) = 0} through zero in
    basis coordinates.
    """

    vectors: np.ndarray = field(repr=False)
    origin_shift: np.ndarray = field(repr=False)

    def __post_init__(self):
        E = np.asarray(self.vectors, dtype=float)
        o = np.asarray(self.origin_shift, dtype=float).reshape(-1)
        k = E.shape[0]
        if E.shape != (k, k) or o.shape != (k,):
            raise ParameterError("basis must be k x k with a k-vector origin")
        gram = E.T @ E - np.eye(k)
        if np.abs(gram).max() > _GRAM_ATOL:
            raise ParameterError(
                f"basis is not orthonormal (Gram residual {np.abs(gram).max():.2e})"
            )
        E = E.copy()
        E.setflags(write=False)
        o = o.copy()
        o.setflags(write=False)
        object.__setattr__(self, "vectors", E)
        object.__setattr__(self, "origin_shift", o)

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    def e(self, i: int) -> np.ndarray:
        """Basis vector e_i, 1-indexed."""
        return self.vectors[:, i - 1]

    def to_coords(self, x) -> np.ndarray:
        return self.vectors.T @ (np.asarray(x, dtype=float) - self.origin_shift)

    def from_coords(self, c) -> np.ndarray:
        return self.vectors @ np.asarray(c, dtype=float) + self.origin_shift


def basis_from_normal(u, origin) -> OrthonormalBasis:
    """Complete a unit direction u to an orthonormal basis with e_1 = u.

    Deterministic completion: the remaining vectors come from Gram-Schmidt
    on the standard axes, visited in order of increasing |u_i| so the axis
    most parallel to u is considered last (and dropped). Modified
    Gram-Schmidt keeps the Gram residual at machine precision.
    """
    u = unit_direction(u)
    k = u.size
    origin = np.asarray(origin, dtype=float).reshape(k)
    if k == 2:
        # The quarter-turn of u is orthogonal to it *exactly* in floating
        # point (the two products in the dot cancel bit for bit), which the
        # shear algebra downstream relies on at extreme slopes.
        return OrthonormalBasis(np.column_stack([u, [-u[1], u[0]]]), origin)
    cols = [u]
    order = np.argsort(np.abs(u), kind="stable")
    for axis in order:
        if len(cols) == k:
            break
        v = np.zeros(k)
        v[axis] = 1.0
        for b in cols:
            v = v - (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            cols.append(v / norm)
    if len(cols) != k:
        raise ParameterError("could not complete basis; direction is degenerate")
    return OrthonormalBasis(np.column_stack(cols), origin)


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + offset with a nonsingular matrix.

    Nonsingularity is checked on the row-equilibrated matrix so the test is
    insensitive to overall scale: |det| of the row-max-scaled matrix must
    exceed 1e-12.
    """

    matrix: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.offset, dtype=float).reshape(-1)
        k = b.size
        if M.shape != (k, k):
            raise ParameterError(f"matrix shape {M.shape} does not match offset length {k}")
        row_max = np.abs(M).max(axis=1)
        if np.any(row_max == 0.0) or abs(np.linalg.det(M / row_max[:, None])) <= 1e-12:
            raise ParameterError("affine map matrix is singular")
        M = M.copy()
        M.setflags(write=False)
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", b)

    @property
    def k(self) -> int:
        return self.offset.size

    def apply(self, x) -> np.ndarray:
        """Apply to a point (k,) or stack of points (n, k)."""
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T + self.offset

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: (self.compose(other))(x) == self(other(x))."""
        return AffineMap(self.matrix @ other.matrix, self.matrix @ other.offset + self.offset)

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.matrix)
        return AffineMap(inv, -inv @ self.offset)

    @staticmethod
    def identity(k: int) -> "AffineMap":
        return AffineMap(np.eye(k), np.zeros(k))

    @staticmethod
    def translation(b) -> "AffineMap":
        b = np.asarray(b, dtype=float).reshape(-1)
        return AffineMap(np.eye(b.size), b)


def _trusted_affine(matrix: np.ndarray, offset: np.ndarray) -> AffineMap:
    """Construct an AffineMap bypassing the singularity guard.

    Only for maps nonsingular by construction: the guard compares a
    row-scaled determinant against 1e-12, which any scale-free measure must
    fail for extreme shears (condition number gamma^2) even though their
    determinant is exactly 1.
    """
    m = AffineMap.__new__(AffineMap)
    M = np.asarray(matrix, dtype=float).copy()
    M.setflags(write=False)
    b = np.asarray(offset, dtype=float).reshape(-1).copy()
    b.setflags(write=False)
    object.__setattr__(m, "matrix", M)
    object.__setattr__(m, "offset", b)
    return m


def shear_transform(gamma: float, basis: OrthonormalBasis) -> AffineMap:
    """The volume-preserving shear that fixes the basis hyperplane.

    In basis coordinates the map sends e_1 to e_1 + gamma * e_2 and fixes
    e_j for j != 1. In ambient coordinates that is the rank-one update
    I + gamma * e_2 e_1^T, anchored at the basis origin so the hyperplane
    through the origin with normal e_1 is pointwise fixed. The matrix has
    determinant exactly 1 (it is unipotent), and a point with
    e_1-coordinate c travels a distance |gamma| * |c|.
    """
    k = basis.k
    if k < 2:
        raise ParameterError("shear transform requires k >= 2")
    g = float(gamma)
    e1 = basis.e(1)
    e2 = basis.e(2)
    M = np.eye(k) + g * np.outer(e2, e1)
    offset = -g * float(e1 @ basis.origin_shift) * e2
    return _trusted_affine(M, offset)


def apply_map(g: AffineMap, X: DataSet) -> DataSet:
    """Pointwise image of a dataset under an affine map."""
    if g.k != X.k:
        raise ParameterError(f"map dimension {g.k} does not match data dimension {X.k}")
    return DataSet(g.apply(X.points))
