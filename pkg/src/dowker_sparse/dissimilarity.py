"""Dowker dissimilarities: construction, sampling and truncation.

A dissimilarity is a dense grid of extended non-negative reals indexed by a
finite landmark set L (rows) and witness set W (columns).  No symmetry or
triangle inequality is assumed.  All operations here are pure functions of
their inputs; values are never mutated after construction.
"""

from dataclasses import dataclass

import numpy as np

from .extreal import INF
from .translations import TranslationFunction, evaluate, evaluate_array


@dataclass(frozen=True, eq=False)
class DowkerDissimilarity:
    """values[i, j] is the scale at which witness j starts witnessing landmark i."""

    landmark_ids: tuple
    witness_ids: tuple
    values: np.ndarray

    def __post_init__(self):
        lids = tuple(self.landmark_ids)
        wids = tuple(self.witness_ids)
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2:
            raise ValueError("dissimilarity values must form a 2-d grid")
        n, m = arr.shape
        if n < 1 or m < 1:
            raise ValueError("landmark and witness sets must be non-empty")
        if len(lids) != n or len(wids) != m:
            raise ValueError("id lists do not match the value grid shape")
        if len(set(lids)) != n:
            raise ValueError("duplicate landmark ids")
        if len(set(wids)) != m:
            raise ValueError("duplicate witness ids")
        if np.isnan(arr).any():
            i, j = map(int, np.argwhere(np.isnan(arr))[0])
            raise ValueError(f"NaN entry at ({i},{j})")
        if (arr < 0).any():
            i, j = map(int, np.argwhere(arr < 0)[0])
            raise ValueError(f"negative entry at ({i},{j})")
        arr.flags.writeable = False
        object.__setattr__(self, "landmark_ids", lids)
        object.__setattr__(self, "witness_ids", wids)
        object.__setattr__(self, "values", arr)

    @property
    def n_landmarks(self) -> int:
        return self.values.shape[0]

    @property
    def n_witnesses(self) -> int:
        return self.values.shape[1]

    @property
    def is_square(self) -> bool:
        """True when L = W as ordered id sets."""
        return self.landmark_ids == self.witness_ids

    def __eq__(self, other):
        if not isinstance(other, DowkerDissimilarity):
            return NotImplemented
        return (self.landmark_ids == other.landmark_ids
                and self.witness_ids == other.witness_ids
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class SampleOrder:
    """A total order on landmark positions with per-landmark insertion radius.

    order[0] is the seed; insertion_radius is indexed by landmark position,
    not by rank in the order, and is infinite at the seed.
    """

    order: tuple[int, ...]
    insertion_radius: tuple[float, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        radius = tuple(float(r) for r in self.insertion_radius)
        if sorted(order) != list(range(len(order))):
            raise ValueError("order must be a permutation of landmark positions")
        if len(radius) != len(order):
            raise ValueError("insertion_radius must cover every landmark")
        if radius[order[0]] != INF:
            raise ValueError("insertion radius at the seed must be infinite")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "insertion_radius", radius)


@dataclass(frozen=True)
class TruncationFunction:
    """Per-landmark truncation bound T(l) in [0, inf]."""

    bound: tuple[float, ...]

    def __post_init__(self):
        bound = tuple(float(b) for b in self.bound)
        for i, b in enumerate(bound):
            if np.isnan(b) or b < 0:
                raise ValueError(f"truncation bound at landmark {i} must lie in [0, inf]")
        object.__setattr__(self, "bound", bound)


def from_distance_matrix(matrix) -> DowkerDissimilarity:
    """Dissimilarity with L = W from a square symmetric distance matrix."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"non-square matrix of shape {arr.shape}")
    n = arr.shape[0]
    if n < 1:
        raise ValueError("matrix must be at least 1x1")
    if np.isnan(arr).any():
        i, j = map(int, np.argwhere(np.isnan(arr))[0])
        raise ValueError(f"NaN entry at ({i},{j})")
    if (arr < 0).any():
        i, j = map(int, np.argwhere(arr < 0)[0])
        raise ValueError(f"negative entry at ({i},{j})")
    diag = np.diagonal(arr)
    if (diag != 0).any():
        i = int(np.argwhere(diag != 0)[0][0])
        raise ValueError(f"nonzero diagonal at ({i},{i})")
    for i in range(n):
        for j in range(i + 1, n):
            if arr[i, j] != arr[j, i]:
                raise ValueError(f"asymmetric at ({i},{j})")
    ids = tuple(str(i) for i in range(n))
    return DowkerDissimilarity(ids, ids, arr)


def from_point_cloud(points, landmark_indices=None) -> DowkerDissimilarity:
    """Euclidean dissimilarity with W = all points and L a subset (default all)."""
    try:
        pts = np.array(points, dtype=float)
    except ValueError as exc:
        raise ValueError(f"ragged coordinates: {exc}") from exc
    if pts.ndim != 2:
        raise ValueError("ragged coordinates: points must share one dimension")
    m = pts.shape[0]
    if m < 1:
        raise ValueError("need at least one point")
    if landmark_indices is None:
        lsel = list(range(m))
    else:
        lsel = [int(i) for i in landmark_indices]
        if not lsel:
            raise ValueError("empty landmark set")
        if len(set(lsel)) != len(lsel):
            raise ValueError("duplicate landmark indices")
        for i in lsel:
            if not 0 <= i < m:
                raise ValueError(f"landmark index {i} out of range")
    diff = pts[lsel][:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    lids = tuple(str(i) for i in lsel)
    wids = tuple(str(i) for i in range(m))
    return DowkerDissimilarity(lids, wids, dist)


def farthest_point_sample(lam: DowkerDissimilarity, seed: int = 0) -> SampleOrder:
    """Greedy max-min order on a square dissimilarity, starting from seed.

    At each step the next landmark maximises the distance to the chosen
    prefix (ties broken by smallest landmark position); its insertion radius
    is that max-min value.
    """
    if not lam.is_square:
        raise ValueError("farthest_point_sample needs a square dissimilarity (L = W)")
    n = lam.n_landmarks
    seed = int(seed)
    if not 0 <= seed < n:
        raise ValueError(f"seed landmark {seed} out of range")
    order = [seed]
    radius = [0.0] * n
    radius[seed] = INF
    # running min over prefix rows, per candidate column
    mindist = lam.values[seed].copy()
    chosen = np.zeros(n, dtype=bool)
    chosen[seed] = True
    for _ in range(n - 1):
        masked = np.where(chosen, -INF, mindist)
        nxt = int(np.argmax(masked))
        order.append(nxt)
        radius[nxt] = float(mindist[nxt])
        chosen[nxt] = True
        mindist = np.minimum(mindist, lam.values[nxt])
    return SampleOrder(tuple(order), tuple(radius))


def cover_dissimilarity(lam: DowkerDissimilarity, alpha: TranslationFunction,
                        base: int = 0) -> DowkerDissimilarity:
    """Square landmark-by-landmark dissimilarity measuring alpha-covering.

    Entry (lp, l) is 0 on the diagonal, infinite off-diagonal in the base
    row, and otherwise the largest value lam(lp, w) over witnesses w whose
    lam(l, w) is alpha-dominated by lam(lp, w), or 0 when no witness is.
    """
    n, _ = lam.values.shape
    base = int(base)
    if not 0 <= base < n:
        raise ValueError(f"base landmark {base} out of range")
    V = lam.values
    A = evaluate_array(alpha, V)
    out = np.empty((n, n), dtype=float)
    for lp in range(n):
        qualifies = A <= V[lp]          # for each (l, w): alpha(lam(l,w)) <= lam(lp,w)
        sup = np.where(qualifies, V[lp], -INF).max(axis=1)
        out[lp] = np.maximum(sup, 0.0)
    out[base, :] = INF
    np.fill_diagonal(out, 0.0)
    return DowkerDissimilarity(lam.landmark_ids, lam.landmark_ids, out)


def alpha_insertion_radius(cover: DowkerDissimilarity, order: SampleOrder) -> TruncationFunction:
    """Truncation bounds from a cover dissimilarity and a landmark order.

    Bound at the first landmark of the order is infinite; elsewhere it is
    the sup over landmarks k at or after l of the min over landmarks before
    l of cover(lp, k).
    """
    if not cover.is_square:
        raise ValueError("cover dissimilarity must be square")
    n = cover.n_landmarks
    if sorted(order.order) != list(range(n)):
        raise ValueError("order does not cover the cover dissimilarity's landmarks")
    V = cover.values
    bound = [0.0] * n
    seq = list(order.order)
    for pos, l in enumerate(seq):
        if pos == 0:
            bound[l] = INF
            continue
        earlier = seq[:pos]
        later = seq[pos:]
        sub = V[np.ix_(earlier, later)]
        bound[l] = float(sub.min(axis=0).max())
    return TruncationFunction(tuple(bound))


def metric_truncation(order: SampleOrder, c: float) -> TruncationFunction:
    """Truncation bounds c * radius / (c - 1) from a farthest point sample."""
    c = float(c)
    if not c > 1.0 or np.isinf(c):
        raise ValueError(f"require a finite c > 1, got {c!r}")
    return TruncationFunction(tuple(c * r / (c - 1.0) for r in order.insertion_radius))


def truncate(lam: DowkerDissimilarity, T: TruncationFunction) -> DowkerDissimilarity:
    """Replace every entry at or above its landmark bound by infinity."""
    n = lam.n_landmarks
    if len(T.bound) != n:
        raise ValueError("truncation function does not cover the landmark set")
    bounds = np.array(T.bound, dtype=float)[:, None]
    out = np.where(lam.values < bounds, lam.values, INF)
    return DowkerDissimilarity(lam.landmark_ids, lam.witness_ids, out)


def truncation_grid(lam: DowkerDissimilarity) -> list[float]:
    """Default threshold grid: all finite values plus one above the maximum."""
    finite = np.unique(lam.values[np.isfinite(lam.values)])
    if finite.size == 0:
        return [1.0]
    return [float(v) for v in finite] + [float(finite[-1]) + 1.0]


def validate_truncation(lam: DowkerDissimilarity, T: TruncationFunction,
                        alpha: TranslationFunction, grid) -> tuple[float, int] | None:
    """Check the truncation guarantee on a grid of thresholds.

    For every t in the grid and landmark l there must be a landmark lp with
    lam(lp, w) < alpha(t) and lam(lp, w) < T(lp) for every witness w that l
    sees strictly below t.  Returns None on success or the first failing
    (t, l).  The grid must contain every finite value of lam plus one value
    above the maximum; by piecewise constancy of the witness sets this makes
    the check exhaustive.
    """
    grid = [float(t) for t in grid]
    if not grid:
        raise ValueError("grid must be non-empty")
    finite = set(float(v) for v in np.unique(lam.values[np.isfinite(lam.values)]))
    if not finite.issubset(grid):
        raise ValueError("grid must include every finite dissimilarity value")
    if finite and not any(g > max(finite) for g in grid):
        raise ValueError("grid must include one value above the maximum")
    if len(T.bound) != lam.n_landmarks:
        raise ValueError("truncation function does not cover the landmark set")
    V = lam.values
    n = lam.n_landmarks
    bounds = np.array(T.bound, dtype=float)
    for t in grid:
        at = evaluate(alpha, t)
        for l in range(n):
            seen = V[l] < t
            if not seen.any():
                continue
            ok = False
            for lp in range(n):
                row = V[lp][seen]
                if (row < at).all() and (row < bounds[lp]).all():
                    ok = True
                    break
            if not ok:
                return (t, l)
    return None
