"""Filtered Dowker nerves, sparse restricted nerves, parents and restrictions.

A simplex is a sorted tuple of landmark positions.  The full nerve assigns
each simplex the least scale at which some witness sees all its vertices;
the sparse nerve additionally restricts which witnesses are admissible via a
parent function phi and a per-landmark restriction bound R.  Complexes are
materialised up to a dimension cap; homology read off such a complex is
valid in degrees strictly below the cap.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .extreal import INF
from .dissimilarity import DowkerDissimilarity, SampleOrder
from .translations import linear, id_plus_beta, evaluate, generalized_inverse

Simplex = tuple[int, ...]

DEFAULT_SIMPLEX_BUDGET = 5_000_000


class BudgetExceededError(RuntimeError):
    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


def _check_simplex(sigma, n: int) -> Simplex:
    sigma = tuple(int(v) for v in sigma)
    if not sigma:
        raise ValueError("simplex must be non-empty")
    if any(a >= b for a, b in zip(sigma, sigma[1:])):
        raise ValueError(f"simplex vertices must be sorted and duplicate-free: {sigma}")
    if sigma[0] < 0 or sigma[-1] >= n:
        raise ValueError(f"simplex vertex out of range: {sigma}")
    return sigma


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices with finite filtration values, closed under faces.

    simplices are (vertex tuple, value) pairs sorted by (value, dimension,
    vertices).  Face closure and monotonicity are required of the input and
    are re-checked by the persistence reduction, which names the offending
    face pair on violation.
    """

    simplices: tuple[tuple[Simplex, float], ...]
    dim_cap: int

    def __post_init__(self):
        if self.dim_cap < 0:
            raise ValueError("dim_cap must be >= 0")
        object.__setattr__(self, "simplices", tuple(self.simplices))

    @property
    def simplex_count(self) -> int:
        return len(self.simplices)


def is_parent_function(phi) -> bool:
    """True iff every orbit of the map reaches a fixed point (no real cycles)."""
    parent = [int(p) for p in phi]
    n = len(parent)
    if any(not 0 <= p < n for p in parent):
        return False
    state = [0] * n  # 0 unseen, 1 on current walk, 2 resolved
    for start in range(n):
        if state[start]:
            continue
        walk = []
        l = start
        while True:
            if state[l] == 2:
                break
            if state[l] == 1:
                # closed a cycle within this walk; fine only if a fixed point
                if parent[l] != l:
                    return False
                break
            state[l] = 1
            walk.append(l)
            if parent[l] == l:
                break
            l = parent[l]
        for w in walk:
            state[w] = 2
    return True


@dataclass(frozen=True)
class ParentFunction:
    """Map phi on landmark positions whose only cycles are fixed points."""

    parent: tuple[int, ...]

    def __post_init__(self):
        parent = tuple(int(p) for p in self.parent)
        if not parent:
            raise ValueError("parent function needs at least one landmark")
        if not is_parent_function(parent):
            raise ValueError("not a parent function: the graph has a non-trivial cycle")
        object.__setattr__(self, "parent", parent)

    def children(self) -> list[list[int]]:
        """Preimages excluding fixed-point self-loops, per landmark."""
        kids = [[] for _ in self.parent]
        for l, p in enumerate(self.parent):
            if p != l:
                kids[p].append(l)
        return kids

    def descendants(self, l: int) -> list[int]:
        """All landmarks whose parent chain passes through l (including l)."""
        kids = self.children()
        out, stack = [], [l]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(kids[x])
        return sorted(out)


@dataclass(frozen=True)
class RestrictionFunction:
    """Per-landmark restriction bound R(l) in [0, inf]."""

    bound: tuple[float, ...]

    def __post_init__(self):
        bound = tuple(float(b) for b in self.bound)
        for i, b in enumerate(bound):
            if math.isnan(b) or b < 0:
                raise ValueError(f"restriction bound at landmark {i} must lie in [0, inf]")
        object.__setattr__(self, "bound", bound)


@dataclass(frozen=True)
class SparsificationPlan:
    """A parent function, a restriction function, and the derived slope flags.

    slope[l] is true iff R(l) < R(lp) for every lp with phi(lp) = l; the
    quantifier is over the full preimage, so landmarks with empty preimage
    are slope points and fixed points never are.
    """

    phi: ParentFunction
    r: RestrictionFunction
    slope: tuple[bool, ...]

    @classmethod
    def build(cls, phi: ParentFunction, r: RestrictionFunction) -> "SparsificationPlan":
        if len(phi.parent) != len(r.bound):
            raise ValueError("parent and restriction functions cover different landmark sets")
        n = len(phi.parent)
        preimage = [[] for _ in range(n)]
        for l, p in enumerate(phi.parent):
            preimage[p].append(l)
        slope = tuple(all(r.bound[l] < r.bound[lp] for lp in preimage[l]) for l in range(n))
        return cls(phi, r, slope)

    @property
    def n_landmarks(self) -> int:
        return len(self.phi.parent)


def identity_plan(n: int) -> SparsificationPlan:
    """The trivial plan (phi = id, R = inf): the sparse nerve equals the full one."""
    phi = ParentFunction(tuple(range(n)))
    r = RestrictionFunction((INF,) * n)
    return SparsificationPlan.build(phi, r)


def nerve_value(lam: DowkerDissimilarity, sigma) -> float:
    """Least scale at which some witness sees every vertex of sigma."""
    sigma = _check_simplex(sigma, lam.n_landmarks)
    if len(sigma) == 1:
        return float(lam.values[sigma[0]].min())
    return float(lam.values[list(sigma)].max(axis=0).min())


def sparse_nerve_value(lam: DowkerDissimilarity, plan: SparsificationPlan, sigma) -> float:
    """Least scale over admissible witnesses, or infinity if none qualifies.

    A witness w is admissible for sigma when lam(l, w) <= R(lp) for all
    vertices l, lp of sigma, and lam(l, w) < R(l) strictly at every slope
    vertex l of sigma.
    """
    sigma = _check_simplex(sigma, lam.n_landmarks)
    if plan.n_landmarks != lam.n_landmarks:
        raise ValueError("plan does not cover the landmark set")
    rows = lam.values[list(sigma)]
    colmax = rows.max(axis=0)
    rmin = min(plan.r.bound[l] for l in sigma)
    ok = colmax <= rmin
    for i, l in enumerate(sigma):
        if plan.slope[l]:
            ok = ok & (rows[i] < plan.r.bound[l])
    if not ok.any():
        return INF
    return float(colmax[ok].min())


def _worst_case_count(n: int, dim_cap: int) -> int:
    return sum(math.comb(n, k) for k in range(1, min(dim_cap + 1, n) + 1))


def build_filtered_complex(value_fn, n: int, dim_cap: int,
                           budget: int | None = None) -> FilteredComplex:
    """Materialise all simplices of dimension <= dim_cap with finite value.

    value_fn maps a sorted vertex tuple to a scale and must be monotone
    under cofaces (true for nerve_value and sparse_nerve_value, whose
    admissible witness sets only shrink); enumeration prunes every coface
    of an infinite-valued simplex.  Raises BudgetExceededError once more
    than `budget` simplices have been emitted.
    """
    if n < 1:
        raise ValueError("need at least one landmark")
    if dim_cap < 0:
        raise ValueError("dim_cap must be >= 0")
    if budget is None:
        budget = DEFAULT_SIMPLEX_BUDGET
    out = []

    def visit(sigma):
        val = value_fn(sigma)
        if val == INF:
            return
        out.append((sigma, val))
        if len(out) > budget:
            est = _worst_case_count(n, dim_cap)
            raise BudgetExceededError(
                f"simplex budget exceeded: more than {budget} simplices have finite "
                f"value (worst case {est} for n={n}, dim_cap={dim_cap})", est)
        if len(sigma) <= dim_cap:
            for v in range(sigma[-1] + 1, n):
                visit(sigma + (v,))

    for v in range(n):
        visit((v,))
    out.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return FilteredComplex(tuple(out), dim_cap)


# -- restriction functions ---------------------------------------------------

def _rho(lam: DowkerDissimilarity, l: int, lp: int) -> float:
    """sup of lam(lp, w) over witnesses where l sees strictly closer, else 0."""
    V = lam.values
    mask = V[l] < V[lp]
    if not mask.any():
        return 0.0
    return float(V[lp][mask].max())


def _rho_matrix(lam: DowkerDissimilarity) -> np.ndarray:
    V = lam.values
    n = V.shape[0]
    out = np.empty((n, n), dtype=float)
    for l in range(n):
        mask = V[l] < V  # (lp, w): lam(l, w) < lam(lp, w)
        out[l] = np.where(mask, V, -INF).max(axis=1)
    return np.maximum(out, 0.0)


def canonical_restriction(lam: DowkerDissimilarity, phi: ParentFunction) -> RestrictionFunction:
    """The pointwise-minimal restriction function relative to phi.

    Built from the per-landmark excess rho(l, phi(l)) (infinite at fixed
    points) by taking the maximum over all descendants of each landmark.
    """
    n = lam.n_landmarks
    if len(phi.parent) != n:
        raise ValueError("parent function does not cover the landmark set")
    rprime = [INF if phi.parent[l] == l else _rho(lam, l, phi.parent[l]) for l in range(n)]
    kids = phi.children()
    bound = [None] * n

    def resolve(l):
        if bound[l] is not None:
            return bound[l]
        best = rprime[l]
        for child in kids[l]:
            best = max(best, resolve(child))
        bound[l] = best
        return best

    for l in range(n):
        resolve(l)
    return RestrictionFunction(tuple(bound))


def build_parent_function(lam: DowkerDissimilarity) -> tuple[ParentFunction, tuple[int, ...]]:
    """Construct a parent function from pairwise excess values.

    Landmarks are ordered by decreasing best excess R0(l) = min over other
    landmarks of rho(l, lp) (ties by position).  Each landmark points at the
    earliest predecessor realising R0(l); if no predecessor does, at the
    earliest predecessor realising the best excess among predecessors.  The
    first landmark is its own parent.  Returns the parent function and the
    order used.
    """
    n = lam.n_landmarks
    rho = _rho_matrix(lam)
    r0 = np.full(n, INF)
    for l in range(n):
        others = [rho[l, lp] for lp in range(n) if lp != l]
        if others:
            r0[l] = min(others)
    order = sorted(range(n), key=lambda l: (-r0[l], l))
    parent = [0] * n
    for pos, l in enumerate(order):
        preds = order[:pos]
        q = [lp for lp in preds if rho[l, lp] == r0[l]]
        if q:
            parent[l] = q[0]
        elif preds:
            r1 = min(rho[l, lp] for lp in preds)
            parent[l] = next(lp for lp in preds if rho[l, lp] == r1)
        else:
            parent[l] = l
    return ParentFunction(tuple(parent)), tuple(order)


def parent_restriction(lam: DowkerDissimilarity,
                       base: int = 0) -> tuple[ParentFunction, RestrictionFunction]:
    """Parent and restriction from per-landmark reach.

    tau(l) is infinite at the base and otherwise the largest finite value in
    row l (0 for an all-infinite row).  Each landmark adopts as parent the
    landmark of strictly larger reach with the smallest tau (ties by
    position), falling back to the base, and is restricted by its parent's
    reach.
    """
    n = lam.n_landmarks
    base = int(base)
    if not 0 <= base < n:
        raise ValueError(f"base landmark {base} out of range")
    V = lam.values
    tau = []
    for l in range(n):
        if l == base:
            tau.append(INF)
            continue
        finite = V[l][np.isfinite(V[l])]
        tau.append(float(finite.max()) if finite.size else 0.0)
    parent = []
    for l in range(n):
        q = [lp for lp in range(n) if tau[lp] > tau[l]]
        if q:
            parent.append(min(q, key=lambda lp: (tau[lp], lp)))
        else:
            parent.append(base)
    phi = ParentFunction(tuple(parent))
    r = RestrictionFunction(tuple(tau[parent[l]] for l in range(n)))
    return phi, r


def _sampled_triangle_check(lam: DowkerDissimilarity, samples: int = 200) -> None:
    n = lam.n_landmarks
    if n < 3:
        return
    rng = np.random.default_rng(0)
    V = lam.values
    for _ in range(samples):
        i, j, k = rng.integers(0, n, size=3)
        if V[i, k] > V[i, j] + V[j, k]:
            warnings.warn(
                f"triangle inequality violated at ({i},{j},{k}): "
                f"{V[i, k]} > {V[i, j]} + {V[j, k]}; the interleaving guarantee degrades",
                stacklevel=3)
            return


def sheehy_restriction(lam: DowkerDissimilarity, order: SampleOrder, c: float
                       ) -> tuple[ParentFunction, RestrictionFunction, DowkerDissimilarity]:
    """Linear-size restriction for finite metric-like dissimilarities.

    Realises the multiplicative slack alpha(t) = c t as id + beta with
    beta(t) = (c - 1) t so that the generalized inverse of beta is exact.
    For each landmark, lambda is the covering radius of its order prefix
    over all witnesses; entries at or above alpha(inv_beta(lambda)) are
    truncated away, the restriction bound is alpha(alpha(inv_beta(lambda))),
    and the parent is the earliest landmark in the order close to the
    landmark's nearest witness yet inserted late enough.  Returns the parent
    function, the restriction bounds, and the truncated dissimilarity the
    plan applies to.
    """
    c = float(c)
    if not c > 1.0 or np.isinf(c):
        raise ValueError(f"require a finite c > 1, got {c!r}")
    if np.isinf(lam.values).any():
        raise ValueError("requires a finite-valued dissimilarity")
    n = lam.n_landmarks
    if sorted(order.order) != list(range(n)):
        raise ValueError("order does not cover the landmark set")
    if lam.is_square:
        _sampled_triangle_check(lam)

    beta = linear(c - 1.0, 0.0)
    alpha = id_plus_beta(beta)
    V = lam.values

    # covering radius of each order prefix, per landmark
    lam_ins = [0.0] * n
    seq = list(order.order)
    lam_ins[seq[0]] = INF
    running = V[seq[0]].copy()
    for k in range(1, n):
        l = seq[k]
        lam_ins[l] = float(running.max())
        running = np.minimum(running, V[l])

    inv = [generalized_inverse(beta, lam_ins[l]) for l in range(n)]
    thr_trunc = [evaluate(alpha, inv[l]) for l in range(n)]
    thr_parent = [beta(evaluate(alpha, inv[l])) for l in range(n)]
    bound = [evaluate(alpha, evaluate(alpha, inv[l])) for l in range(n)]

    gamma = np.where(V < np.array(thr_trunc)[:, None], V, INF)

    parent = [0] * n
    l0 = seq[0]
    parent[l0] = l0
    bound[l0] = INF
    for l in range(n):
        if l == l0:
            continue
        wprime = int(np.argmin(V[l]))
        found = None
        for lp in seq:
            if V[lp, wprime] <= thr_parent[l] and lam_ins[lp] > thr_parent[l]:
                found = lp
                break
        if found is None:
            # the seed always clears the insertion test; if it is still too
            # far from the witness, lift the bound so the plan stays valid
            found = l0
            if not V[l0, wprime] <= thr_parent[l]:
                bound[l] = INF
        parent[l] = found

    phi = ParentFunction(tuple(parent))
    r = RestrictionFunction(tuple(bound))
    truncated = DowkerDissimilarity(lam.landmark_ids, lam.witness_ids, gamma)
    return phi, r, truncated


def validate_restriction(lam: DowkerDissimilarity, phi: ParentFunction,
                         r: RestrictionFunction) -> tuple[int, int | None, int] | None:
    """Exhaustively check the three restriction conditions over L x W.

    Returns None when all hold, else (landmark, witness or None, condition)
    for the first violation, scanning landmarks in position order and
    checking condition 1 over witnesses, then 2, then 3.
    """
    n = lam.n_landmarks
    if len(phi.parent) != n or len(r.bound) != n:
        raise ValueError("parent or restriction function does not cover the landmark set")
    V = lam.values
    for l in range(n):
        p = phi.parent[l]
        mask = V[l] < V[p]
        bad = mask & (V[p] > r.bound[l])
        if bad.any():
            w = int(np.argwhere(bad)[0][0])
            return (l, w, 1)
        if not r.bound[p] >= r.bound[l]:
            return (l, None, 2)
        if p == l and r.bound[l] != INF:
            return (l, None, 3)
    return None
