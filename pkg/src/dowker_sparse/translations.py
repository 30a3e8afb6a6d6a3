"""Translation functions on [0, inf] and their generalized inverses.

A translation function is an order preserving alpha with alpha(t) >= t and
alpha(inf) = inf.  Only a closed family of kinds is supported so that
generalized inverses stay exact: identity, multiplicative (c >= 1), additive
(eps >= 0), identity-plus-beta for a linear monotone map beta, and
compositions of these.

Generalized inverses are computed so that the adjunction

    inverse(t) <= s  if and only if  t <= f(s)

holds exactly for every pair of floats, including at rounding boundaries.
This is what downstream matching certificates rely on.
"""

from dataclasses import dataclass
import math
import struct

import numpy as np

from .extreal import INF, check_scale


@dataclass(frozen=True)
class MonotoneMap:
    """Non-decreasing map on [0, inf); only linear maps are supported."""

    slope: float
    intercept: float = 0.0

    def __post_init__(self):
        slope = check_scale(self.slope, "slope")
        intercept = check_scale(self.intercept, "intercept")
        if math.isinf(slope) or math.isinf(intercept):
            raise ValueError("linear map parameters must be finite")
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "intercept", intercept)

    def __call__(self, t: float) -> float:
        if t == INF:
            return INF
        return self.slope * t + self.intercept


def linear(slope: float, intercept: float = 0.0) -> MonotoneMap:
    return MonotoneMap(slope, intercept)


@dataclass(frozen=True)
class TranslationFunction:
    """Order preserving alpha with alpha(t) >= t, closed under composition.

    kind is one of "identity", "multiplicative", "additive", "id_plus_beta"
    or "composite".  Use the module-level constructors rather than building
    instances by hand.
    """

    kind: str
    factor: float = 1.0
    offset: float = 0.0
    beta: MonotoneMap | None = None
    inner: "TranslationFunction | None" = None
    outer: "TranslationFunction | None" = None

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    def describe(self) -> str:
        if self.kind == "identity":
            return "id"
        if self.kind == "multiplicative":
            return f"mult:{self.factor}"
        if self.kind == "additive":
            return f"add:{self.offset}"
        if self.kind == "id_plus_beta":
            return f"id+({self.beta.slope}*t+{self.beta.intercept})"
        return f"({self.inner.describe()})>>({self.outer.describe()})"


def identity() -> TranslationFunction:
    return TranslationFunction("identity")


def multiplicative(c: float) -> TranslationFunction:
    c = float(c)
    if math.isnan(c) or c < 1.0 or math.isinf(c):
        raise ValueError(f"multiplicative factor must be a finite real >= 1, got {c!r}")
    return TranslationFunction("multiplicative", factor=c)


def additive(eps: float) -> TranslationFunction:
    eps = check_scale(eps, "additive offset")
    if math.isinf(eps):
        raise ValueError("additive offset must be finite")
    return TranslationFunction("additive", offset=eps)


def id_plus_beta(beta: MonotoneMap) -> TranslationFunction:
    if not isinstance(beta, MonotoneMap):
        raise TypeError("id_plus_beta expects a MonotoneMap")
    return TranslationFunction("id_plus_beta", beta=beta)


def evaluate(alpha: TranslationFunction, t: float) -> float:
    """alpha(t), with alpha(inf) = inf."""
    if t == INF:
        return INF
    if alpha.kind == "identity":
        return t
    if alpha.kind == "multiplicative":
        return alpha.factor * t
    if alpha.kind == "additive":
        return t + alpha.offset
    if alpha.kind == "id_plus_beta":
        return t + alpha.beta(t)
    if alpha.kind == "composite":
        return evaluate(alpha.outer, evaluate(alpha.inner, t))
    raise ValueError(f"unknown translation kind {alpha.kind!r}")


def evaluate_array(alpha: TranslationFunction, values: np.ndarray) -> np.ndarray:
    """Elementwise alpha over an array of scales (infinity saturates)."""
    v = np.asarray(values, dtype=float)
    if alpha.kind == "identity":
        return v.copy()
    if alpha.kind == "multiplicative":
        return alpha.factor * v
    if alpha.kind == "additive":
        return v + alpha.offset
    if alpha.kind == "id_plus_beta":
        b = alpha.beta
        # slope 0 would give 0 * inf = nan at infinite entries
        with np.errstate(invalid="ignore"):
            out = v + (b.slope * v + b.intercept)
        return np.where(np.isinf(v), INF, out)
    if alpha.kind == "composite":
        return evaluate_array(alpha.outer, evaluate_array(alpha.inner, v))
    raise ValueError(f"unknown translation kind {alpha.kind!r}")


def compose(alpha1: TranslationFunction, alpha2: TranslationFunction) -> TranslationFunction:
    """The translation t -> alpha2(alpha1(t)), simplified when possible."""
    if alpha1.kind == "identity":
        return alpha2
    if alpha2.kind == "identity":
        return alpha1
    if alpha1.kind == "multiplicative" and alpha2.kind == "multiplicative":
        return multiplicative(alpha1.factor * alpha2.factor)
    if alpha1.kind == "additive" and alpha2.kind == "additive":
        return additive(alpha1.offset + alpha2.offset)
    return TranslationFunction("composite", inner=alpha1, outer=alpha2)


# -- exact generalized inverses ---------------------------------------------

def _ordinal(x: float) -> int:
    return struct.unpack("<q", struct.pack("<d", x))[0]


def _from_ordinal(i: int) -> float:
    return struct.unpack("<d", struct.pack("<q", i))[0]


def _least_preimage(fn, target: float, guess: float) -> float:
    """Smallest float s >= 0 with fn(s) >= target, for non-decreasing fn.

    Bisects over the ordered bit patterns of non-negative doubles, so the
    result is exact with respect to the float evaluation of fn.
    """
    if fn(0.0) >= target:
        return 0.0
    hi = guess if (guess > 0.0 and not math.isinf(guess)) else 1.0
    while fn(hi) < target:
        hi *= 2.0
        if math.isinf(hi):
            raise ValueError("map does not reach the requested value")
    ilo, ihi = _ordinal(0.0), _ordinal(hi)
    while ilo + 1 < ihi:
        mid = (ilo + ihi) // 2
        if fn(_from_ordinal(mid)) >= target:
            ihi = mid
        else:
            ilo = mid
    return _from_ordinal(ihi)


def generalized_inverse(beta: MonotoneMap, t: float) -> float:
    """inf{s >= 0 : beta(s) >= t}, exact in the adjunction sense.

    Requires beta to be coercive (slope > 0); inverse(inf) = inf by
    convention.
    """
    if beta.slope == 0.0:
        raise ValueError("bounded monotone map has no generalized inverse")
    t = check_scale(t, "argument")
    if t == INF:
        return INF
    if t <= beta.intercept:
        return 0.0
    return _least_preimage(beta, t, (t - beta.intercept) / beta.slope)


def translation_inverse(alpha: TranslationFunction, t: float) -> float:
    """Generalized inverse of a translation function, exact as above."""
    t = check_scale(t, "argument")
    if t == INF:
        return INF
    if alpha.kind == "identity":
        return t
    if alpha.kind == "multiplicative":
        if alpha.factor == 1.0:
            return t
        return _least_preimage(lambda s: alpha.factor * s, t, t / alpha.factor)
    if alpha.kind == "additive":
        return _least_preimage(lambda s: s + alpha.offset, t, max(0.0, t - alpha.offset))
    if alpha.kind == "id_plus_beta":
        b = alpha.beta
        guess = max(0.0, (t - b.intercept) / (1.0 + b.slope))
        return _least_preimage(lambda s: s + b(s), t, guess)
    if alpha.kind == "composite":
        return translation_inverse(alpha.inner, translation_inverse(alpha.outer, t))
    raise ValueError(f"unknown translation kind {alpha.kind!r}")
