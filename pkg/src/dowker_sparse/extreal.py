"""Extended non-negative reals [0, inf] used as filtration scales.

Scales are plain floats; infinity is ``math.inf``.  Comparisons are exact,
infinity compares strictly greater than every finite value, and arithmetic
involving infinity saturates (inf + x = inf, c * inf = inf for c > 0).
"""

import math

INF = math.inf


def check_scale(x, what: str = "value") -> float:
    """Coerce x to float and reject anything outside [0, inf]."""
    v = float(x)
    if math.isnan(v) or v < 0.0:
        raise ValueError(f"{what} must lie in [0, inf], got {x!r}")
    return v


def format_scale(v: float) -> str:
    """Shortest decimal that reparses to exactly v; 'inf' for infinity."""
    if v == INF:
        return "inf"
    return repr(float(v))


def parse_scale(text: str) -> float:
    """Inverse of format_scale. Finite decimals or the token 'inf'."""
    t = text.strip()
    if t == "inf":
        return INF
    v = float(t)
    if math.isnan(v) or v < 0.0 or math.isinf(v):
        raise ValueError(f"scale must be a non-negative decimal or 'inf', got {text!r}")
    return v
