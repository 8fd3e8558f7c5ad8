"""Extended-real scalars with a minus-infinity-dominant addition rule.

Values live in R ∪ {-inf, +inf} and are represented as plain IEEE floats.
The one deliberate departure from IEEE arithmetic is the mixed infinite
sum: (+inf) + (-inf) and (-inf) + (+inf) are both defined to be -inf here
instead of NaN.  Equivalently: -inf absorbs any sum it appears in, then
+inf absorbs, and only finite pairs use ordinary addition.  Downstream
suprema of expressions such as s*x - f(x) - e(x, y) rely on this rule so
that nodes outside the effective domain can never win.

Multi-term sums are evaluated strictly left to right everywhere in this
package.  Under the rule above the result is order-independent, but the
pinned order keeps floating-point rounding deterministic.

NaN is never a value of the arithmetic; validation rejects it.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

INF = math.inf
NEG_INF = -math.inf

__all__ = [
    "INF",
    "NEG_INF",
    "as_extreal",
    "as_extreal_array",
    "add_ext",
    "neg_ext",
    "sub_ext",
    "max_ext",
    "min_ext",
    "add_ext_array",
    "sub_ext_array",
    "format_ext",
    "ext_to_json",
    "parse_ext",
]


def as_extreal(x) -> float:
    """Coerce to float and reject NaN (NaN construction is an error)."""
    v = float(x)
    if math.isnan(v):
        raise ValueError("NaN is not an extended real")
    return v


def as_extreal_array(values) -> np.ndarray:
    """Coerce to a float64 array, rejecting NaN entries."""
    arr = np.asarray(values, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("NaN is not an extended real")
    return arr


def add_ext(a: float, b: float) -> float:
    """a + b with (+inf) + (-inf) = (-inf) + (+inf) = -inf."""
    if math.isinf(a) and math.isinf(b) and a != b:
        return NEG_INF
    return a + b


def neg_ext(a: float) -> float:
    """Negation; swaps the infinities."""
    return -a


def sub_ext(a: float, b: float) -> float:
    """a - b, defined as add_ext(a, -b); hence (+inf) - (+inf) = -inf."""
    return add_ext(a, -b)


def max_ext(values: Iterable[float]) -> float:
    """Maximum under the total order -inf < finite < +inf."""
    vals = list(values)
    if not vals:
        raise ValueError("empty reduction")
    return max(vals)


def min_ext(values: Iterable[float]) -> float:
    """Minimum under the total order -inf < finite < +inf."""
    vals = list(values)
    if not vals:
        raise ValueError("empty reduction")
    return min(vals)


def add_ext_array(a, b) -> np.ndarray:
    """Elementwise add_ext on arrays (inputs must be NaN-free)."""
    with np.errstate(invalid="ignore"):
        out = np.asarray(a, dtype=float) + np.asarray(b, dtype=float)
    # The only NaN source for NaN-free inputs is a mixed infinite sum.
    return np.where(np.isnan(out), NEG_INF, out)


def sub_ext_array(a, b) -> np.ndarray:
    """Elementwise sub_ext on arrays (inputs must be NaN-free)."""
    return add_ext_array(a, np.negative(np.asarray(b, dtype=float)))


def format_ext(v: float) -> str:
    """Serialize as "inf", "-inf", or a shortest round-trip decimal."""
    if v == INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    return repr(float(v))


def ext_to_json(v: float):
    """JSON form of an extended real: a number when finite, "inf"/"-inf" otherwise."""
    return float(v) if math.isfinite(v) else format_ext(float(v))


def parse_ext(s) -> float:
    """Parse a serialized extended real (string or JSON number)."""
    if isinstance(s, str):
        text = s.strip().lower()
        if text in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        if text in ("-inf", "-infinity"):
            return NEG_INF
        return as_extreal(float(text))
    return as_extreal(s)
