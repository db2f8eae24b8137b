"""Exact rational arithmetic backend.

All of the geometric core works over exact rationals; no tolerances anywhere.
gmpy2.mpq is used when importable (roughly 20x faster on pivot-heavy
workloads), with fractions.Fraction as the pure-Python fallback.  Both types
print as "p/q" (or "p" for integers) and accept that form back, so serialized
artifacts are backend independent.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _ratcls

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - depends on environment
    from fractions import Fraction as _ratcls

    HAVE_GMPY2 = False


def rat(a, b=None):
    """Build an exact rational from ints, rationals or a "p/q" string."""
    if b is None:
        return _ratcls(a)
    return _ratcls(a, b)


ZERO = rat(0)
ONE = rat(1)


def rat_str(q) -> str:
    """Canonical text form: "p/q", or "p" when the denominator is 1."""
    return str(q)


def is_rational(x) -> bool:
    return isinstance(x, _ratcls)


def as_int_pair(q) -> tuple[int, int]:
    return int(q.numerator), int(q.denominator)
