"""Exact rational scalar type used throughout the package.

gmpy2.mpq is used when available (much faster for the elimination-heavy
workloads); fractions.Fraction is a drop-in fallback.  Everything downstream
only relies on the common arithmetic/comparison protocol of the two types.
"""

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as QQ

ZERO = QQ(0)
ONE = QQ(1)


def rational_from_string(s):
    """Parse "a/b" or "a" (decimal integers) into an exact rational."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return QQ(int(num), int(den))
    return QQ(int(s))


def rational_to_string(x):
    """Inverse of :func:`rational_from_string`; "a" when the denominator is 1."""
    num, den = x.numerator, x.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"
