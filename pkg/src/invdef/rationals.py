"""Exact rational coefficient arithmetic.

All coefficients in this package are arbitrary-precision rationals.  gmpy2's
``mpq`` is used when available (it is several times faster than the stdlib
``Fraction`` in the Groebner inner loops); otherwise ``fractions.Fraction``
is a drop-in replacement.  Both normalize to lowest terms with a positive
denominator, which is the canonical form we rely on for printing.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as QQ  # type: ignore
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as QQ  # type: ignore

ZERO = QQ(0)
ONE = QQ(1)


def rat_from_string(text: str) -> "QQ":
    """Parse 'a' or 'a/b' into an exact rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return QQ(int(num), int(den))
    return QQ(int(text))


def rat_to_string(value) -> str:
    """Canonical string form: 'a' for integers, 'a/b' otherwise."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"


def gcd_int(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def lcm_int(a: int, b: int) -> int:
    from math import gcd

    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)
