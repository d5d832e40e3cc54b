"""Exact dyadic rational arithmetic and the cyclic order on R/Z.

Dyadic rationals n / 2**e are the coordinate domain for the whole package:
breakpoints of piecewise-linear maps, endpoints of arcs, slopes are signed
powers of two.  Values are kept canonical (exponent >= 0; numerator odd
unless the exponent is zero; zero is (0, 0)), so equality, ordering and
hashing are structural and no rounding can occur anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError

__all__ = [
    "Dyadic",
    "CirclePoint",
    "DEGENERATE",
    "NEGATIVE",
    "POSITIVE",
    "cyclic_order",
    "mod1",
    "normalize",
    "parse_dyadic",
]

POSITIVE = 1
NEGATIVE = -1
DEGENERATE = 0


class Dyadic:
    """The rational num / 2**exp in canonical form.

    Canonical means exp >= 0 and (exp == 0 or num is odd); zero is stored as
    (0, 0).  Instances are immutable by convention and hashable.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if not isinstance(num, int) or not isinstance(exp, int):
            raise TypeError("Dyadic takes integer numerator and exponent")
        if exp < 0:
            num <<= -exp
            exp = 0
        if num == 0:
            exp = 0
        elif exp:
            tz = (num & -num).bit_length() - 1
            shift = tz if tz < exp else exp
            if shift:
                num >>= shift
                exp -= shift
        self.num = num
        self.exp = exp

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = self.exp if self.exp >= other.exp else other.exp
        return Dyadic((self.num << (e - self.exp)) + (other.num << (e - other.exp)), e)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = self.exp if self.exp >= other.exp else other.exp
        return Dyadic((self.num << (e - self.exp)) - (other.num << (e - other.exp)), e)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def ldexp(self, n: int) -> "Dyadic":
        """self * 2**n, exactly."""
        return Dyadic(self.num, self.exp - n)

    # -- order ----------------------------------------------------------

    def _cmp(self, other) -> int:
        e = self.exp if self.exp >= other.exp else other.exp
        a = self.num << (e - self.exp)
        b = other.num << (e - other.exp)
        return (a > b) - (a < b)

    def __lt__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) < 0

    def __le__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) <= 0

    def __gt__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) > 0

    def __ge__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) >= 0

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __hash__(self):
        return hash((self.num, self.exp))

    def __bool__(self):
        return self.num != 0

    # -- structure -------------------------------------------------------

    def sign(self) -> int:
        return (self.num > 0) - (self.num < 0)

    def floor(self) -> int:
        return self.num >> self.exp

    def is_integer(self) -> bool:
        return self.exp == 0

    def frac1(self) -> "Dyadic":
        """Representative of self mod 1 in [0, 1)."""
        return self - self.floor()

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{1 << self.exp}"

    def __repr__(self):
        return f"Dyadic({self!s})"


def _coerce(x):
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x)
    return NotImplemented


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)


def normalize(numerator: int, exponent: int) -> Dyadic:
    """Canonical dyadic with value numerator / 2**exponent.

    The exponent must be non-negative.
    """
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    return Dyadic(numerator, exponent)


def parse_dyadic(text: str) -> Dyadic:
    """Parse "p/q" with q a positive power of two, or a plain integer."""
    s = text.strip()
    try:
        if "/" in s:
            p_str, q_str = s.split("/", 1)
            p = int(p_str)
            q = int(q_str)
            if q <= 0 or q & (q - 1):
                raise ParseError(f"denominator {q} is not a power of two")
            return Dyadic(p, q.bit_length() - 1)
        return Dyadic(int(s))
    except ValueError as exc:
        raise ParseError(f"bad dyadic literal {text!r}") from exc


class CirclePoint:
    """A point of R/Z, stored by its representative in [0, 1)."""

    __slots__ = ("rep",)

    def __init__(self, value):
        if isinstance(value, CirclePoint):
            self.rep = value.rep
            return
        value = _coerce(value)
        if value is NotImplemented:
            raise TypeError("CirclePoint takes a Dyadic or int")
        self.rep = value.frac1()

    def rotate(self, by) -> "CirclePoint":
        return CirclePoint(self.rep + _coerce(by))

    def antipode_of_zero_gap(self):  # pragma: no cover - debugging helper
        return CirclePoint(self.rep + HALF)

    def __eq__(self, other):
        if isinstance(other, CirclePoint):
            return self.rep == other.rep
        return NotImplemented

    def __hash__(self):
        return hash(("S1", self.rep))

    def __str__(self):
        return str(self.rep)

    def __repr__(self):
        return f"CirclePoint({self.rep!s})"


def mod1(x) -> CirclePoint:
    """Reduce a dyadic number mod 1 into the fundamental domain [0, 1)."""
    return CirclePoint(x)


def cyclic_order(a: CirclePoint, b: CirclePoint, c: CirclePoint) -> int:
    """Orientation of the triple (a, b, c) on the circle.

    POSITIVE if b lies on the positively-oriented open arc from a to c,
    NEGATIVE if it lies on the complementary open arc, DEGENERATE if any two
    of the arguments coincide.
    """
    x, y, z = a.rep, b.rep, c.rep
    if x == y or y == z or x == z:
        return DEGENERATE
    if (x < y < z) or (y < z < x) or (z < x < y):
        return POSITIVE
    return NEGATIVE
