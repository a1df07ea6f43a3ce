"""Exact scalar arithmetic in Q and in the real field Q(sqrt2, sqrt3).

Every trigonometric constant sin(i*pi/d), cos(i*pi/d) with d in {1, 2, 3, 4, 6}
lies in Q(sqrt2, sqrt3), so all chamber data downstream can be represented
without rounding.  A :class:`FieldScalar` stores the four rational coordinates
of an element with respect to the basis (1, sqrt2, sqrt3, sqrt6).

Rationals are ``gmpy2.mpq`` when available (much faster on large operands),
otherwise ``fractions.Fraction``; both keep values reduced with a positive
denominator.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import UnsupportedCaseError

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Rat = Fraction

ADMISSIBLE_D = (1, 2, 3, 4, 6)

_R0 = Rat(0)
_R1 = Rat(1)


def _rat(value) -> Rat:
    """Coerce an int, string or rational-like value to the Rat backend."""
    if isinstance(value, (int, str)):
        return Rat(value)
    if isinstance(value, Fraction):
        return Rat(value.numerator, value.denominator)
    return Rat(value)


class FieldScalar:
    """An element a + b*sqrt2 + c*sqrt3 + e*sqrt6 with exact rational parts.

    Closed under ring operations; nonzero elements are invertible.  Equality
    is componentwise, which is exact because (1, sqrt2, sqrt3, sqrt6) is a
    Q-basis of the field.
    """

    __slots__ = ("a", "b", "c", "e")

    def __init__(self, a=0, b=0, c=0, e=0):
        self.a = _rat(a)
        self.b = _rat(b)
        self.c = _rat(c)
        self.e = _rat(e)

    @classmethod
    def _raw(cls, a, b, c, e) -> "FieldScalar":
        # Internal fast path: components are already Rat.
        self = object.__new__(cls)
        self.a = a
        self.b = b
        self.c = c
        self.e = e
        return self

    @classmethod
    def rational(cls, p, q=1) -> "FieldScalar":
        return cls._raw(Rat(p) / Rat(q), _R0, _R0, _R0)

    # -- predicates --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.e)

    @property
    def is_rational(self) -> bool:
        return not (self.b or self.c or self.e)

    def __bool__(self) -> bool:
        return not self.is_zero

    # -- ring operations ---------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, FieldScalar):
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(_R0):
            return FieldScalar._raw(_rat(other), _R0, _R0, _R0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldScalar._raw(self.a + o.a, self.b + o.b, self.c + o.c, self.e + o.e)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldScalar._raw(self.a - o.a, self.b - o.b, self.c - o.c, self.e - o.e)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldScalar._raw(-self.a, -self.b, -self.c, -self.e)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, c1, e1 = self.a, self.b, self.c, self.e
        a2, b2, c2, e2 = o.a, o.b, o.c, o.e
        # sqrt2*sqrt3 = sqrt6, sqrt2*sqrt6 = 2*sqrt3, sqrt3*sqrt6 = 3*sqrt2
        return FieldScalar._raw(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * e1 * e2,
            a1 * b2 + b1 * a2 + 3 * (c1 * e2 + e1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * e2 + e1 * b2),
            a1 * e2 + e1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def conj_sqrt2(self) -> "FieldScalar":
        """Galois conjugate sending sqrt2 -> -sqrt2 (fixes sqrt3)."""
        return FieldScalar._raw(self.a, -self.b, self.c, -self.e)

    def conj_sqrt3(self) -> "FieldScalar":
        """Galois conjugate sending sqrt3 -> -sqrt3 (fixes sqrt2)."""
        return FieldScalar._raw(self.a, self.b, -self.c, -self.e)

    def inverse(self) -> "FieldScalar":
        """Multiplicative inverse via the product of the three conjugates.

        u * conj2(u) * conj3(u) * conj23(u) is the rational field norm, so the
        inverse is the conjugate product divided by it.
        """
        if self.is_zero:
            raise ZeroDivisionError("inversion of zero field element")
        conj = self.conj_sqrt2() * self.conj_sqrt3() * self.conj_sqrt2().conj_sqrt3()
        norm = self * conj
        if norm.b or norm.c or norm.e:  # pragma: no cover - algebraic identity
            raise ArithmeticError("field norm is not rational")
        inv_norm = _R1 / norm.a
        return FieldScalar._raw(conj.a * inv_norm, conj.b * inv_norm,
                                conj.c * inv_norm, conj.e * inv_norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a == o.a and self.b == o.b
                and self.c == o.c and self.e == o.e)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.e))

    # -- rendering -----------------------------------------------------------

    def to_text(self) -> str:
        """Canonical serialization "a + b*r2 + c*r3 + e*r6" with "p/q" rationals."""
        return (f"{format_rational(self.a)} + {format_rational(self.b)}*r2 + "
                f"{format_rational(self.c)}*r3 + {format_rational(self.e)}*r6")

    @classmethod
    def from_text(cls, text: str) -> "FieldScalar":
        parts = text.split(" + ")
        if len(parts) != 4:
            raise ValueError(f"not a canonical field scalar: {text!r}")
        comps = []
        for part, suffix in zip(parts, ("", "*r2", "*r3", "*r6")):
            if suffix:
                if not part.endswith(suffix):
                    raise ValueError(f"component {part!r} lacks suffix {suffix!r}")
                part = part[: -len(suffix)]
            comps.append(parse_rational(part))
        return cls._raw(*comps)

    def __repr__(self):
        return f"FieldScalar({self.to_text()})"

    def __str__(self):
        return self.to_text()


ZERO = FieldScalar.rational(0)
ONE = FieldScalar.rational(1)
HALF = FieldScalar.rational(1, 2)
SQRT2 = FieldScalar._raw(_R0, _R1, _R0, _R0)
SQRT3 = FieldScalar._raw(_R0, _R0, _R1, _R0)
SQRT6 = FieldScalar._raw(_R0, _R0, _R0, _R1)


def format_rational(q) -> str:
    """Render a rational as "p/q" (always with the denominator)."""
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Rat:
    num, sep, den = text.partition("/")
    if not sep:
        return Rat(int(num))
    return Rat(int(num), int(den))


# Exact (sin, cos) pairs keyed by the reduced fraction i/d of the angle i*pi/d.
_HALF_R = Rat(1, 2)
_TRIG_TABLE = {
    (0, 1): (ZERO, ONE),
    (1, 6): (HALF, FieldScalar._raw(_R0, _R0, _HALF_R, _R0)),
    (1, 4): (FieldScalar._raw(_R0, _HALF_R, _R0, _R0), FieldScalar._raw(_R0, _HALF_R, _R0, _R0)),
    (1, 3): (FieldScalar._raw(_R0, _R0, _HALF_R, _R0), HALF),
    (1, 2): (ONE, ZERO),
    (2, 3): (FieldScalar._raw(_R0, _R0, _HALF_R, _R0), -HALF),
    (3, 4): (FieldScalar._raw(_R0, _HALF_R, _R0, _R0), FieldScalar._raw(_R0, -_HALF_R, _R0, _R0)),
    (5, 6): (HALF, FieldScalar._raw(_R0, _R0, -_HALF_R, _R0)),
}


def trig_pair(d: int, i: int) -> tuple[FieldScalar, FieldScalar]:
    """Exact (sin(i*pi/d), cos(i*pi/d)) for an admissible chamber type d."""
    if d not in ADMISSIBLE_D:
        raise UnsupportedCaseError(f"chamber type d={d} not in {ADMISSIBLE_D}")
    if not 0 <= i <= d - 1:
        raise ValueError(f"wall index i={i} outside 0..{d - 1}")
    frac = Fraction(i, d)
    return _TRIG_TABLE[(frac.numerator, frac.denominator)]


def embed_real(u: FieldScalar, precision_bits: int = 53) -> mpmath.mpf:
    """Embed a field scalar into the reals at the requested binary precision.

    The result differs from the exact value by less than 2**(-precision_bits+4)
    for operands of moderate magnitude (a few guard bits absorb the four
    roundings of the basis combination).
    """
    if precision_bits < 53:
        raise ValueError("precision_bits must be at least 53")
    with mpmath.workprec(precision_bits + 8):
        r2 = mpmath.sqrt(2)
        r3 = mpmath.sqrt(3)
        value = (_mpf_of(u.a) + _mpf_of(u.b) * r2 + _mpf_of(u.c) * r3
                 + _mpf_of(u.e) * r2 * r3)
    with mpmath.workprec(precision_bits):
        return +value


def _mpf_of(q) -> mpmath.mpf:
    return mpmath.mpf(int(q.numerator)) / mpmath.mpf(int(q.denominator))


def to_float(u: FieldScalar) -> float:
    """Double-precision embedding (convenience wrapper around embed_real)."""
    return float(embed_real(u, 53))
