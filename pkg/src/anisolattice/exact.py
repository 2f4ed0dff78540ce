"""Exact arithmetic in Q and in a real quadratic field Q(sqrt(d)).

Every membership decision in the package goes through :func:`sign`, which
never touches floating point.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "QuadScalar",
    "FieldMismatchError",
    "as_fraction",
    "parse_rational",
    "parse_scalar",
    "sign",
    "sign_parts",
    "to_float",
    "format_rational",
]


class FieldMismatchError(ValueError):
    """Raised when values from two different quadratic fields are combined."""


def _is_squarefree(d: int) -> bool:
    if d < 0:
        return False
    if d < 4:
        return True
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, QuadScalar):
        if x.b != 0:
            raise ValueError(f"{x} is not rational")
        return x.a
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def sign_parts(a, b, d: int) -> int:
    """Exact sign of ``a + b*sqrt(d)`` for rational (or integer) a, b."""
    sa, sb = _sgn(a), _sgn(b)
    if sb == 0 or d == 0:
        return sa
    if d == 1:
        return _sgn(a + b)
    if sa >= 0 and sb >= 0:
        return 1
    if sa <= 0 and sb <= 0:
        return -1
    # opposite signs: compare a^2 against b^2 d
    diff = a * a - b * b * d
    return sa * _sgn(diff)


class QuadScalar:
    """The number ``a + b*sqrt(d)`` with rational a, b and squarefree d >= 0.

    Values with ``d`` in {0, 1} are plain rationals; they combine freely
    with any field.  Two values from fields with different ``d >= 2``
    cannot be mixed.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 0):
        if not isinstance(d, int) or not _is_squarefree(d):
            raise ValueError(f"d must be a squarefree nonnegative integer, got {d!r}")
        a = as_fraction(a)
        b = as_fraction(b)
        if d == 1:
            a, b = a + b, Fraction(0)
        elif d == 0:
            b = Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> "QuadScalar":
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "d", d)
        return obj

    # -- coercion ---------------------------------------------------------

    def _common(self, other):
        if isinstance(other, QuadScalar):
            if other.d == self.d or other.d < 2:
                return self.d, other.a, other.b
            if self.d < 2:
                return other.d, other.a, other.b
            raise FieldMismatchError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
        if isinstance(other, (int, Fraction)):
            return self.d, Fraction(other), Fraction(0)
        if isinstance(other, Rational):
            return self.d, Fraction(other.numerator, other.denominator), Fraction(0)
        return None

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        d, oa, ob = c
        return QuadScalar._raw(self.a + oa, self.b + ob, d)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        d, oa, ob = c
        return QuadScalar._raw(self.a - oa, self.b - ob, d)

    def __rsub__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        d, oa, ob = c
        return QuadScalar._raw(oa - self.a, ob - self.b, d)

    def __mul__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        d, oa, ob = c
        a, b = self.a, self.b
        if ob == 0:
            return QuadScalar._raw(a * oa, b * oa, d)
        return QuadScalar._raw(a * oa + b * ob * d, a * ob + b * oa, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        d, oa, ob = c
        return QuadScalar._raw(self.a, self.b, d) * _inverse(oa, ob, d)

    def __rtruediv__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        d, oa, ob = c
        return QuadScalar._raw(oa, ob, d) * _inverse(self.a, self.b, d)

    def __neg__(self):
        return QuadScalar._raw(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return (1 / self) ** (-e)
        result = QuadScalar._raw(Fraction(1), Fraction(0), self.d)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "QuadScalar":
        return QuadScalar._raw(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    # -- comparisons ------------------------------------------------------

    def sign(self) -> int:
        return sign_parts(self.a, self.b, self.d)

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, Rational):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        diff = self - other
        if diff is NotImplemented:
            raise TypeError
        return diff.sign()

    def __lt__(self, other):
        if self._common(other) is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if self._common(other) is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if self._common(other) is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if self._common(other) is None:
            return NotImplemented
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return to_float(self)

    def is_rational(self) -> bool:
        return self.b == 0

    # -- text -------------------------------------------------------------

    def __str__(self):
        if self.b == 0:
            return format_rational(self.a)
        tail = f"{format_rational(abs(self.b))}*sqrt({self.d})"
        if self.a == 0:
            return tail if self.b > 0 else "-" + tail
        op = "+" if self.b > 0 else "-"
        return f"{format_rational(self.a)}{op}{tail}"

    def __repr__(self):
        return f"QuadScalar('{self}')"


def _inverse(a: Fraction, b: Fraction, d: int) -> QuadScalar:
    if b == 0:
        if a == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        return QuadScalar._raw(1 / a, Fraction(0), d)
    n = a * a - b * b * d
    if n == 0:
        # only possible when a = b = 0 since d is not a perfect square
        raise ZeroDivisionError("division by zero in Q(sqrt(d))")
    return QuadScalar._raw(a / n, -b / n, d)


def sign(x) -> int:
    """Exact sign of a rational or quadratic scalar: -1, 0 or +1."""
    if isinstance(x, QuadScalar):
        return x.sign()
    return _sgn(x)


def _bracket(x: QuadScalar, k: int) -> tuple[Fraction, Fraction]:
    """Rationals lo <= x <= hi with hi - lo <= 2**-k * (1 + |b|)."""
    if x.b == 0 or x.d == 0:
        return x.a, x.a
    bn, bd = x.b.numerator, x.b.denominator
    s = math.isqrt(bn * bn * x.d << (2 * k))
    lo_root = Fraction(s, bd << k)
    hi_root = Fraction(s + 1, bd << k)
    if bn > 0:
        return x.a + lo_root, x.a + hi_root
    return x.a - hi_root, x.a - lo_root


def to_float(x, precision_bits: int = 53):
    """Approximate ``x`` with relative error at most ``2**(1 - precision_bits)``.

    Returns a Python float for ``precision_bits <= 53`` and an
    ``mpmath.mpf`` at the requested working precision otherwise.
    """
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    if not isinstance(x, QuadScalar):
        x = QuadScalar(x)
    s = x.sign()
    if s == 0:
        return 0.0
    k = precision_bits + 16
    tol = Fraction(1, 1 << (precision_bits + 2))
    while True:
        lo, hi = _bracket(x, k)
        if _sgn(lo) == _sgn(hi) == s and hi - lo <= tol * min(abs(lo), abs(hi)):
            mid = (lo + hi) / 2
            break
        k *= 2
    if precision_bits <= 53:
        return float(mid)
    import mpmath

    with mpmath.workprec(precision_bits):
        return mpmath.mpf(mid.numerator) / mid.denominator


# -- text syntax ------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_SQRT_TERM_RE = re.compile(
    r"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<d>\d+)\s*\)(?:\s*/\s*(?P<div>\d+))?$"
)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    """Parse ``"p"`` or ``"p/q"``; decimals and floats are rejected."""
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a 'p/q' string, got {text!r}")
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not an exact rational: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


_TERM_RE = re.compile(r"([+-]?)([^+-]+)")


def _split_signed_terms(text: str) -> list[tuple[int, str]]:
    terms = _TERM_RE.findall(text)
    if "".join(s + t for s, t in terms) != text:
        raise ValueError(f"malformed scalar {text!r}")
    return [(-1 if s == "-" else 1, t) for s, t in terms]


def parse_scalar(text, d: int | None = None) -> QuadScalar:
    """Parse ``"p/q"`` or ``"p/q+r/s*sqrt(d)"`` (and simple variants) exactly.

    Non-squarefree radicands are reduced, e.g. ``sqrt(8)`` becomes ``2*sqrt(2)``.
    If ``d`` is given the result is placed in that field, and a conflicting
    radicand raises :class:`FieldMismatchError`.
    """
    if isinstance(text, QuadScalar):
        out = text
    elif isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        out = QuadScalar(text)
    elif isinstance(text, str):
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        a = Fraction(0)
        b = Fraction(0)
        field = 0
        for sgn, term in _split_signed_terms(s):
            m = _SQRT_TERM_RE.match(term)
            if m:
                coef = parse_rational(m.group("coef")) if m.group("coef") else Fraction(1)
                if m.group("div"):
                    div = int(m.group("div"))
                    if div == 0:
                        raise ValueError(f"zero denominator in {text!r}")
                    coef /= div
                rad = int(m.group("d"))
                root, rad = _extract_square(rad)
                coef *= root
                if rad == 0:
                    continue
                if rad == 1:
                    a += sgn * coef
                    continue
                if field not in (0, rad):
                    raise FieldMismatchError(f"two radicands in {text!r}")
                field = rad
                b += sgn * coef
            else:
                a += sgn * parse_rational(term)
        out = QuadScalar(a, b, field)
    else:
        raise ValueError(f"cannot parse scalar from {text!r}")
    if d is not None:
        if out.b != 0 and out.d != d:
            raise FieldMismatchError(f"{out} is not in Q(sqrt({d}))")
        out = QuadScalar._raw(out.a, out.b, d) if d >= 2 else QuadScalar(out.a, 0, d)
    return out


def _extract_square(n: int) -> tuple[int, int]:
    """Write n = s^2 * m with m squarefree; return (s, m)."""
    if n == 0:
        return 0, 0
    s, m = 1, n
    f = 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            s *= f
        f += 1
    return s, m
