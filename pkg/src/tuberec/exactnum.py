"""Exact numbers of the form a + b*sqrt(d) with rational a, b and integer d >= 0.

The exact_rational spaces compare squared distances, which keeps almost all
arithmetic inside Q.  The one construction that genuinely leaves Q is the
cross-strip offset of a tape row: row i of an order-p tape sits at height
i*sqrt(4p-1)/(2p).  A single quadratic extension is enough to keep every
comparison exact, so that is all this module supports: numbers from one
Q(sqrt(d)) at a time, with d canonicalized square-free.  Mixing two distinct
irrational radicands raises; nothing in the package ever needs it.

Floats never mix with QNum.  Exact mode stays exact or fails loudly.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = ["QNum", "qnum", "exact_sqrt", "IncompatibleRadicals"]


class IncompatibleRadicals(TypeError):
    """Arithmetic attempted between numbers from different Q(sqrt(d))."""


@lru_cache(maxsize=None)
def _squarefree(d: int) -> tuple[int, int]:
    """d = f*f * s with s square-free; returns (s, f)."""
    if d < 0:
        raise ValueError("negative radicand")
    f = 1
    i = 2
    while i * i <= d:
        while d % (i * i) == 0:
            d //= i * i
            f *= i
        i += 1
    return d, f


_F0 = Fraction(0)


def _coerce(x):
    if isinstance(x, QNum):
        return x
    if isinstance(x, (int, Fraction)):
        return QNum._mk(Fraction(x), _F0, 0)
    return NotImplemented


class QNum:
    """Immutable a + b*sqrt(d); d square-free, d == 0 iff b == 0."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=0):
        a = Fraction(a)
        b = Fraction(b)
        if b != 0 and d > 1:
            s, f = _squarefree(d)
            if s <= 1:
                a, b, d = a + b * f * s, Fraction(0), 0
            else:
                b, d = b * f, s
        elif b != 0 and d == 1:
            a, b, d = a + b, Fraction(0), 0
        elif b == 0:
            d = 0
        else:  # b != 0, d == 0: b*sqrt(0) = 0
            b, d = Fraction(0), 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("QNum is immutable")

    @classmethod
    def _mk(cls, a: Fraction, b: Fraction, d: int) -> "QNum":
        # internal: a, b already Fractions, d already square-free > 1 or 0
        out = object.__new__(cls)
        object.__setattr__(out, "a", a)
        if b:
            object.__setattr__(out, "b", b)
            object.__setattr__(out, "d", d)
        else:
            object.__setattr__(out, "b", _F0)
            object.__setattr__(out, "d", 0)
        return out

    # -- radicand reconciliation ------------------------------------------
    def _join(self, other: "QNum") -> int:
        if self.d == 0:
            return other.d
        if other.d == 0 or other.d == self.d:
            return self.d
        raise IncompatibleRadicals(f"sqrt({self.d}) vs sqrt({other.d})")

    # -- ring ops ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join(other)
        return QNum._mk(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QNum._mk(-self.a, -self.b, self.d)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join(other)
        return QNum._mk(self.a - other.a, self.b - other.b, d)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join(other)
        return QNum._mk(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join(other)
        # conjugate: (a - b sqrt d); norm a^2 - b^2 d
        n = other.a * other.a - other.b * other.b * d
        if n == 0:
            raise ZeroDivisionError("division by zero QNum")
        conj = QNum._mk(other.a, -other.b, d)
        num = self * conj
        return QNum._mk(num.a / n, num.b / n, num.d)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    # -- order -------------------------------------------------------------
    def sign(self) -> int:
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 vs b^2 d
        t = a * a - b * b * d
        if a > 0:  # b < 0
            return (t > 0) - (t < 0)
        return (t < 0) - (t > 0)

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare QNum with {type(other)}")
        return (self - other).sign()

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- conversions ---------------------------------------------------------
    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self!r} is irrational")
        return self.a

    def __repr__(self):
        if self.b == 0:
            return f"QNum({self.a})"
        return f"QNum({self.a} + {self.b}*sqrt({self.d}))"


def qnum(x) -> QNum:
    """Coerce int/Fraction/str/QNum to QNum (floats are refused)."""
    if isinstance(x, QNum):
        return x
    if isinstance(x, float):
        raise TypeError("refusing float -> QNum; exact mode takes rationals")
    return QNum(Fraction(x))


def _frac_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, m = q.numerator, q.denominator
    rn, rm = math.isqrt(n), math.isqrt(m)
    if rn * rn == n and rm * rm == m:
        return Fraction(rn, rm)
    return None


def exact_sqrt(x) -> QNum | None:
    """Exact square root of a *rational* QNum, as a QNum, else None.

    sqrt(n/m) = sqrt(n*m)/m, so every nonnegative rational has an exact
    QNum square root.  Irrational-part inputs return None (callers fall
    back to float); nothing in the package needs nested radicals.
    """
    x = qnum(x)
    if x.sign() < 0:
        raise ValueError("sqrt of negative")
    if not x.is_rational:
        return None
    q = x.as_fraction()
    r = _frac_sqrt(q)
    if r is not None:
        return QNum(r)
    nm = q.numerator * q.denominator
    return QNum(0, Fraction(1, q.denominator), nm)
