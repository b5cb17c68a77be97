"""Exact scalar arithmetic for the Fock laboratory.

Amplitudes in the lab are Gaussian rationals (QC).  A few operators (the
boson ladder operators) additionally carry a global sqrt of a positive
rational; that factor lives on the operator, not on individual entries, so
entry arithmetic stays in Q(i).
"""

from __future__ import annotations

import math
from fractions import Fraction


class QC:
    """Gaussian rational (a + i b) / d on raw integer triples.

    Denominators stay unreduced through arithmetic (with a same-denominator
    fast path, the dominant case in the lab) and are normalized on demand;
    all comparisons are cross-multiplied, so results are always exact.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, re=0, im=0):
        if isinstance(re, int) and isinstance(im, int):
            self.a, self.b, self.d = re, im, 1
            return
        fre = re if isinstance(re, Fraction) else Fraction(re)
        fim = im if isinstance(im, Fraction) else Fraction(im)
        self.d = fre.denominator * fim.denominator
        self.a = fre.numerator * fim.denominator
        self.b = fim.numerator * fre.denominator

    @classmethod
    def _raw(cls, a, b, d):
        out = cls.__new__(cls)
        out.a, out.b, out.d = a, b, d
        return out

    @property
    def re(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.b, self.d)

    def __add__(self, other):
        if self.d == other.d:
            return QC._raw(self.a + other.a, self.b + other.b, self.d)
        return QC._raw(self.a * other.d + other.a * self.d,
                       self.b * other.d + other.b * self.d,
                       self.d * other.d)

    def __sub__(self, other):
        if self.d == other.d:
            return QC._raw(self.a - other.a, self.b - other.b, self.d)
        return QC._raw(self.a * other.d - other.a * self.d,
                       self.b * other.d - other.b * self.d,
                       self.d * other.d)

    def __neg__(self):
        return QC._raw(-self.a, -self.b, self.d)

    def __mul__(self, other):
        if not isinstance(other, QC):
            other = QC(other)
        return QC._raw(self.a * other.a - self.b * other.b,
                       self.a * other.b + self.b * other.a,
                       self.d * other.d)

    __rmul__ = __mul__

    def conj(self):
        return QC._raw(self.a, -self.b, self.d)

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def normalized(self):
        if self.a == 0 and self.b == 0:
            return QC._raw(0, 0, 1)
        g = math.gcd(math.gcd(abs(self.a), abs(self.b)), self.d)
        if g > 1:
            return QC._raw(self.a // g, self.b // g, self.d // g)
        return self

    def l1(self) -> Fraction:
        """Exact L1 magnitude |re| + |im|; zero iff the number is zero."""
        return Fraction(abs(self.a) + abs(self.b), self.d)

    def __eq__(self, other):
        return (self.a * other.d == other.a * self.d
                and self.b * other.d == other.b * self.d)

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QC({self.re}, {self.im})"

    def __complex__(self):
        return (self.a + 1j * self.b) / self.d


QC_ZERO = QC(0)
QC_ONE = QC(1)
QC_I = QC(0, 1)


def sqrt_reduce(s: Fraction):
    """Split a nonnegative rational s as q^2 * s' with s' squarefree-ish.

    Returns (q, s') such that sqrt(s) = q * sqrt(s'); s' has no square
    factor in numerator or denominator that fits a small trial division.
    """
    if s < 0:
        raise ValueError("radicand must be nonnegative")
    if s == 0:
        return Fraction(0), Fraction(1)

    def split_sq(n: int):
        q, rest, d = 1, 1, 2
        while d * d <= n:
            while n % (d * d) == 0:
                n //= d * d
                q *= d
            if n % d == 0:
                n //= d
                rest *= d
            d += 1
        return q, rest * n

    qn, rn = split_sq(s.numerator)
    qd, rd = split_sq(s.denominator)
    return Fraction(qn, qd * rd), Fraction(rn * rd)
