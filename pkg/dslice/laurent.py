"""
Laurent polynomials over the rationals.

Houses Alexander polynomials, cyclotomic polynomials, gcds over Q[t, 1/t] and
the integral Bezout certificates that witness coprimality. The algebra runs on
sympy polynomials over QQ; LaurentPoly keeps the exponent offset and the
normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import QQ

from .cache import get_polynomial_cache
from .errors import BadFractionError, InvalidAlexanderError, InvalidSeifertError, ZeroPolynomialError
from .linalg import IntMatrix, det

Number = Union[int, Fraction]
Dense = List[Fraction]

T = sympy.Symbol("t")


def to_fraction(value: Union[int, str, Fraction]) -> Fraction:
    """Parse an exact rational from an int or an "a/b" string."""
    if isinstance(value, bool):
        raise BadFractionError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise BadFractionError(f"rationals must be written as integers or a/b, got {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise BadFractionError(f"not a rational: {value!r}") from e
    raise BadFractionError(f"not a rational: {value!r}")


def _rational(value: Number) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class LaurentPoly:
    """
    Laurent polynomial with exact rational coefficients.

    ``terms`` holds (exponent, coefficient) pairs sorted by exponent with zero
    coefficients stripped, so equality of values is equality of polynomials.
    """

    terms: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, mapping: Mapping[int, Number]) -> "LaurentPoly":
        collected: Dict[int, Fraction] = {}
        for exponent, coeff in mapping.items():
            collected[int(exponent)] = collected.get(int(exponent), Fraction(0)) + Fraction(coeff)
        return cls(tuple(sorted((e, c) for e, c in collected.items() if c != 0)))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[Number], low: int = 0) -> "LaurentPoly":
        """Build from ascending coefficients starting at exponent ``low``."""
        return cls.from_dict({low + i: c for i, c in enumerate(coeffs)})

    @classmethod
    def constant(cls, value: Number) -> "LaurentPoly":
        return cls.from_dict({0: value})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def low(self) -> int:
        self._require_nonzero()
        return self.terms[0][0]

    @property
    def degree(self) -> int:
        self._require_nonzero()
        return self.terms[-1][0]

    @property
    def span(self) -> int:
        return self.degree - self.low

    @property
    def leading(self) -> Fraction:
        self._require_nonzero()
        return self.terms[-1][1]

    @property
    def is_unit(self) -> bool:
        """Units of Q[t, 1/t] are the nonzero monomials."""
        return len(self.terms) == 1

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.terms)

    def _require_nonzero(self) -> None:
        if not self.terms:
            raise ZeroPolynomialError("operation undefined on the zero polynomial")

    def coefficient(self, exponent: int) -> Fraction:
        return dict(self.terms).get(exponent, Fraction(0))


    def dense(self) -> Tuple[int, Dense]:
        """(low exponent, ascending coefficient list)."""
        low = self.low
        coeffs = [Fraction(0)] * (self.span + 1)
        for e, c in self.terms:
            coeffs[e - low] = c
        return low, coeffs

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly(tuple((e + k, c) for e, c in self.terms))

    def __add__(self, other: Union["LaurentPoly", Number]) -> "LaurentPoly":
        other = _coerce(other)
        merged = dict(self.terms)
        for e, c in other.terms:
            merged[e] = merged.get(e, Fraction(0)) + c
        return LaurentPoly.from_dict(merged)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: Union["LaurentPoly", Number]) -> "LaurentPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other: Number) -> "LaurentPoly":
        return _coerce(other) - self

    def __mul__(self, other: Union["LaurentPoly", Number]) -> "LaurentPoly":
        other = _coerce(other)
        product: Dict[int, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                product[e1 + e2] = product.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly.from_dict(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "LaurentPoly":
        if exponent < 0:
            raise ValueError("negative powers are only defined for units")
        result = LaurentPoly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "LaurentPoly":
        """p(t) -> p(1/t)"""
        return LaurentPoly(tuple(sorted((-e, c) for e, c in self.terms)))

    def evaluate(self, x: Number) -> Fraction:
        x = Fraction(x)
        if x == 0 and self.terms and self.low < 0:
            raise ZeroDivisionError("negative exponent evaluated at 0")
        return sum((c * x**e for e, c in self.terms), Fraction(0))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.terms):
            magnitude = abs(c)
            if magnitude == 1 and e != 0:
                body = ""
            elif magnitude.denominator == 1:
                body = str(magnitude.numerator)
            else:
                body = f"({magnitude})"
            if e == 0:
                var = ""
            elif e == 1:
                var = "t"
            else:
                var = f"t^{e}"
            term = body + var
            if not parts:
                parts.append(f"-{term}" if c < 0 else term)
            else:
                parts.append(f"- {term}" if c < 0 else f"+ {term}")
        return " ".join(parts)


def _coerce(value: Union[LaurentPoly, Number]) -> LaurentPoly:
    return value if isinstance(value, LaurentPoly) else LaurentPoly.constant(value)


def _to_poly(p: LaurentPoly) -> Tuple[int, sympy.Poly]:
    """(low exponent, p * t^-low as a polynomial over QQ)."""
    low, coeffs = p.dense()
    return low, sympy.Poly.from_list([_rational(c) for c in reversed(coeffs)], T, domain=QQ)


def _from_poly(poly: sympy.Poly, low: int = 0) -> LaurentPoly:
    if poly.is_zero:
        return LaurentPoly()
    coeffs = poly.all_coeffs()
    top = low + len(coeffs) - 1
    return LaurentPoly.from_dict({top - i: _fraction(c) for i, c in enumerate(coeffs)})


def normalize(p: LaurentPoly) -> LaurentPoly:
    """Unit-normalized representative: lowest exponent 0, positive leading coefficient."""
    if p.is_zero:
        raise ZeroPolynomialError("cannot normalize the zero polynomial")
    shifted = p.shift(-p.low)
    return -shifted if shifted.leading < 0 else shifted


@dataclass(frozen=True)
class BezoutCertificate:
    """Integral f1, f2 and positive integer c with f1*p + f2*q = c."""

    f1: LaurentPoly
    f2: LaurentPoly
    c: int

    def verify(self, p: LaurentPoly, q: LaurentPoly) -> bool:
        return (
            self.c > 0
            and self.f1.is_integral
            and self.f2.is_integral
            and (self.f1 * p + self.f2 * q) == LaurentPoly.constant(self.c)
        )


def gcd_bezout(p: LaurentPoly, q: LaurentPoly) -> Tuple[LaurentPoly, Optional[BezoutCertificate]]:
    """
    gcd over Q[t, 1/t] with an integral Bezout certificate when it is a unit.

    The gcd is returned monic with lowest exponent 0. When it is 1, the
    rational cofactors s, t of s*p + t*q = 1 are scaled by the least common
    denominator c of their coefficients, giving f1*p + f2*q = c with f1, f2
    integral.
    """
    if p.is_zero or q.is_zero:
        raise ZeroPolynomialError("gcd of the zero polynomial")
    low_p, a = _to_poly(p)
    low_q, b = _to_poly(q)
    s, t, h = a.gcdex(b)
    gcd = _from_poly(h)
    if h.degree() > 0:
        return gcd, None

    f1 = _from_poly(s, -low_p)
    f2 = _from_poly(t, -low_q)
    c = lcm(1, *(coeff.denominator for _, coeff in f1.terms + f2.terms))
    return gcd, BezoutCertificate(f1=f1 * c, f2=f2 * c, c=c)


def coprime(p: LaurentPoly, q: LaurentPoly) -> bool:
    gcd, _ = gcd_bezout(p, q)
    return gcd.is_unit


def divide_exact(p: LaurentPoly, d: LaurentPoly) -> Optional[LaurentPoly]:
    """p / d when d divides p in Q[t, 1/t], else None."""
    if d.is_zero:
        raise ZeroPolynomialError("division by the zero polynomial")
    if p.is_zero:
        return LaurentPoly()
    low_p, a = _to_poly(p)
    low_d, b = _to_poly(d)
    quotient, remainder = a.div(b)
    if not remainder.is_zero:
        return None
    return _from_poly(quotient, low_p - low_d)


@get_polynomial_cache().memoize()
def cyclotomic(n: int) -> LaurentPoly:
    """The n-th cyclotomic polynomial phi_n."""
    if n < 1:
        raise ValueError(f"cyclotomic index must be positive, got {n}")
    return _from_poly(sympy.Poly(sympy.cyclotomic_poly(n, T), T, domain=QQ))


def cyclotomic_factors(p: LaurentPoly) -> Tuple[Tuple[Tuple[int, int], ...], LaurentPoly]:
    """
    Split off cyclotomic factors by exact division.

    Returns ((n, multiplicity), ...) in increasing n together with the
    normalized cofactor. No further factorization is attempted.
    """
    rest = normalize(p)
    found = []
    # phi(n) >= sqrt(n/2), so only n <= 2*deg^2 can divide
    bound = max(2 * rest.degree**2, 2)
    for n in range(1, bound + 1):
        if rest.degree == 0:
            break
        phi = cyclotomic(n)
        if phi.degree > rest.degree:
            continue
        multiplicity = 0
        while rest.degree >= phi.degree:
            quotient = divide_exact(rest, phi)
            if quotient is None:
                break
            rest = quotient
            multiplicity += 1
        if multiplicity:
            found.append((n, multiplicity))
    return tuple(found), normalize(rest)


def format_cyclotomic_factors(p: LaurentPoly) -> str:
    factors, rest = cyclotomic_factors(p)
    pieces = [f"phi_{n}^{m}" if m > 1 else f"phi_{n}" for n, m in factors]
    if rest != LaurentPoly.constant(1) or not pieces:
        pieces.append(f"({rest})")
    return " * ".join(pieces)


def check_seifert(V: IntMatrix) -> None:
    """Raise InvalidSeifertError unless V is square and V - V^T is unimodular."""
    if not V.is_square:
        raise InvalidSeifertError(f"Seifert matrix must be square, got {V.rows}x{V.cols}")
    if V.rows % 2:
        raise InvalidSeifertError(f"Seifert matrix must have even size, got {V.rows}")
    if abs(det(V - V.transpose())) != 1:
        raise InvalidSeifertError("V - V^T is not unimodular")


def alexander_from_seifert(V: IntMatrix) -> LaurentPoly:
    """Normalized det(V - t V^T)."""
    check_seifert(V)
    M = sympy.Matrix(V.rows, V.cols, [sympy.Integer(x) for row in V.to_lists() for x in row])
    delta = (M - T * M.T).det(method="berkowitz")
    result = normalize(_from_poly(sympy.Poly(sympy.expand(delta), T, domain=QQ)))
    if abs(result.evaluate(1)) != 1:
        raise InvalidSeifertError("Alexander polynomial does not satisfy |Delta(1)| = 1")
    return result


def resultant_order(delta: LaurentPoly, q: int) -> int:
    """|res(Delta, 1 + t + ... + t^(q-1))|, the order of H_1 of the q-fold branched cover."""
    if delta.is_zero:
        raise InvalidAlexanderError("Alexander polynomial is zero")
    if abs(delta.evaluate(1)) != 1:
        raise InvalidAlexanderError(f"Delta(1) must be +-1, got {delta.evaluate(1)}")
    if q < 1:
        raise ValueError(f"cover degree must be positive, got {q}")
    normal = normalize(delta)
    if not normal.is_integral:
        raise InvalidAlexanderError("Alexander polynomial must have integer coefficients")
    _, a = _to_poly(normal)
    b = sympy.Poly.from_list([1] * q, T, domain=QQ)
    return abs(int(a.resultant(b)))
