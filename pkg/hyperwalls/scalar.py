"""
Exact scalars for wall arithmetic.

The tower used everywhere else in the package:

    Fraction  ->  FieldElem (Q(sqrt2, sqrt5))  ->  ParamScalar (F[t]/(t^2 - r))
                                              ->  LaurentParam (F[t, 1/t], t formal)

plus a certified sign oracle (mpmath interval arithmetic) and a float backend.
"""

from __future__ import annotations

import ast
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from mpmath.ctx_iv import MPIntervalContext

from hyperwalls.errors import DimensionMismatchError, LiteralError, PreconditionError

logger = logging.getLogger(__name__)

Rational = Fraction

FLOAT_TOL = 1e-9
DEFAULT_SCHEDULE = (64, 256, 1024)


def rational_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise LiteralError(f"invalid rational {text!r}") from exc


def _sqrt_rational(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    a, b = math.isqrt(num), math.isqrt(den)
    if a * a == num and b * b == den:
        return Fraction(a, b)
    return None


def _sqrt_in_q5(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction] | None:
    """Square root of a + b*sqrt5 inside Q(sqrt5), as (p, q) with (p + q*sqrt5)^2 = a + b*sqrt5."""
    if b == 0:
        root = _sqrt_rational(a)
        if root is not None:
            return root, Fraction(0)
        root = _sqrt_rational(a / 5)
        if root is not None:
            return Fraction(0), root
        return None
    disc = _sqrt_rational(a * a - 5 * b * b)
    if disc is None:
        return None
    for p_sq in ((a + disc) / 2, (a - disc) / 2):
        p = _sqrt_rational(p_sq)
        if p:
            return p, b / (2 * p)
    return None


class FieldElem:
    """
    Element c1 + c2*sqrt2 + c5*sqrt5 + c10*sqrt10 of F = Q(sqrt2, sqrt5).

    Immutable; equality is exact coefficient equality.
    """

    __slots__ = ("c1", "c2", "c5", "c10")

    def __init__(self, c1=0, c2=0, c5=0, c10=0):
        object.__setattr__(self, "c1", Fraction(c1))
        object.__setattr__(self, "c2", Fraction(c2))
        object.__setattr__(self, "c5", Fraction(c5))
        object.__setattr__(self, "c10", Fraction(c10))

    @classmethod
    def _raw(cls, c1: Fraction, c2: Fraction, c5: Fraction, c10: Fraction) -> FieldElem:
        obj = object.__new__(cls)
        object.__setattr__(obj, "c1", c1)
        object.__setattr__(obj, "c2", c2)
        object.__setattr__(obj, "c5", c5)
        object.__setattr__(obj, "c10", c10)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.c1, self.c2, self.c5, self.c10)

    @property
    def is_rational(self) -> bool:
        return self.c2 == 0 and self.c5 == 0 and self.c10 == 0

    @property
    def is_integer(self) -> bool:
        return self.is_rational and self.c1.denominator == 1

    def is_zero(self) -> bool:
        return self.c1 == 0 and self.c2 == 0 and self.c5 == 0 and self.c10 == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"FieldElem({self.c1}, {self.c2}, {self.c5}, {self.c10})"

    def __str__(self) -> str:
        parts = []
        for coeff, name in zip(self.coefficients, ("", "sqrt2", "sqrt5", "sqrt10")):
            if coeff == 0:
                continue
            if not name:
                parts.append(f"{coeff}")
            elif coeff == 1:
                parts.append(name)
            elif coeff == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"({coeff})*{name}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self.c1)
        return hash(self.coefficients)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return FieldElem._raw(self.c1 + other.c1, self.c2 + other.c2,
                              self.c5 + other.c5, self.c10 + other.c10)

    __radd__ = __add__

    def __neg__(self) -> FieldElem:
        return FieldElem._raw(-self.c1, -self.c2, -self.c5, -self.c10)

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return FieldElem._raw(self.c1 - other.c1, self.c2 - other.c2,
                              self.c5 - other.c5, self.c10 - other.c10)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def _scale(self, q: Fraction) -> FieldElem:
        return FieldElem._raw(self.c1 * q, self.c2 * q, self.c5 * q, self.c10 * q)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.is_rational:
            return self._scale(other.c1)
        if self.is_rational:
            return other._scale(self.c1)
        a1, a2, a5, a10 = self.coefficients
        b1, b2, b5, b10 = other.coefficients
        # sqrt2*sqrt5 = sqrt10, sqrt2*sqrt10 = 2*sqrt5, sqrt5*sqrt10 = 5*sqrt2
        return FieldElem._raw(
            a1 * b1 + 2 * a2 * b2 + 5 * a5 * b5 + 10 * a10 * b10,
            a1 * b2 + a2 * b1 + 5 * (a5 * b10 + a10 * b5),
            a1 * b5 + a5 * b1 + 2 * (a2 * b10 + a10 * b2),
            a1 * b10 + a10 * b1 + a2 * b5 + a5 * b2,
        )

    __rmul__ = __mul__

    def conj2(self) -> FieldElem:
        """Galois conjugate sqrt2 -> -sqrt2."""
        return FieldElem._raw(self.c1, -self.c2, self.c5, -self.c10)

    def conj5(self) -> FieldElem:
        """Galois conjugate sqrt5 -> -sqrt5."""
        return FieldElem._raw(self.c1, self.c2, -self.c5, -self.c10)

    def inverse(self) -> FieldElem:
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(sqrt2, sqrt5)")
        if self.is_rational:
            return FieldElem._raw(1 / self.c1, Fraction(0), Fraction(0), Fraction(0))
        flip2 = self.conj2()
        in_q5 = self * flip2
        flip5 = in_q5.conj5()
        norm = (in_q5 * flip5).c1
        return (flip2 * flip5)._scale(1 / norm)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.is_rational:
            if other.c1 == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt2, sqrt5)")
            return self._scale(1 / other.c1)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> FieldElem:
        if exponent < 0:
            return self.inverse() ** -exponent
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __float__(self) -> float:
        return (float(self.c1) + float(self.c2) * math.sqrt(2)
                + float(self.c5) * math.sqrt(5) + float(self.c10) * math.sqrt(10))

    def _sqrt_in_k(self) -> FieldElem | None:
        root = _sqrt_in_q5(self.c1, self.c5)
        if root is None:
            return None
        return FieldElem._raw(root[0], Fraction(0), root[1], Fraction(0))

    def sqrt(self) -> FieldElem | None:
        """Positive square root inside F, or None when it leaves the field."""
        if self.is_zero():
            return ZERO
        u = FieldElem._raw(self.c1, Fraction(0), self.c5, Fraction(0))
        v = FieldElem._raw(self.c2, Fraction(0), self.c10, Fraction(0))
        candidate = None
        if v.is_zero():
            candidate = u._sqrt_in_k()
            if candidate is None:
                half = u._sqrt_in_k_of(Fraction(1, 2))
                if half is not None:
                    candidate = half * SQRT2
        else:
            disc = (u * u - 2 * v * v)._sqrt_in_k()
            if disc is not None:
                for p_sq in ((u + disc) / 2, (u - disc) / 2):
                    p = p_sq._sqrt_in_k()
                    if p:
                        candidate = p + (v / (2 * p)) * SQRT2
                        break
        if candidate is None or candidate * candidate != self:
            return None
        if float(candidate) < 0:
            candidate = -candidate
        return candidate

    def _sqrt_in_k_of(self, factor: Fraction) -> FieldElem | None:
        return self._scale(factor)._sqrt_in_k()

    def to_json(self) -> list[str]:
        return [rational_to_str(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, data) -> FieldElem:
        if isinstance(data, str):
            return parse_exact(data)
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            return cls(Fraction(data))
        if len(data) != 4:
            raise LiteralError(f"field element needs 4 coefficients, got {data!r}")
        return cls(*(rational_from_str(str(c)) for c in data))


def _coerce(x) -> FieldElem | None:
    if isinstance(x, FieldElem):
        return x
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        return FieldElem._raw(q, Fraction(0), Fraction(0), Fraction(0))
    return None


ZERO = FieldElem(0)
ONE = FieldElem(1)
SQRT2 = FieldElem(0, 1)
SQRT5 = FieldElem(0, 0, 1)
SQRT10 = FieldElem(0, 0, 0, 1)


def field_arith(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown field operation {op!r}")


@lru_cache(maxsize=None)
def _check_parameter(r: FieldElem) -> None:
    if sign_of(r) is not Sign.POSITIVE:
        raise PreconditionError(f"t^2 must be positive, got {r}")
    if r.sqrt() is not None:
        raise PreconditionError(f"t^2 = {r} is a square in F; use the field element directly")


def param_scalar(even, odd, r) -> FieldElem | ParamScalar:
    """even + odd*t with t^2 = r, folded into F when r has a square root there."""
    r = _coerce(r)
    root = r.sqrt()
    if root is not None:
        return _coerce(even) + _coerce(odd) * root
    return ParamScalar(even, odd, r)


class ParamScalar:
    """
    even + odd*t with t^2 = r, r > 0 and r not a square in F.

    The quotient F[t]/(t^2 - r) is then a field, so division is total on nonzero values.
    Square r is refused; ``param_scalar`` folds those values into F instead.
    """

    __slots__ = ("even", "odd", "r")

    def __init__(self, even, odd, r):
        r = _coerce(r)
        _check_parameter(r)
        object.__setattr__(self, "even", _coerce(even))
        object.__setattr__(self, "odd", _coerce(odd))
        object.__setattr__(self, "r", r)

    def _make(self, even: FieldElem, odd: FieldElem) -> ParamScalar:
        out = object.__new__(ParamScalar)
        object.__setattr__(out, "even", even)
        object.__setattr__(out, "odd", odd)
        object.__setattr__(out, "r", self.r)
        return out

    def __setattr__(self, name, value):
        raise AttributeError("ParamScalar is immutable")

    def _lift(self, other) -> ParamScalar | None:
        if isinstance(other, ParamScalar):
            if other.r != self.r:
                raise DimensionMismatchError(f"parameters differ: t^2 = {self.r} vs {other.r}")
            return other
        value = _coerce(other)
        if value is None:
            return None
        return self._make(value, ZERO)

    def is_zero(self) -> bool:
        return self.even.is_zero() and self.odd.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"ParamScalar({self.even!s} + ({self.odd!s})*t; t^2 = {self.r!s})"

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.even == other.even and self.odd == other.odd

    def __hash__(self) -> int:
        if self.odd.is_zero():
            return hash(self.even)
        return hash((self.even, self.odd, self.r))

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self._make(self.even + other.even, self.odd + other.odd)

    __radd__ = __add__

    def __neg__(self) -> ParamScalar:
        return self._make(-self.even, -self.odd)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self._make(self.even - other.even, self.odd - other.odd)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.odd.is_zero():
            return self._make(self.even * other.even, self.odd * other.even)
        if self.odd.is_zero():
            return self._make(self.even * other.even, self.even * other.odd)
        return self._make(
            self.even * other.even + self.odd * other.odd * self.r,
            self.even * other.odd + self.odd * other.even,
        )

    __rmul__ = __mul__

    def inverse(self) -> ParamScalar:
        if self.odd.is_zero():
            return self._make(self.even.inverse(), ZERO)
        # the norm vanishes only at zero since r is not a square
        inv = (self.even * self.even - self.odd * self.odd * self.r).inverse()
        return self._make(self.even * inv, -self.odd * inv)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> ParamScalar:
        if exponent < 0:
            return self.inverse() ** -exponent
        result, base = self._make(ONE, ZERO), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __float__(self) -> float:
        return float(self.even) + float(self.odd) * math.sqrt(float(self.r))

    def to_json(self) -> dict:
        return {"even": self.even.to_json(), "odd": self.odd.to_json(), "r": self.r.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> FieldElem | ParamScalar:
        try:
            return param_scalar(FieldElem.from_json(data["even"]), FieldElem.from_json(data["odd"]),
                                FieldElem.from_json(data["r"]))
        except KeyError as exc:
            raise LiteralError(f"parameter scalar is missing {exc}") from exc


class LaurentParam:
    """Laurent polynomial in a formal positive parameter t with coefficients in F."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        cleaned = {}
        for exp, coeff in (terms or {}).items():
            value = _coerce(coeff)
            if value is None:
                raise TypeError(f"Laurent coefficient must be exact, got {type(coeff).__name__}")
            coeff = value
            if not coeff.is_zero():
                cleaned[int(exp)] = coeff
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentParam is immutable")

    @classmethod
    def t(cls) -> LaurentParam:
        return cls({1: ONE})

    @classmethod
    def constant(cls, value) -> LaurentParam:
        return cls({0: value})

    def _lift(self, other) -> LaurentParam | None:
        if isinstance(other, LaurentParam):
            return other
        value = _coerce(other)
        if value is None:
            return None
        return LaurentParam({0: value})

    def coefficient(self, exp: int) -> FieldElem:
        return self.terms.get(exp, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "LaurentParam(0)"
        body = " + ".join(f"({c!s})*t^{e}" for e, c in sorted(self.terms.items()))
        return f"LaurentParam({body})"

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for exp, coeff in other.terms.items():
            terms[exp] = terms.get(exp, ZERO) + coeff
        return LaurentParam(terms)

    __radd__ = __add__

    def __neg__(self) -> LaurentParam:
        return LaurentParam({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms: dict[int, FieldElem] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, ZERO) + c1 * c2
        return LaurentParam(terms)

    __rmul__ = __mul__

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if not other.is_monomial():
            raise ZeroDivisionError("formal division only by monomials c*t^k")
        (exp, coeff), = other.terms.items()
        inv = coeff.inverse()
        return LaurentParam({e - exp: c * inv for e, c in self.terms.items()})

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> LaurentParam:
        if exponent < 0:
            return LaurentParam.constant(ONE) / (self ** -exponent)
        result = LaurentParam.constant(ONE)
        for _ in range(exponent):
            result = result * self
        return result

    def substitute_inverse(self) -> LaurentParam:
        """p(t) -> p(1/t)."""
        return LaurentParam({-e: c for e, c in self.terms.items()})

    def evaluate(self, r) -> ParamScalar | FieldElem:
        return laurent_eval(self, r)

    def at(self, t: float) -> float:
        return sum(float(c) * t ** e for e, c in self.terms.items())

    def positive_for_all_t(self) -> bool:
        return _positive_on_half_line(self)

    def negative_for_all_t(self) -> bool:
        return _positive_on_half_line(-self)

    def to_json(self) -> dict:
        return {"laurent": {str(e): c.to_json() for e, c in sorted(self.terms.items())}}


def laurent_eval(p: LaurentParam, r) -> FieldElem | ParamScalar:
    """Substitute t = sqrt(r): even powers fold into F, odd powers keep one factor of t."""
    r = _coerce(r)
    if sign_of(r) is not Sign.POSITIVE:
        raise ValueError(f"t^2 must be positive, got {r}")
    even, odd = ZERO, ZERO
    for exp, coeff in p.terms.items():
        half, rem = divmod(exp, 2)
        term = coeff * (r ** half)
        if rem:
            odd = odd + term
        else:
            even = even + term
    return param_scalar(even, odd, r)


# Polynomials below are coefficient lists over F, constant term first.

def _poly_trim(coeffs: list[FieldElem]) -> list[FieldElem]:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _poly_rem(a: list[FieldElem], b: list[FieldElem]) -> list[FieldElem]:
    rem = list(a)
    lead_inv = b[-1].inverse()
    while len(rem) >= len(b):
        q = rem[-1] * lead_inv
        shift = len(rem) - len(b)
        for i, c in enumerate(b):
            rem[shift + i] = rem[shift + i] - q * c
        rem.pop()
        _poly_trim(rem)
    return rem


def _sturm_chain(coeffs: list[FieldElem]) -> list[list[FieldElem]]:
    chain = [coeffs, _poly_trim([c * i for i, c in enumerate(coeffs)][1:])]
    if not chain[-1]:
        return chain[:1]
    while len(chain[-1]) > 1:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])
    return chain


def _sign_changes(signs) -> int:
    nonzero = [s for s in signs if s is not Sign.ZERO]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a is not b)


def count_positive_roots(coeffs: list[FieldElem]) -> int:
    """Distinct roots in t > 0 of a polynomial over F with nonzero constant term (Sturm)."""
    chain = _sturm_chain(_poly_trim(list(coeffs)))
    at_zero = _sign_changes(sign_of(poly[0]) for poly in chain)
    at_infinity = _sign_changes(sign_of(poly[-1]) for poly in chain)
    return at_zero - at_infinity


def _positive_on_half_line(p: LaurentParam) -> bool:
    if p.is_zero():
        return False
    exps = sorted(p.terms)
    signs = [sign_of(p.terms[e]) for e in exps]
    if signs[0] is not Sign.POSITIVE:
        # p ~ c t^low near t = 0
        return False
    if all(s is Sign.POSITIVE for s in signs):
        return True
    # t^(-low) p(t) is a polynomial that is positive at 0
    coeffs = [p.coefficient(e) for e in range(exps[0], exps[-1] + 1)]
    roots = count_positive_roots(coeffs)
    logger.debug("%r has %d positive roots", p, roots)
    return roots == 0


@lru_cache(maxsize=None)
def _interval_context(prec: int) -> MPIntervalContext:
    """Private interval context per precision; the shared mpmath.iv context is left alone."""
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


class Sign(Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


@dataclass(frozen=True)
class SignOracle:
    """Certified signs: exact zero test, then interval evaluation at growing precision."""

    schedule: tuple[int, ...] = DEFAULT_SCHEDULE

    def _precisions(self):
        yield from self.schedule
        prec = self.schedule[-1]
        while True:
            prec *= 2
            logger.warning("sign not resolved at %d bits, refining", prec // 2)
            yield prec

    @staticmethod
    def _enclose_field(iv, x: FieldElem):
        total = iv.mpf(0)
        for coeff, radicand in zip(x.coefficients, (1, 2, 5, 10)):
            if coeff == 0:
                continue
            value = iv.mpf(coeff.numerator) / coeff.denominator
            if radicand != 1:
                value = value * iv.sqrt(radicand)
            total = total + value
        return total

    def _enclose(self, iv, x):
        if isinstance(x, FieldElem):
            return self._enclose_field(iv, x)
        t = iv.sqrt(self._enclose_field(iv, x.r))
        return self._enclose_field(iv, x.even) + self._enclose_field(iv, x.odd) * t

    def sign(self, x) -> Sign:
        if isinstance(x, (int, Fraction)):
            return Sign((x > 0) - (x < 0))
        if isinstance(x, float):
            if abs(x) <= FLOAT_TOL:
                return Sign.ZERO
            return Sign.POSITIVE if x > 0 else Sign.NEGATIVE
        if isinstance(x, LaurentParam):
            raise TypeError("a formal Laurent value has no single sign; use positive_for_all_t")
        if x.is_zero():
            return Sign.ZERO
        if isinstance(x, FieldElem) and x.is_rational:
            return Sign.POSITIVE if x.c1 > 0 else Sign.NEGATIVE
        for prec in self._precisions():
            interval = self._enclose(_interval_context(prec), x)
            if interval.a > 0:
                return Sign.POSITIVE
            if interval.b < 0:
                return Sign.NEGATIVE


DEFAULT_ORACLE = SignOracle()


def sign_of(x, oracle: SignOracle | None = None) -> Sign:
    return (oracle or DEFAULT_ORACLE).sign(x)


def is_zero(x) -> bool:
    if isinstance(x, float):
        return abs(x) <= FLOAT_TOL
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def to_float(x, t: float | None = None) -> float:
    if isinstance(x, LaurentParam):
        if t is None:
            raise ValueError("formal value needs a numeric t")
        return x.at(t)
    return float(x)


def exact_sqrt(x):
    """Square root of a FieldElem or ParamScalar when it lies in the same ring, else None."""
    if isinstance(x, FieldElem):
        return x.sqrt()
    if isinstance(x, ParamScalar) and x.odd.is_zero():
        root = x.even.sqrt()
        return None if root is None else ParamScalar(root, ZERO, x.r)
    return None


# cos^2(pi/k) for the k with cos^2 in F
PI_OVER_COS_SQ = {
    2: ZERO,
    3: FieldElem(Fraction(1, 4)),
    4: FieldElem(Fraction(1, 2)),
    5: FieldElem(Fraction(3, 8), 0, Fraction(1, 8)),
    6: FieldElem(Fraction(3, 4)),
    8: FieldElem(Fraction(1, 2), Fraction(1, 4)),
    10: FieldElem(Fraction(5, 8), 0, Fraction(1, 8)),
}


class AngleKind(Enum):
    PI_OVER = "pi_over"
    GENERIC = "generic"
    NOT_AN_ANGLE = "not_an_angle"


@dataclass(frozen=True)
class AngleClass:
    kind: AngleKind
    k: int | None = None

    def __str__(self) -> str:
        if self.kind is AngleKind.PI_OVER:
            return f"pi/{self.k}"
        return self.kind.value


def recognize_angle(cos_sq, sign: Sign) -> AngleClass:
    """
    Match cos^2 of a dihedral angle against pi/k.

    Args:
        cos_sq: exact (or float) squared cosine
        sign: sign of the cosine; NEGATIVE means an obtuse angle

    Returns:
        AngleClass
    """
    if sign_of(cos_sq - 1) is not Sign.NEGATIVE:
        return AngleClass(AngleKind.NOT_AN_ANGLE)
    if is_zero(cos_sq):
        return AngleClass(AngleKind.PI_OVER, 2)
    if sign is not Sign.POSITIVE:
        return AngleClass(AngleKind.GENERIC)
    for k, value in PI_OVER_COS_SQ.items():
        if k == 2:
            continue
        if isinstance(cos_sq, float):
            if abs(cos_sq - float(value)) <= FLOAT_TOL:
                return AngleClass(AngleKind.PI_OVER, k)
        elif cos_sq == value:
            return AngleClass(AngleKind.PI_OVER, k)
    return AngleClass(AngleKind.GENERIC)


_LITERAL_NAMES = {"sqrt2": SQRT2, "sqrt5": SQRT5, "sqrt10": SQRT10}


def parse_exact(text: str) -> FieldElem:
    """
    Parse an exact literal such as "1/3" or "(11+4*sqrt5)/41" into F.

    Accepts integers, fractions, sqrt2/sqrt5/sqrt10, sqrt(<literal>) when the root lies in F,
    +, -, *, /, integer powers and parentheses; the unicode minus and middle dot are accepted.
    """
    source = text.strip().replace("−", "-").replace("·", "*").replace("√", "sqrt")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise LiteralError(f"invalid exact literal {text!r}") from exc

    def visit(node):
        if isinstance(node, ast.Expression):
            return visit(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return FieldElem(node.value)
        if isinstance(node, ast.Name) and node.id in _LITERAL_NAMES:
            return _LITERAL_NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = visit(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp):
            left, right = visit(node.left), visit(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.is_zero():
                    raise LiteralError(f"division by zero in {text!r}")
                return left / right
            if isinstance(node.op, ast.Pow) and right.is_integer:
                if left.is_zero() and right.c1 < 0:
                    raise LiteralError(f"division by zero in {text!r}")
                return left ** int(right.c1)
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
                and len(node.args) == 1 and not node.keywords):
            root = visit(node.args[0]).sqrt()
            if root is None:
                raise LiteralError(f"square root in {text!r} is not in Q(sqrt2, sqrt5)")
            return root
        raise LiteralError(f"unsupported syntax in exact literal {text!r}")

    return visit(tree)


def lift_like(value, ref):
    """Express an int, Fraction or FieldElem in the scalar kind of ``ref``."""
    if isinstance(ref, float):
        return float(value)
    if isinstance(ref, ParamScalar):
        if isinstance(value, ParamScalar):
            return value
        return ParamScalar(_coerce(value), ZERO, ref.r)
    if isinstance(ref, LaurentParam):
        return value if isinstance(value, LaurentParam) else LaurentParam.constant(value)
    if isinstance(ref, FieldElem):
        return value if isinstance(value, (FieldElem, ParamScalar, LaurentParam)) else _coerce(value)
    return value
