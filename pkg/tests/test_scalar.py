import math
import random
from fractions import Fraction

import mpmath
import pytest

from hyperwalls.errors import DimensionMismatchError, LiteralError, PreconditionError
from hyperwalls.scalar import (
    ONE,
    SQRT2,
    SQRT5,
    SQRT10,
    ZERO,
    AngleKind,
    FieldElem,
    LaurentParam,
    ParamScalar,
    Sign,
    count_positive_roots,
    exact_sqrt,
    field_arith,
    laurent_eval,
    param_scalar,
    parse_exact,
    rational_from_str,
    rational_to_str,
    recognize_angle,
    sign_of,
)


def random_field(rng, spread=6):
    return FieldElem(*(Fraction(rng.randint(-spread, spread), rng.randint(1, 4)) for _ in range(4)))


def random_laurent(rng):
    return LaurentParam({e: random_field(rng) for e in rng.sample(range(-2, 4), 3)})


def high_precision_value(x, r=None):
    def field(y):
        return sum(mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(k)
                   for c, k in zip(y.coefficients, (1, 2, 5, 10)))

    if r is None:
        return field(x)
    return field(x.even) + field(x.odd) * mpmath.sqrt(field(r))


class TestFieldElem:
    def test_field_arith_dispatch(self):
        a, b = ONE + SQRT2, SQRT5
        assert field_arith(a, b, "add") == a + b
        assert field_arith(a, b, "sub") == a - b
        assert field_arith(a, b, "mul") == SQRT5 + SQRT10
        assert field_arith(a, b, "div") * b == a
        with pytest.raises(ZeroDivisionError):
            field_arith(a, ZERO, "div")
        with pytest.raises(ValueError):
            field_arith(a, b, "pow")

    def test_ring_axioms_on_random_elements(self):
        rng = random.Random(5)
        for _ in range(30):
            a, b, c = (random_field(rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a
            assert (a - b) + b == a

    def test_products_of_roots(self):
        assert SQRT2 * SQRT2 == 2
        assert SQRT5 * SQRT5 == 5
        assert SQRT2 * SQRT5 == SQRT10
        assert SQRT10 * SQRT10 == 10

    def test_inverse_of_random_elements(self):
        rng = random.Random(11)
        for _ in range(25):
            x = FieldElem(*(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4)))
            if x.is_zero():
                continue
            assert x * x.inverse() == ONE
            assert (x / x) == ONE

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_float_value(self):
        x = FieldElem(Fraction(1, 2), 3, -1, Fraction(2, 3))
        expected = 0.5 + 3 * math.sqrt(2) - math.sqrt(5) + (2 / 3) * math.sqrt(10)
        assert float(x) == pytest.approx(expected)

    @pytest.mark.parametrize(
        "value, root",
        [
            (FieldElem(Fraction(16, 25)), FieldElem(Fraction(4, 5))),
            (FieldElem(3, 2), FieldElem(1, 1)),
            (FieldElem(Fraction(1, 2)), FieldElem(0, Fraction(1, 2))),
            (FieldElem(Fraction(3, 2), 0, Fraction(1, 2)), FieldElem(Fraction(1, 2), 0, Fraction(1, 2))),
        ],
    )
    def test_sqrt_in_field(self, value, root):
        assert value.sqrt() == root

    @pytest.mark.parametrize("value", [FieldElem(3), FieldElem(-4), FieldElem(Fraction(1, 7)), SQRT2])
    def test_sqrt_outside_field(self, value):
        assert value.sqrt() is None

    def test_equality_with_rationals(self):
        assert FieldElem(Fraction(3, 5)) == Fraction(3, 5)
        assert FieldElem(2) == 2
        assert hash(FieldElem(2)) == hash(2)

    def test_str(self):
        assert str(FieldElem(1, -1)) == "1 - sqrt2"
        assert str(ZERO) == "0"


class TestSigns:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (SQRT2 - Fraction(141421, 100000), Sign.POSITIVE),
            (SQRT2 - Fraction(141422, 100000), Sign.NEGATIVE),
            (3 - SQRT2 - SQRT2 * SQRT5 + SQRT10, Sign.POSITIVE),
            (ZERO, Sign.ZERO),
        ],
    )
    def test_sign_of_field_elements(self, value, expected):
        assert sign_of(value) is expected

    def test_sign_of_param_scalar(self):
        # t - 4/5 with t^2 = 2/3
        x = ParamScalar(Fraction(-4, 5), 1, Fraction(2, 3))
        assert sign_of(x) is Sign.POSITIVE
        assert sign_of(-x) is Sign.NEGATIVE

    def test_sign_agrees_with_high_precision(self):
        rng = random.Random(17)
        with mpmath.workprec(256):
            for _ in range(40):
                x = random_field(rng)
                value = high_precision_value(x)
                if abs(value) < mpmath.mpf(10) ** -40:
                    continue
                assert sign_of(x) is (Sign.POSITIVE if value > 0 else Sign.NEGATIVE)

    @pytest.mark.parametrize("r", [3, Fraction(1, 3), Fraction(3, 5)])
    def test_param_sign_agrees_with_high_precision(self, r):
        rng = random.Random(19)
        with mpmath.workprec(256):
            for _ in range(20):
                x = ParamScalar(random_field(rng), random_field(rng), r)
                value = high_precision_value(x, x.r)
                if abs(value) < mpmath.mpf(10) ** -40:
                    continue
                assert sign_of(x) is (Sign.POSITIVE if value > 0 else Sign.NEGATIVE)

    def test_float_tolerance(self):
        assert sign_of(1e-12) is Sign.ZERO
        assert sign_of(-0.5) is Sign.NEGATIVE


class TestParamScalar:
    def test_odd_square_folds(self):
        t = ParamScalar(0, 1, Fraction(3, 5))
        assert t * t == FieldElem(Fraction(3, 5))
        assert (1 / t) * t == ONE

    def test_parameter_mismatch(self):
        a = ParamScalar(0, 1, Fraction(3, 5))
        b = ParamScalar(0, 1, Fraction(1, 3))
        with pytest.raises(DimensionMismatchError):
            a + b

    @pytest.mark.parametrize("r", [1, 4, Fraction(16, 25), 2, Fraction(1, 2), 5])
    def test_square_parameter_refused(self, r):
        with pytest.raises(PreconditionError):
            ParamScalar(0, 1, r)

    @pytest.mark.parametrize(
        "even, odd, r, expected",
        [
            (3, 2, 4, FieldElem(7)),
            (0, 1, 2, SQRT2),
            (1, -1, Fraction(16, 25), FieldElem(Fraction(1, 5))),
        ],
    )
    def test_square_parameter_folds(self, even, odd, r, expected):
        value = param_scalar(even, odd, r)
        assert isinstance(value, FieldElem)
        assert value == expected

    def test_non_square_parameter_stays_formal(self):
        assert isinstance(param_scalar(0, 1, 3), ParamScalar)

    def test_exact_sqrt_of_even_part(self):
        x = ParamScalar(Fraction(9, 4), 0, Fraction(3, 5))
        assert exact_sqrt(x) == ParamScalar(Fraction(3, 2), 0, Fraction(3, 5))
        assert exact_sqrt(ParamScalar(0, 1, Fraction(3, 5))) is None


class TestLaurentParam:
    def test_arithmetic(self):
        t = LaurentParam.t()
        inv = 1 / t
        assert (t * inv) == LaurentParam.constant(ONE)
        assert (t + inv) ** 2 == t * t + 2 + inv * inv

    def test_evaluation_at_exact_parameter(self):
        t = LaurentParam.t()
        p = t * t + 3 * t + 1 / t
        # t^2 = 3: t^2 folds to 3, 3t + 1/t = (3 + 1/3) t
        assert laurent_eval(p, 3) == ParamScalar(3, Fraction(10, 3), 3)

    @pytest.mark.parametrize(
        "r, root",
        [(1, ONE), (4, FieldElem(2)), (Fraction(16, 25), FieldElem(Fraction(4, 5))), (2, SQRT2)],
    )
    def test_evaluation_at_square_parameter(self, r, root):
        t = LaurentParam.t()
        value = laurent_eval(t - root, r)
        assert isinstance(value, FieldElem)
        assert sign_of(value) is Sign.ZERO

    def test_equality_and_inverse_at_t_one(self):
        t = LaurentParam.t()
        assert laurent_eval(t, 1) == laurent_eval(LaurentParam.constant(1), 1)
        assert 1 / laurent_eval(1 + t, 1) == Fraction(1, 2)
        assert sign_of(laurent_eval(t - 2, 4)) is Sign.ZERO

    @pytest.mark.parametrize("r", [3, Fraction(1, 3), Fraction(3, 5), Fraction(2, 3), 1, 4])
    def test_evaluation_is_multiplicative(self, r):
        rng = random.Random(23)
        for _ in range(10):
            p = random_laurent(rng)
            q = random_laurent(rng)
            assert laurent_eval(p * q, r) == laurent_eval(p, r) * laurent_eval(q, r)
            assert laurent_eval(p + q, r) == laurent_eval(p, r) + laurent_eval(q, r)

    def test_substitute_inverse(self):
        t = LaurentParam.t()
        assert (2 * t + 1).substitute_inverse() == 2 / t + 1

    @pytest.mark.parametrize(
        "exponents, positive",
        [
            ({0: 1, 2: 1}, True),
            ({-1: 1, 1: 1}, True),
            ({0: -1, 2: 1}, False),
            ({0: -1}, False),
            ({0: 1, 1: -1, 2: 1}, True),
            ({0: 2, 1: -2, 2: 1}, True),
            ({-2: 1, -1: -1, 0: 1}, True),
            ({0: Fraction(1, 2), 2: -1, 4: 1}, True),
            ({0: 1, 1: -2, 2: 1}, False),
            ({0: 2, 1: -3, 2: 1}, False),
            ({0: 1, 2: -2, 4: 1}, False),
            ({1: 1, 2: -1}, False),
        ],
    )
    def test_positivity_on_half_line(self, exponents, positive):
        p = LaurentParam({e: FieldElem(c) for e, c in exponents.items()})
        assert p.positive_for_all_t() is positive
        assert (-p).negative_for_all_t() is positive

    @pytest.mark.parametrize("constant, positive", [(FieldElem(2), False), (FieldElem(3), True)])
    def test_positivity_with_irrational_coefficients(self, constant, positive):
        # t^2 - 2*sqrt2*t + c: a double root at sqrt2 when c = 2
        t = LaurentParam.t()
        assert (t * t - 2 * SQRT2 * t + constant).positive_for_all_t() is positive

    @pytest.mark.parametrize(
        "coeffs, count",
        [
            ([6, -7, 0, 1], 2),  # (t - 1)(t - 2)(t + 3)
            ([-2, 5, -4, 1], 2),  # (t - 1)^2 (t - 2)
            ([1, 0, 1], 0),
            ([-3, 0, 1], 1),
            ([5], 0),
        ],
    )
    def test_count_positive_roots(self, coeffs, count):
        assert count_positive_roots([FieldElem(c) for c in coeffs]) == count

    def test_rejects_non_scalars(self):
        with pytest.raises(TypeError):
            LaurentParam({0: "one"})


class TestRecognizeAngle:
    pass  # body missing from the source file (truncated); no tests defined here
