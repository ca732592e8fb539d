import cmath
import random
from fractions import Fraction as Fr

import pytest

from swkb.algebra import E_pow, Expression, F_factor, PHI_RING, const, i_times, phi, u_half
from swkb.errors import PoleError, UndefinedDegreeError
from swkb.gaussian import gr

from conftest import random_expression


class TestNormalize:
    def test_phi_square_reduction(self):
        assert phi(0, 2) * u_half(-1) == E_pow(1) * u_half(-1) - u_half(1)

    def test_empty_sum_is_zero(self):
        assert Expression(PHI_RING, []).is_zero()

    def test_phi_cube_single_step(self):
        assert phi(0, 3) * u_half(-2) == E_pow(1) * phi() * u_half(-2) - phi()

    def test_idempotent_on_random_terms(self):
        rng = random.Random(11)
        for _ in range(50):
            x = random_expression(rng)
            again = Expression(PHI_RING, list(x.terms.items()))
            assert again == x

    def test_no_zero_coefficients_stored(self):
        x = phi() - phi()
        assert x.terms == {}

    def test_canonical_phi_exponent(self):
        rng = random.Random(12)
        for _ in range(30):
            x = random_expression(rng)
            assert all(m.deriv_exp(0) <= 1 for m in x.terms)


class TestArithmetic:
    def test_u_half_inverse(self):
        assert u_half(1) * u_half(-1) == const(1)

    def test_phi_squared_is_defining_relation(self):
        assert phi() * phi() == E_pow(1) - u_half(2)

    def test_additive_inverse(self):
        x = phi(1) * u_half(-3)
        assert (x + x.scale(-1)).is_zero()

    def test_scale_distributes(self):
        rng = random.Random(13)
        for _ in range(20):
            a, b = random_expression(rng), random_expression(rng)
            c = gr(Fr(3, 7), Fr(-1, 2))
            assert (a + b).scale(c) == a.scale(c) + b.scale(c)

    def test_mul_commutative_associative(self):
        rng = random.Random(14)
        for _ in range(10):
            a, b, c = (random_expression(rng, max_terms=3) for _ in range(3))
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)


class TestDifferentiate:
    def test_sqrt_u(self):
        assert u_half(1).differentiate() == -(phi() * phi(1) * u_half(-1))

    def test_symbol_chain(self):
        assert phi(1).differentiate() == phi(2)

    def test_f_factor_derivative(self):
        # the derivative of f/sqrt(u) carries the whole E factor
        assert F_factor().differentiate() == E_pow(1) * phi(1) * u_half(-3)

    def test_leibniz_on_random_pairs(self):
        rng = random.Random(15)
        for _ in range(25):
            a, b = random_expression(rng, max_terms=3), random_expression(rng, max_terms=3)
            lhs = (a * b).differentiate()
            rhs = a.differentiate() * b + a * b.differentiate()
            assert lhs == rhs

    def test_e_is_constant(self):
        assert E_pow(3).differentiate().is_zero()
        assert E_pow(-2).differentiate().is_zero()


class TestSplit:
    def test_first_order_coefficient(self):
        s1 = (phi() * phi(1) * u_half(-2)).scale(Fr(1, 2)) + i_times(
            (phi(1) * u_half(-1)).scale(Fr(1, 2))
        )
        re, im = s1.split_real_imag()
        assert re == (phi() * phi(1) * u_half(-2)).scale(Fr(1, 2))
        assert im == (phi(1) * u_half(-1)).scale(Fr(1, 2))

    def test_real_expression_has_zero_imag(self):
        x = phi(1, 2) * u_half(-3)
        re, im = x.split_real_imag()
        assert re == x and im.is_zero()

    def test_pure_imaginary(self):
        re, im = i_times(phi(1)).split_real_imag()
        assert re.is_zero() and im == phi(1)

    def test_reassembly_on_random(self):
        rng = random.Random(16)
        for _ in range(40):
            x = random_expression(rng)
            re, im = x.split_real_imag()
            assert re + i_times(im) == x


class TestStructureQueries:
    def test_min_e_examples(self):
        assert (E_pow(1) * phi(1, 2) * u_half(-5)).min_e_degree() == 1
        assert (phi(1) * u_half(-1)).min_e_degree() == 0

    def test_min_e_zero_raises(self):
        with pytest.raises(UndefinedDegreeError):
            Expression.zero().min_e_degree()

    def test_u_parity(self):
        assert u_half(1).u_parity() == "all-odd-half"
        assert ((phi() * phi(1) * u_half(-2)).scale(Fr(1, 2))).u_parity() == "all-even"
        assert (u_half(1) + u_half(2)).u_parity() == "mixed"


class TestEvaluate:
    def test_simple_values(self):
        assert u_half(1).evaluate({0: 0.0}, 4.0, 2.0, 5.0) == 2.0
        assert phi().evaluate({0: 3.0}, 1.0, 1.0, 2.0) == 3.0

    def test_f_prime_value(self):
        v = F_factor().differentiate().evaluate({0: 1.0, 1: 1.0}, 1.0, 1.0, 2.0)
        assert abs(v - 2.0) < 1e-14

    def test_pole_errors(self):
        with pytest.raises(PoleError):
            u_half(-1).evaluate({0: 0.0}, 0.0, 0.0, 1.0)
        with pytest.raises(PoleError):
            E_pow(-1).evaluate({0: 0.0}, 1.0, 1.0, 0.0)

    def test_branch_consistency_required(self):
        with pytest.raises(ValueError):
            u_half(1).evaluate({0: 0.0}, 4.0, 1.0, 5.0)

    def test_ring_homomorphism_at_consistent_points(self):
        # points must satisfy the defining relation: u = E - z^2
        rng = random.Random(17)
        for _ in range(25):
            a = random_expression(rng, max_terms=3)
            b = random_expression(rng, max_terms=3)
            z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0))
            E = rng.uniform(1.0, 3.0)
            u = E - z * z
            if abs(u) < 1e-3 or abs(E) < 1e-3:
                continue
            sqrt_u = cmath.sqrt(u)
            point = ({0: z, 1: 0.7 + 0.2j, 2: -0.3 + 0.1j, 3: 0.5 - 0.4j}, u, sqrt_u, E)
            va, vb, vab = a.evaluate(*point), b.evaluate(*point), (a * b).evaluate(*point)
            scale = max(1.0, abs(va * vb))
            assert abs(vab - va * vb) < 1e-12 * scale


class TestSerialization:
    def test_text_form(self):
        x = (E_pow(1) * u_half(-5) * phi(1, 2)).scale(Fr(3, 8))
        assert x.to_text() == "3/8*E^1*u^-5/2*d1^2"

    def test_text_deterministic_ordering(self):
        x = u_half(1) + E_pow(1) * u_half(-1) + phi(1)
        # ordering key is (E exponent, u half-power, derivative exponents)
        assert x.to_text() == "1*d1 + 1*u^1/2 + 1*E^1*u^-1/2"

    def test_json_roundtrip_random(self):
        rng = random.Random(18)
        for _ in range(30):
            x = random_expression(rng)
            assert Expression.from_json(x.to_json()) == x

    def test_json_shape(self):
        x = (E_pow(1) * u_half(-5) * phi(1, 2)).scale(Fr(3, 8))
        data = x.to_json_dict()
        assert data == {
            "terms": [
                {
                    "coef_re": [3, 8],
                    "coef_im": [0, 1],
                    "e": 1,
                    "h": -5,
                    "derivs": {"1": 2},
                }
            ]
        }

    def test_latex_nonempty(self):
        assert "\\phi" in (phi(1, 2) * u_half(-5)).to_latex()


class TestGaussianRational:
    def test_conjugation_involution(self):
        x = gr(Fr(2, 3), Fr(-5, 7))
        assert x.conjugate().conjugate() == x

    def test_field_ops(self):
        x, y = gr(1, 2), gr(Fr(-1, 3), Fr(1, 6))
        assert (x / y) * y == x
        assert x * gr(1) == x
        assert (x - x).is_zero()
