import math
import random
from fractions import Fraction as Fr

import numpy as np
import pytest
from scipy.integrate import quad

from swkb.algebra import E_pow, phi, u_half
from swkb.errors import AmbiguousRegionError, ContourError, NoClassicalRegionError
from swkb.quadrature import (
    Contour,
    PolynomialSuperpotential,
    build_contour,
    contour_integrate,
    turning_points,
)
from swkb.reduction import reduce_even_order

Q1 = (phi(1) * u_half(-1)).scale(Fr(1, 2))
P1 = (phi() * phi(1) * u_half(-2)).scale(Fr(1, 2))


class TestSuperpotential:
    def test_validation(self):
        with pytest.raises(ValueError):
            PolynomialSuperpotential([1.0])
        with pytest.raises(ValueError):
            PolynomialSuperpotential([0.0, 1.0], hbar=0.0)

    def test_derivatives(self, cubic):
        x = np.array([2.0])
        assert abs(cubic.phi(x)[0] - 8.0 / 3.0) < 1e-14
        assert abs(cubic.phi_deriv(1, x)[0] - 4.0) < 1e-14
        assert abs(cubic.phi_deriv(3, x)[0] - 2.0) < 1e-14
        assert cubic.phi_deriv(7, x)[0] == 0.0

    def test_partner_potentials(self, oscillator):
        x = np.array([1.5])
        assert abs(oscillator.v_minus(x)[0] - (2.25 - 1.0)) < 1e-14
        assert abs(oscillator.v_plus(x)[0] - (2.25 + 1.0)) < 1e-14

    def test_json_roundtrip(self, cubic, tmp_path):
        import json

        path = tmp_path / "sp.json"
        path.write_text(json.dumps(cubic.to_json_dict()))
        again = PolynomialSuperpotential.load(str(path))
        assert again.coefficients == cubic.coefficients
        assert again.hbar == cubic.hbar


class TestTurningPoints:
    def test_oscillator(self, oscillator):
        xl, xr, excluded = turning_points(oscillator, 4.0)
        assert abs(xl + 2.0) < 1e-12 and abs(xr - 2.0) < 1e-12
        assert excluded == []

    def test_cubic(self, cubic):
        xl, xr, excluded = turning_points(cubic, 1.0)
        root = 9.0 ** (1.0 / 6.0)
        assert abs(xr - root) < 1e-10 and abs(xl + root) < 1e-10
        assert len(excluded) == 4
        assert all(abs(w.imag) > 0.1 for w in excluded)

    def test_no_classical_region(self, oscillator):
        with pytest.raises(NoClassicalRegionError):
            turning_points(oscillator, -1.0)

    def test_double_well_is_ambiguous(self):
        # phi = x^2 - 1 (broken-SUSY shape): two classical regions at small E
        sp = PolynomialSuperpotential([-1.0, 0.0, 1.0], 1.0, "double well")
        with pytest.raises(AmbiguousRegionError):
            turning_points(sp, 0.5)

    def test_near_degenerate_pair_is_ambiguous(self, oscillator):
        with pytest.raises(AmbiguousRegionError):
            turning_points(oscillator, 1e-20)


class TestContour:
    def test_build_excludes_branch_points(self, cubic):
        c = build_contour(cubic, 1.0)
        _, _, excluded = turning_points(cubic, 1.0)
        for w in excluded:
            assert not c.contains(w)
            assert c.min_distance(w) >= 0.2 * c.a

    def test_encloses_turning_points(self, cubic):
        c = build_contour(cubic, 1.0)
        xl, xr, _ = turning_points(cubic, 1.0)
        assert c.contains(complex(xl, 0.0)) and c.contains(complex(xr, 0.0))

    def test_impossible_contour_raises(self, cubic):
        with pytest.raises(ContourError):
            build_contour(cubic, 1.0, clearance=5.0)


class TestContourIntegrate:
    def test_leading_action_oscillator(self, oscillator):
        r = contour_integrate(u_half(1), oscillator, 4.0)
        assert abs(r.value - math.pi * 4.0) < 1e-10

    def test_leading_action_cross_checked_on_real_axis(self, cubic):
        # independent real-axis quadrature of the nonsingular leading term
        a = 9.0 ** (1.0 / 6.0)
        expect, _ = quad(lambda x: math.sqrt(max(1.0 - x**6 / 9.0, 0.0)), -a, a, limit=200)
        r = contour_integrate(u_half(1), cubic, 1.0)
        assert abs(r.value - 2.0 * expect) < 1e-9

    def test_oscillator_correction_vanishes(self, oscillator):
        for E in (1.0, 4.0, 9.0):
            r = contour_integrate(phi(1, 2) * u_half(-5), oscillator, E)
            assert abs(r.value) < 1e-10

    def test_first_imag_integral_is_pi(self, oscillator, cubic):
        for sp, E in ((oscillator, 4.0), (cubic, 0.5), (cubic, 1.0), (cubic, 2.0)):
            r = contour_integrate(Q1, sp, E)
            assert abs(r.value - math.pi) < 1e-10

    def test_first_real_integral_is_minus_i_pi(self, cubic):
        # the log obstruction: the first real part integrates to -i pi, so
        # it cannot be a derivative of any ring element
        r = contour_integrate(P1, cubic, 1.0, check_real=False)
        assert abs(r.value + 1j * math.pi) < 1e-10

    def test_derivative_annihilation(self, cubic, split10, lseq9):
        r2 = reduce_even_order(2, split10, lseq9)
        cert_d = r2.certificate.differentiate()
        r = contour_integrate(cert_d, cubic, 1.0, check_real=False)
        assert abs(r.value) < 1e-9

    def test_random_certificates_annihilate(self, cubic):
        rng = random.Random(41)
        from conftest import random_expression

        for _ in range(5):
            y = random_expression(rng, max_terms=2)
            re, _ = y.split_real_imag()
            d = re.differentiate()
            if d.is_zero():
                continue
            r = contour_integrate(d, cubic, 1.0, check_real=False)
            assert abs(r.value) < 1e-8

    def test_dropped_parts_integrate_to_zero(self, cubic, split10):
        for expr in (split10.q[2], split10.p[3], split10.q[3]):
            r = contour_integrate(expr, cubic, 1.0, check_real=False)
            assert abs(r.value) < 1e-9

    def test_reduced_matches_raw_even_order(self, cubic, split10, lseq9):
        for order in (2, 4):
            red = reduce_even_order(order, split10, lseq9)
            a = contour_integrate(split10.p[order], cubic, 1.0, check_real=False)
            b = contour_integrate(red.integrand, cubic, 1.0)
            assert abs(a.value - b.value) < 1e-9

    def test_contour_independence(self, oscillator, cubic):
        c1 = build_contour(oscillator, 4.0)
        c2 = Contour(c1.center, 2.0 * c1.a, 2.0 * c1.b)
        v1 = contour_integrate(u_half(1), oscillator, 4.0, contour=c1).value
        v2 = contour_integrate(u_half(1), oscillator, 4.0, contour=c2).value
        assert abs(v1 - v2) < 1e-10
        # modest rescale for the cubic (large ones would cross branch points)
        c3 = build_contour(cubic, 1.0)
        c4 = Contour(c3.center, 1.1 * c3.a, 1.1 * c3.b)
        v3 = contour_integrate(phi(1, 2) * u_half(-5) * E_pow(1), cubic, 1.0, contour=c3).value
        v4 = contour_integrate(phi(1, 2) * u_half(-5) * E_pow(1), cubic, 1.0, contour=c4).value
        assert abs(v3 - v4) < 1e-9

    def test_positive_leading_action(self, cubic):
        for E in (0.5, 1.0, 2.0):
            r = contour_integrate(u_half(1), cubic, E)
            assert r.value.real > 0

    def test_result_json_shape(self, oscillator):
        r = contour_integrate(u_half(1), oscillator, 4.0)
        d = r.to_json_dict()
        assert set(d) == {"value_re", "value_im", "samples_used"}
        assert d["samples_used"] == r.samples_used

    def test_branch_state_invariants(self, cubic):
        from swkb.quadrature import track_sqrt_u

        c = build_contour(cubic, 1.0)
        z, _ = c.points(1024)
        u = 1.0 - cubic.phi(z) ** 2
        branch = track_sqrt_u(u)
        branch.validate(u)
        assert branch.sqrt_u[0].imag > 0  # initial sign convention
