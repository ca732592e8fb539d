"""Plain semiclassical series in the potential ring, and its substitution
back into the superpotential ring.

The potential ring (V eliminated through V = E - u) hosts the ordinary
series; substituting V -> f^2 - hbar f' and re-expanding in hbar must
reproduce the supersymmetric series exactly order by order, and the
substituted *simplified* quantization integrands must match the
supersymmetric ones modulo certified total derivatives.  Those are the
checks bundled in :func:`wkb_series_and_substitute`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from .algebra import Expression, PHI_RING, V_RING
from .antiderivative import antiderivative
from .gaussian import GaussianRational
from .series import (
    CheckReport,
    HbarSeries,
    generate_series,
    series_mul,
)
from .reduction import residual_sweep

MAX_SUBSTITUTION_ORDER = 4

_I_POW = (
    GaussianRational(1),
    GaussianRational(0, 1),
    GaussianRational(-1),
    GaussianRational(0, -1),
)


def _half_binomial(h: int, j: int) -> Fraction:
    """Binomial coefficient C(h/2, j) as an exact rational."""
    num = Fraction(1)
    for t in range(j):
        num *= Fraction(h, 2) - t
    for t in range(1, j + 1):
        num /= t
    return num


def _phi_square_derivs(order: int) -> List[Expression]:
    """x-derivatives of f^2 = E - u in the superpotential ring, k = 0..order."""
    out = [Expression.e_pow(1) - Expression.u_pow(2)]
    for _ in range(order):
        out.append(out[-1].differentiate())
    return out


class Substitution:
    """Maps potential-ring expressions to nu-series of superpotential-ring
    expressions under V = f^2 - hbar f' (hbar = i nu), truncated at ``order``."""

    def __init__(self, order: int):
        self.order = order
        self._sq = _phi_square_derivs(order + V_RING.relation_power + 8)

    def _factor_series(self, k: int) -> List[Expression]:
        """V^(k) -> (f^2)^(k) - i nu f^(k+1), as a two-term nu-series."""
        zero = Expression.zero(PHI_RING)
        out = [zero] * (self.order + 1)
        out[0] = self._sq[k]
        if self.order >= 1:
            out[1] = Expression.sym(k + 1, 1).scale(GaussianRational(0, -1))
        return out

    def _u_half_series(self, h: int) -> List[Expression]:
        """u_V^(h/2) -> u^(h/2) (1 + hbar f'/u)^(h/2), binomially re-expanded."""
        out = []
        for j in range(self.order + 1):
            coef = _half_binomial(h, j) * 1
            c = _I_POW[j % 4] * GaussianRational(coef)
            out.append((Expression.sym(1, j) * Expression.u_pow(h - 2 * j)).scale(c))
        return out

    def apply(self, x: Expression) -> List[Expression]:
        if x.ring != V_RING:
            raise ValueError("substitution applies to potential-ring expressions")
        zero = Expression.zero(PHI_RING)
        total = [zero] * (self.order + 1)
        for m, c in x.terms.items():
            fac: List[Expression] = [Expression.const(c)] + [zero] * self.order
            for k, a in m.derivs:
                fs = self._factor_series(k)
                for _ in range(a):
                    fac = series_mul(fac, fs, self.order)
            if m.h:
                fac = series_mul(fac, self._u_half_series(m.h), self.order)
            if m.e:
                epow = Expression.e_pow(m.e)
                fac = [f * epow for f in fac]
            total = [t + f for t, f in zip(total, fac)]
        return total


def wkb_series(order: int) -> HbarSeries:
    """The ordinary semiclassical series in the potential ring (no
    first-order source term; all coefficients have real coefficients)."""
    return generate_series(order, "minus", V_RING)


@dataclass
class SimplifiedWkbCondition:
    """Kept integrands of the potential-ring quantization condition.

    kept[k] is the canonical even-order integrand (k = 0 is u_V^(1/2));
    ``first_order`` is the order-1 coefficient, kept whole as the carrier
    of the constant term; everything else dropped with certificates."""

    max_order: int
    kept: Dict[int, Expression]
    first_order: Expression
    dropped_certs: Dict[int, Expression]
    series: HbarSeries


def simplify_wkb_condition(max_order: int) -> SimplifiedWkbCondition:
    w = wkb_series(max_order)
    kept: Dict[int, Expression] = {0: w.coeffs[0]}
    dropped: Dict[int, Expression] = {}
    for n in range(2, max_order + 1):
        if n % 2 == 0:
            nf, cert = residual_sweep(w.coeffs[n])
            kept[n] = nf
            dropped[n] = cert
        else:
            cert = antiderivative(w.coeffs[n])
            if cert is None:
                raise RuntimeError(f"odd-order coefficient {n} unexpectedly not a derivative")
            dropped[n] = cert
    return SimplifiedWkbCondition(max_order, kept, w.coeffs[1], dropped, w)


def log_term_expansion_check(order: int) -> CheckReport:
    """Expand V'/(E - V) under the substitution and verify each correction
    is the stated closed-form total derivative:

        nu^n coefficient = (-i)^n (1/n) d/dx (f' / u)^n,   n >= 1,

    with the antiderivative certificate written down explicitly."""
    sub = Substitution(order)
    expr = Expression.sym(1, 1, V_RING) * Expression.u_pow(-2, V_RING)
    got = sub.apply(expr)
    report = CheckReport("log-term-expansion")
    lead = (Expression.sym(0, 1) * Expression.sym(1, 1) * Expression.u_pow(-2)).scale(2)
    report.add(0, got[0] == lead, "leading term 2 f f' / u")
    base = Expression.sym(1, 1) * Expression.u_pow(-2)
    pw = base
    for n in range(1, order + 1):
        if n > 1:
            pw = pw * base
        closed = pw.scale(_I_POW[(-n) % 4] * GaussianRational(Fraction(1, n)))
        ok = got[n] == closed.differentiate()
        cert_ok = antiderivative(got[n]) is not None
        report.add(n, ok and cert_ok, f"closed-form={ok} certificate={cert_ok}")
    return report


def substitution_series_check(order: int) -> CheckReport:
    """Substituted full potential-ring series == supersymmetric series,
    exactly, order by order (solution uniqueness of the shared identity)."""
    sub = Substitution(order)
    w = wkb_series(order)
    s = generate_series(order, "minus")
    total = [Expression.zero(PHI_RING) for _ in range(order + 1)]
    for m in range(order + 1):
        piece = sub.apply(w.coeffs[m])
        for n in range(m, order + 1):
            total[n] = total[n] + piece[n - m]
    report = CheckReport("substituted-series")
    for n in range(order + 1):
        report.add(n, total[n] == s.coeffs[n])
    return report


def substituted_condition_check(order: int) -> CheckReport:
    """Substitute the *simplified* potential-ring condition and compare with
    the supersymmetric series: the order-n difference must be a certified
    total derivative (exactly zero at orders 0 and 1)."""
    simp = simplify_wkb_condition(order)
    sub = Substitution(order)
    s = generate_series(order, "minus")
    total = [Expression.zero(PHI_RING) for _ in range(order + 1)]
    pieces = dict(simp.kept)
    pieces[1] = simp.first_order
    for m, expr in pieces.items():
        piece = sub.apply(expr)
        for n in range(m, order + 1):
            total[n] = total[n] + piece[n - m]
    report = CheckReport("substituted-condition")
    for n in range(order + 1):
        diff = total[n] - s.coeffs[n]
        if n <= 1:
            report.add(n, diff.is_zero(), "exact")
        else:
            cert = antiderivative(diff)
            report.add(n, cert is not None, "certified-derivative")
    return report


@dataclass
class WkbSubstitutionReport:
    series_match: CheckReport
    log_term: CheckReport
    condition: CheckReport

    @property
    def all_ok(self) -> bool:
        return self.series_match.all_ok and self.log_term.all_ok and self.condition.all_ok


def wkb_series_and_substitute(order: int) -> WkbSubstitutionReport:
    """Bundle of the three substitution checks, bounded at order 4 (the
    potential-ring condition is only simplified that far here)."""
    if order > MAX_SUBSTITUTION_ORDER:
        raise ValueError(
            f"substitution overflow: order {order} exceeds the configured bound "
            f"{MAX_SUBSTITUTION_ORDER}"
        )
    return WkbSubstitutionReport(
        substitution_series_check(order),
        log_term_expansion_check(order),
        substituted_condition_check(order),
    )
