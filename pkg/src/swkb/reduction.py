"""Maximally simplified quantization-condition integrands.

Even-order real parts are reduced in two independent ways:

* subtracting the exact derivative of (F * Q_2k), where Q_2k is built from
  the certificate sequence and F = f * u^(-1/2); this exhibits the overall
  factor of E syntactically;
* subtracting the matching coefficient of the log-fixed-point series, whose
  higher coefficients are all exact derivatives.

Both are followed by a deterministic residual sweep that removes any
remaining exact-derivative content, so the two routes must agree exactly,
not just modulo derivatives.  Every dropped piece carries a certificate Y
with differentiate(Y) equal to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import Expression, Monomial, PHI_RING, Ring
from .antiderivative import antiderivative, candidate_monomials
from .errors import StructuralTheoremViolation
from .gaussian import GR_ONE, GaussianRational
from .series import (
    HbarSeries,
    LSequence,
    SplitSeries,
    generate_series,
    i_times,
    l_sequence,
    split_series,
)

HALF = Fraction(1, 2)


def divide_by_e(x: Expression, context: str = "") -> Expression:
    """Exact division by E (exponent shift).  Raises loudly when the
    numerator is not divisible, since that breaks a structural theorem."""
    if x.is_zero():
        return x
    if x.min_e_degree() < 1:
        raise StructuralTheoremViolation(
            f"expression not divisible by E{': ' + context if context else ''}"
        )
    return x.shift_e(-1)


def decompose(n: int, split: SplitSeries, ring: Ring = PHI_RING) -> Tuple[Expression, Expression]:
    """alpha_n, beta_n with p_n = F q_n + E alpha_n and q_n = -F p_n + E beta_n."""
    if n < 1:
        raise ValueError("decomposition starts at order 1")
    F = Expression.sym(0, 1, ring) * Expression.u_pow(-1, ring)
    alpha = divide_by_e(split.p[n] - F * split.q[n], f"p_{n} - F q_{n}")
    beta = divide_by_e(split.q[n] + F * split.p[n], f"q_{n} + F p_{n}")
    return alpha, beta


# -- deterministic residual sweep ---------------------------------------------


def _pivot_key(m: Monomial):
    """Elimination priority (larger sorts first = eliminated first).

    Preference for surviving monomials: no bare symbol factor, then as much
    first-derivative content as possible concentrated in a single higher
    derivative (pure f'^k and f' f^(k) forms survive; mixed middle-order
    products are rewritten away).  Deterministic tie-break on the full key.
    """
    a0 = m.deriv_exp(0)
    higher = sorted((k for k, a in m.derivs if k >= 2 for _ in range(a)), reverse=True)
    n_higher = len(higher)
    second = higher[1] if n_higher >= 2 else 0
    top = higher[0] if higher else 0
    return (a0, n_higher, second, -top, m.derivs, -m.h, m.e)


class DerivativeSweep:
    """Echelonized span of derivatives of ansatz monomials, used to compute
    a canonical representative of an expression modulo exact derivatives.

    ``min_e``: when set, only generators whose antiderivative monomial has
    at least that E-exponent are used, so sweeping preserves manifest
    E-divisibility of the input.
    """

    def __init__(self, target: Expression, min_e: Optional[int] = None, widen: int = 1):
        self.ring = target.ring
        gens: List[Tuple[Monomial, Expression]] = []
        seen = set()
        for (w, g) in sorted({(m.weight(), m.gdeg(target.ring)) for m in target.terms}):
            comp = Expression(
                target.ring,
                [(m, c) for m, c in target.terms.items() if (m.weight(), m.gdeg(target.ring)) == (w, g)],
            )
            for cand in candidate_monomials(comp, widen=widen):
                if cand in seen:
                    continue
                seen.add(cand)
                if min_e is not None and cand.e < min_e:
                    continue
                d = Expression(self.ring, [(cand, GR_ONE)]).differentiate()
                if not d.is_zero():
                    gens.append((cand, d))
        gens.sort(key=lambda t: t[0].sort_key())
        # echelon rows: (pivot monomial, vector, antiderivative combination)
        self.rows: List[Tuple[Monomial, Dict[Monomial, GaussianRational], Expression]] = []
        for cand, d in gens:
            vec = dict(d.terms)
            comb = Expression(self.ring, [(cand, GR_ONE)])
            vec, comb = self._reduce(vec, comb)
            if not vec:
                continue
            pivot = max(vec, key=_pivot_key)
            inv = GR_ONE / vec[pivot]
            vec = {m: c * inv for m, c in vec.items()}
            comb = comb.scale(inv)
            self.rows.append((pivot, vec, comb))

    def _reduce(self, vec: Dict[Monomial, GaussianRational], comb: Expression):
        for pivot, pvec, pcomb in self.rows:
            c = vec.get(pivot)
            if c is None or c.is_zero():
                continue
            for m, v in pvec.items():
                new = vec.get(m, GaussianRational(0)) - c * v
                if new.is_zero():
                    vec.pop(m, None)
                else:
                    vec[m] = new
            comb = comb - pcomb.scale(c)
        return vec, comb

    def normal_form(self, x: Expression) -> Tuple[Expression, Expression]:
        """Return (kept, cert) with x = kept + differentiate(cert) and kept
        free of every pivot monomial."""
        vec = dict(x.terms)
        comb = Expression.zero(self.ring)
        vec, comb = self._reduce(vec, comb)
        kept = Expression(self.ring, list(vec.items()))
        cert = -comb
        return kept, cert


def residual_sweep(
    x: Expression, min_e: Optional[int] = None
) -> Tuple[Expression, Expression]:
    """Remove the exact-derivative content of ``x`` deterministically.

    Returns (kept, cert) with x = kept + differentiate(cert); kept is the
    canonical quotient representative under the fixed basis ordering.
    """
    if x.is_zero():
        return x, Expression.zero(x.ring)
    kept, cert = DerivativeSweep(x, min_e=min_e).normal_form(x)
    assert kept + cert.differentiate() == x
    return kept, cert


# -- reduced corrections -------------------------------------------------------


@dataclass(frozen=True)
class ReducedCorrection:
    """One even-order quantization correction.

    The quantization term is sign_factor * hbar^order * contour-integral of
    ``integrand``; sign_factor is (-1)^(order/2), the real value of
    (-i*hbar)^order with hbar^order pulled out.  ``certificate`` satisfies
    p_order - integrand = differentiate(certificate) exactly.
    """

    order: int
    sign_factor: int
    integrand: Expression
    certificate: Expression

    @property
    def e_degree(self) -> int:
        return 0 if self.integrand.is_zero() else self.integrand.min_e_degree()


def reduce_even_order(
    order: int, split: SplitSeries, lseq: LSequence, sweep: bool = True
) -> ReducedCorrection:
    """Reduce the real part at an even order >= 2 by the F*Q subtraction.

    Q = (i/2) l[order-1] integrates the even imaginary part; subtracting
    (F Q)' from p_order leaves E * (alpha - f' Q u^(-3/2)), manifestly
    divisible by E.  The optional residual sweep then removes whatever
    exact-derivative content remains, keeping E-divisibility.
    """
    if order < 2 or order % 2:
        raise ValueError("even order >= 2 required")
    if lseq.order < order - 1:
        raise ValueError("certificate sequence not generated far enough")
    ring = split.p[0].ring
    alpha, _ = decompose(order, split)
    Q = i_times(lseq.l[order - 1]).scale(HALF)
    F = Expression.sym(0, 1, ring) * Expression.u_pow(-1, ring)
    fprime_u32 = Expression.sym(1, 1, ring) * Expression.u_pow(-3, ring)
    integrand = (alpha - fprime_u32 * Q).shift_e(1)
    cert = F * Q
    if sweep:
        integrand, resid = residual_sweep(integrand, min_e=1)
        cert = cert + resid
    if split.p[order] - integrand != cert.differentiate():
        raise StructuralTheoremViolation(f"bookkeeping identity failed at order {order}")
    if not integrand.is_zero() and integrand.min_e_degree() < 1:
        raise StructuralTheoremViolation(f"no overall E factor at order {order}")
    return ReducedCorrection(order, (-1) ** (order // 2), integrand, cert)


def reduce_via_pbar(
    order: int, split: SplitSeries, pbar: HbarSeries, reference: Optional[ReducedCorrection] = None
) -> ReducedCorrection:
    """Reduce by subtracting the log-fixed-point coefficient instead.

    The subtraction removes exactly the terms the integration-by-parts
    route removes; after the same residual sweep the result must agree
    with ``reference`` (the F*Q route) exactly.
    """
    if order % 2:
        raise ValueError("even order required")
    ring = split.p[0].ring
    if order == 0:
        zero = Expression.zero(ring)
        return ReducedCorrection(0, 1, zero, zero)
    raw = split.p[order] - pbar.coeffs[order]
    pbar_cert = antiderivative(pbar.coeffs[order])
    if pbar_cert is None:
        raise StructuralTheoremViolation(
            f"log-fixed-point coefficient at order {order} has no certificate"
        )
    kept, resid = residual_sweep(raw, min_e=1)
    cert = pbar_cert + resid
    if split.p[order] - kept != cert.differentiate():
        raise StructuralTheoremViolation(f"bookkeeping identity failed at order {order}")
    if reference is not None and kept != reference.integrand:
        raise StructuralTheoremViolation(
            f"subtraction routes disagree at order {order} after canonical sweep"
        )
    return ReducedCorrection(order, (-1) ** (order // 2), kept, cert)


def equivalent_mod_derivative(x: Expression, y: Expression) -> Optional[Expression]:
    """Certificate Y with differentiate(Y) = x - y, or None."""
    return antiderivative(x - y)


@dataclass(frozen=True)
class QuantizationCondition:
    """Everything on the left of the quantization condition up to max_order.

    corrections[k] covers order 2k (order 0 is the classical term with
    certificate 0).  The first-order coefficient integrates to the constant
    pi; it is reported via ``constant_pi`` and converts the right-hand side
    from 2(n + 1/2) pi hbar to 2 n pi hbar.  ``dropped`` maps every other
    omitted (order, part) to its derivative certificate.
    """

    max_order: int
    corrections: List[ReducedCorrection]
    constant_pi: bool
    dropped: Dict[Tuple[int, str], Expression]
    series: HbarSeries
    split: SplitSeries


def quantization_integrands(max_order: int, ring: Ring = PHI_RING) -> QuantizationCondition:
    """The reduced even-order integrands plus certificates for everything
    dropped: odd-order real and imaginary parts (order >= 3), even-order
    imaginary parts, and the derivative parts of the even real parts."""
    if max_order % 2:
        raise ValueError("max_order must be even")
    s = generate_series(max_order, "minus", ring)
    split = split_series(s)
    lseq = l_sequence(max_order - 1, s) if max_order >= 2 else LSequence([None])
    corrections = [
        ReducedCorrection(0, 1, Expression.u_pow(1, ring), Expression.zero(ring))
    ]
    dropped: Dict[Tuple[int, str], Expression] = {}
    for n in range(2, max_order + 1):
        if n % 2 == 0:
            corrections.append(reduce_even_order(n, split, lseq))
            dropped[(n, "q")] = i_times(lseq.l[n - 1]).scale(HALF)
        else:
            dropped[(n, "q")] = i_times(lseq.l[n - 1]).scale(HALF)
            p_cert = antiderivative(split.p[n])
            if p_cert is None:
                raise StructuralTheoremViolation(
                    f"odd-order real part p_{n} has no derivative certificate"
                )
            dropped[(n, "p")] = p_cert
    return QuantizationCondition(max_order, corrections, True, dropped, s, split)


def reconstruction_residual(qc: QuantizationCondition) -> List[Expression]:
    """Per-order residual of: series coefficient minus (kept integrand +
    certificate derivatives), with the first order set aside as the pi
    constant.  All residuals must be zero."""
    ring = qc.series.ring
    out = []
    by_order: Dict[int, Expression] = {c.order: c.integrand + c.certificate.differentiate()
                                       for c in qc.corrections}
    for n in range(qc.max_order + 1):
        acc = Expression.zero(ring)
        if n in by_order:
            acc = acc + by_order[n]
        if (n, "q") in qc.dropped:
            acc = acc + i_times(qc.dropped[(n, "q")].differentiate())
        if (n, "p") in qc.dropped:
            acc = acc + qc.dropped[(n, "p")].differentiate()
        if n == 1:
            acc = qc.series.coeffs[1]  # the pi-constant carrier, kept whole
        out.append(qc.series.coeffs[n] - acc)
    return out


def known_integrand_order2(ring: Ring = PHI_RING) -> Expression:
    """(E/8) f'^2 u^(-5/2): the known closed form of the second-order correction integrand."""
    return (Expression.e_pow(1, ring) * Expression.sym(1, 2, ring) * Expression.u_pow(-5, ring)).scale(
        Fraction(1, 8)
    )


def known_integrand_order4(ring: Ring = PHI_RING) -> Expression:
    """(E/128) (49 E f'^4 u^(-11/2) - 140/3 f'^4 u^(-9/2) - 4 f' f''' u^(-7/2)),
    the known closed form of the fourth-order bracket (quantization sign -hbar^4)."""
    e1 = Expression.e_pow(1, ring)
    f1_4 = Expression.sym(1, 4, ring)
    t1 = (Expression.e_pow(2, ring) * f1_4 * Expression.u_pow(-11, ring)).scale(Fraction(49, 128))
    t2 = (e1 * f1_4 * Expression.u_pow(-9, ring)).scale(Fraction(-140, 3 * 128))
    t3 = (e1 * Expression.sym(1, 1, ring) * Expression.sym(3, 1, ring) * Expression.u_pow(-7, ring)).scale(
        Fraction(-4, 128)
    )
    return t1 + t2 + t3
