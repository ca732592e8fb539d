"""Series generation for both partner potentials and the derived sequences.

All series live in powers of nu = -i*hbar: the phase derivative expands as
sum_n nu^n * c_n with c_0 = u^(1/2).  Everything below is exact; the only
outputs are Expressions and boolean reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .algebra import Expression, PHI_RING, Ring, i_times
from .gaussian import GR_I

HALF = Fraction(1, 2)


# -- truncated power-series helpers over Expression coefficients -------------


def series_mul(a: List[Expression], b: List[Expression], order: int) -> List[Expression]:
    ring = a[0].ring
    out = []
    for n in range(order + 1):
        acc = Expression.zero(ring)
        for k in range(n + 1):
            if k < len(a) and n - k < len(b):
                acc = acc + a[k] * b[n - k]
        out.append(acc)
    return out


def series_inverse(a: List[Expression], lead_inv: Expression, order: int) -> List[Expression]:
    """Multiplicative inverse of a truncated series whose leading coefficient
    has the exact inverse ``lead_inv`` (checked)."""
    ring = a[0].ring
    one = Expression.const(1, ring)
    assert a[0] * lead_inv == one, "lead_inv is not the exact inverse of a[0]"
    inv = [lead_inv]
    for n in range(1, order + 1):
        acc = Expression.zero(ring)
        for k in range(1, n + 1):
            if k < len(a):
                acc = acc + a[k] * inv[n - k]
        inv.append(-(lead_inv * acc))
    return inv


def series_diff(a: List[Expression]) -> List[Expression]:
    return [c.differentiate() for c in a]


def series_log_deriv(a: List[Expression], lead_inv: Expression, order: int) -> List[Expression]:
    """(ln a)' = a'/a as a truncated series; the order-0 coefficient is the
    non-exact logarithmic derivative of the leading term."""
    return series_mul(series_diff(a), series_inverse(a, lead_inv, order), order)


# -- the main recursions ------------------------------------------------------


@dataclass(frozen=True)
class HbarSeries:
    """Coefficients c_n of nu^n (nu = -i*hbar) for one partner sign."""

    coeffs: List[Expression]
    sign: str  # 'minus' | 'plus'

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def ring(self) -> Ring:
        return self.coeffs[0].ring

    def riccati_residual(self, n: int) -> Expression:
        """Substitute the truncated series back into the order-n identity;
        zero exactly when the recursion is consistent at that order."""
        ring = self.ring
        c = self.coeffs
        acc = Expression.zero(ring)
        for k in range(n + 1):
            if k <= self.order and n - k <= self.order:
                acc = acc + c[k] * c[n - k]
        if n == 0:
            return acc - Expression.u_pow(2, ring)
        acc = acc + c[n - 1].differentiate()
        if n == 1 and ring.relation_power == 2:
            src = Expression.sym(1, 1, ring).scale(GR_I)
            acc = acc - src if self.sign == "minus" else acc + src
        return acc


@dataclass(frozen=True)
class SplitSeries:
    """Real and imaginary parts p_n, q_n of each series coefficient."""

    p: List[Expression]
    q: List[Expression]

    @property
    def order(self) -> int:
        return len(self.p) - 1


@dataclass(frozen=True)
class LSequence:
    """l[n] for n >= 1 satisfies q_{n+1} = (i/2) * l[n]'.  Index 0 is unused:
    the order-0 member is a logarithm outside the ring whose only role is
    the constant pi contributed by the first-order imaginary part."""

    l: List[Optional[Expression]]

    @property
    def order(self) -> int:
        return len(self.l) - 1


def generate_series(order: int, sign: str = "minus", ring: Ring = PHI_RING) -> HbarSeries:
    """Recursive generation: c_0 = u^(1/2) and, for n >= 1,

        c_n = (u^(-1/2)/2) * ( -sum_{k=1}^{n-1} c_k c_{n-k} - c_{n-1}'
                               [+ i f' at n = 1, sign-dependent] )

    obtained by matching nu^n in the Riccati identity for V_-/V_+.  The
    ring is pluggable so the same engine drives the plain series in the
    potential ring (which has no first-order source term).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if sign not in ("minus", "plus"):
        raise ValueError("sign must be 'minus' or 'plus'")
    um12 = Expression.u_pow(-1, ring)
    coeffs = [Expression.u_pow(1, ring)]
    for n in range(1, order + 1):
        acc = Expression.zero(ring)
        for k in range(1, n):
            acc = acc + coeffs[k] * coeffs[n - k]
        acc = -acc - coeffs[n - 1].differentiate()
        if n == 1 and ring.relation_power == 2:
            src = Expression.sym(1, 1, ring).scale(GR_I)
            acc = acc + src if sign == "minus" else acc - src
        coeffs.append((um12 * acc).scale(HALF))
    return HbarSeries(coeffs, sign)


def split_series(s: HbarSeries) -> SplitSeries:
    p, q = [], []
    for c in s.coeffs:
        re, im = c.split_real_imag()
        p.append(re)
        q.append(im)
    return SplitSeries(p, q)


def inverse_lead_factor(ring: Ring = PHI_RING) -> Expression:
    """(f + i u^(1/2))^(-1) realized exactly as (f - i u^(1/2)) / E."""
    return (Expression.sym(0, 1, ring) - i_times(Expression.u_pow(1, ring))) * Expression.e_pow(
        -1, ring
    )


def l_sequence(order: int, s: HbarSeries) -> LSequence:
    """l[n] = (i/n) (f + i sqrt(u))^(-1) [ n c_n - sum_{m=0}^{n-2} (m+1) l[m+1] c_{n-1-m} ]
    for 1 <= n <= order.

    This is the coefficient recursion for the log of f + i S' (apply the
    Euler operator nu d/dnu to kill the order-0 logarithm, then divide by
    the leading factor); the inner sum starts at l[1], so the order-0
    member never enters.  The overall 1/n is required for the defining
    identity q_{n+1} = (i/2) l[n]' to hold from n = 2 on; it is verified
    mechanically by ``check_l_identity``.
    """
    if s.sign != "minus":
        raise ValueError("the derivative-certificate sequence is built from the minus series")
    if s.order < order:
        raise ValueError("series not generated far enough")
    inv = inverse_lead_factor(s.ring)
    l: List[Optional[Expression]] = [None]
    for n in range(1, order + 1):
        inner = s.coeffs[n].scale(n)
        for m in range(0, n - 1):
            inner = inner - (l[m + 1] * s.coeffs[n - 1 - m]).scale(m + 1)
        l.append(i_times(inv * inner).scale(Fraction(1, n)))
    return LSequence(l)


def check_l_identity(lseq: LSequence, split: SplitSeries, n: int) -> bool:
    """q_{n+1} == (i/2) l[n]' exactly."""
    lhs = i_times(lseq.l[n].differentiate()).scale(HALF)
    return lhs == split.q[n + 1]


def partner_via_log_identity(s: HbarSeries, order: int) -> HbarSeries:
    """Plus-sign series from the minus one through the exact expansion of
    d/dx ln(f + i S'), using geometric inversion with the (f - i sqrt(u))/E
    leading factor."""
    if s.sign != "minus":
        raise ValueError("input must be the minus-sign series")
    if s.order < order:
        raise ValueError("series not generated far enough")
    ring = s.ring
    g: List[Expression] = [Expression.sym(0, 1, ring) + i_times(s.coeffs[0])]
    for n in range(1, order + 1):
        g.append(i_times(s.coeffs[n]))
    log_d = series_log_deriv(g, inverse_lead_factor(ring), order)
    out = [s.coeffs[0]]
    for n in range(1, order + 1):
        out.append(s.coeffs[n] + log_d[n - 1])
    return HbarSeries(out, "plus")


def partner_via_imag_shift(s: HbarSeries, split: SplitSeries, order: int) -> HbarSeries:
    """The term-by-term relation c_n^(+) = c_n - 2 i q_n."""
    out = [s.coeffs[0]]
    for n in range(1, order + 1):
        out.append(s.coeffs[n] - i_times(split.q[n]).scale(2))
    return HbarSeries(out, "plus")


def pbar_series(order: int, ring: Ring = PHI_RING) -> HbarSeries:
    """Fixed point of  X = u^(1/2) - (nu/2) X'/X  expanded in nu.

    The log-derivative is realized by exact series division, so the
    logarithm itself is never represented.  Coefficients from order 2 on
    are total derivatives of ring elements; the order-1 coefficient equals
    the first-order real part and carries the same logarithmic constant,
    so it is exempt from certification (only even orders >= 2 ever enter
    the quantization integrands).
    """
    pb = [Expression.u_pow(1, ring)]
    um12 = Expression.u_pow(-1, ring)
    d: List[Expression] = []  # log-derivative coefficients
    for n in range(1, order + 1):
        m = n - 1
        acc = pb[m].differentiate()
        for k in range(1, m + 1):
            acc = acc - pb[k] * d[m - k]
        d.append(um12 * acc)
        pb.append(d[m].scale(-HALF))
    return HbarSeries(pb, "minus")


# -- order-by-order verification reports --------------------------------------


@dataclass
class OrderReport:
    order: int
    ok: bool
    detail: str = ""


@dataclass
class CheckReport:
    name: str
    entries: List[OrderReport] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def add(self, order: int, ok: bool, detail: str = ""):
        self.entries.append(OrderReport(order, ok, detail))


def generating_system_check(
    order: int, split: Optional[SplitSeries] = None, ring: Ring = PHI_RING
) -> CheckReport:
    """Order-by-order verification of the coupled first-order system for
    P = sum nu^n p_n, Q = sum nu^n q_n:

        nu P' = -P^2 + Q^2 + p_0^2,   -nu Q' = 2 P Q - nu f',

    plus the structural statement that P - p_0 - F Q is divisible by E at
    every order.  ``split`` can be injected (e.g. mutated) for negative
    controls; by default it comes from the minus-sign recursion.
    """
    if split is None:
        split = split_series(generate_series(order, "minus", ring))
    p, q = split.p, split.q
    F = Expression.sym(0, 1, ring) * Expression.u_pow(-1, ring)
    report = CheckReport("generating-system")
    for n in range(1, order + 1):
        conv_pp = Expression.zero(ring)
        conv_qq = Expression.zero(ring)
        conv_pq = Expression.zero(ring)
        for k in range(n + 1):
            conv_pp = conv_pp + p[k] * p[n - k]
            conv_qq = conv_qq + q[k] * q[n - k]
            conv_pq = conv_pq + p[k] * q[n - k]
        r1 = p[n - 1].differentiate() + conv_pp - conv_qq
        r2 = q[n - 1].differentiate() + conv_pq.scale(2)
        if n == 1:
            r2 = r2 - Expression.sym(1, 1, ring)
        efq = p[n] - F * q[n]
        e_ok = efq.is_zero() or efq.min_e_degree() >= 1
        ok = r1.is_zero() and r2.is_zero() and e_ok
        report.add(n, ok, f"eq1={r1.is_zero()} eq2={r2.is_zero()} e_factor={e_ok}")
    return report


_R_PICK = ("p", "q", "p", "q")
_R_SIGN = (1, 1, -1, -1)
_I_PICK = ("q", "p", "q", "p")
_I_SIGN = (1, -1, -1, 1)


def real_imag_hbar_series(split: SplitSeries, order: int):
    """R_m, I_m with S' = R + i I as a series in real powers of hbar:
    the factor (-i)^m distributes p_m/q_m over both with a 4-cycle of signs."""
    R, I = [], []
    for m in range(order + 1):
        src = split.p[m] if _R_PICK[m % 4] == "p" else split.q[m]
        R.append(src.scale(_R_SIGN[m % 4]))
        src = split.q[m] if _I_PICK[m % 4] == "q" else split.p[m]
        I.append(src.scale(_I_SIGN[m % 4]))
    return R, I


def imag_relation_check(
    order: int, split: Optional[SplitSeries] = None, ring: Ring = PHI_RING
) -> CheckReport:
    """Verify I = (hbar/2) (ln R)' order by order in hbar.

    The order-0 entry is vacuous (I_0 = 0 and the relation starts at order
    1); all higher orders are exact ring identities once (ln R)' is taken
    as R'/R by series division.
    """
    if split is None:
        split = split_series(generate_series(order, "minus", ring))
    R, I = real_imag_hbar_series(split, order)
    log_d = series_log_deriv(R, Expression.u_pow(-1, ring), max(order - 1, 0))
    report = CheckReport("imag-relation")
    report.add(0, I[0].is_zero(), "vacuous")
    for m in range(1, order + 1):
        ok = I[m] == log_d[m - 1].scale(HALF)
        report.add(m, ok)
    return report
