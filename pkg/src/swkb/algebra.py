"""Exact canonical algebra over the differential ring used by the series.

Ring generators: a symbol family f, f', f'', ... (f is the superpotential in
the main ring), half-integer powers of u = E - f^r, and integer powers of E
(both signs), with GaussianRational coefficients.  The defining relation
f^r = E - u is applied during normalization, so the bare-symbol exponent of
every canonical monomial is < r.

Two ring flavours are used:

* the superpotential ring (r = 2, relation phi^2 = E - u), carrying the
  whole quantization-series machinery;
* an auxiliary potential ring (r = 1, relation V = E - u), in which V itself
  is eliminated entirely; it hosts the plain semiclassical series that gets
  substituted back into the main ring.

Everything here is immutable and pure; no floating point enters except in
``evaluate``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .errors import PoleError, UndefinedDegreeError
from .gaussian import GR_I, GR_ONE, GR_ZERO, GaussianRational


@dataclass(frozen=True)
class Ring:
    """Identifies the relation f^r = E - u and display conventions."""

    name: str
    relation_power: int   # r: bare-symbol exponents are reduced below this
    deriv_prefix: str     # text-form prefix for the k-th derivative symbol

    @property
    def sym_gdeg(self) -> int:
        # scaling degree of one symbol factor, with [u] = [E] = 2
        return 2 // self.relation_power


PHI_RING = Ring("phi", 2, "d")
V_RING = Ring("V", 1, "D")


class Monomial:
    """Canonical monomial: product of derivative symbols, u^(h/2), E^e.

    ``derivs`` maps derivative order k >= 0 to a positive exponent; the
    order-0 exponent is < relation_power in canonical form.  ``h`` is the
    integer such that the monomial carries u^(h/2); ``e`` the E-exponent.
    """

    __slots__ = ("derivs", "h", "e", "_hash")

    def __init__(self, derivs: Iterable[Tuple[int, int]] = (), h: int = 0, e: int = 0):
        ds = tuple(sorted((int(k), int(a)) for k, a in derivs if a != 0))
        for k, a in ds:
            if k < 0 or a < 0:
                raise ValueError("derivative orders and exponents must be >= 0")
        object.__setattr__(self, "derivs", ds)
        object.__setattr__(self, "h", int(h))
        object.__setattr__(self, "e", int(e))
        object.__setattr__(self, "_hash", hash((ds, self.h, self.e)))

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Monomial)
            and self.derivs == other.derivs
            and self.h == other.h
            and self.e == other.e
        )

    def __hash__(self):
        return self._hash

    def deriv_exp(self, k: int) -> int:
        for kk, a in self.derivs:
            if kk == k:
                return a
        return 0

    def weight(self) -> int:
        """Grading raised by exactly 1 under d/dx: sum of k * exp_k."""
        return sum(k * a for k, a in self.derivs)

    def gdeg(self, ring: Ring) -> int:
        """Scaling grading preserved by d/dx ([symbol] = sym_gdeg, [u] = [E] = 2)."""
        return ring.sym_gdeg * sum(a for _, a in self.derivs) + self.h + 2 * self.e

    def sort_key(self):
        return (self.e, self.h, self.derivs)

    def __repr__(self):
        return f"Monomial({self.derivs!r}, h={self.h}, e={self.e})"


_MONO_ONE = Monomial()


def _merge_derivs(a: Tuple[Tuple[int, int], ...], b: Tuple[Tuple[int, int], ...]):
    if not a:
        return b
    if not b:
        return a
    out: Dict[int, int] = dict(a)
    for k, v in b:
        out[k] = out.get(k, 0) + v
    return tuple(sorted(out.items()))


def _with_exp(derivs: Tuple[Tuple[int, int], ...], k: int, delta: int):
    out = dict(derivs)
    new = out.get(k, 0) + delta
    if new < 0:
        raise ValueError("negative exponent")
    if new == 0:
        out.pop(k, None)
    else:
        out[k] = new
    return tuple(sorted(out.items()))


class Expression:
    """Exact sum of canonical monomials with GaussianRational coefficients.

    Instances are normalized on construction (defining relation applied,
    zero coefficients dropped) and treated as immutable; equality is
    equality of the normalized term maps.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, raw_terms: Iterable[Tuple[Monomial, GaussianRational]] = ()):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", _normalize(ring, raw_terms))

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(ring: Ring = PHI_RING) -> "Expression":
        return Expression(ring)

    @staticmethod
    def const(c, ring: Ring = PHI_RING) -> "Expression":
        c = GaussianRational.coerce(c)
        return Expression(ring, [(_MONO_ONE, c)])

    @staticmethod
    def sym(k: int = 0, exp: int = 1, ring: Ring = PHI_RING) -> "Expression":
        """The k-th derivative symbol raised to ``exp`` (k = 0 is f itself)."""
        return Expression(ring, [(Monomial([(k, exp)]), GR_ONE)])

    @staticmethod
    def u_pow(h: int, ring: Ring = PHI_RING) -> "Expression":
        """u^(h/2); h is the half-power numerator and may be negative."""
        return Expression(ring, [(Monomial(h=h), GR_ONE)])

    @staticmethod
    def e_pow(e: int, ring: Ring = PHI_RING) -> "Expression":
        return Expression(ring, [(Monomial(e=e), GR_ONE)])

    @staticmethod
    def from_terms(ring: Ring, pairs) -> "Expression":
        return Expression(ring, pairs)

    # -- ring arithmetic -------------------------------------------------

    def __add__(self, other: "Expression") -> "Expression":
        self._check(other)
        raw = list(self.terms.items()) + list(other.terms.items())
        return Expression(self.ring, raw)

    def __sub__(self, other: "Expression") -> "Expression":
        self._check(other)
        raw = list(self.terms.items()) + [(m, -c) for m, c in other.terms.items()]
        return Expression(self.ring, raw)

    def __neg__(self) -> "Expression":
        return Expression(self.ring, [(m, -c) for m, c in self.terms.items()])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        self._check(other)
        raw = []
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                raw.append(
                    (
                        Monomial(_merge_derivs(m1.derivs, m2.derivs), m1.h + m2.h, m1.e + m2.e),
                        c1 * c2,
                    )
                )
        return Expression(self.ring, raw)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "Expression":
        c = GaussianRational.coerce(c)
        if c.is_zero():
            return Expression(self.ring)
        return Expression(self.ring, [(m, cc * c) for m, cc in self.terms.items()])

    def _check(self, other: "Expression"):
        if not isinstance(other, Expression):
            raise TypeError(f"expected Expression, got {type(other).__name__}")
        if other.ring is not self.ring and other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring.name} vs {other.ring.name}")

    def __eq__(self, other):
        return (
            isinstance(other, Expression)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("Expression is not hashable")

    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus --------------------------------------------------------

    def differentiate(self) -> "Expression":
        """d/dx with E constant: d f^(k) = f^(k+1), d u^(h/2) follows from
        u' = -r f^(r-1) f'.  Exact Leibniz rule, result normalized."""
        r = self.ring.relation_power
        raw: List[Tuple[Monomial, GaussianRational]] = []
        for m, c in self.terms.items():
            for k, a in m.derivs:
                ds = _with_exp(_with_exp(m.derivs, k, -1), k + 1, +1)
                raw.append((Monomial(ds, m.h, m.e), c * a))
            if m.h != 0:
                # (h/2) u^((h-2)/2) * (-r f^(r-1) f')
                coeff = c * Fraction(-m.h * r, 2)
                ds = _with_exp(_with_exp(m.derivs, 0, r - 1), 1, +1)
                raw.append((Monomial(ds, m.h - 2, m.e), coeff))
        return Expression(self.ring, raw)

    def split_real_imag(self) -> Tuple["Expression", "Expression"]:
        """(re, im) with all symbols treated as real; self == re + i*im."""
        re_terms = []
        im_terms = []
        for m, c in self.terms.items():
            if c.re != 0:
                re_terms.append((m, GaussianRational(c.re)))
            if c.im != 0:
                im_terms.append((m, GaussianRational(c.im)))
        return Expression(self.ring, re_terms), Expression(self.ring, im_terms)

    def conjugate(self) -> "Expression":
        return Expression(self.ring, [(m, c.conjugate()) for m, c in self.terms.items()])

    # -- structure queries -------------------------------------------------

    def min_e_degree(self) -> int:
        if not self.terms:
            raise UndefinedDegreeError("min_e_degree of the zero expression")
        return min(m.e for m in self.terms)

    def max_e_degree(self) -> int:
        if not self.terms:
            raise UndefinedDegreeError("max_e_degree of the zero expression")
        return max(m.e for m in self.terms)

    def u_parity(self) -> str:
        """'all-odd-half' | 'all-even' | 'mixed' over the u half-powers."""
        if not self.terms:
            raise UndefinedDegreeError("u_parity of the zero expression")
        parities = {m.h % 2 for m in self.terms}
        if parities == {1}:
            return "all-odd-half"
        if parities == {0}:
            return "all-even"
        return "mixed"

    def min_h(self) -> int:
        if not self.terms:
            raise UndefinedDegreeError("min_h of the zero expression")
        return min(m.h for m in self.terms)

    def max_h(self) -> int:
        if not self.terms:
            raise UndefinedDegreeError("max_h of the zero expression")
        return max(m.h for m in self.terms)

    def max_deriv_order(self) -> int:
        orders = [k for m in self.terms for k, _ in m.derivs]
        return max(orders) if orders else 0

    def weights(self) -> set:
        return {m.weight() for m in self.terms}

    def gdegs(self) -> set:
        return {m.gdeg(self.ring) for m in self.terms}

    def shift_e(self, delta: int) -> "Expression":
        """Multiply by E^delta (exact exponent shift)."""
        return Expression(
            self.ring, [(Monomial(m.derivs, m.h, m.e + delta), c) for m, c in self.terms.items()]
        )

    def term_count(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> List[Tuple[Monomial, GaussianRational]]:
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key())

    # -- numerics ----------------------------------------------------------

    def evaluate(self, deriv_values, u, sqrt_u, e_value, sqrt_tol: float = 1e-9):
        """Evaluate at a point using the caller's square-root branch.

        ``deriv_values`` maps derivative order -> complex value (a sequence
        indexed by order also works).  ``sqrt_u`` must square to ``u`` within
        ``sqrt_tol`` relative; u^(h/2) is computed as sqrt_u**h so the branch
        is exactly the caller's.
        """
        scale = max(abs(u), 1.0)
        if abs(sqrt_u * sqrt_u - u) > sqrt_tol * scale:
            raise ValueError("sqrt_u does not square to u within tolerance")
        total = 0j
        for m, c in self.terms.items():
            if m.h < 0 and u == 0:
                raise PoleError("u = 0 with negative half-power")
            if m.e < 0 and e_value == 0:
                raise PoleError("E = 0 with negative E-exponent")
            val = complex(c)
            for k, a in m.derivs:
                val *= deriv_values[k] ** a
            if m.h:
                val *= sqrt_u ** m.h
            if m.e:
                val *= e_value ** m.e
            total += val
        return total

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        """Deterministic text form, e.g. ``3/8*E^1*u^-5/2*d1^2``."""
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [str(c)]
            if m.e:
                factors.append(f"E^{m.e}")
            if m.h:
                factors.append(f"u^{_half_str(m.h)}")
            for k, a in m.derivs:
                name = f"{self.ring.deriv_prefix}{k}"
                factors.append(name if a == 1 else f"{name}^{a}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def to_json_dict(self) -> dict:
        terms = []
        for m, c in self.sorted_terms():
            terms.append(
                {
                    "coef_re": [c.re.numerator, c.re.denominator],
                    "coef_im": [c.im.numerator, c.im.denominator],
                    "e": m.e,
                    "h": m.h,
                    "derivs": {str(k): a for k, a in m.derivs},
                }
            )
        return {"terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(data: dict, ring: Ring = PHI_RING) -> "Expression":
        raw = []
        for t in data["terms"]:
            c = GaussianRational(
                Fraction(t["coef_re"][0], t["coef_re"][1]),
                Fraction(t["coef_im"][0], t["coef_im"][1]),
            )
            m = Monomial([(int(k), a) for k, a in t["derivs"].items()], h=t["h"], e=t["e"])
            raw.append((m, c))
        return Expression(ring, raw)

    @staticmethod
    def from_json(s: str, ring: Ring = PHI_RING) -> "Expression":
        return Expression.from_json_dict(json.loads(s), ring)

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for idx, (m, c) in enumerate(self.sorted_terms()):
            out.append(_latex_term(self.ring, m, c, first=idx == 0))
        return "".join(out)

    def __repr__(self):
        return f"<Expr[{self.ring.name}] {self.to_text()}>"


def _normalize(ring: Ring, raw_terms) -> Dict[Monomial, GaussianRational]:
    """Apply f^r = E - u until every bare-symbol exponent is < r, then merge."""
    r = ring.relation_power
    acc: Dict[Monomial, GaussianRational] = {}
    stack = [(m, GaussianRational.coerce(c)) for m, c in raw_terms]
    while stack:
        m, c = stack.pop()
        if c.is_zero():
            continue
        a0 = m.deriv_exp(0)
        if a0 >= r:
            ds = _with_exp(m.derivs, 0, -r)
            stack.append((Monomial(ds, m.h, m.e + 1), c))
            stack.append((Monomial(ds, m.h + 2, m.e), -c))
            continue
        new = acc.get(m, GR_ZERO) + c
        if new.is_zero():
            acc.pop(m, None)
        else:
            acc[m] = new
    return acc


def _half_str(h: int) -> str:
    if h % 2 == 0:
        return str(h // 2)
    return f"{h}/2"


_PRIMES = {1: "'", 2: "''", 3: "'''"}


def _latex_symbol(ring: Ring, k: int, a: int) -> str:
    base = r"\phi" if ring.name == "phi" else "V"
    if k == 0:
        sym = base
    elif k in _PRIMES:
        sym = f"{{{base}{_PRIMES[k]}}}"
    else:
        sym = f"{{{base}^{{({k})}}}}"
    return sym if a == 1 else f"{sym}^{{{a}}}"


def _latex_coeff(c: GaussianRational) -> Tuple[str, str]:
    """Return (sign, magnitude-latex); complex coefficients stay inline."""

    def frac(q: Fraction) -> str:
        if q.denominator == 1:
            return str(abs(q.numerator))
        return rf"\frac{{{abs(q.numerator)}}}{{{q.denominator}}}"

    if c.im == 0:
        sign = "-" if c.re < 0 else "+"
        mag = frac(c.re)
        return sign, ("" if mag == "1" else mag)
    if c.re == 0:
        sign = "-" if c.im < 0 else "+"
        mag = frac(c.im)
        return sign, (f"{mag} i" if mag != "1" else "i")
    return "+", rf"\left({c.re}{'+' if c.im > 0 else '-'}{abs(c.im)}i\right)"


def _latex_term(ring: Ring, m: Monomial, c: GaussianRational, first: bool) -> str:
    base = r"E-\phi^2" if ring.name == "phi" else "E-V"
    sign, mag = _latex_coeff(c)
    num = []
    if mag:
        num.append(mag)
    if m.e > 0:
        num.append("E" if m.e == 1 else f"E^{{{m.e}}}")
    for k, a in m.derivs:
        num.append(_latex_symbol(ring, k, a))
    if m.h > 0:
        num.append(rf"({base})^{{{_half_str(m.h)}}}")
    den = []
    if m.e < 0:
        den.append("E" if m.e == -1 else f"E^{{{-m.e}}}")
    if m.h < 0:
        den.append(rf"({base})^{{{_half_str(-m.h)}}}")
    num_s = r"\,".join(num) if num else "1"
    den_s = r"\,".join(den)
    body = num_s if not den else rf"\frac{{{num_s}}}{{{den_s}}}"
    lead = ("-" if sign == "-" else "") if first else f" {sign} "
    return f"{lead}{body}"


# -- convenience symbols for the main ring -----------------------------------


def phi(k: int = 0, exp: int = 1) -> Expression:
    return Expression.sym(k, exp, PHI_RING)


def u_half(h: int) -> Expression:
    return Expression.u_pow(h, PHI_RING)


def E_pow(e: int) -> Expression:
    return Expression.e_pow(e, PHI_RING)


def const(c) -> Expression:
    return Expression.const(c, PHI_RING)


def i_times(x: Expression) -> Expression:
    return x.scale(GR_I)


def F_factor() -> Expression:
    """phi * u^(-1/2), the parity-compensating factor of the p/q coupling."""
    return phi() * u_half(-1)
