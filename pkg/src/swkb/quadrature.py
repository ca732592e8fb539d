"""Closed-contour integrals of ring expressions for polynomial superpotentials.

The contour is an ellipse around the two real turning points, never
collapsed to the real axis: every integrand of interest is analytic (in
particular single-valued in sqrt(u), which has an even number of branch
points inside), so the periodic trapezoid rule converges exponentially.
sqrt(u) is continued sample-to-sample around the contour; the global sign
is fixed so the leading action integral has positive real part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .algebra import Expression
from .errors import (
    AmbiguousRegionError,
    BranchTrackingError,
    ContourError,
    ConvergenceError,
    NoClassicalRegionError,
)

DEFAULT_TOL = 1e-10
MAX_SAMPLES = 2 ** 20
DEFAULT_ASPECT = 0.5
DEFAULT_CLEARANCE = 0.2  # fraction of the semi-major axis


@dataclass(frozen=True)
class PolynomialSuperpotential:
    """phi(x) = sum coefficients[k] x^k, plus the hbar of the problem."""

    coefficients: Tuple[float, ...]
    hbar: float = 1.0
    name: str = ""

    def __init__(self, coefficients, hbar: float = 1.0, name: str = ""):
        coeffs = tuple(float(c) for c in coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if len(coeffs) < 2 or coeffs[-1] == 0.0:
            raise ValueError("superpotential must have degree >= 1")
        if hbar <= 0:
            raise ValueError("hbar must be positive")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "hbar", float(hbar))
        object.__setattr__(self, "name", name)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def deriv_coefficients(self, k: int) -> np.ndarray:
        c = np.asarray(self.coefficients, dtype=float)
        for _ in range(k):
            c = c[1:] * np.arange(1, len(c))
            if len(c) == 0:
                c = np.zeros(1)
        return c

    def phi(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients))

    def phi_deriv(self, k: int, x):
        return np.polynomial.polynomial.polyval(x, self.deriv_coefficients(k))

    def v_minus(self, x):
        return self.phi(x) ** 2 - self.hbar * self.phi_deriv(1, x)

    def v_plus(self, x):
        return self.phi(x) ** 2 + self.hbar * self.phi_deriv(1, x)

    def potential(self, partner: str):
        return self.v_minus if partner == "minus" else self.v_plus

    @staticmethod
    def from_json_dict(data: dict) -> "PolynomialSuperpotential":
        return PolynomialSuperpotential(
            data["coefficients"], data.get("hbar", 1.0), data.get("name", "")
        )

    @staticmethod
    def load(path: str) -> "PolynomialSuperpotential":
        with open(path, "r", encoding="utf-8") as fh:
            return PolynomialSuperpotential.from_json_dict(json.load(fh))

    def to_json_dict(self) -> dict:
        return {"coefficients": list(self.coefficients), "hbar": self.hbar, "name": self.name}


def turning_points(sp: PolynomialSuperpotential, E: float):
    """All roots of phi(x)^2 = E, split into the real classical pair and the
    excluded rest.  Roots are Newton-polished on phi^2 - E."""
    if E <= 0:
        raise NoClassicalRegionError(f"E = {E} is not above the well bottom")
    phi_c = np.asarray(sp.coefficients, dtype=float)
    p2 = np.polynomial.polynomial.polymul(phi_c, phi_c)
    p2[0] -= E
    roots = np.polynomial.polynomial.polyroots(p2)
    dp2 = np.polynomial.polynomial.polyder(p2)
    for _ in range(3):
        val = np.polynomial.polynomial.polyval(roots, p2)
        der = np.polynomial.polynomial.polyval(roots, dp2)
        step = np.where(np.abs(der) > 1e-300, val / np.where(der == 0, 1, der), 0.0)
        roots = roots - step
    scale = max(1.0, float(np.max(np.abs(roots))))
    is_real = np.abs(roots.imag) < 1e-9 * scale
    real_roots = np.sort(roots[is_real].real)
    pairs = []
    for i in range(len(real_roots) - 1):
        xl, xr = real_roots[i], real_roots[i + 1]
        mid = 0.5 * (xl + xr)
        if sp.phi(mid) ** 2 < E:
            pairs.append((xl, xr))
    if not pairs:
        raise NoClassicalRegionError(f"no real classical region at E = {E}")
    if len(pairs) > 1:
        raise AmbiguousRegionError(f"{len(pairs)} classical regions at E = {E}")
    xl, xr = pairs[0]
    if xr - xl < 1e-8 * scale:
        raise AmbiguousRegionError(f"nearly degenerate turning points at E = {E}")
    excluded = [complex(r) for r in roots if not (abs(r.imag) < 1e-9 * scale
                                                  and xl - 1e-12 * scale <= r.real <= xr + 1e-12 * scale)]
    return float(xl), float(xr), excluded


@dataclass(frozen=True)
class Contour:
    """Counterclockwise ellipse around the classical turning pair.

    ``samples`` is the starting resolution; integration doubles it until
    the estimate settles."""

    center: float
    a: float  # semi-axis along the real direction
    b: float  # semi-axis along the imaginary direction
    samples: int = 256

    def points(self, samples: int):
        theta = 2.0 * np.pi * np.arange(samples) / samples
        z = self.center + self.a * np.cos(theta) + 1j * self.b * np.sin(theta)
        dz = -self.a * np.sin(theta) + 1j * self.b * np.cos(theta)
        return z, dz

    def min_distance(self, w: complex, probe: int = 720) -> float:
        z, _ = self.points(probe)
        return float(np.min(np.abs(z - w)))

    def contains(self, w: complex) -> bool:
        return ((w.real - self.center) / self.a) ** 2 + (w.imag / self.b) ** 2 < 1.0


def build_contour(
    sp: PolynomialSuperpotential,
    E: float,
    aspect: float = DEFAULT_ASPECT,
    clearance: float = DEFAULT_CLEARANCE,
    scale: float = 1.0,
) -> Contour:
    """Ellipse enclosing exactly the real turning pair, with every excluded
    branch point at least ``clearance * a`` away from the curve.  The
    semi-major factor shrinks step by step when an excluded root is close."""
    xl, xr, excluded = turning_points(sp, E)
    center = 0.5 * (xl + xr)
    half_gap = 0.5 * (xr - xl)
    for factor in (1.25 * scale, 1.15 * scale, 1.08 * scale):
        a = factor * half_gap
        b = aspect * a
        c = Contour(center, a, b)
        ok = True
        for w in excluded:
            if c.contains(w) or c.min_distance(w) < clearance * a:
                ok = False
                break
        if ok:
            return c
    raise ContourError(
        f"no admissible contour at E = {E}: excluded branch points too close"
    )


@dataclass
class BranchState:
    """Continuation record for sqrt(u) along the sampled contour: the chosen
    roots, whether the initial-sign convention forced a global flip, and
    whether the loop closed on the starting branch."""

    sqrt_u: np.ndarray
    flipped_global: bool = False
    wrap_consistent: bool = True

    def validate(self, u: np.ndarray):
        s = self.sqrt_u
        if np.any(np.abs(s * s - u) > 1e-10 * np.abs(u)):
            raise BranchTrackingError("tracked root does not square back to u")
        if np.any(np.real(s[1:] * np.conj(s[:-1])) < 0.0):
            raise BranchTrackingError("tracked root is not continuous sample-to-sample")


def track_sqrt_u(u: np.ndarray) -> BranchState:
    """Continuous square root along the closed sample loop: start from the
    principal root with nonnegative imaginary part at the first sample and
    flip sign wherever the principal value jumps branches (nearest-root
    continuation).  The loop must close consistently."""
    w = np.sqrt(u)
    jump = np.real(w[1:] * np.conj(w[:-1])) < 0.0
    sign = np.ones(len(w))
    sign[1:] = np.cumprod(np.where(jump, -1.0, 1.0))
    if np.real(w[0] * np.conj(sign[-1] * w[-1])) < 0.0:
        raise BranchTrackingError("sqrt(u) continuation does not close around the contour")
    s = sign * w
    if s[0].imag < 0:
        s = -s
    return BranchState(s)


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    samples_used: int

    def to_json_dict(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "samples_used": self.samples_used,
        }


def _evaluate_terms(expr: Expression, phi_vals: Dict[int, np.ndarray], s: np.ndarray, E: float):
    total = np.zeros_like(s, dtype=complex)
    for m, c in expr.terms.items():
        val = np.full_like(s, complex(c), dtype=complex)
        for k, a in m.derivs:
            val = val * phi_vals[k] ** a
        if m.h:
            val = val * s ** m.h
        if m.e:
            val = val * E ** m.e
        total = total + val
    return total


def contour_integrate(
    expr: Expression,
    sp: PolynomialSuperpotential,
    E: float,
    tol: float = DEFAULT_TOL,
    contour: Optional[Contour] = None,
    check_real: bool = True,
    start_samples: int = 256,
) -> IntegralResult:
    """Closed-contour integral of ``expr`` with sample doubling to ``tol``.

    Quantization integrands are real up to branch-tracking noise; with
    ``check_real`` the imaginary part is required to stay below 10 * tol
    (disable it to integrate deliberately non-real quantities)."""
    if contour is None:
        contour = build_contour(sp, E)
    orders = sorted({k for m in expr.terms for k, _ in m.derivs} | {0})
    prev = None
    samples = max(start_samples, contour.samples)
    while samples <= MAX_SAMPLES:
        z, dz = contour.points(samples)
        phi_vals = {k: np.asarray(sp.phi_deriv(k, z)) for k in orders}
        u = E - phi_vals[0] ** 2
        branch = track_sqrt_u(u)
        s = branch.sqrt_u
        weight = 2.0 * np.pi / samples
        action0 = weight * np.sum(s * dz)
        if action0.real < 0:
            s = -s
            branch.sqrt_u = s
            branch.flipped_global = True
        vals = _evaluate_terms(expr, phi_vals, s, E)
        total = weight * np.sum(vals * dz)
        if prev is not None and abs(total - prev) < tol:
            if check_real and abs(total.imag) >= 10.0 * tol:
                raise BranchTrackingError(
                    f"quantization integral has imaginary part {total.imag:.3e}"
                )
            return IntegralResult(complex(total), samples)
        prev = total
        samples *= 2
    raise ConvergenceError(f"contour integral did not converge within {MAX_SAMPLES} samples")
