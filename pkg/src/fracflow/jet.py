"""Order-3 truncated Taylor ("jet") arithmetic.

A Jet3 carries a function value together with its first three derivatives
at a point.  Propagating jets through arithmetic gives exact derivatives of
composed expressions, with none of the cancellation noise of finite
differences.  Components may be Python floats or numpy arrays (for
whole-grid evaluation); every rule below is elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

Real = Union[float, np.ndarray]


class DomainError(ArithmeticError):
    """Evaluation left the domain (zero divisor, bad power base, ...)."""


@dataclass(frozen=True)
class Jet3:
    """Value and first three derivatives of a scalar function at a point."""

    f0: Real
    f1: Real
    f2: Real
    f3: Real

    def __add__(self, other: "Jet3") -> "Jet3":
        return add(self, other)

    def __sub__(self, other: "Jet3") -> "Jet3":
        return sub(self, other)

    def __mul__(self, other: "Jet3") -> "Jet3":
        return mul(self, other)

    def __truediv__(self, other: "Jet3") -> "Jet3":
        return div(self, other)

    def __neg__(self) -> "Jet3":
        return neg(self)


def _zeros_like(s: Real) -> Real:
    return np.zeros_like(s) if isinstance(s, np.ndarray) else 0.0


def _ones_like(s: Real) -> Real:
    return np.ones_like(s) if isinstance(s, np.ndarray) else 1.0


def seed(s: Real) -> Jet3:
    """Jet of the identity function at s: (s, 1, 0, 0)."""
    return Jet3(s, _ones_like(s), _zeros_like(s), _zeros_like(s))


def constant(c: Real) -> Jet3:
    """Jet of a constant: (c, 0, 0, 0)."""
    return Jet3(c, _zeros_like(c), _zeros_like(c), _zeros_like(c))


def add(a: Jet3, b: Jet3) -> Jet3:
    return Jet3(a.f0 + b.f0, a.f1 + b.f1, a.f2 + b.f2, a.f3 + b.f3)


def sub(a: Jet3, b: Jet3) -> Jet3:
    return Jet3(a.f0 - b.f0, a.f1 - b.f1, a.f2 - b.f2, a.f3 - b.f3)


def neg(a: Jet3) -> Jet3:
    return Jet3(-a.f0, -a.f1, -a.f2, -a.f3)


def mul(a: Jet3, b: Jet3) -> Jet3:
    """Product jet via the Leibniz rule through third order."""
    return Jet3(
        a.f0 * b.f0,
        a.f1 * b.f0 + a.f0 * b.f1,
        a.f2 * b.f0 + 2.0 * a.f1 * b.f1 + a.f0 * b.f2,
        a.f3 * b.f0 + 3.0 * a.f2 * b.f1 + 3.0 * a.f1 * b.f2 + a.f0 * b.f3,
    )


def div(a: Jet3, b: Jet3) -> Jet3:
    """Quotient jet; solves the Leibniz recurrence for c in a = c*b."""
    if np.any(np.asarray(b.f0) == 0.0):
        raise DomainError("division by a jet with zero value")
    c0 = a.f0 / b.f0
    c1 = (a.f1 - c0 * b.f1) / b.f0
    c2 = (a.f2 - 2.0 * c1 * b.f1 - c0 * b.f2) / b.f0
    c3 = (a.f3 - 3.0 * c2 * b.f1 - 3.0 * c1 * b.f2 - c0 * b.f3) / b.f0
    return Jet3(c0, c1, c2, c3)


def _compose(phi0: Real, phi1: Real, phi2: Real, phi3: Real, u: Jet3) -> Jet3:
    # Faa di Bruno through order 3 for g = phi(u).
    return Jet3(
        phi0,
        phi1 * u.f1,
        phi2 * u.f1 * u.f1 + phi1 * u.f2,
        phi3 * u.f1 ** 3 + 3.0 * phi2 * u.f1 * u.f2 + phi1 * u.f3,
    )


def pow_const(a: Jet3, p: float) -> Jet3:
    """Jet of a**p for a constant real exponent p.

    Integer exponents are handled by repeated multiplication so that zero
    and negative bases stay exact; non-integer exponents require a positive
    base and go through the chain rule.
    """
    if p == round(p):
        n = int(round(p))
        if n >= 0:
            result = constant(_ones_like(a.f0))
            base = a
            k = n
            while k > 0:
                if k & 1:
                    result = mul(result, base)
                k >>= 1
                if k:
                    base = mul(base, base)
            return result
        return div(constant(_ones_like(a.f0)), pow_const(a, -p))
    if np.any(np.asarray(a.f0) <= 0.0):
        raise DomainError(f"non-integer power {p} of a non-positive value")
    u0 = a.f0
    phi0 = u0 ** p
    phi1 = p * u0 ** (p - 1.0)
    phi2 = p * (p - 1.0) * u0 ** (p - 2.0)
    phi3 = p * (p - 1.0) * (p - 2.0) * u0 ** (p - 3.0)
    return _compose(phi0, phi1, phi2, phi3, a)


def exp_jet(a: Jet3) -> Jet3:
    """Jet of exp(a)."""
    e = np.exp(a.f0)
    return _compose(e, e, e, e, a)


def reflect(m: Callable[[Real], Jet3], s: Real) -> Jet3:
    """Jet of s -> m(1 - s), given an evaluator for the jet of m.

    The derivatives of m at 1 - s pick up alternating signs from the inner
    reflection.
    """
    j = m(1.0 - s)
    return Jet3(j.f0, -j.f1, j.f2, -j.f3)
