"""Fractional-flow function of a mobility pair and its inflection structure.

For a pair (m_a, m_b) the flux is f(s) = m_a(s) / (m_a(s) + m_b(1-s)).
Derivatives come from jet arithmetic, with the second phase evaluated
through the sign-alternating reflection.  The closed forms

    f'  = h / m**2,                h  = m_a'*m_b + m_a*m_b'
    f'' = (h'*m - 2*m'*h) / m**3,  h' = m_a''*m_b - m_a*m_b''

(all m_b symbols taken at 1-s, m = m_a + m_b, m' the true s-derivative)
are provided as an independent cross-check of the jet route.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .jet import DomainError, Jet3, Real, add, div, reflect
from .models import ModelPair
from .classifier import sign_changes

DEFAULT_GRID_N = 8192
DEFAULT_EPS = 1e-6
ZERO_TOL = 1e-13


@dataclass(frozen=True)
class Inflection:
    s: float
    direction: str  # "-+" or "+-": sign of f'' before -> after


@dataclass
class FluxAnalysis:
    inflections: list[Inflection]
    s1: Optional[float]
    s2: Optional[float]
    s_shaped: bool
    f3_at_half: Optional[float]
    tangency_warnings: list[float] = field(default_factory=list)


def f_jet(pair: ModelPair, s: Real) -> Jet3:
    """Jet of the fractional-flow function at s (scalar or array in (0,1))."""
    ja = pair.m_a.eval_jet(s)
    jb = reflect(pair.m_b.eval_jet, s)
    total = add(ja, jb)
    if np.any(np.asarray(total.f0) == 0.0):
        raise DomainError(f"zero total mobility at s={s!r}")
    return div(ja, total)


def f_value(pair: ModelPair, s: Real) -> Real:
    """Flux value only, extended by the exact limits f(0) = 0 and f(1) = 1."""
    if isinstance(s, np.ndarray):
        out = np.empty_like(s, dtype=float)
        interior = (s != 0.0) & (s != 1.0)
        out[s == 0.0] = 0.0
        out[s == 1.0] = 1.0
        if np.any(interior):
            si = s[interior]
            va = pair.m_a.eval(si)
            vb = pair.m_b.eval(1.0 - si)
            out[interior] = va / (va + vb)
        return out
    if s == 0.0:
        return 0.0
    if s == 1.0:
        return 1.0
    va = pair.m_a.eval(s)
    vb = pair.m_b.eval(1.0 - s)
    total = va + vb
    if total == 0.0:
        raise DomainError(f"zero total mobility at s={s!r}")
    return va / total


def f2_closed(pair: ModelPair, s: Real) -> Real:
    """Second derivative of f from the closed form (cross-check of f_jet)."""
    ja = pair.m_a.eval_jet(s)
    jb = pair.m_b.eval_jet(1.0 - s)  # own-variable derivatives, no reflection signs
    m = ja.f0 + jb.f0
    if np.any(np.asarray(m) == 0.0):
        raise DomainError(f"zero total mobility at s={s!r}")
    m1 = ja.f1 - jb.f1
    h = ja.f1 * jb.f0 + ja.f0 * jb.f1
    h1 = ja.f2 * jb.f0 - ja.f0 * jb.f2
    return (h1 * m - 2.0 * m1 * h) / m ** 3


def _first_root(pair: ModelPair, g_of_jets, label: str, grid_n: int, eps: float, tol: float):
    s = np.linspace(eps, 1.0 - eps, grid_n)
    g = np.asarray(g_of_jets(pair.m_a.eval_jet(s), pair.m_b.eval_jet(1.0 - s)), dtype=float)
    func = lambda t: float(g_of_jets(pair.m_a.eval_jet(t), pair.m_b.eval_jet(1.0 - t)))
    roots = sign_changes(s, g, func, tol)
    if not roots:
        return None
    if len(roots) > 1:
        warnings.warn(f"{label} has {len(roots)} sign changes; reporting the first", stacklevel=3)
    return roots[0][0]


def find_s1(pair: ModelPair, grid_n: int = 4096, eps: float = DEFAULT_EPS, tol: float = 1e-12):
    """Sign change of the total-mobility derivative m_a'(s) - m_b'(1-s).

    None when there is no sign change on the clipped grid.  For admissible
    pairs the root is unique; otherwise the first bracket is refined and a
    multiplicity warning is emitted.
    """
    return _first_root(pair, lambda ja, jb: ja.f1 - jb.f1, "s1", grid_n, eps, tol)


def find_s2(pair: ModelPair, grid_n: int = 4096, eps: float = DEFAULT_EPS, tol: float = 1e-12):
    """Sign change of m_a''(s)*m_b(1-s) - m_a(s)*m_b''(1-s) (i.e. of h')."""
    return _first_root(
        pair, lambda ja, jb: ja.f2 * jb.f0 - ja.f0 * jb.f2, "s2", grid_n, eps, tol
    )


def inflection_points(
    pair: ModelPair,
    grid_n: int = DEFAULT_GRID_N,
    tol: float = 1e-12,
    eps: float = DEFAULT_EPS,
) -> FluxAnalysis:
    """Locate every transversal sign change of f'' on the clipped grid.

    Each bracketed sign change is refined by bisection to an interval
    below tol.  Grid points where |f''| < ZERO_TOL without an adjacent
    sign change are reported as tangency warnings, not inflections.  The
    S-shaped verdict is exactly "one inflection"; f3_at_half is populated
    for symmetric pairs (identical expressions).
    """
    if grid_n < 1000:
        raise ValueError(f"grid_n must be >= 1000, got {grid_n}")
    s = np.linspace(eps, 1.0 - eps, grid_n)
    y = np.asarray(f_jet(pair, s).f2, dtype=float)

    func = lambda t: float(f_jet(pair, t).f2)
    found = sign_changes(s, y, func, tol)
    inflections = [Inflection(root, direction) for root, direction in found]

    # near-zero samples not adjacent to a crossing are tangency suspects
    warnings_list: list[float] = []
    near_zero = np.flatnonzero(np.abs(y) < ZERO_TOL)
    roots = np.array([i.s for i in inflections])
    spacing = s[1] - s[0]
    for i in near_zero:
        if roots.size == 0 or np.min(np.abs(roots - s[i])) > 2.0 * spacing:
            warnings_list.append(float(s[i]))

    f3_half = None
    if pair.m_a == pair.m_b:
        f3_half = float(f_jet(pair, 0.5).f3)

    return FluxAnalysis(
        inflections=inflections,
        s1=find_s1(pair, eps=eps),
        s2=find_s2(pair, eps=eps),
        s_shaped=len(inflections) == 1,
        f3_at_half=f3_half,
        tangency_warnings=warnings_list,
    )


def analysis_to_dict(analysis: FluxAnalysis) -> dict:
    """JSON-ready dict mirroring FluxAnalysis."""
    return {
        "inflections": [{"s": i.s, "direction": i.direction} for i in analysis.inflections],
        "s1": analysis.s1,
        "s2": analysis.s2,
        "s_shaped": analysis.s_shaped,
        "f3_at_half": analysis.f3_at_half,
        "tangency_warnings": analysis.tangency_warnings,
    }


def analysis_to_text(analysis: FluxAnalysis) -> str:
    lines = []
    for i in analysis.inflections:
        lines.append(f"inflection: s={i.s!r} direction={i.direction}")
    lines += [
        f"s1: {'absent' if analysis.s1 is None else repr(analysis.s1)}",
        f"s2: {'absent' if analysis.s2 is None else repr(analysis.s2)}",
        f"s_shaped: {str(analysis.s_shaped).lower()}",
        f"f3_at_half: {'n/a' if analysis.f3_at_half is None else repr(analysis.f3_at_half)}",
    ]
    for w in analysis.tangency_warnings:
        lines.append(f"tangency_warning: s={w!r}")
    return "\n".join(lines)
