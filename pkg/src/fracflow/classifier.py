"""Membership checks for the admissible mobility class.

A mobility m is admissible when, on (0,1): it is positive with m(0) = 0
(c1), strictly increasing with m'(0) = 0 (c2), strictly convex (c3), and
m''/m' is decreasing (c4).  The starred variant c4star additionally asks
for m'/m decreasing.  All checks are grid-based sign tests on exact jet
values, so a verdict means "holds on the grid", not a proof.

Sign conventions used by the grid tests (valid wherever m, m' > 0):
    c4      <=>  m'''*m' - (m'')^2 < 0
    c4star  <=>  c4  and  m''*m - (m')^2 < 0
Testing the numerators avoids evaluating the ratios near the s -> 0
blow-up of m''/m'.

Values smaller than ZERO_TOL in magnitude are recorded as indeterminate
witnesses instead of pass/fail evidence: exact zeros occur both at
symmetry points and where very small mobilities underflow (for example the
exponential preset near s = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jet import DomainError
from .models import ModelExpr

ZERO_TOL = 1e-13
ENDPOINT_TOL = 1e-4
ENDPOINT_TOL_SLOPE = 1e-2
# Slowly vanishing slopes (powers just above 1) exceed any fixed absolute
# threshold at the clipped endpoint; fall back to the decay exponent of m'
# between eps and 64*eps. Exponents below this margin are unresolvable.
DECAY_EXPONENT_MARGIN = 1e-3
_MAX_WITNESSES = 4


@dataclass(frozen=True)
class Witness:
    """A grid point where a condition failed (or was too close to call)."""

    condition: str
    s: float
    value: float
    kind: str = "fail"  # "fail" | "indeterminate"


@dataclass
class ConditionReport:
    c1: str
    c2: str
    c3: str
    c4: str
    c4star: str
    in_class_M: bool
    witnesses: list[Witness]
    criterion_T3: float
    grid_n: int = 0
    eps: float = 0.0


def _classify(name: str, s: np.ndarray, values: np.ndarray, want_positive: bool):
    """Grid sign test; returns (verdict, witnesses)."""
    signed = values if want_positive else -values
    fail = signed <= -ZERO_TOL
    indet = np.abs(values) < ZERO_TOL
    witnesses: list[Witness] = []
    if np.any(fail):
        worst = int(np.argmin(signed))
        idx = list(np.flatnonzero(fail)[: _MAX_WITNESSES - 1])
        if worst not in idx:
            idx.append(worst)
        for i in idx:
            witnesses.append(Witness(name, float(s[i]), float(values[i])))
    for i in np.flatnonzero(indet)[:_MAX_WITNESSES]:
        witnesses.append(Witness(name, float(s[i]), float(values[i]), kind="indeterminate"))
    verdict = "fail" if np.any(fail) else "pass"
    return verdict, witnesses


def _slope_vanishes_at_zero(m: ModelExpr, eps: float):
    """Endpoint test for m'(0) = 0: absolute threshold, then decay exponent."""
    m1_eps = float(m.eval_jet(eps).f1)
    if m1_eps < ENDPOINT_TOL_SLOPE:
        return True, m1_eps
    m1_far = float(m.eval_jet(64.0 * eps).f1)
    if m1_far <= 0.0 or m1_eps <= 0.0:
        return False, m1_eps
    rho = math.log(m1_far / m1_eps) / math.log(64.0)
    return rho >= DECAY_EXPONENT_MARGIN, m1_eps


def check_conditions(m: ModelExpr, grid_n: int = 4096, eps: float = 1e-6) -> ConditionReport:
    """Evaluate the admissibility conditions of m on a clipped uniform grid.

    The grid is s_i = eps + i*(1-2*eps)/(grid_n-1).  Endpoint conditions
    m(0) = 0 and m'(0) = 0 are checked at s = eps: the value against
    ENDPOINT_TOL, the slope against ENDPOINT_TOL_SLOPE with a decay-exponent
    fallback for slopes that vanish too slowly to clear a fixed threshold.
    """
    if grid_n < 100:
        raise ValueError(f"grid_n must be >= 100, got {grid_n}")
    if not 0.0 < eps < 1e-3:
        raise ValueError(f"eps must be in (0, 1e-3), got {eps}")

    s = np.linspace(eps, 1.0 - eps, grid_n)
    j = m.eval_jet(s)

    verdicts: dict[str, str] = {}
    witnesses: list[Witness] = []
    for name, values, want_positive in (
        ("c1", j.f0, True),
        ("c2", j.f1, True),
        ("c3", j.f2, True),
        ("c4", j.f3 * j.f1 - j.f2 ** 2, False),
        ("c4star_extra", j.f2 * j.f0 - j.f1 ** 2, False),
    ):
        verdict, wit = _classify(name, s, np.asarray(values, dtype=float), want_positive)
        verdicts[name] = verdict
        witnesses.extend(wit)

    m_eps = float(j.f0[0])
    if verdicts["c1"] == "pass" and not m_eps < ENDPOINT_TOL:
        verdicts["c1"] = "fail"
        witnesses.append(Witness("c1", float(s[0]), m_eps))
    if verdicts["c2"] == "pass":
        ok, m1_eps = _slope_vanishes_at_zero(m, eps)
        if not ok:
            verdicts["c2"] = "fail"
            witnesses.append(Witness("c2", float(s[0]), m1_eps))

    c4star = "pass" if verdicts["c4"] == "pass" and verdicts["c4star_extra"] == "pass" else "fail"
    in_class = all(verdicts[c] == "pass" for c in ("c1", "c2", "c3", "c4"))
    try:
        t3 = criterion_T3(m)
    except DomainError:
        t3 = math.nan
    return ConditionReport(
        c1=verdicts["c1"],
        c2=verdicts["c2"],
        c3=verdicts["c3"],
        c4=verdicts["c4"],
        c4star=c4star,
        in_class_M=in_class,
        witnesses=witnesses,
        criterion_T3=t3,
        grid_n=grid_n,
        eps=eps,
    )


def criterion_T3(m: ModelExpr) -> float:
    """Value of (m''/m^3)' at s = 0.5, i.e. (m'''*m - 3*m''*m')/m^4.

    For a symmetric pair m_a = m_b satisfying c1-c3, a positive value means
    the flux has an inflection of the wrong orientation at 0.5 and hence is
    not S-shaped.
    """
    j = m.eval_jet(0.5)
    if j.f0 == 0.0:
        raise DomainError("criterion undefined: m(0.5) = 0")
    return float((j.f3 * j.f0 - 3.0 * j.f2 * j.f1) / j.f0 ** 4)


_RATIOS = {
    "m2/m": lambda j: j.f3 * j.f0 - j.f2 * j.f1,  # numerator of (m''/m)'
    "m2/m1": lambda j: j.f3 * j.f1 - j.f2 ** 2,   # numerator of (m''/m')'
    "m1/m": lambda j: j.f2 * j.f0 - j.f1 ** 2,    # numerator of (m'/m)'
}
_RATIO_DENOMS = {
    "m2/m": lambda j: j.f0,
    "m2/m1": lambda j: j.f1,
    "m1/m": lambda j: j.f0,
}


def monotonicity_change_of_ratio(
    m: ModelExpr, which: str, grid_n: int = 4096, eps: float = 1e-6, tol: float = 1e-10
) -> list[float]:
    """Locations where the named derivative ratio changes monotonicity.

    which is one of "m2/m" (m''/m), "m2/m1" (m''/m'), "m1/m" (m'/m).  Sign
    changes of the ratio's derivative are bracketed on the clipped grid and
    refined by bisection to an interval below tol.  Returns an empty list
    when the ratio is monotone on the grid.
    """
    if which not in _RATIOS:
        raise ValueError(f"which must be one of {sorted(_RATIOS)}, got {which!r}")
    s = np.linspace(eps, 1.0 - eps, grid_n)
    j = m.eval_jet(s)
    den = np.asarray(_RATIO_DENOMS[which](j), dtype=float)
    if not np.all(den > 0.0):
        raise ValueError(f"ratio {which} denominator is not positive on the clipped grid")
    g = np.asarray(_RATIOS[which](j), dtype=float)

    func = lambda t: float(_RATIOS[which](m.eval_jet(t)))
    return [root for root, _ in sign_changes(s, g, func, tol)]


def sign_changes(s, values, func, tol, zero_tol: float = ZERO_TOL):
    """Bracket every transversal sign change of sampled values and refine.

    func is the scalar evaluator used by bisection.  Returns a list of
    (root, direction) with direction "-+" or "+-".  Runs of near-zero
    samples are skipped over: a sign change across such a run is still one
    transversal crossing, a same-sign run is not a crossing at all.
    """
    sgn = np.zeros(len(values), dtype=int)
    sgn[values > zero_tol] = 1
    sgn[values < -zero_tol] = -1

    out = []
    nz = np.flatnonzero(sgn)
    for k in range(len(nz) - 1):
        i, jdx = nz[k], nz[k + 1]
        if sgn[i] == sgn[jdx]:
            continue
        root = _bisect_sign_change(func, float(s[i]), float(s[jdx]), float(values[i]), tol)
        out.append((root, "-+" if sgn[i] < 0 else "+-"))
    return out


def _bisect_sign_change(func, lo, hi, f_lo, tol):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def report_to_dict(report: ConditionReport) -> dict:
    """JSON-ready dict mirroring ConditionReport."""
    return {
        "c1": report.c1,
        "c2": report.c2,
        "c3": report.c3,
        "c4": report.c4,
        "c4star": report.c4star,
        "in_class_M": report.in_class_M,
        "witnesses": [
            {"condition": w.condition, "s": w.s, "value": w.value, "kind": w.kind}
            for w in report.witnesses
        ],
        "criterion_T3": report.criterion_T3,
        "grid_n": report.grid_n,
        "eps": report.eps,
    }


def report_to_text(report: ConditionReport) -> str:
    """Structured key: value lines."""
    lines = [
        f"c1: {report.c1}",
        f"c2: {report.c2}",
        f"c3: {report.c3}",
        f"c4: {report.c4}",
        f"c4star: {report.c4star}",
        f"in_class_M: {str(report.in_class_M).lower()}",
        f"criterion_T3: {report.criterion_T3!r}",
        f"grid_n: {report.grid_n}",
        f"eps: {report.eps!r}",
    ]
    for w in report.witnesses:
        lines.append(f"witness: {w.condition} s={w.s!r} value={w.value!r} kind={w.kind}")
    return "\n".join(lines)
