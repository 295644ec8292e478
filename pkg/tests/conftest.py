"""Shared helpers: tolerance checks, FD oracles, random model draws."""

from __future__ import annotations

import numpy as np

import fracflow as ff


def rel_close(a: float, b: float, rtol: float, floor: float = 1e-12) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), floor)


def central_fd(func, x: float, h: float) -> float:
    return (func(x + h) - func(x - h)) / (2.0 * h)


def _base_member(rng: np.random.Generator) -> ff.ModelExpr:
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return ff.power(float(rng.uniform(0.1, 10.0)), float(rng.uniform(1.01, 8.0)))
    if kind == 1:
        return ff.brooks_b(float(rng.uniform(2.0, 6.0)), float(rng.uniform(2.0, 6.0)))
    return ff.chierici(1.0, float(rng.uniform(2.001, 10.0)), 1.0)


def draw_member(rng: np.random.Generator) -> ff.ModelExpr:
    """A random mobility from the well-behaved catalog families (powers,
    Brooks-Corey with alpha and eta at least 2, steep exponentials) or a
    pairwise product of two of them."""
    if int(rng.integers(0, 4)) == 3:
        return ff.product(_base_member(rng), _base_member(rng))
    return _base_member(rng)


def draw_c4star_candidate(rng: np.random.Generator) -> ff.ModelExpr:
    """A random preset from families where the starred condition may hold

    (convexity not required, so the parameter ranges are wider than for
    draw_member)."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return ff.power(float(rng.uniform(0.1, 10.0)), float(rng.uniform(1.01, 8.0)))
    if kind == 1:
        return ff.brooks_b(float(rng.uniform(1.01, 6.0)), float(rng.uniform(1.01, 6.0)))
    return ff.chierici(1.0, float(rng.uniform(1.0, 10.0)), 1.0)
