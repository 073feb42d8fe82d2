"""Increasing homeomorphisms of the real line.

This module is the numerical substrate for everything else: maps are plain
callables wrapped in Homeo1D, inverses are found by geometric bracket
expansion followed by Brent refinement, and solver output can be frozen into
a piecewise linear interpolant with affine tails.

Conventions: all maps are strictly increasing and defined on the whole line.
Nothing here knows about planes, leaves, or flows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, InversionBracketError

DEFAULT_TOL = 1e-12
BRACKET_START_WIDTH = 1.0
BRACKET_MAX_DOUBLINGS = 128
DIST_GRID_DEFAULT = 512


@dataclass(frozen=True)
class Homeo1D:
    """An increasing homeomorphism of the line.

    forward evaluates the map.  inverse_hint, when present, is trusted only
    after a round-trip check; otherwise inversion solves forward(x) = z with
    a bracketed root finder.
    """

    forward: Callable[[float], float]
    inverse_hint: Optional[Callable[[float], float]] = None
    label: str = ""

    def __call__(self, x: float) -> float:
        return evaluate(self, x)


def evaluate(h: Homeo1D, x: float) -> float:
    """Apply h to a single finite real."""
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError("non-finite argument: %r" % (x,))
    y = float(h.forward(x))
    if not math.isfinite(y):
        raise ConfigError("map returned non-finite value at %r" % (x,))
    return y


def bracketed_root(fn: Callable[[float], float], lo: float, hi: float,
                   tol: float = DEFAULT_TOL) -> float:
    """Root of an increasing fn on [lo, hi] with a verified sign change."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo > 0.0 or fhi < 0.0:
        raise InversionBracketError(
            "no sign change on bracket [%g, %g]" % (lo, hi))
    return float(brentq(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps))


def expand_bracket(fn: Callable[[float], float], center: float,
                   width: float = BRACKET_START_WIDTH,
                   max_doublings: int = BRACKET_MAX_DOUBLINGS) -> tuple:
    """Grow [center - w, center + w] geometrically until fn changes sign.

    fn is assumed increasing; returns (lo, hi) with fn(lo) <= 0 <= fn(hi).
    """
    lo, hi = center - width, center + width
    for _ in range(max_doublings):
        if fn(lo) <= 0.0 <= fn(hi):
            return lo, hi
        width *= 2.0
        # only the failing side needs to move, but moving both is harmless
        if fn(lo) > 0.0:
            lo = center - width
        if fn(hi) < 0.0:
            hi = center + width
    raise InversionBracketError(
        "inversion bracket failure after %d doublings around %g"
        % (max_doublings, center))


def invert(h: Homeo1D, z: float, tol: float = DEFAULT_TOL) -> float:
    """Solve h(x) = z for x."""
    z = float(z)
    if not math.isfinite(z):
        raise ConfigError("non-finite argument: %r" % (z,))
    if h.inverse_hint is not None:
        x = float(h.inverse_hint(z))
        if math.isfinite(x) and abs(evaluate(h, x) - z) <= 10 * tol * max(1.0, abs(z)):
            return x
        # hint was wrong or imprecise; fall through to the solver
    gap = lambda x: evaluate(h, x) - z
    lo, hi = expand_bracket(gap, z)
    return bracketed_root(gap, lo, hi, tol)


def iterate(h: Homeo1D, n: int, x: float, tol: float = DEFAULT_TOL) -> float:
    """n-fold composition h^n(x); negative n walks through the inverse."""
    if n != int(n):
        raise ConfigError("iteration count must be an integer, got %r" % (n,))
    n = int(n)
    v = float(x)
    for _ in range(abs(n)):
        v = evaluate(h, v) if n > 0 else invert(h, v, tol)
    return v


def dist_k(g: Homeo1D, h: Homeo1D, span: float,
           grid: int = DIST_GRID_DEFAULT, tol: float = DEFAULT_TOL) -> float:
    """Pseudo-distance between two line homeomorphisms.

    Maximum over grid points x in [-span, span] of
    |g(x) - h(x)| + |g^{-1}(x) - h^{-1}(x)|.
    The true supremum is approximated on an even grid.
    """
    if span <= 0 or grid < 2:
        raise ConfigError("need positive span and at least 2 grid points")
    worst = 0.0
    for x in np.linspace(-span, span, grid):
        d = abs(evaluate(g, x) - evaluate(h, x))
        d += abs(invert(g, x, tol) - invert(h, x, tol))
        worst = max(worst, d)
    return worst


class PiecewiseMonotoneInterpolant:
    """Monotone linear interpolant with affine continuation outside its span.

    Knots must be strictly increasing in both coordinates, which makes the
    interpolant itself an increasing homeomorphism of the line once the end
    slopes are extended affinely.  Out-of-window evaluations are counted so
    verification passes can flag them.
    """

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ConfigError("need matching 1-d knot arrays with >= 2 knots")
        if not (np.all(np.diff(xs) > 0) and np.all(np.diff(ys) > 0)):
            raise ConfigError("knots must be strictly increasing in x and y")
        self.xs = xs
        self.ys = ys
        self.slope_lo = (ys[1] - ys[0]) / (xs[1] - xs[0])
        self.slope_hi = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        self.extrapolations = 0

    def window(self) -> tuple:
        return float(self.xs[0]), float(self.xs[-1])

    def covers(self, x: float) -> bool:
        return self.xs[0] <= x <= self.xs[-1]

    def __call__(self, x: float) -> float:
        x = float(x)
        if x < self.xs[0]:
            self.extrapolations += 1
            return float(self.ys[0] + self.slope_lo * (x - self.xs[0]))
        if x > self.xs[-1]:
            self.extrapolations += 1
            return float(self.ys[-1] + self.slope_hi * (x - self.xs[-1]))
        return float(np.interp(x, self.xs, self.ys))

    def inverse(self, y: float) -> float:
        y = float(y)
        if y < self.ys[0]:
            self.extrapolations += 1
            return float(self.xs[0] + (y - self.ys[0]) / self.slope_lo)
        if y > self.ys[-1]:
            self.extrapolations += 1
            return float(self.xs[-1] + (y - self.ys[-1]) / self.slope_hi)
        return float(np.interp(y, self.ys, self.xs))

    def as_homeo(self, label: str = "") -> Homeo1D:
        return Homeo1D(forward=self.__call__, inverse_hint=self.inverse,
                       label=label or "interpolant")


def tabulate(h: Homeo1D, window: tuple, knots: int) -> PiecewiseMonotoneInterpolant:
    """Freeze h into an interpolant on an even grid over window."""
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi or knots < 2:
        raise ConfigError("window must be increasing with >= 2 knots")
    xs = np.linspace(lo, hi, int(knots))
    ys = np.array([evaluate(h, x) for x in xs])
    return PiecewiseMonotoneInterpolant(xs, ys)
