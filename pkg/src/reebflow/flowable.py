"""Flowable pairs on the line: square roots, halving sequences, dyadic flows.

A flowable pair couples an equivalence relation on the plane with an
increasing fixed-point-free homeomorphism f.  The relation is handed over as
a class map phi: phi(x, x', y) = y' exactly when (x, x') and (y, y') lie in
the same class.  Compatibility demands that classes are graphs of increasing
maps, that (x, f(x)) all share one class, and that applying f to both slots
stays inside a class.

The central construction: the square root of f is, at each point x, the
unique fixed point of the order-reversing map u -> phi(u, f(x), x).  Halving
repeatedly yields maps f_k with f_k = f_{k+1} o f_{k+1}, and products of the
f_k realize a flow at every dyadic time.  Real times are bracketed between
dyadics until the two evaluations pinch below tolerance.

Maps below the identity are handled by running the machinery on the inverse
and flipping the time sign on the way out.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import (ConfigError, DyadicDepthError, FlowResolutionError,
                     RelationError)
from .homeo1d import (DEFAULT_TOL, Homeo1D, bracketed_root, evaluate, invert,
                      iterate, tabulate)

DEFAULT_WINDOW = (-64.0, 64.0)
DEFAULT_KNOTS = 4097
DEFAULT_HORIZON = 64.0
CHECK_TOL = 1e-8
VALIDATION_SEED = 20260822


class EquivClassMap:
    """Class map phi(x, x', y) -> y' of a plane equivalence relation.

    Validation spot-checks, on sampled triples, that phi is reflexive
    (phi(x, x', x) = x'), strictly increasing in the third slot, strictly
    decreasing in the first slot, and transitive in the surrogate form
    phi(y, phi(x, x', y), z) = phi(x, x', z).
    """

    def __init__(self, phi: Callable[[float, float, float], float],
                 label: str = "", validate: bool = True,
                 check_tol: float = CHECK_TOL, samples: int = 16):
        self.phi = phi
        self.label = label
        if validate:
            self._spot_check(check_tol, samples)

    def __call__(self, x: float, xp: float, y: float) -> float:
        return float(self.phi(float(x), float(xp), float(y)))

    def _spot_check(self, check_tol: float, samples: int) -> None:
        rng = np.random.default_rng(VALIDATION_SEED)
        pts = rng.uniform(-4.0, 4.0, size=(samples, 4))
        for x, xp, y, z in pts:
            scale = 1.0 + max(abs(x), abs(xp), abs(y), abs(z))
            if abs(self(x, xp, x) - xp) > check_tol * scale:
                raise RelationError(
                    "class map is not reflexive at (%.3g, %.3g)" % (x, xp))
            if self(x, xp, y) >= self(x, xp, y + 0.5):
                raise RelationError(
                    "class map is not increasing in its third slot")
            if self(x, xp, y) <= self(x + 0.5, xp, y):
                raise RelationError(
                    "class map is not decreasing in its first slot")
            lhs = self(y, self(x, xp, y), z)
            rhs = self(x, xp, z)
            if abs(lhs - rhs) > check_tol * (1.0 + abs(rhs)):
                raise RelationError("class map fails transitivity surrogate")


class FlowablePair:
    """Relation plus compatible homeomorphism, ready for flow construction."""

    def __init__(self, relation: EquivClassMap, f: Homeo1D,
                 validate: bool = True, check_tol: float = CHECK_TOL,
                 samples: int = 12, tol: float = DEFAULT_TOL,
                 window: tuple = DEFAULT_WINDOW, label: str = ""):
        self.relation = relation
        self.f = f
        self.tol = tol
        self.window = (float(window[0]), float(window[1]))
        self.label = label or getattr(f, "label", "")
        d0 = evaluate(f, 0.0) - 0.0
        if d0 == 0.0:
            raise ConfigError("map has a fixed point at 0; not fixed-point free")
        self.flipped = d0 < 0.0
        if validate:
            self._spot_check(check_tol, samples)

    # working map: always strictly above the identity
    def work_forward(self, x: float) -> float:
        if self.flipped:
            return invert(self.f, x, self.tol)
        return evaluate(self.f, x)

    def work_backward(self, x: float) -> float:
        if self.flipped:
            return evaluate(self.f, x)
        return invert(self.f, x, self.tol)

    def _spot_check(self, check_tol: float, samples: int) -> None:
        rng = np.random.default_rng(VALIDATION_SEED + 1)
        phi = self.relation
        f = self.f
        sign = -1.0 if self.flipped else 1.0
        for x, y in rng.uniform(-4.0, 4.0, size=(samples, 2)):
            fx, fy = evaluate(f, x), evaluate(f, y)
            if sign * (fx - x) <= 0.0 or sign * (fy - y) <= 0.0:
                raise RelationError(
                    "map crosses the identity; fixed-point-free input required")
            scale = 1.0 + max(abs(x), abs(y), abs(fx), abs(fy))
            # classes are symmetric: swapping both slots of a related pair
            # must land back on the starting point
            if abs(phi(fx, x, phi(x, fx, y)) - y) > check_tol * scale:
                raise RelationError("class symmetry fails near x=%.3g" % x)
            # (x, f(x)) and (y, f(y)) share one class
            if abs(phi(x, fx, y) - fy) > check_tol * scale:
                raise RelationError(
                    "graph of the map is not a single class near x=%.3g" % x)
            # applying the map to both slots of a class stays in the class
            if abs(phi(x, y, fx) - fy) > check_tol * scale:
                raise RelationError(
                    "map does not preserve classes near x=%.3g" % x)


def _sqrt_solver(phi: EquivClassMap, base: Callable[[float], float],
                 tol: float, bracket_pad: float = 0.0) -> Callable[[float], float]:
    """Pointwise square root of an above-identity map, memoized.

    At each x the value is the unique fixed point of the order-reversing
    u -> phi(u, base(x), x), bracketed by [x, base(x)].  bracket_pad widens
    the bracket by that fraction on both sides; the answer must not move.
    """
    cache: dict = {}

    def s(x: float) -> float:
        x = float(x)
        hit = cache.get(x)
        if hit is not None:
            return hit
        top = base(x)
        if not top > x:
            raise RelationError(
                "base map not above the identity at x=%.6g" % x)
        gap = lambda u: u - phi(u, top, x)
        lo, hi = x, top
        if bracket_pad > 0.0:
            pad = bracket_pad * (top - x)
            lo, hi = x - pad, top + pad
        if gap(lo) > 0.0 or gap(hi) < 0.0:
            raise RelationError(
                "relation not order-reversing; input is not a flowable pair"
                " (sign test failed at x=%.6g)" % x)
        root = bracketed_root(gap, lo, hi, tol)
        cache[x] = root
        return root

    return s


def square_root(pair: FlowablePair, tol: Optional[float] = None,
                bracket_pad: float = 0.0) -> Homeo1D:
    """Square root s of pair.f under the pair's relation: s(s(x)) = f(x).

    The result evaluates lazily: each point runs its own bracketed solve to
    tolerance tol, so accuracy does not degrade between knots.  Use
    square_root_table to freeze a grid snapshot instead.
    """
    tol = pair.tol if tol is None else float(tol)
    work = _sqrt_solver(pair.relation, pair.work_forward, tol, bracket_pad)
    if not pair.flipped:
        return Homeo1D(forward=work, label="sqrt(%s)" % pair.label)
    inner = Homeo1D(forward=work)
    return Homeo1D(forward=lambda x: invert(inner, x, tol),
                   inverse_hint=work, label="sqrt(%s)" % pair.label)


def square_root_table(pair: FlowablePair, window: tuple = DEFAULT_WINDOW,
                      knots: int = DEFAULT_KNOTS,
                      tol: Optional[float] = None):
    """Square root frozen onto an even knot grid over window."""
    return tabulate(square_root(pair, tol), window, knots)


class HalvingSequence:
    """Maps f_0 = f, f_k = square root of f_{k-1}, and the flow they span.

    maps[k] plays the role of time 2^{-k}; dyadic times compose the maps
    bit by bit, and other times are pinched between dyadic brackets.  All
    solving is lazy and memoized, so deep sequences cost nothing until
    they are evaluated.
    """

    def __init__(self, pair: FlowablePair, depth: int,
                 tol: Optional[float] = None, window: Optional[tuple] = None,
                 knots: int = DEFAULT_KNOTS, spot_samples: int = 3,
                 spot_levels: int = 2):
        if depth < 0:
            raise ConfigError("halving depth must be >= 0")
        self.pair = pair
        self.depth = int(depth)
        self.tol = pair.tol if tol is None else float(tol)
        self.window = pair.window if window is None else (
            float(window[0]), float(window[1]))
        self.knots = int(knots)
        self._work = [pair.work_forward]
        for k in range(1, self.depth + 1):
            self._work.append(
                _sqrt_solver(pair.relation, self._work[k - 1], self.tol))
        self.maps = [self._public_map(k) for k in range(self.depth + 1)]
        self._spot_verify(spot_samples, spot_levels)

    def _public_map(self, k: int) -> Homeo1D:
        work = self._work[k]
        if k == 0:
            return self.pair.f
        if not self.pair.flipped:
            return Homeo1D(forward=work, label="halving[%d]" % k)
        inner = Homeo1D(forward=work)
        return Homeo1D(forward=lambda x: invert(inner, x, self.tol),
                       inverse_hint=work, label="halving[%d]" % k)

    def _spot_verify(self, samples: int, levels: int) -> None:
        """Each halved map must again form a flowable pair with the relation."""
        if samples < 1 or levels < 1:
            return
        phi = self.pair.relation
        rng = np.random.default_rng(VALIDATION_SEED + 2)
        lo, hi = self.window
        pts = rng.uniform(max(lo, -8.0), min(hi, 8.0), size=(samples, 2))
        for k in range(1, min(levels, self.depth) + 1):
            wk = self._work[k]
            tol_k = max(1e-8, 10.0 * self.tol * (k + 1))
            for x, y in pts:
                lhs = phi(x, wk(x), y)
                if abs(lhs - wk(y)) > tol_k * (1.0 + abs(lhs)):
                    raise RelationError(
                        "halved map at level %d breaks the pair invariants" % k)

    # time decomposition helpers work on the above-identity side;
    # flipped pairs negate t on the way in.
    def _work_time(self, t: float) -> float:
        return -t if self.pair.flipped else t

    def _iterate_work(self, n: int, x: float) -> float:
        v = float(x)
        for _ in range(abs(int(n))):
            v = self._work[0](v) if n > 0 else self.pair.work_backward(v)
        return v

    def flow_dyadic(self, t: float, x: float) -> float:
        """Exact composition at a dyadic time within the available depth."""
        tw = self._work_time(float(t))
        num, den = Fraction(tw).as_integer_ratio()
        level = den.bit_length() - 1
        if level > self.depth:
            raise DyadicDepthError(
                "dyadic depth exceeded: time %r needs level %d, have %d"
                % (t, level, self.depth))
        n = math.floor(tw)
        frac = Fraction(tw) - n
        v = self._iterate_work(n, x)
        for i in range(1, level + 1):
            frac *= 2
            if frac >= 1:
                v = self._work[i](v)
                frac -= 1
        return v

    def flow(self, t: float, x: float, tol: Optional[float] = None,
             horizon: float = DEFAULT_HORIZON) -> float:
        """Value of the flow at any real time, to tolerance tol.

        Dyadic times within depth are composed exactly.  Otherwise t is
        bracketed by dyadics level by level until the two evaluations agree
        within tol; the return value is placed linearly inside the final
        bracket, so its error is below the achieved gap.
        """
        t = float(t)
        if abs(t) > horizon:
            raise ConfigError("time %g beyond horizon %g" % (t, horizon))
        tol = self.tol * 10 if tol is None else float(tol)
        tw = self._work_time(t)
        n = math.floor(tw)
        frac = Fraction(tw) - n
        v = self._iterate_work(n, x)
        gap = math.inf
        for i in range(1, self.depth + 1):
            frac *= 2
            if frac >= 1:
                v = self._work[i](v)
                frac -= 1
            if frac == 0:
                return v
            upper = self._work[i](v)
            gap = upper - v
            if gap < tol:
                return v + float(frac) * gap
        raise FlowResolutionError(
            "flow resolution failure: gap %.3e after depth %d" % (gap, self.depth),
            achieved_gap=gap)

    def deviation_from_identity(self, k: int, grid: int = 257) -> float:
        """Max of |maps[k](x) - x| over an even grid on the window."""
        lo, hi = self.window
        m = self.maps[k]
        return max(abs(evaluate(m, x) - x) for x in np.linspace(lo, hi, grid))

    def verify_generates(self, n_samples: int = 32,
                         tol: float = 1e-6, seed: int = 7) -> dict:
        """Spot-check that the flow's time-t images stay class-aligned.

        For sampled (t, x, y): phi(flow(t,x), flow(t,y), x) must return y.
        """
        rng = np.random.default_rng(seed)
        phi = self.pair.relation
        worst = 0.0
        failures = []
        for _ in range(n_samples):
            t = rng.uniform(-2.0, 2.0)
            x, y = rng.uniform(-4.0, 4.0, size=2)
            res = abs(phi(self.flow(t, x, tol / 10),
                          self.flow(t, y, tol / 10), x) - y)
            worst = max(worst, res)
            if res > tol:
                failures.append({"t": t, "x": x, "y": y, "residual": res})
        return {"samples": int(n_samples), "max_residual": worst,
                "tol": tol, "failures": failures}


def halving_sequence(pair: FlowablePair, depth: int,
                     tol: Optional[float] = None,
                     window: Optional[tuple] = None,
                     knots: int = DEFAULT_KNOTS) -> HalvingSequence:
    """Build the halving sequence of pair down to the given depth."""
    return HalvingSequence(pair, depth, tol=tol, window=window, knots=knots)


# ---------------------------------------------------------------------------
# builtin pairs


def translation_pair(step: float = 1.0) -> FlowablePair:
    """Horizontal translation: classes are graphs y = x + c, f(x) = x + step."""
    if step == 0.0:
        raise ConfigError("translation step must be nonzero")
    relation = EquivClassMap(lambda x, xp, y: y + (xp - x),
                             label="translation-classes")
    f = Homeo1D(forward=lambda x: x + step,
                inverse_hint=lambda z: z - step,
                label="translate(%g)" % step)
    return FlowablePair(relation, f, label="translation")


def cubic_pair() -> FlowablePair:
    """Cube-coordinate translation: classes have constant x'^3 - x^3.

    f(x) = (x^3 + 1)^(1/3); its flow is (x^3 + t)^(1/3), which makes this
    the standard nonlinear oracle for the solvers.
    """
    relation = EquivClassMap(
        lambda x, xp, y: float(np.cbrt(y ** 3 + xp ** 3 - x ** 3)),
        label="cubic-classes")
    f = Homeo1D(forward=lambda x: float(np.cbrt(x ** 3 + 1.0)),
                inverse_hint=lambda z: float(np.cbrt(z ** 3 - 1.0)),
                label="cubic-shift")
    return FlowablePair(relation, f, label="cubic")
