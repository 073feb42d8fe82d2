"""Quadrant model of the planar Reeb foliation and its builtin maps.

The open positive quadrant Q is foliated by the hyperbolas xy = c.  Leaves
accumulate on two boundary rays: the positive y-axis (leaf ends as x -> 0)
and the positive x-axis.  Points are stored as (lx, ly) = (ln x, ln y); the
leaf invariant lx + ly is then preserved to last-bit rounding by every
builtin map, and orbits sweeping 2^(2n) scale ranges keep O(n) coordinates.

Builtins:
  * the hyperbolic map (x, y) -> (2x, y/2), a time-one map of an obvious
    leaf-preserving flow;
  * a distorted variant that composes the hyperbolic map with a shear
    supported on the sector 1/2 <= y/x < 2.  The shear strength is the
    bump profile below.  This map preserves every leaf and moves every
    point forward, yet it embeds in no leafwise flow; the matching module
    quantifies the obstruction.

Angle bookkeeping: theta = y/x drops by an exact factor of 4 under the
hyperbolic map, so sector visits are rare and each forward orbit enters the
sector at most once.  That single crossing is what the closed-form iterate
exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ClosedFormError, ConfigError, SectorError

LN2 = math.log(2.0)
Y_AXIS = "y_axis"
X_AXIS = "x_axis"

DEFAULT_BUMP_AMPLITUDE = 32.0
# profile amplitudes above this break the slope bound the construction needs
_MAX_AMPLITUDE = 80.0


class BumpProfile:
    """Sector distortion strength beta on [1/2, 2].

    Built from an auxiliary increasing map h of [1/2, 1]: identity on
    [1/2, 3/4], then pulled slightly below the identity by a quartic bump of
    amplitude c_b vanishing to second order at both ends.  beta = theta/h on
    [1/2, 1] and copies itself one octave up: beta(theta) = beta(theta/2) on
    [1, 2].  Consequences, all grid-tested:

      (i)   beta = 1 exactly on [1/2,3/4] u [1,3/2] u {2}, beta > 1 elsewhere;
      (ii)  beta(theta) = beta(2 theta) on [1/2, 1];
      (iii) theta/beta(theta) is an increasing self-map of [1/2, 2];
      (iv)  theta/beta(theta)^2 is an increasing self-map of [1/2, 2].

    (iii) and (iv) need h' > 3/4, which holds with margin for the default
    amplitude; nondefault amplitudes are slope-checked at construction.
    """

    def __init__(self, amplitude: float = DEFAULT_BUMP_AMPLITUDE):
        amplitude = float(amplitude)
        if not 0.0 <= amplitude <= _MAX_AMPLITUDE:
            raise ConfigError(
                "bump amplitude must lie in [0, %g], got %g"
                % (_MAX_AMPLITUDE, amplitude))
        self.amplitude = amplitude
        if amplitude != DEFAULT_BUMP_AMPLITUDE:
            margin = self.slope_margin()
            if margin < 0.05:
                raise ConfigError(
                    "bump amplitude %g leaves slope margin %.4f < 0.05"
                    % (amplitude, margin))

    def h(self, theta):
        """The auxiliary map on [1/2, 1] (vectorized)."""
        theta = np.asarray(theta, dtype=float)
        bump = self.amplitude * (theta - 0.75) ** 2 * (1.0 - theta) ** 2
        out = np.where(theta <= 0.75, theta, theta - bump)
        return out if out.ndim else float(out)

    def factor(self, theta):
        """beta(theta) for theta in [1/2, 2] (vectorized)."""
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0.5) or np.any(theta > 2.0):
            raise ConfigError("profile argument outside [1/2, 2]")
        base = np.where(theta > 1.0, theta / 2.0, theta)
        out = base / self.h(base)
        return out if out.ndim else float(out)

    def log_factor(self, theta) -> float:
        return float(np.log(self.factor(theta)))

    def slope_margin(self, grid: int = 100001) -> float:
        """min h' - 3/4 on [1/2, 1] by central finite differences."""
        xs = np.linspace(0.5, 1.0, grid)
        hs = self.h(xs)
        slopes = np.gradient(hs, xs)
        return float(np.min(slopes) - 0.75)

    def shear_inverse_theta(self, theta_after: float, tol: float = 1e-14) -> float:
        """Solve theta/beta(theta)^2 = theta_after on [1/2, 2]."""
        theta_after = float(theta_after)
        if not 0.5 <= theta_after <= 2.0:
            raise ConfigError("profile argument outside [1/2, 2]")
        if self.amplitude == 0.0:
            return theta_after
        fn = lambda th: th / self.factor(th) ** 2 - theta_after
        if fn(0.5) == 0.0:
            return 0.5
        return float(brentq(fn, 0.5, 2.0, xtol=tol))


@dataclass(frozen=True)
class QuadrantPoint:
    """Interior point of the open positive quadrant, in log coordinates."""

    lx: float
    ly: float

    def __post_init__(self):
        if not (math.isfinite(self.lx) and math.isfinite(self.ly)):
            raise ConfigError("quadrant points must have finite log coordinates")

    @classmethod
    def from_xy(cls, x: float, y: float) -> "QuadrantPoint":
        if not (x > 0 and y > 0):
            raise ConfigError("quadrant points need x > 0 and y > 0")
        return cls(math.log(x), math.log(y))

    def x(self) -> float:
        return math.exp(self.lx)

    def y(self) -> float:
        return math.exp(self.ly)

    @property
    def leaf_log(self) -> float:
        """ln(xy); constant along each leaf."""
        return self.lx + self.ly

    @property
    def theta_log(self) -> float:
        """ln(y/x); drops by 2 ln 2 per hyperbolic step."""
        return self.ly - self.lx

    def in_sector(self) -> bool:
        return -LN2 <= self.theta_log < LN2


@dataclass(frozen=True)
class BoundaryPoint:
    """Point on one of the two boundary rays, by its positive coordinate."""

    side: str
    coord: float

    def __post_init__(self):
        if self.side not in (Y_AXIS, X_AXIS):
            raise ConfigError("side must be %r or %r" % (Y_AXIS, X_AXIS))
        if not (self.coord > 0 and math.isfinite(self.coord)):
            raise ConfigError("boundary coordinate must be positive and finite")

    @classmethod
    def on_y_axis(cls, y: float) -> "BoundaryPoint":
        return cls(Y_AXIS, float(y))

    @classmethod
    def on_x_axis(cls, x: float) -> "BoundaryPoint":
        return cls(X_AXIS, float(x))

    @property
    def log_coord(self) -> float:
        return math.log(self.coord)


def apply_hyperbolic(p: QuadrantPoint) -> QuadrantPoint:
    """(x, y) -> (2x, y/2); exact in log coordinates."""
    return QuadrantPoint(p.lx + LN2, p.ly - LN2)


def apply_hyperbolic_inverse(p: QuadrantPoint) -> QuadrantPoint:
    return QuadrantPoint(p.lx - LN2, p.ly + LN2)


def apply_shear(p: QuadrantPoint, profile: BumpProfile) -> QuadrantPoint:
    """Sector shear (x, y) -> (beta(y/x) x, y / beta(y/x)); sector only."""
    if not p.in_sector():
        raise SectorError("shear applied outside the sector at theta_log=%.6g"
                          % p.theta_log)
    lb = profile.log_factor(math.exp(p.theta_log))
    return QuadrantPoint(p.lx + lb, p.ly - lb)


def apply_shear_inverse(p: QuadrantPoint, profile: BumpProfile) -> QuadrantPoint:
    if not p.in_sector():
        raise SectorError("inverse shear applied outside the sector")
    theta_before = profile.shear_inverse_theta(math.exp(p.theta_log))
    lb = profile.log_factor(theta_before)
    return QuadrantPoint(p.lx - lb, p.ly + lb)


class ReebHomeo:
    """A leaf-preserving forward map of the quadrant model.

    kind is one of "hyperbolic_g", "counterexample", "composite"; the first
    two are the builtins, and composite chains other maps for experiments.
    Both builtins act on the boundary rays exactly like the hyperbolic map
    (the shear dies out as y/x leaves the sector).
    """

    def __init__(self, kind: str, profile: Optional[BumpProfile] = None,
                 parts: Optional[Iterable["ReebHomeo"]] = None):
        if kind not in ("hyperbolic_g", "counterexample", "composite"):
            raise ConfigError("unknown model kind %r" % (kind,))
        self.kind = kind
        self.profile = profile
        self.parts = list(parts) if parts is not None else []
        if kind == "counterexample" and profile is None:
            self.profile = BumpProfile()
        if kind == "composite" and not self.parts:
            raise ConfigError("composite model needs at least one part")
        self.fast = kind in ("hyperbolic_g", "counterexample")

    def apply(self, p: QuadrantPoint) -> QuadrantPoint:
        if self.kind == "hyperbolic_g":
            return apply_hyperbolic(p)
        if self.kind == "counterexample":
            if p.in_sector():
                return apply_hyperbolic(apply_shear(p, self.profile))
            return apply_hyperbolic(p)
        for part in self.parts:
            p = part.apply(p)
        return p

    def apply_inverse(self, p: QuadrantPoint) -> QuadrantPoint:
        if self.kind == "hyperbolic_g":
            return apply_hyperbolic_inverse(p)
        if self.kind == "counterexample":
            back = apply_hyperbolic_inverse(p)
            if back.in_sector():
                return apply_shear_inverse(back, self.profile)
            return back
        for part in reversed(self.parts):
            p = part.apply_inverse(p)
        return p

    def iterate(self, p: QuadrantPoint, n: int) -> QuadrantPoint:
        for _ in range(abs(int(n))):
            p = self.apply(p) if n > 0 else self.apply_inverse(p)
        return p

    def apply_boundary(self, bp: BoundaryPoint) -> BoundaryPoint:
        if self.kind == "composite":
            for part in self.parts:
                bp = part.apply_boundary(bp)
            return bp
        if bp.side == Y_AXIS:
            return BoundaryPoint(Y_AXIS, bp.coord / 2.0)
        return BoundaryPoint(X_AXIS, 2.0 * bp.coord)

    def apply_boundary_inverse(self, bp: BoundaryPoint) -> BoundaryPoint:
        if self.kind == "composite":
            for part in reversed(self.parts):
                bp = part.apply_boundary_inverse(bp)
            return bp
        if bp.side == Y_AXIS:
            return BoundaryPoint(Y_AXIS, 2.0 * bp.coord)
        return BoundaryPoint(X_AXIS, bp.coord / 2.0)

    # -- O(1) log-image for the builtins ------------------------------------
    #
    # Forward orbits cross the sector at most once, and the crossing angle
    # is the unique representative of theta in [1/2, 2) modulo factors of 4.
    # That collapses n steps to a single shift plus at most one shear.

    def forward_log_image(self, lx: float, ly: float, n: int) -> tuple:
        """(lx, ly) of the n-th forward image, n >= 0; builtins only."""
        if not self.fast:
            raise ConfigError("no closed-form path for %r" % self.kind)
        n = int(n)
        if n < 0:
            raise ConfigError("forward_log_image needs n >= 0")
        if n == 0:
            return lx, ly
        lb = 0.0
        if self.kind == "counterexample":
            theta_log = ly - lx
            j = math.floor((theta_log + LN2) / (2.0 * LN2))
            if 0 <= j <= n - 1:
                theta = math.exp(theta_log - 2.0 * j * LN2)
                lb = self.profile.log_factor(min(2.0, max(0.5, theta)))
        return lx + n * LN2 + lb, ly - n * LN2 - lb

    def backward_log_image(self, lx: float, ly: float, n: int) -> tuple:
        """(lx, ly) of the n-th backward image, n >= 0; builtins only.

        The backward orbit meets the sector at most once as well: the
        pulled-back point lands in the sector at exactly one step index.
        """
        if not self.fast:
            raise ConfigError("no closed-form path for %r" % self.kind)
        n = int(n)
        if n < 0:
            raise ConfigError("backward_log_image needs n >= 0")
        if n == 0:
            return lx, ly
        lb = 0.0
        if self.kind == "counterexample":
            theta_log = ly - lx
            # step m applies the plain inverse first; the result sits in the
            # sector when theta_log + 2(m+1) ln2 lands in [-ln2, ln2)
            m = math.ceil((-theta_log - 3.0 * LN2) / (2.0 * LN2))
            if 0 <= m <= n - 1:
                theta_after = math.exp(theta_log + 2.0 * (m + 1) * LN2)
                theta_before = self.profile.shear_inverse_theta(
                    min(2.0, max(0.5, theta_after)))
                lb = self.profile.log_factor(theta_before)
        return lx - n * LN2 - lb, ly + n * LN2 + lb


def hyperbolic_model() -> ReebHomeo:
    return ReebHomeo("hyperbolic_g")


def counterexample_model(profile: Optional[BumpProfile] = None) -> ReebHomeo:
    return ReebHomeo("counterexample", profile=profile)


def composite_model(parts: Iterable[ReebHomeo]) -> ReebHomeo:
    return ReebHomeo("composite", parts=parts)


def iterate_closed_form(x0: QuadrantPoint, n: int,
                        profile: BumpProfile) -> QuadrantPoint:
    """Closed form for n forward steps of the distorted map.

    Valid when the orbit meets the sector at most once in those n steps,
    which holds for every forward orbit of this model; the crossing count is
    still tracked and a second crossing raises rather than returning a wrong
    point.  Output: lx + n ln2 + ln beta(theta*), ly - n ln2 - ln beta(theta*)
    with theta* the angle at the crossing (beta = 1 when no crossing).
    """
    n = int(n)
    if n < 0:
        raise ConfigError("closed-form iterate needs n >= 0")
    theta_log = x0.theta_log
    crossings = 0
    lb = 0.0
    for _ in range(n):
        if -LN2 <= theta_log < LN2:
            crossings += 1
            if crossings > 1:
                raise ClosedFormError(
                    "closed form inapplicable: multiple sector crossings")
            lb = profile.log_factor(math.exp(theta_log))
            theta_log -= 2.0 * lb
        theta_log -= 2.0 * LN2
    return QuadrantPoint(x0.lx + n * LN2 + lb, x0.ly - n * LN2 - lb)


def strip_leaf(u: float, t: float) -> tuple:
    """Leaf parameterization of the strip picture, for rendering only.

    Returns (u - 1/cos(pi t / 2), t); as t -> +-1 the curve dives to
    x -> -infinity, producing the classic nested-tongue picture.
    """
    t = float(t)
    if not -1.0 < t < 1.0:
        raise ConfigError("strip leaves live on |t| < 1, got t=%g" % t)
    return (float(u) - 1.0 / math.cos(math.pi * t / 2.0), t)


_DEFAULT_DELTA = math.sqrt(0.7580 / 0.7499)


@dataclass(frozen=True)
class EightPointConfig:
    """Boundary data for the eight-point counterexample computation.

    Two heights b > d on the y-axis ray, two marks a < c on the x-axis ray,
    and a slide factor delta slightly above 1.  The constraints below pin
    the configuration into the regime where exactly one of the eight limit
    computations feels the bump.
    """

    a: float = 1.0
    b: float = 0.7499
    delta: float = _DEFAULT_DELTA
    c: float = 1.2
    d: float = 0.7

    def validate(self) -> None:
        a, b, delta, c, d = self.a, self.b, self.delta, self.c, self.d
        if min(a, b, c, d) <= 0 or delta <= 1.0:
            raise ConfigError("need positive marks and delta > 1")
        problems = []
        if not b / a < 0.75:
            problems.append("b/a < 3/4")
        if not 0.75 < delta ** 2 * b / a:
            problems.append("3/4 < delta^2 b/a")
        if not abs(delta ** 2 * b / a - b / a) < 0.01:
            problems.append("|delta^2 b/a - b/a| < 1/100")
        if not c > a:
            problems.append("c > a")
        if not d < b:
            problems.append("d < b")
        hi = b / a
        for name, val in [("d/c", d / c), ("delta^2 d/c", delta ** 2 * d / c),
                          ("d/a", d / a), ("delta^2 d/a", delta ** 2 * d / a),
                          ("b/c", b / c), ("delta^2 b/c", delta ** 2 * b / c)]:
            if not 0.5 < val < hi:
                problems.append("%s in (1/2, b/a), got %.6g" % (name, val))
        if problems:
            raise ConfigError(
                "eight-point configuration violates: " + "; ".join(problems))

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "delta": self.delta,
                "c": self.c, "d": self.d}


@dataclass(frozen=True)
class Scenario:
    """Model selection plus parameters, as loaded from a scenario file."""

    model: str
    homeo: ReebHomeo
    config: EightPointConfig
    beta_amplitude: float


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    model = data.get("model", "hyperbolic_g")
    if model not in ("hyperbolic_g", "counterexample"):
        raise ConfigError("unknown scenario model %r" % (model,))
    amplitude = float(data.get("beta_amplitude", DEFAULT_BUMP_AMPLITUDE))
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("scenario params must be an object")
    unknown = set(params) - {"a", "b", "delta", "c", "d"}
    if unknown:
        raise ConfigError("unknown scenario params: %s" % sorted(unknown))
    config = EightPointConfig(**{k: float(v) for k, v in params.items()})
    if model == "counterexample":
        config.validate()
        homeo = counterexample_model(BumpProfile(amplitude))
    else:
        homeo = hyperbolic_model()
    return Scenario(model=model, homeo=homeo, config=config,
                    beta_amplitude=amplitude)
