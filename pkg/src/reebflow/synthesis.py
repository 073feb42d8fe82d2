"""Boundary and interior flow synthesis for quadrant homeomorphisms.

The leaf-family relation measured by the matching module is turned into a
line relation, handed to the flowable-pair machinery to produce canonical
flows on the two boundary rays, and extended to the open quadrant by a
fundamental-domain time chart.  Construction refuses maps that fail the
matching checks unless explicitly overridden, in which case every report
downstream is stamped unsupported.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, TimeBudgetError
from .flowable import EquivClassMap, FlowablePair, HalvingSequence
from .homeo1d import Homeo1D
from .matching import (DEFAULT_K_MAX, DEFAULT_TOL, MatchingReport,
                       check_eight_point, check_four_point, eight_point_case,
                       four_point_triples, threshold_for, transfer_across,
                       transfer_back, transfer_within)
from .reeb import (LN2, X_AXIS, Y_AXIS, BoundaryPoint, EightPointConfig,
                   QuadrantPoint, ReebHomeo)

DEFAULT_DEPTH = 28
DEFAULT_WINDOW_LOG = (-4.0, 4.0)
RELATION_CHECK_TOL = 1e-6
GATE_GRID = 3
DOMAIN_BUDGET = 2000
UNSUPPORTED = "unsupported input"


# ---------------------------------------------------------------------------
# matching gate

@dataclass
class MatchingGate:
    """Outcome of the two matching checks run as a synthesis precondition."""

    four_point: MatchingReport
    eight_point: MatchingReport
    tol: float

    def passed(self) -> bool:
        return self.four_point.passed() and self.eight_point.passed()


def verify_matching(f: ReebHomeo, tol: float = DEFAULT_TOL,
                    grid_points: int = GATE_GRID,
                    config: Optional[EightPointConfig] = None) -> MatchingGate:
    """Run both matching checks on small grids and collect the reports."""
    triples = four_point_triples(grid_points)
    fp = check_four_point(f, triples, tol=tol)
    case = eight_point_case(config if config is not None else EightPointConfig())
    ep = check_eight_point(f, case, tol=tol)
    return MatchingGate(four_point=fp, eight_point=ep, tol=tol)


def _resolve_gate(f: ReebHomeo, gate: Optional[MatchingGate], override: bool,
                  tol: float,
                  config: Optional[EightPointConfig]) -> MatchingGate:
    if gate is None:
        gate = verify_matching(f, tol=tol, config=config)
    if not gate.passed() and not override:
        raise ConfigError(
            "matching checks failed (four_point=%s, eight_point=%s); "
            "flow synthesis needs both, or an explicit override"
            % (gate.four_point.verdict, gate.eight_point.verdict))
    return gate


# ---------------------------------------------------------------------------
# measured relation in line coordinates

def _dual_transfer_within(f: ReebHomeo, xp1: BoundaryPoint, xp2: BoundaryPoint,
                          yp1: BoundaryPoint, anchor: BoundaryPoint,
                          tol: float, k_max: int) -> BoundaryPoint:
    """Move yp1 between x-axis leaf families, pivoting on a y-axis anchor."""
    y = transfer_back(f, anchor, xp1, yp1, tol, k_max)
    return transfer_across(f, anchor, xp2, y, tol, k_max)


def approx_relation_as_phi(f: ReebHomeo, anchor: Optional[BoundaryPoint] = None,
                           tol: float = DEFAULT_TOL, side: str = Y_AXIS,
                           k_max: int = DEFAULT_K_MAX, validate: bool = True,
                           check_tol: float = RELATION_CHECK_TOL) -> EquivClassMap:
    """Class map of the measured leaf-family relation, in log coordinates.

    phi(u1, u2, u3) is the log height paired with u3 when (e^u1, e^u2) and
    (e^u3, result) fall in the same class; each value is one transfer
    through the anchor on the far ray.  The spot checks run at a loose
    tolerance because every sample is a measured limit, and they reject
    maps whose transfers are incoherent between anchors.
    """
    if side == Y_AXIS:
        pivot = anchor if anchor is not None else BoundaryPoint.on_x_axis(1.0)
        if pivot.side != X_AXIS:
            raise ConfigError("y-axis relation needs an x-axis anchor")

        def phi(u1: float, u2: float, u3: float) -> float:
            out = transfer_within(
                f, BoundaryPoint.on_y_axis(math.exp(u1)),
                BoundaryPoint.on_y_axis(math.exp(u3)),
                BoundaryPoint.on_y_axis(math.exp(u2)), pivot,
                tol=tol, k_max=k_max)
            return math.log(out.coord)
    elif side == X_AXIS:
        pivot = anchor if anchor is not None else BoundaryPoint.on_y_axis(1.0)
        if pivot.side != Y_AXIS:
            raise ConfigError("x-axis relation needs a y-axis anchor")

        def phi(u1: float, u2: float, u3: float) -> float:
            out = _dual_transfer_within(
                f, BoundaryPoint.on_x_axis(math.exp(u1)),
                BoundaryPoint.on_x_axis(math.exp(u3)),
                BoundaryPoint.on_x_axis(math.exp(u2)), pivot,
                tol=tol, k_max=k_max)
            return math.log(out.coord)
    else:
        raise ConfigError("unknown boundary side: %r" % (side,))

    return EquivClassMap(phi, label="measured classes on %s" % side,
                         validate=validate, check_tol=check_tol, samples=8)


def _boundary_line_map(f: ReebHomeo, side: str) -> Homeo1D:
    """The boundary action of f as a line map in log coordinates."""
    def forward(u: float) -> float:
        p = BoundaryPoint(side, math.exp(u))
        return math.log(f.apply_boundary(p).coord)

    def backward(u: float) -> float:
        p = BoundaryPoint(side, math.exp(u))
        return math.log(f.apply_boundary_inverse(p).coord)

    return Homeo1D(forward=forward, inverse_hint=backward,
                   label="boundary action on %s" % side)


# ---------------------------------------------------------------------------
# boundary flows

class BoundaryFlow:
    """Canonical flow on one boundary ray, built by repeated halving.

    The evaluator works in log coordinates through a halving sequence over
    the measured relation; time one reproduces the boundary action of f by
    construction, checked on a window sample at build time.
    """

    def __init__(self, f: ReebHomeo, side: str, halving: HalvingSequence,
                 tol: float, supported: bool = True):
        self.f = f
        self.side = side
        self.halving = halving
        self.tol = tol
        self.supported = supported
        self.time_one_residual = self._time_one_residual()
        if self.time_one_residual > 10.0 * tol:
            raise ConfigError(
                "constructed flow misses the boundary action at t=1 "
                "(residual %.3e)" % self.time_one_residual)

    def _time_one_residual(self, samples: int = 5) -> float:
        worst = 0.0
        lo, hi = self.halving.window
        for u in np.linspace(lo + 0.5, hi - 0.5, samples):
            direct = math.log(self.f.apply_boundary(
                BoundaryPoint(self.side, math.exp(float(u)))).coord)
            flowed = self.halving.flow(1.0, float(u))
            worst = max(worst, abs(flowed - direct))
        return worst

    def at(self, t: float, p: Union[BoundaryPoint, float],
           tol: Optional[float] = None) -> BoundaryPoint:
        """Flow a point of this ray for time t."""
        if isinstance(p, BoundaryPoint):
            if p.side != self.side:
                raise ConfigError(
                    "point is on %s but this flow acts on %s"
                    % (p.side, self.side))
            coord = p.coord
        else:
            coord = float(p)
            if not (coord > 0.0) or not math.isfinite(coord):
                raise ConfigError("boundary coordinate must be positive "
                                  "and finite: %r" % (p,))
        u = self.halving.flow(float(t), math.log(coord), tol=tol)
        return BoundaryPoint(self.side, math.exp(u))


def boundary_flow(f: ReebHomeo, side: str = Y_AXIS, depth: int = DEFAULT_DEPTH,
                  tol: float = DEFAULT_TOL,
                  anchor: Optional[BoundaryPoint] = None,
                  window: tuple = DEFAULT_WINDOW_LOG,
                  gate: Optional[MatchingGate] = None, override: bool = False,
                  config: Optional[EightPointConfig] = None,
                  relation: Optional[EquivClassMap] = None) -> BoundaryFlow:
    """Build the canonical flow on one boundary ray of the quadrant.

    Runs the matching gate (unless a precomputed gate is supplied), measures
    the leaf-family relation through the anchor, and builds the halving
    sequence for the boundary action under that relation.
    """
    gate = _resolve_gate(f, gate, override, tol, config)
    if relation is None:
        relation = approx_relation_as_phi(f, anchor=anchor, tol=tol, side=side)
    pair = FlowablePair(relation, _boundary_line_map(f, side),
                        check_tol=RELATION_CHECK_TOL, samples=6, tol=tol,
                        window=window, label="boundary pair on %s" % side)
    halving = HalvingSequence(pair, depth=depth, tol=tol, window=window,
                              spot_samples=2, spot_levels=2)
    return BoundaryFlow(f, side, halving, tol, supported=gate.passed())


# ---------------------------------------------------------------------------
# synthesis reports

@dataclass
class SynthesisReport:
    """Residual report for a flow-consistency check."""

    kind: str
    verdict: str
    max_residual: Optional[float]
    rows: List[dict]
    threshold: float
    tol: float

    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "verdict": self.verdict,
                "max_residual": self.max_residual, "rows": self.rows,
                "threshold": self.threshold, "tol": self.tol}


def _verdict(max_residual: float, threshold: float, supported: bool) -> str:
    if not supported:
        return UNSUPPORTED
    return "pass" if max_residual < threshold else "fail"


def default_consistency_samples() -> list:
    """(y, x, t) triples mixing dyadic and generic times."""
    out = []
    for y in (0.8, 1.3):
        for x in (0.9, 1.6):
            for t in (-1.0, 0.3, 0.5, 1.0):
                out.append((y, x, t))
    return out


def check_boundary_consistency(f: ReebHomeo, flow_y: BoundaryFlow,
                               flow_x: BoundaryFlow,
                               samples: Optional[Sequence] = None,
                               tol: float = 1e-7) -> SynthesisReport:
    """Verify that flowing both rays preserves the cross-ray relation.

    For each sampled (y, x, t): the partner of the flowed y-axis point,
    transferred along (y, x), must land on the flowed x-axis point.
    Residuals are log distances on the x-axis ray.
    """
    if samples is None:
        samples = default_consistency_samples()
    threshold = 10.0 * tol
    rows = []
    worst = 0.0
    flowed_cache: dict = {}
    for y, x, t in samples:
        key = (y, t)
        if key not in flowed_cache:
            flowed_cache[key] = flow_y.at(t, y, tol=tol)
        moved_y = flowed_cache[key]
        partner = transfer_across(f, BoundaryPoint.on_y_axis(y),
                                  BoundaryPoint.on_x_axis(x), moved_y)
        moved_x = flow_x.at(t, x, tol=tol)
        residual = abs(math.log(partner.coord) - math.log(moved_x.coord))
        worst = max(worst, residual)
        rows.append({"y": y, "x": x, "t": t,
                     "flowed_y": moved_y.coord, "flowed_x": moved_x.coord,
                     "transferred": partner.coord, "residual": residual})
    supported = flow_y.supported and flow_x.supported
    return SynthesisReport(kind="boundary_consistency",
                           verdict=_verdict(worst, threshold, supported),
                           max_residual=worst, rows=rows,
                           threshold=threshold, tol=tol)


# ---------------------------------------------------------------------------
# interior flow

class PlanarFlow:
    """Flow on the open quadrant with time-one map f, plus its two rays.

    Interior evaluation uses a fundamental-domain chart per leaf: the
    diagonal point is time zero, one application of f is one time unit,
    and the fraction is linear in the log x-coordinate after pulling back
    into the base domain.  Boundary points delegate to the ray flows.
    """

    def __init__(self, f: ReebHomeo, flow_y: BoundaryFlow,
                 flow_x: BoundaryFlow, budget: int = DOMAIN_BUDGET,
                 gate: Optional[MatchingGate] = None):
        if flow_y.side != Y_AXIS or flow_x.side != X_AXIS:
            raise ConfigError("planar flow needs one flow per ray, in order")
        self.f = f
        self.flow_y = flow_y
        self.flow_x = flow_x
        self.budget = int(budget)
        self.gate = gate
        self.supported = flow_y.supported and flow_x.supported

    def _section(self, leaf_log: float) -> QuadrantPoint:
        half = 0.5 * leaf_log
        return QuadrantPoint(half, leaf_log - half)

    def _span(self, section: QuadrantPoint) -> float:
        ahead = self.f.apply(section)
        span = ahead.lx - section.lx
        if span <= 0.0:
            raise ConfigError("boundary action does not advance the leaf")
        return span

    def time_coordinate(self, p: QuadrantPoint) -> float:
        """Chart time of an interior point on its leaf."""
        n, frac, _, _ = self._locate(p)
        return n + frac

    def _locate(self, p: QuadrantPoint):
        section = self._section(p.leaf_log)
        span = self._span(section)
        base_lo = section.lx
        n = 0
        q = p
        steps = 0
        while q.lx - base_lo >= span:
            q = self.f.apply_inverse(q)
            n += 1
            steps += 1
            if steps > self.budget:
                raise TimeBudgetError(
                    "time coordinate overflow: more than %d steps locating "
                    "the fundamental domain" % self.budget)
        while q.lx - base_lo < 0.0:
            q = self.f.apply(q)
            n -= 1
            steps += 1
            if steps > self.budget:
                raise TimeBudgetError(
                    "time coordinate overflow: more than %d steps locating "
                    "the fundamental domain" % self.budget)
        frac = (q.lx - base_lo) / span
        return n, frac, section, span

    def at(self, t: float, p: Union[QuadrantPoint, BoundaryPoint]):
        """Flow a quadrant or boundary point for time t."""
        t = float(t)
        if isinstance(p, BoundaryPoint):
            ray = self.flow_y if p.side == Y_AXIS else self.flow_x
            return ray.at(t, p)
        n, frac, section, span = self._locate(p)
        total = n + frac + t
        n_out = math.floor(total)
        tau = total - n_out
        if abs(n_out) > self.budget:
            raise TimeBudgetError(
                "time coordinate overflow: target time %d fundamental "
                "domains away exceeds the budget %d" % (n_out, self.budget))
        lx = section.lx + tau * span
        q = QuadrantPoint(lx, p.leaf_log - lx)
        return self.f.iterate(q, int(n_out))


def planar_flow(f: ReebHomeo, flow_y: BoundaryFlow, flow_x: BoundaryFlow,
                t: float, p: Union[QuadrantPoint, BoundaryPoint]):
    """One planar flow evaluation from prebuilt boundary flows."""
    return PlanarFlow(f, flow_y, flow_x).at(t, p)


def synthesize(f: ReebHomeo, depth: int = DEFAULT_DEPTH,
               tol: float = DEFAULT_TOL,
               anchor: Optional[BoundaryPoint] = None,
               dual_anchor: Optional[BoundaryPoint] = None,
               window: tuple = DEFAULT_WINDOW_LOG, override: bool = False,
               gate: Optional[MatchingGate] = None,
               config: Optional[EightPointConfig] = None,
               budget: int = DOMAIN_BUDGET) -> PlanarFlow:
    """Gate once, build both boundary flows, and assemble the planar flow."""
    gate = _resolve_gate(f, gate, override, tol, config)
    flow_y = boundary_flow(f, Y_AXIS, depth=depth, tol=tol, anchor=anchor,
                           window=window, gate=gate, override=override)
    flow_x = boundary_flow(f, X_AXIS, depth=depth, tol=tol, anchor=dual_anchor,
                           window=window, gate=gate, override=override)
    return PlanarFlow(f, flow_y, flow_x, budget=budget, gate=gate)


# ---------------------------------------------------------------------------
# interior checks

def leaf_approach_sequence(x: float, j_values: Sequence[int]) -> list:
    """Interior points above a fixed x-coordinate on shrinking leaves."""
    out = []
    for j in j_values:
        leaf = 2.0 ** (-int(j))
        out.append(QuadrantPoint.from_xy(x, leaf / x))
    return out


def check_planar_continuity(f: ReebHomeo, flow: PlanarFlow,
                            boundary_points: Optional[Sequence[float]] = None,
                            times: Optional[Sequence[float]] = None,
                            j_max: int = 32, tail: int = 3,
                            tol: float = 1e-8) -> SynthesisReport:
    """Compare the interior flow against the ray flow along approaches.

    For each sampled x-axis point and time, interior points sliding down
    toward the ray are flowed and their planar distance to the flowed ray
    point is measured over the deepest approach indices.
    """
    if boundary_points is None:
        boundary_points = (0.8, 1.3)
    if times is None:
        times = (-2.0, -0.7, 0.5, 2.0)
    rows = []
    worst = 0.0
    tail_js = list(range(j_max - tail + 1, j_max + 1))
    for x in boundary_points:
        for t in times:
            limit = flow.flow_x.at(t, x)
            tail_worst = 0.0
            for p in leaf_approach_sequence(x, tail_js):
                moved = flow.at(t, p)
                dx = moved.x() - limit.coord
                dy = moved.y()
                tail_worst = max(tail_worst, math.hypot(dx, dy))
            worst = max(worst, tail_worst)
            rows.append({"x": x, "t": t, "limit": limit.coord,
                         "tail_residual": tail_worst})
    return SynthesisReport(kind="planar_continuity",
                           verdict=_verdict(worst, tol, flow.supported),
                           max_residual=worst, rows=rows,
                           threshold=tol, tol=tol)


def check_additivity(flow: PlanarFlow,
                     samples: Optional[Sequence] = None,
                     tol: float = 1e-7) -> SynthesisReport:
    """Group-law residuals |flow(s+t, p) vs flow(s, flow(t, p))| on samples."""
    if samples is None:
        samples = [(0.5, 0.75, QuadrantPoint.from_xy(1.1, 0.9)),
                   (-1.0, 0.3, QuadrantPoint.from_xy(0.7, 1.2)),
                   (1.25, -2.0, QuadrantPoint.from_xy(1.6, 0.4))]
    threshold = 10.0 * tol
    rows = []
    worst = 0.0
    for s, t, p in samples:
        joint = flow.at(s + t, p)
        staged = flow.at(s, flow.at(t, p))
        residual = math.hypot(joint.x() - staged.x(), joint.y() - staged.y())
        worst = max(worst, residual)
        rows.append({"s": s, "t": t, "x": p.x(), "y": p.y(),
                     "residual": residual})
    return SynthesisReport(kind="additivity",
                           verdict=_verdict(worst, threshold, flow.supported),
                           max_residual=worst, rows=rows,
                           threshold=threshold, tol=tol)
