"""
From a map that passes the checks to the flow it generates
==========================================================

Once a quadrant map passes the four- and eight-point checks, the flow it
embeds in is built in three moves: measure the boundary equivalence
relation through orbit limits, run the square-root tower on each boundary
ray, and extend inward leaf by leaf using a section of the foliation as
the time-zero chart.

For the hyperbolic map every stage has a closed form to compare against:
the boundary flow must be y -> 2^(-t) y, and the planar flow must be
(x, y) -> (2^t x, 2^(-t) y).  The demo synthesizes both, measures the
agreement, and shows the gate refusing the distorted map up front.
"""

from reebflow import (ConfigError, QuadrantPoint, counterexample_model,
                      check_additivity, check_boundary_consistency,
                      hyperbolic_model, synthesize, verify_matching)

g = hyperbolic_model()

gate = verify_matching(g)
print("gate: four-point %s, eight-point %s"
      % (gate.four_point.verdict, gate.eight_point.verdict))

flow = synthesize(g)

# the contracting ray: halving the boundary action must reproduce 2^(-t)
for t in (0.5, -1.0, 1.75):
    got = flow.flow_y.at(t, 1.3).coord
    print("boundary t=%+5.2f: %.10f   exact %.10f" % (t, got, 2.0 ** -t * 1.3))

# the planar extension: exact hyperbolic scaling, time-one equal to the map
p = QuadrantPoint.from_xy(1.1, 0.9)
for t in (0.25, 1.0, -2.0):
    q = flow.at(t, p)
    print("planar  t=%+5.2f: (%.10f, %.10f)   exact (%.10f, %.10f)"
          % (t, q.x(), q.y(), 2.0 ** t * 1.1, 2.0 ** -t * 0.9))

# each interior point carries a time coordinate in the chart spanned by
# the section and its image; the map itself sits at time one
print("time coordinate of p:      %.10f" % flow.time_coordinate(p))
print("time coordinate of f(p):   %.10f" % flow.time_coordinate(g.apply(p)))

# the two structural reports behind the construction
print("additivity:           %s (max residual %.3e)"
      % ((r := check_additivity(flow)).verdict, r.max_residual))
print("boundary consistency: %s (max residual %.3e)"
      % ((r := check_boundary_consistency(g, flow.flow_y,
                                          flow.flow_x)).verdict,
         r.max_residual))

# the distorted map never gets this far: the gate fails it, and forcing
# the construction anyway trips the built-in invariant checks at the
# first halving level
try:
    synthesize(counterexample_model())
except ConfigError as exc:
    print("distorted map refused: %s" % exc)
