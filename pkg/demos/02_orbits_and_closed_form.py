"""
The quadrant model and its two built-in maps
============================================

The open positive quadrant, foliated by the hyperbolas xy = c together with
the two positive half-axes, is the standard concrete model of a planar
foliation with a pair of nonseparated leaves.  Points are stored in log
coordinates so that orbits sweeping thousands of octaves keep exact leaf
invariants.

Two leaf-preserving maps live here as builtins: the hyperbolic map
(x, y) -> (2x, y/2), and a distorted variant that additionally shears
inside the sector 1/2 <= y/x < 2.  The shear is invisible on the boundary
rays and acts exactly once along every forward orbit, which is what makes
the distorted map such a delicate object: away from the sector it is
indistinguishable from a map with an obvious flow.
"""

import numpy as np

from reebflow import (QuadrantPoint, counterexample_model, hyperbolic_model,
                      iterate_closed_form)

g = hyperbolic_model()
f = counterexample_model()

# leaf preservation: x*y is untouched by either map
p = QuadrantPoint.from_xy(1.4, 1.0)
for name, m in (("hyperbolic", g), ("distorted", f)):
    q = m.apply(p)
    print("%-10s (1.4, 1.0) -> (%.6f, %.6f), leaf %.12f"
          % (name, q.x(), q.y(), q.x() * q.y()))

# the distorted map only differs where the orbit angle y/x crosses the
# sector with the shear active; this start crosses at angle 1.8, and the
# x-coordinates split right after
p = QuadrantPoint.from_xy(0.05, 23.04)
for n in range(10):
    gp, fp = g.iterate(p, n), f.iterate(p, n)
    mark = "  <- sector" if fp.in_sector() else ""
    print("n=%d   angle %9.4f   x-gap %.3e%s"
          % (n, fp.y() / fp.x(), abs(gp.x() - fp.x()), mark))

# a closed form tracks the whole distorted orbit: n hyperbolic steps plus
# one angle-dependent correction picked up at the single sector crossing
rng = np.random.default_rng(5)
worst = 0.0
for _ in range(200):
    p = QuadrantPoint(rng.uniform(-2, 2), rng.uniform(-2, 2))
    n = int(rng.integers(0, 61))
    direct = f.iterate(p, n)
    closed = iterate_closed_form(p, n, f.profile)
    worst = max(worst, abs(direct.lx - closed.lx), abs(direct.ly - closed.ly))
print("closed form vs 200 direct orbits, n <= 60: max log gap %.3e" % worst)

# sixty steps scale coordinates by 2^60 ~ 10^18; log storage keeps the
# leaf constant to the last bit anyway
p = QuadrantPoint.from_xy(1.0, 1.0)
far = f.iterate(p, 60)
print("after 60 steps: x ~ %.3e, leaf drift %.3e"
      % (far.x(), abs(far.lx + far.ly)))
