"""
Square roots and flows of maps on the real line
===============================================

A strictly increasing map f of the line embeds in a flow exactly when the
right equivalence relation on pairs of points comes with it.  The relation
is packaged as a three-argument map phi: phi(x, x', y) completes the pair
(x, x') to the equivalent pair (y, y').  Once (phi, f) is a flowable pair,
f has a square root s (s after s = f), the square root has a square root,
and the tower of halved maps spans a flow through every real time.

Two built-in pairs make this concrete: horizontal translation, where
everything is linear, and the cubic pair, where the flow is the translation
flow conjugated into cube coordinates.
"""

import numpy as np

from reebflow import HalvingSequence, cubic_pair, square_root, translation_pair

# the halved translation moves by exactly half a step
pair = translation_pair()
s = square_root(pair)
print("translation: s(0) = %.12f (want 0.5)" % s.forward(0.0))

# the cubic map is x -> (x^3 + 1)^(1/3); its square root adds 1/2 in cube
# coordinates, so s(0) = (1/2)^(1/3)
pair = cubic_pair()
s = square_root(pair)
print("cubic: s(0) = %.12f (want %.12f)" % (s.forward(0.0), 0.5 ** (1 / 3)))
print("cubic: s(1) = %.12f (want %.12f)" % (s.forward(1.0), 1.5 ** (1 / 3)))

# halving twice more gives the time-1/8 map, and composing binary digits
# of t gives the flow at any dyadic time without any new machinery
seq = HalvingSequence(cubic_pair(), depth=34)
for t in (0.5, 0.75, 0.125):
    got = seq.flow_dyadic(t, 0.0)
    print("flow(%5.3f, 0) = %.12f   closed form %.12f"
          % (t, got, t ** (1 / 3)))

# non-dyadic times are pinched between dyadic brackets until the bracket
# is tighter than the requested tolerance
got = seq.flow(np.pi, 1.0, tol=1e-9, horizon=8.0)
print("flow(pi, 1)  = %.12f   closed form %.12f"
      % (got, (1.0 + np.pi) ** (1 / 3)))

# the halved maps crowd down to the identity; the deviation drops by a
# fixed factor per level, which is the uniform-convergence statement
# behind the flow construction
for k in (0, 4, 8, 12):
    print("max |maps[%2d](x) - x| on [-8, 8] = %.3e"
          % (k, seq.deviation_from_identity(k)))
