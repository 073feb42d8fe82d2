"""
Rendering the geometry
======================

Three static pictures cover the story: the strip-model foliation with its
two nonseparated boundary leaves, the quadrant leaf portrait, and an orbit
of the hyperbolic map marked on its leaf.  All three render to plain SVG
with no plotting dependencies, and the same renders back the command line
subcommand `reebflow plot`.
"""

from reebflow import (QuadrantPoint, hyperbolic_model, render_figure1,
                      render_leaves, render_orbit, save_svg)

save_svg(render_figure1(), "figure1.svg")
print("figure1.svg: strip foliation, nested tongues, two boundary leaves")

save_svg(render_leaves(model="counterexample"), "leaves.svg")
print("leaves.svg: quadrant hyperbolas with the distortion sector dashed")

start = QuadrantPoint.from_xy(1.4, 1.0)
save_svg(render_orbit(hyperbolic_model(), start, forward=6, backward=4),
         "orbit.svg")
print("orbit.svg: the orbit of (1.4, 1.0) on the leaf xy = 1.4")
