"""Static SVG renderings: leaf portraits, orbits, the strip foliation.

Pure text generation with all coordinates formatted to four decimals, so a
rerun produces byte-identical files.  Nothing here is interactive; the
drawings are documentation figures.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .reeb import QuadrantPoint, ReebHomeo, strip_leaf

LEAF_COLOR = "#4878a8"
AXIS_COLOR = "#222222"
SECTOR_COLOR = "#b06030"
ORBIT_COLOR = "#c03030"
TEXT_STYLE = 'font-family="sans-serif" font-size="12" fill="#222222"'


def _fmt(x: float) -> str:
    return "%.4f" % x


def _document(width: int, height: int, body: Sequence[str]) -> str:
    head = ('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
            'viewBox="0 0 %d %d">' % (width, height, width, height))
    defs = ('<defs><marker id="arrow" viewBox="0 0 10 10" refX="8" refY="5" '
            'markerWidth="7" markerHeight="7" orient="auto">'
            '<path d="M 0 0 L 10 5 L 0 10 z" fill="#222222"/></marker></defs>')
    return "\n".join([head, defs] + list(body) + ["</svg>", ""])


def _polyline(points: Sequence[Tuple[float, float]], color: str,
              width: float = 1.5, dashed: bool = False,
              marker_end: bool = False) -> str:
    coords = " ".join("%s,%s" % (_fmt(px), _fmt(py)) for px, py in points)
    extra = ' stroke-dasharray="6 4"' if dashed else ""
    if marker_end:
        extra += ' marker-end="url(#arrow)"'
    return ('<polyline points="%s" fill="none" stroke="%s" '
            'stroke-width="%s"%s/>' % (coords, color, _fmt(width), extra))


def _line(a: Tuple[float, float], b: Tuple[float, float], color: str,
          width: float = 2.0, marker_end: bool = False,
          dashed: bool = False) -> str:
    extra = ' marker-end="url(#arrow)"' if marker_end else ""
    if dashed:
        extra += ' stroke-dasharray="6 4"'
    return ('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s" '
            'stroke-width="%s"%s/>'
            % (_fmt(a[0]), _fmt(a[1]), _fmt(b[0]), _fmt(b[1]), color,
               _fmt(width), extra))


def _text(x: float, y: float, label: str) -> str:
    return '<text x="%s" y="%s" %s>%s</text>' % (_fmt(x), _fmt(y),
                                                 TEXT_STYLE, label)


def _circle(x: float, y: float, r: float, color: str,
            fill: bool = True) -> str:
    paint = ('fill="%s"' % color) if fill else (
        'fill="none" stroke="%s" stroke-width="1.5"' % color)
    return '<circle cx="%s" cy="%s" r="%s" %s/>' % (_fmt(x), _fmt(y),
                                                    _fmt(r), paint)


class _QuadrantCanvas:
    """Screen mapping for the open quadrant window [0, span] x [0, span]."""

    def __init__(self, size: int = 480, margin: int = 48, span: float = 4.0):
        self.size = size
        self.margin = margin
        self.span = span
        self.scale = (size - 2 * margin) / span

    def to_screen(self, x: float, y: float) -> Tuple[float, float]:
        sx = self.margin + x * self.scale
        sy = self.size - self.margin - y * self.scale
        return sx, sy

    def frame(self) -> list:
        origin = self.to_screen(0.0, 0.0)
        x_tip = self.to_screen(self.span * 0.98, 0.0)
        y_tip = self.to_screen(0.0, self.span * 0.98)
        y_mid_hi = self.to_screen(0.0, self.span * 0.62)
        y_mid_lo = self.to_screen(0.0, self.span * 0.38)
        parts = [
            _line(origin, x_tip, AXIS_COLOR, marker_end=True),
            _line(y_tip, origin, AXIS_COLOR, width=2.0),
            # contraction arrow drawn midway down the vertical ray
            _line(y_mid_hi, y_mid_lo, AXIS_COLOR, marker_end=True),
            _text(x_tip[0] - 96.0, x_tip[1] - 8.0, "expanding ray"),
            _text(y_tip[0] + 8.0, y_tip[1] + 12.0, "contracting ray"),
        ]
        return parts


def _leaf_points(canvas: _QuadrantCanvas, c: float, samples: int = 97) -> list:
    x_lo = c / canvas.span
    x_hi = canvas.span
    xs = np.geomspace(max(x_lo, 1e-6), x_hi, samples)
    return [canvas.to_screen(float(x), float(c / x)) for x in xs]


def _leaf_arrow(canvas: _QuadrantCanvas, c: float) -> str:
    root = math.sqrt(c)
    a = canvas.to_screen(root * 0.97, c / (root * 0.97))
    b = canvas.to_screen(root * 1.03, c / (root * 1.03))
    return _line(a, b, LEAF_COLOR, width=1.5, marker_end=True)


def render_leaves(model: str = "hyperbolic_g",
                  leaf_values: Optional[Sequence[float]] = None,
                  size: int = 480) -> str:
    """Quadrant leaf portrait with oriented boundary rays."""
    if model not in ("hyperbolic_g", "counterexample"):
        raise ConfigError("unknown model for leaf portrait: %r" % (model,))
    if leaf_values is None:
        leaf_values = (0.25, 0.5, 1.0, 2.0, 4.0)
    canvas = _QuadrantCanvas(size=size)
    body = canvas.frame()
    for c in leaf_values:
        if not (c > 0.0):
            raise ConfigError("leaf constants must be positive: %r" % (c,))
        body.append(_polyline(_leaf_points(canvas, c), LEAF_COLOR))
        body.append(_leaf_arrow(canvas, c))
    if model == "counterexample":
        for slope in (0.5, 2.0):
            top = min(canvas.span, canvas.span / slope)
            body.append(_line(canvas.to_screen(0.0, 0.0),
                              canvas.to_screen(top, slope * top),
                              SECTOR_COLOR, width=1.2, dashed=True))
        body.append(_text(canvas.margin + 10.0, canvas.margin + 16.0,
                          "dashed: distortion sector"))
    return _document(size, size, body)


def render_orbit(f: ReebHomeo, start: QuadrantPoint, forward: int = 6,
                 backward: int = 4, size: int = 480) -> str:
    """Leaf portrait with one orbit of the map marked on its leaf."""
    if forward < 0 or backward < 0:
        raise ConfigError("orbit step counts must be nonnegative")
    canvas = _QuadrantCanvas(size=size)
    leaf = math.exp(start.leaf_log)
    leaves = sorted({0.5, 1.0, 2.0, leaf})
    body = canvas.frame()
    for c in leaves:
        body.append(_polyline(_leaf_points(canvas, c), LEAF_COLOR,
                              width=2.0 if c == leaf else 1.0))
    points = []
    for n in range(-backward, forward + 1):
        q = f.iterate(start, n)
        points.append((n, q.x(), q.y()))
    for n, x, y in points:
        if x <= canvas.span and y <= canvas.span:
            sx, sy = canvas.to_screen(x, y)
            body.append(_circle(sx, sy, 5.0 if n == 0 else 3.0,
                                ORBIT_COLOR, fill=(n != 0)))
    body.append(_text(canvas.size - 180.0, canvas.margin + 16.0,
                      "orbit of the marked point"))
    return _document(size, size, body)


def render_figure1(width: int = 640, height: int = 360) -> str:
    """The strip foliation: two nonseparated boundary leaves and tongues."""
    margin = 40
    x_lo, x_hi = -6.0, 2.5
    t_lo, t_hi = -1.25, 1.25
    sx = (width - 2 * margin) / (x_hi - x_lo)
    sy = (height - 2 * margin) / (t_hi - t_lo)

    def to_screen(x: float, t: float) -> Tuple[float, float]:
        return margin + (x - x_lo) * sx, height - margin - (t - t_lo) * sy

    body = []
    for level, label_dy in ((1.0, -8.0), (-1.0, 16.0)):
        a = to_screen(x_lo, level)
        b = to_screen(x_hi - 0.15, level)
        body.append(_line(a, b, AXIS_COLOR, width=2.5, marker_end=True))
        body.append(_text(a[0] + 4.0, a[1] + label_dy,
                          "nonseparated boundary leaf"))
    ts = np.linspace(-0.98, 0.98, 197)
    for u in (-2.0, -0.5, 1.0, 2.5, 4.0, 5.5):
        pts = []
        for t in ts:
            x, tt = strip_leaf(u, float(t))
            if x >= x_lo - 0.5:
                pts.append(to_screen(x, tt))
        if len(pts) >= 2:
            body.append(_polyline(pts, LEAF_COLOR))
            tip_x, tip_t = strip_leaf(u, 0.0)
            if x_lo < tip_x < x_hi:
                before = strip_leaf(u, 0.12)
                body.append(_line(to_screen(before[0], before[1]),
                                  to_screen(tip_x, tip_t), LEAF_COLOR,
                                  width=1.5, marker_end=True))
    body.append(_text(margin + 4.0, height - 12.0,
                      "leaves of the strip foliation; arrows show the "
                      "translation direction"))
    return _document(width, height, body)


def save_svg(text: str, path: str) -> None:
    """Write SVG text, surfacing the path on failure."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise ConfigError("cannot write svg to %s: %s" % (path, exc))
