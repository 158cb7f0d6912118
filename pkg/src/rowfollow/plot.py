"""Static SVG of one episode: plant discs, ideal centerline, driven trajectory."""
from dataclasses import dataclass

import numpy as np

PLANT_COLOR = "#2e8b57"
CENTERLINE_COLOR = "#1f5fbf"
TRAJECTORY_COLOR = "#daa520"


@dataclass(frozen=True)
class PlotSpec:
    show_plants: bool = True
    show_centerline: bool = True
    show_trajectory: bool = True
    scale: float = 80.0  # pixels per meter
    margin: float = 40.0  # pixels around the drawing area
    legend: bool = True

    def __post_init__(self):
        if not (self.show_plants or self.show_centerline or self.show_trajectory):
            raise ValueError("at least one overlay must be enabled")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")


class _Canvas:
    def __init__(self, xmin, xmax, ymin, ymax, spec):
        self.xmin, self.ymax, self.spec = xmin, ymax, spec
        self.width = (xmax - xmin) * spec.scale + 2 * spec.margin
        self.height = (ymax - ymin) * spec.scale + 2 * spec.margin

    def x(self, x):
        return self.spec.margin + (x - self.xmin) * self.spec.scale

    def y(self, y):
        return self.spec.margin + (self.ymax - y) * self.spec.scale


def _num(v):
    text = f"{float(v):.2f}"
    return "0.00" if text == "-0.00" else text


def _points(canvas, xy):
    return " ".join(f"{_num(canvas.x(x))},{_num(canvas.y(y))}" for x, y in xy)


def bounds(world, xy=None):
    half = world.row_spacing / 2 + (float(world.radius.max()) if len(world) else 0.0)
    xmin, xmax = -0.5, world.row_length + 0.5
    ymin, ymax = -half - 0.25, half + 0.25
    if xy is not None and len(xy):
        xmin = min(xmin, float(xy[:, 0].min()) - 0.25)
        xmax = max(xmax, float(xy[:, 0].max()) + 0.25)
        ymin = min(ymin, float(xy[:, 1].min()) - 0.25)
        ymax = max(ymax, float(xy[:, 1].max()) + 0.25)
    return xmin, xmax, ymin, ymax


def plot_episode(xy, world, spec=None, title=None):
    """Render an SVG document (as text) for trajectory points ``xy`` in ``world``."""
    spec = spec or PlotSpec()
    xy = np.asarray(xy, dtype=np.float64).reshape(-1, 2)
    canvas = _Canvas(*bounds(world, xy), spec)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(canvas.width)}" '
        f'height="{_num(canvas.height)}" viewBox="0 0 {_num(canvas.width)} {_num(canvas.height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_num(spec.margin)}" y="{_num(spec.margin / 2)}" font-family="sans-serif" '
                   f'font-size="14">{title}</text>')
    legend = []

    if spec.show_plants:
        out.append('<g id="plants">')
        for side in (1.0, -1.0):
            sel = np.sign(world.y) == side
            if sel.any():
                xs = world.x[sel]
                y = side * world.row_spacing / 2
                out.append(
                    f'<line class="row" x1="{_num(canvas.x(xs.min()))}" y1="{_num(canvas.y(y))}" '
                    f'x2="{_num(canvas.x(xs.max()))}" y2="{_num(canvas.y(y))}" stroke="{PLANT_COLOR}" '
                    'stroke-width="1.5" stroke-dasharray="6,4"/>'
                )
        for x, y, r in zip(world.x, world.y, world.radius):
            out.append(
                f'<circle cx="{_num(canvas.x(x))}" cy="{_num(canvas.y(y))}" r="{_num(r * spec.scale)}" '
                f'fill="{PLANT_COLOR}" fill-opacity="0.35" stroke="{PLANT_COLOR}"/>'
            )
        out.append("</g>")
        legend.append(("plants", PLANT_COLOR, "6,4"))

    if spec.show_centerline:
        line = [(0.0, 0.0), (world.row_length, 0.0)]
        out.append('<g id="centerline">')
        out.append(f'<polyline points="{_points(canvas, line)}" fill="none" stroke="{CENTERLINE_COLOR}" '
                   'stroke-width="2" stroke-dasharray="10,5"/>')
        out.append("</g>")
        legend.append(("ideal centerline", CENTERLINE_COLOR, "10,5"))

    if spec.show_trajectory:
        out.append('<g id="trajectory">')
        out.append(f'<polyline points="{_points(canvas, xy)}" fill="none" stroke="{TRAJECTORY_COLOR}" '
                   'stroke-width="2.5"/>')
        out.append("</g>")
        legend.append(("robot trajectory", TRAJECTORY_COLOR, None))

    if spec.legend and len(legend) > 1:
        out.append('<g id="legend" font-family="sans-serif" font-size="12">')
        x0 = spec.margin
        y0 = canvas.height - spec.margin / 2
        for i, (label, color, dash) in enumerate(legend):
            x = x0 + i * 160
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<line x1="{_num(x)}" y1="{_num(y0)}" x2="{_num(x + 30)}" y2="{_num(y0)}" '
                       f'stroke="{color}" stroke-width="2.5"{dash_attr}/>')
            out.append(f'<text x="{_num(x + 36)}" y="{_num(y0 + 4)}">{label}</text>')
        out.append("</g>")

    out.append("</svg>")
    return "\n".join(out) + "\n"
