"""Deterministic SVG 1.1 figures: graphs, point sets, framing rectangles,
Cantor stages and direction sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .affine import CantorStage
from .attractor import PointSet
from .cover import WordInterval
from .directions import DirectionSet
from .graph import Interval, Rectangle, SampledGraph


@dataclass(frozen=True)
class Style:
    width: int = 800
    height: int = 500
    margin: int = 40
    stroke: str = "#1f3b73"
    stroke_width: float = 1.0
    point_color: str = "#8a1c1c"
    point_radius: float = 1.0
    frame_color: str = "#c46a00"
    bar_color: str = "#2e7d32"
    gap_color: str = "#b00020"
    title: str = ""


def _num(v: float) -> str:
    # fixed precision keeps the output byte-identical across runs
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Affine map from data coordinates to the SVG canvas (y axis flipped)."""

    def __init__(self, box, style: Style):
        x0, y0, x1, y1 = box
        if x1 <= x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        pad = 0.04 * (y1 - y0)
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0 - pad, y1 + pad
        self.s = style

    def x(self, v):
        w = self.s.width - 2 * self.s.margin
        return self.s.margin + (np.asarray(v, float) - self.x0) / (self.x1 - self.x0) * w

    def y(self, v):
        h = self.s.height - 2 * self.s.margin
        return self.s.height - self.s.margin - (np.asarray(v, float) - self.y0) / (self.y1 - self.y0) * h


def _data_box(objects) -> tuple[float, float, float, float]:
    xs, ys = [0.0, 1.0], []
    for obj in objects:
        if isinstance(obj, SampledGraph):
            ys += [float(obj.ys.min()), float(obj.ys.max())]
        elif isinstance(obj, PointSet):
            x0, y0, x1, y1 = obj.bounding_box()
            xs += [x0, x1]
            ys += [y0, y1]
        elif _is_family(obj, Rectangle):
            for r in obj:
                xs += [r.x_interval.lo, r.x_interval.hi]
                ys += [r.y_interval.lo, r.y_interval.hi]
    if not ys:
        ys = [0.0, 1.0]
    return min(xs), min(ys), max(xs), max(ys)


def _is_family(obj, kind) -> bool:
    return isinstance(obj, (list, tuple)) and len(obj) > 0 and all(isinstance(o, kind) for o in obj)


def _polyline(g: SampledGraph, fr: _Frame, st: Style) -> str:
    px, py = fr.x(g.xs), fr.y(g.ys)
    pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px, py))
    return (f'<polyline class="graph" fill="none" stroke="{st.stroke}" '
            f'stroke-width="{_num(st.stroke_width)}" points="{pts}"/>')


def _points(ps: PointSet, fr: _Frame, st: Style) -> list[str]:
    px, py = fr.x(ps.points[:, 0]), fr.y(ps.points[:, 1])
    return [f'<circle class="point" cx="{_num(a)}" cy="{_num(b)}" r="{_num(st.point_radius)}" '
            f'fill="{st.point_color}"/>' for a, b in zip(px, py)]


def _frames(rects, fr: _Frame, st: Style) -> list[str]:
    out = []
    for r in rects:
        xa, xb = fr.x([r.x_interval.lo, r.x_interval.hi])
        ya, yb = fr.y([r.y_interval.hi, r.y_interval.lo])
        out.append(f'<rect class="frame" x="{_num(xa)}" y="{_num(ya)}" width="{_num(xb - xa)}" '
                   f'height="{_num(yb - ya)}" fill="none" stroke="{st.frame_color}"/>')
    return out


def _bars(intervals, fr: _Frame, st: Style, row: int, cls: str = "interval-bar") -> list[str]:
    base = st.height - st.margin + 8 + 10 * row
    out = []
    for iv in intervals:
        xa, xb = fr.x([iv.lo, iv.hi])
        out.append(f'<rect class="{cls}" x="{_num(xa)}" y="{_num(base)}" '
                   f'width="{_num(max(xb - xa, 0.5))}" height="6" fill="{st.bar_color}"/>')
    return out


def _cantor(stage: CantorStage, fr: _Frame, st: Style, row: int) -> list[str]:
    out = _bars(stage.intervals, fr, st, row, "cantor-bar")
    base = st.height - st.margin + 8 + 10 * row
    ivs = stage.intervals
    for left, right in zip(ivs[:-1], ivs[1:]):
        xa, xb = fr.x([left.hi, right.lo])
        out.append(f'<line class="cantor-gap" x1="{_num(xa)}" y1="{_num(base + 3)}" '
                   f'x2="{_num(xb)}" y2="{_num(base + 3)}" stroke="{st.gap_color}" stroke-width="1"/>')
    return out


def _directions(d: DirectionSet, st: Style, slot: int) -> list[str]:
    radius = 0.12 * min(st.width, st.height)
    cx = st.width - st.margin - radius - slot * (2.2 * radius)
    cy = st.margin + radius
    out = [f'<circle class="direction-circle" cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(radius)}" '
           f'fill="none" stroke="#999999"/>']
    for a in d.distinct():
        x, y = cx + radius * math.cos(a), cy - radius * math.sin(a)
        out.append(f'<line class="direction" x1="{_num(cx)}" y1="{_num(cy)}" x2="{_num(x)}" '
                   f'y2="{_num(y)}" stroke="{st.stroke}" stroke-width="0.5"/>')
    return out


def render_svg(objects=(), style: Style | None = None) -> str:
    """Draw the given objects on one canvas.

    Accepted objects: :class:`SampledGraph` (polyline through all nodes),
    :class:`PointSet` (dots), a list of :class:`Rectangle` (frames), a list
    of :class:`Interval` or :class:`WordInterval` (bars below the axis),
    :class:`CantorStage` (bars plus gap markers) and :class:`DirectionSet`
    (rays in an inset circle).
    """
    st = style or Style()
    objects = list(objects)
    fr = _Frame(_data_box(objects), st)
    body: list[str] = []
    row = 0
    slot = 0
    for obj in objects:
        if isinstance(obj, SampledGraph):
            body.append(_polyline(obj, fr, st))
        elif isinstance(obj, PointSet):
            body += _points(obj, fr, st)
        elif isinstance(obj, CantorStage):
            body += _cantor(obj, fr, st, row)
            row += 1
        elif isinstance(obj, DirectionSet):
            body += _directions(obj, st, slot)
            slot += 1
        elif _is_family(obj, Rectangle):
            body += _frames(obj, fr, st)
        elif _is_family(obj, WordInterval):
            body += _bars([w.interval for w in obj], fr, st, row)
            row += 1
        elif _is_family(obj, Interval):
            body += _bars(obj, fr, st, row)
            row += 1
        elif isinstance(obj, (list, tuple)) and not obj:
            continue
        else:
            raise TypeError(f"cannot draw object of type {type(obj).__name__}")
    height = st.height + 10 * row
    head = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{st.width}" '
        f'height="{height}" viewBox="0 0 {st.width} {height}">',
    ]
    if st.title:
        head.append(f'<title>{escape(st.title)}</title>')
    head.append(f'<rect class="background" x="0" y="0" width="{st.width}" height="{height}" fill="white"/>')
    return "\n".join(head + body + ["</svg>"]) + "\n"
