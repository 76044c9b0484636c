# tropwrap - Tropical skeletons, wrapped Floer generators and mirror quotient rings
# Copyright (C) 2024 demberto
#
# This program is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option)
# any later version. This program is distributed in the hope that it will be
# useful, but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General
# Public License for more details. You should have received a copy of the
# GNU General Public License along with this program. If not, see
# <https://www.gnu.org/licenses/>.

"""Deterministic SVG figures of a skeleton and its generator ladders.

Numbers are written with a fixed number of decimals and elements in a fixed
order, so equal inputs give byte-identical documents.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Sequence

from tropwrap.hamiltonian import FloerGenerator
from tropwrap.tropical import TropCurveInput, TropicalSkeleton, cylindrical_ends, skeleton
from tropwrap.types import GenKind, GenType

__all__ = ["RenderOptions", "render_svg"]

SVG_NS = "http://www.w3.org/2000/svg"
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RenderOptions:
    margin: float = 2.0
    """Rays are clipped to the vertex bounding box grown by this much."""

    scale: float = 60.0
    """Pixels per unit of the tropical plane."""

    ladder_width: float = 160.0
    ladder_height: float = 120.0
    decimals: int = 3


def _fmt(x: float, decimals: int) -> str:
    text = f"{x:.{decimals}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


class _Canvas:
    def __init__(self, lo: tuple[float, float], hi: tuple[float, float], opts: RenderOptions):
        self.lo, self.hi, self.opts = lo, hi, opts

    def xy(self, x: float, y: float) -> tuple[str, str]:
        s, d = self.opts.scale, self.opts.decimals
        return _fmt((x - self.lo[0]) * s, d), _fmt((self.hi[1] - y) * s, d)

    @property
    def size(self) -> tuple[float, float]:
        s = self.opts.scale
        return (self.hi[0] - self.lo[0]) * s, (self.hi[1] - self.lo[1]) * s


def _clip(origin: tuple[float, float], d: tuple[int, int], lo, hi) -> tuple[float, float]:
    """Where the ray from ``origin`` along ``d`` leaves the box."""
    t = math.inf
    for axis in (0, 1):
        if d[axis] > 0:
            t = min(t, (hi[axis] - origin[axis]) / d[axis])
        elif d[axis] < 0:
            t = min(t, (lo[axis] - origin[axis]) / d[axis])
    return origin[0] + t * d[0], origin[1] + t * d[1]


def _region_anchor(
    points: Sequence[tuple[float, float]], sk: TropicalSkeleton, beta: tuple[int, int]
) -> tuple[float, float] | None:
    for point, vertex in zip(points, sk.vertices):
        if beta not in vertex.cell:
            continue
        cx = sum(a[0] for a in vertex.cell) / len(vertex.cell)
        cy = sum(a[1] for a in vertex.cell) / len(vertex.cell)
        dx, dy = beta[0] - cx, beta[1] - cy
        norm = math.hypot(dx, dy) or 1.0
        return point[0] + 0.6 * dx / norm, point[1] + 0.6 * dy / norm
    return None


def _ladder(
    parent: ET.Element,
    index: int,
    gens: Sequence[FloerGenerator],
    x0: float,
    y0: float,
    opts: RenderOptions,
) -> None:
    """One panel plotting ``(p_α, θ_α mod 2π)`` of an end's generators."""
    w, h, d = opts.ladder_width, opts.ladder_height, opts.decimals
    group = ET.SubElement(parent, "g", {"class": "ladder", "data-end": str(index)})
    ET.SubElement(
        group,
        "rect",
        {"x": _fmt(x0, d), "y": _fmt(y0, d), "width": _fmt(w, d), "height": _fmt(h, d),
         "fill": "none", "stroke": "#999"},
    )
    label = ET.SubElement(group, "text", {"x": _fmt(x0 + 4, d), "y": _fmt(y0 + 12, d)})
    label.text = f"end {index}"

    ps = [g.coords.p_alpha for g in gens if g.coords is not None]
    p_lo, p_hi = min(ps), max(ps)
    span = (p_hi - p_lo) or 1.0
    for g in gens:
        assert g.coords is not None
        x = x0 + 10 + (w - 20) * (g.coords.p_alpha - p_lo) / span
        y = y0 + h - 10 - (h - 30) * (g.coords.theta_alpha % TWO_PI) / TWO_PI
        attrs = {"data-label": g.label}
        if g.gen_type is GenType.E:
            attrs.update(cx=_fmt(x, d), cy=_fmt(y, d), r="3", fill="#000")
            ET.SubElement(group, "circle", attrs)
        else:
            attrs.update(x=_fmt(x - 3, d), y=_fmt(y - 3, d), width="6", height="6", fill="#c00")
            ET.SubElement(group, "rect", attrs)


def render_svg(
    f: TropCurveInput,
    generators: Sequence[FloerGenerator] = (),
    options: RenderOptions | None = None,
) -> str:
    """SVG of the tropical skeleton of ``f`` with labelled ends and regions.

    Cylindrical generators, when given, are drawn in one ladder panel per end
    below the skeleton; with no generators the ladders are omitted.

    Raises:
        NotSmooth: If ``f`` has no skeleton.
    """
    opts = options or RenderOptions()
    sk = skeleton(f)
    ends = cylindrical_ends(f)
    points = [(f.approx(v.point[0]), f.approx(v.point[1])) for v in sk.vertices]

    xs, ys = [p[0] for p in points], [p[1] for p in points]
    lo = (min(xs) - opts.margin, min(ys) - opts.margin)
    hi = (max(xs) + opts.margin, max(ys) + opts.margin)
    canvas = _Canvas(lo, hi, opts)
    width, height = canvas.size

    by_end: dict[int, list[FloerGenerator]] = {}
    for g in generators:
        if g.kind is GenKind.CYLINDRICAL and g.end is not None and g.coords is not None:
            by_end.setdefault(g.end.index, []).append(g)
    ladder_rows = 1 if by_end else 0
    total_h = height + ladder_rows * (opts.ladder_height + 20)
    total_w = max(width, len(by_end) * (opts.ladder_width + 10))

    d = opts.decimals
    root = ET.Element(
        "svg",
        {"xmlns": SVG_NS, "width": _fmt(total_w, d), "height": _fmt(total_h, d),
         "viewBox": f"0 0 {_fmt(total_w, d)} {_fmt(total_h, d)}"},
    )
    title = ET.SubElement(root, "title")
    title.text = f.name or "tropical skeleton"

    group = ET.SubElement(root, "g", {"class": "skeleton", "stroke": "#000", "fill": "none"})
    for edge in sk.edges:
        (x1, y1), (x2, y2) = canvas.xy(*points[edge.start]), canvas.xy(*points[edge.end])
        ET.SubElement(
            group,
            "line",
            {"x1": x1, "y1": y1, "x2": x2, "y2": y2, "stroke-width": str(edge.weight)},
        )
    for index, ray in enumerate(sk.rays):
        tip = _clip(points[ray.vertex], ray.direction, lo, hi)
        (x1, y1), (x2, y2) = canvas.xy(*points[ray.vertex]), canvas.xy(*tip)
        ET.SubElement(
            group,
            "line",
            {"x1": x1, "y1": y1, "x2": x2, "y2": y2, "stroke-width": str(ray.weight),
             "data-end": str(index)},
        )
        text = ET.SubElement(root, "text", {"x": x2, "y": y2, "class": "end-label"})
        alpha = ends[index].alpha if index < len(ends) else ray.direction
        text.text = f"{index}: α=({alpha[0]},{alpha[1]})"

    for x, y in points:
        cx, cy = canvas.xy(x, y)
        ET.SubElement(root, "circle", {"cx": cx, "cy": cy, "r": "3", "fill": "#000"})

    for beta in sk.region_labels:
        anchor = _region_anchor(points, sk, beta)
        if anchor is None:
            continue
        tx, ty = canvas.xy(*anchor)
        text = ET.SubElement(root, "text", {"x": tx, "y": ty, "class": "region-label"})
        text.text = f"C({beta[0]},{beta[1]})"

    for slot, index in enumerate(sorted(by_end)):
        _ladder(root, index, by_end[index], slot * (opts.ladder_width + 10), height + 20, opts)

    return ET.tostring(root, encoding="unicode")
