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

"""Integer plane geometry shared by the tropical and mirror modules."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from tropwrap.types import Exponent


def cross(o: Exponent, a: Exponent, b: Exponent) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def det(u: Exponent, v: Exponent) -> int:
    return u[0] * v[1] - u[1] * v[0]


def sub(a: Exponent, b: Exponent) -> Exponent:
    return a[0] - b[0], a[1] - b[1]


def lattice_length(u: Exponent) -> int:
    return math.gcd(u[0], u[1])


def primitive(u: Exponent) -> Exponent:
    g = lattice_length(u)
    return u[0] // g, u[1] // g


def convex_hull(points: Iterable[Exponent]) -> list[Exponent]:
    """Extreme points in counterclockwise order, starting at the lowest-leftmost.

    Andrew's monotone chain; collinear boundary points are dropped.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    lower: list[Exponent] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)

    upper: list[Exponent] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    return lower[:-1] + upper[:-1]


def edges(vertices: Sequence[Exponent]) -> list[tuple[Exponent, Exponent]]:
    n = len(vertices)
    return [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]


def twice_area(vertices: Sequence[Exponent]) -> int:
    """Shoelace formula; positive for counterclockwise polygons."""
    return sum(det(a, b) for a, b in edges(vertices))


def boundary_points(vertices: Sequence[Exponent]) -> int:
    return sum(lattice_length(sub(b, a)) for a, b in edges(vertices))


def interior_points(vertices: Sequence[Exponent]) -> int:
    """Pick's theorem: A = I + B/2 − 1."""
    return (twice_area(vertices) - boundary_points(vertices) + 2) // 2


def segment_points(a: Exponent, b: Exponent) -> list[Exponent]:
    """Lattice points strictly between a and b."""
    g = lattice_length(sub(b, a))
    step = ((b[0] - a[0]) // g, (b[1] - a[1]) // g)
    return [(a[0] + i * step[0], a[1] + i * step[1]) for i in range(1, g)]


def non_vertex_boundary_points(vertices: Sequence[Exponent]) -> list[Exponent]:
    return [p for a, b in edges(vertices) for p in segment_points(a, b)]


def strictly_inside(point: Exponent, vertices: Sequence[Exponent]) -> bool:
    """Whether ``point`` lies in the interior of a ccw convex polygon."""
    return len(vertices) >= 3 and all(cross(a, b, point) > 0 for a, b in edges(vertices))


def lattice_points(vertices: Sequence[Exponent]) -> list[Exponent]:
    """Every lattice point of a ccw convex polygon, boundary included."""
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    return [
        (x, y)
        for x in range(min(xs), max(xs) + 1)
        for y in range(min(ys), max(ys) + 1)
        if all(cross(a, b, (x, y)) >= 0 for a, b in edges(vertices))
    ]


def segment_distance_sq(point: Exponent, a: Exponent, b: Exponent) -> Fraction:
    """Exact squared Euclidean distance from ``point`` to the segment ``ab``."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    px, py = point[0] - a[0], point[1] - a[1]
    length_sq = dx * dx + dy * dy
    t = Fraction(px * dx + py * dy, length_sq)
    t = min(max(t, Fraction(0)), Fraction(1))
    ex, ey = px - t * dx, py - t * dy
    return ex * ex + ey * ey
