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

"""Newton polygons, tropical skeletons and cylindrical ends of f = Σ c_α z^α.

The tropical polynomial of f is ``φ(x) = max_α (log|c_α| + ⟨α, x⟩)``. Its
non-differentiability locus V(f) is computed exactly: every vertex is the
solution of a three-way tie, every edge and ray is dual to an edge of a cell
of the regular subdivision of the Newton polygon. Coordinates are
:class:`~tropwrap.exactnum.Valuation` linear forms in the declared
parameters, so nothing is rounded.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence, Tuple

import sympy
from typing_extensions import TypeAlias

from tropwrap import _lattice as lat
from tropwrap.exactnum import ONE, Valuation, ValuationBasis
from tropwrap.exceptions import ConfigInvalid, DegenerateSupport, NotInterior, NotSmooth
from tropwrap.types import Exponent, Ordering

__all__ = [
    "CoeffData",
    "TropCurveInput",
    "NewtonPolygon",
    "SkeletonVertex",
    "SkeletonEdge",
    "SkeletonRay",
    "TropicalSkeleton",
    "CylindricalEndSpec",
    "ScaledPolygon",
    "newton_polygon",
    "check_smoothness",
    "boundary_defects",
    "tropical_eval",
    "skeleton",
    "cylindrical_ends",
    "genus_and_ends",
    "coefficient_gap",
    "bounded_component_bound",
]

_log = logging.getLogger(__name__)

Point: TypeAlias = Tuple[Valuation, Valuation]
_DualEdge: TypeAlias = Tuple[int, Exponent, int, Tuple[Exponent, Exponent]]


@dataclass(frozen=True)
class CoeffData:
    """``c = e^{log_norm} · e^{iπ·phase}``; both parts are exact linear forms."""

    log_norm: Valuation = Valuation()
    phase: Valuation = Valuation()
    """Argument in units of π; may involve unbound phase symbols."""


@dataclass(frozen=True)
class TropCurveInput:
    """A Laurent polynomial with exact coefficient data.

    ``basis`` holds the real parameters the log-norms refer to;
    ``phase_values`` binds phase symbols to rationals (units of π) when they
    are known. Unbound phase symbols stay symbolic.
    """

    terms: Mapping[Exponent, CoeffData]
    basis: ValuationBasis = field(default_factory=ValuationBasis, compare=False)
    phase_values: Mapping[str, Fraction] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        if not self.terms:
            raise DegenerateSupport("A Laurent polynomial needs a nonempty support")

        unknown = {
            sym for data in self.terms.values() for sym in data.log_norm.symbols
        } - set(self.basis)
        if unknown:
            raise ConfigInvalid(f"Log-norms use undeclared parameters {sorted(unknown)!r}")

    @property
    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def log_norm(self, alpha: Exponent) -> Valuation:
        return self.terms[alpha].log_norm

    def phase(self, alpha: Exponent) -> Valuation:
        return self.terms[alpha].phase

    def phase_symbols(self) -> frozenset[str]:
        return frozenset(
            sym for data in self.terms.values() for sym in data.phase.symbols if sym != ONE
        )

    def bind_phase(self, phase: Valuation) -> Fraction:
        """Rational value of a phase, in units of π.

        Raises:
            ConfigInvalid: When ``phase`` uses an unbound symbol.
        """
        total = Fraction(0)
        for sym, coeff in phase:
            if sym == ONE:
                total += coeff
            elif sym in self.phase_values:
                total += coeff * self.phase_values[sym]
            else:
                raise ConfigInvalid(
                    f"Phase parameter {sym!r} is unbound; bind it with --param {sym}=<rational>"
                )
        return total

    def phase_expr(self, phase: Valuation) -> sympy.Expr:
        """``π·phase`` as a sympy expression; unbound phase symbols stay free."""
        bound = {sym: self.phase_values[sym] for sym in phase.symbols if sym in self.phase_values}
        rename = {sym: sympy.Rational(q.numerator, q.denominator) for sym, q in bound.items()}
        return sympy.expand(sympy.pi * phase.to_sympy(rename))

    def approx(self, v: Valuation) -> float:
        return self.basis.approx(v)


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[Exponent, ...]
    """Extreme points of hull(A), counterclockwise."""

    boundary_lattice_points: int
    interior_lattice_points: int

    @property
    def area(self) -> Fraction:
        return Fraction(lat.twice_area(self.vertices), 2)

    @property
    def edges(self) -> list[tuple[Exponent, Exponent]]:
        return lat.edges(self.vertices)


@dataclass(frozen=True)
class SkeletonVertex:
    point: Point
    cell: tuple[Exponent, ...]
    """Exponents attaining the maximum at :attr:`point`; the dual cell."""


@dataclass(frozen=True)
class SkeletonEdge:
    start: int
    end: int
    direction: Exponent
    """Primitive direction pointing from :attr:`start` towards :attr:`end`."""

    weight: int
    separates: tuple[Exponent, Exponent]


@dataclass(frozen=True)
class SkeletonRay:
    vertex: int
    direction: Exponent
    weight: int
    separates: tuple[Exponent, Exponent]
    """The unbounded components ``(C_{β_j}, C_{β_{j+1}})`` on either side."""


@dataclass(frozen=True)
class TropicalSkeleton:
    vertices: tuple[SkeletonVertex, ...]
    edges: tuple[SkeletonEdge, ...]
    rays: tuple[SkeletonRay, ...]
    """Counterclockwise, following the boundary edges of hull(A)."""

    region_labels: tuple[Exponent, ...]
    """Exponents whose component C_α is nonempty."""

    unbounded_regions: tuple[Exponent, ...]
    """Hull vertices, whose components are unbounded, counterclockwise."""

    def directions_at(self, index: int) -> list[tuple[Exponent, int]]:
        """Outgoing primitive directions and weights at vertex ``index``."""
        out: list[tuple[Exponent, int]] = []
        for edge in self.edges:
            if edge.start == index:
                out.append((edge.direction, edge.weight))
            if edge.end == index:
                out.append(((-edge.direction[0], -edge.direction[1]), edge.weight))
        out.extend((ray.direction, ray.weight) for ray in self.rays if ray.vertex == index)
        return out

    def is_balanced(self) -> bool:
        for index in range(len(self.vertices)):
            dirs = self.directions_at(index)
            if sum(w * d[0] for d, w in dirs) or sum(w * d[1] for d, w in dirs):
                return False
        return True

    def to_json(self, basis: ValuationBasis) -> dict[str, Any]:
        """JSON cell complex; coordinates exact with a float approximation."""

        def point(p: Point) -> dict[str, Any]:
            return {
                "exact": [p[0].to_json(), p[1].to_json()],
                "approx": [round(basis.approx(p[0]), 12), round(basis.approx(p[1]), 12)],
            }

        return {
            "vertices": [
                {"point": point(v.point), "cell": [list(a) for a in v.cell]} for v in self.vertices
            ],
            "edges": [
                {
                    "start": e.start,
                    "end": e.end,
                    "direction": list(e.direction),
                    "weight": e.weight,
                    "separates": [list(a) for a in e.separates],
                }
                for e in self.edges
            ],
            "rays": [
                {
                    "vertex": r.vertex,
                    "direction": list(r.direction),
                    "weight": r.weight,
                    "separates": [list(a) for a in r.separates],
                }
                for r in self.rays
            ],
            "regions": [list(a) for a in self.region_labels],
        }


@dataclass(frozen=True)
class CylindricalEndSpec:
    """End ``(α, r)`` between the unbounded components ``C_{β_j}`` and ``C_{β_{j+1}}``.

    ``α = β_{j+1} − β_j`` and ``r = c_{β_j} / c_{β_{j+1}}``. The curve is
    asymptotic to the cylinder ``z^α = −r`` (see :attr:`cylinder_phase`),
    which is the same cylinder as ``z^{−α} = −r⁻¹`` (see :meth:`asymptotic`).
    """

    alpha: Exponent
    log_r: Valuation
    arg_r: Valuation
    """Argument of r in units of π."""

    adjacent_exponents: tuple[Exponent, Exponent]
    index: int = 0

    def __post_init__(self) -> None:
        if lat.lattice_length(self.alpha) != 1:
            raise NotSmooth(self.adjacent_exponents[0], self.adjacent_exponents[1])

    @property
    def norm_sq(self) -> int:
        return self.alpha[0] ** 2 + self.alpha[1] ** 2

    @property
    def ray_direction(self) -> Exponent:
        """The skeleton ray of this end, α rotated clockwise by a quarter turn."""
        return self.alpha[1], -self.alpha[0]

    @property
    def cylinder_phase(self) -> Valuation:
        """Argument (units of π) of the asymptotic cylinder ``z^α = −r``."""
        return self.arg_r + 1

    def asymptotic(self) -> CylindricalEndSpec:
        """The same end presented with reversed orientation, ``(−α, −r⁻¹)``."""
        return CylindricalEndSpec(
            alpha=(-self.alpha[0], -self.alpha[1]),
            log_r=-self.log_r,
            arg_r=1 - self.arg_r,
            adjacent_exponents=(self.adjacent_exponents[1], self.adjacent_exponents[0]),
            index=self.index,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "alpha": list(self.alpha),
            "log_r": self.log_r.to_json(),
            "arg_r_pi": self.arg_r.to_json(),
            "adjacent": [list(b) for b in self.adjacent_exponents],
        }


@dataclass(frozen=True)
class ScaledPolygon:
    """``scale · (hull(A) − α)``; a region containing a bounded component C_α.

    The polygon contains the disk of radius :attr:`radius` ``= M/d`` about the
    origin, and C_α lies in that disk.
    """

    scale: sympy.Expr
    distance: sympy.Expr
    vertices: tuple[Exponent, ...]
    """Extreme points of ``hull(A) − α``, counterclockwise."""

    @property
    def radius(self) -> sympy.Expr:
        return sympy.simplify(self.scale * self.distance)

    def scaled_vertices(self) -> list[tuple[sympy.Expr, sympy.Expr]]:
        return [(self.scale * x, self.scale * y) for x, y in self.vertices]

    def contains(self, x: Sequence[float], tol: float = 1e-9) -> bool:
        scale = float(self.scale)
        pts = [(scale * a, scale * b) for a, b in self.vertices]
        for (a1, a2), (b1, b2) in zip(pts, pts[1:] + pts[:1]):
            if (b1 - a1) * (x[1] - a2) - (b2 - a2) * (x[0] - a1) < -tol * max(1.0, scale):
                return False
        return True


def newton_polygon(f: TropCurveInput) -> NewtonPolygon:
    """Counterclockwise extreme points of hull(A) with Pick counts.

    Raises:
        DegenerateSupport: If the hull is a point or a segment.
    """
    hull = lat.convex_hull(f.terms)
    if len(hull) < 3:
        raise DegenerateSupport(f"hull(A) of {f.support!r} is a point or a segment")
    return NewtonPolygon(tuple(hull), lat.boundary_points(hull), lat.interior_points(hull))


def boundary_defects(f: TropCurveInput) -> list[Exponent]:
    """Lattice points on the boundary of hull(A) which are not vertices."""
    hull = lat.convex_hull(f.terms)
    if len(hull) == 2:
        return lat.segment_points(*hull)
    return lat.non_vertex_boundary_points(hull) if len(hull) > 2 else []


def check_smoothness(f: TropCurveInput) -> bool:
    """True iff every boundary edge of hull(A) has lattice length 1."""
    return not boundary_defects(f)


def _linear(f: TropCurveInput, alpha: Exponent, x: Point) -> Valuation:
    return f.log_norm(alpha) + x[0] * alpha[0] + x[1] * alpha[1]


def _coerce_point(x: Sequence[Valuation | int | Fraction]) -> Point:
    return Valuation.coerce(x[0]), Valuation.coerce(x[1])


def tropical_eval(
    f: TropCurveInput, x: Sequence[Valuation | int | Fraction]
) -> tuple[Valuation, frozenset[Exponent]]:
    """Value of φ(f) at ``x`` and the exponents attaining it."""
    point = _coerce_point(x)
    best: Valuation | None = None
    argmax: set[Exponent] = set()
    for alpha in f.support:
        value = _linear(f, alpha, point)
        if best is None:
            best, argmax = value, {alpha}
            continue

        order = f.basis.compare(value, best)
        if order == Ordering.GREATER:
            best, argmax = value, {alpha}
        elif order == Ordering.EQUAL:
            argmax.add(alpha)
    assert best is not None
    return best, frozenset(argmax)


def _tie_point(f: TropCurveInput, a: Exponent, b: Exponent, c: Exponent) -> Point | None:
    """Solves ``L_a = L_b = L_c`` by Cramer's rule; None for collinear exponents."""
    u, w = lat.sub(b, a), lat.sub(c, a)
    d = lat.det(u, w)
    if d == 0:
        return None

    rhs1 = f.log_norm(a) - f.log_norm(b)
    rhs2 = f.log_norm(a) - f.log_norm(c)
    x1 = (rhs1 * w[1] - rhs2 * u[1]) / d
    x2 = (rhs2 * u[0] - rhs1 * w[0]) / d
    return x1, x2


def _require_smooth(f: TropCurveInput) -> NewtonPolygon:
    polygon = newton_polygon(f)
    defects = boundary_defects(f)
    if defects:
        raise NotSmooth(*defects)
    return polygon


def skeleton(f: TropCurveInput) -> TropicalSkeleton:
    """The non-differentiability locus of φ(f).

    Raises:
        DegenerateSupport: If hull(A) is a point or a segment.
        NotSmooth: If a boundary edge of hull(A) has lattice length > 1.
    """
    polygon = _require_smooth(f)
    support = f.support

    cells: dict[frozenset[Exponent], Point] = {}
    for a, b, c in itertools.combinations(support, 3):
        key_hint = frozenset((a, b, c))
        if any(key_hint <= cell for cell in cells):
            continue

        point = _tie_point(f, a, b, c)
        if point is None:
            continue

        _, argmax = tropical_eval(f, point)
        if {a, b, c} <= argmax:
            cells.setdefault(argmax, point)
    _log.debug("Found %d cells of the dual subdivision", len(cells))

    vertices: list[SkeletonVertex] = []
    dual_edges: dict[frozenset[Exponent], list[_DualEdge]] = {}
    for cell, point in sorted(cells.items(), key=lambda item: sorted(item[0])):
        hull = lat.convex_hull(cell)
        index = len(vertices)
        vertices.append(SkeletonVertex(point, tuple(hull)))
        for beta, gamma in lat.edges(hull):
            e = lat.sub(gamma, beta)
            direction = lat.primitive((e[1], -e[0]))
            dual_edges.setdefault(frozenset((beta, gamma)), []).append(
                (index, direction, lat.lattice_length(e), (beta, gamma))
            )

    edges: list[SkeletonEdge] = []
    ray_by_edge: dict[frozenset[Exponent], SkeletonRay] = {}
    for key, ends in dual_edges.items():
        if len(ends) == 2:
            (i, d, w, sep), (j, _, _, _) = sorted(ends)
            edges.append(SkeletonEdge(i, j, d, w, sep))
        else:
            (i, d, w, sep), = ends
            ray_by_edge[key] = SkeletonRay(i, d, w, sep)

    rays = [ray_by_edge[frozenset(e)] for e in polygon.edges]
    regions = sorted({alpha for cell in cells for alpha in cell})
    return TropicalSkeleton(
        tuple(vertices),
        tuple(sorted(edges, key=lambda e: (e.start, e.end))),
        tuple(rays),
        tuple(regions),
        polygon.vertices,
    )


def cylindrical_ends(f: TropCurveInput) -> list[CylindricalEndSpec]:
    """One end per boundary edge of hull(A), counterclockwise.

    Raises:
        DegenerateSupport: If hull(A) is a point or a segment.
        NotSmooth: If a boundary edge of hull(A) has lattice length > 1.
    """
    polygon = _require_smooth(f)
    return [
        CylindricalEndSpec(
            alpha=lat.sub(nxt, cur),
            log_r=f.log_norm(cur) - f.log_norm(nxt),
            arg_r=f.phase(cur) - f.phase(nxt),
            adjacent_exponents=(cur, nxt),
            index=index,
        )
        for index, (cur, nxt) in enumerate(polygon.edges)
    ]


def genus_and_ends(f: TropCurveInput) -> tuple[int, int]:
    """``(g, b)``: interior lattice points of hull(A) and the number of ends.

    Raises:
        DegenerateSupport: If hull(A) is a point or a segment.
        NotSmooth: If a boundary edge of hull(A) has lattice length > 1.
    """
    polygon = _require_smooth(f)
    return polygon.interior_lattice_points, len(polygon.vertices)


def coefficient_gap(f: TropCurveInput) -> Valuation:
    """``M = max log|c_β₁ / c_β₂|`` over pairs of exponents."""
    norms: Iterable[Valuation] = [f.log_norm(alpha) for alpha in f.support]
    return f.basis.vmax(norms) - f.basis.vmin(norms)


def bounded_component_bound(
    f: TropCurveInput, alpha: Exponent, rename: Mapping[str, Any] | None = None
) -> ScaledPolygon:
    """``(M/d²)·(hull(A) − α)`` with d the distance from α to the boundary of hull(A).

    For x in C_α and β the point where the ray from α in direction x leaves
    hull(A), ``|β − α|·|x| ≤ M``, so ``|x| ≤ M/d``. ``hull(A) − α`` contains
    the disk of radius d, which makes the returned polygon contain C_α.

    Raises:
        NotInterior: If α is not an interior point of hull(A).
    """
    polygon = newton_polygon(f)
    if not lat.strictly_inside(alpha, polygon.vertices):
        raise NotInterior(alpha)

    dist_sq = min(lat.segment_distance_sq(alpha, a, b) for a, b in polygon.edges)
    distance = sympy.sqrt(sympy.Rational(dist_sq.numerator, dist_sq.denominator))
    gap = coefficient_gap(f).to_sympy(rename)
    centred = tuple(lat.sub(v, alpha) for v in polygon.vertices)
    return ScaledPolygon(sympy.simplify(gap / distance**2), distance, centred)
