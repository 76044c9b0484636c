from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from tropwrap import curves
from tropwrap.exactnum import Valuation
from tropwrap.exceptions import DegenerateSupport, NotInterior, NotSmooth
from tropwrap.tropical import (
    TropCurveInput,
    bounded_component_bound,
    check_smoothness,
    coefficient_gap,
    cylindrical_ends,
    genus_and_ends,
    newton_polygon,
    skeleton,
    tropical_eval,
)
from tropwrap.types import Ordering

ZERO = Valuation()


def _cubic(center: str = "3") -> TropCurveInput:
    return curves.parse_curve(
        {
            "terms": [
                {"exp": [-1, -1]},
                {"exp": [1, 0]},
                {"exp": [0, 1]},
                {"exp": [0, 0], "log_norm": center},
            ]
        },
        name="cubic",
    )


def test_newton_polygon(pants: TropCurveInput, lq: TropCurveInput):
    polygon = newton_polygon(pants)
    assert polygon.vertices == ((0, 0), (1, 0), (0, 1))
    assert polygon.area == Fraction(1, 2)
    assert polygon.interior_lattice_points == 0

    square = newton_polygon(lq)
    assert square.area == 1
    assert square.boundary_lattice_points == 4


def test_degenerate_and_singular():
    segment = curves.parse_curve({"terms": [{"exp": [0, 0]}, {"exp": [1, 0]}]})
    with pytest.raises(DegenerateSupport):
        newton_polygon(segment)

    conic = curves.parse_curve({"terms": [{"exp": [0, 0]}, {"exp": [2, 0]}, {"exp": [0, 1]}]})
    assert not check_smoothness(conic)
    with pytest.raises(NotSmooth, match=r"\(1, 0\)") as info:
        skeleton(conic)
    assert info.value.points == ((1, 0),)


def test_genus_and_ends(pants: TropCurveInput, lq: TropCurveInput):
    assert genus_and_ends(pants) == (0, 3)
    assert genus_and_ends(lq) == (0, 4)
    assert genus_and_ends(_cubic()) == (1, 3)


def test_pants_skeleton(pants: TropCurveInput):
    sk = skeleton(pants)
    assert len(sk.vertices) == 1
    assert sk.vertices[0].point == (ZERO, ZERO)
    assert not sk.edges
    assert [ray.direction for ray in sk.rays] == [(0, -1), (1, 1), (-1, 0)]
    assert sk.is_balanced()
    assert sk.region_labels == ((0, 0), (0, 1), (1, 0))


def test_lq_skeleton(lq: TropCurveInput):
    sk = skeleton(lq)
    points = [(lq.approx(v.point[0]), lq.approx(v.point[1])) for v in sk.vertices]
    assert points == [(0.0, 0.0), (1.0, 1.0)]
    assert set(sk.vertices[0].cell) == {(0, 0), (1, 0), (0, 1)}
    assert set(sk.vertices[1].cell) == {(1, 0), (0, 1), (1, 1)}

    (edge,) = sk.edges
    assert (edge.start, edge.end) == (0, 1)
    assert edge.direction == (1, 1)
    assert len(sk.rays) == 4
    assert sk.is_balanced()

    as_json = sk.to_json(lq.basis)
    assert as_json["vertices"][1]["point"]["approx"] == [1.0, 1.0]
    assert as_json["vertices"][1]["point"]["exact"] == [{"log_q": "1"}, {"log_q": "1"}]


def test_cubic_skeleton():
    sk = skeleton(_cubic())
    assert len(sk.vertices) == 3
    assert len(sk.edges) == 3
    assert len(sk.rays) == 3
    assert sk.is_balanced()


def test_tropical_eval(pants: TropCurveInput):
    value, argmax = tropical_eval(pants, (0, 0))
    assert value == ZERO
    assert argmax == {(0, 0), (1, 0), (0, 1)}

    value, argmax = tropical_eval(pants, (2, -1))
    assert value == Valuation.const(2)
    assert argmax == {(1, 0)}


def test_pants_ends(pants: TropCurveInput):
    ends = cylindrical_ends(pants)
    assert [end.alpha for end in ends] == [(1, 0), (-1, 1), (0, -1)]
    assert [end.ray_direction for end in ends] == [(0, -1), (1, 1), (-1, 0)]
    assert [end.index for end in ends] == [0, 1, 2]

    diagonal = ends[1]
    assert diagonal.norm_sq == 2
    asymptotic = diagonal.asymptotic()
    assert asymptotic.alpha == (1, -1)
    assert asymptotic.log_r == ZERO
    assert asymptotic.arg_r == Valuation.const(1)
    assert asymptotic.asymptotic().alpha == diagonal.alpha


def test_lq_ends(lq: TropCurveInput):
    ends = cylindrical_ends(lq)
    assert [end.alpha for end in ends] == [(1, 0), (0, 1), (-1, 0), (0, -1)]
    assert ends[1].log_r == Valuation.symbol("log_q")
    assert ends[1].arg_r == Valuation.of({"1": 1, "theta_q": 1})
    assert ends[1].to_json()["adjacent"] == [[1, 0], [1, 1]]


def test_ends_sum_to_zero():
    rng = random.Random(3)
    for _ in range(500):
        terms = {(0, 0), (1, 0), (0, 1)}
        while len(terms) < 6:
            terms.add((rng.randint(-3, 3), rng.randint(-3, 3)))
        f = curves.parse_curve({"terms": [{"exp": list(t)} for t in sorted(terms)]})
        if len(newton_polygon(f).vertices) < 3 or not check_smoothness(f):
            continue
        ends = cylindrical_ends(f)
        assert sum(e.alpha[0] for e in ends) == 0
        assert sum(e.alpha[1] for e in ends) == 0
        assert all(e.norm_sq >= 1 for e in ends)


def test_coefficient_gap(pants: TropCurveInput, lq: TropCurveInput):
    assert coefficient_gap(pants) == ZERO
    assert coefficient_gap(lq) == Valuation.symbol("log_q")


def test_bounded_component_bound(pants: TropCurveInput):
    bound = bounded_component_bound(_cubic(), (0, 0))
    assert sympy.simplify(bound.distance - 1 / sympy.sqrt(5)) == 0
    assert bound.scale == 15
    assert sympy.simplify(bound.radius - 3 * sympy.sqrt(5)) == 0
    assert set(bound.scaled_vertices()) == {(-15, -15), (15, 0), (0, 15)}
    assert bound.contains((3, -6))
    assert not bound.contains((16, 0))

    with pytest.raises(NotInterior):
        bounded_component_bound(pants, (0, 0))


HEXAGON = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
TRIANGLE = [(0, 0), (1, 0), (0, 1)]
SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
CUBIC = [(-1, -1), (1, 0), (0, 1)]


def _curve(norms: dict[tuple[int, int], Fraction]) -> TropCurveInput:
    return curves.parse_curve(
        {"terms": [{"exp": list(m), "log_norm": str(c)} for m, c in sorted(norms.items())]}
    )


def _twice_area(cell: tuple[tuple[int, int], ...]) -> int:
    (a1, a2), (b1, b2), (c1, c2) = cell
    return abs((b1 - a1) * (c2 - a2) - (b2 - a2) * (c1 - a1))


def test_bounded_component_bound_on_grid():
    rng = random.Random(8)
    grid = [Fraction(n, 2) for n in range(-24, 25)]
    shapes = [(CUBIC, 3)] + [(HEXAGON, rng.randint(3, 6)) for _ in range(4)]
    for corners, center in shapes:
        norms = {m: Fraction(rng.randint(-4, 4), 2) for m in corners}
        norms[0, 0] = Fraction(center)
        f = _curve(norms)
        bound = bounded_component_bound(f, (0, 0))
        inside = [
            (x1, x2) for x1 in grid for x2 in grid if tropical_eval(f, (x1, x2))[1] == {(0, 0)}
        ]
        assert (0, 0) in inside
        assert all(bound.contains((float(x1), float(x2))) for x1, x2 in inside)


def test_tropical_eval_is_convex():
    rng = random.Random(9)
    for _ in range(500):
        terms = set(TRIANGLE)
        while len(terms) < 5:
            terms.add((rng.randint(-3, 3), rng.randint(-3, 3)))
        f = _curve({m: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for m in terms})
        x = (Fraction(rng.randint(-20, 20), 3), Fraction(rng.randint(-20, 20), 3))
        y = (Fraction(rng.randint(-20, 20), 3), Fraction(rng.randint(-20, 20), 3))
        t = Fraction(rng.randint(0, 8), 8)
        mid = tuple(t * a + (1 - t) * b for a, b in zip(x, y))
        chord = tropical_eval(f, x)[0] * t + tropical_eval(f, y)[0] * (1 - t)
        assert f.basis.compare(tropical_eval(f, mid)[0], chord) != Ordering.GREATER


def test_random_skeletons_balance():
    rng = random.Random(6)
    checked = 0
    for _ in range(5000):
        terms, size = set(TRIANGLE), rng.randint(4, 7)
        while len(terms) < size:
            terms.add((rng.randint(-3, 3), rng.randint(-3, 3)))
        f = _curve({m: Fraction(rng.randint(-6, 6)) for m in terms})
        if len(newton_polygon(f).vertices) < 3 or not check_smoothness(f):
            continue
        sk = skeleton(f)
        assert sk.is_balanced()
        ends = cylindrical_ends(f)
        assert len(sk.rays) == len(ends)
        for ray, end in zip(sk.rays, ends):
            assert ray.direction == end.ray_direction
            assert ray.direction[0] * end.alpha[0] + ray.direction[1] * end.alpha[1] == 0
            assert ray.weight == 1
        checked += 1
        if checked == 500:
            break
    assert checked == 500


def test_euler_characteristic(pants: TropCurveInput, lq: TropCurveInput):
    for f in (pants, lq, _cubic()):
        sk = skeleton(f)
        g, b = genus_and_ends(f)
        assert len(sk.edges) - len(sk.vertices) + 1 == g
        assert len(sk.rays) == b
        assert -len(sk.vertices) == 2 - 2 * g - b

    rng = random.Random(7)
    unimodular = 0
    for _ in range(500):
        base, centred = rng.choice(
            [
                (TRIANGLE, False),
                (SQUARE, False),
                ([*CUBIC, (0, 0)], True),
                ([*HEXAGON, (0, 0)], True),
            ]
        )
        norms = {m: Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for m in base}
        if centred:
            norms[0, 0] += 4
        f = _curve(norms)
        sk = skeleton(f)
        cells = [v.cell for v in sk.vertices]
        if set(sk.region_labels) != set(base) or any(
            len(c) != 3 or _twice_area(c) != 1 for c in cells
        ):
            continue
        unimodular += 1
        g, b = genus_and_ends(f)
        assert len(sk.edges) - len(sk.vertices) + 1 == g
        assert len(sk.rays) == b
        assert -len(sk.vertices) == 2 - 2 * g - b
    assert unimodular > 100
