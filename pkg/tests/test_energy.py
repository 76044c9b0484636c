from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
import sympy

from tropwrap import curves
from tropwrap.energy import (
    DiskArc,
    DiskBoundaryData,
    DiskVertex,
    EndFrame,
    LiftedPath,
    Verdict,
    boundary_certificate,
    boundary_class,
    disk_energy,
    end_loop,
    forbidden_phis,
    integral_eta,
    integral_lambda,
    is_zero_mod_4pi2,
    kernel_basis,
    obstruction_check,
    reduce_mod_4pi2,
    rescale_weight,
    wrapping_number,
)
from tropwrap.exactnum import NovikovField, Valuation
from tropwrap.exceptions import (
    DiagonalNeedsAdjustedMode,
    DimensionMismatch,
    InconsistentCycle,
    InteriorGeneratorHasNoRescale,
    NonIntegralWrap,
    NotALoop,
    NotNullhomotopic,
    ParseError,
)
from tropwrap.hamiltonian import FloerGenerator
from tropwrap.tropical import TropCurveInput, cylindrical_ends
from tropwrap.types import AlphaCoords, GenKind, GenType

PI = math.pi
GLOBAL = EndFrame.global_frame()


def _square(side: float = 1.0) -> LiftedPath:
    """A loop in the (p₂, θ₁) plane: p₁ = θ₂ = 0."""
    return LiftedPath.of(
        [(0, 0, 0, 0), (0, side, 0, 0), (0, side, side, 0), (0, 0, side, 0), (0, 0, 0, 0)],
        GLOBAL,
    )


def test_wrapping_number():
    loop = LiftedPath.of([(0, 0, 0, 0), (0, 0, 0, 2 * PI), (0, 0, 0, 6 * PI)], GLOBAL)
    assert wrapping_number(loop) == 3
    assert wrapping_number(loop.reversed()) == -3
    assert boundary_class(loop, (1,)).residual_class == (1,)

    with pytest.raises(NonIntegralWrap):
        wrapping_number(LiftedPath.of([(0, 0, 0, 0), (0, 0, 0, 1.0)], GLOBAL))
    with pytest.raises(NotALoop):
        wrapping_number(LiftedPath.of([(0, 0, 0, 0), (1, 0, 0, 0)], GLOBAL))


def test_path_validation():
    with pytest.raises(ValueError, match="at least one"):
        LiftedPath((), GLOBAL)
    with pytest.raises(ValueError, match="Non-finite"):
        LiftedPath.of([(0, math.inf, 0, 0)], GLOBAL)
    with pytest.raises(NotALoop, match="Cannot join"):
        _square().then(LiftedPath.of([(1, 0, 0, 0), (0, 0, 0, 0)], GLOBAL))


def test_eta_of_square():
    # η = p₁dp₂ + θ₂dθ₁ vanishes on the (p₂, θ₁) plane
    assert integral_eta(_square()) == 0

    loop = LiftedPath.of(
        [(0, 0, 0, 0), (1, 0, 0, 0), (1, 0, 1, 0), (0, 0, 1, 0), (0, 0, 0, 0)], GLOBAL
    )
    assert integral_eta(loop) == pytest.approx(1.0)
    assert integral_eta(loop.reversed()) == pytest.approx(4 * PI**2 - 1.0)


def test_eta_exact():
    s = sympy.Symbol("s", positive=True)
    zero = sympy.Integer(0)
    loop = LiftedPath.of(
        [(zero, zero, zero, zero), (s, zero, zero, zero), (s, zero, s, zero), (zero, zero, s, zero),
         (zero, zero, zero, zero)],
        GLOBAL,
    )
    assert loop.exact
    assert sympy.simplify(integral_eta(loop) - s**2) == 0
    assert integral_lambda(loop) == 0

    # λ = −θ₂dp₂ in the global frame
    column = LiftedPath.of(
        [(zero, zero, zero, zero), (zero, zero, s, zero), (zero, zero, s, s), (zero, zero, zero, s),
         (zero, zero, zero, zero)],
        GLOBAL,
    )
    assert sympy.simplify(integral_lambda(column) - s**2) == 0
    assert integral_eta(column) == 0


def test_diagonal_needs_adjusted(pants: TropCurveInput):
    diagonal = cylindrical_ends(pants)[1]
    frame = EndFrame.from_end(diagonal, pants)
    path = LiftedPath.of([(0, 0, 0, 0), (0, 0, 0, 0)], frame)
    with pytest.raises(DiagonalNeedsAdjustedMode):
        integral_eta(path)
    assert integral_eta(path, adjusted=True) == 0


def test_reduce_mod_4pi2():
    assert reduce_mod_4pi2(4 * PI**2 + 1.0) == pytest.approx(1.0)
    assert reduce_mod_4pi2(-1.0) == pytest.approx(4 * PI**2 - 1.0)
    assert reduce_mod_4pi2(8 * PI**2) == 0.0
    assert is_zero_mod_4pi2(-4 * PI**2)

    t = sympy.Symbol("t")
    assert reduce_mod_4pi2(9 * sympy.pi**2) == sympy.pi**2
    assert sympy.expand(reduce_mod_4pi2((5 + t) * sympy.pi**2) - (1 + t) * sympy.pi**2) == 0
    assert is_zero_mod_4pi2(12 * sympy.pi**2)
    assert not is_zero_mod_4pi2(t * sympy.pi**2)


def test_kernel_basis(pants: TropCurveInput, lq: TropCurveInput):
    assert kernel_basis(pants) == []
    assert kernel_basis(lq) == [(1, 0, 1, 0)]


def test_obstruction_opposite_ends():
    theta = sympy.Symbol("theta_q")
    result = obstruction_check(curves.lq(), (0, 1, 0, 1))
    assert sympy.simplify(result.value - 2 * sympy.pi**2 * theta) == 0
    assert result.verdict is Verdict.NO_DISK_GENERIC
    assert not result.trivial
    assert result.to_json()["value_float"] is None

    half = obstruction_check(curves.lq(theta_q=Fraction(1, 2)), {1: 1, 3: 1})
    assert float(half.value) == pytest.approx(PI**2)
    assert half.verdict is Verdict.NO_DISK
    assert half.classes == (0, 1, 0, 1)

    untwisted = obstruction_check(curves.lq(theta_q=0), (0, 1, 0, 1))
    assert untwisted.verdict is Verdict.INCONCLUSIVE


def test_obstruction_classes(lq: TropCurveInput):
    everything = obstruction_check(lq, (1, 1, 1, 1))
    assert everything.trivial
    assert obstruction_check(lq, (0, 0, 0, 0)).verdict is Verdict.INCONCLUSIVE

    with pytest.raises(NotNullhomotopic, match="not nullhomotopic"):
        obstruction_check(lq, (1, 0, 0, 0))
    with pytest.raises(DimensionMismatch):
        obstruction_check(lq, (1, 1))


def test_end_loop(lq: TropCurveInput):
    end = cylindrical_ends(lq)[1]
    loop = end_loop(end, lq)
    assert len(loop.points) == 4
    assert loop.exact
    assert wrapping_number(loop) == 1
    assert wrapping_number(loop.in_frame(EndFrame((0, 1)))) == 0
    twice = end_loop(end, lq, turns=2)
    assert twice.points[-1].theta2 == 4 * sympy.pi


def test_forbidden_phis():
    loop = LiftedPath.of([(0, 0, 0, 0), (0, 1.0, 0, 2 * PI)], GLOBAL)
    (phi,) = forbidden_phis([loop])
    assert 0 <= phi < 2 * PI
    assert forbidden_phis([_square()]) == []


def test_boundary_certificate():
    assert boundary_certificate("lq")["divisors"] == ["z1 = z2", "z1*z2 = q"]
    assert boundary_certificate("pants")["curve"] == "pants"
    assert boundary_certificate("cubic") is None


def test_disk_energy():
    x, y = AlphaCoords(0, 0, 0, 0), AlphaCoords(1, 0, 0, 0)
    data = DiskBoundaryData(
        (DiskArc(2.0, 0.5, 1.5, x, y), DiskArc(-1.0, 0.0, 0.0, y, x)),
        (DiskVertex(x, 0), DiskVertex(y, 1)),
    )
    assert disk_energy(data) == pytest.approx(2.0 + 1.0 - 1.0 + 2 * PI)

    with pytest.raises(InconsistentCycle, match="2 arcs for 1"):
        disk_energy(DiskBoundaryData(data.arcs, data.vertices[:1]))
    with pytest.raises(InconsistentCycle, match="does not meet"):
        disk_energy(DiskBoundaryData(data.arcs, data.vertices[::-1]))


def test_disk_json():
    obj = {
        "arcs": [{"lambda": 1, "start": [0, 0, 0, 0], "end": [0, 0, 0, 0]}],
        "vertices": [{"point": [0, 0, 0, 0], "j": 2, "p_alpha": 0.5}],
    }
    data = DiskBoundaryData.from_json(obj)
    assert disk_energy(data) == pytest.approx(1 + 2 * PI)

    with pytest.raises(ParseError, match="disk boundary"):
        DiskBoundaryData.from_json({"arcs": []})


def test_rescale_weight(pants: TropCurveInput):
    field = NovikovField(cutoff=100)
    end = cylindrical_ends(pants)[0]
    generator = FloerGenerator(
        kind=GenKind.CYLINDRICAL,
        degree=0,
        end=end,
        gen_type=GenType.E,
        j=0,
        coords=AlphaCoords(3.0, 0, 0, 0),
    )
    weight = rescale_weight(generator, Fraction(5, 2), 1, field)
    assert weight.val() == Valuation.const(Fraction(3, 2))

    wrapped = FloerGenerator(
        kind=GenKind.CYLINDRICAL,
        degree=0,
        end=end,
        gen_type=GenType.E,
        j=1,
        coords=AlphaCoords(3.0, 0, 0, 0),
    )
    weight = rescale_weight(wrapped, 0, 0, field)
    assert weight.field.basis.approx(weight.val()) == pytest.approx(6 * PI)

    interior = FloerGenerator(kind=GenKind.INTERIOR, degree=1, gen_type=GenType.F)
    with pytest.raises(InteriorGeneratorHasNoRescale):
        rescale_weight(interior, 0, 0, field)


def _shoelace(points: list[tuple[float, ...]]) -> float:
    """``∫∫ dp₁∧dθ₁ + dp₂∧dθ₂`` over a disk bounded by the closed polygon."""
    area = 0.0
    for a, b in zip(points, points[1:]):
        area += (a[0] * b[1] - b[0] * a[1]) / 2
        area += (a[2] * b[3] - b[2] * a[3]) / 2
    return area


def _primitive(rng: random.Random) -> tuple[int, int]:
    while True:
        alpha = (rng.randint(-3, 3), rng.randint(-3, 3))
        if alpha != (0, 0) and math.gcd(*alpha) == 1:
            return alpha


def test_lambda_is_symplectic_area():
    rng = random.Random(21)
    for _ in range(500):
        frame = EndFrame(_primitive(rng), rng.uniform(-2, 2), rng.uniform(-PI, PI))
        points = [tuple(rng.uniform(-5, 5) for _ in range(4)) for _ in range(rng.randint(3, 7))]
        points.append(points[0])
        loop = LiftedPath.of(points, frame)
        assert integral_lambda(loop) == pytest.approx(_shoelace(points), abs=1e-9)

        w = rng.randint(-2, 2)
        start = (rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0)
        end = (start[0], start[1] + 2 * PI * w, start[2], rng.uniform(-3, 3))
        wrap = LiftedPath.from_alpha([start, (1.0, 0.5, -1.0, 2.0), end], frame)
        tail = wrap.points[-1]
        shifted = [tuple(c + t for c, t in zip(p, tail)) for p in points]
        shifted[0] = shifted[-1] = tuple(tail)
        joined = wrap.then(LiftedPath.of(shifted, frame))
        assert integral_lambda(joined) == pytest.approx(
            integral_lambda(wrap) + _shoelace(shifted), abs=1e-8
        )


def _isotropic_plane(rng: random.Random) -> tuple[list[float], list[float]]:
    """Two vectors on which ``dp₁∧dp₂ − dθ₁∧dθ₂`` vanishes."""
    u = [Fraction(rng.randint(-3, 3)) for _ in range(4)]
    u[0] = Fraction(rng.choice([-2, -1, 1, 2]))
    v = [Fraction(rng.randint(-3, 3)) for _ in range(4)]
    v[2] = (v[0] * u[2] + u[1] * v[3] - u[3] * v[1]) / u[0]
    return [float(x) for x in u], [float(x) for x in v]


def test_eta_is_homotopy_invariant():
    rng = random.Random(22)
    frames = [
        EndFrame(alpha, rng.uniform(-1, 1), rng.uniform(-1, 1))
        for alpha in ((1, 0), (0, 1), (-1, 0), (0, -1))
    ]
    for _ in range(500):
        frame = rng.choice(frames)
        if rng.random() < 0.5:
            w = rng.randint(-2, 2)
            start = (rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3))
            mid = tuple(rng.uniform(-3, 3) for _ in range(4))
            end = (start[0], start[1] + 2 * PI * w, start[2], rng.uniform(-3, 3))
            base = LiftedPath.from_alpha([start, mid, end], frame)
        else:
            base = LiftedPath.of([tuple(rng.uniform(-3, 3) for _ in range(4))], frame)

        u, v = _isotropic_plane(rng)
        origin = base.points[-1]
        corners = [(0.0, 0.0)] + [
            (rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(rng.randint(2, 5))
        ]
        loop = [tuple(o + a * x + b * y for o, x, y in zip(origin, u, v)) for a, b in corners]
        loop[0] = tuple(origin)
        loop.append(tuple(origin))

        deformed = base.then(LiftedPath.of(loop, frame))
        assert is_zero_mod_4pi2(integral_eta(deformed) - integral_eta(base))


def test_disk_energy_is_additive():
    rng = random.Random(23)
    for _ in range(500):
        n = rng.randint(3, 7)
        vertices = [
            DiskVertex(AlphaCoords(*(rng.uniform(-3, 3) for _ in range(4))), rng.randint(-2, 2))
            for _ in range(n)
        ]
        arcs = [
            DiskArc(
                rng.uniform(-5, 5),
                rng.uniform(-1, 1),
                rng.uniform(-1, 1),
                vertices[s].point,
                vertices[(s + 1) % n].point,
            )
            for s in range(n)
        ]
        whole = disk_energy(DiskBoundaryData(tuple(arcs), tuple(vertices)))

        a, b = sorted(rng.sample(range(n), 2))
        chord, g_a, g_b = rng.uniform(-5, 5), rng.uniform(-1, 1), rng.uniform(-1, 1)
        share = {a: rng.randint(-2, 2), b: rng.randint(-2, 2)}
        pa, pb = vertices[a].point, vertices[b].point

        def corner(s: int, first: bool) -> DiskVertex:
            vertex = vertices[s]
            if s not in share:
                return vertex
            j = share[s] if first else vertex.j - share[s]
            return DiskVertex(vertex.point, j)

        left = DiskBoundaryData(
            (*arcs[a:b], DiskArc(chord, g_b, g_a, pb, pa)),
            tuple(corner(s, True) for s in range(a, b + 1)),
        )
        right_ids = [*range(b, n), *range(0, a + 1)]
        right = DiskBoundaryData(
            (*arcs[b:], *arcs[:a], DiskArc(-chord, g_a, g_b, pa, pb)),
            tuple(corner(s, False) for s in right_ids),
        )
        assert disk_energy(left) + disk_energy(right) == pytest.approx(whole, abs=1e-9)
