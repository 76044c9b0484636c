from __future__ import annotations

import itertools
import random
import warnings
from fractions import Fraction

import pytest

from tropwrap import curves
from tropwrap.exactnum import UnitCoefficient, Valuation
from tropwrap.exceptions import (
    AtPuncture,
    ConfigInvalid,
    CutoffExhausted,
    CutoffWarning,
    DimensionMismatch,
    IndexRangeDiscrepancy,
    NegativeGap,
    NotLinearInZ2,
    ParseError,
    RootsNotResolvable,
    SingularSystem,
    ZeroFunction,
)
from tropwrap.hamiltonian import PerturbationConfig, enumerate_generators
from tropwrap.mirror_ring import (
    TWO_PI,
    CurvePresentation,
    Filtration,
    Puncture,
    SignedMonomial,
    end_of,
    end_parametrization,
    evaluate,
    filtered_dim,
    hms_lq_candidates,
    hms_pants_candidates,
    monomial_key,
    parse_laurent,
    pole_profile,
    pop_module_table,
    present_curve,
    puncture_for_end,
    reduce,
    solve_pop_coefficients,
    span_bound,
    structure_constants,
    verify_basis,
)
from tropwrap.tropical import TropCurveInput, cylindrical_ends

from .conftest import close


def test_lq_presentation(lq_ring: CurvePresentation):
    assert lq_ring.root_owner == ("origin", "A", "B")
    assert lq_ring.roots[1] == 1
    q = lq_ring.cross_ratio
    assert q == lq_ring.field.T(Valuation.symbol(TWO_PI))
    assert q == lq_ring.roots[2]


def test_pants_presentation(pants_ring: CurvePresentation):
    assert pants_ring.root_owner == ("origin", "A")
    assert pants_ring.z2 == pants_ring.one() - pants_ring.monomial((1, 0))
    assert pants_ring.monomial((0, 1)) * pants_ring.monomial((0, -1)) == pants_ring.one()
    with pytest.raises(ParseError, match="no cross ratio"):
        pants_ring.cross_ratio


def test_twisted_presentation():
    with pytest.raises(ConfigInvalid, match="theta_q"):
        present_curve(curves.lq())

    ring = present_curve(curves.lq(), phases={"theta_q": Fraction(1, 2)})
    v, c = ring.cross_ratio.leading()
    assert v == Valuation.symbol(TWO_PI)
    assert c == UnitCoefficient.exact(1, Fraction(1, 2))


def test_presentation_errors():
    conic = curves.parse_curve({"terms": [{"exp": [0, 0]}, {"exp": [1, 0]}, {"exp": [0, 2]}]})
    with pytest.raises(NotLinearInZ2):
        present_curve(conic)

    quadratic = curves.parse_curve({"terms": [{"exp": [0, 0]}, {"exp": [2, 0]}, {"exp": [0, 1]}]})
    with pytest.raises(RootsNotResolvable, match="linear factor"):
        present_curve(quadratic)

    with pytest.raises(RootsNotResolvable, match="coincide"):
        present_curve(curves.lq(0, theta_q=0))


def test_relation_reduces_to_zero(pants_ring: CurvePresentation, lq_ring: CurvePresentation):
    assert reduce({(0, 0): 1, (1, 0): -1, (0, 1): -1}, pants_ring).is_zero

    q_inv = lq_ring.cross_ratio.inverse()
    relation = reduce({(0, 0): 1, (1, 0): -1, (0, 1): -1, (1, 1): q_inv}, lq_ring)
    assert close(relation, lq_ring.zero())


def test_pants_table_identity(pants_ring: CurvePresentation):
    for l in range(6):
        g = {(l + 1, l): 1, (l, l + 1): 1, (l, l): -1}
        assert reduce(g, pants_ring).is_zero


def test_element_ops(pants_ring: CurvePresentation):
    z1 = pants_ring.monomial((1, 0))
    assert z1**3 == pants_ring.monomial((3, 0))
    assert (z1 * 2 - z1).terms == z1.terms
    assert str(pants_ring.zero()) == "0"
    assert set(pants_ring.monomial((0, -1)).to_json()["poles"]) == {"1"}
    with pytest.raises(ValueError, match="Negative"):
        z1 ** (-1)


def test_evaluate(pants_ring: CurvePresentation, lq_ring: CurvePresentation):
    two = pants_ring.field.rational(2)
    inverse = pants_ring.monomial((0, -1))
    assert evaluate(inverse, two) == -1
    assert evaluate({(0, -1): 1}, two, pants_ring) == -1
    assert evaluate({(1, 1): 1}, (two, pants_ring.field.rational(5))) == 10

    with pytest.raises(AtPuncture):
        evaluate(inverse, pants_ring.field.one)
    with pytest.raises(AtPuncture):
        evaluate(inverse, pants_ring.field.zero)
    with pytest.raises(ValueError, match="curve"):
        evaluate({(1, 0): 1}, two)
    with pytest.raises(AtPuncture, match="B vanishes"):
        lq_ring.z2_at(lq_ring.cross_ratio)


def test_reduce_commutes_with_evaluation(pants_ring: CurvePresentation):
    rng = random.Random(11)
    points = [Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2), Fraction(5, 3)]
    for _ in range(500):
        g = {
            (rng.randint(-2, 2), rng.randint(-2, 2)): rng.choice([-3, -2, -1, 1, 2, 3])
            for _ in range(rng.randint(1, 4))
        }
        z1 = pants_ring.field.rational(rng.choice(points))
        assert evaluate(reduce(g, pants_ring), z1) == evaluate(g, z1, pants_ring)


def test_reduce_is_multiplicative(pants_ring: CurvePresentation):
    rng = random.Random(12)
    for _ in range(500):
        g = {(rng.randint(-1, 1), rng.randint(-1, 1)): rng.randint(1, 3) for _ in range(2)}
        h = {(rng.randint(-1, 1), rng.randint(-1, 1)): rng.randint(-3, -1) for _ in range(2)}
        gh: dict[tuple[int, int], int] = {}
        for (a1, a2), x in g.items():
            for (b1, b2), y in h.items():
                m = (a1 + b1, a2 + b2)
                gh[m] = gh.get(m, 0) + x * y
        assert reduce(g, pants_ring) * reduce(h, pants_ring) == reduce(gh, pants_ring)


def test_monomial_key():
    region = [(0, 1), (-1, 0), (1, 0), (0, 0), (1, 1), (2, 0)]
    assert sorted(region, key=monomial_key) == [(0, 0), (1, 0), (-1, 0), (0, 1), (2, 0), (1, 1)]


def test_filtrations():
    assert Filtration.LQ.contains((1, 1), 1)
    assert not Filtration.LQ.contains((-1, 0), 1)
    assert Filtration.BOX.contains((-1, 1), 1)
    assert Filtration.PANTS.contains((-2, 1), 2)
    assert not Filtration.PANTS.contains((2, 1), 2)


@pytest.mark.parametrize("k", range(1, 7))
def test_lq_filtered_dim(lq_ring: CurvePresentation, k: int):
    with warnings.catch_warnings():
        warnings.simplefilter("error", CutoffWarning)
        span = filtered_dim(lq_ring, k, Filtration.LQ)
    assert span.dim == span.bound == 4 * k - 1
    assert span.certified


@pytest.mark.parametrize("k", [1, 2])
def test_box_filtered_dim(lq_ring: CurvePresentation, k: int):
    span = filtered_dim(lq_ring, k, Filtration.BOX)
    assert span.dim == span.bound == 4 * k + 1


@pytest.mark.parametrize("k", range(7))
def test_pants_filtered_dim(pants_ring: CurvePresentation, k: int):
    span = filtered_dim(pants_ring, k, Filtration.PANTS)
    assert span.dim == span.bound == 3 * k + 1
    assert span.certified


def test_filtered_span_certificate(pants_ring: CurvePresentation):
    span = filtered_dim(pants_ring, 1, Filtration.PANTS)
    assert span.monomials == ((0, 0), (1, 0), (-1, 0), (0, -1))
    assert filtered_dim(pants_ring, 1, Filtration.PANTS) is span

    as_json = span.to_json()
    assert as_json["dim"] == 4
    assert as_json["basis"][0] == [0, 0]
    assert as_json["region_size"] == len(span.region)
    assert as_json["bound"] == 4
    assert as_json["certified"] is True
    assert as_json["working_cutoff"] == pants_ring.field.cutoff.to_json()

    def pure_z1(m, k):
        return m[1] == 0 and abs(m[0]) <= k

    assert filtered_dim(pants_ring, 2, pure_z1).dim == 5


@pytest.mark.parametrize("k", range(1, 7))
def test_lq_candidates(lq_ring: CurvePresentation, k: int):
    candidates = hms_lq_candidates(lq_ring, k)
    assert len(candidates) == 4 * k - 1
    check = verify_basis(lq_ring, candidates, Filtration.LQ, k)
    assert check.ok
    assert check.rank == check.dim == 4 * k - 1


@pytest.mark.parametrize("k", range(1, 6))
def test_pants_candidates(pants_ring: CurvePresentation, k: int):
    candidates = hms_pants_candidates(pants_ring, k)
    check = verify_basis(pants_ring, candidates, Filtration.PANTS, k)
    assert check
    assert len(check.transition) == 3 * k + 1


def test_verify_basis_failures(pants_ring: CurvePresentation):
    candidates = hms_pants_candidates(pants_ring, 2)
    duplicate = [*candidates[:-1], candidates[0]]
    check = verify_basis(pants_ring, duplicate, Filtration.PANTS, 2)
    assert not check
    assert check.rank == check.dim - 1

    with pytest.raises(DimensionMismatch):
        verify_basis(pants_ring, candidates[:-1], Filtration.PANTS, 2)


def test_structure_constants(pants_ring: CurvePresentation, lq_ring: CurvePresentation):
    assert structure_constants(pants_ring, 1, 0, 0, 1, Filtration.PANTS) == {(1, 0): 1, (2, 0): -1}

    q = lq_ring.cross_ratio
    product = structure_constants(lq_ring, 1, 0, 0, 1)
    assert set(product) == {(0, 0), (1, 0), (0, 1)}
    assert close(product[(1, 0)], q)
    assert close(product[(0, 1)], q)
    assert close(product[(0, 0)], -q)


def test_puncture_for_end(
    pants: TropCurveInput,
    pants_ring: CurvePresentation,
    lq: TropCurveInput,
    lq_ring: CurvePresentation,
):
    kinds = [puncture_for_end(end, pants_ring) for end in cylindrical_ends(pants)]
    assert kinds == [Puncture("root", 1), Puncture("infinity"), Puncture("zero")]
    assert str(kinds[2]) == "z1 -> 0"

    kinds = [puncture_for_end(end, lq_ring) for end in cylindrical_ends(lq)]
    assert kinds == [
        Puncture("root", 1),
        Puncture("infinity"),
        Puncture("root", 2),
        Puncture("zero"),
    ]


def test_end_parametrization(pants: TropCurveInput, pants_ring: CurvePresentation):
    ep = end_parametrization(pants_ring, cylindrical_ends(pants)[2])
    z1, z2 = ep.point(3)
    assert pants_ring.f_value(z1, z2).is_zero
    assert ep.local_parameter(1).val() == Valuation.symbol(TWO_PI)

    g = pants_ring.monomial((-2, 0))
    assert evaluate(g, z1).val() == Valuation.of({TWO_PI: -6})


def test_pole_profile(pants: TropCurveInput, pants_ring: CurvePresentation):
    root, infinity, zero = (end_parametrization(pants_ring, e) for e in cylindrical_ends(pants))

    for i in range(1, 7):
        assert pole_profile(pants_ring.monomial((-i, 0)), zero) == (i, 1)
    for l in range(7):
        order, lead = pole_profile(pop_module_table(0, 2 * l).element(pants_ring), infinity)
        assert order == 2 * l
        assert lead == (-1) ** l
    assert pole_profile(pop_module_table(0, 3).element(pants_ring), infinity)[0] == 3

    assert pole_profile(pants_ring.monomial((0, -1)), root) == (1, -1)
    assert pole_profile(pants_ring.monomial((0, 1)), root) == (-1, -1)
    assert pole_profile(pants_ring.one(), infinity) == (0, 1)

    with pytest.raises(ZeroFunction):
        pole_profile(pants_ring.zero(), zero)


def test_pop_module_table():
    assert pop_module_table(0, 0) == SignedMonomial(1, 0, 0)
    assert pop_module_table(0, 4) == SignedMonomial(1, 2, 2)
    assert pop_module_table(0, 3) == SignedMonomial(1, 2, 1)
    assert pop_module_table(1, 4) == SignedMonomial(-1, 1, 2)
    assert str(pop_module_table(1, 4)) == "-z1^1*z2^2"
    with pytest.raises(NegativeGap):
        pop_module_table(2, 1)


def test_solve_pop_coefficients():
    assert solve_pop_coefficients() == (1, 1)
    assert solve_pop_coefficients(2) == (2, 1)
    assert solve_pop_coefficients(exact_c=True) == (1, 1)
    assert solve_pop_coefficients(xi2=3) == (1, 1)
    with pytest.raises(SingularSystem, match="admissible"):
        solve_pop_coefficients(xi2=0)


def test_parse_laurent(pants_ring: CurvePresentation, lq_ring: CurvePresentation):
    g = parse_laurent("z1*z2 - Q + z1**-1/2", lq_ring)
    assert set(g) == {(1, 1), (0, 0), (-1, 0)}
    assert g[(1, 1)] == 1
    assert g[(0, 0)] == -lq_ring.cross_ratio
    assert g[(-1, 0)] == Fraction(1, 2)

    assert parse_laurent("1 - z1 - z2", pants_ring) == {(0, 0): 1, (1, 0): -1, (0, 1): -1}
    with pytest.raises(ParseError, match="no cross ratio"):
        parse_laurent("Q*z1", pants_ring)
    with pytest.raises(ParseError, match="Unsupported"):
        parse_laurent("z1 + y", pants_ring)
    with pytest.raises(ParseError, match="Cannot parse"):
        parse_laurent("z1 +", pants_ring)
    with pytest.raises(ParseError, match="not rational"):
        parse_laurent("sqrt(2)*z1", pants_ring)


def test_end_of(pants: TropCurveInput):
    assert end_of(pants, 2).alpha == (0, -1)
    with pytest.raises(ParseError, match="out of range"):
        end_of(pants, 5)


def test_lq_candidates_with_constants(lq_ring: CurvePresentation):
    rng = random.Random(5)
    for _ in range(20):
        a_consts = {i: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for i in (1, 2)}
        b_consts = {i: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for i in (1, 2)}
        candidates = hms_lq_candidates(lq_ring, 2, a_consts, b_consts)
        assert verify_basis(lq_ring, candidates, Filtration.LQ, 2).ok


@pytest.mark.parametrize("k", range(1, 7))
def test_degree_zero_generators_match_span(lq: TropCurveInput, lq_ring: CurvePresentation, k: int):
    cfg = PerturbationConfig.create(lq, R=10, k=k, a=(-1, -2))
    with pytest.warns(IndexRangeDiscrepancy):
        gens = enumerate_generators(lq, cfg)
    degree_zero = sum(g.degree == 0 for g in gens)
    assert degree_zero == filtered_dim(lq_ring, k, Filtration.LQ).dim + 1


def test_cutoff_pressure(lq: TropCurveInput):
    # A = 1 − T^{2π} z₁ puts the root at valuation −2π
    steep = curves.parse_curve(
        {
            "terms": [
                {"exp": [0, 0]},
                {"exp": [1, 0], "log_norm": "1", "phase_pi": "1"},
                {"exp": [0, 1], "phase_pi": "1"},
            ]
        }
    )
    with warnings.catch_warnings():
        warnings.simplefilter("error", CutoffWarning)
        span = filtered_dim(present_curve(steep, cutoff=30), 1, Filtration.PANTS)
    assert span.dim == 4
    assert span.certified

    # Q² lies beyond a cutoff of 12, so z₂² has no normal form there
    ring = present_curve(lq, cutoff=12)
    with pytest.raises(CutoffExhausted):
        filtered_dim(ring, 2, Filtration.LQ, lifts=0)

    span = filtered_dim(ring, 2, Filtration.LQ)
    assert span.dim == 7
    assert span.certified
    assert span.ring is not ring
    assert span.to_json()["working_cutoff"] != ring.field.cutoff.to_json()


def test_span_bound(pants_ring: CurvePresentation, lq_ring: CurvePresentation):
    assert span_bound(pants_ring, []) == 0
    assert span_bound(pants_ring, [(0, 0)]) == 1
    assert span_bound(pants_ring, [(1, 0), (-1, 0)]) == 3
    assert span_bound(lq_ring, [(0, 1), (0, -1)]) == 3
    for k in range(1, 7):
        box = [(m1, m2) for m1 in range(-k, k + 1) for m2 in range(-k, k + 1)]
        assert span_bound(lq_ring, box) == 4 * k + 1


@pytest.mark.parametrize("constraint", list(Filtration))
def test_region_covers_level(constraint: Filtration, pants_ring: CurvePresentation):
    for k in range(4):
        scanned = {
            (m1, m2)
            for m1 in range(-4 * k - 2, 4 * k + 3)
            for m2 in range(-4 * k - 2, 4 * k + 3)
            if constraint.contains((m1, m2), k)
        }
        span = filtered_dim(pants_ring, k, constraint)
        assert set(span.region) == scanned
        assert list(span.region) == sorted(scanned, key=monomial_key)


def test_reduce_divides_by_z2(lq_ring: CurvePresentation):
    rng = random.Random(13)
    points = [Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2), Fraction(5, 3)]
    for _ in range(500):
        g = {
            (rng.randint(-2, 2), rng.randint(-2, 2)): rng.choice([-3, -2, -1, 1, 2, 3])
            for _ in range(rng.randint(1, 4))
        }
        z1 = lq_ring.field.rational(rng.choice(points))
        assert close(evaluate(reduce(g, lq_ring), z1), evaluate(g, z1, lq_ring), below=20)


def test_pole_orders_follow_rays(pants: TropCurveInput, pants_ring: CurvePresentation):
    ends = cylindrical_ends(pants)
    profiles = {}
    for end in ends:
        ep = end_parametrization(pants_ring, end)
        d1, d2 = end.ray_direction
        for m in itertools.product(range(-6, 7), repeat=2):
            order, lead = pole_profile(pants_ring.monomial(m), ep)
            assert order == m[0] * d1 + m[1] * d2
            profiles[end.index, m] = (order, lead)

    rng = random.Random(14)
    for _ in range(500):
        m = (rng.randint(-3, 3), rng.randint(-3, 3))
        n = (rng.randint(-3, 3), rng.randint(-3, 3))
        end = rng.choice(ends)
        product = pole_profile(
            pants_ring.monomial(m) * pants_ring.monomial(n), end_parametrization(pants_ring, end)
        )
        (om, lm), (on, ln) = profiles[end.index, m], profiles[end.index, n]
        assert product[0] == om + on
        assert close(product[1], lm * ln)
        if om != on:
            total = pants_ring.monomial(m) + pants_ring.monomial(n)
            order, _ = pole_profile(total, end_parametrization(pants_ring, end))
            assert order == max(om, on)
