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

"""The quotient ring ``Λ[z₁^±, z₂^±] / (f)`` of a curve linear in z₂.

Writing ``f = z₂^m (A(z₁) + B(z₁) z₂)`` and substituting ``z₂ = −A/B``
identifies the ring with Laurent polynomials in z₁ localised at the roots of
A and B. Every element then has a unique normal form

    Σ cₙ z₁ⁿ + Σ_ρ Σ_{j ≥ 1} c_{ρ,j} (z₁ − ρ)^{−j}

which is what :class:`QuotientElement` stores. Linear algebra over Λ uses
minimal-valuation pivots and tracks how much absolute precision every row
still carries, so a vector is only called zero when nothing below its
precision survives.
"""

from __future__ import annotations

import enum
import functools
import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, Mapping, NamedTuple, Sequence, Tuple

import sympy
from typing_extensions import TypeAlias

from tropwrap.exactnum import (
    ONE,
    Generator,
    MpmathGenerator,
    NovikovField,
    NovikovScalar,
    Rational,
    UnitCoefficient,
    Valuation,
)
from tropwrap.exceptions import (
    AtPuncture,
    CutoffExhausted,
    CutoffWarning,
    DimensionMismatch,
    NegativeGap,
    NotLinearInZ2,
    ParseError,
    RootsNotResolvable,
    SingularSystem,
    ZeroFunction,
)
from tropwrap.tropical import CylindricalEndSpec, TropCurveInput, cylindrical_ends
from tropwrap.types import Exponent

__all__ = [
    "TWO_PI",
    "Atom",
    "Puncture",
    "CurvePresentation",
    "QuotientElement",
    "Filtration",
    "FilteredSpan",
    "BasisCheck",
    "EndParametrization",
    "SignedMonomial",
    "monomial_key",
    "present_curve",
    "reduce",
    "filtered_dim",
    "span_bound",
    "verify_basis",
    "evaluate",
    "puncture_for_end",
    "end_parametrization",
    "pole_profile",
    "pop_module_table",
    "solve_pop_coefficients",
    "structure_constants",
    "hms_lq_candidates",
    "hms_pants_candidates",
    "parse_laurent",
]

_log = logging.getLogger(__name__)

TWO_PI = "2pi"
EXPANSION_ORDER = 32
"""Number of local-parameter orders examined by :func:`pole_profile`."""

Atom: TypeAlias = Tuple[int, int]
"""``(0, n)`` is z₁ⁿ; ``(r, j)`` with r ≥ 1 is ``(z₁ − ρ_r)^{−j}``."""

Laurent: TypeAlias = Dict[Exponent, NovikovScalar]

_UNIT: Atom = (0, 0)


def _two_pi_generator() -> Generator:
    return MpmathGenerator(TWO_PI, lambda iv: 2 * iv.pi, label="2π")


def _scaled_generator(gen: Generator) -> Generator:
    """``2π·gen`` as an interval generator of its own."""

    def func(iv: Any) -> Any:
        lo, hi = gen.enclose(iv.prec)
        a = iv.mpf(lo.numerator) / lo.denominator
        b = iv.mpf(hi.numerator) / hi.denominator
        return 2 * iv.pi * (a + (b - a) * iv.mpf([0, 1]))

    return MpmathGenerator(f"{TWO_PI}*{gen.symbol}", func, label=f"2π·{gen.symbol}")


def _novikov_exponent(f: TropCurveInput, log_norm: Valuation) -> tuple[Valuation, list[Generator]]:
    """``2π·log_norm`` over the generators ``2pi`` and ``2pi*<symbol>``."""
    coeffs: dict[str, Fraction] = {}
    gens: list[Generator] = [_two_pi_generator()]
    for sym, c in log_norm:
        exact = Fraction(1) if sym == ONE else f.basis[sym].exact
        if exact is not None:
            coeffs[TWO_PI] = coeffs.get(TWO_PI, Fraction(0)) + c * exact
        else:
            scaled = _scaled_generator(f.basis[sym])
            gens.append(scaled)
            coeffs[scaled.symbol] = c
    return Valuation.of(coeffs), gens


# * Presentation


class Puncture(NamedTuple):
    kind: str
    """``"zero"``, ``"infinity"`` or ``"root"``."""

    root: int = 0
    """Index into :attr:`CurvePresentation.roots` (1-based) for ``"root"``."""

    def __str__(self) -> str:
        if self.kind == "root":
            return f"z1 -> rho{self.root}"
        return "z1 -> 0" if self.kind == "zero" else "z1 -> oo"


@dataclass(eq=False)
class CurvePresentation:
    """``f = z₂^m (A(z₁) + B(z₁) z₂)`` over a Novikov field.

    ``roots[0]`` is the puncture ``z₁ = 0``; the others are the finite nonzero
    roots of A and B, listed A first.
    """

    field: NovikovField
    A: Mapping[int, NovikovScalar]
    B: Mapping[int, NovikovScalar]
    roots: tuple[NovikovScalar, ...]
    root_owner: tuple[str, ...]
    shift: int = 0
    name: str = ""
    _table: dict[tuple[Atom, Atom], dict[Atom, NovikovScalar]] = field(
        default_factory=dict, repr=False
    )
    _monomials: dict[Exponent, QuotientElement] = field(default_factory=dict, repr=False)
    _spans: dict[Any, FilteredSpan] = field(default_factory=dict, repr=False)
    _lifts: dict[Valuation, CurvePresentation] = field(default_factory=dict, repr=False)

    @property
    def puncture_roots(self) -> tuple[NovikovScalar, ...]:
        return self.roots[1:]

    def root_of(self, owner: str) -> int | None:
        for index, who in enumerate(self.root_owner):
            if who == owner:
                return index
        return None

    @property
    def cross_ratio(self) -> NovikovScalar:
        """``ρ_B / ρ_A``; for ``1 − z₁ − z₂ + Q⁻¹z₁z₂`` this is Q.

        Raises:
            ParseError: If A or B has no finite nonzero root.
        """
        a, b = self.root_of("A"), self.root_of("B")
        if a is None or b is None:
            raise ParseError(f"Curve {self.name or '<input>'} has no cross ratio")
        return self.roots[b] / self.roots[a]

    def zero(self) -> QuotientElement:
        return QuotientElement(self, {})

    def one(self) -> QuotientElement:
        return self.atom(_UNIT)

    def atom(self, atom: Atom, coeff: NovikovScalar | Rational = 1) -> QuotientElement:
        return QuotientElement(self, {atom: self.field.coerce(coeff)})

    def polynomial(self, coeffs: Mapping[int, NovikovScalar]) -> QuotientElement:
        return QuotientElement(self, {(0, n): c for n, c in coeffs.items()})

    def _inverse(self, poly: Mapping[int, NovikovScalar], owner: str) -> QuotientElement:
        low = min(poly)
        lead = poly[max(poly)]
        result = self.atom((0, -low), lead.inverse())
        index = self.root_of(owner)
        if index is not None:
            result = result * self.atom((index, 1))
        return result

    @functools.cached_property
    def z2(self) -> QuotientElement:
        """``z₂ = −A / B``."""
        return -(self.polynomial(self.A) * self._inverse(self.B, "B"))

    @functools.cached_property
    def z2_inverse(self) -> QuotientElement:
        """``z₂⁻¹ = −B / A``."""
        return -(self.polynomial(self.B) * self._inverse(self.A, "A"))

    def z2_power(self, n: int) -> QuotientElement:
        if n == 0:
            return self.one()
        return self.monomial((0, n))

    def monomial(self, m: Exponent) -> QuotientElement:
        """Normal form of ``z₁^{m₁} z₂^{m₂}``."""
        cached = self._monomials.get(m)
        if cached is not None:
            return cached

        m1, m2 = m
        if m2 == 0:
            result = self.atom((0, m1))
        elif m1 != 0:
            result = self.atom((0, m1)) * self.monomial((0, m2))
        elif m2 > 0:
            result = self.monomial((0, m2 - 1)) * self.z2
        else:
            result = self.monomial((0, m2 + 1)) * self.z2_inverse
        self._monomials[m] = result
        return result

    def product(self, a: Atom, b: Atom) -> dict[Atom, NovikovScalar]:
        """Normal form of the product of two atoms, memoised."""
        key = (a, b) if a <= b else (b, a)
        cached = self._table.get(key)
        if cached is None:
            cached = self._table[key] = self._atom_product(*key)
        return cached

    def _atom_product(self, a: Atom, b: Atom) -> dict[Atom, NovikovScalar]:
        (r, i), (s, j) = a, b
        one = self.field.one
        if r == s == 0:
            return {(0, i + j): one}
        if r == s:
            return {(r, i + j): one}
        if r == 0 and i >= 0:
            return self._binomial(i, s, j)
        order_r = -i if r == 0 else i
        return self._pole_pair(r, order_r, s, j)

    def _binomial(self, n: int, r: int, j: int) -> dict[Atom, NovikovScalar]:
        """``z₁ⁿ (z₁ − ρ)^{−j}`` for n ≥ 0."""
        rho = self.roots[r]
        out: dict[Atom, NovikovScalar] = {}
        for i in range(n + 1):
            c = rho ** (n - i) * math.comb(n, i)
            if i < j:
                _accumulate(out, (r, j - i), c)
                continue
            for t in range(i - j + 1):
                _accumulate(out, (0, t), c * (-rho) ** (i - j - t) * math.comb(i - j, t))
        return out

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def _pole_pair(self, r: int, a: int, s: int, b: int) -> dict[Atom, NovikovScalar]:
        """``(z₁ − ρ_r)^{−a} (z₁ − ρ_s)^{−b}`` in partial fractions."""
        if a == 0:
            return {_pole_atom(s, b): self.field.one}
        if b == 0:
            return {_pole_atom(r, a): self.field.one}

        delta_inv = (self.roots[r] - self.roots[s]).inverse()
        out: dict[Atom, NovikovScalar] = {}
        for atom, c in self._pole_pair(r, a, s, b - 1).items():
            _accumulate(out, atom, c * delta_inv)
        for atom, c in self._pole_pair(r, a - 1, s, b).items():
            _accumulate(out, atom, -(c * delta_inv))
        return out

    def f_value(self, z1: NovikovScalar, z2: NovikovScalar) -> NovikovScalar:
        """``A(z₁) + B(z₁) z₂``."""
        return _poly_value(self.A, z1) + _poly_value(self.B, z1) * z2

    def z2_at(self, z1: NovikovScalar) -> NovikovScalar:
        """The point of the curve above ``z1``.

        Raises:
            AtPuncture: If ``B(z1)`` vanishes.
        """
        b = _poly_value(self.B, z1)
        if b.is_zero:
            raise AtPuncture(f"B vanishes at z1 = {z1}")
        return -(_poly_value(self.A, z1) / b)

    def lifted(self, cutoff: Valuation | Rational) -> CurvePresentation:
        """The same curve over a field with another cutoff, memoised.

        The coefficients of A and B are single Novikov monomials, so nothing
        is lost by re-reading them at a higher cutoff.
        """
        cutoff = Valuation.coerce(cutoff)
        if cutoff == self.field.cutoff:
            return self
        cached = self._lifts.get(cutoff)
        if cached is None:
            field_ = self.field.with_cutoff(cutoff)
            A = {n: field_.scalar(c.terms) for n, c in self.A.items()}
            B = {n: field_.scalar(c.terms) for n, c in self.B.items()}
            roots, owners = _resolve_roots(self.name, field_, A, B)
            cached = CurvePresentation(field_, A, B, roots, owners, self.shift, self.name)
            self._lifts[cutoff] = cached
            _log.debug("Lifted %s to cutoff %s", self.name, cutoff)
        return cached


def _transfer(element: QuotientElement, ring: CurvePresentation) -> QuotientElement:
    """``element`` re-read in ``ring``, a lift of the ring it was built in."""
    if element.ring is ring:
        return element
    return QuotientElement(ring, {a: ring.field.scalar(c.terms) for a, c in element.terms.items()})


def _pole_atom(r: int, order: int) -> Atom:
    if order == 0:
        return _UNIT
    return (0, -order) if r == 0 else (r, order)


def _accumulate(out: dict[Atom, NovikovScalar], atom: Atom, value: NovikovScalar) -> None:
    total = out[atom] + value if atom in out else value
    if total.is_zero:
        out.pop(atom, None)
    else:
        out[atom] = total


def _poly_value(poly: Mapping[int, NovikovScalar], z: NovikovScalar) -> NovikovScalar:
    total = z.field.zero
    for n, c in poly.items():
        total = total + c * z**n
    return total


def _linear_root(name: str, poly: Mapping[int, NovikovScalar], owner: str) -> list:
    """The nonzero root of ``z^s (c₀ + c₁z)``; none for a monomial."""
    if len(poly) == 1:
        return []
    low, high = min(poly), max(poly)
    if len(poly) != 2 or high != low + 1:
        raise RootsNotResolvable(
            f"{owner}(z1) of {name or '<input>'} has exponents {sorted(poly)}; "
            "only monomials times a linear factor are supported"
        )
    return [-(poly[low] / poly[high])]


def _resolve_roots(
    name: str,
    field_: NovikovField,
    A: Mapping[int, NovikovScalar],
    B: Mapping[int, NovikovScalar],
) -> tuple[tuple[NovikovScalar, ...], tuple[str, ...]]:
    roots = [field_.zero]
    owners = ["origin"]
    for owner, poly in (("A", A), ("B", B)):
        for rho in _linear_root(name, poly, owner):
            roots.append(rho)
            owners.append(owner)

    for x, y in itertools.combinations(roots[1:], 2):
        if (x - y).is_zero:
            raise RootsNotResolvable(f"Roots {x} and {y} coincide to the cutoff")
    return tuple(roots), tuple(owners)


def present_curve(
    f: TropCurveInput,
    cutoff: Valuation | Rational = 50,
    phases: Mapping[str, Fraction] | None = None,
) -> CurvePresentation:
    """Splits ``f`` as ``z₂^m (A + B z₂)`` with Novikov coefficients.

    Each coefficient ``c = e^{log_norm + iπ·phase}`` becomes
    ``T^{2π·log_norm} e^{iπ·phase}``. ``phases`` binds phase symbols the curve
    leaves unbound.

    Raises:
        NotLinearInZ2: If the z₂-exponents are not ``{m, m + 1}``.
        RootsNotResolvable: If A or B is not a monomial times a linear factor,
            or two roots coincide.
        ConfigInvalid: If a phase symbol stays unbound.
    """
    levels = {beta[1] for beta in f.support}
    m = min(levels)
    if levels != {m, m + 1}:
        raise NotLinearInZ2(levels)

    exponents = []
    gens: list[Generator] = []
    for beta in f.support:
        v, extra = _novikov_exponent(f, f.log_norm(beta))
        exponents.append((beta, v))
        gens.extend(extra)
    unique = {gen.symbol: gen for gen in gens}
    field_ = NovikovField(f.basis, cutoff).extend(*unique.values())

    bound = f if not phases else _rebind(f, phases)
    A: dict[int, NovikovScalar] = {}
    B: dict[int, NovikovScalar] = {}
    for beta, v in exponents:
        phase = bound.bind_phase(f.phase(beta))
        coeff = field_.monomial(v, UnitCoefficient.exact(1, phase))
        (A if beta[1] == m else B)[beta[0]] = coeff

    roots, owners = _resolve_roots(f.name, field_, A, B)
    _log.debug("Presented %s with roots %s", f.name, [str(r) for r in roots[1:]])
    return CurvePresentation(field_, A, B, roots, owners, m, f.name)


def _rebind(f: TropCurveInput, phases: Mapping[str, Fraction]) -> TropCurveInput:
    merged = dict(f.phase_values)
    merged.update({k: Fraction(v) for k, v in phases.items()})
    return TropCurveInput(f.terms, f.basis, merged, f.name)


# * Elements


class QuotientElement:
    """An element of the quotient ring in partial-fraction normal form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CurvePresentation, terms: Mapping[Atom, NovikovScalar]) -> None:
        self.ring = ring
        self.terms: dict[Atom, NovikovScalar] = {a: c for a, c in terms.items() if not c.is_zero}

    @property
    def laurent_part(self) -> dict[int, NovikovScalar]:
        return {n: c for (r, n), c in self.terms.items() if r == 0}

    @property
    def pole_parts(self) -> dict[int, dict[int, NovikovScalar]]:
        out: dict[int, dict[int, NovikovScalar]] = {}
        for (r, j), c in self.terms.items():
            if r:
                out.setdefault(r, {})[j] = c
        return out

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"QuotientElement({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (r, j), c in sorted(self.terms.items()):
            basis = f"z1^{j}" if r == 0 else f"(z1 - rho{r})^-{j}"
            parts.append(f"({c})*{basis}")
        return " + ".join(parts)

    def _other(self, other: Any) -> QuotientElement:
        if isinstance(other, QuotientElement):
            return other
        return self.ring.atom(_UNIT, self.ring.field.coerce(other))

    def __add__(self, other: QuotientElement | NovikovScalar | Rational) -> QuotientElement:
        out = dict(self.terms)
        for atom, c in self._other(other).terms.items():
            _accumulate(out, atom, c)
        return QuotientElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> QuotientElement:
        return QuotientElement(self.ring, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other: QuotientElement | NovikovScalar | Rational) -> QuotientElement:
        return self + (-self._other(other))

    def __mul__(self, other: QuotientElement | NovikovScalar | Rational) -> QuotientElement:
        if not isinstance(other, QuotientElement):
            c = self.ring.field.coerce(other)
            return QuotientElement(self.ring, {a: x * c for a, x in self.terms.items()})

        out: dict[Atom, NovikovScalar] = {}
        for (a, ca), (b, cb) in itertools.product(self.terms.items(), other.terms.items()):
            cab = ca * cb
            for atom, c in self.ring.product(a, b).items():
                _accumulate(out, atom, cab * c)
        return QuotientElement(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> QuotientElement:
        if n < 0:
            raise ValueError("Negative powers are only defined for monomials; use reduce()")
        result = self.ring.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuotientElement):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, cutoff: Valuation | Rational) -> QuotientElement:
        return QuotientElement(self.ring, {a: c.truncate(cutoff) for a, c in self.terms.items()})

    def to_json(self) -> dict[str, Any]:
        return {
            "laurent": {str(n): c.to_json() for n, c in sorted(self.laurent_part.items())},
            "poles": {
                str(r): {str(j): c.to_json() for j, c in sorted(parts.items())}
                for r, parts in sorted(self.pole_parts.items())
            },
        }


def reduce(
    g: Mapping[Exponent, NovikovScalar | Rational], curve: CurvePresentation
) -> QuotientElement:
    """Normal form of the Laurent polynomial ``Σ c_m z₁^{m₁} z₂^{m₂}``.

    Raises:
        CutoffExhausted: If a series inverse does not terminate.
    """
    result = curve.zero()
    for m, c in g.items():
        result = result + curve.monomial(m) * curve.field.coerce(c)
    return result


def evaluate(
    g: QuotientElement | Mapping[Exponent, NovikovScalar | Rational],
    point: NovikovScalar | tuple[NovikovScalar, NovikovScalar],
    curve: CurvePresentation | None = None,
) -> NovikovScalar:
    """Value of ``g`` at a point of the curve.

    ``point`` is ``z₁`` or ``(z₁, z₂)``. Normal forms only use ``z₁``; raw
    Laurent polynomials use both coordinates, with ``z₂`` solved from the
    curve when omitted.

    Raises:
        AtPuncture: If ``z₁`` is zero or a root of A or B.
    """
    z1, z2 = point if isinstance(point, tuple) else (point, None)
    if isinstance(g, QuotientElement):
        ring = g.ring
        if z1.is_zero:
            raise AtPuncture("z1 = 0 is a puncture")
        total = ring.field.zero
        for (r, j), c in g.terms.items():
            if r == 0:
                total = total + c * z1**j
                continue
            offset = z1 - ring.roots[r]
            if offset.is_zero:
                raise AtPuncture(f"z1 = {ring.roots[r]} is a puncture")
            total = total + c * offset ** (-j)
        return total

    if z1.is_zero:
        raise AtPuncture("z1 = 0 is a puncture")
    if z2 is None:
        if curve is None:
            raise ValueError("A curve is needed to solve for z2")
        z2 = curve.z2_at(z1)
    if z2.is_zero:
        raise AtPuncture("z2 = 0 is a puncture")
    total = z1.field.zero
    for (m1, m2), c in g.items():
        total = total + z1.field.coerce(c) * z1**m1 * z2**m2
    return total


# * Filtrations and linear algebra


def monomial_key(m: Exponent) -> tuple:
    """Total degree first, then pure z₁ powers before mixed and z₂ ones."""
    m1, m2 = m
    return (abs(m1) + abs(m2), m2 != 0, abs(m2), m1 < 0, m2 < 0, m1, m2)


class Filtration(enum.Enum):
    LQ = "lq"
    """``−k < m₁, m₂ ≤ k``."""

    BOX = "box"
    """``|m₁|, |m₂| ≤ k``."""

    PANTS = "pants"
    """``m₁ ≥ −k``, ``m₂ ≥ −k``, ``m₁ + m₂ ≤ k``."""

    def contains(self, m: Exponent, k: int) -> bool:
        m1, m2 = m
        if self is Filtration.LQ:
            return -k < m1 <= k and -k < m2 <= k
        if self is Filtration.BOX:
            return abs(m1) <= k and abs(m2) <= k
        return m1 >= -k and m2 >= -k and m1 + m2 <= k

    def extent(self, k: int) -> int:
        """Largest ``|mᵢ|`` of an exponent in level ``k``."""
        return 2 * k if self is Filtration.PANTS else k


Constraint: TypeAlias = "Filtration | Callable[[Exponent, int], bool]"

CALLABLE_EXTENT = 2
"""Callable constraints are scanned in ``|m₁|, |m₂| ≤ CALLABLE_EXTENT·k + 1``."""


def _region(constraint: Any, k: int) -> list[Exponent]:
    if isinstance(constraint, Filtration):
        test, bound = constraint.contains, constraint.extent(k)
    else:
        test, bound = constraint, CALLABLE_EXTENT * k + 1
    pts = [
        (m1, m2)
        for m1 in range(-bound, bound + 1)
        for m2 in range(-bound, bound + 1)
        if test((m1, m2), k)
    ]
    return sorted(pts, key=monomial_key)


def span_bound(curve: CurvePresentation, region: Sequence[Exponent]) -> int:
    """Upper bound on the dimension of the span of ``{z^m : m ∈ region}``.

    The curve is a sphere punctured at z₁ = 0, z₁ = ∞ and the roots of A and
    B. Every ``z^m`` is a rational function with poles only there, so the span
    lies in the space of functions whose pole order at each puncture is at
    most the largest one over the region. On a sphere that space has
    dimension ``Σ orders + 1``.
    """
    if not region:
        return 0
    a_low, a_high, b_low, b_high = min(curve.A), max(curve.A), min(curve.B), max(curve.B)
    orders: list[Callable[[Exponent], int]] = [
        lambda m: -(m[0] + m[1] * (a_low - b_low)),
        lambda m: m[0] + m[1] * (a_high - b_high),
    ]
    for owner in curve.root_owner[1:]:
        sign = -1 if owner == "A" else 1
        orders.append(lambda m, s=sign: s * m[1])
    degree = sum(max(order(m) for m in region) for order in orders)
    return max(0, degree + 1)


@dataclass
class _Row:
    vec: dict[Atom, NovikovScalar]
    origin: dict[int, NovikovScalar]
    precision: float
    pivot: Atom | None = None


class _Echelon:
    """Rows normalised to 1 at a minimal-valuation pivot."""

    def __init__(self, ring: CurvePresentation) -> None:
        self.ring = ring
        self.rows: list[_Row] = []
        self.cutoff = ring.field.basis.approx(ring.field.cutoff)
        self.floor = self.cutoff
        """Lowest precision any decision was made at."""

    def _val(self, x: NovikovScalar) -> float:
        return self.ring.field.basis.approx(x.val())

    def _significant(self, row: _Row) -> list[tuple[float, Atom]]:
        return sorted(
            (self._val(c), atom) for atom, c in row.vec.items() if self._val(c) < row.precision
        )

    def reduce(self, row: _Row) -> _Row:
        for pivot_row in self.rows:
            assert pivot_row.pivot is not None
            c = row.vec.get(pivot_row.pivot)
            if c is None or c.is_zero:
                continue
            vc = self._val(c)
            row.precision = min(row.precision, pivot_row.precision + vc)
            for atom, x in pivot_row.vec.items():
                _accumulate(row.vec, atom, -(c * x))
            for index, x in pivot_row.origin.items():
                _accumulate(row.origin, index, -(c * x))
        return row

    def is_zero(self, row: _Row) -> bool:
        """Whether nothing below the row's precision survives.

        Raises:
            CutoffExhausted: If the row has no precision left to decide.
        """
        if row.precision <= 0:
            raise CutoffExhausted(
                f"Linear algebra ran out of precision ({row.precision:.3g}); raise the cutoff"
            )
        self.floor = min(self.floor, row.precision)
        return not self._significant(row)

    def insert(self, row: _Row) -> bool:
        self.reduce(row)
        if self.is_zero(row):
            return False

        v, pivot = self._significant(row)[0]
        inv = row.vec[pivot].inverse()
        row.vec = {a: c * inv for a, c in row.vec.items() if self._val(c) < row.precision}
        row.vec = {a: c for a, c in row.vec.items() if not c.is_zero}
        row.origin = {i: c * inv for i, c in row.origin.items()}
        row.precision = min(self.cutoff + min(v, 0.0), row.precision - v)
        row.pivot = pivot
        self.rows.append(row)
        return True


@dataclass
class FilteredSpan:
    """Span of the reduced monomials of one filtration level."""

    dim: int
    monomials: tuple[Exponent, ...]
    """Certificate: the monomials whose normal forms form a triangular basis."""

    pivots: tuple[Atom, ...]
    region: tuple[Exponent, ...]
    bound: int
    """See :func:`span_bound`; the dimension is exact once it reaches this."""

    echelon: _Echelon = field(repr=False)

    @property
    def certified(self) -> bool:
        return self.dim == self.bound

    @property
    def ring(self) -> CurvePresentation:
        """The presentation the elimination ran in, possibly lifted."""
        return self.echelon.ring

    def to_json(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "basis": [list(m) for m in self.monomials],
            "pivots": [list(p) for p in self.pivots],
            "region_size": len(self.region),
            "bound": self.bound,
            "certified": self.certified,
            "working_cutoff": self.ring.field.cutoff.to_json(),
        }


def _constraint_key(constraint: Any, k: int, lifts: int) -> Any:
    return (constraint if isinstance(constraint, Filtration) else id(constraint), k, lifts)


def _eliminate(ring: CurvePresentation, region: Sequence[Exponent], bound: int) -> FilteredSpan:
    echelon = _Echelon(ring)
    chosen: list[Exponent] = []
    for m in region:
        if len(chosen) == bound:
            break
        element = ring.monomial(m)
        if element.is_zero:
            raise CutoffExhausted(f"Normal form of z^{m} vanished below the cutoff")
        row = _Row(dict(element.terms), {len(chosen): ring.field.one}, echelon.cutoff)
        if echelon.insert(row):
            chosen.append(m)
    pivots = tuple(r.pivot for r in echelon.rows if r.pivot is not None)
    return FilteredSpan(len(chosen), tuple(chosen), pivots, tuple(region), bound, echelon)


def filtered_dim(
    curve: CurvePresentation,
    k: int,
    constraint: Any = Filtration.LQ,
    lifts: int | None = None,
) -> FilteredSpan:
    """Dimension of the span of ``{z^m : m in the constraint region}``.

    The returned certificate lists the monomials that were independent when
    the region was processed in :func:`monomial_key` order. A monomial is only
    called independent when a term survives below its row's precision, so
    reaching :func:`span_bound` proves the dimension. Otherwise, when the
    precision runs low, the elimination is repeated with a doubled working
    cutoff, at most ``lifts`` times (default :attr:`Precision.lift_limit`).

    Callable constraints are scanned in ``|m₁|, |m₂| ≤ 2k + 1``.

    Raises:
        CutoffExhausted: If the last working cutoff is too low to decide a
            dependency.
    """
    if lifts is None:
        lifts = curve.field.precision.lift_limit
    key = _constraint_key(constraint, k, lifts)
    cached = curve._spans.get(key)
    if cached is not None:
        return cached

    region = _region(constraint, k)
    bound = span_bound(curve, region)
    ring = curve
    for attempt in range(lifts + 1):
        try:
            span = _eliminate(ring, region, bound)
        except CutoffExhausted:
            if attempt == lifts:
                raise
        else:
            if span.certified or span.echelon.floor >= span.echelon.cutoff / 2:
                break
            if attempt == lifts:
                warnings.warn(
                    f"Span of {curve.name or '<input>'} at k={k} was decided with precision "
                    f"{span.echelon.floor:.3g} of the cutoff {span.echelon.cutoff:.3g}; "
                    "raise the cutoff",
                    CutoffWarning,
                    stacklevel=2,
                )
                break
        ring = curve.lifted(ring.field.cutoff * 2)
        _log.info("Lifting %s to cutoff %s for k=%d", curve.name, ring.field.cutoff, k)

    _log.debug(
        "Filtered span of %s at k=%d: %d of %d (bound %d)",
        curve.name,
        k,
        span.dim,
        len(region),
        bound,
    )
    curve._spans[key] = span
    return span


def _coordinates(
    span: FilteredSpan, element: QuotientElement
) -> tuple[bool, dict[int, NovikovScalar], float]:
    """Membership, coordinates over the certificate and their precision."""
    echelon = span.echelon
    precision = min(echelon.cutoff, element.ring.field.basis.approx(element.ring.field.cutoff))
    moved = _transfer(element, span.ring)
    row = echelon.reduce(_Row(dict(moved.terms), {}, precision))
    return echelon.is_zero(row), {i: -c for i, c in row.origin.items()}, row.precision


@dataclass(frozen=True)
class BasisCheck:
    ok: bool
    rank: int
    """Rank of the candidates' coordinates over the certificate monomials."""

    dim: int
    transition: tuple[dict[Exponent, NovikovScalar], ...]
    """Coordinates of each candidate over the certificate monomials."""

    def __bool__(self) -> bool:
        return self.ok


def verify_basis(
    curve: CurvePresentation,
    candidates: Sequence[QuotientElement],
    constraint: Any,
    k: int,
) -> BasisCheck:
    """Whether ``candidates`` form a basis of the filtered subspace.

    Raises:
        DimensionMismatch: If the number of candidates differs from the dimension.
    """
    span = filtered_dim(curve, k, constraint)
    if len(candidates) != span.dim:
        raise DimensionMismatch(span.dim, len(candidates))

    independent = _Echelon(span.ring)
    rank = 0
    transition = []
    inside = True
    for index, cand in enumerate(candidates):
        member, coords, precision = _coordinates(span, cand)
        inside = inside and member
        row = {span.monomials[i]: c for i, c in coords.items()}
        if independent.insert(_Row(dict(row), {index: span.ring.field.one}, precision)):
            rank += 1
        transition.append({m: curve.field.scalar(c.terms) for m, c in row.items()})
    return BasisCheck(inside and rank == span.dim, rank, span.dim, tuple(transition))


def structure_constants(
    curve: CurvePresentation,
    i1: int,
    j1: int,
    i2: int,
    j2: int,
    constraint: Any = Filtration.LQ,
    k: int = 1,
) -> dict[Exponent, NovikovScalar]:
    """``z₁^{i₁}z₂^{j₁} · z₁^{i₂}z₂^{j₂}`` over the certificate basis.

    ``k`` grows until the region holds both factors and the product.
    """
    contains = constraint.contains if isinstance(constraint, Filtration) else constraint
    product = (i1 + i2, j1 + j2)
    level = k
    while not all(contains(m, level) for m in ((i1, j1), (i2, j2), product)):
        level += 1
    span = filtered_dim(curve, level, constraint)
    element = curve.monomial((i1, j1)) * curve.monomial((i2, j2))
    member, coords, _ = _coordinates(span, element)
    if not member:
        raise CutoffExhausted(f"Product {product} did not reduce into the span at k={level}")
    out = {span.monomials[i]: curve.field.scalar(c.terms) for i, c in coords.items()}
    return {m: c for m, c in out.items() if not c.is_zero}


def hms_lq_candidates(
    curve: CurvePresentation,
    k: int,
    a_consts: Mapping[int, NovikovScalar | Rational] | None = None,
    b_consts: Mapping[int, NovikovScalar | Rational] | None = None,
) -> list[QuotientElement]:
    """``1``, ``z₁^i + B_i`` and ``z₂^i + A_i`` for ``0 < i ≤ k``, ``z₁^{−i}``
    and ``z₂^{−i}`` for ``0 < i < k``."""
    a_consts, b_consts = a_consts or {}, b_consts or {}
    out = [curve.one()]
    for i in range(1, k + 1):
        out.append(curve.monomial((i, 0)) + b_consts.get(i, 0))
        out.append(curve.monomial((0, i)) + a_consts.get(i, 0))
    for i in range(1, k):
        out.append(curve.monomial((-i, 0)))
        out.append(curve.monomial((0, -i)))
    return out


def hms_pants_candidates(curve: CurvePresentation, k: int) -> list[QuotientElement]:
    out = [curve.one()]
    for i in range(1, k + 1):
        out.append(curve.monomial((-i, 0)))
        out.append(curve.monomial((0, -i)))
    for j in range(1, k + 1):
        out.append(pop_module_table(0, j).element(curve))
    return out


# * Punctures and pole profiles


def puncture_for_end(end: CylindricalEndSpec, curve: CurvePresentation) -> Puncture:
    """The puncture approached along the skeleton ray of ``end``.

    Raises:
        RootsNotResolvable: If the root the end points to does not exist.
    """
    d1, d2 = end.ray_direction
    if d1 < 0:
        return Puncture("zero")
    if d1 > 0:
        return Puncture("infinity")
    index = curve.root_of("A" if d2 < 0 else "B")
    if index is None:
        raise RootsNotResolvable(f"End {end.index} points at a root {curve.name} does not have")
    return Puncture("root", index)


@dataclass(frozen=True)
class EndParametrization:
    """Points of the curve approaching a puncture, indexed by ``p ≥ 0``.

    The local parameter is ``t = T^{2π p}``; ``z₁`` is ``t``, ``t⁻¹`` or
    ``ρ + t`` and ``z₂`` is solved from the curve.
    """

    end: CylindricalEndSpec
    puncture: Puncture
    curve: CurvePresentation

    def local_parameter(self, p: Rational) -> NovikovScalar:
        return self.curve.field.T(Valuation.of({TWO_PI: Fraction(p)}))

    def point(self, p: Rational) -> tuple[NovikovScalar, NovikovScalar]:
        t = self.local_parameter(p)
        if self.puncture.kind == "zero":
            z1 = t
        elif self.puncture.kind == "infinity":
            z1 = t.inverse()
        else:
            z1 = self.curve.roots[self.puncture.root] + t
        return z1, self.curve.z2_at(z1)


def end_parametrization(
    curve: CurvePresentation, end: CylindricalEndSpec
) -> EndParametrization:
    return EndParametrization(end, puncture_for_end(end, curve), curve)


def _expand_atom(
    ring: CurvePresentation, atom: Atom, puncture: Puncture, order: int
) -> Iterator[tuple[int, NovikovScalar]]:
    """Local expansion ``Σ a_n t^n`` of one atom up to ``t^order``."""
    r, j = atom
    one = ring.field.one
    if puncture.kind == "zero":
        if r == 0:
            yield j, one
            return
        rho = ring.roots[r]
        # (z - ρ)^{-j} = (-ρ)^{-j} (1 - z/ρ)^{-j}
        base = (-rho) ** (-j)
        for n in range(order + 1):
            yield n, base * rho ** (-n) * math.comb(j + n - 1, n)
        return

    if puncture.kind == "infinity":
        if r == 0:
            yield -j, one
            return
        rho = ring.roots[r]
        for n in range(order + 1):
            if j + n > order:
                break
            yield j + n, rho**n * math.comb(j + n - 1, n)
        return

    rho = ring.roots[puncture.root]
    if r == puncture.root:
        yield -j, one
        return
    if r == 0 and j >= 0:
        for i in range(j + 1):
            yield i, rho ** (j - i) * math.comb(j, i)
        return
    # (t + δ)^{-b} with δ = ρ - ρ_r
    b = -j if r == 0 else j
    delta = rho - ring.roots[r]
    base = delta ** (-b)
    delta_inv = delta.inverse()
    for n in range(order + 1):
        sign = -1 if n % 2 else 1
        yield n, base * delta_inv**n * (sign * math.comb(b + n - 1, n))


def pole_profile(
    g: QuotientElement, ep: EndParametrization, order: int = EXPANSION_ORDER
) -> tuple[int, NovikovScalar]:
    """Pole order of ``g`` at the puncture of ``ep`` and its leading coefficient.

    The order is w with ``val(g(ρ(p))) = −2πwp + O(1)``; it is negative
    when ``g`` vanishes at the puncture.

    Raises:
        ZeroFunction: If ``g`` is zero, or vanishes to every examined order.
    """
    if g.is_zero:
        raise ZeroFunction("The zero function has no pole profile")

    coeffs: dict[int, NovikovScalar] = {}
    for atom, c in g.terms.items():
        for n, a in _expand_atom(g.ring, atom, ep.puncture, order):
            if n <= order:
                coeffs[n] = coeffs[n] + c * a if n in coeffs else c * a

    for n in sorted(coeffs):
        if not coeffs[n].is_zero:
            return -n, coeffs[n]
    raise ZeroFunction(f"No nonzero term up to order {order} at {ep.puncture}")


# * Pair of pants


class SignedMonomial(NamedTuple):
    sign: int
    m1: int
    m2: int

    def element(self, curve: CurvePresentation) -> QuotientElement:
        return curve.monomial((self.m1, self.m2)) * self.sign

    def __str__(self) -> str:
        return f"{'-' if self.sign < 0 else ''}z1^{self.m1}*z2^{self.m2}"


def pop_module_table(j0: int, j1: int) -> SignedMonomial:
    """Leading function of the diagonal-end module generator from sheet j0 to j1.

    Raises:
        NegativeGap: If ``j1 < j0``.
    """
    if j1 < j0:
        raise NegativeGap(j0, j1)
    l, odd = divmod(j1 - j0, 2)
    if not odd:
        return SignedMonomial(1, l, l)
    if j0 % 2 == 0:
        return SignedMonomial(1, l + 1, l)
    return SignedMonomial(-1, l, l + 1)


def solve_pop_coefficients(
    rhs_constant: Rational = 1, exact_c: bool = False, xi2: Rational | None = None
) -> tuple[sympy.Expr, sympy.Expr]:
    """Solves ``c·(−c z₂ + a₁) = −z₂ + rhs`` with ``z₂ = ξ₂t``, ``c = 1 + O(t⁻²)``.

    Coefficients of t¹, t⁰ and t⁻¹ are matched; ``exact_c`` pins ``c = 1``.
    ``ξ₂`` stays symbolic unless ``xi2`` binds it.

    Raises:
        SingularSystem: If the matched coefficients do not determine a unique
            solution with ``c = 1 + O(t⁻²)``, as happens for ``xi2 = 0``.
    """
    t, a1, c0, c2 = sympy.symbols("t a1 c0 c2")
    xi2_ = sympy.Symbol("xi2") if xi2 is None else sympy.Rational(str(Fraction(xi2)))
    c = sympy.Integer(1) if exact_c else c0 + c2 / t**2
    z2 = xi2_ * t
    rhs = sympy.Rational(str(Fraction(rhs_constant)))
    residual = sympy.expand((c * (-c * z2 + a1) - (-z2 + rhs)) * t**3)
    poly = sympy.Poly(residual, t)
    equations = [poly.coeff_monomial(t**n) for n in (4, 3, 2)]
    unknowns = [a1] if exact_c else [a1, c0, c2]
    solutions = sympy.solve([e for e in equations if e != 0], unknowns, dict=True)
    admissible = [s for s in solutions if exact_c or s.get(c0) == 1]
    if len(admissible) != 1:
        raise SingularSystem(f"Expected one admissible solution; got {solutions}")
    sol = admissible[0]
    c_value = sympy.Integer(1) if exact_c else sympy.simplify(c.subs(sol).subs(t, 1))
    return sympy.simplify(sol[a1]), c_value


# * Parsing


def parse_laurent(text: str, curve: CurvePresentation) -> Laurent:
    """Reads a Laurent polynomial in ``z1``, ``z2`` with rational coefficients.

    The symbol ``Q`` stands for the curve's cross ratio.

    Raises:
        ParseError: On malformed input or unsupported symbols.
    """
    z1, z2, q = sympy.symbols("z1 z2 Q")
    try:
        expr = sympy.expand(sympy.sympify(text, locals={"z1": z1, "z2": z2, "Q": q}))
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ParseError(f"Cannot parse Laurent polynomial {text!r}") from exc

    extra = expr.free_symbols - {z1, z2, q}
    if extra:
        raise ParseError(f"Unsupported symbols {sorted(map(str, extra))} in {text!r}")

    out: Laurent = {}
    field_ = curve.field
    cross = curve.cross_ratio if q in expr.free_symbols else None
    for term in sympy.Add.make_args(expr):
        powers = term.as_powers_dict()
        m = (int(powers.get(z1, 0)), int(powers.get(z2, 0)))
        nq = int(powers.get(q, 0))
        rest = term / (z1 ** m[0] * z2 ** m[1] * q**nq)
        if not rest.is_Rational:
            raise ParseError(f"Coefficient {rest} of {text!r} is not rational")
        coeff = field_.rational(Fraction(int(rest.p), int(rest.q)))
        if nq:
            assert cross is not None
            coeff = coeff * cross**nq
        out[m] = out[m] + coeff if m in out else coeff
    return out


def end_of(f: TropCurveInput, index: int) -> CylindricalEndSpec:
    """Raises:
    ParseError: If ``index`` is out of range."""
    ends = cylindrical_ends(f)
    if not 0 <= index < len(ends):
        raise ParseError(f"End index {index} out of range 0..{len(ends) - 1}")
    return ends[index]
