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

"""Path integrals of the canonical and angular 1-forms, disk energies and
the disk-obstruction criterion.

On an end ``(α, r)`` the canonical 1-form and the angular 1-form are

    λ_α = (θ_α − arg r) dp_α + (p_α^⊥ − log|r|) dθ_α^⊥
    η_α = −(p_α^⊥ − log|r|) dp_α + (θ_α − arg r) dθ_α^⊥

Paths are piecewise linear in the universal cover, so each segment integral
is the midpoint value of the coefficient times the increment, which is exact.
Coordinates may be floats or sympy expressions; sympy paths give exact
results in π and in the curve parameters.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence, Union

import sympy

from tropwrap.exactnum import MpmathGenerator, NovikovField, NovikovScalar, Valuation
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
from tropwrap.hamiltonian import FloerGenerator, alpha_coordinates, from_alpha_coordinates
from tropwrap.tropical import CylindricalEndSpec, TropCurveInput, cylindrical_ends
from tropwrap.types import AlphaCoords, Exponent, GenKind, TorusCoords

__all__ = [
    "Real",
    "EndFrame",
    "LiftedPath",
    "BoundaryClass",
    "DiskArc",
    "DiskVertex",
    "DiskBoundaryData",
    "Verdict",
    "ObstructionResult",
    "wrapping_number",
    "boundary_class",
    "integral_lambda",
    "integral_eta",
    "reduce_mod_4pi2",
    "is_zero_mod_4pi2",
    "end_loop",
    "kernel_basis",
    "obstruction_check",
    "forbidden_phis",
    "boundary_certificate",
    "disk_energy",
    "rescale_weight",
]

_log = logging.getLogger(__name__)

Real = Union[float, sympy.Expr]
TOLERANCE = 1e-9
FOUR_PI_SQ = 4 * math.pi**2


def _exact(*values: Any) -> bool:
    return any(isinstance(v, sympy.Basic) for v in values)


def _pi(exact: bool) -> Real:
    return sympy.pi if exact else math.pi


def _same(a: Real, b: Real) -> bool:
    if _exact(a, b):
        diff = sympy.simplify(a - b)
        if not diff.free_symbols:
            return abs(float(diff)) < TOLERANCE
        return diff == 0
    return abs(a - b) < TOLERANCE


def _as_integer(ratio: Real) -> int | None:
    if _exact(ratio):
        ratio = sympy.nsimplify(sympy.simplify(ratio))
        if ratio.is_Integer:
            return int(ratio)
        if ratio.free_symbols:
            return None
        ratio = float(ratio)
    nearest = round(ratio)
    return nearest if abs(ratio - nearest) < TOLERANCE else None


# * Frames and paths


@dataclass(frozen=True)
class EndFrame:
    """The data ``(α, log|r|, arg r)`` the 1-forms of one end are built from.

    ``arg_r`` is in radians and is a fixed real lift; integrals taken in the
    same frame are only comparable when they share this lift.
    """

    alpha: Exponent
    log_r: Real = 0.0
    arg_r: Real = 0.0

    @classmethod
    def from_end(
        cls, end: CylindricalEndSpec, f: TropCurveInput, exact: bool = False
    ) -> EndFrame:
        """The frame of the cylinder ``end`` is asymptotic to.

        Raises:
            ConfigInvalid: If ``exact`` is false and the end's phase uses an
                unbound phase parameter.
        """
        if exact:
            return cls(end.alpha, end.log_r.to_sympy(), f.phase_expr(end.cylinder_phase))
        return cls(
            end.alpha,
            f.approx(end.log_r),
            math.pi * float(f.bind_phase(end.cylinder_phase)),
        )

    @classmethod
    def global_frame(cls) -> EndFrame:
        """``α = (1, 0)``, ``r = 1``: η becomes ``p₁dp₂ + θ₂dθ₁``."""
        return cls((1, 0), 0, 0)

    @property
    def norm_sq(self) -> int:
        return self.alpha[0] ** 2 + self.alpha[1] ** 2


@dataclass(frozen=True)
class LiftedPath:
    """A piecewise-linear path in the universal cover ``(p₁, θ₁, p₂, θ₂)``."""

    points: tuple[TorusCoords, ...]
    frame: EndFrame

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("A path needs at least one point")
        for point in self.points:
            for value in point:
                if not _exact(value) and not math.isfinite(value):
                    raise ValueError(f"Non-finite coordinate in {point}")

    @classmethod
    def of(cls, points: Iterable[Sequence[Real]], frame: EndFrame) -> LiftedPath:
        return cls(tuple(TorusCoords(*p) for p in points), frame)

    @classmethod
    def from_alpha(cls, points: Iterable[Sequence[Real]], frame: EndFrame) -> LiftedPath:
        """Builds a path from points given in the frame's adapted coordinates."""
        return cls(
            tuple(from_alpha_coordinates(frame.alpha, AlphaCoords(*p)) for p in points), frame
        )

    @property
    def exact(self) -> bool:
        return any(_exact(*p) for p in self.points)

    def alpha_points(self) -> list[AlphaCoords]:
        return [alpha_coordinates(self.frame.alpha, p) for p in self.points]

    def reversed(self) -> LiftedPath:
        return LiftedPath(self.points[::-1], self.frame)

    def then(self, other: LiftedPath) -> LiftedPath:
        """Concatenation; ``other`` must start where this path ends."""
        if not all(_same(a, b) for a, b in zip(self.points[-1], other.points[0])):
            raise NotALoop(f"Cannot join {self.points[-1]} to {other.points[0]}")
        return LiftedPath(self.points + other.points[1:], self.frame)

    def in_frame(self, frame: EndFrame) -> LiftedPath:
        return LiftedPath(self.points, frame)


def _integrate(coeff: Callable[[AlphaCoords], Real], var: str, pts: list[AlphaCoords]) -> Real:
    total: Real = 0
    for a, b in zip(pts, pts[1:]):
        total += (coeff(a) + coeff(b)) / 2 * (getattr(b, var) - getattr(a, var))
    return total


def _check_p_loop(path: LiftedPath) -> None:
    first, last = path.points[0], path.points[-1]
    if not (_same(first.p1, last.p1) and _same(first.p2, last.p2)):
        raise NotALoop(f"Path ends at p = ({last.p1}, {last.p2}), not ({first.p1}, {first.p2})")


def wrapping_number(path: LiftedPath) -> int:
    """The integer w with ``θ_α(end) − θ_α(start) = 2πw``.

    Raises:
        NotALoop: If the endpoints have different p-coordinates.
        NonIntegralWrap: If ``Δθ_α / 2π`` is not within 10⁻⁹ of an integer.
    """
    _check_p_loop(path)
    pts = path.alpha_points()
    ratio = (pts[-1].theta_alpha - pts[0].theta_alpha) / (2 * _pi(path.exact))
    w = _as_integer(ratio)
    if w is None:
        raise NonIntegralWrap(ratio)
    return w


@dataclass(frozen=True)
class BoundaryClass:
    """A class in ``H₁(L)`` modulo the circle of one end."""

    wrapping: int
    end: EndFrame
    residual_class: tuple[int, ...] = ()
    """Coordinates over a basis of the remaining homology, declared per curve."""


def boundary_class(path: LiftedPath, residual: Sequence[int] = ()) -> BoundaryClass:
    return BoundaryClass(wrapping_number(path), path.frame, tuple(residual))


def integral_lambda(path: LiftedPath) -> Real:
    """``∫λ_α − 2πw·p_α,₀``, which depends only on the class of the loop.

    Raises:
        NotALoop: If the endpoints have different p-coordinates.
        NonIntegralWrap: If the wrapping number is not an integer.
    """
    w = wrapping_number(path)
    frame, pts = path.frame, path.alpha_points()
    value = _integrate(lambda x: x.theta_alpha - frame.arg_r, "p_alpha", pts)
    value += _integrate(lambda x: x.p_perp - frame.log_r, "theta_perp", pts)
    value -= 2 * _pi(path.exact) * w * pts[0].p_alpha
    return sympy.simplify(value) if path.exact else value


def integral_eta(
    path: LiftedPath, adjusted: bool = False, reference: AlphaCoords | None = None
) -> Real:
    """``∫η_α − 2πw·θ_α,₀^⊥`` reduced modulo 4π².

    With ``adjusted`` the path may close up only modulo the end: its endpoints
    share θ_α, their θ_α^⊥ differ by 2πw, and θ_α,₀^⊥ is measured from
    ``reference`` (a point on the end, θ^⊥ = 0 when omitted). Ends with
    ``|α| > 1`` need this mode.

    Raises:
        NotALoop: If the endpoints differ in p, or in θ_α in adjusted mode.
        NonIntegralWrap: If the wrapping number is not an integer.
        DiagonalNeedsAdjustedMode: For ``|α| > 1`` without ``adjusted``.
    """
    frame, pts, exact = path.frame, path.alpha_points(), path.exact
    pi = _pi(exact)
    if adjusted:
        _check_p_loop(path)
        if not _same(pts[0].theta_alpha, pts[-1].theta_alpha):
            raise NotALoop("Adjusted paths must start and end at the same θ_α")
        ratio = (pts[-1].theta_perp - pts[0].theta_perp) / (2 * pi)
        w = _as_integer(ratio)
        if w is None:
            raise NonIntegralWrap(ratio)
        theta0 = pts[0].theta_perp - (reference.theta_perp if reference is not None else 0)
    else:
        if frame.norm_sq > 1:
            raise DiagonalNeedsAdjustedMode(
                f"|α|² = {frame.norm_sq} for α = {frame.alpha}; use adjusted=True"
            )
        w = wrapping_number(path)
        theta0 = pts[0].theta_perp

    value = _integrate(lambda x: -(x.p_perp - frame.log_r), "p_alpha", pts)
    value += _integrate(lambda x: x.theta_alpha - frame.arg_r, "theta_perp", pts)
    value -= 2 * pi * w * theta0
    return reduce_mod_4pi2(value)


def reduce_mod_4pi2(value: Real) -> Real:
    """Representative of ``value`` in ``[0, 4π²)``.

    Sympy values keep their symbolic part; only the rational coefficient of
    π² is reduced modulo 4.
    """
    if not _exact(value):
        rem = math.fmod(value, FOUR_PI_SQ)
        if rem < 0:
            rem += FOUR_PI_SQ
        return 0.0 if min(rem, FOUR_PI_SQ - rem) < TOLERANCE else rem

    expr = sympy.expand(value)
    coeff = expr.coeff(sympy.pi, 2)
    rest = sympy.expand(expr - coeff * sympy.pi**2)
    const, symbolic = sympy.expand(coeff).as_coeff_Add()
    return sympy.expand((const % 4 + symbolic) * sympy.pi**2 + rest)


def is_zero_mod_4pi2(value: Real) -> bool:
    reduced = reduce_mod_4pi2(value)
    if _exact(reduced):
        return bool(sympy.simplify(reduced) == 0)
    return abs(reduced) < TOLERANCE


# * Obstruction


def end_loop(
    end: CylindricalEndSpec,
    f: TropCurveInput,
    turns: int = 1,
    start: TorusCoords | None = None,
    frame: EndFrame | None = None,
) -> LiftedPath:
    """A loop around ``end`` based at ``start`` (the origin by default).

    The path runs straight to the end's cylinder at ``p_α = 0``, turns
    ``turns`` times around its θ_α^⊥-circle and returns to the base point
    translated by ``2π·turns·α``. Coordinates are exact sympy values; the
    integrals are taken in ``frame``, the global frame by default.
    """
    zero = sympy.Integer(0)
    base = start or TorusCoords(zero, zero, zero, zero)
    own = EndFrame.from_end(end, f, exact=True)
    on_end = from_alpha_coordinates(end.alpha, AlphaCoords(zero, own.arg_r, own.log_r, zero))
    entry = TorusCoords(
        on_end.p1, base.theta1 + on_end.theta1, on_end.p2, base.theta2 + on_end.theta2
    )
    shift1, shift2 = 2 * sympy.pi * turns * end.alpha[0], 2 * sympy.pi * turns * end.alpha[1]
    exit_ = entry._replace(theta1=entry.theta1 + shift1, theta2=entry.theta2 + shift2)
    back = base._replace(theta1=base.theta1 + shift1, theta2=base.theta2 + shift2)
    return LiftedPath((base, entry, exit_, back), frame or EndFrame.global_frame())


def kernel_basis(f: TropCurveInput) -> list[tuple[int, ...]]:
    """Integer classes ``n`` with ``Σ n_α α = 0``, modulo the class of all ends."""
    ends = cylindrical_ends(f)
    if len(ends) < 3:
        return []
    matrix = sympy.Matrix([[e.alpha[0] for e in ends[:-1]], [e.alpha[1] for e in ends[:-1]]])
    out = []
    for vec in matrix.nullspace():
        scale = sympy.ilcm(*(sympy.fraction(x)[1] for x in vec))
        ints = [int(x * scale) for x in vec]
        g = math.gcd(*ints)
        out.append(tuple(x // g for x in ints) + (0,))
    return out


class Verdict(enum.Enum):
    NO_DISK = "no disk with this boundary class"
    NO_DISK_GENERIC = "no disk for generic parameter values"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ObstructionResult:
    value: Real
    """The η-integral modulo 4π²."""

    verdict: Verdict
    trivial: bool = False
    """Whether the class is a multiple of the class of all ends, i.e. zero."""

    classes: tuple[int, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "class": list(self.classes),
            "value": str(self.value),
            "value_float": _to_float(self.value),
            "verdict": self.verdict.value,
            "trivial": self.trivial,
        }


def _to_float(value: Real) -> float | None:
    if _exact(value) and value.free_symbols:
        return None
    return float(value)


def obstruction_check(
    f: TropCurveInput, class_coeffs: Mapping[int, int] | Sequence[int]
) -> ObstructionResult:
    """The η-integral of the class ``Σ n_α·[S¹_α]`` and what it rules out.

    The class is realised by concatenating loops around the ends, so the
    value is exact in π and in any unbound phase parameter.

    Raises:
        NotNullhomotopic: If ``Σ n_α α ≠ 0``.
    """
    ends = cylindrical_ends(f)
    if isinstance(class_coeffs, Mapping):
        coeffs = tuple(int(class_coeffs.get(e.index, 0)) for e in ends)
    else:
        coeffs = tuple(int(n) for n in class_coeffs)
        if len(coeffs) != len(ends):
            raise DimensionMismatch(len(ends), len(coeffs))

    total = (
        sum(n * e.alpha[0] for n, e in zip(coeffs, ends)),
        sum(n * e.alpha[1] for n, e in zip(coeffs, ends)),
    )
    if total != (0, 0):
        raise NotNullhomotopic(total)

    trivial = len(set(coeffs)) == 1
    if not any(coeffs):
        return ObstructionResult(sympy.Integer(0), Verdict.INCONCLUSIVE, True, coeffs)

    path: LiftedPath | None = None
    for end, n in zip(ends, coeffs):
        for _ in range(abs(n)):
            start = path.points[-1] if path is not None else None
            loop = end_loop(end, f, turns=1 if n > 0 else -1, start=start)
            path = loop if path is None else path.then(loop)
    assert path is not None

    value = integral_eta(path)
    _log.debug("η-integral of class %s: %s", coeffs, value)
    if is_zero_mod_4pi2(value):
        verdict = Verdict.INCONCLUSIVE
    elif value.free_symbols:
        verdict = Verdict.NO_DISK_GENERIC
    else:
        verdict = Verdict.NO_DISK
    return ObstructionResult(value, verdict, trivial, coeffs)


def forbidden_phis(paths: Iterable[LiftedPath], adjusted: bool = False) -> list[float]:
    """Morse angles ruled out by the supplied boundary classes, in ``[0, 2π)``.

    Each class of wrapping number ``w ≠ 0`` forbids ``−∫η / 2πw`` modulo
    ``2π / |w|``; classes with ``w = 0`` forbid nothing.
    """
    out: set[float] = set()
    for path in paths:
        w = wrapping_number(path)
        if w == 0:
            continue
        value = float(integral_eta(path, adjusted=adjusted))
        base = -value / (2 * math.pi * w)
        for m in range(abs(w)):
            out.add(round((base + 2 * math.pi * m / abs(w)) % (2 * math.pi), 12))
    return sorted(out)


_CERTIFICATES: dict[str, dict[str, Any]] = {
    "lq": {
        "curve": "lq",
        "divisors": ["z1 = z2", "z1*z2 = q"],
        "statement": (
            "every boundary class of a disk meets both divisors with total "
            "intersection number zero, which bounds the topology of the boundary"
        ),
    },
    "pants": {
        "curve": "pants",
        "divisors": ["z1 = z2"],
        "statement": (
            "no nontrivial class of L_pants is nullhomotopic in the torus, so "
            "the boundary topology is bounded for every disk"
        ),
    },
}


def boundary_certificate(name: str) -> dict[str, Any] | None:
    """The documented topological bound for a built-in curve, if there is one."""
    cert = _CERTIFICATES.get(name)
    return None if cert is None else dict(cert)


# * Disk energy


@dataclass(frozen=True)
class DiskArc:
    """One boundary arc, running from vertex s to vertex s + 1."""

    lambda_integral: Real
    g_start: Real
    g_end: Real
    start: AlphaCoords | None = None
    end: AlphaCoords | None = None

    @classmethod
    def from_path(cls, path: LiftedPath, g: Callable[[AlphaCoords], Real]) -> DiskArc:
        pts = path.alpha_points()
        return cls(integral_lambda(path), g(pts[0]), g(pts[-1]), pts[0], pts[-1])


@dataclass(frozen=True)
class DiskVertex:
    point: AlphaCoords
    j: int
    """Signed wrap level of the corner."""

    p_alpha: Real | None = None

    @property
    def p(self) -> Real:
        return self.point.p_alpha if self.p_alpha is None else self.p_alpha


@dataclass(frozen=True)
class DiskBoundaryData:
    arcs: tuple[DiskArc, ...]
    vertices: tuple[DiskVertex, ...] = field(default=())

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> DiskBoundaryData:
        """Reads ``{"arcs": [...], "vertices": [...]}``.

        Raises:
            ParseError: On schema violations.
        """
        try:
            arcs = tuple(
                DiskArc(
                    float(a.get("lambda", 0)),
                    float(a.get("g_start", 0)),
                    float(a.get("g_end", 0)),
                    AlphaCoords(*map(float, a["start"])) if "start" in a else None,
                    AlphaCoords(*map(float, a["end"])) if "end" in a else None,
                )
                for a in obj["arcs"]
            )
            vertices = tuple(
                DiskVertex(
                    AlphaCoords(*map(float, v["point"])),
                    int(v.get("j", 0)),
                    float(v["p_alpha"]) if "p_alpha" in v else None,
                )
                for v in obj["vertices"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"Invalid disk boundary data: {exc}") from exc
        return cls(arcs, vertices)


def disk_energy(data: DiskBoundaryData) -> Real:
    """``Σ ∫λ + Σ (g_s(x_{s+1}) − g_s(x_s)) + 2π Σ j_s p_s``.

    Raises:
        InconsistentCycle: If the arcs and vertices do not form a cycle.
    """
    arcs, vertices = data.arcs, data.vertices
    if len(arcs) != len(vertices) or not arcs:
        raise InconsistentCycle(f"{len(arcs)} arcs for {len(vertices)} vertices")

    n = len(arcs)
    for s, arc in enumerate(arcs):
        for point, vertex in ((arc.start, vertices[s]), (arc.end, vertices[(s + 1) % n])):
            if point is not None and not all(_same(a, b) for a, b in zip(point, vertex.point)):
                raise InconsistentCycle(f"Arc {s} does not meet vertex at {vertex.point}")

    exact = _exact(*(a.lambda_integral for a in arcs), *(v.p for v in vertices))
    energy: Real = sum((a.lambda_integral + a.g_end - a.g_start for a in arcs), 0)
    energy += 2 * _pi(exact) * sum(v.j * v.p for v in vertices)
    return sympy.simplify(energy) if exact else energy


def rescale_weight(
    generator: FloerGenerator,
    g0: Real | Fraction | Callable[[AlphaCoords], Any],
    g1: Real | Fraction | Callable[[AlphaCoords], Any],
    field: NovikovField,
) -> NovikovScalar:
    """``T^{g₀(x) − g₁(x) + 2πj·p_α(x)}`` for a cylindrical generator x.

    ``2π·p_α`` enters the valuation as its own generator, so the result stays
    exact in p_α.

    Raises:
        InteriorGeneratorHasNoRescale: For interior generators.
    """
    if generator.kind is GenKind.INTERIOR or generator.coords is None:
        raise InteriorGeneratorHasNoRescale(generator.label)

    coords = generator.coords
    diff = (g0(coords) if callable(g0) else g0) - (g1(coords) if callable(g1) else g1)
    if isinstance(diff, sympy.Basic):
        diff = Fraction(str(diff)) if diff.is_Rational else float(diff)
    if isinstance(diff, float):
        diff = Fraction.from_float(diff)
    valuation = Valuation.const(Fraction(diff))

    j = generator.j or 0
    if j:
        symbol = f"2pi*p[{generator.label}]"
        p = coords.p_alpha
        gen = MpmathGenerator(symbol, lambda iv, p=p: 2 * iv.pi * iv.mpf(p), label=f"2π·{p!r}")
        field = field.extend(gen)
        valuation = valuation + Valuation.symbol(symbol, j)
    return field.T(valuation)
