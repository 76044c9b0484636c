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

"""Wrapping Hamiltonian, Morse perturbation and Floer generator enumeration.

On a cylindrical end with normal α the wrapping Hamiltonian is, in the
adapted coordinates ``(p_α, θ_α, p_α^⊥, θ_α^⊥)``,

    (2π + 2R⁻¹|a_α|)·χ(p_α)·p_α + R⁻¹(a_α p_α + a_α^⊥ p_α^⊥)

with χ rising from 0 to 1 on ``[R² + 3R, R² + 4R]``. Its time-k flow turns
θ_α by ``h(p_α)``; generators sit where ``h(p_α) = 2jπ``, at the minimum
(type e) or maximum (type f) of the Morse term ``μ_φ(θ) = −cos(θ − φ)``.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping, Sequence, Union

import mpmath
import numpy as np
from typing_extensions import Literal, TypedDict, Unpack

from tropwrap.exceptions import (
    BadInterval,
    ConfigInvalid,
    IndexRangeDiscrepancy,
    NonMonotone,
    OutOfRange,
)
from tropwrap.tropical import (
    CylindricalEndSpec,
    TropCurveInput,
    coefficient_gap,
    cylindrical_ends,
    genus_and_ends,
)
from tropwrap.types import AlphaCoords, GenKind, GenType, SheetLabel, TorusCoords

__all__ = [
    "ChiProfile",
    "PhiPolicy",
    "PerturbationConfig",
    "FloerGenerator",
    "bump",
    "morse_mu",
    "alpha_coordinates",
    "from_alpha_coordinates",
    "a_components",
    "ham_slope",
    "slope_range",
    "attained_levels",
    "admissible_levels",
    "solve_wrap_levels",
    "enumerate_generators",
    "flow_point",
    "explicit_g",
]

_log = logging.getLogger(__name__)

SAMPLES = 4096
TOLERANCE = 1e-12
"""Relative tolerance of the wrap-level bisection, in units of 2π."""

_MP = mpmath.MPContext()
_MP.dps = 30


# * Cutoff profiles


def _sigma_np(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, np.exp(-1.0 / safe), 0.0)


class ChiProfile(enum.Enum):
    """Monotone cutoff χ: [0, 1] → [0, 1] used by :func:`bump`."""

    EXPONENTIAL = "exponential"
    """``σ(x) / (σ(x) + σ(1 − x))``, ``σ(x) = e^{−1/x}``; C^∞ with sup χ′ = 2."""

    SMOOTHSTEP = "smoothstep"
    """``3x² − 2x³``; C¹ with sup χ′ = 3/2."""

    @property
    def sup_derivative(self) -> float:
        return 2.0 if self is ChiProfile.EXPONENTIAL else 1.5

    def vector(self, x: np.ndarray) -> np.ndarray:
        x = np.clip(x, 0.0, 1.0)
        if self is ChiProfile.SMOOTHSTEP:
            return x * x * (3.0 - 2.0 * x)
        a, b = _sigma_np(x), _sigma_np(1.0 - x)
        return a / (a + b)

    def mp(self, x: Any) -> Any:
        """Same profile in 30-digit mpmath arithmetic, for the bisection."""
        if x <= 0:
            return _MP.zero
        if x >= 1:
            return _MP.one
        if self is ChiProfile.SMOOTHSTEP:
            return x * x * (3 - 2 * x)
        a, b = _MP.exp(-1 / x), _MP.exp(-1 / (1 - x))
        return a / (a + b)


def bump(r1: float, r2: float, p: float, profile: ChiProfile = ChiProfile.EXPONENTIAL) -> float:
    """``χ((p − R1) / (R2 − R1))``: 0 below ``r1``, 1 above ``r2``.

    Raises:
        BadInterval: If ``r1 >= r2``.
    """
    if not r1 < r2:
        raise BadInterval(r1, r2)
    return float(profile.vector(np.asarray((p - r1) / (r2 - r1), dtype=float)))


def morse_mu(phi: float, theta: float) -> float:
    return -math.cos(theta - phi)


# * Configuration


class PhiPolicy(enum.Enum):
    AUTO = "auto"
    """φ_j = 2π·frac(√p_j) with p_j the j-th prime."""


def _primes() -> Iterator[int]:
    for n in itertools.count(2):
        if all(n % d for d in range(2, int(n**0.5) + 1)):
            yield n


def auto_phis(count: int) -> tuple[float, ...]:
    return tuple(
        2 * math.pi * (math.sqrt(p) % 1.0) for p in itertools.islice(_primes(), count)
    )


class _ConfigKwargs(TypedDict, total=False):
    k0: int
    chi_profile: ChiProfile
    bound_factor: float
    denominator_bound: int


@dataclass(frozen=True)
class PerturbationConfig:
    """Perturbation data ``R, k, (a₁, a₂), {φ_α}`` of the wrapping Hamiltonian.

    Build it with :meth:`create`, which resolves the φ policy against the ends
    of a curve and validates everything; direct construction skips checks.
    """

    R: float
    k1: int
    """Wrapping number of the Hamiltonian whose generators are enumerated."""

    a: tuple[float, float]
    """Unit translation vector."""

    phi: tuple[float, ...]
    """Morse angle φ_α per end, indexed like :func:`~tropwrap.tropical.cylindrical_ends`."""

    k0: int = 0
    """Smaller wrapping number of a continuation pair ``(k0, k1)``."""

    chi_profile: ChiProfile = ChiProfile.EXPONENTIAL
    bound_factor: float = 1.0
    """R must exceed ``bound_factor · k · M``."""

    denominator_bound: int = 12
    ends: tuple[CylindricalEndSpec, ...] = field(default=(), compare=False, repr=False)

    @property
    def k(self) -> int:
        return self.k1

    @classmethod
    def create(
        cls,
        f: TropCurveInput,
        *,
        R: float,
        k: int,
        a: Sequence[float],
        phi: Union[Literal["auto"], PhiPolicy, Sequence[float], Mapping[int, float]] = "auto",
        **kw: Unpack[_ConfigKwargs],
    ) -> PerturbationConfig:
        """Resolves ``phi`` and validates the configuration against ``f``.

        Raises:
            ConfigInvalid: See :meth:`validate`.
        """
        ends = tuple(cylindrical_ends(f))
        if phi in ("auto", PhiPolicy.AUTO):
            phis = auto_phis(len(ends))
        elif isinstance(phi, Mapping):
            try:
                phis = tuple(float(phi[end.index]) for end in ends)
            except KeyError as exc:
                raise ConfigInvalid(f"No φ given for end {exc.args[0]}") from exc
        else:
            phis = tuple(float(x) for x in phi)  # type: ignore[union-attr]

        norm = math.hypot(*a)
        if norm == 0:
            raise ConfigInvalid("Translation vector a must be nonzero")
        cfg = cls(
            R=float(R),
            k1=int(k),
            a=(a[0] / norm, a[1] / norm),
            phi=phis,
            ends=ends,
            **kw,
        )
        cfg.validate(f)
        return cfg

    def validate(self, f: TropCurveInput) -> None:
        """Checks the genericity conditions and the size of R.

        Raises:
            ConfigInvalid: If ``a`` is parallel or orthogonal to an end, two φ
                have a ratio close to a rational of small denominator, R is
                too small, or the wrapping numbers are out of order.
        """
        if self.R <= 0 or self.k1 < 0 or not 0 <= self.k0 <= self.k1:
            raise ConfigInvalid(f"Need R > 0 and 0 <= k0 <= k1; got {self}")

        ends = self.ends or tuple(cylindrical_ends(f))
        if len(self.phi) != len(ends):
            raise ConfigInvalid(f"Expected {len(ends)} Morse angles; got {len(self.phi)}")

        for end in ends:
            a_alpha, a_perp = a_components(self, end)
            if abs(a_alpha) < 1e-12 or abs(a_perp) < 1e-12:
                raise ConfigInvalid(f"a = {self.a} is parallel or orthogonal to α = {end.alpha}")

        for (i, phi_i), (j, phi_j) in itertools.combinations(enumerate(self.phi), 2):
            if phi_j == 0 or phi_i == 0:
                raise ConfigInvalid(f"φ of end {i if phi_i == 0 else j} is zero")
            ratio = phi_i / phi_j
            near = Fraction(ratio).limit_denominator(self.denominator_bound)
            if abs(ratio - float(near)) < 1e-9:
                raise ConfigInvalid(f"φ_{i} / φ_{j} ≈ {near}; choose independent angles")

        gap = f.approx(coefficient_gap(f))
        if not self.R > self.bound_factor * self.k1 * gap:
            raise ConfigInvalid(
                f"R = {self.R} must exceed {self.bound_factor} · k · M = "
                f"{self.bound_factor * self.k1 * gap}"
            )

    def phi_of(self, end: CylindricalEndSpec) -> float:
        return self.phi[end.index]

    def window(self) -> tuple[float, float]:
        """Transition window ``[R² + 3R, R² + 4R]`` of the cutoff."""
        return self.R**2 + 3 * self.R, self.R**2 + 4 * self.R

    def to_json(self) -> dict[str, Any]:
        return {
            "R": self.R,
            "k0": self.k0,
            "k1": self.k1,
            "a": list(self.a),
            "phi": list(self.phi),
            "chi_profile": self.chi_profile.value,
        }


# * Coordinates


def alpha_coordinates(alpha: tuple[int, int], x: TorusCoords) -> AlphaCoords:
    """``(p₁, θ₁, p₂, θ₂) ↦ (p_α, θ_α, p_α^⊥, θ_α^⊥)``."""
    a1, a2 = alpha
    n = a1 * a1 + a2 * a2
    return AlphaCoords(
        p_alpha=(a2 * x.p1 - a1 * x.p2) / n,
        theta_alpha=-a2 * x.theta1 + a1 * x.theta2,
        p_perp=a1 * x.p1 + a2 * x.p2,
        theta_perp=(a1 * x.theta1 + a2 * x.theta2) / n,
    )


def from_alpha_coordinates(alpha: tuple[int, int], y: AlphaCoords) -> TorusCoords:
    a1, a2 = alpha
    n = a1 * a1 + a2 * a2
    return TorusCoords(
        p1=a2 * y.p_alpha + a1 * y.p_perp / n,
        theta1=a1 * y.theta_perp - a2 * y.theta_alpha / n,
        p2=-a1 * y.p_alpha + a2 * y.p_perp / n,
        theta2=a2 * y.theta_perp + a1 * y.theta_alpha / n,
    )


def a_components(cfg: PerturbationConfig, end: CylindricalEndSpec) -> tuple[float, float]:
    """``(a_α, a_α^⊥)`` with ``a₁p₁ + a₂p₂ = a_α p_α + a_α^⊥ p_α^⊥``."""
    (a1, a2), (al1, al2) = cfg.a, end.alpha
    return a1 * al2 - a2 * al1, (a1 * al1 + a2 * al2) / end.norm_sq


# * Slope and levels


def ham_slope(cfg: PerturbationConfig, end: CylindricalEndSpec, p_alpha: float) -> float:
    """``h(p_α) = k[(2π + 2R⁻¹|a_α|)·χ(p_α) + R⁻¹a_α]``."""
    a_alpha, _ = a_components(cfg, end)
    lo, hi = cfg.window()
    chi = bump(lo, hi, p_alpha, cfg.chi_profile)
    return cfg.k * ((2 * math.pi + 2 * abs(a_alpha) / cfg.R) * chi + a_alpha / cfg.R)


def _slope_mp(cfg: PerturbationConfig, a_alpha: float, p: Any) -> Any:
    lo, hi = cfg.window()
    chi = cfg.chi_profile.mp((p - lo) / (hi - lo))
    return cfg.k * ((2 * _MP.pi + 2 * abs(a_alpha) / cfg.R) * chi + a_alpha / cfg.R)


def slope_range(cfg: PerturbationConfig, end: CylindricalEndSpec) -> tuple[float, float]:
    """Values of h at both ends of the transition window."""
    lo, hi = cfg.window()
    return ham_slope(cfg, end, lo), ham_slope(cfg, end, hi)


def attained_levels(cfg: PerturbationConfig, end: CylindricalEndSpec) -> list[int]:
    """Every j with 2jπ strictly inside the range of h."""
    lo, hi = slope_range(cfg, end)
    first = math.floor(lo / (2 * math.pi)) + 1
    return [j for j in range(first, math.ceil(hi / (2 * math.pi))) if lo < 2 * math.pi * j < hi]


def admissible_levels(cfg: PerturbationConfig, end: CylindricalEndSpec) -> range:
    """``{1..k}`` when ``a₁α₂ − a₂α₁ > 0``, else ``{0..k−1}``."""
    a_alpha, _ = a_components(cfg, end)
    return range(1, cfg.k + 1) if a_alpha > 0 else range(0, cfg.k)


def solve_wrap_levels(cfg: PerturbationConfig, end: CylindricalEndSpec, j: int) -> float:
    """The unique ``p_α`` in the transition window with ``h(p_α) = 2jπ``.

    Monotonicity is checked on 4096 samples before bisecting in 30-digit
    arithmetic down to ``|h − 2jπ| < 10⁻¹²·2π``.

    Raises:
        OutOfRange: If 2jπ is not strictly inside the range of h.
        NonMonotone: If the sampled slope decreases or crosses the level
            other than exactly once.
    """
    target = 2 * math.pi * j
    h_lo, h_hi = slope_range(cfg, end)
    if not h_lo < target < h_hi:
        raise OutOfRange(j, h_lo, h_hi)

    lo, hi = cfg.window()
    a_alpha, _ = a_components(cfg, end)
    xs = np.linspace(lo, hi, SAMPLES)
    chi = cfg.chi_profile.vector((xs - lo) / (hi - lo))
    hs = cfg.k * ((2 * math.pi + 2 * abs(a_alpha) / cfg.R) * chi + a_alpha / cfg.R)
    signs = np.sign(hs - target)
    crossings = int(np.count_nonzero(np.diff(signs[signs != 0])))
    if np.any(np.diff(hs) < -1e-12) or crossings != 1:
        raise NonMonotone(j, crossings)

    left, right = _MP.mpf(lo), _MP.mpf(hi)
    goal = 2 * _MP.pi * j
    mid = (left + right) / 2
    for it in range(400):
        mid = (left + right) / 2
        diff = _slope_mp(cfg, a_alpha, mid) - goal
        if abs(diff) < TOLERANCE * 2 * math.pi:
            _log.debug("Level %d on end %d solved in %d steps", j, end.index, it)
            break
        if diff < 0:
            left = mid
        else:
            right = mid
    return float(mid)


# * Generators


@dataclass(frozen=True)
class FloerGenerator:
    """A self-intersection point of the perturbed Lagrangian.

    Interior generators only carry a count and a degree; cylindrical ones also
    carry their end, level ``j``, sheet label and adapted coordinates.
    """

    kind: GenKind
    degree: int
    end: CylindricalEndSpec | None = None
    gen_type: GenType | None = None
    j: int | None = None
    sheet: SheetLabel | None = None
    coords: AlphaCoords | None = None
    ordinal: int = 0

    def __post_init__(self) -> None:
        expected = 0 if self.gen_type is GenType.E else 1
        if self.degree != expected:
            raise ValueError(f"{self.gen_type} generator must have degree {expected}")

    @property
    def symbolic_only(self) -> bool:
        return self.coords is None

    @property
    def label(self) -> str:
        if self.kind is GenKind.INTERIOR:
            return f"v{self.ordinal}"
        assert self.end is not None and self.gen_type is not None
        if self.sheet is not None:
            return f"end{self.end.index}:{self.sheet}"
        return f"end{self.end.index}:x^{self.j}x^{self.gen_type.value}"

    def to_json(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "kind": self.kind.value,
            "degree": self.degree,
            "end": None if self.end is None else self.end.index,
            "alpha": None if self.end is None else list(self.end.alpha),
            "type": None if self.gen_type is None else self.gen_type.value,
            "j": self.j,
            "sheet": None if self.sheet is None else [self.sheet.j0, self.sheet.j1],
            "coords": None if self.coords is None else [round(c, 12) for c in self.coords],
        }


def _end_generators(
    f: TropCurveInput, cfg: PerturbationConfig, end: CylindricalEndSpec
) -> list[FloerGenerator]:
    admissible = admissible_levels(cfg, end)
    for j in sorted(set(attained_levels(cfg, end)) - set(admissible)):
        warnings.warn(
            f"Level j={j} is attained on end {end.index} (α={end.alpha}) but lies outside "
            f"the index range {admissible.start}..{admissible.stop - 1}; it is not listed",
            IndexRangeDiscrepancy,
            stacklevel=3,
        )

    _, a_perp = a_components(cfg, end)
    phi = cfg.phi_of(end)
    shift = 0.5 * cfg.k * a_perp / cfg.R
    log_r = f.approx(end.log_r)
    arg_r = math.pi * float(f.bind_phase(end.cylinder_phase))
    copies = end.norm_sq

    out: list[FloerGenerator] = []
    for j in admissible:
        p_alpha = solve_wrap_levels(cfg, end, j)
        for gen_type, theta_perp in ((GenType.E, phi + shift), (GenType.F, phi + math.pi + shift)):
            for s in range(copies):
                out.append(
                    FloerGenerator(
                        kind=GenKind.CYLINDRICAL,
                        degree=0 if gen_type is GenType.E else 1,
                        end=end,
                        gen_type=gen_type,
                        j=j,
                        sheet=SheetLabel(s, s + j, gen_type) if copies > 1 else None,
                        coords=AlphaCoords(p_alpha, arg_r + 2 * math.pi * s, log_r, theta_perp),
                    )
                )
    return out


def enumerate_generators(f: TropCurveInput, cfg: PerturbationConfig) -> list[FloerGenerator]:
    """Every generator of the wrapped self-Floer complex of L_f at wrapping k.

    Per end: k type-e and k type-f generators, in |α|² sheeted copies when
    |α| > 1; then 2g + b − 2 interior degree-1 generators.

    Raises:
        ConfigInvalid: If ``cfg`` does not validate against ``f``.
    """
    cfg.validate(f)
    out: list[FloerGenerator] = []
    for end in cylindrical_ends(f):
        out.extend(_end_generators(f, cfg, end))

    g, b = genus_and_ends(f)
    out.extend(
        FloerGenerator(kind=GenKind.INTERIOR, degree=1, gen_type=GenType.F, ordinal=i)
        for i in range(2 * g + b - 2)
    )
    return out


def flow_point(
    cfg: PerturbationConfig, end: CylindricalEndSpec, point: AlphaCoords, t: float
) -> AlphaCoords:
    """Image of ``point`` under the time-t flow of k·H; p-coordinates are fixed."""
    _, a_perp = a_components(cfg, end)
    return point._replace(
        theta_alpha=point.theta_alpha + t * ham_slope(cfg, end, point.p_alpha),
        theta_perp=point.theta_perp + t * cfg.k * a_perp / cfg.R,
    )


def explicit_g(
    cfg: PerturbationConfig, end: CylindricalEndSpec, k: int, p_alpha: float, theta_perp: float
) -> float:
    """``g_k = 2kπ·χ(p_α)·p_α + kR⁻¹a_α p_α + R⁻³μ_{φ_α + kR⁻¹a_α^⊥}(θ_α^⊥)``."""
    a_alpha, a_perp = a_components(cfg, end)
    lo, hi = cfg.window()
    chi = bump(lo, hi, p_alpha, cfg.chi_profile)
    morse = morse_mu(cfg.phi_of(end) + k * a_perp / cfg.R, theta_perp)
    return 2 * k * math.pi * chi * p_alpha + k * a_alpha * p_alpha / cfg.R + morse / cfg.R**3
