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

"""Exact arithmetic for the Novikov field Λ.

A :class:`Valuation` is an exact rational combination of named real
generators declared in a :class:`ValuationBasis`. Generators such as
``2π·log|q|`` are irrational, so valuations are ordered by certified interval
evaluation which is refined on demand. A :class:`NovikovScalar` is a
truncated series ``Σ aᵢ T^{λᵢ}`` whose terms are kept strictly sorted by
valuation, with every term below the cutoff of its :class:`NovikovField`.

    >>> field = NovikovField(ValuationBasis(), cutoff=4)
    >>> x = field.one - field.T(1)
    >>> x.inverse()
    NovikovScalar(1 + T^1 + T^2 + T^3)
"""

from __future__ import annotations

import abc
import functools
import logging
import os
import threading
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Tuple, Union

import mpmath
import sympy
from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational
from sortedcontainers import SortedKeyList
from typing_extensions import TypeAlias

from tropwrap.exceptions import (
    AmbiguousOrdering,
    ConfigInvalid,
    CutoffExhausted,
    CutoffMismatch,
    IncompatibleBasis,
    ParseError,
    RefinementWarning,
    ZeroDivision,
    ZeroHasNoValuation,
)
from tropwrap.types import Ordering

__all__ = [
    "Precision",
    "Generator",
    "RationalGenerator",
    "IntervalGenerator",
    "MpmathGenerator",
    "ValuationBasis",
    "Valuation",
    "UnitCoefficient",
    "NovikovField",
    "NovikovScalar",
    "compare",
    "nov_add",
    "nov_mul",
    "nov_neg",
    "nov_invert",
    "val",
]

_log = logging.getLogger(__name__)

Rational: TypeAlias = Union[int, Fraction]
ONE = "1"
"""Symbol of the implicit unit generator every basis contains."""


@dataclass(frozen=True)
class Precision:
    """Numerical knobs of one computation session."""

    depth: int = 64
    """Maximum number of interval refinement rounds, from ``TFW_PRECISION``."""

    start_bits: int = 53
    max_bits: int = 65536
    """Precision ceiling; refinement stops early once it is reached."""

    eps_c: float = 1e-9
    """Tolerance used to compare :class:`UnitCoefficient` values."""

    coeff_dps: int = 40
    series_limit: int = 10_000
    """Iteration limit of the geometric series used by :meth:`NovikovScalar.inverse`."""

    lift_limit: int = 3
    """How many times linear algebra over Λ may double its working cutoff."""

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> Precision:
        """Reads the refinement depth from ``TFW_PRECISION``.

        Raises:
            ConfigInvalid: When the variable is not a positive integer.
        """
        env = os.environ if environ is None else environ
        raw = env.get("TFW_PRECISION")
        if raw is None:
            return cls()

        try:
            depth = int(raw)
        except ValueError as exc:
            raise ConfigInvalid(f"TFW_PRECISION must be an integer; got {raw!r}") from exc

        if depth < 1:
            raise ConfigInvalid(f"TFW_PRECISION must be positive; got {depth}")
        return cls(depth=depth)


def _fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("Refusing to convert a float into an exact rational")
    return Fraction(value)


# * Generators


class Generator(abc.ABC):
    """A named positive or negative real number known through enclosures."""

    symbol: str

    @abc.abstractmethod
    def enclose(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational lower and upper bounds valid at ``bits`` of working precision."""

    @property
    def exact(self) -> Fraction | None:
        """The exact rational value, if there is one."""
        return None

    def approx(self) -> float:
        lo, hi = self.enclose(53)
        return float((lo + hi) / 2)


@dataclass(frozen=True)
class RationalGenerator(Generator):
    symbol: str
    value: Fraction

    def enclose(self, bits: int) -> tuple[Fraction, Fraction]:
        return self.value, self.value

    @property
    def exact(self) -> Fraction:
        return self.value


@dataclass(frozen=True)
class IntervalGenerator(Generator):
    """A generator known only up to a fixed rational interval; cannot be refined."""

    symbol: str
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ConfigInvalid(f"Empty interval [{self.lo}, {self.hi}] for {self.symbol!r}")

    def enclose(self, bits: int) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi

    @property
    def exact(self) -> Fraction | None:
        return self.lo if self.lo == self.hi else None


@dataclass(frozen=True)
class MpmathGenerator(Generator):
    """A generator defined by an interval-arithmetic expression.

    ``func`` receives a private :class:`mpmath.ctx_iv.MPIntervalContext` set to
    the requested precision and must return an interval containing the value,
    e.g. ``lambda iv: 2 * iv.pi * iv.log(iv.mpf(3) / 2)``.
    """

    symbol: str
    func: Callable[[Any], Any] = dc_field(compare=False)
    label: str = ""

    def enclose(self, bits: int) -> tuple[Fraction, Fraction]:
        ctx = _interval_context()
        ctx.prec = bits
        lo, hi = ctx.convert(self.func(ctx))._mpi_
        return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


_local = threading.local()


def _interval_context() -> MPIntervalContext:
    ctx = getattr(_local, "iv", None)
    if ctx is None:
        ctx = _local.iv = MPIntervalContext()
    return ctx


# * Valuations


@dataclass(frozen=True)
class Valuation:
    """Finitely supported map symbol → rational, in canonical sorted form.

    Zero coefficients are never stored, so two valuations are equal as
    dataclasses exactly when their coefficient vectors coincide.
    """

    coeffs: Tuple[Tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, Rational] | None = None, **kw: Rational) -> Valuation:
        merged: dict[str, Fraction] = {}
        for key, value in {**(mapping or {}), **kw}.items():
            merged[key] = merged.get(key, Fraction(0)) + _fraction(value)
        return cls(tuple(sorted((k, v) for k, v in merged.items() if v)))

    @classmethod
    def const(cls, value: Rational) -> Valuation:
        return cls.of({ONE: value})

    @classmethod
    def symbol(cls, name: str, coeff: Rational = 1) -> Valuation:
        return cls.of({name: coeff})

    @classmethod
    def coerce(cls, value: Valuation | Rational) -> Valuation:
        return value if isinstance(value, Valuation) else cls.const(value)

    @classmethod
    def parse(cls, text: str | int | Fraction) -> Valuation:
        """Parses a rational linear expression such as ``"-log_q"`` or ``"3/2 + 2*s"``.

        Raises:
            ParseError: When the expression is not linear with rational coefficients.
        """
        if isinstance(text, (int, Fraction)):
            return cls.const(text)

        try:
            expr = sympy.expand(sympy.sympify(text, rational=True))
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise ParseError(f"Cannot parse linear expression {text!r}") from exc

        mapping: dict[str, Fraction] = {}
        for term in sympy.Add.make_args(expr):
            coeff, rest = term.as_coeff_Mul()
            if not coeff.is_Rational:
                raise ParseError(f"Irrational coefficient {coeff} in {text!r}")
            if rest == 1:
                key = ONE
            elif isinstance(rest, sympy.Symbol):
                key = rest.name
            else:
                raise ParseError(f"Term {term} of {text!r} is not linear")
            mapping[key] = mapping.get(key, Fraction(0)) + Fraction(int(coeff.p), int(coeff.q))
        return cls.of(mapping)

    def __getitem__(self, symbol: str) -> Fraction:
        for key, value in self.coeffs:
            if key == symbol:
                return value
        return Fraction(0)

    def __iter__(self) -> Iterator[tuple[str, Fraction]]:
        return iter(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: Valuation | Rational) -> Valuation:
        return _combine(self, Valuation.coerce(other), 1)

    __radd__ = __add__

    def __sub__(self, other: Valuation | Rational) -> Valuation:
        return _combine(self, Valuation.coerce(other), -1)

    def __rsub__(self, other: Rational) -> Valuation:
        return Valuation.coerce(other) - self

    def __neg__(self) -> Valuation:
        return Valuation(tuple((k, -v) for k, v in self.coeffs))

    def __mul__(self, scalar: Rational) -> Valuation:
        if isinstance(scalar, Valuation):
            return NotImplemented
        q = _fraction(scalar)
        return Valuation(tuple((k, v * q) for k, v in self.coeffs if v * q))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Rational) -> Valuation:
        return self * (1 / _fraction(scalar))

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(key for key, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return self.symbols <= {ONE}

    def constant(self) -> Fraction:
        return self[ONE]

    def to_sympy(self, rename: Mapping[str, Any] | None = None) -> sympy.Expr:
        """Exact sympy form; ``rename`` maps symbols to expressions or names."""
        rename = rename or {}
        total: sympy.Expr = sympy.Integer(0)
        for key, value in self.coeffs:
            rational = sympy.Rational(value.numerator, value.denominator)
            if key == ONE:
                total += rational
            else:
                target = rename.get(key, key)
                total += rational * (sympy.Symbol(target) if isinstance(target, str) else target)
        return total

    def to_json(self) -> dict[str, str]:
        return {key: str(value) for key, value in self.coeffs}

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> Valuation:
        try:
            return cls.of({key: Fraction(value) for key, value in obj.items()})
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"Invalid valuation {obj!r}") from exc

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"

        parts: list[str] = []
        for key, value in self.coeffs:
            if key == ONE:
                parts.append(str(value))
            elif value == 1:
                parts.append(key)
            elif value == -1:
                parts.append(f"-{key}")
            else:
                parts.append(f"{value}*{key}")
        return " + ".join(parts).replace("+ -", "- ")


def _combine(lhs: Valuation, rhs: Valuation, sign: int) -> Valuation:
    merged = dict(lhs.coeffs)
    for key, value in rhs.coeffs:
        merged[key] = merged.get(key, Fraction(0)) + sign * value
    return Valuation(tuple(sorted((k, v) for k, v in merged.items() if v)))


class ValuationBasis:
    """Ordered collection of generators; always contains the unit generator ``"1"``.

    Enclosures are cached per basis instance, behind a lock, so a basis can be
    shared by concurrent computations.
    """

    def __init__(
        self, generators: Iterable[Generator] = (), precision: Precision | None = None
    ) -> None:
        self.precision = precision or Precision.from_env()
        self._gens: dict[str, Generator] = {ONE: RationalGenerator(ONE, Fraction(1))}
        for gen in generators:
            if gen.symbol in self._gens:
                raise IncompatibleBasis(f"Generator {gen.symbol!r} declared twice")
            self._gens[gen.symbol] = gen
        self._cache: dict[tuple[str, int], tuple[Fraction, Fraction]] = {}
        self._first: dict[Valuation, tuple[Fraction, Fraction]] = {}
        self._lock = threading.Lock()

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._gens

    def __getitem__(self, symbol: str) -> Generator:
        return self._gens[symbol]

    def __iter__(self) -> Iterator[str]:
        return iter(self._gens)

    def __len__(self) -> int:
        return len(self._gens)

    def __repr__(self) -> str:
        return f"ValuationBasis({list(self._gens)!r})"

    @property
    def generators(self) -> tuple[Generator, ...]:
        return tuple(gen for sym, gen in self._gens.items() if sym != ONE)

    def extend(self, *generators: Generator) -> ValuationBasis:
        """A new basis with ``generators`` appended; re-declaring an equal one is a no-op.

        Raises:
            IncompatibleBasis: When a symbol is re-declared with another value.
        """
        new = [gen for gen in generators if not self._same(gen)]
        if not new:
            return self
        return ValuationBasis((*self.generators, *new), self.precision)

    def merge(self, other: ValuationBasis) -> ValuationBasis:
        return self if other is self else self.extend(*other.generators)

    def _same(self, gen: Generator) -> bool:
        existing = self._gens.get(gen.symbol)
        if existing is None:
            return False
        if existing == gen or existing.enclose(self.precision.start_bits) == gen.enclose(
            self.precision.start_bits
        ):
            return True
        raise IncompatibleBasis(f"Generator {gen.symbol!r} declared with different values")

    def _enclose_symbol(self, symbol: str, bits: int) -> tuple[Fraction, Fraction]:
        key = (symbol, bits)
        with self._lock:
            cached = self._cache.get(key)
        if cached is None:
            try:
                gen = self._gens[symbol]
            except KeyError as exc:
                raise IncompatibleBasis(f"Unknown generator {symbol!r}") from exc
            cached = gen.enclose(bits)
            with self._lock:
                self._cache[key] = cached
        return cached

    def enclose(self, v: Valuation, bits: int) -> tuple[Fraction, Fraction]:
        """Rational interval containing the numeric value of ``v``."""
        lo = hi = Fraction(0)
        for symbol, coeff in v:
            glo, ghi = self._enclose_symbol(symbol, bits)
            if coeff > 0:
                lo += coeff * glo
                hi += coeff * ghi
            else:
                lo += coeff * ghi
                hi += coeff * glo
        return lo, hi

    def _first_enclosure(self, v: Valuation) -> tuple[Fraction, Fraction]:
        with self._lock:
            cached = self._first.get(v)
        if cached is None:
            cached = self.enclose(v, self.precision.start_bits)
            with self._lock:
                cached = self._first.setdefault(v, cached)
        return cached

    def approx(self, v: Valuation) -> float:
        lo, hi = self._first_enclosure(v)
        return float((lo + hi) / 2)

    def compare(self, v1: Valuation, v2: Valuation) -> Ordering:
        """Orders two valuations by their numeric values.

        Equality is exact when the coefficient vectors coincide. Otherwise the
        difference is enclosed at 53, 106, 212, ... bits until the enclosure
        excludes zero or collapses onto it.

        Raises:
            AmbiguousOrdering: When the enclosure still straddles zero after
                :attr:`Precision.depth` rounds or at the precision ceiling.
        """
        if v1 == v2:
            return Ordering.EQUAL

        diff = v1 - v2
        if diff.is_constant:
            return Ordering((diff.constant() > 0) - (diff.constant() < 0))

        lo1, hi1 = self._first_enclosure(v1)
        lo2, hi2 = self._first_enclosure(v2)
        if lo1 > hi2:
            return Ordering.GREATER
        if hi1 < lo2:
            return Ordering.LESS

        prec = self.precision
        bits = prec.start_bits
        for rnd in range(prec.depth):
            bits = min(prec.start_bits << rnd, prec.max_bits)
            lo, hi = self.enclose(diff, bits)
            if lo > 0:
                result = Ordering.GREATER
            elif hi < 0:
                result = Ordering.LESS
            elif lo == hi == 0:
                result = Ordering.EQUAL
            else:
                _log.debug("Refining %s vs %s past %d bits", v1, v2, bits)
                if bits >= prec.max_bits:
                    break
                continue

            if rnd:
                warnings.warn(
                    f"Ordering {v1} vs {v2} needed {rnd + 1} rounds ({bits} bits)",
                    RefinementWarning,
                    stacklevel=2,
                )
            return result
        raise AmbiguousOrdering(v1, v2, bits)

    def sort_key(self) -> Callable[[Valuation], Any]:
        return functools.cmp_to_key(lambda a, b: int(self.compare(a, b)))

    def vmin(self, values: Iterable[Valuation]) -> Valuation:
        return min(values, key=self.sort_key())

    def vmax(self, values: Iterable[Valuation]) -> Valuation:
        return max(values, key=self.sort_key())


def compare(v1: Valuation, v2: Valuation, basis: ValuationBasis) -> Ordering:
    """Module-level alias of :meth:`ValuationBasis.compare`."""
    return basis.compare(v1, v2)


# * Coefficients

_CTX = mpmath.MPContext()
_CTX.dps = Precision.coeff_dps


def _norm_phase(phase: Fraction) -> Fraction:
    return phase % 2


class UnitCoefficient:
    """A nonzero complex coefficient ``a`` of a Novikov term.

    The value is a 40-digit :class:`mpmath.mpc`. When the coefficient is known
    to be ``m·e^{iπt}`` with rational ``m`` and ``t``, the exact tag keeps
    ``(m, t)`` and all products and sums that stay on a common real line
    through the origin remain exact.
    """

    __slots__ = ("value", "modulus", "phase")
    EPS_C = Precision.eps_c

    def __init__(
        self, value: Any, modulus: Fraction | None = None, phase: Fraction | None = None
    ) -> None:
        self.value = _CTX.mpc(value)
        self.modulus = modulus
        self.phase = None if phase is None else _norm_phase(phase)

    @classmethod
    def exact(cls, modulus: Rational = 1, phase: Rational = 0) -> UnitCoefficient:
        """``modulus · e^{iπ·phase}`` with an exact tag."""
        m, t = _fraction(modulus), _norm_phase(_fraction(phase))
        if m < 0:
            m, t = -m, _norm_phase(t + 1)
        value = _CTX.mpf(m.numerator) / m.denominator * _CTX.expjpi(
            _CTX.mpf(t.numerator) / t.denominator
        )
        return cls(value, m, t)

    @classmethod
    def rational(cls, q: Rational) -> UnitCoefficient:
        return cls.exact(q, 0)

    @classmethod
    def one(cls) -> UnitCoefficient:
        return cls.exact(1, 0)

    @property
    def is_exact(self) -> bool:
        return self.phase is not None

    @property
    def re(self) -> Any:
        return self.value.real

    @property
    def im(self) -> Any:
        return self.value.imag

    def is_zero(self) -> bool:
        if self.is_exact:
            return self.modulus == 0
        return bool(abs(self.value) <= self.EPS_C)

    def __add__(self, other: UnitCoefficient) -> UnitCoefficient:
        if self.is_exact and other.is_exact:
            assert self.modulus is not None and other.modulus is not None
            assert self.phase is not None and other.phase is not None
            if self.modulus == 0:
                return other
            if other.modulus == 0:
                return self
            if self.phase == other.phase:
                return UnitCoefficient.exact(self.modulus + other.modulus, self.phase)
            if _norm_phase(self.phase - other.phase) == 1:
                return UnitCoefficient.exact(self.modulus - other.modulus, self.phase)
        return UnitCoefficient(self.value + other.value)

    def __neg__(self) -> UnitCoefficient:
        if self.is_exact:
            assert self.phase is not None
            return UnitCoefficient(-self.value, self.modulus, self.phase + 1)
        return UnitCoefficient(-self.value)

    def __sub__(self, other: UnitCoefficient) -> UnitCoefficient:
        return self + (-other)

    def __mul__(self, other: UnitCoefficient) -> UnitCoefficient:
        if self.is_exact and other.is_exact:
            assert self.modulus is not None and other.modulus is not None
            assert self.phase is not None and other.phase is not None
            return UnitCoefficient.exact(self.modulus * other.modulus, self.phase + other.phase)
        return UnitCoefficient(self.value * other.value)

    def inverse(self) -> UnitCoefficient:
        if self.is_zero():
            raise ZeroDivision("Zero coefficient has no inverse")
        if self.is_exact:
            assert self.modulus is not None and self.phase is not None
            return UnitCoefficient.exact(1 / self.modulus, -self.phase)
        return UnitCoefficient(1 / self.value)

    def conj(self) -> UnitCoefficient:
        if self.is_exact:
            assert self.phase is not None
            return UnitCoefficient(_CTX.conj(self.value), self.modulus, -self.phase)
        return UnitCoefficient(_CTX.conj(self.value))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitCoefficient):
            return NotImplemented
        if self.is_exact and other.is_exact:
            if self.modulus == other.modulus == 0:
                return True
            return self.modulus == other.modulus and self.phase == other.phase
        return bool(abs(self.value - other.value) <= self.EPS_C)

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> dict[str, str]:
        if self.is_exact:
            return {"modulus": str(self.modulus), "phase_pi": str(self.phase)}
        return {
            "re": _CTX.nstr(self.re, 20),
            "im": _CTX.nstr(self.im, 20),
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> UnitCoefficient:
        try:
            if "phase_pi" in obj:
                return cls.exact(Fraction(obj.get("modulus", "1")), Fraction(obj["phase_pi"]))
            return cls(_CTX.mpc(obj["re"], obj["im"]))
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"Invalid coefficient {obj!r}") from exc

    def __repr__(self) -> str:
        if self.is_exact:
            if self.phase == 0:
                return str(self.modulus)
            if self.phase == 1:
                return f"-{self.modulus}"
            return f"{self.modulus}·e^(iπ·{self.phase})"
        return _CTX.nstr(self.value, 12)


# * Novikov field

Term: TypeAlias = Tuple[Valuation, UnitCoefficient]


class NovikovField:
    """A computation session: valuation basis, cutoff and precision.

    Every :class:`NovikovScalar` belongs to exactly one field and never holds a
    term whose valuation reaches the cutoff.
    """

    def __init__(
        self,
        basis: ValuationBasis | None = None,
        cutoff: Valuation | Rational = 50,
        precision: Precision | None = None,
    ) -> None:
        self.basis = basis or ValuationBasis(precision=precision)
        self.cutoff = Valuation.coerce(cutoff)
        self.precision = precision or self.basis.precision
        self._key = self.basis.sort_key()

    def __repr__(self) -> str:
        return f"NovikovField(basis={self.basis!r}, cutoff={self.cutoff})"

    def extend(self, *generators: Generator) -> NovikovField:
        basis = self.basis.extend(*generators)
        if basis is self.basis:
            return self
        return NovikovField(basis, self.cutoff, self.precision)

    def with_cutoff(self, cutoff: Valuation | Rational) -> NovikovField:
        return NovikovField(self.basis, cutoff, self.precision)

    def compare(self, v1: Valuation, v2: Valuation) -> Ordering:
        return self.basis.compare(v1, v2)

    def below_cutoff(self, v: Valuation) -> bool:
        return self.basis.compare(v, self.cutoff) == Ordering.LESS

    def scalar(
        self, terms: Iterable[tuple[Valuation | Rational, UnitCoefficient]]
    ) -> NovikovScalar:
        """Canonicalises ``terms``: merges equal valuations, drops zeros and truncates."""
        merged: dict[Valuation, UnitCoefficient] = {}
        for raw_v, coeff in terms:
            v = Valuation.coerce(raw_v)
            merged[v] = merged[v] + coeff if v in merged else coeff

        acc: SortedKeyList = SortedKeyList(key=lambda term: self._key(term[0]))
        for v, coeff in merged.items():
            if coeff.is_zero() or not self.below_cutoff(v):
                continue
            idx = acc.bisect_key_left(self._key(v))
            if idx < len(acc) and self.compare(acc[idx][0], v) == Ordering.EQUAL:
                v, old = acc.pop(idx)
                coeff = old + coeff
            if not coeff.is_zero():
                acc.add((v, coeff))
        return NovikovScalar(self, tuple(acc))

    @property
    def zero(self) -> NovikovScalar:
        return NovikovScalar(self, ())

    @property
    def one(self) -> NovikovScalar:
        return self.monomial(0)

    def monomial(
        self, v: Valuation | Rational, coeff: UnitCoefficient | Rational = 1
    ) -> NovikovScalar:
        if not isinstance(coeff, UnitCoefficient):
            coeff = UnitCoefficient.rational(coeff)
        return self.scalar([(v, coeff)])

    def T(self, v: Valuation | Rational) -> NovikovScalar:  # noqa: N802
        return self.monomial(v)

    def rational(self, q: Rational) -> NovikovScalar:
        return self.monomial(0, q)

    def coerce(self, x: NovikovScalar | Rational) -> NovikovScalar:
        if isinstance(x, NovikovScalar):
            return x
        return self.rational(x)

    def unify(self, other: NovikovField) -> NovikovField:
        """The common field of two operands.

        Raises:
            CutoffMismatch: When the cutoffs differ.
            IncompatibleBasis: When a symbol has conflicting values.
        """
        if other is self:
            return self
        if other.cutoff != self.cutoff:
            raise CutoffMismatch(self.cutoff, other.cutoff)
        basis = self.basis.merge(other.basis)
        if basis is self.basis:
            return self
        if basis is other.basis:
            return other
        return NovikovField(basis, self.cutoff, self.precision)


class NovikovScalar:
    """An element ``Σ aᵢ T^{λᵢ}`` of Λ truncated below the field cutoff."""

    __slots__ = ("field", "terms")

    def __init__(self, field: NovikovField, terms: Sequence[Term]) -> None:
        self.field = field
        self.terms: tuple[Term, ...] = tuple(terms)

    def __repr__(self) -> str:
        return f"NovikovScalar({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"

        parts = []
        for v, c in self.terms:
            if not v:
                parts.append(repr(c))
            elif c == UnitCoefficient.one():
                parts.append(f"T^{v}")
            else:
                parts.append(f"{c!r}·T^{v}")
        return " + ".join(parts)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> Term:
        """Leading (lowest valuation) term.

        Raises:
            ZeroHasNoValuation: For the zero scalar.
        """
        if not self.terms:
            raise ZeroHasNoValuation("The zero element has no leading term")
        return self.terms[0]

    def val(self) -> Valuation:
        return self.leading()[0]

    def _operand(self, other: Any) -> tuple[NovikovField, NovikovScalar]:
        if not isinstance(other, NovikovScalar):
            other = self.field.coerce(other)
        return self.field.unify(other.field), other

    def __add__(self, other: NovikovScalar | Rational) -> NovikovScalar:
        field, other = self._operand(other)
        return field.scalar([*self.terms, *other.terms])

    __radd__ = __add__

    def __neg__(self) -> NovikovScalar:
        return NovikovScalar(self.field, tuple((v, -c) for v, c in self.terms))

    def __sub__(self, other: NovikovScalar | Rational) -> NovikovScalar:
        field, other = self._operand(other)
        return field.scalar([*self.terms, *((v, -c) for v, c in other.terms)])

    def __rsub__(self, other: Rational) -> NovikovScalar:
        return (-self) + other

    def __mul__(self, other: NovikovScalar | Rational) -> NovikovScalar:
        field, other = self._operand(other)
        return field.scalar((v1 + v2, c1 * c2) for v1, c1 in self.terms for v2, c2 in other.terms)

    __rmul__ = __mul__

    def scale(self, coeff: UnitCoefficient, shift: Valuation | Rational = 0) -> NovikovScalar:
        """``coeff · T^shift · self``."""
        return self.field.scalar((v + shift, c * coeff) for v, c in self.terms)

    def inverse(self) -> NovikovScalar:
        """Multiplicative inverse to the field cutoff.

        With ``x = c·T^v·(1 + u)``, val(u) > 0, this sums the geometric series
        of ``-u`` in a field whose cutoff is ``cutoff + v``. The product with
        ``self`` then equals 1 up to terms of valuation ≥ ``cutoff − |v|``.

        Raises:
            ZeroDivision: For the zero scalar.
            CutoffExhausted: When the series does not terminate within
                :attr:`Precision.series_limit` iterations.
        """
        if not self.terms:
            raise ZeroDivision("The zero element of Λ has no inverse")

        v, c = self.terms[0]
        c_inv = c.inverse()
        inner = self.field.with_cutoff(self.field.cutoff + v)
        neg_u = inner.scalar((vi - v, -(ci * c_inv)) for vi, ci in self.terms[1:])

        total = inner.one
        power = inner.one
        for n in range(self.field.precision.series_limit):
            power = power * neg_u
            if power.is_zero:
                _log.debug("Geometric series converged after %d terms", n)
                break
            total = total + power
        else:
            raise CutoffExhausted(
                f"Series inverse of {self} did not reach the cutoff in "
                f"{self.field.precision.series_limit} iterations"
            )
        return self.field.scalar((vi - v, ci * c_inv) for vi, ci in total.terms)

    def __truediv__(self, other: NovikovScalar | Rational) -> NovikovScalar:
        _, other = self._operand(other)
        return self * other.inverse()

    def __rtruediv__(self, other: Rational) -> NovikovScalar:
        return self.field.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> NovikovScalar:
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.coerce(other)
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        if len(self.terms) != len(other.terms):
            return False
        basis = self.field.basis.merge(other.field.basis)
        return all(
            basis.compare(v1, v2) == Ordering.EQUAL and c1 == c2
            for (v1, c1), (v2, c2) in zip(self.terms, other.terms)
        )

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, cutoff: Valuation | Rational) -> NovikovScalar:
        bound = Valuation.coerce(cutoff)
        return NovikovScalar(
            self.field,
            tuple(t for t in self.terms if self.field.compare(t[0], bound) == Ordering.LESS),
        )

    def renormalize(self) -> NovikovScalar:
        return self.field.scalar(self.terms)

    def to_json(self) -> list[dict[str, Any]]:
        return [{"val": v.to_json(), "coeff": c.to_json()} for v, c in self.terms]

    @classmethod
    def from_json(cls, field: NovikovField, obj: Iterable[Mapping[str, Any]]) -> NovikovScalar:
        try:
            return field.scalar(
                (Valuation.from_json(t["val"]), UnitCoefficient.from_json(t["coeff"]))
                for t in obj
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"Invalid Novikov scalar {obj!r}") from exc


def nov_add(x: NovikovScalar, y: NovikovScalar) -> NovikovScalar:
    return x + y


def nov_mul(x: NovikovScalar, y: NovikovScalar) -> NovikovScalar:
    return x * y


def nov_neg(x: NovikovScalar) -> NovikovScalar:
    return -x


def nov_invert(x: NovikovScalar) -> NovikovScalar:
    return x.inverse()


def val(x: NovikovScalar) -> Valuation:
    """Valuation of the leading term.

    Raises:
        ZeroHasNoValuation: For the zero scalar.
    """
    return x.val()
