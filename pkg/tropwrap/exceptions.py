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

"""Contains the exceptions and warnings used by and shared across tropwrap."""

from __future__ import annotations

from typing import Any

__all__ = [
    "Error",
    "DomainError",
    "NumericError",
    "AmbiguousOrdering",
    "CutoffExhausted",
    "NonMonotone",
    "NonIntegralWrap",
    "ZeroHasNoValuation",
    "ZeroDivision",
    "DegenerateSupport",
    "NotSmooth",
    "NotInterior",
    "BadInterval",
    "OutOfRange",
    "ConfigInvalid",
    "NotALoop",
    "DiagonalNeedsAdjustedMode",
    "NotNullhomotopic",
    "InconsistentCycle",
    "InteriorGeneratorHasNoRescale",
    "NotLinearInZ2",
    "RootsNotResolvable",
    "SingularSystem",
    "DimensionMismatch",
    "AtPuncture",
    "ZeroFunction",
    "NegativeGap",
    "CutoffMismatch",
    "IncompatibleBasis",
    "ParseError",
    "TropwrapWarning",
    "IndexRangeDiscrepancy",
    "RefinementWarning",
    "SmoothnessWarning",
    "CutoffWarning",
]


class Error(Exception):
    """Base class for tropwrap exceptions.

    It is not guaranteed that exceptions raised from tropwrap always subclass
    Error. This is done to prevent duplication of exceptions. All exceptions
    raised by a function (in its body) explicitly are documented.

    Every concrete error also derives from exactly one of :class:`DomainError`
    (the input or the request makes no sense for the mathematics) and
    :class:`NumericError` (the input is fine, but a certified numerical
    decision could not be reached). The command line maps them to exit codes
    2 and 3 respectively.

    Some exceptions derive from standard Python exceptions to ease handling.
    """


class DomainError(Error):
    """Input, configuration or query outside the domain of an operation."""


class NumericError(Error):
    """A certified numerical decision could not be made."""


# * Numeric failures


class AmbiguousOrdering(NumericError, ArithmeticError):
    """Two valuations could not be ordered at the maximum refinement depth.

    Args:
        lhs: Human readable form of the left valuation.
        rhs: Human readable form of the right valuation.
        bits: The precision (in bits) of the last refinement round.
    """

    def __init__(self, lhs: Any, rhs: Any, bits: int) -> None:
        super().__init__(f"Cannot order {lhs} and {rhs}; intervals overlap at {bits} bits")


class CutoffExhausted(NumericError, ArithmeticError):
    """A series computation hit its iteration limit before the cutoff."""


class NonMonotone(NumericError, ArithmeticError):
    """The wrapping slope is not monotone on the transition window."""

    def __init__(self, level: int, crossings: int) -> None:
        super().__init__(f"Level {level} is crossed {crossings} times; expected exactly once")


class NonIntegralWrap(NumericError, ValueError):
    def __init__(self, ratio: float) -> None:
        super().__init__(f"Angular change is {ratio!r} turns, not an integer")


class ZeroHasNoValuation(NumericError, ArithmeticError):
    """Raised by :func:`tropwrap.exactnum.val` for the zero scalar."""


class ZeroDivision(NumericError, ZeroDivisionError):
    """Inverting the zero element of the Novikov field."""


# * Domain failures


class DegenerateSupport(DomainError, ValueError):
    """The Newton polygon is a point or a segment."""


class NotSmooth(DomainError, ValueError):
    """A boundary edge of the Newton polygon has lattice length > 1.

    Args:
        points: Non-vertex lattice points found on the boundary.
    """

    def __init__(self, *points: tuple[int, int]) -> None:
        self.points = points
        super().__init__(f"Non-vertex boundary lattice points: {list(points)!r}")


class NotInterior(DomainError, ValueError):
    def __init__(self, alpha: tuple[int, int]) -> None:
        super().__init__(f"{alpha!r} is not an interior point of the Newton polygon")


class BadInterval(DomainError, ValueError):
    def __init__(self, lo: float, hi: float) -> None:
        super().__init__(f"Expected lower end < upper end; got [{lo!r}, {hi!r}]")


class OutOfRange(DomainError, ValueError):
    """A wrapping level is not attained on the transition window."""

    def __init__(self, level: int, lo: float, hi: float) -> None:
        super().__init__(f"Level 2π·{level} is outside the slope range ({lo!r}, {hi!r})")


class ConfigInvalid(DomainError, ValueError):
    """Perturbation, session or environment configuration is invalid."""


class NotALoop(DomainError, ValueError):
    """Endpoints of a lifted path do not project to the same point."""


class DiagonalNeedsAdjustedMode(DomainError, ValueError):
    """An angular integral on an end with |α| > 1 needs the adjusted convention."""


class NotNullhomotopic(DomainError, ValueError):
    def __init__(self, total: tuple[int, int]) -> None:
        super().__init__(f"Σ n_α·α = {total!r}; the class is not nullhomotopic")


class InconsistentCycle(DomainError, ValueError):
    """Disk boundary arcs and vertices do not close up cyclically."""


class InteriorGeneratorHasNoRescale(DomainError, TypeError):
    """Only generators on a cylindrical end carry a rescaling weight."""


class NotLinearInZ2(DomainError, ValueError):
    def __init__(self, exponents: set[int]) -> None:
        super().__init__(f"z₂ exponents {sorted(exponents)!r} are not of the form {{m, m+1}}")


class RootsNotResolvable(DomainError, ValueError):
    """The z₁-polynomials cannot be factored into distinct linear factors."""


class SingularSystem(DomainError, ArithmeticError):
    """A coefficient-matching system has no unique admissible solution."""


class DimensionMismatch(DomainError, ValueError):
    def __init__(self, expected: int, got: int) -> None:
        super().__init__(f"Expected {expected} candidates; got {got}")


class AtPuncture(DomainError, ZeroDivisionError):
    """Evaluation point coincides with a puncture of the curve."""


class ZeroFunction(DomainError, ValueError):
    """The zero function has no pole profile."""


class NegativeGap(DomainError, ValueError):
    def __init__(self, j0: int, j1: int) -> None:
        super().__init__(f"Expected j1 >= j0; got ({j0}, {j1})")


class CutoffMismatch(DomainError, ValueError):
    def __init__(self, lhs: Any, rhs: Any) -> None:
        super().__init__(f"Cutoffs differ: {lhs} vs {rhs}")


class IncompatibleBasis(DomainError, ValueError):
    """Two valuation bases declare the same symbol with different values."""


class ParseError(DomainError, ValueError):
    """Malformed curve, disk or expression input."""


# * Warnings


class TropwrapWarning(UserWarning):
    """Base class of every warning emitted by tropwrap."""


class IndexRangeDiscrepancy(TropwrapWarning):
    """A wrapping level is attained but lies outside the admissible index range."""


class RefinementWarning(TropwrapWarning):
    """An ordering needed more than one interval refinement round."""


class SmoothnessWarning(TropwrapWarning):
    """A non-smooth curve was analyzed with partial output."""


class CutoffWarning(TropwrapWarning):
    """A result was truncated by the session cutoff."""
