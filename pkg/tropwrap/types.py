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

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Tuple

from typing_extensions import TypeAlias

Exponent: TypeAlias = Tuple[int, int]
"""A lattice point of ℤ², used for exponents, end normals and ray directions."""


class Ordering(enum.IntEnum):
    """Result of comparing two valuations; usable with :func:`functools.cmp_to_key`."""

    LESS = -1
    EQUAL = 0
    GREATER = 1


class GenKind(enum.Enum):
    INTERIOR = "interior"
    CYLINDRICAL = "cylindrical"


class GenType(enum.Enum):
    """Angular position of a cylindrical generator on its Morse circle."""

    E = "e"
    """Minimum of the Morse term; degree 0."""

    F = "f"
    """Maximum of the Morse term; degree 1."""


class AlphaCoords(NamedTuple):
    """Coordinates adapted to a cylindrical end with normal α."""

    p_alpha: float
    theta_alpha: float
    p_perp: float
    theta_perp: float


class TorusCoords(NamedTuple):
    """Universal cover coordinates (p₁, θ₁, p₂, θ₂) of (ℂ*)²."""

    p1: float
    theta1: float
    p2: float
    theta2: float


@dataclass(frozen=True)
class SheetLabel:
    """Label ``(j0, j1)`` of one of the |α|² copies of a diagonal-end generator."""

    j0: int
    j1: int
    type: GenType = GenType.E

    def __post_init__(self) -> None:
        if self.j1 < self.j0:
            raise ValueError(f"Expected j1 >= j0; got ({self.j0}, {self.j1})")

    def __str__(self) -> str:
        return f"x^{{{self.j0},{self.j1}}}x^{self.type.value}"
