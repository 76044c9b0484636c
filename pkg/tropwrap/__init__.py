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

"""
tropwrap - Tropical skeletons, wrapped Floer generators and mirror rings
========================================================================

Analyse a curve:

    >>> from tropwrap import curves, tropical
    >>> f = curves.pants()
    >>> tropical.genus_and_ends(f)
    (0, 3)

Check the mirror ring of L_q:

    >>> from tropwrap import mirror_ring
    >>> ring = mirror_ring.present_curve(curves.lq(theta_q=0))
    >>> mirror_ring.filtered_dim(ring, 2).dim
    7
"""  # noqa

from __future__ import annotations

import sys

from tropwrap.curves import builtin, load_curve
from tropwrap.exactnum import NovikovField, NovikovScalar, Valuation, ValuationBasis
from tropwrap.tropical import TropCurveInput

try:
    from tropwrap._version import version as __version__
except ImportError:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = [
    "NovikovField",
    "NovikovScalar",
    "TropCurveInput",
    "Valuation",
    "ValuationBasis",
    "builtin",
    "load_curve",
]

if sys.version_info < (3, 11):  # https://github.com/Bobronium/fastenum/issues/2
    import fastenum

    fastenum.enable()  # 50% faster enum comparisons
