from __future__ import annotations

from fractions import Fraction
from typing import Any

import pytest

from tropwrap import curves
from tropwrap.exactnum import NovikovField
from tropwrap.mirror_ring import CurvePresentation, present_curve
from tropwrap.tropical import TropCurveInput


@pytest.fixture(scope="session")
def pants() -> TropCurveInput:
    return curves.pants()


@pytest.fixture(scope="session")
def lq() -> TropCurveInput:
    return curves.lq(theta_q=0)


@pytest.fixture(scope="session")
def pants_ring(pants: TropCurveInput) -> CurvePresentation:
    return present_curve(pants)


@pytest.fixture(scope="session")
def lq_ring(lq: TropCurveInput) -> CurvePresentation:
    return present_curve(lq)


@pytest.fixture(scope="session")
def field() -> NovikovField:
    return NovikovField(cutoff=20)


def close(x: Any, y: Any, below: int | Fraction = 30) -> bool:
    """Whether ``x`` and ``y`` agree on every term of valuation below ``below``."""
    return (x - y).truncate(below).is_zero
