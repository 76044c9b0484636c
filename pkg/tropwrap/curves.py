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

"""Built-in curves and the JSON curve format.

Curve files look like::

    {
      "terms": [
        {"exp": [0, 0], "log_norm": "0", "phase_pi": "0"},
        {"exp": [1, 1], "log_norm": "-log_q", "phase_pi": "-theta_q"}
      ],
      "parameters": {"log_q": "1", "theta_q": "1/3"}
    }

A parameter used by a log-norm becomes a valuation generator; its value is a
rational (``"3/2"``), a rational interval (``["1", "11/10"]``) or a closed
form such as ``"log(2)"`` evaluated in interval arithmetic. A parameter used
by a phase is bound to a rational multiple of π.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Any, Callable, Mapping

import sympy

from tropwrap.exactnum import (
    Generator,
    IntervalGenerator,
    MpmathGenerator,
    RationalGenerator,
    Valuation,
    ValuationBasis,
)
from tropwrap.exceptions import ParseError
from tropwrap.tropical import CoeffData, TropCurveInput

__all__ = ["pants", "lq", "builtin", "load_curve", "parse_curve", "with_parameters", "BUILTINS"]

LOG_Q = "log_q"
THETA_Q = "theta_q"
"""Phase parameter of L_q: ``arg q / π``."""


def pants() -> TropCurveInput:
    """``1 − z₁ − z₂``."""
    return TropCurveInput(
        {
            (0, 0): CoeffData(),
            (1, 0): CoeffData(phase=Valuation.const(1)),
            (0, 1): CoeffData(phase=Valuation.const(1)),
        },
        name="pants",
    )


def lq(
    log_q: Generator | Fraction | int = 1, theta_q: Fraction | int | None = None
) -> TropCurveInput:
    """``1 − z₁ − z₂ + q⁻¹z₁z₂`` with ``arg q = π·theta_q``."""
    gen = log_q if isinstance(log_q, Generator) else RationalGenerator(LOG_Q, Fraction(log_q))
    phases = {} if theta_q is None else {THETA_Q: Fraction(theta_q)}
    return TropCurveInput(
        {
            (0, 0): CoeffData(),
            (1, 0): CoeffData(phase=Valuation.const(1)),
            (0, 1): CoeffData(phase=Valuation.const(1)),
            (1, 1): CoeffData(-Valuation.symbol(gen.symbol), -Valuation.symbol(THETA_Q)),
        },
        basis=ValuationBasis([gen]),
        phase_values=phases,
        name="lq",
    )


BUILTINS: dict[str, Callable[[], TropCurveInput]] = {"pants": pants, "lq": lq}


def builtin(name: str) -> TropCurveInput:
    try:
        return BUILTINS[name]()
    except KeyError as exc:
        raise ParseError(
            f"Unknown built-in curve {name!r}; expected one of {sorted(BUILTINS)}"
        ) from exc


_IV_FUNCS = {sympy.log: "log", sympy.exp: "exp", sympy.sin: "sin", sympy.cos: "cos"}


def _iv_eval(expr: sympy.Expr, iv: Any) -> Any:
    """Evaluates a closed-form constant in an mpmath interval context."""
    if expr.is_Rational:
        return iv.mpf(int(expr.p)) / int(expr.q)
    if expr is sympy.pi:
        return iv.pi
    if expr is sympy.E:
        return iv.e
    if expr.is_Add:
        return sum((_iv_eval(arg, iv) for arg in expr.args), iv.mpf(0))
    if expr.is_Mul:
        result = iv.mpf(1)
        for arg in expr.args:
            result = result * _iv_eval(arg, iv)
        return result
    if expr.is_Pow:
        base, exp = expr.args
        if exp.is_Integer:
            return _iv_eval(base, iv) ** int(exp)
        return iv.exp(_iv_eval(exp, iv) * iv.log(_iv_eval(base, iv)))
    for func, name in _IV_FUNCS.items():
        if isinstance(expr, func):
            return getattr(iv, name)(_iv_eval(expr.args[0], iv))
    raise ParseError(f"Unsupported constant {expr}")


def _generator(symbol: str, value: Any) -> Generator:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ParseError(f"Interval for {symbol!r} needs two ends; got {value!r}")
        try:
            return IntervalGenerator(symbol, Fraction(str(value[0])), Fraction(str(value[1])))
        except ValueError as exc:
            raise ParseError(f"Invalid interval for {symbol!r}: {value!r}") from exc

    text = str(value)
    try:
        return RationalGenerator(symbol, Fraction(text))
    except ValueError:
        pass

    try:
        expr = sympy.sympify(text, rational=True)
    except (sympy.SympifyError, SyntaxError) as exc:
        raise ParseError(f"Cannot parse value {text!r} of {symbol!r}") from exc
    if expr.free_symbols:
        raise ParseError(f"Value of {symbol!r} must be a constant; got {text!r}")
    gen = MpmathGenerator(symbol, lambda iv, e=expr: _iv_eval(e, iv), label=text)
    gen.enclose(53)
    return gen


def _phase_value(symbol: str, value: Any) -> Fraction:
    try:
        return Fraction(str(value))
    except ValueError as exc:
        raise ParseError(f"Phase parameter {symbol!r} must be rational; got {value!r}") from exc


def parse_curve(obj: Mapping[str, Any], name: str = "") -> TropCurveInput:
    """Builds a :class:`TropCurveInput` from the JSON curve format.

    Raises:
        ParseError: On any schema violation.
    """
    try:
        raw_terms = obj["terms"]
    except (KeyError, TypeError) as exc:
        raise ParseError("Curve input needs a 'terms' array") from exc
    params: Mapping[str, Any] = obj.get("parameters", {}) or {}

    terms: dict[tuple[int, int], CoeffData] = {}
    for raw in raw_terms:
        try:
            m1, m2 = (int(x) for x in raw["exp"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"Invalid exponent in term {raw!r}") from exc
        if (m1, m2) in terms:
            raise ParseError(f"Exponent {(m1, m2)!r} appears twice")
        terms[(m1, m2)] = CoeffData(
            Valuation.parse(raw.get("log_norm", "0")), Valuation.parse(raw.get("phase_pi", "0"))
        )

    norm_symbols = {s for d in terms.values() for s in d.log_norm.symbols} - {"1"}
    phase_symbols = {s for d in terms.values() for s in d.phase.symbols} - {"1"}
    both = norm_symbols & phase_symbols
    if both:
        raise ParseError(f"Parameters {sorted(both)!r} used both as log-norm and phase")

    missing = sorted(norm_symbols - set(params))
    if missing:
        raise ParseError(f"Log-norm parameters {missing!r} have no value")

    basis = ValuationBasis([_generator(sym, params[sym]) for sym in sorted(norm_symbols)])
    phases = {sym: _phase_value(sym, params[sym]) for sym in sorted(phase_symbols) if sym in params}
    return TropCurveInput(terms, basis=basis, phase_values=phases, name=name)


def load_curve(path: str | os.PathLike[str]) -> TropCurveInput:
    """Reads a curve file.

    Raises:
        ParseError: If the file is not valid JSON or violates the schema.
    """
    try:
        with open(path, encoding="utf-8") as fp:
            obj = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"Cannot read curve file {os.fspath(path)!r}: {exc}") from exc
    return parse_curve(obj, name=os.path.basename(os.fspath(path)))


def with_parameters(curve: TropCurveInput, bindings: Mapping[str, Any]) -> TropCurveInput:
    """Rebinds parameters of ``curve``; phase symbols get rational values.

    Raises:
        ParseError: For a symbol the curve does not use, or a malformed value.
    """
    if not bindings:
        return curve

    phases = dict(curve.phase_values)
    gens = {gen.symbol: gen for gen in curve.basis.generators}
    for sym, value in bindings.items():
        if sym in curve.phase_symbols():
            phases[sym] = _phase_value(sym, value)
        elif sym in gens:
            gens[sym] = _generator(sym, value)
        else:
            raise ParseError(f"Curve {curve.name or '<input>'} has no parameter {sym!r}")
    return TropCurveInput(
        curve.terms,
        basis=ValuationBasis(gens.values(), curve.basis.precision),
        phase_values=phases,
        name=curve.name,
    )
