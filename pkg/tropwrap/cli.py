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

"""Command line interface.

Every command prints one report: a JSON document with sorted keys (or a
flattened text rendition) holding the command, the echoed configuration,
the results and every warning raised while computing them.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Sequence

from tropwrap import curves, energy, hamiltonian, mirror_ring, render, tropical
from tropwrap.exceptions import (
    ConfigInvalid,
    DomainError,
    Error,
    NotSmooth,
    NumericError,
    ParseError,
    SmoothnessWarning,
    TropwrapWarning,
)
from tropwrap.tropical import TropCurveInput

__all__ = ["SessionConfig", "Report", "build_parser", "main", "COMMANDS"]

_log = logging.getLogger(__name__)

EXIT_DOMAIN = 2
EXIT_NUMERIC = 3
DEFAULT_A = (-1.0, -2.0)


@dataclass(frozen=True)
class SessionConfig:
    command: str
    curve: str = "pants"
    input: str | None = None
    params: tuple[tuple[str, str], ...] = ()
    cutoff: Fraction = Fraction(50)
    R: float | None = None
    """``None`` picks ``max(10, 2·k·M + 1)``."""

    k: int = 1
    a: tuple[float, float] = DEFAULT_A
    phi: str = "auto"
    format: str = "json"
    seed: int = 0
    out: str | None = None
    klass: str = "opposite-ends"
    disk: str | None = None
    g: str | None = None
    end: int = 0

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> SessionConfig:
        """Validates the parsed arguments.

        Raises:
            ConfigInvalid: On malformed ``--param``, ``--a`` or ``--cutoff`` values.
        """
        params = []
        for item in ns.param or ():
            name, sep, value = item.partition("=")
            if not sep or not name:
                raise ConfigInvalid(f"--param expects name=value; got {item!r}")
            params.append((name.strip(), value.strip()))

        try:
            a = tuple(float(x) for x in ns.a.split(",")) if ns.a else DEFAULT_A
            cutoff = Fraction(ns.cutoff)
        except ValueError as exc:
            raise ConfigInvalid(f"Invalid numeric option: {exc}") from exc
        if len(a) != 2:
            raise ConfigInvalid(f"--a expects two components; got {ns.a!r}")

        return cls(
            command=ns.command,
            curve=ns.curve,
            input=ns.input,
            params=tuple(params),
            cutoff=cutoff,
            R=ns.R,
            k=ns.k,
            a=(a[0], a[1]),
            phi=ns.phi,
            format=ns.format,
            seed=ns.seed,
            out=ns.out,
            klass=getattr(ns, "klass", "opposite-ends"),
            disk=getattr(ns, "disk", None),
            g=getattr(ns, "g", None),
            end=getattr(ns, "end", 0),
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "curve": self.input or self.curve,
            "params": {k: v for k, v in self.params},
            "cutoff": str(self.cutoff),
            "R": self.R,
            "k": self.k,
            "a": list(self.a),
            "phi": self.phi,
            "format": self.format,
            "seed": self.seed,
        }


@dataclass
class Report:
    command: str
    config: dict[str, Any]
    results: Any = None
    warnings: list[dict[str, str]] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)
    """Wall-clock seconds of the command; excluded from determinism comparisons."""

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "warnings": self.warnings,
            "timing": self.timing,
        }

    def dumps(self, fmt: str = "json") -> str:
        if fmt == "text":
            return "\n".join(_flatten(self.to_json())) + "\n"
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(obj: Any, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for key in sorted(obj):
            lines.extend(_flatten(obj[key], f"{prefix}.{key}" if prefix else str(key)))
        return lines
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, x in enumerate(obj):
            lines.extend(_flatten(x, f"{prefix}[{i}]"))
        return lines
    return [f"{prefix}: {json.dumps(obj, ensure_ascii=False)}"]


# * Helpers


def load_input(cfg: SessionConfig) -> TropCurveInput:
    """The curve named by ``--input`` or ``--curve`` with ``--param`` bindings applied.

    Raises:
        ParseError: For unknown curves or malformed files and bindings.
    """
    f = curves.load_curve(cfg.input) if cfg.input else curves.builtin(cfg.curve)
    return curves.with_parameters(f, dict(cfg.params))


def _perturbation(f: TropCurveInput, cfg: SessionConfig) -> hamiltonian.PerturbationConfig:
    R = cfg.R
    if R is None:
        gap = f.approx(tropical.coefficient_gap(f))
        R = max(10.0, 2 * cfg.k * gap + 1)

    phi: Any = "auto"
    if cfg.phi != "auto":
        try:
            phi = [float(x) for x in cfg.phi.split(",")]
        except ValueError:
            try:
                with open(cfg.phi, encoding="utf-8") as fp:
                    phi = {int(k): float(v) for k, v in json.load(fp).items()}
            except (OSError, ValueError, AttributeError) as exc:
                raise ConfigInvalid(f"--phi must be 'auto', a list or a JSON file: {exc}") from exc
    return hamiltonian.PerturbationConfig.create(f, R=R, k=cfg.k, a=cfg.a, phi=phi)


def _bind_free_phases(f: TropCurveInput) -> TropCurveInput:
    free = sorted(f.phase_symbols() - set(f.phase_values))
    if not free:
        return f
    warnings.warn(f"Unbound phases {free} set to 0", TropwrapWarning, stacklevel=2)
    return curves.with_parameters(f, {sym: "0" for sym in free})


def named_class(f: TropCurveInput, name: str) -> tuple[int, ...]:
    """``all-ends``, ``opposite-ends`` (end 1 and its opposite) or ``n0,n1,...``.

    Raises:
        ConfigInvalid: If ``opposite-ends`` has no opposite end to pair with.
    """
    ends = tropical.cylindrical_ends(f)
    if name == "all-ends":
        return (1,) * len(ends)
    if name == "opposite-ends":
        base = ends[1 % len(ends)]
        for end in ends:
            if end.alpha == (-base.alpha[0], -base.alpha[1]):
                return tuple(int(e.index in (base.index, end.index)) for e in ends)
        raise ConfigInvalid(f"End {base.index} of {f.name or '<input>'} has no opposite end")
    try:
        return tuple(int(x) for x in name.split(","))
    except ValueError as exc:
        raise ConfigInvalid(f"--class expects a name or integers; got {name!r}") from exc


def _filtration(f: TropCurveInput) -> mirror_ring.Filtration:
    if f.name == "pants":
        return mirror_ring.Filtration.PANTS
    if f.name == "lq":
        return mirror_ring.Filtration.LQ
    return mirror_ring.Filtration.BOX


# * Commands


def cmd_analyze(cfg: SessionConfig) -> Any:
    f = load_input(cfg)
    polygon = tropical.newton_polygon(f)
    smooth = tropical.check_smoothness(f)
    out: dict[str, Any] = {
        "newton_polygon": {
            "vertices": [list(v) for v in polygon.vertices],
            "area": str(polygon.area),
            "boundary_lattice_points": polygon.boundary_lattice_points,
            "interior_lattice_points": polygon.interior_lattice_points,
        },
        "smooth": smooth,
        "M": str(tropical.coefficient_gap(f)),
    }
    if not smooth:
        defects = tropical.boundary_defects(f)
        warnings.warn(str(NotSmooth(*defects)), SmoothnessWarning, stacklevel=2)
        out["defects"] = [list(d) for d in defects]
        return out

    g, b = tropical.genus_and_ends(f)
    sk = tropical.skeleton(f)
    out.update(
        genus=g,
        ends_count=b,
        interior_generators=2 * g + b - 2,
        skeleton=sk.to_json(f.basis),
        balanced=sk.is_balanced(),
        ends=[
            {**end.to_json(), "asymptotic": end.asymptotic().to_json()}
            for end in tropical.cylindrical_ends(f)
        ],
    )
    return out


def cmd_generators(cfg: SessionConfig) -> Any:
    f = load_input(cfg)
    pert = _perturbation(f, cfg)
    gens = hamiltonian.enumerate_generators(f, pert)
    if cfg.format == "svg":
        return render.render_svg(f, gens)
    return {"perturbation": pert.to_json(), "generators": [g.to_json() for g in gens]}


def cmd_mirror_check(cfg: SessionConfig) -> Any:
    f = _bind_free_phases(load_input(cfg))
    curve = mirror_ring.present_curve(f, cutoff=cfg.cutoff)
    filtration = _filtration(f)
    dims, certificates, checks = [], [], []
    for k in range(1, cfg.k + 1):
        span = mirror_ring.filtered_dim(curve, k, filtration)
        dims.append(span.dim)
        certificates.append(span.to_json())
        if filtration is mirror_ring.Filtration.LQ:
            candidates = mirror_ring.hms_lq_candidates(curve, k)
        elif filtration is mirror_ring.Filtration.PANTS:
            candidates = mirror_ring.hms_pants_candidates(curve, k)
        else:
            continue
        check = mirror_ring.verify_basis(curve, candidates, filtration, k)
        checks.append({"k": k, "basis": check.ok, "rank": check.rank})

    if filtration is mirror_ring.Filtration.PANTS:
        for level in range(cfg.k):
            g = {(level + 1, level): 1, (level, level + 1): 1, (level, level): -1}
            checks.append({"l": level, "table_identity": mirror_ring.reduce(g, curve).is_zero})

    a1, c = mirror_ring.solve_pop_coefficients()
    return {
        "filtration": filtration.value,
        "dims": dims,
        "basis_certificates": certificates,
        "table_checks": checks,
        "pop_solve": [str(a1), str(c)],
    }


def cmd_obstruction(cfg: SessionConfig) -> Any:
    f = load_input(cfg)
    result = energy.obstruction_check(f, named_class(f, cfg.klass))
    return {
        "obstruction": result.to_json(),
        "kernel": [list(n) for n in energy.kernel_basis(f)],
        "certificate": energy.boundary_certificate(f.name),
    }


def cmd_energy(cfg: SessionConfig) -> Any:
    if not cfg.disk:
        raise ConfigInvalid("energy needs --disk <file.json>")
    try:
        with open(cfg.disk, encoding="utf-8") as fp:
            data = energy.DiskBoundaryData.from_json(json.load(fp))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"Cannot read disk file {cfg.disk!r}: {exc}") from exc
    value = energy.disk_energy(data)
    try:
        approx: float | None = float(value)
    except TypeError:
        approx = None
    return {"energy": str(value), "energy_float": approx}


def cmd_pole_profile(cfg: SessionConfig) -> Any:
    if not cfg.g:
        raise ConfigInvalid("pole-profile needs --g <laurent expression>")
    f = _bind_free_phases(load_input(cfg))
    curve = mirror_ring.present_curve(f, cutoff=cfg.cutoff)
    element = mirror_ring.reduce(mirror_ring.parse_laurent(cfg.g, curve), curve)
    end = mirror_ring.end_of(f, cfg.end)
    ep = mirror_ring.end_parametrization(curve, end)
    w, lead = mirror_ring.pole_profile(element, ep)
    return {
        "end": end.to_json(),
        "puncture": str(ep.puncture),
        "slope": w,
        "leading": lead.to_json(),
        "leading_text": str(lead),
    }


def cmd_render(cfg: SessionConfig) -> Any:
    f = load_input(cfg)
    gens: Sequence[hamiltonian.FloerGenerator] = ()
    if cfg.k > 0:
        gens = hamiltonian.enumerate_generators(f, _perturbation(f, cfg))
    return render.render_svg(f, gens)


COMMANDS: Dict[str, Callable[[SessionConfig], Any]] = {
    "analyze": cmd_analyze,
    "generators": cmd_generators,
    "mirror-check": cmd_mirror_check,
    "obstruction": cmd_obstruction,
    "energy": cmd_energy,
    "pole-profile": cmd_pole_profile,
    "render": cmd_render,
}


def run(cfg: SessionConfig) -> tuple[Report | str, int]:
    """Runs one command, collecting warnings into the report."""
    report = Report(cfg.command, cfg.to_json())
    code = 0
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TropwrapWarning)
        try:
            report.results = COMMANDS[cfg.command](cfg)
        except DomainError as exc:
            report.results = {"error": type(exc).__name__, "message": str(exc)}
            code = EXIT_DOMAIN
        except NumericError as exc:
            report.results = {"error": type(exc).__name__, "message": str(exc)}
            code = EXIT_NUMERIC
    elapsed = time.perf_counter() - start
    report.timing = {"seconds": round(elapsed, 6)}
    _log.info("%s finished in %.3f s", cfg.command, elapsed)

    report.warnings = [
        {"category": w.category.__name__, "message": str(w.message)}
        for w in caught
        if issubclass(w.category, TropwrapWarning)
    ]
    if isinstance(report.results, str) and code == 0:
        return report.results, code
    return report, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropwrap",
        description="Tropical skeletons, wrapped Floer generators and mirror quotient rings.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log debug output.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="Curve JSON file; overrides --curve.")
    common.add_argument("--curve", default="pants", help="Built-in curve: pants or lq.")
    common.add_argument(
        "--param", action="append", metavar="NAME=VALUE", help="Bind a curve parameter."
    )
    common.add_argument("--k", type=int, default=1, help="Wrapping number / filtration level.")
    common.add_argument("--R", type=float, default=None, help="Hamiltonian scale.")
    common.add_argument("--a", default=None, help="Translation vector as 'a1,a2'.")
    common.add_argument("--phi", default="auto", help="'auto', 'φ0,φ1,...' or a JSON file.")
    common.add_argument("--cutoff", default="50", help="Novikov cutoff valuation.")
    common.add_argument("--format", choices=("json", "text", "svg"), default="json")
    common.add_argument("--seed", type=int, default=0, help="Recorded in every report.")
    common.add_argument("--out", "-o", help="Write the report here instead of stdout.")

    for name, help_ in (
        ("analyze", "Newton polygon, skeleton, ends and interior count."),
        ("generators", "Enumerate Floer generators."),
        ("mirror-check", "Filtered dimensions and basis checks of the mirror ring."),
        ("render", "SVG of the skeleton and generator ladders."),
    ):
        subparsers.add_parser(name, parents=[common], help=help_)

    obstruction = subparsers.add_parser(
        "obstruction", parents=[common], help="η-obstruction of a boundary class."
    )
    obstruction.add_argument(
        "--class", dest="klass", default="opposite-ends", help="all-ends, opposite-ends or n0,n1"
    )

    energy_ = subparsers.add_parser("energy", parents=[common], help="Energy of a disk boundary.")
    energy_.add_argument("--disk", required=True, help="Disk boundary JSON file.")

    pole = subparsers.add_parser("pole-profile", parents=[common], help="Pole order along an end.")
    pole.add_argument("--g", required=True, help="Laurent polynomial in z1, z2 (and Q).")
    pole.add_argument("--end", type=int, default=0, help="End index.")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        cfg = SessionConfig.from_namespace(args)
    except Error as exc:
        _log.error("%s", exc)
        return EXIT_DOMAIN

    output, code = run(cfg)
    text = output if isinstance(output, str) else output.dumps(cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)
    if code:
        _log.error("%s failed with exit code %d", cfg.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
