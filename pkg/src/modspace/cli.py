"""``modspace`` command-line front end.

Exit codes: 0 success, 1 failed criterion, 2 unreadable input or bad
configuration, 3 grid mismatch, 4 invalid exponent, 5 other numerical errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from . import errors
from .fieldio import FieldFormatError, read_field, write_field
from .gabor import GaborSystem, Window, gaussian_window, modulation_norm, stft
from .lattice import SampledField
from .psdo import amplitude_mod_norm, op_from_amplitude, op_from_symbol, reduce_amplitude
from .runtime import deterministic
from .spectral import schatten_quasi_norm, singular_values, weighted_m2_conjugate
from .trace import DimSplit, stft_trace_identity_residual, trace_map
from .verify import SUITES, run_suite
from .weights import from_json

EXIT_CRITERION = 1
EXIT_CONFIG = 2
EXIT_GRID = 3
EXIT_EXPONENT = 4
EXIT_NUMERIC = 5


class ConfigError(Exception):
    pass


class ExponentError(Exception):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("modspace.schemas").joinpath(f"{name}.schema.json").read_text())


def load_manifest(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
        jsonschema.validate(doc, load_schema("manifest"))
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise ConfigError(f"manifest {path}: {getattr(exc, 'message', exc)}") from exc
    return doc


def _exponents(raw, default) -> tuple[float, ...]:
    raw = default if raw is None else raw
    vals = raw if isinstance(raw, list) else [raw]
    out = tuple(math.inf if v == "inf" else float(v) for v in vals)
    if any(not e > 0 for e in out):
        raise ExponentError(f"exponents must lie in (0, inf], got {vals}")
    return out


def _print_number(x: float) -> None:
    print(f"{x:.17g}")


def _window_for(field: SampledField, path: str | None) -> Window:
    if path is None:
        return gaussian_window(field.spec)
    win = Window(read_field(path))
    if win.spec != field.spec:
        raise errors.GridMismatch(f"window grid (N={win.spec.n}, h={win.spec.step}) differs from the field's")
    return win


def cmd_stft(args) -> int:
    f = read_field(args.input)
    win = _window_for(f, args.window)
    v = stft(f, win)
    # frequency axes share N; the file records the spatial step
    write_field(args.output, SampledField(f.spec.with_dim(2 * f.spec.dim), v.values))
    return 0


def cmd_norm(args) -> int:
    manifest = load_manifest(args.manifest) if args.manifest else {}
    f = read_field(args.input)
    kind = manifest.get("kind", "amplitude_norm" if args.amplitude else "modulation_norm")
    weight = from_json(manifest.get("weight"))
    flavor = manifest.get("flavor", "M")
    strides = tuple(manifest.get("strides", (1, 1)))
    if kind == "amplitude_norm":
        p = _exponents(manifest.get("p"), [2.0, 2.0, 2.0])
        q = _exponents(manifest.get("q"), [2.0, 2.0, 2.0])
        value = amplitude_mod_norm(f, None, p, q, weight, flavor, strides)
    elif kind == "modulation_norm":
        p = _exponents(manifest.get("p"), 2.0)
        q = _exponents(manifest.get("q"), 2.0)
        d = f.spec.dim
        p = p * d if len(p) == 1 else p
        q = q * d if len(q) == 1 else q
        value = modulation_norm(f, gaussian_window(f.spec), p, q, weight, flavor, strides)
    else:
        raise ConfigError(f"manifest kind {kind!r} is not a norm")
    _print_number(value)
    return 0


def cmd_trace_check(args) -> int:
    f = read_field(args.input)
    split = DimSplit(*args.split, z=tuple(args.z) if args.z else None)
    spec = f.spec
    phi0 = gaussian_window(spec.with_dim(split.d0))
    phi2 = gaussian_window(spec.with_dim(split.d2))
    residual = stft_trace_identity_residual(f, split, phi0, phi2)
    if args.output:
        write_field(args.output, trace_map(f, split))
    _print_number(residual)
    return 0 if args.tol is None or residual <= args.tol else EXIT_CRITERION


def cmd_psdo_reduce(args) -> int:
    a = read_field(args.input)
    write_field(args.output, reduce_amplitude(a))
    return 0


def _operator(symbol: SampledField, amplitude: bool, t: float):
    return op_from_amplitude(symbol) if amplitude else op_from_symbol(symbol, t)


def cmd_psdo_apply(args) -> int:
    sym = read_field(args.symbol)
    f = read_field(args.field)
    op = _operator(sym, args.amplitude, args.t)
    if op.domain != f.spec:
        raise errors.GridMismatch("field grid differs from the operator's grid")
    write_field(args.output, op.apply(f))
    return 0


def cmd_schatten(args) -> int:
    sym = read_field(args.input)
    p = _exponents(args.p, None)[0]
    op = _operator(sym, args.amplitude, args.t)
    if args.manifest:
        manifest = load_manifest(args.manifest)
        spec = op.domain
        system = GaborSystem(spec, *manifest.get("strides", (1, 1)), gaussian_window(spec)).with_dual()
        op = weighted_m2_conjugate(op, from_json(manifest.get("omega1")), from_json(manifest.get("omega2")), system)
    _print_number(schatten_quasi_norm(singular_values(op), p))
    return 0


def _print_table(report: dict) -> None:
    print(f"{'id':>3}  {'criterion':<42} result")
    for c in report["criteria"]:
        print(f"{c['id']:>3}  {c['name']:<42} {'PASS' if c['passed'] else 'FAIL'}")
    print(f"suite {report['suite']}: {'PASS' if report['passed'] else 'FAIL'}")


def cmd_verify(args) -> int:
    manifest = load_manifest(args.manifest) if args.manifest else {}
    try:
        with deterministic(args.deterministic):
            report = run_suite(args.suite, manifest, args.deterministic)
    except ValueError as exc:
        if isinstance(exc, errors.ModspaceError):
            raise
        raise ConfigError(str(exc)) from exc
    jsonschema.validate(report, load_schema("report"))
    Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _print_table(report)
    return 0 if report["passed"] else EXIT_CRITERION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modspace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stft", help="short-time Fourier transform of a field file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--window", help="window field file (default: Gaussian on the input grid)")
    p.set_defaults(func=cmd_stft)

    p = sub.add_parser("norm", help="modulation or amplitude norm of a field file")
    p.add_argument("input")
    p.add_argument("manifest", nargs="?")
    p.add_argument("--amplitude", action="store_true", help="treat a manifest-less input as an amplitude")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("trace-check", help="STFT trace identity residual")
    p.add_argument("input")
    p.add_argument("--split", type=int, nargs=3, metavar=("D1", "D2", "D3"), required=True)
    p.add_argument("--z", type=float, nargs="+")
    p.add_argument("--tol", type=float)
    p.add_argument("--output", help="write the trace field here")
    p.set_defaults(func=cmd_trace_check)

    p = sub.add_parser("psdo-reduce", help="reduce an amplitude to its Kohn-Nirenberg symbol")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_psdo_reduce)

    p = sub.add_parser("psdo-apply", help="apply a pseudo-differential operator to a field")
    p.add_argument("symbol")
    p.add_argument("field")
    p.add_argument("output")
    p.add_argument("--t", type=float, default=0.0, help="quantization parameter: 0, 0.5 or 1")
    p.add_argument("--amplitude", action="store_true", help="symbol file is an amplitude on 3d axes")
    p.set_defaults(func=cmd_psdo_apply)

    p = sub.add_parser("schatten", help="Schatten quasi-norm of an operator")
    p.add_argument("input")
    p.add_argument("--p", default="2", help="exponent in (0, inf]")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--amplitude", action="store_true")
    p.add_argument("--manifest", help="weights omega1/omega2 and strides for the M^2 conjugation")
    p.set_defaults(func=cmd_schatten)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p.add_argument("--manifest")
    p.add_argument("--report", default="modspace-report.json")
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FieldFormatError, ConfigError, OSError) as exc:
        code, msg = EXIT_CONFIG, exc
    except ExponentError as exc:
        code, msg = EXIT_EXPONENT, exc
    except (errors.GridMismatch, errors.MismatchedGrid, errors.ShapeMismatch, errors.DimensionMismatch) as exc:
        code, msg = EXIT_GRID, exc
    except errors.ExponentViolation as exc:
        code, msg = EXIT_EXPONENT, exc
    except (errors.ModspaceError, errors.NumericalFailure) as exc:
        code, msg = EXIT_NUMERIC, exc
    except ValueError as exc:
        code, msg = EXIT_CONFIG, exc
    print(f"modspace: {type(msg).__name__}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
