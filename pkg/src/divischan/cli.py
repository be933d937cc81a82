"""Command line front end.

Subcommands::

    divischan classify --input channel.json
    divischan sweep --model collision --t0 0 --t1 3.14159 --steps 64
    divischan slice --sum 0.4 --resolution 81
    divischan gaussian tuple --input form.json

Channel JSON is ``{"repr": "pauli"|"choi"|"kraus", "data": [...]}``; Gaussian
forms use the field names of :class:`divischan.gaussian.GaussianForm`.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import TOL, __version__
from . import gaussian as gs
from .chanrep import pauli_channel, ptm_from_choi, ptm_from_kraus
from .divisibility import classify
from .dynmaps import (
    JcParams,
    JcPropagator,
    TruncationInsufficient,
    collision_not_map,
    dephasing_map,
    sweep,
    write_csv,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_TRUNCATION = 4

EPILOG = """exit codes:
  0  success
  2  input could not be parsed (malformed JSON, wrong shapes, bad options)
  3  input parsed but is not a valid channel (report or error still printed)
  4  Fock space truncation insufficient for the requested sweep

environment:
  DIVISCHAN_TOL  overrides the default tolerance (1e-9)
"""


class ParseError(ValueError):
    pass


def _tolerance() -> float:
    raw = os.environ.get("DIVISCHAN_TOL")
    if raw is None:
        return TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise ParseError(f"DIVISCHAN_TOL is not a number: {raw!r}") from exc
    if not (tol > 0 and math.isfinite(tol)):
        raise ParseError("DIVISCHAN_TOL must be positive and finite")
    return tol


def _read_json(path: str | None):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(str(exc)) from exc


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ParseError("complex numbers are [re, im] pairs")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def channel_from_json(obj) -> np.ndarray:
    """PTM from the channel JSON schema."""
    if not isinstance(obj, dict) or "repr" not in obj or "data" not in obj:
        raise ParseError('expected {"repr": ..., "data": [...]}')
    data = obj["data"]
    try:
        if obj["repr"] == "pauli":
            arr = np.asarray(data, dtype=float)
            if arr.size != 16:
                raise ParseError("pauli data needs 16 reals")
            return arr.reshape(4, 4)
        if obj["repr"] == "choi":
            vals = np.array([_complex(x) for x in data])
            if vals.size != 16:
                raise ParseError("choi data needs 16 complex entries")
            return ptm_from_choi(vals.reshape(4, 4))
        if obj["repr"] == "kraus":
            ks = []
            for k in data:
                flat = [_complex(x) for x in k] if len(k) == 4 else None
                if flat is None:
                    raise ParseError("each Kraus operator needs 4 complex entries")
                ks.append(np.array(flat).reshape(2, 2))
            if not ks:
                raise ParseError("empty Kraus list")
            return ptm_from_kraus(ks)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown repr {obj['repr']!r}")


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


# -- subcommands -------------------------------------------------------------------


def cmd_classify(args) -> int:
    tol = _tolerance()
    e = channel_from_json(_read_json(args.input))
    report = classify(e, tol)
    _emit(_dump(report.to_dict()), args.output)
    return EXIT_OK if report.in_c else EXIT_INVALID


def _channel_source(args):
    if args.model == "collision":
        return collision_not_map
    if args.model == "dephasing":
        return lambda t: dephasing_map(t, args.gamma)
    p = JcParams(args.alpha, args.g, args.omega_a, args.omega_f, args.n_fock)
    prop = JcPropagator(p)
    return prop.channel


def cmd_sweep(args) -> int:
    if args.steps < 2:
        raise ParseError("steps must be at least 2")
    source = _channel_source(args)
    try:
        points = sweep(source, args.t0, args.t1, args.steps, strict=(TruncationInsufficient,))
    except TruncationInsufficient as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    if args.format == "json":
        rows = [
            {"t": p.t, "label": None if p.is_gap else p.report.label, "error": p.error,
             **({} if p.is_gap else p.report.to_dict())}
            for p in points
        ]
        _emit(_dump(rows), args.output)
    else:
        buf = io.StringIO()
        write_csv(points, buf)
        _emit(buf.getvalue(), args.output)
    return EXIT_OK


def slice_points(total: float, resolution: int, tol: float = TOL) -> list[tuple[np.ndarray, str, bool]]:
    """Grid points of the plane l1 + l2 + l3 = total inside the tetrahedron."""
    if resolution < 2:
        raise ParseError("resolution must be at least 2")
    grid = np.linspace(-1.0, 1.0, resolution)
    out = []
    for l1 in grid:
        for l2 in grid:
            l3 = total - l1 - l2
            lam = np.array([l1, l2, l3])
            if abs(l3) > 1 + tol:
                continue
            corners = (1 + lam.sum(), 1 + lam[0] - lam[1] - lam[2], 1 - lam[0] + lam[1] - lam[2],
                       1 - lam[0] - lam[1] + lam[2])
            if min(corners) < -tol:
                continue
            rep = classify(pauli_channel(lam), tol)
            out.append((lam, rep.label, bool(rep.eb)))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cmd_slice(args) -> int:
    pts = slice_points(args.sum, args.resolution, _tolerance())
    if args.format == "json":
        _emit(_dump([{"l1": p[0][0], "l2": p[0][1], "l3": p[0][2], "class": p[1], "eb": p[2]} for p in pts]),
              args.output)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l1", "l2", "l3", "class", "eb"])
    for lam, label, eb in pts:
        w.writerow([_fmt(lam[0]), _fmt(lam[1]), _fmt(lam[2]), label, int(eb)])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def _form(obj) -> gs.GaussianForm:
    if not isinstance(obj, dict):
        raise ParseError("a Gaussian form is a JSON object")
    try:
        return gs.GaussianForm.from_dict(obj)
    except (TypeError, gs.InvalidForm) as exc:
        raise ParseError(str(exc)) from exc


def _tuple_record(f: gs.GaussianForm, tol: float) -> dict:
    t = gs.tuple_from_form(f)
    return {**t.to_dict(), "cp": gs.is_cp(t, tol), "class": gs.singular_class(t).value,
            "family": gs.form_class(f)}


def cmd_gaussian(args) -> int:
    tol = _tolerance()
    data = _read_json(args.input)
    try:
        if args.action in ("tuple", "cp", "class"):
            f = gs.enforce_tp_hp(_form(data))
            rec = _tuple_record(f, tol)
            if args.action == "cp" and f.kind is not gs.Kind.GF:
                rec["closed_form_slack"] = gs.cp_closed_form(f)
            out = rec
        elif args.action == "concat":
            if not (isinstance(data, list) and len(data) == 2):
                raise ParseError("concat expects [outer, inner]: the first form acts after the second")
            f = gs.concat(_form(data[0]), _form(data[1]))
            out = {"form": f.to_dict(), **_tuple_record(f, tol)}
        else:
            if not isinstance(data, dict) or "kind" not in data or "path" not in data:
                raise ParseError('master expects {"kind": ..., "path": [{"t": .., "form": {..}}, ...]}')
            path = [(float(p["t"]), _form(p["form"])) for p in data["path"]]
            res = gs.master_equation(data["kind"], path)
            out = {"t": res.t.tolist(),
                   **{k: {"re": v.real.tolist(), "im": v.imag.tolist()} for k, v in res.values.items()}}
    except (gs.InvalidForm, gs.NonIntegrable, gs.NoMasterEquation) as exc:
        _emit(_dump({"error": type(exc).__name__, "message": str(exc)}), args.output)
        return EXIT_INVALID
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed input: {exc}") from exc
    _emit(_dump(out), args.output)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divischan",
        description="Divisibility classes of qubit channels and one-mode Gaussian channels.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, fmt_default, formats=("json", "csv")):
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, default=fmt_default)

    p = sub.add_parser("classify", help="divisibility report of one qubit channel", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", "-i", default="-", help="channel JSON (default: stdin)")
    io_flags(p, "json", ("json",))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="classify a dynamical map on a time grid", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--model", choices=("collision", "jc", "dephasing"), required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--alpha", type=float, default=6.0, help="coherent amplitude (jc)")
    p.add_argument("--g", type=float, default=10.0, help="coupling (jc)")
    p.add_argument("--omega-a", type=float, default=5.0, help="atomic frequency (jc)")
    p.add_argument("--omega-f", type=float, default=20.0, help="field frequency (jc)")
    p.add_argument("--n-fock", type=int, default=None, help="Fock cutoff (jc)")
    p.add_argument("--gamma", type=float, default=1.0, help="dephasing rate (dephasing)")
    io_flags(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("slice", help="classify Pauli channels on a plane of fixed l1+l2+l3", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--sum", type=float, required=True)
    p.add_argument("--resolution", type=int, default=41)
    io_flags(p, "csv")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("gaussian", help="analyse one-mode Gaussian forms", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("action", choices=("tuple", "cp", "class", "concat", "master"))
    p.add_argument("--input", "-i", default="-", help="form JSON (default: stdin)")
    io_flags(p, "json", ("json",))
    p.set_defaults(func=cmd_gaussian)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        # option values the models reject (for example a too small Fock cutoff)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
