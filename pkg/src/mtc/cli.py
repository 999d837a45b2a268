"""``mtc`` command line front end.

Exit codes: 0 success, 1 validation or decomposition failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .fusion import FusionError, associativity_audit, fuse, fusion_table
from .invariants import (
    DEFAULT_MAX_DEN, DEFAULT_NODE_BUDGET, InvariantError, Library,
    ModularInvariant, classify,
)
from .modular_data import (
    ModularDataError, datum_from_json, datum_to_json, su2_data, toric_code_datum,
    trivial_datum, validate, verlinde,
)
from .numerics import NumericsError, precision_from_env

COMMANDS = ("mdata", "validate", "verlinde", "classify", "fuse", "table", "audit")


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return v


def _positive_float(text):
    v = float(text)
    if not 0 < v < 0.5:
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 1/2)")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=_positive_int, default=None)
    common.add_argument("--tol", type=_positive_float, default=None,
                        help="absolute zero tolerance")
    common.add_argument("--tol-int", type=_positive_float, default=None,
                        help="absolute integrality tolerance")
    common.add_argument("--max-den", type=_positive_int, default=DEFAULT_MAX_DEN)
    common.add_argument("--node-budget", type=_positive_int, default=DEFAULT_NODE_BUDGET)
    common.add_argument("--strict-heterotic", action="store_true")
    common.add_argument("--threads", type=_nonneg_int, default=1,
                        help="search worker processes (0 = one per CPU)")
    common.add_argument("--out", choices=("json", "text"), default="text")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--su2", type=_positive_int, metavar="K",
                        help="use SU(2) level K data (for both sides)")
    source.add_argument("--category", metavar="FILE", help="category JSON file")

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--left", metavar="CAT",
                      help="category file or builtin (su2:K, vec, toric)")
    pair.add_argument("--right", metavar="CAT")

    p = argparse.ArgumentParser(prog="mtc", description="Modular invariants and their fusion.")
    p.add_argument("--version", action="version", version=f"mtc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("mdata", parents=[common, source], help="print modular data")
    sub.add_parser("validate", parents=[common, source], help="validate modular data")
    sub.add_parser("verlinde", parents=[common, source], help="Verlinde fusion rules")
    c = sub.add_parser("classify", parents=[common, source, pair],
                       help="classify physical modular invariants")
    c.add_argument("--write-dir", metavar="DIR",
                   help="also write the library and one JSON file per invariant")
    f = sub.add_parser("fuse", help="relative tensor product of two invariants",
                       parents=[common])
    f.add_argument("--left", required=True, metavar="INV", help="invariant JSON file")
    f.add_argument("--right", required=True, metavar="INV", help="invariant JSON file")
    f.add_argument("--lib", required=True, metavar="LIB",
                   help="library JSON for (left.left, right.right)")
    f.add_argument("--category", action="append", default=[], metavar="FILE",
                   help="extra category JSON (e.g. the middle category)")
    for name, text in (("table", "fusion table of a library"),
                       ("audit", "associativity audit of a library")):
        t = sub.add_parser(name, parents=[common, source], help=text)
        t.add_argument("--lib", metavar="LIB", help="library JSON instead of --su2")
    return p


# ----------------------------------------------------------------- helpers

def _read_json(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise ModularDataError(f"{path}: {exc}") from exc
    # accept both bare schema objects and the CLI envelope
    if isinstance(obj, dict) and "result" in obj and "provenance" in obj:
        obj = obj["result"]
    return obj


_SU2_NAME = re.compile(r"^(?:su2:|SU\(2\)_)(\d+)$")


def _builtin(name, prec):
    m = _SU2_NAME.match(name)
    if m:
        return su2_data(int(m.group(1)), prec)
    if name.lower() in ("vec", "trivial"):
        return trivial_datum(prec)
    if name.lower() in ("toric", "d(z2)"):
        return toric_code_datum(prec)
    return None


def _category(source, prec):
    d = _builtin(source, prec)
    if d is not None:
        return d
    return datum_from_json(_read_json(source), prec)


def _single(args, prec):
    if args.su2 is not None and args.category:
        raise UsageError("give either --su2 or --category, not both")
    if args.su2 is not None:
        return su2_data(args.su2, prec)
    if args.category:
        return _category(args.category, prec)
    raise UsageError("one of --su2 or --category is required")


def _library(args, prec, kw):
    if getattr(args, "lib", None):
        return Library.from_json(_read_json(args.lib), prec)
    d = _single(args, prec)
    return classify(d, d, **kw)


def _emit(args, command, prec, result, text, stream):
    prov = {"precision": prec.as_dict(), "version": __version__}
    if args.out == "json":
        payload = {"command": command, "provenance": prov, "result": result}
        stream.write(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        stream.write(text.rstrip("\n") + "\n")
        p = prec.as_dict()
        stream.write(f"# precision: bits={p['bits']} tol_zero={p['tol_zero']:g} "
                     f"tol_int={p['tol_int']:g}\n")


def _write(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")


def _safe_filename(name):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


# ---------------------------------------------------------------- commands

def _dispatch(args, stream) -> int:
    prec = precision_from_env(bits=args.precision_bits, tol_zero=args.tol,
                              tol_int=args.tol_int)
    kw = {"node_budget": args.node_budget, "max_den": args.max_den,
          "strict_heterotic": args.strict_heterotic, "threads": args.threads}
    cmd = args.command

    if cmd == "mdata":
        d = _single(args, prec)
        obj = datum_to_json(d)
        lines = [f"{d.name}  rank={d.rank}  c={d.c}"]
        lines += [f"  {lab:>4}  h={str(h):>8}  S[.,0]={s:.12f}"
                  for lab, h, s in zip(d.labels, d.h, d.first_column)]
        _emit(args, cmd, prec, obj, "\n".join(lines), stream)
        return 0

    if cmd == "validate":
        if args.category and args.su2 is None:
            d = datum_from_json(_read_json(args.category), prec, check=False)
        else:
            d = _single(args, prec)
        report = validate(d)
        _emit(args, cmd, prec, report.as_dict(), str(report), stream)
        return 0 if report.passed else 1

    if cmd == "verlinde":
        d = _single(args, prec)
        N = verlinde(d)
        obj = {"name": d.name, "labels": list(d.labels), "N": N.N.tolist(),
               "max_residual": float(f"{N.max_residual:.3e}")}
        lines = [f"{d.name} fusion rules (max rounding residual {N.max_residual:.2e})"]
        for a in range(d.rank):
            for b in range(a, d.rank):
                terms = [(d.labels[c], int(N.N[a, b, c])) for c in range(d.rank) if N.N[a, b, c]]
                rhs = " + ".join(lab if m == 1 else f"{m}·{lab}" for lab, m in terms)
                lines.append(f"  {d.labels[a]} × {d.labels[b]} = {rhs}")
        _emit(args, cmd, prec, obj, "\n".join(lines), stream)
        return 0

    if cmd == "classify":
        if args.left or args.right:
            if not (args.left and args.right):
                raise UsageError("--left and --right go together")
            if args.su2 is not None or args.category:
                raise UsageError("use either --left/--right or --su2/--category")
            d1, d2 = _category(args.left, prec), _category(args.right, prec)
        else:
            d1 = d2 = _single(args, prec)
        lib = classify(d1, d2, **kw)
        obj = lib.to_json()
        if args.write_dir:
            out = Path(args.write_dir)
            out.mkdir(parents=True, exist_ok=True)
            _write(out / "library.json", obj)
            for z in lib:
                _write(out / f"{_safe_filename(z.name)}.json", z.to_json())
        lines = [f"{d1.name} -> {d2.name}: {len(lib)} physical invariant(s)"]
        for z in lib:
            lines.append(f"  {z.name}")
            lines += ["    " + " ".join(f"{v:d}" for v in row) for row in z.Z]
        pv = lib.provenance
        lines.append(f"# commutant dim={pv['commutant_dim']} support={pv['support_size']} "
                     f"nodes={pv['nodes']}")
        _emit(args, cmd, prec, obj, "\n".join(lines), stream)
        return 0

    if cmd == "fuse":
        lib = Library.from_json(_read_json(args.lib), prec)
        cats = {lib.left.name: lib.left, lib.right.name: lib.right}
        for path in args.category:
            d = datum_from_json(_read_json(path), prec)
            cats[d.name] = d
        invs = []
        for path in (args.left, args.right):
            obj = _read_json(path)
            for side in ("left", "right"):
                name = obj.get(side) if isinstance(obj, dict) else None
                if name and name not in cats:
                    d = _builtin(name, prec)
                    if d is None:
                        raise UsageError(f"unknown category {name!r}; pass --category")
                    cats[name] = d
            invs.append(ModularInvariant.from_json(obj, cats).check())
        outcome = fuse(invs[0], invs[1], lib)
        _emit(args, cmd, prec, outcome.to_json(), str(outcome), stream)
        return 0

    if cmd in ("table", "audit"):
        lib = _library(args, prec, kw)
        table = fusion_table(lib)
        if cmd == "table":
            _emit(args, cmd, prec, table.to_json(), table.to_text(), stream)
            return 0
        report = associativity_audit(lib, table)
        _emit(args, cmd, prec, report.to_json(), str(report), stream)
        return 0 if report.passed else 1

    raise UsageError(f"unknown command {cmd!r}")


def run(argv=None, stream=None) -> int:
    """Parse ``argv`` and run one command, writing results to ``stream``."""
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args, stream)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mtc: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"mtc: error: {exc}", file=sys.stderr)
        return 2
    except (ModularDataError, InvariantError, FusionError, NumericsError) as exc:
        print(f"mtc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
