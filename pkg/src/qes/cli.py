"""Batch command line: ``qes {spectrum,audit,limit,oracle,curves}``.

Exit codes: 0 success, 1 invalid arguments or input, 2 numerical failure,
3 strict audit mismatch. Every report is computed in full before anything
is written, so a failing run leaves no partial output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from . import families as fam
from . import transforms as tr
from .audit import audit_family
from .errors import NumericalFailure, QesError, RejectedInput
from .oracle import (GridSpec, audit_grid, compute_levels, default_domain, fd_spectrum,
                     is_half_line, level_specs)
from .params import make_params, normalize_family

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_STRICT = 0, 1, 2, 3
ROOT_MATCH_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- serialization ----------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def dumps(obj, indent=2, _level=0):
    """JSON with every float written to 17 significant digits (exact round trip)."""
    obj = _jsonable(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float17(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(_jsonable(v), (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _float17(v):
    text = format(v, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def _fmt(v):
    v = _jsonable(v)
    if isinstance(v, float):
        return _float17(v) if math.isfinite(v) else ""
    return "" if v is None else str(v)


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _write(text, out):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    tmp = f"{out}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")
    os.replace(tmp, out)


def _header(args, command):
    h = {"tool": "qes", "version": __version__, "command": command}
    if not args.reproducible:
        h["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return h


# --- argument handling --------------------------------------------------------------

PARAM_FLAGS = ("L", "A", "q", "alpha", "ell", "a", "eps", "lam")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--family", type=str)
    for name in PARAM_FLAGS:
        common.add_argument(f"--{name}", type=str, default=None)
    common.add_argument("--j", type=str, default="0")
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--precision", choices=("float", "rational"), default=None)
    common.add_argument("--xmin", type=float, default=None)
    common.add_argument("--xmax", type=float, default=None)
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--level", type=int, default=0, help="level index by ascending E_derived")
    common.add_argument("--k", type=int, default=3, help="eigenvalues requested from the grid oracle")
    common.add_argument("--alphas", type=str, default=None, help="comma separated, decreasing")
    common.add_argument("--map-variant", choices=tr.MAP_VARIANTS, default="corrected")
    common.add_argument("--potential-file", type=str, default=None)
    common.add_argument("--sweep", type=str, default=None, help="NAME=start:stop:count")
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--strict", action="store_true")
    common.add_argument("--reproducible", action="store_true")
    common.add_argument("--emit-curves", action="store_true")
    common.add_argument("--with-audit", action="store_true")
    parser = _Parser(prog="qes", description="QES spectra, transforms and formula audits")
    parser.add_argument("--version", action="version", version=f"qes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("spectrum", "quantized levels of one family"),
                       ("audit", "printed formulas against the numerical oracle"),
                       ("limit", "alpha -> 0 convergence scan of a limit map"),
                       ("oracle", "finite-difference eigenvalues"),
                       ("curves", "tabulate V(x) and psi(x) for plotting")):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def params_from_args(args, overrides=None):
    if not args.family:
        raise RejectedInput("--family is required")
    family = normalize_family(args.family)
    vals = {k: getattr(args, k) for k in PARAM_FLAGS}
    vals.update(overrides or {})
    root = vals.pop("lam")
    eps = vals.pop("eps")
    if root is not None and eps is not None:
        raise RejectedInput("give either --lam or --eps, not both")
    if root is None:
        root = eps
    kwargs = {k: v for k, v in vals.items() if v is not None}
    kwargs.setdefault("q", "0")
    return make_params(family, args.j, root=root, m=args.m, precision=args.precision, **kwargs)


def _validate_grid(args):
    if args.n is not None and args.n < 64:
        raise RejectedInput(f"grid too coarse: n={args.n} < 64")
    if args.xmin is not None and args.xmax is not None and not args.xmax > args.xmin:
        raise RejectedInput("--xmax must exceed --xmin")


def _override(g, args):
    return GridSpec(g.x_min if args.xmin is None else args.xmin,
                    g.x_max if args.xmax is None else args.xmax,
                    g.n if args.n is None else args.n)


def parse_alphas(text):
    if text is None:
        return tr.DEFAULT_ALPHAS
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise RejectedInput("--alphas is empty")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise RejectedInput(f"cannot parse --alphas {text!r}") from exc


def parse_sweep(text):
    try:
        name, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        count = int(count)
        start, stop = Fraction(start), Fraction(stop)
    except (ValueError, ZeroDivisionError) as exc:
        raise RejectedInput(f"--sweep expects NAME=start:stop:count, got {text!r}") from exc
    name = name.strip()
    if name not in PARAM_FLAGS or count < 1:
        raise RejectedInput(f"cannot sweep {name!r} with count {count}")
    if count == 1:
        return name, [str(start)]
    step = (stop - start) / (count - 1)
    return name, [str(start + i * step) for i in range(count)]


# --- levels ----------------------------------------------------------------------------

def _level_dict(lv, exact=None):
    d = {
        "root": lv.root,
        "E_stated": lv.E_stated,
        "E_derived": lv.E_derived,
        "E_consistent": lv.E_consistent,
        "residual": lv.residual,
        "constancy": lv.constancy,
        "normalizable": bool(lv.normalizable),
        "coefficients": list(lv.coeffs),
    }
    if exact is not None:
        d["root_printed"] = float(exact.root_printed)
        d["E_closed_form"] = float(exact.E_printed)
    return d


def _exact_info(p):
    if p.q == 0 and (p.j2 > 0 or p.m is not None) and p.family not in ("oscillator", "coulomb_eps"):
        if p.family in ("eckart", "hulthen", "rosen_morse"):
            return fam.exact_case(p.family, p.L, p.A, p.alpha, p.m or 0, p.j)
        return fam.exact_case("coulomb", p.ell, p.a, 1, p.m or 0)
    return None


def _spectrum_params(p):
    """Parameters for the root search; a root given on the command line only selects a level."""
    if p.root is None:
        return p, None
    base = replace(p, root=None, a=None) if p.family == "coulomb_eps" else replace(p, root=None)
    return base, float(p.root)


def _grid_for(args):
    if args.xmin is None and args.xmax is None and args.n is None:
        return None
    return lambda spec: _override(audit_grid(spec), args)


def spectrum_report(args, p):
    base, selected = _spectrum_params(p)
    levels, roots = compute_levels(base, grid=_grid_for(args))
    if selected is not None:
        levels = [lv for lv in levels if abs(lv.root - selected) <= ROOT_MATCH_TOL * (1 + abs(selected))]
        if not levels:
            raise RejectedInput(f"{selected!r} is not a quantized root for these parameters")
    exact = _exact_info(base)
    rep = {
        "family": p.family,
        "params": p.echo(),
        "levels": [_level_dict(lv, exact) for lv in levels],
    }
    if roots is not None:
        rep["diagnostics"] = {"method": roots.method, "real_roots": roots.real_count,
                              "complex_count": roots.complex_count}
    else:
        rep["diagnostics"] = {"method": "exact_case", "real_roots": 1, "complex_count": 0}
    return rep, levels


def _pick_level(args, p):
    """(params with root, EigenfunctionSpec) of the selected level."""
    if p.root is not None:
        base, selected = _spectrum_params(p)
        pairs, _ = level_specs(base)
        for r, spec in pairs:
            if abs(float(r) - selected) <= ROOT_MATCH_TOL * (1 + abs(selected)):
                return spec
        raise RejectedInput(f"{selected!r} is not a quantized root for these parameters")
    levels, _ = compute_levels(p)
    if not levels:
        raise NumericalFailure("no real quantized levels at these parameters", "cli")
    if not 0 <= args.level < len(levels):
        raise RejectedInput(f"--level {args.level} outside 0..{len(levels) - 1}")
    return fam.make_eigenfunction(p.with_root(levels[args.level].root),
                                  coeffs=levels[args.level].coeffs)


# --- commands -----------------------------------------------------------------------------

def cmd_spectrum(args):
    _validate_grid(args)
    if args.emit_curves and args.out is None:
        raise RejectedInput("--emit-curves needs --out (curves go to OUT.curves.csv)")
    if args.sweep:
        return _sweep(args)
    p = params_from_args(args)
    rep, levels = spectrum_report(args, p)
    if args.with_audit:
        report = audit_family(p if p.root is None else _spectrum_params(p)[0])
        rep["audit"] = {f.formula_id: f.verdict for f in report.findings}
    files = []
    if args.emit_curves:
        files.append((args.out + ".curves.csv", _curves_csv(_all_specs(p, levels), args)))
    out = {**_header(args, "spectrum"), **rep}
    if args.format == "csv":
        text = to_csv(["root", "E_stated", "E_derived", "E_consistent", "residual", "constancy",
                       "normalizable"],
                      [(lv["root"], lv["E_stated"], lv["E_derived"], lv["E_consistent"], lv["residual"],
                        lv["constancy"], lv["normalizable"]) for lv in rep["levels"]])
    else:
        text = dumps(out)
    return [(args.out, text)] + files, EXIT_OK


def _sweep(args):
    name, values = parse_sweep(args.sweep)
    points = [params_from_args(args, {name: v}) for v in values]  # validate all first

    def one(p):
        return spectrum_report(args, p)[0]

    workers = min(len(points), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(one, points))
    if args.format == "csv":
        rows = [(v, lv["root"], lv["E_stated"], lv["E_derived"], lv["residual"], lv["normalizable"])
                for v, rep in zip(values, reports) for lv in rep["levels"]]
        text = to_csv([name, "root", "E_stated", "E_derived", "residual", "normalizable"], rows)
    else:
        text = dumps({**_header(args, "spectrum"), "sweep": {"name": name, "values": values},
                      "reports": reports})
    return [(args.out, text)], EXIT_OK


def cmd_audit(args):
    _validate_grid(args)
    p = params_from_args(args)
    base = _spectrum_params(p)[0]
    grid = None
    if args.xmin is not None and args.xmax is not None and args.n is not None:
        grid = GridSpec(args.xmin, args.xmax, args.n)
    report = audit_family(base, grid)
    d = report.to_dict()
    if args.format == "csv":
        text = to_csv(["formula_id", "family", "verdict", "abs_discrepancy", "rel_discrepancy", "notes"],
                      [(f.formula_id, f.family, f.verdict, f.abs_discrepancy, f.rel_discrepancy, f.notes)
                       for f in report.findings])
    else:
        failures = report.strict_failures()
        text = dumps({**_header(args, "audit"), **d, "strict_failures": failures})
    code = EXIT_STRICT if args.strict and report.strict_failures() else EXIT_OK
    return [(args.out, text)], code


def cmd_limit(args):
    alphas = parse_alphas(args.alphas)
    p = params_from_args(args)
    if p.family == "oscillator":
        make = tr.oscillator_limit_map
    elif p.family in ("coulomb", "coulomb_eps"):
        make = tr.coulomb_limit_map
    else:
        raise RejectedInput("limit maps target the coulomb, coulomb-eps or oscillator families")
    target = p if p.root is not None else _pick_level(args, p).params
    rec = tr.limit_convergence_scan(make(target, args.map_variant), alphas=alphas)
    if args.format == "csv":
        text = to_csv(["alpha", "deviation", "order_est"], rec.rows())
    else:
        text = dumps({**_header(args, "limit"), "map": rec.map_name, "variant": rec.variant,
                      "target": target.echo(), "probe": list(rec.probe),
                      "rows": [{"alpha": a, "deviation": d, "order_est": o} for a, d, o in rec.rows()],
                      "decreasing": rec.decreasing, "converged": rec.converged,
                      "threshold": rec.threshold, "notes": list(rec.notes)})
    return [(args.out, text)], EXIT_OK


def read_potential_file(path):
    """Two-column UTF-8 CSV with header ``x,V`` and strictly increasing x."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise RejectedInput(f"cannot open potential file {path!r}: {exc}") from exc
    xs, vs = [], []
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RejectedInput(f"{path}: empty potential file") from None
        if [h.strip() for h in header] != ["x", "V"]:
            raise RejectedInput(f"{path}:1: header must be 'x,V', got {','.join(header)!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise RejectedInput(f"{path}:{line}: expected 2 columns, got {len(row)}")
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError:
                raise RejectedInput(f"{path}:{line}: not a number: {','.join(row)!r}") from None
            if not (math.isfinite(x) and math.isfinite(v)):
                raise RejectedInput(f"{path}:{line}: non-finite value")
            if xs and x <= xs[-1]:
                raise RejectedInput(f"{path}:{line}: x must be strictly increasing")
            xs.append(x)
            vs.append(v)
    if len(xs) < 2:
        raise RejectedInput(f"{path}: need at least two data rows")
    return np.array(xs), np.array(vs)


def cmd_oracle(args):
    _validate_grid(args)
    if args.k < 1:
        raise RejectedInput("--k must be positive")
    if args.potential_file:
        xs, vs = read_potential_file(args.potential_file)
        g = GridSpec(xs[0] if args.xmin is None else args.xmin, xs[-1] if args.xmax is None else args.xmax,
                     6000 if args.n is None else args.n)
        if g.x_min < xs[0] or g.x_max > xs[-1]:
            raise RejectedInput("grid extends beyond the tabulated potential")
        V = lambda x: np.interp(x, xs, vs)  # noqa: E731
        source = {"potential_file": os.path.basename(args.potential_file)}
        E_ref = None
    else:
        p = params_from_args(args)
        spec = _pick_level(args, p)
        lo, hi = default_domain(spec)
        if is_half_line(spec.family):
            lo = 0.0  # Dirichlet at the singular point itself; no grid node sits there
        g = _override(GridSpec(lo, hi, 20000), args)
        V = lambda x: fam.potential_value(spec.params, x)  # noqa: E731
        source = {"family": spec.family, "params": spec.params.echo()}
        E_ref = float(fam.consistent_energy(spec.params))
    if args.k > g.n:
        raise RejectedInput(f"--k {args.k} exceeds n={g.n}")
    vals = fd_spectrum(V, g, args.k)
    if args.format == "csv":
        text = to_csv(["index", "E"], list(enumerate(vals)))
    else:
        out = {**_header(args, "oracle"), **source,
               "grid": {"x_min": g.x_min, "x_max": g.x_max, "n": g.n, "h": g.h},
               "eigenvalues": list(vals)}
        if E_ref is not None:
            out["E_level"] = E_ref
            out["nearest"] = min(vals, key=lambda v: abs(v - E_ref))
        text = dumps(out)
    return [(args.out, text)], EXIT_OK


def _all_specs(p, levels):
    base = _spectrum_params(p)[0]
    return [fam.make_eigenfunction(base.with_root(lv.root), coeffs=lv.coeffs) for lv in levels]


def _curves_csv(specs, args):
    rows = []
    for i, spec in enumerate(specs):
        lo, hi = default_domain(spec)
        lo = lo if args.xmin is None else args.xmin
        hi = hi if args.xmax is None else args.xmax
        x = np.linspace(lo, hi, 801 if args.n is None else args.n)
        psi, _ = spec.scaled_values(x)
        V = fam.potential_value(spec.params, x)
        rows.extend((i, spec.root, xv, vv, pv) for xv, vv, pv in zip(x, V, psi))
    return to_csv(["level", "root", "x", "V", "psi"], rows)


def cmd_curves(args):
    _validate_grid(args)
    p = params_from_args(args)
    if p.root is not None or args.level != 0:
        specs = [_pick_level(args, p)]
    else:
        levels, _ = compute_levels(p)
        specs = _all_specs(p, levels)
    return [(args.out, _curves_csv(specs, args))], EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "audit": cmd_audit, "limit": cmd_limit,
            "oracle": cmd_oracle, "curves": cmd_curves}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        outputs, code = COMMANDS[args.command](args)
    except (UsageError, RejectedInput) as exc:
        print(f"qes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, QesError) as exc:
        print(f"qes: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path, text in outputs:
        _write(text, path)
    return code


if __name__ == "__main__":
    sys.exit(main())
