"""Command-line driver.

    bochner classify --point '{"n": 1, "H_re": [[-0.5]], "T_re": [0.61], "V": -0.75}'
    bochner cells --p-D=-1,0,1,0 --format svg --output cells.svg
    bochner verify --family grho --rho 1,2 --points 20

Exit status: 0 on success, 2 for invalid input, 3 for numerical failures.
Errors are written to stderr as one JSON record.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import classification as cls, curvature_verifier as cv
from . import explicit_metrics as em, geodesic_ode as geo, structure_space as ss
from .config import DEFAULT
from .errors import BochnerError, ParameterError
from .polynomial import RealPolynomial

CSV_VERSION = "1"


class CsvTable:
    """Rows behind a '# bochner-<schema> v<CSV_VERSION>' line, so headers are versioned."""

    def __init__(self, schema, rows):
        self.schema = schema
        self.rows = rows


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# parsing helpers

def floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from exc


def complexes(text):
    try:
        return [complex(x.replace(" ", "")) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from exc


def ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


FIXTURES = {
    "space-form": {"n": 2, "H_re": [[2.0, 0.0], [0.0, -2.0]], "T_re": [0.0, 0.0], "V": -4.0},
    "worked": {"n": 1, "H_re": [[-0.5]], "T_re": [float(np.sqrt(0.375))], "V": -0.75},
}


def _load_json(args, inline):
    if inline is not None:
        return json.loads(inline)
    if args.input is None:
        raise UsageError("no input: give --input FILE or an inline value")
    try:
        with open(args.input) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from exc


def _point(args):
    if getattr(args, "fixture", None):
        return ss.StructurePoint.from_record(FIXTURES[args.fixture])
    return ss.StructurePoint.from_record(_load_json(args, args.point))


def _tol(args):
    return DEFAULT.with_overrides(cluster=args.tol_cluster)


def _f(x):
    return float(x)


# ---------------------------------------------------------------------------
# subcommands

def cmd_classify(args):
    tol = _tol(args)
    p = _point(args)
    nf = ss.normal_form(p, tol)
    phi = ss.invariants_phi(p)
    p_C = cls.char_poly_pC(p)
    p_D, p_hpp, m = cls.reduced_polys(p, tol)
    g0, dim_sym, orbit, _ = ss.symmetry_dims(p, tol)
    k = cls.reduced_momentum(p, tol)
    cell = cls.locate_cell(p_D, k, tol)
    v = cls.verdict(cell)
    return {
        "normal_form": nf.point.to_record(),
        "phi": {"a": phi.a.tolist(), "b": phi.b.tolist()},
        "C": {str(i + 2): _f(c) for i, c in enumerate(ss.conserved_Ck(p).C)},
        "p_C": p_C.to_record(), "p_D": p_D.to_record(), "p_hpp": p_hpp.to_record(),
        "m": m, "dims": {"isotropy": g0, "symmetry": dim_sym, "orbit": orbit},
        "k": k.tolist(), "cell": cell.to_record(),
        "verdict": {"bounded": v.bounded, "completeness": v.completeness, "notes": v.notes},
    }


def _cell_by_tag(p_D, tag, k, tol):
    if tag is None:
        return cls.locate_cell(p_D, k, tol)
    for c in cls.classify_cells(p_D, tol):
        if c.tag == tag:
            return c
    raise ParameterError(f"p_D has no cell tagged {tag}")


def cmd_construct(args):
    tol = _tol(args)
    p_C = RealPolynomial(args.p_C, tol)
    p_D = RealPolynomial(args.p_D, tol)
    k = np.asarray(args.k or [], dtype=float)
    cell = _cell_by_tag(p_D, args.cell, k, tol)
    p = cls.construct_from_cell(p_C, p_D, cell, k, tol)
    return {"point": p.to_record(), "cell": cell.tag}


def cmd_cells(args):
    tol = _tol(args)
    p_D = RealPolynomial(args.p_D, tol)
    cells = cls.classify_cells(p_D, tol)
    if args.format in ("svg", "csv"):
        svg, rows = emit_cell_plot(p_D, tol)
        return svg if args.format == "svg" else rows
    out = []
    for c in cells:
        v = cls.verdict(c)
        rec = c.to_record()
        rec["verdict"] = {"bounded": v.bounded, "completeness": v.completeness, "notes": v.notes}
        out.append(rec)
    return {"p_D": p_D.to_record(), "cells": out}


def _family(args):
    fam = args.family
    if fam == "flat":
        n = args.n
        return em.MetricField(n, lambda z: np.eye(len(z), dtype=complex), name="flat"), 1.0
    if fam == "rotsym":
        params = em.RotSymParams(args.n, args.k, args.a, args.branch)
        lo, hi = em.rotsym_domain(params)
        hi = min(hi, lo + 4.0)
        return em.rotsym_metric(params), (lo, hi)
    if fam == "grho":
        rho = args.rho or [1.0, 2.0]
        return em.grho_metric(rho), 2.0
    if fam == "wps":
        rho = args.rho or [1.0, 1.0, 1.0]
        return em.wps_metric(rho), 1.0
    if fam == "reduction":
        w = args.weights or [1.0, 1.0, 2.0]
        return em.reduction_metric(w), 0.5
    raise UsageError(f"unknown family {fam}")


def _sample_points(field, span, count, rng):
    q = field.q
    pts = []
    for _ in range(count):
        d = rng.normal(size=q) + 1j * rng.normal(size=q)
        d /= np.linalg.norm(d)
        if isinstance(span, tuple):
            lo, hi = span
            t = lo + (hi - lo) * (0.1 + 0.8 * rng.random())
            pts.append(d * np.sqrt(t))
        else:
            pts.append(d * span * rng.random())
    return pts


def cmd_verify(args):
    field, span = _family(args)
    rng = np.random.default_rng(args.seed)
    if args.input is not None or args.z is not None:
        raw = json.loads(args.z) if args.z is not None else _load_json(args, None)
        pts = [np.array([complex(*c) if isinstance(c, list) else complex(c) for c in z]) for z in raw]
    else:
        pts = _sample_points(field, span, args.points, rng)
    reports = [cv.curvature_report(field, z, args.fd_step) for z in pts]
    if args.format == "csv":
        rows = [["z", "bochner_residual", "scalar", "symmetry_defect", "p_h"]]
        for r in reports:
            rows.append([" ".join(f"{c.real:.17g}{c.imag:+.17g}j" for c in r.z), r.bochner_residual, r.scalar,
                         r.symmetry_defect, " ".join(f"{c:.17g}" for c in r.p_h_extracted.coeffs)])
        return CsvTable("verify", rows)
    return {"family": field.name, "max_residual": max(r.bochner_residual for r in reports),
            "reports": [r.to_record() for r in reports]}


def cmd_geodesic(args):
    tol = _tol(args)
    rng = np.random.default_rng(args.seed)
    if args.random is not None:
        p0 = ss.random_point(rng, args.random)
    else:
        p0 = _point(args)
    if args.w is not None:
        w = np.asarray(args.w, dtype=complex)
        if np.linalg.norm(w) == 0:
            raise ParameterError("w must be nonzero")
        w = w / np.linalg.norm(w)
    else:
        w = geo.admissible_direction(p0, rng, tol=tol)
    path = geo.integrate(p0, w, args.length, args.step)
    if args.format == "csv":
        return CsvTable("path", [path.header()] + path.rows())
    drift = geo.conserved_drift(path)
    rec = {"start": p0.to_record(), "w": {"re": w.real.tolist(), "im": w.imag.tolist()},
           "length": args.length, "step": path.h, "samples": len(path),
           "drift": {str(k + 2): _f(d) for k, d in enumerate(drift)},
           "max_sym_defect": path.max_sym_defect, "blew_up": path.blew_up, "notes": path.notes}
    try:
        cf = geo.constant_factor_check(path, tol)
        rec["constant_factor"] = {"p_hpp": cf.p_hpp.tolist(), "coeff_residual": cf.coeff_residual,
                                  "eig_deviation": cf.eig_deviation, "vacuous": cf.vacuous}
    except BochnerError as exc:
        rec["constant_factor"] = exc.record()
    return rec


def cmd_dim1(args):
    if args.roots is not None:
        if len(args.roots) != 2:
            raise UsageError("--roots takes r1,r2")
        fam = em.dim1_from_roots(*args.roots)
    else:
        if args.C2 is None or args.C3 is None:
            raise UsageError("give --C2 and --C3, or --roots")
        fam = em.dim1_suite(args.C2, args.C3)
    return {"C2": fam.C2, "C3": fam.C3, "p": fam.p.to_record(), "case": fam.case, "roots": fam.roots,
            "components": [{"lo": lo, "hi": hi, "kind": kind} for lo, hi, kind in fam.components],
            "periods": [{"root": r, "tau": t} for r, t in fam.periods.items()]}


def cmd_orbifold(args):
    p_C, p_D = cls.orbifold_case40(args.r, args.p, args.nu)
    return {"p_C": p_C.to_record(), "p_D": p_D.to_record(),
            "roots": [r for r, _ in p_D.real_roots()]}


# ---------------------------------------------------------------------------
# cell plots (m = 2)

def _clip(poly, a, b, c):
    """Keep the part of a convex polygon with a + b x + c y >= 0."""
    out = []
    N = len(poly)
    for i in range(N):
        P, Q = poly[i], poly[(i + 1) % N]
        fp = a + b * P[0] + c * P[1]
        fq = a + b * Q[0] + c * Q[1]
        if fp >= 0:
            out.append(P)
        if (fp >= 0) != (fq >= 0):
            t = fp / (fp - fq)
            out.append((P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1])))
    return out


def _viewport(roots):
    pts = [(2 * r, r * r) for r in roots]
    pts += [(r + s, r * s) for i, r in enumerate(roots) for s in roots[i + 1:]]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    w = max(max(xs) - min(xs), 1.0)
    h = max(max(ys) - min(ys), 1.0)
    return min(xs) - 0.2 * w, max(xs) + 0.2 * w, min(ys) - 0.2 * h, max(ys) + 0.2 * h


def cell_polygons(p_D, tol=DEFAULT):
    """Each cell of a degree-4 p_D as (cell, polygon, on_viewport flags per edge)."""
    cells = cls.classify_cells(p_D, tol)
    if cells[0].m != 2:
        raise ParameterError("cell plots are two-dimensional: need m = 2")
    x0, x1, y0, y1 = _viewport(list(cells[0].roots))
    box = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    out = []
    for cell in cells:
        poly = box
        for r, mu in zip(cell.roots, cell.mu):
            s = (-1) ** mu
            # p_u(r) = r^2 - r u_1 + u_2
            poly = _clip(poly, s * r * r, -s * r, s)
            if not poly:
                break
        flags = []
        for i in range(len(poly)):
            P, Q = poly[i], poly[(i + 1) % len(poly)]
            on_box = ((abs(P[0] - Q[0]) < 1e-12 and min(abs(P[0] - x0), abs(P[0] - x1)) < 1e-9)
                      or (abs(P[1] - Q[1]) < 1e-12 and min(abs(P[1] - y0), abs(P[1] - y1)) < 1e-9))
            flags.append(on_box)
        out.append((cell, poly, flags))
    return out, (x0, x1, y0, y1)


def emit_cell_plot(p_D, tol=DEFAULT, size=480):
    polys, (x0, x1, y0, y1) = cell_polygons(p_D, tol)
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)
    X = lambda x: (x - x0) * sx
    Y = lambda y: size - (y - y0) * sy
    fills = ["#d9e8f5", "#f5e3d9", "#dff2d8", "#efd9f5", "#f5f0d9"]
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>']
    # the discriminant parabola u_2 = u_1^2 / 4 bounds the image of sigma
    xs = np.linspace(x0, x1, 200)
    pts = " ".join(f"{X(x):.3f},{Y(x * x / 4):.3f}" for x in xs if y0 <= x * x / 4 <= y1)
    if pts:
        lines.append(f'<polyline points="{pts}" fill="none" stroke="#999" stroke-width="0.8"/>')
    rows = [["record", "cell", "label", "c0", "c1", "c2", "x", "y"]]
    for r, lab in zip(polys[0][0].roots, polys[0][0].labels):
        rows.append(["face", "", lab, r * r, -r, 1.0, "", ""])
    for i, (cell, poly, flags) in enumerate(polys):
        if not poly:
            continue
        path = " ".join(f"{X(x):.3f},{Y(y):.3f}" for x, y in poly)
        lines.append(f'<polygon points="{path}" fill="{fills[i % len(fills)]}" stroke="none"/>')
        for j, (P, Q) in enumerate(zip(poly, poly[1:] + poly[:1])):
            dash = ' stroke-dasharray="4,3"' if flags[j] else ""
            lines.append(f'<line x1="{X(P[0]):.3f}" y1="{Y(P[1]):.3f}" x2="{X(Q[0]):.3f}" y2="{Y(Q[1]):.3f}" '
                         f'stroke="black" stroke-width="1.2"{dash}/>')
            rows.append(["boundary", cell.tag, j, "", "", "", P[0], P[1]])
        cx = sum(p[0] for p in poly) / len(poly)
        cy = sum(p[1] for p in poly) / len(poly)
        label = cell.tag + (" (bounded)" if cell.bounded else "")
        lines.append(f'<text x="{X(cx):.3f}" y="{Y(cy):.3f}" font-size="13" text-anchor="middle">{label}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n", CsvTable("cells", rows)


# ---------------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--input", help="JSON input file")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--tol-cluster", type=float, default=None, help="eigenvalue clustering tolerance")
    common.add_argument("--fd-step", type=float, default=None, help="finite-difference base step")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "csv", "svg"], default="json")

    ap = _Parser(prog="bochner", description="Bochner-Kähler structure data, cells and metric checks.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], help="invariants, polynomials and cell of a point")
    p.add_argument("--point", help="inline point record (JSON)")
    p.add_argument("--fixture", choices=sorted(FIXTURES))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", parents=[common], help="a point with given p_C, p_D, cell and momentum")
    p.add_argument("--p-C", dest="p_C", type=floats, required=True, help="coefficients, highest first")
    p.add_argument("--p-D", dest="p_D", type=floats, required=True)
    p.add_argument("--k", type=floats, default=None, help="reduced momentum (empty when m = 0)")
    p.add_argument("--cell", help="cell tag such as 4-0; located from k when omitted")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("cells", parents=[common], help="momentum cells of p_D (svg/csv plots for m = 2)")
    p.add_argument("--p-D", dest="p_D", type=floats, required=True)
    p.set_defaults(func=cmd_cells)

    p = sub.add_parser("verify", parents=[common], help="curvature reports for a metric family")
    p.add_argument("--family", choices=["flat", "rotsym", "grho", "wps", "reduction"], required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=float, default=8.0)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--branch", choices=["type_one", "type_two"], default="type_one")
    p.add_argument("--rho", type=floats)
    p.add_argument("--weights", type=floats)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--z", help="JSON list of points, each a list of numbers or [re, im] pairs")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("geodesic", parents=[common], help="integrate the structure ODE")
    p.add_argument("--point", help="inline start point (JSON)")
    p.add_argument("--fixture", choices=sorted(FIXTURES))
    p.add_argument("--random", type=int, help="random start of this dimension")
    p.add_argument("--w", type=complexes, help="direction; an admissible one is chosen when omitted")
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("dim1", parents=[common], help="dimension-one case report and periods")
    p.add_argument("--C2", type=float)
    p.add_argument("--C3", type=float)
    p.add_argument("--roots", type=floats, help="r1,r2 of a three-root family")
    p.set_defaults(func=cmd_dim1)

    p = sub.add_parser("orbifold", parents=[common], help="orbifold roots for a compact cell")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--p", type=ints, required=True)
    p.add_argument("--nu", type=ints, required=True)
    p.set_defaults(func=cmd_orbifold)
    return ap


def _render(result, fmt):
    if isinstance(result, str):
        return result
    if isinstance(result, CsvTable):
        buf = io.StringIO()
        buf.write(f"# bochner-{result.schema} v{CSV_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        for row in result.rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
        return buf.getvalue()
    return json.dumps(_finite(result), sort_keys=True, indent=1, default=_json_default) + "\n"


def _finite(x):
    # strict JSON has no infinities; they become the strings "inf" / "-inf"
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    if isinstance(x, np.ndarray):
        return _finite(x.tolist())
    if isinstance(x, (float, np.floating)) and not np.isfinite(x):
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x).__name__)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.format == "svg" and args.cmd != "cells":
            raise UsageError("svg output exists only for cells")
        if args.format == "csv" and args.cmd not in ("cells", "verify", "geodesic"):
            raise UsageError(f"csv output is not available for {args.cmd}")
        result = args.func(args)
        text = _render(result, args.format)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2
    except json.JSONDecodeError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": f"bad JSON: {exc}"}) + "\n")
        return 2
    except BochnerError as exc:
        sys.stderr.write(json.dumps(exc.record()) + "\n")
        return 2 if isinstance(exc, ValueError) else 3
    except (KeyError, TypeError) as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": f"malformed input: {exc}"}) + "\n")
        return 2
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
