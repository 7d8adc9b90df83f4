"""Command-line front end: ``tolerance-homotopy {scan,analyze,fixtures}``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .complexes import ComplexError
from .dilation import DilationError, compare_with_scan
from .groups import DEFAULT_EFFORT, GroupError
from .metric import (Metric, MetricError, PointCloud, Resolution, fixture_specs, format_fraction,
                     load_image_grid, region_fixture, tolerance_adjacency)
from .retracts import RetractError
from .scan import EpsilonScanReport, StructureInvariants, analyze_structure, epsilon_scan

SCHEMA = 1
EXIT_OK, EXIT_ERROR, EXIT_UNRESOLVED = 0, 1, 2

_EXACT = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")


class InputError(ValueError):
    pass


def parse_number(text: str, scale: Optional[int] = None) -> Fraction:
    """Exact decimal or ``p/q``; other float syntax only with an explicit ``scale``."""
    t = text.strip()
    if _EXACT.match(t):
        return Fraction(t)
    try:
        value = float(t)
    except ValueError:
        raise InputError(f"not a number: {text!r}") from None
    if scale is None:
        raise InputError(f"inexact literal {text!r}; pass --scale to round it to a grid")
    return Fraction(round(value * scale), scale)


def read_point_csv(text: str, metric: Metric, scale: Optional[int] = None) -> PointCloud:
    rows = []
    header = None
    for line in text.splitlines():
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        cells = next(csv.reader([s]))
        if header is None:
            header = [c.strip() for c in cells]
            continue
        rows.append([c.strip() for c in cells])
    if header is None:
        return PointCloud((), metric)
    has_label = header[-1].lower() == "label"
    dim = len(header) - (1 if has_label else 0)
    if header[:dim] != [f"x{i + 1}" for i in range(dim)]:
        raise InputError(f"header must be x1,...,xn[,label], got {','.join(header)}")
    pts, labels = [], []
    for r in rows:
        if len(r) != len(header):
            raise InputError(f"row {r} has {len(r)} fields, header has {len(header)}")
        pts.append(tuple(parse_number(c, scale) for c in r[:dim]))
        if has_label:
            labels.append(r[-1])
    return PointCloud(tuple(pts), metric, tuple(labels) if has_label else None)


def _strip_pnm_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def read_image(text: str) -> list[list[bool]]:
    """Plain PBM (P1), plain PGM (P2) or rows of ``0``/``1``; nonzero is foreground."""
    body = _strip_pnm_comments(text)
    tokens = body.split()
    if tokens and tokens[0] in ("P1", "P2"):
        kind = tokens[0]
        if len(tokens) < 3:
            raise InputError("truncated PNM header")
        w, h = int(tokens[1]), int(tokens[2])
        if kind == "P1":
            bits = [c for c in "".join(tokens[3:]) if c in "01"]
            values = [int(c) for c in bits]
        else:
            values = [int(t) for t in tokens[4:]]
        if len(values) != w * h:
            raise InputError(f"expected {w * h} pixels, found {len(values)}")
        return [[values[r * w + c] != 0 for c in range(w)] for r in range(h)]
    grid = []
    for line in body.splitlines():
        s = line.replace(" ", "").strip()
        if not s:
            continue
        if set(s) - {"0", "1"}:
            raise InputError(f"grid rows must contain only 0 and 1: {line!r}")
        grid.append([c == "1" for c in s])
    if len({len(r) for r in grid}) > 1:
        raise InputError("grid rows have different lengths")
    return grid


def load_input(path: str, fmt: str, metric: Metric, pitch: Fraction, y_up: bool,
               scale: Optional[int]) -> tuple[PointCloud, bytes]:
    data = Path(path).read_bytes()
    text = data.decode("utf-8")
    if fmt == "auto":
        suffix = Path(path).suffix.lower()
        fmt = "csv" if suffix == ".csv" else "image"
    if fmt == "csv":
        return read_point_csv(text, metric, scale), data
    grid = read_image(text)
    return load_image_grid(grid, pitch, metric, flip_rows=not y_up), data


# --- report assembly ---------------------------------------------------------

def _num(x) -> str:
    return format_fraction(x) if isinstance(x, (int, Fraction)) else str(x)


def _invariants_dict(inv: StructureInvariants) -> dict:
    out = {
        "vertices": inv.vertex_count,
        "edges": inv.edge_count,
        "components": inv.component_count,
        "reduced_vertices": inv.reduced_vertex_count,
        "base": inv.base,
        "group": inv.label,
        "component_groups": [g.label for g in inv.component_groups],
    }
    if inv.group is not None:
        out["abelian"] = {"betti": inv.group.abelian.betti,
                          "torsion": list(inv.group.abelian.torsion)}
        if not inv.group.conclusive:
            out["presentation"] = str(inv.group.presentation)
    return out


def scan_document(report: EpsilonScanReport) -> dict:
    entries = []
    for e in report.entries:
        d = {"epsilon": str(e.epsilon), "upper": None if e.upper is None else str(e.upper),
             "at": "interval" if e.is_interval else "breakpoint"}
        d.update(_invariants_dict(e.invariants))
        entries.append(d)
    crit = [{"epsilon": str(c.epsilon), "kind": c.kind, "dimension": c.dimension,
             "before": c.before, "after": c.after} for c in report.critical_values]
    regimes = [{"from": str(lo), "to": None if hi is None else str(hi), "group": lab}
               for lo, hi, lab in report.regimes()]
    return {"breakpoints": [str(b) for b in report.breakpoints], "entries": entries,
            "critical_values": crit, "regimes": regimes}


def _oracle_dict(c) -> dict:
    return {"status": c.status, "closed": c.closed, "advisory": c.advisory, "reason": c.reason,
            "structure": None if c.structure is None else list(c.structure),
            "raster": None if c.raster is None else list(c.raster),
            "pitch": None if c.pitch is None else _num(c.pitch)}


def _base_document(args, data: bytes, cloud: PointCloud) -> dict:
    return {
        "schema": SCHEMA,
        "tool": "tolerance-homotopy",
        "version": __version__,
        "input": {"path": Path(args.input).name, "sha256": hashlib.sha256(data).hexdigest(),
                  "points": len(cloud), "dimension": cloud.dimension},
        "config": {"metric": str(cloud.metric), "pitch": _num(args.pitch), "effort": args.effort,
                   "oracle": bool(args.oracle), "y_up": bool(args.y_up), "base": args.base},
        "warnings": [],
    }


def _dump(doc: dict, path: Optional[str]) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _scan_csv(report: EpsilonScanReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epsilon", "upper", "at", "components", "group", "betti", "torsion"])
    for e in report.entries:
        inv = e.invariants
        ab = inv.abelian
        w.writerow([str(e.epsilon), "" if e.upper is None else str(e.upper),
                    "interval" if e.is_interval else "breakpoint", inv.component_count, inv.label,
                    "" if ab is None else ab.betti, "" if ab is None else " ".join(map(str, ab.torsion))])
    return buf.getvalue()


def cmd_scan(args) -> int:
    cloud, data = _load(args)
    doc = _base_document(args, data, cloud)
    base = args.base if len(cloud) else None
    report = epsilon_scan(cloud, args.effort, base)
    doc["mode"] = "scan"
    doc["result"] = scan_document(report)
    doc["warnings"] += list(report.warnings)
    if args.oracle:
        doc["oracle"] = _scan_oracle(cloud, report, doc["warnings"])
    _dump(doc, args.json)
    if args.csv:
        Path(args.csv).write_text(_scan_csv(report), encoding="utf-8")
    groups = [e.invariants.group for e in report.entries if e.invariants.group is not None]
    return EXIT_UNRESOLVED if any(not g.conclusive for g in groups) else EXIT_OK


def _scan_oracle(cloud: PointCloud, report: EpsilonScanReport, warnings: list) -> list:
    if cloud.dimension != 2:
        warnings.append("dilation oracle needs planar input; skipped")
        return []
    out = []
    for e in report.entries:
        if not e.is_interval:
            continue
        mid = e.evaluation_epsilon
        if not isinstance(mid, Fraction) or mid <= 0:
            continue
        c = compare_with_scan(cloud, mid, e.invariants, closed=False)
        d = _oracle_dict(c)
        d["epsilon"] = _num(mid)
        out.append(d)
        if c.status == "disagree":
            warnings.append(f"oracle disagrees at ε = {_num(mid)}")
    return out


def triangle_count(cloud: PointCloud, res: Resolution) -> int:
    if len(cloud) == 0:
        return 0
    a = tolerance_adjacency(cloud, res).astype(np.int64)
    np.fill_diagonal(a, 0)
    return int(np.einsum("ij,jk,ki->", a, a, a) // 6)


def cmd_analyze(args) -> int:
    if args.eps is None:
        raise InputError("analyze needs --eps")
    cloud, data = _load(args)
    doc = _base_document(args, data, cloud)
    eps = parse_number(args.eps, args.scale) if args.eps.lower() not in ("inf", "infinity") else float("inf")
    closed = not args.open
    doc["mode"] = "analyze"
    doc["config"].update({"epsilon": args.eps, "closed": closed})
    res = Resolution(eps, closed)
    base = args.base if len(cloud) else None
    inv = analyze_structure(cloud, res, base, args.effort)
    result = _invariants_dict(inv)
    result["triangles"] = triangle_count(cloud, res)
    doc["result"] = result
    if inv.group is not None and not inv.group.conclusive:
        doc["warnings"].append("unresolved group; compared by abelian invariants"
                               + ("; planar context: betti determines free rank"
                                  if cloud.dimension == 2 else ""))
    if args.oracle:
        if cloud.dimension == 2 and isinstance(eps, Fraction) and eps > 0:
            c = compare_with_scan(cloud, eps, inv, closed=closed)
            doc["oracle"] = [_oracle_dict(c)]
            if closed:
                doc["warnings"].append("closed-structure oracle comparison is advisory")
        else:
            doc["warnings"].append("dilation oracle needs planar input and finite ε > 0; skipped")
    _dump(doc, args.json)
    return EXIT_UNRESOLVED if inv.group is not None and not inv.group.conclusive else EXIT_OK


def cmd_fixtures(args) -> int:
    params = {"name": args.name, "metric": args.metric}
    if args.name == "circle":
        cloud = region_fixture("circle", metric=args.metric, k=args.k)
        params["k"] = args.k
    else:
        geometry = fixture_specs()["fixtures"].get(args.name, {})
        pitch = args.pitch if args.pitch is not None else Fraction(geometry.get("default_pitch", "1/2"))
        cloud = region_fixture(args.name, pitch, metric=args.metric)
        params["pitch"] = _num(pitch)
        params["geometry"] = geometry
    lines = ["# fixture " + args.name, ",".join(f"x{i + 1}" for i in range(cloud.dimension))]
    lines += [",".join(format_fraction(c) for c in p) for p in cloud.points]
    text = "\n".join(lines) + "\n"
    params["points"] = len(cloud)
    params["sha256"] = hashlib.sha256(text.encode()).hexdigest()
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        side = out.with_suffix(".params.json")
        side.write_text(json.dumps(params, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _load(args):
    metric = Metric.parse(args.metric)
    return load_input(args.input, args.format, metric, args.pitch, args.y_up, args.scale)


def _pitch(text: str) -> Fraction:
    v = parse_number(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("pitch must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tolerance-homotopy",
                                     description="π₀ and π₁ of point clouds and images at every resolution ε.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="point CSV, plain PBM/PGM or 0/1 grid")
        p.add_argument("--format", choices=("auto", "csv", "image"), default="auto")
        p.add_argument("--metric", default="linf", help="l1, l2, linf or lp:<p>")
        p.add_argument("--pitch", type=_pitch, default=Fraction(1), help="lattice pitch for images")
        p.add_argument("--effort", type=int, default=DEFAULT_EFFORT, help="presentation simplification budget")
        p.add_argument("--oracle", action="store_true", help="compare with the raster dilation (2-D)")
        p.add_argument("--json", help="write the report here instead of stdout")
        p.add_argument("--y-up", action="store_true", help="image row 0 is the smallest y")
        p.add_argument("--scale", type=int, help="round inexact literals to multiples of 1/SCALE")
        p.add_argument("--base", type=int, default=0, help="base point index for π₁")

    p = sub.add_parser("scan", help="sweep ε over all breakpoints")
    common(p)
    p.add_argument("--scan", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--csv", help="also write plot-ready CSV")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("analyze", help="invariants at a single ε")
    common(p)
    p.add_argument("--eps", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--open", action="store_true", help="use d < ε")
    mode.add_argument("--closed", action="store_true", help="use d <= ε (default)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fixtures", help="write a pinned fixture cloud as CSV")
    p.add_argument("name", choices=sorted(fixture_specs()["fixtures"]) + ["circle"])
    p.add_argument("--pitch", type=_pitch, default=None,
                   help="lattice pitch (default: the fixture's pinned pitch)")
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--metric", default="linf")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MetricError, ComplexError, GroupError, DilationError, RetractError,
            OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
