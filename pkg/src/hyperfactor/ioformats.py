"""Instance file parsing and result emission.

Text grammar (one record per line, ``#`` comments):

    instance n=30 h=3 lambda=1 m=8 [seed=0] [mode=thm11]
    colors r=2x203 [s=1x105] [A=all|1,2,5-9]
    edge 1 2 3 [color=7] [copies=2]

``r``/``s`` specs are comma lists whose items are either ``v`` or ``vxCOUNT``.
Emitted results reuse the same grammar plus ``certificate``/``class``/``trace``
records, which the parser skips, so results round-trip as instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .detachment import DetachmentResult, SplitStep
from .errors import ParseError, ValidationError
from .model import UNCOLORED, Coloring, Instance, MultiHypergraph, binom
from .verification import Certificate

SCHEMA = "hyperfactor/1"


@dataclass
class ParsedJob:
    inst: Instance
    hypergraph: MultiHypergraph
    coloring: Coloring
    A: frozenset[int] = frozenset()
    seed: int = 0
    mode: Optional[str] = None


def parse_vector(spec: str) -> tuple[int, ...]:
    out: list[int] = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if "x" in item:
            v, cnt = item.split("x", 1)
            out.extend([int(v)] * int(cnt))
        else:
            out.append(int(item))
    return tuple(out)


def format_vector(vec: tuple[int, ...]) -> str:
    runs: list[tuple[int, int]] = []
    for v in vec:
        if runs and runs[-1][0] == v:
            runs[-1] = (v, runs[-1][1] + 1)
        else:
            runs.append((v, 1))
    return ",".join(f"{v}x{c}" if c > 1 else str(v) for v, c in runs)


def parse_color_set(spec: str, k: int) -> frozenset[int]:
    spec = spec.strip()
    if spec.lower() == "all":
        return frozenset(range(1, k + 1))
    if not spec:
        return frozenset()
    out: set[int] = set()
    for item in spec.split(","):
        if "-" in item:
            lo, hi = item.split("-", 1)
            out.update(range(int(lo), int(hi) + 1))
        else:
            out.add(int(item))
    return frozenset(out)


def format_color_set(A: frozenset[int], k: int) -> str:
    if not A:
        return ""
    if A == frozenset(range(1, k + 1)):
        return "all"
    items = sorted(A)
    parts = []
    start = prev = items[0]
    for x in items[1:]:
        if x == prev + 1:
            prev = x
            continue
        parts.append(f"{start}-{prev}" if prev > start else str(start))
        start = prev = x
    parts.append(f"{start}-{prev}" if prev > start else str(start))
    return ",".join(parts)


def _parse_kv(tokens: list[str], line_no: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(line_no, f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        out[key] = val
    return out


_SKIPPED = ("certificate", "class", "trace", "wing", "result")


def parse_instance(text: str) -> ParsedJob:
    """Parse instance text (or the JSON flavor) into validated job inputs."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    header: dict[str, str] = {}
    colors: dict[str, str] = {}
    edge_rows: list[tuple[int, list[int], int, int]] = []  # line, verts, color, copies
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "instance":
            header.update(_parse_kv(tokens[1:], line_no))
        elif kind == "colors":
            colors.update(_parse_kv(tokens[1:], line_no))
        elif kind == "edge":
            verts = []
            color = UNCOLORED
            copies = 1
            for tok in tokens[1:]:
                if "=" in tok:
                    key, val = tok.split("=", 1)
                    if key == "color":
                        color = int(val)
                    elif key == "copies":
                        copies = int(val)
                    else:
                        raise ParseError(line_no, f"unknown edge attribute {key!r}")
                else:
                    try:
                        verts.append(int(tok))
                    except ValueError:
                        raise ParseError(line_no, f"bad vertex {tok!r}")
            edge_rows.append((line_no, verts, color, copies))
        elif kind in _SKIPPED:
            continue
        else:
            raise ParseError(line_no, f"unknown record type {kind!r}")
    if not header:
        raise ParseError(1, "missing 'instance' line")
    if "r" not in colors:
        raise ParseError(1, "missing 'colors r=...' line")
    try:
        inst = Instance(
            n=int(header["n"]),
            h=int(header["h"]),
            lam=int(header.get("lambda", header.get("lam", "1"))),
            m=int(header["m"]),
            r=parse_vector(colors["r"]),
            s=parse_vector(colors["s"]) if "s" in colors else None,
        )
    except KeyError as exc:
        raise ParseError(1, f"instance line misses {exc}")
    except (ValueError, Exception) as exc:
        raise ValidationError(str(exc))
    seed = int(header.get("seed", "0"))
    mode = header.get("mode", "").upper() or None
    A = parse_color_set(colors.get("A", ""), inst.k)
    return _assemble(inst, edge_rows, A, seed, mode)


def _assemble(inst, edge_rows, A, seed, mode) -> ParsedJob:
    H = MultiHypergraph(range(1, inst.n + 1))
    C = Coloring(inst.k)
    for line_no, verts, color, copies in edge_rows:
        if len(verts) != inst.h:
            raise ValidationError(
                f"edge has {len(verts)} vertices, h={inst.h}", line_no
            )
        if len(set(verts)) != len(verts):
            raise ValidationError(f"edge {verts} repeats a vertex", line_no)
        if any(not (1 <= v <= inst.n) for v in verts):
            raise ValidationError(f"vertex outside 1..n in {verts}", line_no)
        if color != UNCOLORED and not (1 <= color <= inst.k):
            raise ValidationError(f"color {color} outside 1..k={inst.k}", line_no)
        if copies < 1:
            raise ValidationError("copies must be positive", line_no)
        e = tuple(sorted(verts))
        have = len(C.colors_of(e))
        if have + copies > inst.lam:
            raise ValidationError(
                f"{have + copies} copies of {e} exceed lambda={inst.lam}", line_no
            )
        H.add_edge(e, copies)
        cols = C.by_edge.setdefault(e, [])
        cols.extend([color] * copies)
    for i in sorted(A):
        if not (1 <= i <= inst.k):
            raise ValidationError(f"A contains {i} outside 1..k")
    return ParsedJob(inst, H, C, A, seed, mode)


def _parse_json(text: str) -> ParsedJob:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg)
    info = doc.get("instance", {})
    try:
        inst = Instance(
            n=int(info["n"]),
            h=int(info["h"]),
            lam=int(info.get("lambda", 1)),
            m=int(info["m"]),
            r=tuple(info["r"]),
            s=tuple(info["s"]) if info.get("s") is not None else None,
        )
    except KeyError as exc:
        raise ValidationError(f"instance block misses {exc}")
    rows = []
    for row in doc.get("edges", []):
        rows.append((0, list(row["vertices"]), int(row.get("color", 0)), int(row.get("copies", 1))))
    A = frozenset(int(x) for x in info.get("A", []))
    return _assemble(inst, rows, A, int(info.get("seed", 0)), info.get("mode"))


def _instance_lines(inst: Instance, seed: int, mode: Optional[str], A: frozenset[int]) -> list[str]:
    head = f"instance n={inst.n} h={inst.h} lambda={inst.lam} m={inst.m} seed={seed}"
    if mode:
        head += f" mode={mode.lower()}"
    colors = f"colors r={format_vector(inst.r)}"
    if inst.s is not None:
        colors += f" s={format_vector(inst.s)}"
    if A:
        colors += f" A={format_color_set(A, inst.k)}"
    return [head, colors]


def emit_instance(job: ParsedJob) -> str:
    lines = _instance_lines(job.inst, job.seed, job.mode, job.A)
    for e in sorted(job.hypergraph.edges):
        for color in job.coloring.colors_of(e):
            vs = " ".join(str(v) for v in e)
            if color == UNCOLORED:
                lines.append(f"edge {vs}")
            else:
                lines.append(f"edge {vs} color={color}")
    return "\n".join(lines) + "\n"


def _bool(x) -> str:
    return {True: "true", False: "false", None: "none"}[x]


def _certificate_lines(cert: Certificate) -> list[str]:
    lines = [
        "certificate pass={} admissible={} all_colored={} multiplicity={} preservation={}".format(
            _bool(cert.passed),
            _bool(cert.admissibility_ok),
            _bool(cert.all_colored),
            _bool(cert.multiplicity_ok),
            _bool(cert.preservation_ok),
        )
    ]
    wings = {w.color: w for w in cert.wing_reports}
    for rep in cert.per_class:
        line = "class {} r={} regular={} spanning={} connected={}".format(
            rep.color, rep.r, _bool(rep.regular), _bool(rep.spanning), _bool(rep.connected)
        )
        if rep.color in wings:
            w = wings[rep.color]
            line += f" wings={w.total} wings_small={w.small_wings} wings_bound={w.bound}"
        lines.append(line)
    return lines


def _trace_lines(trace: list[SplitStep]) -> list[str]:
    lines = []
    for step in trace:
        for (j, (X, i)), cnt in sorted(step.assignment.items()):
            cell = ".".join(str(v) for v in X) or "-"
            lines.append(
                f"trace step={step.step_index} weight={step.remaining_weight} "
                f"vertex={step.new_vertex} color={j} cell={cell} alphas={i} moved={cnt}"
            )
    return lines


def emit_result(
    result: DetachmentResult,
    cert: Optional[Certificate],
    inst: Instance,
    fmt: str = "text",
    seed: int = 0,
    mode: Optional[str] = None,
    A: frozenset[int] = frozenset(),
    trace: bool = False,
) -> str:
    """Canonical, deterministic rendering of a detachment plus certificate."""
    if fmt == "json":
        return _emit_json(result, cert, inst, seed, mode, A, trace)
    lines = ["# hyperfactor result"]
    lines += _instance_lines(inst, seed, mode, A)
    for e in sorted(result.hypergraph.edges):
        vs = " ".join(str(v) for v in e)
        for color in sorted(result.coloring.colors_of(e)):
            lines.append(f"edge {vs} color={color}")
    if cert is not None:
        lines += _certificate_lines(cert)
    if trace:
        lines += _trace_lines(result.trace)
    return "\n".join(lines) + "\n"


def _emit_json(result, cert, inst, seed, mode, A, trace) -> str:
    doc = {
        "schema": SCHEMA,
        "instance": {
            "n": inst.n,
            "h": inst.h,
            "lambda": inst.lam,
            "m": inst.m,
            "r": list(inst.r),
            "s": list(inst.s) if inst.s is not None else None,
            "seed": seed,
            "mode": mode.lower() if mode else None,
            "A": sorted(A),
        },
        "edges": [],
    }
    for e in sorted(result.hypergraph.edges):
        for color in sorted(result.coloring.colors_of(e)):
            doc["edges"].append({"vertices": list(e), "color": color})
    if cert is not None:
        doc["certificate"] = certificate_dict(cert)
    if trace:
        doc["trace"] = [
            {
                "step": s.step_index,
                "weight": s.remaining_weight,
                "vertex": s.new_vertex,
                "moves": [
                    {"color": j, "cell": list(X), "alphas": i, "count": cnt}
                    for (j, (X, i)), cnt in sorted(s.assignment.items())
                ],
            }
            for s in result.trace
        ]
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def certificate_dict(cert: Certificate) -> dict:
    return {
        "pass": cert.passed,
        "admissible": cert.admissibility_ok,
        "all_colored": cert.all_colored,
        "multiplicity": cert.multiplicity_ok,
        "preservation": cert.preservation_ok,
        "classes": [
            {
                "color": r.color,
                "r": r.r,
                "regular": r.regular,
                "spanning": r.spanning,
                "connected": r.connected,
            }
            for r in cert.per_class
        ],
        "wings": [
            {
                "color": w.color,
                "small": w.small_wings,
                "large": w.large_wings,
                "total": w.total,
                "bound": w.bound,
                "base_components": w.components_of_base,
            }
            for w in cert.wing_reports
        ],
    }
