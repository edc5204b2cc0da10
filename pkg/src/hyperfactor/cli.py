"""Command-line interface.

Subcommands: check, bounds, embed, embed-partial, verify, oracle, search.
Exit codes: 0 success/verified, 1 usage or parse trouble, 2 necessity
violated, 3 infeasible hypothesis, 4 internal contract failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import arithmetic, ioformats
from .errors import HyperfactorError, ValidationError
from .model import Instance
from .pipelines import EmbeddingJob, run_job
from .verification import oracle_extend, search_counterexample


def _add_common(p):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path, default=None, help="write output to a file")


def _emit(args, text: str) -> None:
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> ioformats.ParsedJob:
    return ioformats.parse_instance(Path(path).read_text())


def _inline_instance(args) -> Instance:
    return Instance(
        n=args.n,
        h=args.h,
        lam=args.lam,
        m=args.m,
        r=ioformats.parse_vector(args.r),
        s=ioformats.parse_vector(args.s) if args.s else None,
    )


def cmd_check(args) -> int:
    if args.file:
        job = _load(args.file)
        inst = job.inst
    else:
        if not (args.n and args.h and args.m and args.r):
            raise ValidationError("check needs FILE or --n/--h/--m/--r")
        job = None
        inst = _inline_instance(args)
    admissible = arithmetic.check_admissible(inst)
    p = arithmetic.derived_params(inst)
    report = {
        "admissible": admissible,
        "failures": arithmetic.admissibility_failures(inst),
        "c": p.c,
        "d": p.d,
        "g": p.g,
    }
    if inst.s is not None:
        report["theorem12_hypothesis"] = arithmetic.theorem12_hypothesis(inst)
        A = job.A if job else frozenset()
        if A:
            B = arithmetic.derive_b(inst)
            report["theorem14_hypothesis"] = arithmetic.theorem14_hypothesis(inst, A, B)
    if job is not None and job.coloring.num_colored():
        ryser = arithmetic.ryser_diagnostic(job.hypergraph, job.coloring, inst)
        report["ryser_ok"] = ryser.ok
        report["ryser_violations"] = [
            {"color": j, "size": size, "needs": str(need)}
            for j, size, need, ok in ryser.entries
            if not ok
        ]
    if args.format == "json":
        _emit(args, json.dumps(report, indent=1, sort_keys=True) + "\n")
    else:
        lines = [f"admissible: {report['admissible']}"]
        lines += [f"  {f}" for f in report["failures"]]
        lines.append(f"c={p.c} d={p.d} g={p.g}")
        for key in ("theorem12_hypothesis", "theorem14_hypothesis", "ryser_ok"):
            if key in report:
                lines.append(f"{key}: {report[key]}")
        for v in report.get("ryser_violations", []):
            lines.append(f"  ryser violation: class {v['color']} has {v['size']} < {v['needs']}")
        _emit(args, "\n".join(lines) + "\n")
    return 0 if admissible else 3


def cmd_bounds(args) -> int:
    rows = []
    if args.preset:
        inst = Instance(n=args.n, h=args.h, lam=args.lam, m=args.m, r=(1,))
        rep = arithmetic.corollary_presets(args.preset, args.variant, inst)
        rows.append(("preset", args.preset, args.variant))
        rows.append(("k", rep.k, ""))
        rows.append(("budget", rep.budget, ""))
        rows.append(("r", ioformats.format_vector(rep.r), ""))
        rows.append(("connected", rep.connected, ""))
    else:
        if args.r is None:
            raise ValidationError("bounds needs --r or --preset")
        r = int(args.r)
        if args.s is not None:
            s = int(args.s)
            qa = arithmetic.qmax_74(args.m, args.h, args.lam, args.n, r, s, False)
            rows.append(("qmax (embedding)", qa, ""))
            if args.connected:
                qb = arithmetic.qmax_74(args.m, args.h, args.lam, args.n, r, s, True)
                rows.append(("qmax (connected)", qb, ""))
        else:
            qa = arithmetic.qmax_75(args.m, args.h, args.lam, args.n, r, False)
            rows.append(("qmax (embedding)", qa, ""))
            if args.connected:
                qb = arithmetic.qmax_75(args.m, args.h, args.lam, args.n, r, True)
                rows.append(("qmax (connected)", qb, ""))
    if args.format == "json":
        _emit(args, json.dumps({str(k): v for k, v, _ in rows}, indent=1) + "\n")
    else:
        _emit(args, "\n".join(f"{k} = {v}" for k, v, _ in rows) + "\n")
    return 0


def _parse_connected(value, k):
    if value is None:
        return frozenset()
    return ioformats.parse_color_set(value, k)


def _run_embed(path, args, partial: bool):
    job_in = _load(path)
    inst = job_in.inst
    A = _parse_connected(args.connected, inst.k) or job_in.A
    seed = args.seed if args.seed is not None else job_in.seed
    if partial:
        mode = "THM14" if A else "THM12"
    else:
        mode = "THM13" if A else "THM11"
    job = EmbeddingJob(inst=inst, coloring=job_in.coloring, mode=mode, A=A, seed=seed)
    outcome = run_job(job)
    return ioformats.emit_result(
        outcome.result,
        outcome.certificate,
        inst,
        fmt=args.format,
        seed=seed,
        mode=mode,
        A=A,
        trace=args.trace,
    )


def _embed_entry(params):
    path, args, partial = params
    return _run_embed(path, args, partial)


def cmd_embed(args, partial=False) -> int:
    files = args.files
    if len(files) > 1 and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            texts = list(pool.map(_embed_entry, [(f, args, partial) for f in files]))
    else:
        texts = [_run_embed(f, args, partial) for f in files]
    for path, text in zip(files, texts):
        if len(files) > 1:
            out = Path(path).with_suffix(".out." + ("json" if args.format == "json" else "txt"))
            out.write_text(text)
        else:
            _emit(args, text)
    return 0


def cmd_verify(args) -> int:
    from .verification import verify_factorization

    job = _load(args.file)
    A = _parse_connected(args.connected, job.inst.k) or job.A
    cert = verify_factorization(
        job.hypergraph, job.coloring, job.inst, connected_classes=A
    )
    doc = ioformats.certificate_dict(cert)
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    else:
        lines = [f"pass: {cert.passed}"]
        for rep in cert.per_class:
            if not (rep.regular and rep.spanning) or (
                rep.color in A and rep.connected is not True
            ):
                lines.append(
                    f"  class {rep.color}: regular={rep.regular} spanning={rep.spanning}"
                    f" connected={rep.connected}"
                )
        if not cert.multiplicity_ok:
            lines.append("  multiplicity broken")
        if not cert.all_colored:
            lines.append("  some copies are uncolored")
        _emit(args, "\n".join(lines) + "\n")
    return 0 if cert.passed else 4


def cmd_oracle(args) -> int:
    job = _load(args.file)
    A = _parse_connected(args.connected, job.inst.k) or job.A
    out = oracle_extend(
        job.coloring,
        job.inst,
        connected_classes=A,
        max_copies=args.max_copies,
        count_cap=args.count_cap,
        first_only=args.first_only,
    )
    doc = {"found": out.found, "count": out.count, "capped": out.capped}
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    else:
        _emit(args, f"found: {out.found}\ncount: {out.count}\ncapped: {out.capped}\n")
    return 0 if out.found else 3


def cmd_search(args) -> int:
    findings = search_counterexample(
        h=args.h,
        m_range=range(args.m_min, args.m_max + 1),
        n_range=range(args.n_min, args.n_max + 1),
        lam=args.lam,
        max_copies=args.max_copies,
        seed=args.seed or 0,
    )
    lines = [f"findings: {len(findings)}"]
    for f in findings:
        lines.append(
            f"  n={f.inst.n} h={f.inst.h} lambda={f.inst.lam} m={f.inst.m}"
            f" r={ioformats.format_vector(f.inst.r)}: {f.note}"
        )
    _emit(args, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperfactor")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="admissibility, hypotheses, diagnostics")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--lam", "--lambda", dest="lam", type=int, default=1)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=str)
    p.add_argument("--s", type=str)
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", help="color-budget calculators and presets")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--lam", "--lambda", dest="lam", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=str)
    p.add_argument("--s", type=str)
    p.add_argument("--connected", action="store_true")
    p.add_argument("--preset", choices=("I", "II", "III", "IV", "V"))
    p.add_argument("--variant", choices=("2", "7"), default="7")
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    for name, partial in (("embed", False), ("embed-partial", True)):
        p = sub.add_parser(name, help=("hole-filling " if partial else "") + "embedding")
        p.add_argument("files", nargs="+")
        p.add_argument("--connected", nargs="?", const="all", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trace", action="store_true")
        p.add_argument("--jobs", type=int, default=1)
        _add_common(p)
        p.set_defaults(func=lambda a, partial=partial: cmd_embed(a, partial))

    p = sub.add_parser("verify", help="re-verify an emitted result")
    p.add_argument("file")
    p.add_argument("--connected", nargs="?", const="all", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive search for an extension")
    p.add_argument("file")
    p.add_argument("--connected", nargs="?", const="all", default=None)
    p.add_argument("--max-copies", type=int, default=64)
    p.add_argument("--count-cap", type=int, default=10**6)
    p.add_argument("--first-only", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("search", help="probe tiny instances for counterexamples")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=3)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--lam", "--lambda", dest="lam", type=int, default=1)
    p.add_argument("--max-copies", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HyperfactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
