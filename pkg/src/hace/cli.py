"""Command line entry point.

Exit codes: 0 all checks passed, 1 a computation or law check failed,
2 a size cap was exceeded, 3 bad usage or unparseable input.
"""

from __future__ import annotations

import argparse
import sys
import time

from .catspec import parse_text
from .ends import COEND_METHODS, END_METHODS
from .errors import HaceError, ParseError, SizeCapExceeded
from .generate import PROFILES, generate_text, instance
from .runner import render_report, run_instance_job, run_job, run_spec

KIND_PROFILE = {
    "end": "standard", "coend": "standard", "dinat": "standard",
    "check-all": "standard", "kusarigama": "kusarigama",
    "fubini": "fubini", "day": "day",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the parse-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="hace",
        description="Ends, coends, and dinaturality checks for finite "
                    "mixed-variance Set-valued functors.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_method: bool):
        p.add_argument("file", nargs="?",
                       help=".cat file to run; omit it and pass --seed "
                            "to use a generated instance")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for a generated instance")
        p.add_argument("--cap", type=int, default=None,
                       help="size cap for materialized sets (or HACE_CAP)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--skip-assoc-check", action="store_true",
                       help="trust associativity of parsed tables")
        p.add_argument("--timing", action="store_true",
                       help="print elapsed wall time to stderr")
        if with_method:
            p.add_argument("--method", default=None,
                           choices=sorted(set(END_METHODS + COEND_METHODS)
                                          | {"all"}))

    help_by_kind = {
        "end": "evaluate an end by every method",
        "coend": "evaluate a coend by every method",
        "dinat": "enumerate dinaturals and check the end presentation",
        "kusarigama": "check the chained/hooked adjunction",
        "fubini": "check product interchange",
        "day": "evaluate a Day convolution",
        "check-all": "run the whole battery on a source/target pair",
    }
    for kind, text in help_by_kind.items():
        p = sub.add_parser(kind, help=text)
        common(p, with_method=kind in ("end", "coend"))

    g = sub.add_parser("generate", help="print a generated instance as .cat text")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--profile", choices=PROFILES, default="standard")

    r = sub.add_parser("report", help="run a seeded battery and summarize")
    r.add_argument("--seeds", type=int, default=5)
    r.add_argument("--cap", type=int, default=None)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--timing", action="store_true")
    return ap


def _run_kind(args) -> dict:
    kind = args.command
    if args.file is not None:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
        spec = parse_text(text, assoc_check=not args.skip_assoc_check)
        jobs = [j for j in spec.jobs if j.kind == kind]
        if not jobs:
            raise ParseError(1, 1, f"at least one '{kind}' job in {args.file}")
        results = []
        for job in jobs:
            if kind in ("end", "coend") and getattr(args, "method", None):
                job.method = args.method
            results.append(run_job(spec, job, args.cap))
        return {"jobs": results, "ok": all(r["ok"] for r in results)}
    if args.seed is None:
        raise ParseError(1, 1, "a .cat file or --seed")
    inst = instance(args.seed, KIND_PROFILE[kind])
    return run_instance_job(inst, kind, getattr(args, "method", None), args.cap)


def _run_report(args) -> dict:
    rows = []
    for seed in range(args.seeds):
        inst = instance(seed, "standard")
        out = run_instance_job(inst, "check-all", None, args.cap)
        rows.append({"seed": seed, "profile": "standard",
                     "instance": out["instance"], "ok": out["ok"],
                     "dinat_count": out["dinat"]["count"],
                     "end_size": out["end"]["sizes"]["equalizer"],
                     "coend_size": out["coend"]["sizes"]["coequalizer"]})
    for seed in range(min(args.seeds, 3)):
        fub = run_instance_job(instance(seed, "fubini"), "fubini", None, args.cap)
        rows.append({"seed": seed, "profile": "fubini", "ok": fub["ok"],
                     "joint_size": fub["joint_size"]})
        day = run_instance_job(instance(seed, "day"), "day", None, args.cap)
        rows.append({"seed": seed, "profile": "day", "ok": day["ok"]})
    return {"rows": rows, "ok": all(r["ok"] for r in rows)}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        if args.command == "generate":
            sys.stdout.write(generate_text(args.seed, args.profile))
            return 0
        if args.command == "report":
            report = _run_report(args)
        else:
            report = _run_kind(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except SizeCapExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except HaceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(render_report(report, args.format))
    if getattr(args, "timing", False):
        print(f"elapsed: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
