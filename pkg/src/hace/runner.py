"""Execute parsed jobs and seeded batteries, producing deterministic reports.

Reports are plain dicts of strings, numbers, booleans, lists, and dicts, so
the text and json renderings are byte-stable across runs for equal inputs.
"""

from __future__ import annotations

import json

from . import apps, ends, kusarigama
from .catspec import CatSpec, Job
from .fincat import SetFunctorPQ
from .setops import FinSet, render_label


def _carrier_summary(fs: FinSet, limit: int = 24) -> dict:
    out: dict = {"size": len(fs)}
    if len(fs) <= limit:
        out["elements"] = [render_label(x) for x in fs]
    return out


def _grid_sig_ok(sig) -> bool:
    p, q = sig.p, sig.q
    return (p, q) in ((1, 0), (0, 1)) or (p >= 1 and q >= 1 and min(p, q) == 1)


def run_end(F: SetFunctorPQ, method: str | None = None,
            cap: int | None = None) -> dict:
    if method and method != "all":
        res = ends.end_pq(F, method, cap)
        return {"kind": "end", "functor": F.name, "method": method,
                "carrier": _carrier_summary(res.carrier), "ok": True}
    results, agree = ends.end_all(F, cap)
    first = results[ends.END_METHODS[0]]
    return {"kind": "end", "functor": F.name, "method": "all",
            "carrier": _carrier_summary(first.carrier),
            "sizes": {m: len(r.carrier) for m, r in results.items()},
            "agree": agree, "ok": agree}


def run_coend(F: SetFunctorPQ, method: str | None = None,
              cap: int | None = None) -> dict:
    if method and method != "all":
        res = ends.coend_pq(F, method, cap)
        return {"kind": "coend", "functor": F.name, "method": method,
                "carrier": _carrier_summary(res.carrier),
                "class_sizes": [len(c) for c in res.classes], "ok": True}
    results, agree = ends.coend_all(F, cap)
    first = results[ends.COEND_METHODS[0]]
    return {"kind": "coend", "functor": F.name, "method": "all",
            "carrier": _carrier_summary(first.carrier),
            "class_sizes": [len(c) for c in first.classes],
            "sizes": {m: len(r.carrier) for m, r in results.items()},
            "agree": agree, "ok": agree}


def run_dinat(F: SetFunctorPQ, G: SetFunctorPQ, cap: int | None = None) -> dict:
    bridge = ends.dinat_as_end(F, G, cap=cap)
    return {"kind": "dinat", "source": F.name, "target": G.name,
            "count": len(bridge.dinats), "end_size": len(bridge.end.carrier),
            "bridge_ok": bridge.ok, "detail": bridge.detail, "ok": bridge.ok}


def run_kusarigama(F: SetFunctorPQ, G: SetFunctorPQ,
                   cap: int | None = None) -> dict:
    rep = kusarigama.adjunction_check(F, G, cap, count_naturals=False)
    out = {"kind": "kusarigama", "source": F.name, "target": G.name,
           "n_dinat": rep.n_dinat, "round_trips_ok": rep.ok,
           "detail": rep.detail}
    flat_ok = True
    if F.sig.arity:
        flat_ok = kusarigama.colim_flattening_check(F, cap) and \
            kusarigama.lim_flattening_check(G, cap)
        out["flattening_ok"] = flat_ok
    out["ok"] = rep.ok and flat_ok
    return out


def run_fubini(F: SetFunctorPQ, G: SetFunctorPQ, cap: int | None = None) -> dict:
    rep = apps.fubini_check(F, G, cap)
    return {"kind": "fubini", "factors": [F.name, G.name],
            "joint_size": rep.n_joint,
            "iterated_sizes": [rep.n_outer_first, rep.n_outer_second],
            "detail": rep.detail, "ok": rep.ok}


def run_day(M: apps.MonoidalFinCat, factors, cap: int | None = None) -> dict:
    day = apps.day_tensor(M, list(factors), cap)
    fibers = {str(c): len(day.fiber((c,))) for c in M.cat.objects}
    out = {"kind": "day", "base": M.cat.name,
           "factors": [D.name for D in factors], "fiber_sizes": fibers}
    if len(factors) == 1:
        out["identity_ok"] = apps.day_singleton_is_identity(M, factors[0], cap)
        out["ok"] = out["identity_ok"]
    else:
        out["ok"] = True
    return out


def run_check_all(F: SetFunctorPQ, G: SetFunctorPQ,
                  cap: int | None = None) -> dict:
    """The full battery on a source/target pair with flipped signatures."""
    end_results, end_agree = ends.end_all(F, cap)
    co_results, co_agree = ends.coend_all(F, cap)
    first_end = end_results[ends.END_METHODS[0]]
    first_co = co_results[ends.COEND_METHODS[0]]
    uni = ends.verify_universal_property(F, first_end, first_co, cap=cap)
    bridge = ends.dinat_as_end(F, G, cap=cap)
    adj = kusarigama.adjunction_check(F, G, cap, count_naturals=False)
    structure: dict = {
        "mute_invariance": ends.mute_invariance_check(F, cap=cap),
    }
    if F.sig.p >= 1 and F.sig.q >= 1:
        structure["sigma_limit"] = ends.end_via_sigma_check(F, cap)
        structure["flattening"] = (kusarigama.colim_flattening_check(F, cap)
                                   and kusarigama.lim_flattening_check(G, cap))
    if _grid_sig_ok(F.sig):
        structure["grid_end"] = ends.end_via_grid_elements_check(F, cap)
        structure["grid_coend"] = ends.coend_via_grid_elements_check(F, cap)
        structure["weighted_forms"] = ends.weighted_forms_check(F, cap)
    ok = (end_agree and co_agree and uni.ok and bridge.ok and adj.ok
          and all(structure.values()))
    return {
        "kind": "check-all", "source": F.name, "target": G.name,
        "sig": [F.sig.p, F.sig.q],
        "end": {"sizes": {m: len(r.carrier) for m, r in end_results.items()},
                "agree": end_agree,
                "carrier": _carrier_summary(first_end.carrier)},
        "coend": {"sizes": {m: len(r.carrier) for m, r in co_results.items()},
                  "agree": co_agree,
                  "class_sizes": [len(c) for c in first_co.classes]},
        "universal": {"ok": uni.ok, "checked_end": uni.checked_end,
                      "checked_coend": uni.checked_coend},
        "dinat": {"count": len(bridge.dinats), "bridge_ok": bridge.ok},
        "adjunction": {"ok": adj.ok, "n_dinat": adj.n_dinat},
        "structure": structure,
        "ok": ok,
    }


def run_job(spec: CatSpec, job: Job, cap: int | None = None) -> dict:
    if job.kind == "end":
        return run_end(spec.functors[job.args[0]], job.method, cap)
    if job.kind == "coend":
        return run_coend(spec.functors[job.args[0]], job.method, cap)
    if job.kind == "dinat":
        return run_dinat(spec.functors[job.args[0]], spec.functors[job.args[1]], cap)
    if job.kind == "kusarigama":
        return run_kusarigama(spec.functors[job.args[0]],
                              spec.functors[job.args[1]], cap)
    if job.kind == "fubini":
        return run_fubini(spec.functors[job.args[0]],
                          spec.functors[job.args[1]], cap)
    if job.kind == "day":
        M = spec.monoidals[job.args[0]]
        factors = [spec.functors[n] for n in job.args[1:]]
        return run_day(M, factors, cap)
    return run_check_all(spec.functors[job.args[0]],
                         spec.functors[job.args[1]], cap)


def run_spec(spec: CatSpec, cap: int | None = None) -> dict:
    jobs = [run_job(spec, job, cap) for job in spec.jobs]
    return {"jobs": jobs, "ok": all(j["ok"] for j in jobs)}


def run_instance_job(inst, kind: str, method: str | None = None,
                     cap: int | None = None) -> dict:
    """Run one job kind directly on a generated instance."""
    header = {"seed": inst.seed, "profile": inst.profile,
              "instance": inst.describe()}
    if kind == "end":
        out = run_end(inst.functor, method, cap)
    elif kind == "coend":
        out = run_coend(inst.functor, method, cap)
    elif kind == "dinat":
        out = run_dinat(inst.functor, inst.partner, cap)
    elif kind == "kusarigama":
        out = run_kusarigama(inst.functor, inst.partner, cap)
    elif kind == "fubini":
        out = run_fubini(inst.functor, inst.partner, cap)
    elif kind == "day":
        out = run_day(inst.monoidal, inst.factors, cap)
    else:
        out = run_check_all(inst.functor, inst.partner, cap)
    out.update(header)
    return out


def render_report(report: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    lines: list[str] = []

    def walk(value, indent: int, key: str | None):
        pad = "  " * indent
        label = f"{key}: " if key is not None else ""
        if isinstance(value, dict):
            if key is not None:
                lines.append(f"{pad}{key}:")
            for k in value:
                walk(value[k], indent + (key is not None), k)
        elif isinstance(value, (list, tuple)):
            if all(not isinstance(v, (dict, list, tuple)) for v in value):
                lines.append(f"{pad}{label}[" + ", ".join(map(str, value)) + "]")
            else:
                lines.append(f"{pad}{key}:")
                for v in value:
                    lines.append(f"{pad}  -")
                    walk(v, indent + 1, None)
        else:
            lines.append(f"{pad}{label}{value}")

    walk(report, 0, None)
    return "\n".join(lines) + "\n"
