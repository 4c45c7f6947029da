"""Named verification checks over all modules, with machine-readable reports.

Every check returns a CheckReport; a report's JSON form is byte-stable given
the parameters (timings are zeroed in the canonical emission and reported
separately).  The registry keys are the stable public check names.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import complexes, idempotent, pgroups, torus
from .algebra import PermModule, gl_group
from .gf import bruhat_factor, general_linear

CONVENTION_NOTES = {
    "orientation": "flags ordered by increasing dimension; boundary alternates signs",
    "module_side": "left modules; algebra elements act by left multiplication",
    "homology_action": "degree-one matrices equal the group element; the dual "
                       "convention is reported alongside where applicable",
    "join_sign": "per-(i,j) global sign recorded in the join-product witness",
}


@dataclass
class CheckReport:
    check: str
    params: dict
    status: str  # pass | fail | skipped
    witness: dict
    elapsed_ms: int = 0
    convention_notes: dict = field(default_factory=lambda: dict(CONVENTION_NOTES))

    def to_dict(self, with_timing: bool = False) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "status": self.status,
            "witness": self.witness,
            "elapsed_ms": self.elapsed_ms if with_timing else 0,
            "convention_notes": self.convention_notes,
        }


def _regular_module(n: int, p: int) -> PermModule:
    return PermModule.regular(gl_group(n, p))


def _sanitize(obj):
    """Make a witness JSON-able and deterministic."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in sorted(obj.items(), key=lambda t: str(t[0]))}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if isinstance(obj, frozenset):
        return sorted(obj)
    if hasattr(obj, "a"):
        return obj.a.tolist()
    if hasattr(obj, "images"):
        return "hom"
    return str(obj)


# ---------------------------------------------------------------------------
# Check implementations (params -> (ok, witness))

def _check_idempotent(params):
    w = idempotent.idempotency_check(params["n"], params["p"])
    return w["ok"], w


def _check_steinberg_lemma(params):
    w = idempotent.steinberg_lemma_check(params["n"], params["p"])
    return w["ok"], w


def _check_product_identity(params):
    w = idempotent.product_identity_check(params["i"], params["j"], params["p"])
    return w["ok"], w


def _check_retraction(params):
    i, j, p = params["i"], params["j"], params["p"]
    w = idempotent.retraction_check(i, j, p, _regular_module(i + j, p))
    return w["ok"], w


def _check_assoc_comm(params):
    i, j, p = params["i"], params["j"], params["p"]
    k = params.get("k")
    if k:
        n = i + j + k
        if p == 2:
            module = _regular_module(n, p)
            module_name = "regular"
        else:
            module = torus.stiefel_module(n, 1, p)
            module_name = module.name
        w = idempotent.assoc_check(i, j, k, p, module)
        w["module"] = module_name
    else:
        w = idempotent.comm_check(i, j, p, _regular_module(i + j, p))
        w["module"] = "regular"
    return w["ok"], w


def _check_flag_homology(params):
    n, p = params["n"], params["p"]
    expected_rank = p ** (n * (n - 1) // 2)
    hom_b = complexes.flag_homology(n, p, "B")
    ok_b = (hom_b.nonzero_degrees() == [n - 2]
            and hom_b.free_rank.get(n - 2) == expected_rank
            and not hom_b.torsion)
    witness = {"n": n, "p": p, "expected_rank": expected_rank,
               "proper_mode_rank": hom_b.free_rank.get(n - 2, 0),
               "proper_mode_degrees": hom_b.nonzero_degrees(),
               "torsion_free": not hom_b.torsion}
    ok = ok_b
    if n >= 1 and params.get("diamond", True):
        hom_d = complexes.flag_homology(n, p, "BDiamond")
        ok_d = (hom_d.nonzero_degrees() == [n - 1]
                and hom_d.free_rank.get(n - 1) == expected_rank
                and not hom_d.torsion)
        witness["suspension_rank"] = hom_d.free_rank.get(n - 1, 0)
        witness["suspension_degrees"] = hom_d.nonzero_degrees()
        ok = ok and ok_d
    witness["ok"] = ok
    return ok, witness


def _check_cycles(params):
    n, p = params["n"], params["p"]
    exhaustive = len(gl_group(n, p)) <= 1000
    w = complexes.cycles_check(n, p, exhaustive_equivariance=exhaustive)
    return w["ok"], w


def _check_join_product(params):
    w = complexes.join_product_check(params["i"], params["j"], params["p"])
    return w["ok"], w


def _check_prop10(params):
    w = complexes.parabolic_span_check(params["n"], params["i"], params["p"])
    return w["ok"], w


def _check_bruhat(params):
    n, p = params["n"], params["p"]
    count = 0
    for m in general_linear(n, p):
        a, s, b = bruhat_factor(m)  # raises if reconstruction fails
        upper = np.triu(a.a)
        if not (np.array_equal(upper, a.a) and np.array_equal(np.triu(b.a), b.a)):
            return False, {"n": n, "p": p, "witness": m.a.tolist(),
                           "failure": "factor not upper triangular"}
        count += 1
    return True, {"n": n, "p": p, "elements_checked": count, "ok": True}


def _check_unipotent_fixed(params):
    n, p = params["n"], params["p"]
    reps = complexes.p_subgroups_up_to_conjugacy(n, p)
    results = []
    ok = True
    for rep in reps:
        w = complexes.unipotent_fixed_check(rep)
        results.append({k: w[k] for k in
                        ("subgroup_order", "fixed_space_dim", "fixed_poset_size",
                         "fixed_poset_contractible", "normalizer_subposets_checked",
                         "ok")})
        ok = ok and w["ok"]
    return ok, {"n": n, "p": p, "classes": results,
                "class_count": len(reps), "ok": ok}


def _check_hom_partition(params):
    g = pgroups.named_group(params["group"])
    w = pgroups.hom_partition_check(g, params["n"], params["p"])
    return w["ok"], w


def _check_lemma17(params):
    n, d, p = params["n"], params["d"], params["p"]
    max_degree = params.get("max_degree", 4)
    results = {}
    ok = True
    for functor in ("trivial", "torus"):
        w = torus.stiefel_rank_check(n, d, p, functor, max_degree)
        results[functor] = w
        ok = ok and w["ok"]
    return ok, {"n": n, "d": d, "p": p, "max_degree": max_degree,
                "by_functor": results, "ok": ok}


def _check_theorem15(params):
    g = pgroups.named_group(params["group"])
    w = pgroups.fixed_point_decomposition_both_conventions(
        g, params["n"], params["p"], params.get("max_degree", 4))
    return w["ok"], w


def _check_fixed_point_index(params):
    g = pgroups.named_group(params["group"])
    n, p = params["n"], params["p"]
    target = gl_group(n, p)
    results = []
    ok = True
    for sub in g.subgroups():
        w = pgroups.fixed_point_index(g, sub, target)
        w.pop("classes", None)
        results.append(w)
        ok = ok and w["ok"]
    return ok, {"group": g.name, "n": n, "p": p, "target": f"GL_{n}(F_{p})",
                "subgroups": results, "ok": ok}


def _check_product_compat(params):
    g = pgroups.named_group(params["group"])
    m = params.get("i", 1)
    n = params.get("j", 1)
    p = params["p"]
    fam = pgroups.frattini_family(g)
    pairs = [(h, k) for h in fam.members for k in fam.members
             if pgroups.transverse_members(fam, h, k)]
    results = []
    ok = True
    for h, k in pairs:
        w = pgroups.product_compatibility_check(g, m, n, h, k, p)
        results.append({"d_h": fam.d[h], "d_k": fam.d[k],
                        "pairs_checked": w.get("pairs_checked", 0), "ok": w["ok"]})
        ok = ok and w["ok"]
    return ok, {"group": g.name, "m": m, "n": n, "p": p,
                "transverse_pairs": len(pairs), "results": results, "ok": ok}


REGISTRY = {
    "idempotent": (_check_idempotent, ("n", "p")),
    "steinberg-lemma": (_check_steinberg_lemma, ("n", "p")),
    "product-identity": (_check_product_identity, ("i", "j", "p")),
    "retraction": (_check_retraction, ("i", "j", "p")),
    "assoc-comm": (_check_assoc_comm, ("i", "j", "p")),
    "flag-homology": (_check_flag_homology, ("n", "p")),
    "cycles": (_check_cycles, ("n", "p")),
    "join-product": (_check_join_product, ("i", "j", "p")),
    "prop10": (_check_prop10, ("n", "i", "p")),
    "bruhat": (_check_bruhat, ("n", "p")),
    "unipotent-fixed": (_check_unipotent_fixed, ("n", "p")),
    "hom-partition": (_check_hom_partition, ("group", "n", "p")),
    "lemma17": (_check_lemma17, ("n", "d", "p")),
    "theorem15": (_check_theorem15, ("group", "n", "p")),
    "fixed-point-index": (_check_fixed_point_index, ("group", "n", "p")),
    "product-compat": (_check_product_compat, ("group", "p")),
}


def run_check(name: str, params: dict) -> CheckReport:
    if name not in REGISTRY:
        raise ValueError(f"unknown check {name!r}; known: {sorted(REGISTRY)}")
    fn, required = REGISTRY[name]
    missing = [k for k in required if params.get(k) is None]
    if missing:
        raise ValueError(f"check {name!r} needs parameters {missing}")
    start = time.monotonic()
    try:
        ok, witness = fn(params)
        status = "pass" if ok else "fail"
    except Exception as exc:  # surfaced as a failing report, not a crash
        status = "fail"
        witness = {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = int((time.monotonic() - start) * 1000)
    clean_params = {k: v for k, v in sorted(params.items()) if v is not None}
    return CheckReport(name, _sanitize(clean_params), status,
                       _sanitize(witness), elapsed)


# ---------------------------------------------------------------------------
# Suites

def _quick_plan() -> list[tuple[str, dict]]:
    plan: list[tuple[str, dict]] = []
    for (n, p) in [(1, 2), (1, 3), (2, 2), (2, 3)]:
        plan.append(("idempotent", {"n": n, "p": p}))
        plan.append(("steinberg-lemma", {"n": n, "p": p}))
    for p in (2, 3):
        plan.append(("product-identity", {"i": 1, "j": 1, "p": p}))
        plan.append(("retraction", {"i": 1, "j": 1, "p": p}))
        plan.append(("assoc-comm", {"i": 1, "j": 1, "p": p}))
        plan.append(("flag-homology", {"n": 1, "p": p}))
        plan.append(("flag-homology", {"n": 2, "p": p}))
        plan.append(("cycles", {"n": 2, "p": p}))
        plan.append(("join-product", {"i": 1, "j": 1, "p": p}))
        plan.append(("prop10", {"n": 2, "i": 1, "p": p}))
        plan.append(("bruhat", {"n": 2, "p": p}))
        plan.append(("unipotent-fixed", {"n": 2, "p": p}))
    for grp in ("C4", "C2xC2", "C2xC4", "Q8", "D8"):
        for n in (1, 2):
            plan.append(("hom-partition", {"group": grp, "n": n, "p": 2}))
    for grp in ("C9", "C3xC3", "Heis3"):
        for n in (1, 2):
            plan.append(("hom-partition", {"group": grp, "n": n, "p": 3}))
    for (n, d, p) in [(1, 1, 2), (2, 1, 2), (2, 2, 2), (2, 1, 3)]:
        plan.append(("lemma17", {"n": n, "d": d, "p": p, "max_degree": 4}))
    for grp in ("C2", "C4", "C2xC2"):
        plan.append(("theorem15", {"group": grp, "n": 2, "p": 2, "max_degree": 4}))
    plan.append(("theorem15", {"group": "C3", "n": 1, "p": 3, "max_degree": 4}))
    plan.append(("fixed-point-index", {"group": "C2", "n": 2, "p": 2}))
    plan.append(("fixed-point-index", {"group": "C4", "n": 2, "p": 2}))
    plan.append(("fixed-point-index", {"group": "C3", "n": 1, "p": 3}))
    plan.append(("product-compat", {"group": "C2xC2", "i": 1, "j": 1, "p": 2}))
    plan.append(("product-compat", {"group": "C3xC3", "i": 1, "j": 1, "p": 3}))
    return plan


def _full_plan() -> list[tuple[str, dict]]:
    plan = _quick_plan()
    for (n, p) in [(3, 2), (3, 3)]:
        plan.append(("idempotent", {"n": n, "p": p}))
        plan.append(("steinberg-lemma", {"n": n, "p": p}))
        plan.append(("flag-homology", {"n": n, "p": p}))
        plan.append(("cycles", {"n": n, "p": p}))
        plan.append(("bruhat", {"n": n, "p": p}))
    plan.append(("flag-homology", {"n": 4, "p": 2, "diamond": False}))
    for (i, j, p) in [(1, 2, 2), (2, 1, 2), (1, 2, 3), (2, 1, 3)]:
        plan.append(("product-identity", {"i": i, "j": j, "p": p}))
        plan.append(("join-product", {"i": i, "j": j, "p": p}))
    for (i, j, p) in [(1, 2, 2), (2, 1, 2)]:
        plan.append(("retraction", {"i": i, "j": j, "p": p}))
        plan.append(("assoc-comm", {"i": i, "j": j, "p": p}))
    for p in (2, 3):
        plan.append(("assoc-comm", {"i": 1, "j": 1, "k": 1, "p": p}))
    plan.append(("prop10", {"n": 3, "i": 1, "p": 2}))
    plan.append(("prop10", {"n": 3, "i": 2, "p": 2}))
    plan.append(("unipotent-fixed", {"n": 3, "p": 2}))
    for grp in ("C4", "C2xC2", "C2xC4", "Q8", "D8"):
        plan.append(("hom-partition", {"group": grp, "n": 3, "p": 2}))
    for (n, d) in [(3, 1), (3, 2), (3, 3)]:
        plan.append(("lemma17", {"n": n, "d": d, "p": 2, "max_degree": 4}))
    for grp in ("Q8", "D8", "C2xC4"):
        plan.append(("theorem15", {"group": grp, "n": 2, "p": 2, "max_degree": 4}))
    plan.append(("product-compat", {"group": "C2xC2", "i": 1, "j": 2, "p": 2}))
    plan.append(("product-compat", {"group": "Heis3", "i": 1, "j": 1, "p": 3}))
    return plan


SUITES = {"quick": _quick_plan, "full": _full_plan}


def run_suite(level: str, threads: int = 1) -> list[CheckReport]:
    if level not in SUITES:
        raise ValueError(f"unknown suite {level!r}")
    plan = SUITES[level]()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda item: run_check(*item), plan))
    else:
        reports = [run_check(name, params) for name, params in plan]
    reports.sort(key=lambda r: (r.check, json.dumps(r.params, sort_keys=True)))
    return reports


def reports_to_json(reports: list[CheckReport], with_timing: bool = False) -> str:
    payload = {
        "suite": [r.to_dict(with_timing=with_timing) for r in reports],
        "passed": sum(r.status == "pass" for r in reports),
        "failed": sum(r.status == "fail" for r in reports),
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def reports_to_markdown(reports: list[CheckReport]) -> str:
    lines = ["| check | params | status |", "|---|---|---|"]
    for r in reports:
        params = json.dumps(r.params, sort_keys=True)
        lines.append(f"| {r.check} | `{params}` | {r.status} |")
    passed = sum(r.status == "pass" for r in reports)
    lines.append("")
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(lines) + "\n"
