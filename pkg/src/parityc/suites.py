"""Verification suites.

A suite is a list of JSON-serializable instances plus a check applied to each.
Failures carry the instance (and the offending cochain where relevant), so any
witness can be re-run with ``replay``.  Reports hold no timings and are ordered
by instance, so they are byte-identical across shard counts.
"""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import categorify as cat
from .census import (
    abelian_oracle,
    cocycle_census,
    enumerate_quasiactions,
    instance_rng,
    solve_cocycles,
    to_shape,
)
from .cochains import (
    Cochain,
    Quasiaction,
    all_tables,
    chain_map_defect,
    exactness_check,
    explicit_boundary,
    parity_boundary,
)
from .extensions import (
    associator_table,
    build_quasi_extension,
    canonical_roundtrip,
    classify_splittings,
    find_normal_subgroup,
    mc_triple,
    three_cocycle_check,
)
from .groups import automorphism_group, builtin, quotient
from .integrability import dds_battery, is_integrable

SMALL = ["trivial", "cyclic:2", "cyclic:3", "cyclic:4", "klein"]
MAX_WITNESSES = 20
EXHAUSTIVE_TABLES = 256


class UnknownSuite(KeyError):
    pass


@dataclass
class SuiteConfig:
    G: str | None = None
    N: str | None = None
    p: int | None = None
    seed: int = 0
    samples: int | None = None
    exhaustive: bool = False
    shards: int = 1
    budget: int | None = None


def _pairs(cfg: SuiteConfig, default):
    if cfg.G or cfg.N:
        return [(cfg.G or "cyclic:2", cfg.N or "cyclic:2")]
    return default


def _fibers(pairs):
    out = []
    for g, n in pairs:
        G, N = builtin(g), builtin(n)
        aut = automorphism_group(N)
        for L in enumerate_quasiactions(G, N, aut):
            out.append({"G": g, "N": n, "L": L.indices(aut)})
    return out


def _L(inst) -> Quasiaction:
    G, N = builtin(inst["G"]), builtin(inst["N"])
    return Quasiaction.from_indices(G, automorphism_group(N), inst["L"])


def _cocycles(inst, p: int, cfg: SuiteConfig):
    L = _L(inst)
    if "cochain" in inst:
        return [Cochain(p, L, np.asarray(inst["cochain"], dtype=np.intp))]
    Z, _ = solve_cocycles(L.G, L.N, L, p, None, cfg.budget)
    return [Cochain(p, L, to_shape(row, L.G, p)) for row in Z]


def _fail(inst, c: Cochain | None = None, **extra) -> dict:
    w = dict(inst)
    if c is not None:
        w["cochain"] = np.asarray(c.table).tolist()
    w.update(extra)
    return w


# suites -----------------------------------------------------------------------

def _boundary_instances(cfg):
    pairs = _pairs(cfg, [(g, n) for g in SMALL for n in SMALL])
    ps = [cfg.p] if cfg.p is not None else [0, 1, 2, 3]
    return [dict(f, p=p) for f in _fibers(pairs) for p in ps]


def _boundary_check(inst, cfg):
    L, p = _L(inst), inst["p"]
    G, N = L.G, L.N
    cells = (G.order - 1) ** p if p else 1
    if "cochain" in inst:
        tables = [np.asarray(inst["cochain"], dtype=np.intp)]
    elif N.order ** cells <= EXHAUSTIVE_TABLES:
        tables = all_tables(G, range(N.order), p)
    else:
        # every tuple of each table is compared; tables beyond the cap are sampled
        rng = instance_rng(cfg.seed, json.dumps(inst, sort_keys=True))
        tables = [np.zeros((G.order,) * p, dtype=np.intp)]
        for _ in range(cfg.samples or 8):
            t = rng.integers(0, N.order, size=(G.order,) * p)
            for axis in range(p):
                idx = [slice(None)] * p
                idx[axis] = 0
                t[tuple(idx)] = 0
            tables.append(t.astype(np.intp))
    checks, fails = 0, []
    for t in tables:
        c = Cochain(p, L, t)
        for sign in "+-":
            checks += 1
            a, b = parity_boundary(c, sign), explicit_boundary(c, sign)
            if not np.array_equal(a, b):
                fails.append(_fail(inst, c, sign=sign))
    return checks, fails, {}


def _ext_instances(cfg):
    return _fibers(_pairs(cfg, [(g, n) for g in SMALL for n in SMALL]))


def _ext_check(inst, cfg):
    checks, fails = 0, []
    for f in _cocycles(inst, 2, cfg):
        checks += 1
        r = canonical_roundtrip(f, "holonomy")
        if not r["exact"]:
            fails.append(_fail(inst, f, report=r))
    return checks, fails, {"cocycles": checks}


def _dds_instances(cfg):
    return _fibers(_pairs(cfg, [("cyclic:2", "sym:3"), ("cyclic:2", "cyclic:3"), ("cyclic:3", "cyclic:3")]))


def _dds_check(inst, cfg):
    L = _L(inst)
    aut = automorphism_group(L.N)
    if "cochain" in inst:
        tables = [np.asarray(inst["cochain"], dtype=np.intp)]
    else:
        tables = all_tables(L.G, range(L.N.order), 1)
    checks, agree, fails = 0, 0, []
    for t in tables:
        s = Cochain(1, L, t)
        r = dds_battery(s, aut)
        checks += 1
        if r["agree"]:
            agree += 1
        else:
            fails.append(_fail(inst, s, conditions=r["conditions"]))
    return checks, fails, {"agreements": agree}


def _mc_instances(cfg):
    return _fibers(_pairs(cfg, [(g, n) for g in SMALL for n in SMALL]
                          + [("cyclic:2", "sym:3"), ("cyclic:2", "quat:8")]))


def _mc_check(inst, cfg):
    checks, fails, absolute = 0, [], 0
    for f in _cocycles(inst, 2, cfg):
        checks += 1
        r = mc_triple(f)
        ok = r["agree"] and all(r["conditions"])
        if is_integrable(f, absolute=True):
            absolute += 1
            ok = ok and bool(np.all(associator_table(build_quasi_extension(f, "full")) == 0))
        if not ok:
            fails.append(_fail(inst, f, conditions=r["conditions"]))
    return checks, fails, {"absolute_integrable": absolute}


def _pentagon_instances(cfg):
    pairs = _pairs(cfg, [("cyclic:2", "sym:3"), ("cyclic:3", "cyclic:3"), ("cyclic:2", "quat:8"),
                         ("cyclic:2", "cyclic:4"), ("klein", "cyclic:2")])
    return [dict(f, fiber=fib) for f in _fibers(pairs) for fib in ("holonomy", "full")]


def _pentagon_check(inst, cfg):
    L = _L(inst)
    G, N = L.G, L.N
    key = json.dumps({k: inst[k] for k in ("G", "N", "L")}, sort_keys=True)
    if "cochain" in inst:
        t = np.asarray(inst["cochain"], dtype=np.intp)
    else:
        rng = instance_rng(cfg.seed, key)
        t = rng.integers(0, N.order, size=(G.order, G.order))
        t[0, :] = 0
        t[:, 0] = 0
    f = Cochain(2, L, t.astype(np.intp))
    E = build_quasi_extension(f, inst["fiber"])
    samples = None if cfg.exhaustive and E.order ** 4 <= 10**6 else max(cfg.samples or 10_000, 10_000)
    rng = instance_rng(cfg.seed, key + inst["fiber"] + ":quads")
    r = cat.er_pentagon(E, rng, samples)
    t3 = three_cocycle_check(f, inst["fiber"], instance_rng(cfg.seed, key + ":alpha"))
    fails = []
    if not (r["pass"] and t3["pentagon_holds"]):
        fails.append(_fail(inst, f, er=r["witness"], alpha=t3["pentagon_witness"]))
    return r["quadruples"], fails, {"quadruples": r["quadruples"]}


def _groups_instances(cfg):
    if cfg.G:
        return [{"G": cfg.G}]
    return [{"G": g} for g in ["cyclic:2", "cyclic:3", "cyclic:4", "klein", "sym:3"]]


def _untwist_check(inst, cfg):
    r = cat.untwist_check(builtin(inst["G"]))
    return r["morphisms"], ([] if r["pass"] else [_fail(inst, report=r)]), {}


def _functoriality_check(inst, cfg):
    G = builtin(inst["G"])
    F = cat.build_fiber_F(G)
    parts = {
        "interchange": cat.tensor_functoriality(F),
        "interchange_untwisted": cat.tensor_functoriality(cat.build_fiber_F(G, False)),
        "interchange_base": cat.tensor_functoriality(cat.build_base_B(G)),
        "vectors": cat.vectors_and_preservation(F),
        "categ": cat.categ_comparison(G),
    }
    assoc = cat.composition_associative(F)
    checks = sum(r.get("pairs_checked", r.get("checked", 1)) for r in parts.values())
    bad = {k: r for k, r in parts.items() if not r["pass"]}
    fails = [] if not bad and assoc else [_fail(inst, failed=sorted(bad), associative=assoc)]
    return checks, fails, {}


def _categ_instances(cfg):
    return [{"G": g} for g in ([cfg.G] if cfg.G else SMALL + ["sym:3", "dihedral:4", "quat:8"])]


def _categ_check(inst, cfg):
    r = cat.categ_comparison(builtin(inst["G"]))
    return 1, ([] if r["pass"] else [_fail(inst, report=r)]), {}


def _chainmap_instances(cfg):
    pairs = _pairs(cfg, [("cyclic:2", "sym:3")])
    ps = [cfg.p] if cfg.p is not None else [0, 1, 2]
    return [dict(f, p=p) for f in _fibers(pairs) for p in ps]


def _chainmap_check(inst, cfg):
    L, p = _L(inst), inst["p"]
    aut = automorphism_group(L.N)
    tables = ([np.asarray(inst["cochain"], dtype=np.intp)] if "cochain" in inst
              else all_tables(L.G, range(L.N.order), p))
    checks, fails = 0, []
    for t in tables:
        c = Cochain(p, L, t)
        checks += 1
        d = chain_map_defect(c, aut)
        if d is not None:
            fails.append(_fail(inst, c, defect=[d[0], list(d[1])]))
    return checks, fails, {}


def _exactness_instances(cfg):
    pairs = _pairs(cfg, [("cyclic:2", "sym:3"), ("cyclic:2", "quat:8")])
    ps = [cfg.p] if cfg.p is not None else [0, 1, 2]
    return [{"G": g, "N": n, "p": p} for g, n in pairs for p in ps]


def _exactness_check(inst, cfg):
    r = exactness_check(builtin(inst["G"]), builtin(inst["N"]), inst["p"])
    return 1, ([] if r["exact"] else [_fail(inst, report=r)]), {}


def _split_instances(cfg):
    if cfg.G and cfg.N:
        return [{"E": cfg.G, "N": cfg.N}]
    return [{"E": "sym:3", "N": "cyclic:3", "expect": [3, 1, 1]},
            {"E": "klein", "N": "cyclic:2", "expect": [2, 2, 2]},
            {"E": "dihedral:4", "N": "cyclic:4"},
            {"E": "cyclic:2", "N": "cyclic:2", "expect": [1, 1, 1]}]


def _split_check(inst, cfg):
    E = builtin(inst["E"])
    N = find_normal_subgroup(E, builtin(inst["N"]))
    r = classify_splittings(E, N)
    got = [r["splittings"], r["classes"], r["H1"]]
    ok = r["match"] and ("expect" not in inst or got == inst["expect"])
    return 1, ([] if ok else [_fail(inst, got=got)]), {"counts": got}


def _oracle_instances(cfg):
    pairs = _pairs(cfg, [("cyclic:2", "cyclic:2"), ("cyclic:3", "cyclic:3"), ("cyclic:2", "cyclic:4")])
    ps = [cfg.p] if cfg.p is not None else [1, 2]
    out = []
    for g, n in pairs:
        G, N = builtin(g), builtin(n)
        aut = automorphism_group(N)
        for L in enumerate_quasiactions(G, N, aut):
            if L.is_action():
                out += [{"G": g, "N": n, "L": L.indices(aut), "p": p} for p in ps]
    return out


def _oracle_check(inst, cfg):
    L, p = _L(inst), inst["p"]
    rep = cocycle_census(L.G, L.N, p, L, budget=cfg.budget)
    fr = rep.fibers[0]
    o = abelian_oracle(L.G, L.N, L, p, cfg.budget)
    got = {"Z": fr.cocycles, "H": fr.classes, "oracle_Z": o["Z"], "oracle_H": o["H"]}
    ok = o["divides"] and fr.classes == o["H"]
    return 1, ([] if ok else [_fail(inst, counts=got)]), {"counts": got}


def _monstr_instances(cfg):
    out = [{"kind": "sections", "E": e, "N": n} for e, n in
           [("sym:3", "cyclic:3"), ("klein", "cyclic:2"), ("dihedral:4", "cyclic:4"),
            ("cyclic:6", "cyclic:3"), ("cyclic:6", "cyclic:2"), ("dihedral:4", "klein")]]
    out += [{"kind": "strict", "G": "cyclic:2", "N": n} for n in ("cyclic:3", "cyclic:4")]
    out.append({"kind": "strict", "G": "cyclic:3", "N": "cyclic:3"})
    return out


def _sections(E, N):
    Q, proj = quotient(E, N)
    fibers = [np.flatnonzero(proj == q) for q in range(Q.order)]
    return [np.array((0,) + t) for t in itertools.product(*fibers[1:])]


def _monstr_check(inst, cfg):
    fails, checks = [], 0
    if inst["kind"] == "sections":
        E = builtin(inst["E"])
        N = find_normal_subgroup(E, builtin(inst["N"]))
        secs = _sections(E, N)
        for s, t in itertools.product(secs, repeat=2):
            checks += 1
            r = cat.monoidal_morphism_check(E, N, s, t)
            if not r["pass"]:
                fails.append(_fail(inst, s=s.tolist(), s_prime=t.tolist(), report=r))
        return checks, fails, {"section_pairs": checks}
    G, N = builtin(inst["G"]), builtin(inst["N"])
    strict = 0
    for tail in itertools.product(range(N.order), repeat=G.order - 1):
        s = (0,) + tail
        checks += 1
        _, r = cat.functor_of_function(G, N, s)
        strict += r["strict"]
        if not r["pass"]:
            fails.append(_fail(inst, s=list(s), report=r))
    return checks, fails, {"functions": checks, "strict": strict}


SUITES = {
    "boundary": (_boundary_instances, _boundary_check),
    "ext": (_ext_instances, _ext_check),
    "dds": (_dds_instances, _dds_check),
    "mc-equivalence": (_mc_instances, _mc_check),
    "pentagon": (_pentagon_instances, _pentagon_check),
    "untwist": (_groups_instances, _untwist_check),
    "functoriality": (_groups_instances, _functoriality_check),
    "categ": (_categ_instances, _categ_check),
    "chainmap": (_chainmap_instances, _chainmap_check),
    "exactness": (_exactness_instances, _exactness_check),
    "split": (_split_instances, _split_check),
    "oracle": (_oracle_instances, _oracle_check),
    "monstr": (_monstr_instances, _monstr_check),
}


def _map(fn, items, shards: int):
    if shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_suite(name: str, cfg: SuiteConfig | None = None) -> dict:
    cfg = cfg or SuiteConfig()
    if name not in SUITES:
        raise UnknownSuite(name)
    make, check = SUITES[name]
    instances = make(cfg)
    results = _map(lambda inst: check(inst, cfg), instances, cfg.shards)
    checks = sum(r[0] for r in results)
    fails = [w for r in results for w in r[1]]
    details = [dict(inst, **r[2]) for inst, r in zip(instances, results) if r[2]]
    for w in fails:
        w["suite"] = name
    return {"suite": name, "instances": len(instances), "checks": checks,
            "failures": len(fails), "pass": not fails,
            "witnesses": fails[:MAX_WITNESSES], "details": details}


def run_suites(names, cfg: SuiteConfig | None = None) -> dict:
    cfg = cfg or SuiteConfig()
    if isinstance(names, str):
        names = list(SUITES) if names == "all" else [names]
    reports = [run_suite(n, cfg) for n in names]
    return {"seed": cfg.seed, "samples": cfg.samples, "exhaustive": cfg.exhaustive,
            "suites": reports, "pass": all(r["pass"] for r in reports)}


def replay(witness: dict, cfg: SuiteConfig | None = None) -> dict:
    """Re-run the check on a single witness instance."""
    cfg = cfg or SuiteConfig()
    name = witness.get("suite")
    if name not in SUITES:
        raise UnknownSuite(str(name))
    inst = {k: v for k, v in witness.items() if k != "suite"}
    checks, fails, _ = SUITES[name][1](inst, cfg)
    return {"suite": name, "checks": checks, "reproduced": bool(fails), "witnesses": fails}


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, tuple)):
        return sorted(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"
