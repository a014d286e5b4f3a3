"""parityc command-line driver.

Exit codes: 0 ok, 1 a verification failed, 2 enumeration budget exceeded,
3 requested full-fiber extension is not associative, 4 no splitting exists,
64 usage error, 65 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import suites
from .census import BudgetExceeded, cocycle_census, default_budget
from .cochains import CochainError, Quasiaction, cochain_from_json, cocycle_witness, is_cocycle
from .extensions import (
    ExtensionError,
    NoSplittingFound,
    NotIntegrable,
    build_quasi_extension,
    canonical_roundtrip,
    classify_splittings,
    find_normal_subgroup,
    iso_profile,
    semidirect_product,
    three_cocycle_check,
)
from .groups import GroupError, OrderBoundExceeded, automorphism_group, resolve_group
from .integrability import holonomy_group, is_integrable, mc_witness

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_NONASSOC, EXIT_NOSPLIT = 0, 1, 2, 3, 4
EXIT_USAGE, EXIT_INPUT = 64, 65


class UsageError(Exception):
    pass


class BadInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _group(ref):
    try:
        return resolve_group(ref)
    except (KeyError, ValueError, GroupError, OSError, json.JSONDecodeError) as exc:
        raise BadInput(f"group {ref!r}: {exc}") from None


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInput(f"{path}: {exc}") from None


def _cochain(path):
    try:
        return cochain_from_json(_load_json(path))
    except (CochainError, GroupError, KeyError, ValueError, TypeError) as exc:
        raise BadInput(f"{path}: {exc}") from None


def _emit(args, payload, tsv: str | None = None):
    if getattr(args, "format", "json") == "tsv" and tsv is not None:
        text = tsv
    else:
        text = suites.dumps(payload)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tsv(rows) -> str:
    return "\n".join("\t".join(str(x) for x in r) for r in rows) + "\n"


# commands ---------------------------------------------------------------------

def cmd_validate(args) -> int:
    if args.cochain:
        c = _cochain(args.cochain)
        w = cocycle_witness(c)
        out = {"valid": True, "p": c.p, "G": c.G.name, "N": c.N.name, "is_action": c.L.is_action(),
               "cocycle": w is None}
        if w is not None:
            out["cocycle_witness"] = [int(x) for x in w] if np.ndim(w) else w
        _emit(args, out)
        return EXIT_OK
    if not args.group:
        raise UsageError("validate needs --group or --cochain")
    try:
        G = resolve_group(args.group)
    except GroupError as exc:
        _emit(args, {"valid": False, "error": type(exc).__name__, "message": str(exc),
                     "witness": exc.witness})
        return EXIT_INPUT
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        raise BadInput(str(exc)) from None
    prof = G.order_profile()
    out = {"valid": True, "name": G.name, "order": G.order, "abelian": G.is_abelian,
           "order_profile": {str(k): prof[k] for k in sorted(prof)}}
    _emit(args, out, _tsv([["name", "order", "abelian"], [G.name, G.order, G.is_abelian]]))
    return EXIT_OK


def cmd_aut(args) -> int:
    G = _group(args.group)
    try:
        A = automorphism_group(G, args.bound) if args.bound else automorphism_group(G)
    except OrderBoundExceeded as exc:
        raise BadInput(str(exc)) from None
    out = {"group": G.name, "order": G.order, "aut_order": A.order, "inner_order": A.inner.order,
           "outer_order": len(A.outer_cosets)}
    if args.list:
        out["automorphisms"] = A.images.tolist()
    _emit(args, out, _tsv([["group", "aut", "inner", "outer"],
                           [G.name, A.order, A.inner.order, len(A.outer_cosets)]]))
    return EXIT_OK


def _scope(value):
    if value in ("trivial", "all", "actions"):
        return value
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        raise UsageError(f"--L must be trivial, all, actions, a position or an index list, got {value!r}") from None
    if isinstance(parsed, (int, list)):
        return parsed
    raise UsageError(f"bad --L value {value!r}")


def cmd_census(args) -> int:
    G, N = _group(args.G), _group(args.N)
    rep = cocycle_census(G, N, args.p, _scope(args.L), budget=args.budget, shards=args.shards)
    _emit(args, rep.to_json(), rep.to_tsv())
    return EXIT_OK


def cmd_extend(args) -> int:
    f = _cochain(args.cochain)
    if f.p != 2:
        raise BadInput("extend takes a 2-cochain")
    try:
        E = build_quasi_extension(f, args.fiber)
    except ExtensionError as exc:
        raise BadInput(str(exc)) from None
    H = holonomy_group(f).subgroup
    out = {"G": f.G.name, "N": f.N.name, "fiber_mode": args.fiber, "fiber": list(E.fiber.members),
           "holonomy": list(H.members), "order": E.order, "cocycle": is_cocycle(f),
           "integrable": is_integrable(f), "absolute_integrable": is_integrable(f, absolute=True),
           "associative": E.associative}
    w = mc_witness(f, f.L, E.fiber.members)
    out["mc_witness"] = list(w) if w else None
    t3 = three_cocycle_check(f, args.fiber)
    out["alpha"] = {k: t3[k] for k in ("alpha_trivial", "alpha_central", "factors",
                                       "pentagon_holds", "delta_alpha_trivial")}
    if E.associative:
        out["iso_profile"] = iso_profile(E.as_group())
    else:
        out["associativity_witness"] = [list(E.pair(e)) for e in E.associativity_witness]
    try:
        out["roundtrip"] = canonical_roundtrip(f, args.fiber)
    except NotIntegrable as exc:
        out["roundtrip"] = {"exact": False, "reason": str(exc)}
    if args.extension_out:
        with open(args.extension_out, "w") as fh:
            fh.write(suites.dumps(E.to_json()))
    _emit(args, out)
    if args.fiber == "full" and not E.associative:
        return EXIT_NONASSOC
    return EXIT_OK


def cmd_split(args) -> int:
    if args.E:
        if not args.N:
            raise UsageError("split --E needs --N")
        E = _group(args.E)
        try:
            N = find_normal_subgroup(E, _group(args.N))
        except ExtensionError as exc:
            raise BadInput(str(exc)) from None
    else:
        if not (args.G and args.N):
            raise UsageError("split needs --E/--N or --G/--N/--L")
        G, NN = _group(args.G), _group(args.N)
        L_raw = _scope(args.L)
        aut = automorphism_group(NN)
        if L_raw == "trivial":
            L = Quasiaction.trivial(G, NN)
        elif isinstance(L_raw, list):
            L = Quasiaction.from_indices(G, aut, L_raw)
        else:
            raise UsageError("split takes --L trivial or an automorphism index list")
        if not L.is_action():
            raise BadInput("split over (G, N, L) needs L to be an action")
        E = semidirect_product(L)
        N = find_normal_subgroup(E, [e for e in range(E.order) if e % G.order == 0])
    try:
        r = classify_splittings(E, N)
    except NoSplittingFound as exc:
        _emit(args, {"E": E.name, "splittings": 0, "message": str(exc)})
        return EXIT_NOSPLIT
    _emit(args, r, _tsv([["splittings", "classes", "H1", "match"],
                         [r["splittings"], r["classes"], r["H1"], r["match"]]]))
    return EXIT_OK if r["match"] else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.exhaustive and args.samples:
        raise UsageError("--exhaustive and --samples are mutually exclusive")
    cfg = suites.SuiteConfig(G=args.G, N=args.N, p=args.p, seed=args.seed, samples=args.samples,
                             exhaustive=args.exhaustive, shards=args.shards, budget=args.budget)
    if args.replay:
        data = _load_json(args.replay)
        witnesses = _collect_witnesses(data)
        if not witnesses:
            raise BadInput(f"{args.replay} holds no witnesses")
        try:
            results = [suites.replay(w, cfg) for w in witnesses]
        except suites.UnknownSuite as exc:
            raise BadInput(f"unknown suite in witness: {exc}") from None
        out = {"replayed": len(results), "reproduced": sum(r["reproduced"] for r in results),
               "results": results}
        _emit(args, out)
        return EXIT_FAIL if out["reproduced"] else EXIT_OK
    if not args.suite:
        raise UsageError("verify needs --suite or --replay")
    if args.suite != "all" and args.suite not in suites.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: all, {', '.join(suites.SUITES)}")
    rep = suites.run_suites(args.suite, cfg)
    rows = [["suite", "instances", "checks", "failures", "pass"]]
    rows += [[r["suite"], r["instances"], r["checks"], r["failures"], r["pass"]] for r in rep["suites"]]
    _emit(args, rep, _tsv(rows))
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def _collect_witnesses(data):
    if isinstance(data, list):
        return [w for x in data for w in _collect_witnesses(x)]
    if not isinstance(data, dict):
        return []
    if "suites" in data:
        return [w for r in data["suites"] for w in r.get("witnesses", [])]
    if "witnesses" in data:
        return list(data["witnesses"])
    if "suite" in data:
        return [data]
    return []


def cmd_report(args) -> int:
    data = _load_json(args.report)
    if not isinstance(data, dict) or "suites" not in data:
        raise BadInput(f"{args.report} is not a verify report")
    rows = [["suite", "instances", "checks", "failures", "pass"]]
    for r in data["suites"]:
        rows.append([r["suite"], r["instances"], r["checks"], r["failures"], r["pass"]])
    summary = {"pass": bool(data.get("pass")), "seed": data.get("seed"),
               "suites": [dict(zip(rows[0], row)) for row in rows[1:]]}
    _emit(args, summary, _tsv(rows))
    return EXIT_OK if summary["pass"] else EXIT_FAIL


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="parityc", description="Non-abelian low-degree group cohomology toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=["json", "tsv"], default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")

    sp = sub.add_parser("validate", help="check a group table or a cochain file")
    sp.add_argument("--group")
    sp.add_argument("--cochain")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("aut", help="automorphism group summary")
    sp.add_argument("--group", required=True)
    sp.add_argument("--bound", type=int)
    sp.add_argument("--list", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_aut)

    sp = sub.add_parser("census", help="cocycles and classes per quasiaction")
    sp.add_argument("--G", required=True)
    sp.add_argument("--N", required=True)
    sp.add_argument("--p", type=int, required=True, choices=[0, 1, 2, 3])
    sp.add_argument("--L", default="trivial")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--shards", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("extend", help="build the quasi-extension of a 2-cochain")
    sp.add_argument("--cochain", required=True)
    sp.add_argument("--fiber", choices=["holonomy", "full"], default="holonomy")
    sp.add_argument("--extension-out")
    common(sp)
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("split", help="classify splittings up to N-conjugacy")
    sp.add_argument("--E")
    sp.add_argument("--G")
    sp.add_argument("--N")
    sp.add_argument("--L", default="trivial")
    common(sp)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite")
    sp.add_argument("--replay", help="report or witness file to re-run")
    sp.add_argument("--G")
    sp.add_argument("--N")
    sp.add_argument("--p", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--shards", type=int, default=1)
    sp.add_argument("--budget", type=int)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("report", help="summarize a saved verify report")
    sp.add_argument("report")
    common(sp)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if getattr(args, "shards", 1) < 1:
        print("parityc: --shards must be positive", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "budget", None) is None and hasattr(args, "budget"):
        args.budget = default_budget()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"parityc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BadInput as exc:
        print(f"parityc: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"parityc: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
