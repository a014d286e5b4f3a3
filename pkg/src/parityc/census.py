"""Exhaustive cocycle censuses and the additive oracle.

Cocycles are found by a frontier search: the non-identity argument tuples
("cells") are filled in lexicographic order, and every (p+1)-tuple
constraint is checked on the whole frontier as soon as the last cell it
reads has been assigned.  Tuples with an identity argument need no check
for normalized cochains.

Tables are encoded as integers in base |N| over the cells, first cell most
significant, so the smallest code is the lexicographically smallest table.
"""
from __future__ import annotations

import itertools
import json
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cochains import Cochain, Quasiaction, parity_boundary, nonidentity_tuples
from .groups import (
    AutomorphismGroup,
    FiniteGroup,
    automorphism_group,
    generated_subgroup,
)
from .integrability import orbit_closure

SCHEMA = 1
DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, needed: int, budget: int):
        super().__init__(f"enumeration needs up to {needed} candidate tables, budget is {budget}")
        self.needed = needed
        self.budget = budget


class NotAbelian(ValueError):
    pass


class NotAnAction(ValueError):
    pass


def default_budget() -> int:
    raw = os.environ.get("PARITYC_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


# quasiactions -----------------------------------------------------------------

def enumerate_quasiactions(G: FiniteGroup, N: FiniteGroup,
                           aut: AutomorphismGroup | None = None) -> list[Quasiaction]:
    """All normalized G -> Aut(N), in lexicographic order of automorphism indices."""
    aut = aut or automorphism_group(N)
    out = []
    for idx in itertools.product(range(aut.order), repeat=G.order - 1):
        out.append(Quasiaction.from_indices(G, aut, (0,) + idx))
    return out


def quasiaction_label(L: Quasiaction, aut: AutomorphismGroup) -> list[int]:
    return L.indices(aut)


def resolve_scope(G, N, scope, aut=None) -> list[tuple[int, Quasiaction]]:
    """(position in the quasiaction enumeration, L) pairs selected by ``scope``.

    ``scope`` is "trivial", "all", "actions", an integer position, a list of
    automorphism indices, or a Quasiaction.
    """
    aut = aut or automorphism_group(N)
    if isinstance(scope, Quasiaction):
        return [(_position(scope.indices(aut), aut.order), scope)]
    if scope in (None, "trivial"):
        return [(0, Quasiaction.trivial(G, N))]
    if isinstance(scope, int):
        idx = _unrank(scope, aut.order, G.order - 1)
        return [(scope, Quasiaction.from_indices(G, aut, (0,) + idx))]
    if isinstance(scope, (list, tuple)):
        idx = [int(x) for x in scope]
        return [(_position(idx, aut.order), Quasiaction.from_indices(G, aut, idx))]
    qs = enumerate_quasiactions(G, N, aut)
    if scope == "all":
        return list(enumerate(qs))
    if scope == "actions":
        return [(i, L) for i, L in enumerate(qs) if L.is_action()]
    raise ValueError(f"unknown quasiaction scope {scope!r}")


def _position(indices, base: int) -> int:
    pos = 0
    for x in list(indices)[1:]:
        pos = pos * base + int(x)
    return pos


def _unrank(pos: int, base: int, length: int) -> tuple[int, ...]:
    if not 0 <= pos < base ** length:
        raise ValueError(f"quasiaction position {pos} out of range")
    out = []
    for _ in range(length):
        out.append(pos % base)
        pos //= base
    return tuple(reversed(out))


# the frontier solver ----------------------------------------------------------

@dataclass(frozen=True)
class _Plan:
    n: int
    p: int
    cells: tuple[tuple[int, ...], ...]
    flat_cells: np.ndarray
    # per cell position: list of (plus terms, minus terms) where a term is (flat index, L-argument or -1)
    checks: tuple[tuple, ...]


@lru_cache(maxsize=128)
def _plan(G: FiniteGroup, p: int) -> _Plan:
    n = G.order
    m = G.table
    cells = [()] if p == 0 else nonidentity_tuples(n, p)
    shape = (n,) * p
    flat = {c: (int(np.ravel_multi_index(c, shape)) if p else 0) for c in cells}
    position = {c: k for k, c in enumerate(cells)}

    def term(args, apply_L):
        return flat_index(args), apply_L

    def flat_index(args):
        return int(np.ravel_multi_index(args, shape)) if p else 0

    checks = [[] for _ in cells]
    for args in nonidentity_tuples(n, p + 1):
        faces = []
        for i in range(p + 2):
            if i == 0:
                faces.append((args[1:], args[0]))
            elif i == p + 1:
                faces.append((args[:p], -1))
            else:
                merged = args[: i - 1] + (int(m[args[i - 1], args[i]]),) + args[i + 1:]
                faces.append((merged, -1))
        plus = [faces[i] for i in range(0, p + 2, 2)]
        minus = [faces[i] for i in range(p + 1 if (p + 1) % 2 else p, 0, -2)]
        deps = [position[t] for t, _ in plus + minus if t in position]
        if not deps:
            continue
        entry = (tuple((flat_index(t), l) for t, l in plus),
                 tuple((flat_index(t), l) for t, l in minus))
        checks[max(deps)].append(entry)
    return _Plan(n, p, tuple(cells), np.array([flat[c] for c in cells], dtype=np.intp),
                 tuple(tuple(c) for c in checks))


def _eval_terms(F, terms, L, mul):
    out = None
    for idx, a in terms:
        v = F[:, idx]
        if a >= 0:
            v = L[a, v]
        out = v if out is None else mul[out, v]
    return out


def solve_cocycles(G: FiniteGroup, N: FiniteGroup, L: Quasiaction, p: int,
                   first_values=None, budget: int | None = None) -> tuple[np.ndarray, int]:
    """All normalized p-cocycles for (G, N, L), as flat tables sorted by code.

    ``first_values`` restricts the first cell (used for sharding).  Returns
    the tables and the number of candidate tables generated.
    """
    budget = default_budget() if budget is None else budget
    plan = _plan(G, p)
    size = G.order ** p
    k = N.order
    ncells = len(plan.cells)
    brute = k ** ncells
    Lv, mul = L.values, N.table
    F = np.zeros((1, max(size, 1)), dtype=np.intp)
    generated = 0
    for pos in range(ncells):
        vals = np.arange(k) if pos or first_values is None else np.asarray(sorted(first_values), dtype=np.intp)
        generated += len(F) * len(vals)
        if generated > budget:
            raise BudgetExceeded(brute, budget)
        F = np.repeat(F, len(vals), axis=0)
        F[:, plan.flat_cells[pos]] = np.tile(vals, len(F) // len(vals))
        for plus, minus in plan.checks[pos]:
            keep = _eval_terms(F, plus, Lv, mul) == _eval_terms(F, minus, Lv, mul)
            F = F[keep]
            if not len(F):
                break
        if not len(F):
            break
    if p == 0:
        F = F.reshape(len(F), 1)[:, :1]
    order = np.argsort(encode(F, plan, k), kind="stable")
    return F[order], generated


def encode(F: np.ndarray, plan: _Plan, k: int) -> np.ndarray:
    codes = np.zeros(len(F), dtype=np.int64)
    for idx in plan.flat_cells:
        codes = codes * k + F[:, idx]
    return codes


def to_shape(flat: np.ndarray, G: FiniteGroup, p: int) -> np.ndarray:
    return flat.reshape((G.order,) * p) if p else flat.reshape(())[()]


# classes ----------------------------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n)

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as root so roots are minimal codes
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def witness_tables(G: FiniteGroup, N: FiniteGroup, q: int, budget: int) -> np.ndarray:
    """All normalized q-cochain tables, flattened (q >= 0)."""
    plan = _plan(G, q)
    count = N.order ** len(plan.cells)
    if count > budget:
        raise BudgetExceeded(count, budget)
    digits = np.array(list(itertools.product(range(N.order), repeat=len(plan.cells))), dtype=np.intp)
    W = np.zeros((count, max(G.order ** q, 1)), dtype=np.intp)
    W[:, plan.flat_cells] = digits.reshape(count, len(plan.cells))
    return W


def cohomology_classes(Z: np.ndarray, G: FiniteGroup, L: Quasiaction, p: int,
                       budget: int | None = None) -> dict:
    """Classes of cocycles under the closure of the cohomologous relation.

    Returns labels (class root per cocycle), the coboundary count and how
    many witness images left the cocycle set.
    """
    budget = default_budget() if budget is None else budget
    nz = len(Z)
    if p == 0 or nz == 0:
        return {"roots": np.arange(nz), "coboundaries": 1 if p == 0 else 0, "escaped": 0}
    N = L.N
    plan = _plan(G, p)
    codes = encode(Z, plan, N.order)
    uf = _UnionFind(nz)
    mul, inv = N.table, N.inverses
    escaped = 0
    zero = np.searchsorted(codes, 0)
    W = witness_tables(G, N, p - 1, budget)
    if len(W) * nz > budget:
        raise BudgetExceeded(len(W) * nz, budget)
    for w in W:
        wc = Cochain(p - 1, L, to_shape(w, G, p - 1))
        plus = parity_boundary(wc, "+").reshape(-1)
        minus_inv = inv[parity_boundary(wc, "-").reshape(-1)]
        img = mul[mul[plus[None, :], Z], minus_inv[None, :]]
        icodes = encode(img, plan, N.order)
        where = np.searchsorted(codes, icodes)
        where = np.minimum(where, nz - 1)
        hit = codes[where] == icodes
        escaped += int((~hit).sum())
        for i in np.flatnonzero(hit):
            uf.union(int(i), int(where[i]))
    roots = np.array([uf.find(i) for i in range(nz)])
    cob = int((roots == roots[zero]).sum()) if zero < nz and codes[zero] == 0 else 0
    return {"roots": roots, "coboundaries": cob, "escaped": escaped}


# holonomy strata --------------------------------------------------------------

def stratify_by_holonomy(Z: np.ndarray, L: Quasiaction) -> dict[tuple[int, ...], int]:
    """Subgroup members -> number of cocycles whose holonomy group it is."""
    cache: dict[frozenset, tuple[int, ...]] = {}
    strata: dict[tuple[int, ...], int] = {}
    for row in Z:
        key = frozenset(int(x) for x in row)
        H = cache.get(key)
        if H is None:
            H = generated_subgroup(L.N, orbit_closure(key, (L,))).members
            cache[key] = H
        strata[H] = strata.get(H, 0) + 1
    return dict(sorted(strata.items(), key=lambda kv: (len(kv[0]), kv[0])))


# reports ----------------------------------------------------------------------

@dataclass
class FiberResult:
    position: int
    indices: list[int]
    is_action: bool
    cochains: int
    cocycles: int
    coboundaries: int | None
    classes: int | None
    escaped: int
    strata: dict
    representatives: list
    generated: int

    def to_json(self, p: int) -> dict:
        out = {
            "L": self.indices,
            "position": self.position,
            "is_action": self.is_action,
            "cochains": self.cochains,
            f"Z{p}": self.cocycles,
        }
        if self.classes is not None:
            out[f"B{p}"] = self.coboundaries
            out[f"H{p}"] = self.classes
            out["escaped_images"] = self.escaped
            out["representatives"] = self.representatives
        if self.strata:
            out["strata"] = [{"subgroup": list(k), "count": v, "irreducible": irr}
                             for k, (v, irr) in self.strata.items()]
        return out


@dataclass
class CensusReport:
    G: FiniteGroup
    N: FiniteGroup
    p: int
    scope: str
    quasiactions: int
    fibers: list[FiberResult] = field(default_factory=list)

    @property
    def cocycles(self) -> int:
        return sum(f.cocycles for f in self.fibers)

    @property
    def classes(self) -> int | None:
        if any(f.classes is None for f in self.fibers):
            return None
        return sum(f.classes for f in self.fibers)

    @property
    def cochains(self) -> int:
        return sum(f.cochains for f in self.fibers)

    def fiber(self, indices) -> FiberResult:
        for f in self.fibers:
            if f.indices == list(indices):
                return f
        raise KeyError(indices)

    def to_json(self) -> dict:
        p = self.p
        out = {
            "schema": SCHEMA,
            "G": self.G.name,
            "N": self.N.name,
            "p": p,
            "L_scope": self.scope,
            "quasiactions": self.quasiactions,
            "fibers_listed": len(self.fibers),
            "cochains": self.cochains,
            f"Z{p}": self.cocycles,
        }
        if self.classes is not None:
            out[f"H{p}"] = self.classes
        out["fibers"] = [f.to_json(p) for f in self.fibers]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    def to_tsv(self) -> str:
        p = self.p
        head = ["position", "L", "is_action", "cochains", f"Z{p}", f"B{p}", f"H{p}"]
        rows = ["\t".join(head)]
        for f in self.fibers:
            rows.append("\t".join(str(x) for x in (
                f.position, ",".join(map(str, f.indices)), int(f.is_action), f.cochains,
                f.cocycles, "" if f.coboundaries is None else f.coboundaries,
                "" if f.classes is None else f.classes)))
        return "\n".join(rows) + "\n"


def _shard_values(k: int, shards: int) -> list[list[int]]:
    shards = max(1, min(shards, k))
    return [list(range(i, k, shards)) for i in range(shards)]


def cocycle_census(G: FiniteGroup, N: FiniteGroup, p: int, scope="trivial",
                   classes: bool = True, strata: bool | None = None,
                   budget: int | None = None, shards: int = 1,
                   aut: AutomorphismGroup | None = None) -> CensusReport:
    """Cocycles, coboundaries, classes and holonomy strata per quasiaction."""
    if not 0 <= p <= 3:
        raise ValueError(f"census degree must be 0..3, got {p}")
    budget = default_budget() if budget is None else budget
    aut = aut or automorphism_group(N)
    selected = resolve_scope(G, N, scope, aut)
    strata = (p == 2) if strata is None else strata
    classes = classes and p <= 2
    ncells = len(_plan(G, p).cells)

    # work items: (fiber, first-cell value subset); shards never change the merged result
    parts = _shard_values(N.order, shards) if shards > 1 else [None]
    items = [(fi, vals) for fi in range(len(selected)) for vals in parts]

    def run(item):
        fi, vals = item
        return solve_cocycles(G, N, selected[fi][1], p, vals, budget)

    if shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(it) for it in items]

    plan = _plan(G, p)
    report = CensusReport(G, N, p, scope if isinstance(scope, str) else "fixed",
                          aut.order ** (G.order - 1))
    total_generated = 0
    for fi, (pos, L) in enumerate(selected):
        chunks = [r for (f, _), r in zip(items, results) if f == fi]
        Z = np.concatenate([c[0] for c in chunks]) if chunks else np.zeros((0, 1), dtype=np.intp)
        Z = Z[np.argsort(encode(Z, plan, N.order), kind="stable")]
        generated = sum(c[1] for c in chunks)
        total_generated += generated
        if total_generated > budget:
            raise BudgetExceeded(N.order ** ncells * len(selected), budget)
        fr = FiberResult(pos, L.indices(aut), L.is_action(), N.order ** ncells, len(Z),
                         None, None, 0, {}, [], generated)
        if classes:
            cl = cohomology_classes(Z, G, L, p, budget)
            roots = cl["roots"]
            uniq = sorted(set(int(r) for r in roots))
            fr.classes = len(uniq)
            fr.coboundaries = cl["coboundaries"]
            fr.escaped = cl["escaped"]
            fr.representatives = [to_shape(Z[r], G, p).tolist() for r in uniq]
        if strata and p >= 1:
            st = stratify_by_holonomy(Z, L)
            fr.strata = {H: (c, len(H) == N.order) for H, c in st.items()}
            assert sum(st.values()) == len(Z)
        report.fibers.append(fr)
    return report


def cocycles_of(G, N, L: Quasiaction, p: int, budget: int | None = None) -> list[Cochain]:
    Z, _ = solve_cocycles(G, N, L, p, None, budget)
    return [Cochain(p, L, to_shape(row, G, p)) for row in Z]


# weak cohomology across fibers -------------------------------------------------

def weak_classes(G: FiniteGroup, N: FiniteGroup, p: int, budget: int | None = None,
                 aut: AutomorphismGroup | None = None) -> dict:
    """Classes of all p-cocycles (every L) under weak cohomology.

    The witness gamma moves (f, L) to (f', C_gamma o L) where
    f' = (d+_{L'} gamma) f (d-_L gamma)^-1.  For p = 1, C_gamma is
    conjugation by the single element gamma.
    """
    if p not in (1, 2):
        raise ValueError("weak classes computed for p in {1, 2}")
    budget = default_budget() if budget is None else budget
    aut = aut or automorphism_group(N)
    qs = enumerate_quasiactions(G, N, aut)
    if len(qs) * N.order ** len(_plan(G, p).cells) > budget:
        raise BudgetExceeded(len(qs) * N.order ** len(_plan(G, p).cells), budget)
    plan = _plan(G, p)
    keyed = {}
    offsets = []
    allZ = []
    for qi, L in enumerate(qs):
        Z, _ = solve_cocycles(G, N, L, p, None, budget)
        offsets.append(len(keyed))
        for j, code in enumerate(encode(Z, plan, N.order)):
            keyed[(qi, int(code))] = len(keyed)
        allZ.append(Z)
    uf = _UnionFind(len(keyed))
    pos = {tuple(L.indices(aut)): i for i, L in enumerate(qs)}
    W = witness_tables(G, N, p - 1, budget)
    mul, inv = N.table, N.inverses
    for qi, L in enumerate(qs):
        Z = allZ[qi]
        if not len(Z):
            continue
        for w in W:
            wt = to_shape(w, G, p - 1)
            if p == 2:
                conj = aut.inner_index[np.asarray(wt)]
            else:
                conj = np.full(G.order, aut.inner_index[int(wt)])
            conj = np.where(np.arange(G.order) == 0, 0, conj)
            new_idx = [int(aut.as_group.table[conj[g], aut.index_of(L.values[g])]) for g in range(G.order)]
            qj = pos[tuple(new_idx)]
            L2 = qs[qj]
            plus = parity_boundary(Cochain(p - 1, L2, wt), "+").reshape(-1)
            minus_inv = inv[parity_boundary(Cochain(p - 1, L, wt), "-").reshape(-1)]
            img = mul[mul[plus[None, :], Z], minus_inv[None, :]]
            for i, code in enumerate(encode(img, plan, N.order)):
                j = keyed.get((qj, int(code)))
                if j is not None:
                    uf.union(offsets[qi] + i, j)
    roots = {uf.find(i) for i in range(len(keyed))}
    return {"cocycles": len(keyed), "classes": len(roots), "quasiactions": len(qs)}


# the additive oracle ----------------------------------------------------------

def abelian_oracle(G: FiniteGroup, N: FiniteGroup, L: Quasiaction, p: int,
                   budget: int | None = None) -> dict:
    """|Z^p|, |B^p|, |H^p| of the classical complex with d = sum (-1)^i d_i.

    Works on unnormalized cochains and writes N additively through its raw
    table; shares no code with the multiplicative census.
    """
    budget = default_budget() if budget is None else budget
    n, k = G.order, N.order
    mul, neg = N.table, N.inverses
    if not np.array_equal(mul, mul.T):
        raise NotAbelian(f"{N.name} is not abelian")
    act = L.values
    if not np.array_equal(act[np.arange(n)[:, None, None], act[None]], act[G.table]):
        raise NotAnAction("oracle requires L to be a homomorphism")

    def cochains(q):
        count = k ** (n ** q)
        if count > budget:
            raise BudgetExceeded(count, budget)
        return np.array(list(itertools.product(range(k), repeat=n ** q)), dtype=np.intp).reshape(count, n ** q)

    def d(C, q):
        # C: (count, n^q) flat tables; returns (count, n^(q+1))
        out = np.zeros((len(C), n ** (q + 1)), dtype=np.intp)
        for col, args in enumerate(itertools.product(range(n), repeat=q + 1)):
            def at(t):
                i = 0
                for x in t:
                    i = i * n + x
                return C[:, i]
            acc = act[args[0], at(args[1:])]
            for i in range(1, q + 1):
                merged = args[: i - 1] + (int(G.table[args[i - 1], args[i]]),) + args[i + 1:]
                term = at(merged)
                acc = mul[acc, term if i % 2 == 0 else neg[term]]
            last = at(args[:q])
            acc = mul[acc, last if (q + 1) % 2 == 0 else neg[last]]
            out[:, col] = acc
        return out

    C = cochains(p)
    Z = C[np.all(d(C, p) == 0, axis=1)]
    if p == 0:
        nb = 1
    else:
        D = d(cochains(p - 1), p - 1)
        nb = len({row.tobytes() for row in D})
    nz = len(Z)
    return {"Z": nz, "B": nb, "H": nz // nb, "divides": nz % nb == 0}


# deterministic sampling -------------------------------------------------------

def instance_rng(seed: int, key: str) -> np.random.Generator:
    """PCG64 stream for one named instance; independent of shard layout."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(key.encode())]))
