"""The standard parity quasicomplex C(G, N) of normalized cochains.

A p-cochain is a pair (f, L): a table ``f`` on G^p with values in N, and a
quasiaction L, i.e. a normalized function G -> Aut(N) which need not be a
homomorphism.  Tables are dense numpy arrays of shape ``(|G|,) * p`` indexed
by element index; a 0-cochain is a 0-d array holding one element of N.

Products over cofaces are taken in the printed order (ascending even faces
for the + boundary, descending odd faces for the - boundary); N need not be
abelian, so the order matters.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import (
    AutomorphismGroup,
    FiniteGroup,
    automorphism_group,
    center,
    conjugation_map,
    group_ref,
    is_automorphism,
    resolve_group,
)

MAX_DEGREE = 3


class CochainError(ValueError):
    pass


class DegreeOutOfRange(CochainError):
    pass


class DegreeMismatch(CochainError):
    pass


class NotNormalized(CochainError):
    pass


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=np.intp)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Quasiaction:
    """Normalized function G -> Aut(N); ``values[g]`` is the image array of L_g."""

    G: FiniteGroup
    N: FiniteGroup
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.G.order, self.N.order):
            raise CochainError(f"quasiaction table has shape {v.shape}")
        if not np.array_equal(v[0], np.arange(self.N.order)):
            raise NotNormalized("L(1) must be the identity automorphism")
        for g in range(self.G.order):
            if not is_automorphism(self.N, v[g]):
                raise CochainError(f"L({g}) is not an automorphism of {self.N.name}")
        object.__setattr__(self, "values", _readonly(v))

    def __call__(self, g, n):
        return self.values[g, n]

    @classmethod
    def trivial(cls, G: FiniteGroup, N: FiniteGroup) -> "Quasiaction":
        return cls(G, N, np.tile(np.arange(N.order), (G.order, 1)))

    @classmethod
    def from_indices(cls, G: FiniteGroup, aut: AutomorphismGroup, indices) -> "Quasiaction":
        """L_g = automorphism number indices[g] of ``aut``."""
        return cls(G, aut.base, aut.images[np.asarray(indices, dtype=np.intp)])

    @classmethod
    def conjugation_by(cls, G: FiniteGroup, N: FiniteGroup, s) -> "Quasiaction":
        """C_s: g -> conjugation by s(g), for a normalized function s: G -> N."""
        s = np.asarray(s)
        return cls(G, N, np.stack([conjugation_map(N, int(s[g])).images for g in range(G.order)]))

    def is_action(self) -> bool:
        v = self.values
        # L_a(L_b(n)) == L_ab(n)
        lhs = v[np.arange(self.G.order)[:, None, None], v[None, :, :]]
        rhs = v[self.G.table]
        return bool(np.array_equal(lhs, rhs))

    def key(self) -> bytes:
        return self.values.astype(np.int16).tobytes()

    def indices(self, aut: AutomorphismGroup) -> list[int]:
        return [aut.index_of(self.values[g]) for g in range(self.G.order)]

    def induced(self, aut: AutomorphismGroup) -> "Quasiaction":
        """The quasiaction C_L of G on Aut(N): conjugation by L_g."""
        A = aut.as_group
        return Quasiaction(G=self.G, N=A, values=np.stack(
            [conjugation_map(A, i).images for i in self.indices(aut)]))


@dataclass(frozen=True, eq=False)
class Cochain:
    p: int
    L: Quasiaction
    table: np.ndarray

    def __post_init__(self):
        if not 0 <= self.p <= MAX_DEGREE:
            raise DegreeOutOfRange(f"degree {self.p} outside 0..{MAX_DEGREE}")
        t = np.asarray(self.table, dtype=np.intp)
        n = self.G.order
        if t.shape != (n,) * self.p:
            raise DegreeMismatch(f"degree {self.p} table over |G|={n} has shape {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= self.N.order):
            raise CochainError("cochain value outside N")
        for axis in range(self.p):
            if np.any(np.take(t, 0, axis=axis) != 0):
                raise NotNormalized(f"f is not 1 when argument {axis + 1} is the identity")
        object.__setattr__(self, "table", _readonly(t))

    @property
    def G(self) -> FiniteGroup:
        return self.L.G

    @property
    def N(self) -> FiniteGroup:
        return self.L.N

    def __call__(self, *args):
        return int(self.table[args]) if args else int(self.table)

    def __repr__(self) -> str:
        return f"Cochain(p={self.p}, G={self.G.name}, N={self.N.name}, f={self.table.tolist()})"

    def key(self) -> bytes:
        return self.table.astype(np.int16).tobytes()

    def with_table(self, table) -> "Cochain":
        return Cochain(self.p, self.L, table)


def identity_cochain(p: int, L: Quasiaction) -> Cochain:
    return Cochain(p, L, np.zeros((L.G.order,) * p, dtype=np.intp))


@lru_cache(maxsize=64)
def _grid(n: int, k: int) -> tuple[np.ndarray, ...]:
    grids = tuple(np.indices((n,) * k, dtype=np.intp))
    for g in grids:
        g.setflags(write=False)
    return grids


def nonidentity_tuples(n: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(1, n), repeat=k))


# coface maps ------------------------------------------------------------------

def coface(c: Cochain, i: int) -> np.ndarray:
    """The i-th coface of a p-cochain, a table on G^(p+1).

    i = 0 applies L to the tail, 1 <= i <= p multiplies arguments i and i+1,
    and i = p+1 drops the last argument (the right action is trivial).
    """
    p = c.p
    if p > MAX_DEGREE:
        raise DegreeOutOfRange(f"cofaces defined for p <= {MAX_DEGREE}")
    if not 0 <= i <= p + 1:
        raise DegreeOutOfRange(f"coface index {i} outside 0..{p + 1}")
    A = _grid(c.G.order, p + 1)
    f = c.table
    if i == 0:
        inner = f[A[1:]] if p else np.broadcast_to(f, A[0].shape)
        return c.L.values[A[0], inner]
    if i == p + 1:
        return f[A[:p]] if p else np.broadcast_to(f, A[0].shape).copy()
    merged = c.G.table[A[i - 1], A[i]]
    return f[A[: i - 1] + (merged,) + A[i + 1:]]


def _face_order(p: int, sign: str) -> list[int]:
    if sign == "+":
        return list(range(0, p + 2, 2))
    if sign == "-":
        return list(range(p + 1 if (p + 1) % 2 else p, 0, -2))
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def parity_boundary(c: Cochain, sign: str) -> np.ndarray:
    """Ordered product of the even (+) or odd (-) cofaces."""
    N = c.N
    out = None
    for i in _face_order(c.p, sign):
        face = coface(c, i)
        out = face if out is None else N.table[out, face]
    return out


def explicit_boundary(c: Cochain, sign: str) -> np.ndarray:
    """The boundary formulas written out degree by degree, evaluated by loops.

    Kept separate from ``parity_boundary`` so the two can be compared.
    """
    G, N, L, f = c.G, c.N, c.L.values, c.table
    m, mul = G.table, N.table
    n = G.order
    p = c.p
    out = np.zeros((n,) * (p + 1), dtype=np.intp)
    plus = sign == "+"
    if sign not in "+-":
        raise ValueError(sign)
    for args in itertools.product(range(n), repeat=p + 1):
        if p == 0:
            (a,) = args
            v = L[a, f[()]] if plus else f[()]
        elif p == 1:
            a, b = args
            # L_a(s(b)) s(a)  |  s(ab)
            v = mul[L[a, f[b]], f[a]] if plus else f[m[a, b]]
        elif p == 2:
            a, b, d = args
            if plus:
                v = mul[L[a, f[b, d]], f[a, m[b, d]]]
            else:
                v = mul[f[a, b], f[m[a, b], d]]
        elif p == 3:
            a, b, d, e = args
            if plus:
                v = mul[mul[L[a, f[b, d, e]], f[a, m[b, d], e]], f[a, b, d]]
            else:
                v = mul[f[a, b, m[d, e]], f[m[a, b], d, e]]
        else:
            raise DegreeOutOfRange(f"explicit formulas cover p <= 3, got {p}")
        out[args] = v
    return out


def delta(c: Cochain, variant: str = "delta") -> Cochain:
    """Coboundary: ``delta`` is (d+)(d-)^-1, ``delta_bar`` is (d-)^-1(d+)."""
    if c.p > MAX_DEGREE - 1:
        raise DegreeOutOfRange(f"delta defined for p <= {MAX_DEGREE - 1}")
    N = c.N
    plus = parity_boundary(c, "+")
    minus_inv = N.inverses[parity_boundary(c, "-")]
    if variant == "delta":
        t = N.table[plus, minus_inv]
    elif variant == "delta_bar":
        t = N.table[minus_inv, plus]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return Cochain(c.p + 1, c.L, t)


def is_cocycle(c: Cochain) -> bool:
    return bool(np.array_equal(parity_boundary(c, "+"), parity_boundary(c, "-")))


def cocycle_witness(c: Cochain):
    bad = np.argwhere(parity_boundary(c, "+") != parity_boundary(c, "-"))
    return tuple(int(x) for x in bad[0]) if len(bad) else None


# relations --------------------------------------------------------------------

def _table(x) -> np.ndarray:
    return x.table if isinstance(x, Cochain) else np.asarray(x)


def _check_witness(c, w: Cochain):
    t = _table(c)
    if t.ndim != w.p + 1:
        raise DegreeMismatch(f"witness of degree {w.p} cannot relate degree {t.ndim} tables")


def is_cobordant(c, c2, w: Cochain) -> bool:
    """c -> c2 through w: d-w = c and d+w = c2."""
    _check_witness(c, w)
    return bool(np.array_equal(parity_boundary(w, "-"), _table(c))
                and np.array_equal(parity_boundary(w, "+"), _table(c2)))


def is_cohomologous(c, c2, w: Cochain, ordering: str = "proof") -> bool:
    """(d+w) c = c2 (d-w) pointwise.

    ``ordering="definition"`` uses c (d-w) = (d+w) c2, which is the converse
    relation; both generate the same equivalence classes.
    """
    _check_witness(c, w)
    mul = w.N.table
    plus, minus = parity_boundary(w, "+"), parity_boundary(w, "-")
    a, b = _table(c), _table(c2)
    if ordering == "proof":
        return bool(np.array_equal(mul[plus, a], mul[b, minus]))
    if ordering == "definition":
        return bool(np.array_equal(mul[a, minus], mul[plus, b]))
    raise ValueError(f"unknown ordering {ordering!r}")


def cohomologous_image(c, w: Cochain) -> np.ndarray:
    """The unique c2 with (d+w) c = c2 (d-w)."""
    mul, inv = w.N.table, w.N.inverses
    return mul[mul[parity_boundary(w, "+"), _table(c)], inv[parity_boundary(w, "-")]]


def is_weak_cohomologous(c: Cochain, c2: Cochain, w: Cochain) -> bool:
    """(d+_{L'} w) f = f' (d-_L w), where L is c's quasiaction and L' is c2's.

    ``w`` supplies the table; its own quasiaction is ignored.
    """
    if c.p != c2.p or w.p != c.p - 1:
        raise DegreeMismatch("weak cohomology needs cochains of equal degree p and a witness of degree p-1")
    mul = c.N.table
    plus = parity_boundary(Cochain(w.p, c2.L, w.table), "+")
    minus = parity_boundary(Cochain(w.p, c.L, w.table), "-")
    return bool(np.array_equal(mul[plus, c.table], mul[c2.table, minus]))


# pushing along conjugation C: N -> Aut(N) ------------------------------------

def push_C(c: Cochain, aut: AutomorphismGroup | None = None) -> Cochain:
    """C_*(f, L) = (C o f, C_L), a cochain over (G, Aut(N))."""
    aut = aut or automorphism_group(c.N)
    return Cochain(c.p, c.L.induced(aut), aut.inner_index[c.table])


def chain_map_defect(c: Cochain, aut: AutomorphismGroup | None = None):
    """First tuple where d(C_* c) and C_*(d c) differ, per sign; None if they commute."""
    aut = aut or automorphism_group(c.N)
    pushed = push_C(c, aut)
    for sign in "+-":
        lhs = parity_boundary(pushed, sign)
        rhs = aut.inner_index[parity_boundary(c, sign)]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return sign, tuple(int(x) for x in bad[0])
    return None


def all_tables(G: FiniteGroup, values, p: int, limit: int = 10**6):
    """Every normalized table on G^p with entries from ``values``."""
    values = list(values)
    cells = nonidentity_tuples(G.order, p)
    total = len(values) ** len(cells)
    if total > limit:
        raise CochainError(f"{total} tables exceeds enumeration limit {limit}")
    for choice in itertools.product(values, repeat=len(cells)):
        t = np.zeros((G.order,) * p, dtype=np.intp)
        for cell, v in zip(cells, choice):
            t[cell] = v
        yield t


def exactness_check(G: FiniteGroup, N: FiniteGroup, p: int, L: Quasiaction | None = None,
                    aut: AutomorphismGroup | None = None) -> dict:
    """Cochain-level exactness of 0 -> C(Cen N) -> C(N) -> C(Aut N) -> C(Out N) -> 1.

    The maps act on values only; ``L`` (default trivial) is used for the
    check that inclusion and projection commute with the boundaries.
    """
    aut = aut or automorphism_group(N)
    L = L or Quasiaction.trivial(G, N)
    Z = center(N)
    inner = set(aut.inner.members)
    cells = len(nonidentity_tuples(G.order, p))

    center_tabs = [t for t in all_tables(G, Z.members, p)]
    incl_keys = {t.tobytes() for t in center_tabs}
    kernel_keys = set()
    image_C = set()
    for t in all_tables(G, range(N.order), p):
        pushed = aut.inner_index[t]
        image_C.add(pushed.tobytes())
        if np.all(pushed == 0):
            kernel_keys.add(t.tobytes())
    inner_keys = set()
    out_images = set()
    for t in all_tables(G, range(aut.order), p):
        out_images.add(aut.coset_of[t].tobytes())
        if all(int(x) in inner for x in t.flat):
            inner_keys.add(t.tobytes())

    # i and pi commute with the boundaries
    commutes = True
    LL = L.induced(aut)
    for t in center_tabs:
        cz = Cochain(p, L, t)
        for sign in "+-":
            if not all(int(x) in Z for x in parity_boundary(cz, sign).flat):
                commutes = False
    for t in all_tables(G, range(aut.order), p):
        ca = Cochain(p, LL, t)
        for sign in "+-":
            b = parity_boundary(ca, sign)
            # d(pi c) computed on coset representatives must match pi(d c)
            reps = np.array([co[0] for co in aut.outer_cosets])[aut.coset_of[t]]
            b_rep = parity_boundary(Cochain(p, LL, reps), sign)
            if not np.array_equal(aut.coset_of[b], aut.coset_of[b_rep]):
                commutes = False
                break
        if not commutes:
            break

    report = {
        "G": G.name, "N": N.name, "p": p,
        "cells": cells,
        "center_cochains": len(center_tabs),
        "inclusion_injective": len(incl_keys) == len(center_tabs),
        "kernel_C": len(kernel_keys),
        "image_i_equals_kernel_C": incl_keys == kernel_keys,
        "image_C": len(image_C),
        "inner_cochains": len(inner_keys),
        "image_C_equals_kernel_pi": image_C == inner_keys,
        "out_cochains": len(aut.outer_cosets) ** cells,
        "image_pi": len(out_images),
        "pi_surjective": len(out_images) == len(aut.outer_cosets) ** cells,
        "boundaries_commute": commutes,
    }
    report["exact"] = all(report[k] for k in (
        "inclusion_injective", "image_i_equals_kernel_C", "image_C_equals_kernel_pi",
        "pi_surjective", "boundaries_commute"))
    return report


# JSON -------------------------------------------------------------------------

def cochain_to_json(c: Cochain) -> dict:
    return {
        "p": c.p,
        "G": group_ref(c.G),
        "N": group_ref(c.N),
        "L": c.L.values.tolist(),
        "f": c.table.tolist(),
    }


def cochain_from_json(obj: dict) -> Cochain:
    try:
        G = resolve_group(obj["G"])
        N = resolve_group(obj["N"])
        p = int(obj["p"])
        L_raw = obj.get("L")
    except KeyError as exc:
        raise CochainError(f"cochain file missing field {exc}") from None
    L = Quasiaction.trivial(G, N) if L_raw in (None, "trivial") else Quasiaction(G, N, np.asarray(L_raw))
    return Cochain(p, L, np.asarray(obj["f"], dtype=np.intp))
