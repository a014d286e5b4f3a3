"""Holonomy subgroups and the integrability (MC) equation.

The MC equation for a 2-cochain (f, L) on a subgroup H of N reads

    L_a(L_b(n)) f(a, b) = f(a, b) L_ab(n)      for all a, b in G, n in H,

i.e. L_a L_b = C_f(a,b) L_ab on H.  Equations between automorphisms are only
ever compared pointwise on the holonomy group, never on all of N.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cochains import (
    Cochain,
    DegreeOutOfRange,
    Quasiaction,
    delta,
    is_cocycle,
)
from .groups import AutomorphismGroup, Subgroup, automorphism_group, generated_subgroup


@dataclass(frozen=True)
class HolonomyResult:
    subgroup: Subgroup
    orbit_seed: tuple[int, ...]
    closed_under: tuple[Quasiaction, ...]

    @property
    def members(self) -> tuple[int, ...]:
        return self.subgroup.members


def orbit_closure(seeds, quasiactions) -> set[int]:
    found = {int(s) for s in seeds}
    work = list(found)
    while work:
        x = work.pop()
        for L in quasiactions:
            for y in L.values[:, x]:
                y = int(y)
                if y not in found:
                    found.add(y)
                    work.append(y)
    return found


def holonomy_group(c: Cochain, extra=()) -> HolonomyResult:
    """Subgroup of N generated by the L-orbit of the image of c.

    ``extra`` adds further quasiactions the result must be invariant under.
    """
    seeds = tuple(sorted({int(x) for x in np.asarray(c.table).flat}))
    actions = (c.L,) + tuple(extra)
    orbit = orbit_closure(seeds, actions)
    H = generated_subgroup(c.N, orbit)
    return HolonomyResult(H, seeds, actions)


def is_invariant(H: Subgroup, L: Quasiaction) -> bool:
    members = set(H.members)
    return all(int(y) in members for y in L.values[:, list(H.members)].flat)


def mc_table(f, L: Quasiaction, H) -> np.ndarray:
    """Boolean array over (a, b, n in H): does MC hold?"""
    G, N = L.G, L.N
    f = np.asarray(f.table if isinstance(f, Cochain) else f)
    h = np.asarray(list(H), dtype=np.intp)
    v = L.values
    a = np.arange(G.order)[:, None, None]
    b = np.arange(G.order)[None, :, None]
    n = h[None, None, :]
    fab = f[a[..., 0], b[..., 0]][..., None]
    lhs = N.table[v[a, v[b, n]], fab]
    rhs = N.table[fab, v[G.table[a, b], n]]
    return lhs == rhs


def mc_check(f, L: Quasiaction, H) -> bool:
    return bool(mc_table(f, L, H).all())


def mc_witness(f, L: Quasiaction, H):
    ok = mc_table(f, L, H)
    bad = np.argwhere(~ok)
    if not len(bad):
        return None
    a, b, k = (int(x) for x in bad[0])
    return a, b, int(list(H)[k])


def derived_two_cochain(c: Cochain) -> Cochain:
    """f = c, delta c or delta delta c for p = 2, 1, 0."""
    if c.p == 2:
        return c
    if c.p == 1:
        return delta(c)
    if c.p == 0:
        return delta(delta(c))
    raise DegreeOutOfRange(f"integrability is defined for p in 0..2, got {c.p}")


def integrability_subgroup(c: Cochain) -> Subgroup:
    # for p = 0 the orbit of the single element generates
    return holonomy_group(c).subgroup


def is_integrable(c: Cochain, absolute: bool = False) -> bool:
    f = derived_two_cochain(c)
    H = range(c.N.order) if absolute else integrability_subgroup(c).members
    return mc_check(f, c.L, H)


def dds_battery(s: Cochain, aut: AutomorphismGroup | None = None) -> dict:
    """The four equivalent conditions on a 1-cochain (s, L), evaluated on I(s, L).

    1. delta(delta s) = 1
    2. delta_{C_L} L = C_f on I, with f = delta s
    3. delta_{C_L} L = delta_{C_L}(C_s) on I
    4. g -> C_s(g)^-1 L_g restricted to I is a homomorphism
    """
    if s.p != 1:
        raise DegreeOutOfRange("the battery takes a 1-cochain")
    G, N, L = s.G, s.N, s.L
    aut = aut or automorphism_group(N)
    I = np.asarray(holonomy_group(s).members, dtype=np.intp)
    f = delta(s)

    cond1 = is_cocycle(f)

    # L and C_s as 1-cochains over (G, Aut N) with quasiaction C_L
    LL = L.induced(aut)
    L_idx = np.asarray(L.indices(aut), dtype=np.intp)
    L_cochain = Cochain(1, LL, L_idx)
    Cs_cochain = Cochain(1, LL, aut.inner_index[s.table])
    dL = delta(L_cochain).table            # indices into Aut(N)
    dCs = delta(Cs_cochain).table
    Cf = aut.inner_index[f.table]
    img = aut.images
    cond2 = bool(np.array_equal(img[dL][..., I], img[Cf][..., I]))
    cond3 = bool(np.array_equal(img[dL][..., I], img[dCs][..., I]))

    # gamma_g = C_{s(g)}^-1 o L_g as maps on I
    inv_conj = img[aut.inner_index[N.inverses[s.table]]]    # C_{s(g)^-1}
    gamma = inv_conj[np.arange(G.order)[:, None], L.values]  # (|G|, |N|)
    a = np.arange(G.order)[:, None, None]
    b = np.arange(G.order)[None, :, None]
    comp = gamma[a, gamma[b, I[None, None, :]]]
    cond4 = bool(np.array_equal(comp, gamma[G.table][..., I]))

    conds = [cond1, cond2, cond3, cond4]
    return {
        "conditions": conds,
        "agree": len(set(conds)) == 1,
        "holonomy": [int(x) for x in I],
    }
