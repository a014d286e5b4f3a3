import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parityc.cochains import (
    Cochain,
    DegreeMismatch,
    DegreeOutOfRange,
    NotNormalized,
    Quasiaction,
    all_tables,
    chain_map_defect,
    coface,
    cochain_from_json,
    cochain_to_json,
    cohomologous_image,
    delta,
    exactness_check,
    explicit_boundary,
    identity_cochain,
    is_cobordant,
    is_cocycle,
    is_cohomologous,
    is_weak_cohomologous,
    parity_boundary,
)
from parityc.groups import automorphism_group, builtin

from conftest import cochains, quasiactions

Z2, Z3, S3 = builtin("cyclic:2"), builtin("cyclic:3"), builtin("sym:3")


@given(st.integers(0, 3).flatmap(lambda p: cochains(p)), st.sampled_from("+-"))
def test_face_product_matches_explicit_formulas(c, sign):
    assert np.array_equal(parity_boundary(c, sign), explicit_boundary(c, sign))


@given(cochains(1))
def test_degree_one_boundaries(s):
    G, N, L = s.G, s.N, s.L
    plus, minus = parity_boundary(s, "+"), parity_boundary(s, "-")
    for a, b in itertools.product(range(G.order), repeat=2):
        assert plus[a, b] == N.mul(L(a, s(b)), s(a))
        assert minus[a, b] == s(G.mul(a, b))


@given(cochains(2))
def test_cofaces_of_normalized_cochains_are_normalized(f):
    for i in range(4):
        face = coface(f, i)
        assert face.shape == (f.G.order,) * 3


def test_degree_bounds():
    L = Quasiaction.trivial(Z2, Z2)
    with pytest.raises(DegreeOutOfRange):
        Cochain(4, L, np.zeros((2,) * 4, dtype=np.intp))
    with pytest.raises(DegreeMismatch):
        Cochain(2, L, np.zeros((2,), dtype=np.intp))
    with pytest.raises(NotNormalized):
        Cochain(1, L, np.array([1, 0]))


def test_z2_z2_every_cochain_is_a_cocycle():
    L = Quasiaction.trivial(Z2, Z2)
    tabs = list(all_tables(Z2, range(2), 2))
    assert len(tabs) == 2
    assert all(is_cocycle(Cochain(2, L, t)) for t in tabs)


@given(quasiactions(), st.data())
def test_coboundary_of_homomorphism_into_center_is_trivial(L, data):
    # s = 1 gives f = 1 for any L
    assert np.all(delta(identity_cochain(1, L)).table == 0)


def test_cohomologous_matches_abelian_coboundary_difference():
    L = Quasiaction.trivial(Z2, Z2)
    tabs = list(all_tables(Z2, range(2), 2))
    ws = [Cochain(1, L, t) for t in all_tables(Z2, range(2), 1)]
    for t1, t2 in itertools.product(tabs, repeat=2):
        c1, c2 = Cochain(2, L, t1), Cochain(2, L, t2)
        related = any(is_cohomologous(c1, c2, w) for w in ws)
        diff = Z2.table[t2, Z2.inverses[t1]]
        by_difference = any(np.array_equal(diff, delta(w).table) for w in ws)
        assert related == by_difference


@given(cochains(2, pairs=[("cyclic:2", "sym:3"), ("cyclic:3", "cyclic:3")]), st.data())
def test_cohomologous_image_is_related(c, data):
    w = data.draw(cochains(1, pairs=[(c.G.name, c.N.name)]).map(lambda w: Cochain(1, c.L, w.table)))
    c2 = cohomologous_image(c, w)
    assert is_cohomologous(c, c2, w)
    assert is_cohomologous(c2, c.table, w, ordering="definition")


@given(cochains(1))
def test_coboundary_is_cobordant_to_identity(w):
    minus = parity_boundary(w, "-")
    assert is_cobordant(minus, parity_boundary(w, "+"), w)


def test_weak_cohomologous_with_identity_witness():
    aut = automorphism_group(S3)
    L = Quasiaction.from_indices(Z2, aut, [0, 1])
    f = Cochain(2, L, np.zeros((2, 2), dtype=np.intp))
    assert is_weak_cohomologous(f, f, identity_cochain(1, L))


@given(cochains(2, pairs=[("cyclic:2", "sym:3"), ("cyclic:2", "quat:8")]))
def test_inner_projection_is_a_chain_map(c):
    assert chain_map_defect(c) is None


def test_chain_map_exhaustive_on_z2_s3():
    aut = automorphism_group(S3)
    for idx in range(aut.order):
        L = Quasiaction.from_indices(Z2, aut, [0, idx])
        for p in range(3):
            for t in all_tables(Z2, range(6), p):
                assert chain_map_defect(Cochain(p, L, t), aut) is None


@pytest.mark.parametrize("N", ["sym:3", "quat:8"])
@pytest.mark.parametrize("p", [0, 1, 2])
def test_exactness(N, p):
    r = exactness_check(Z2, builtin(N), p)
    assert r["exact"], r


@given(cochains(2))
def test_json_roundtrip(c):
    back = cochain_from_json(cochain_to_json(c))
    assert np.array_equal(back.table, c.table)
    assert np.array_equal(back.L.values, c.L.values)


def test_delta_variants_coincide_on_abelian_actions():
    L = Quasiaction.trivial(Z3, Z3)
    for t in all_tables(Z3, range(3), 1):
        s = Cochain(1, L, t)
        assert np.array_equal(delta(s).table, delta(s, "delta_bar").table)
