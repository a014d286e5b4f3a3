import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parityc import categorify as cat
from parityc.census import instance_rng
from parityc.cochains import DegreeOutOfRange, NotNormalized
from parityc.extensions import build_quasi_extension, find_normal_subgroup
from parityc.groups import builtin

from conftest import cochains

Z2, Z3, Z4, S3 = builtin("cyclic:2"), builtin("cyclic:3"), builtin("cyclic:4"), builtin("sym:3")
FIBER_GROUPS = ["cyclic:2", "cyclic:3", "cyclic:4", "klein", "sym:3"]


def test_base_category_shapes():
    T = cat.build_base_B(builtin("trivial"))
    assert (T.n_objects, T.n_morphisms) == (1, 1)
    B = cat.build_base_B(Z2)
    assert (B.n_objects, B.n_morphisms) == (2, 2)
    B6 = cat.build_base_B(S3)
    # components = objects, since only identities exist
    assert len(set(zip(B6.src, B6.dst))) == 6 and np.all(B6.src == B6.dst)


def test_twisted_tensor_formula():
    F = cat.build_fiber_F(S3)
    r, s, e = S3.index("(0 1 2)"), S3.index("(0 1)"), 0
    f = F.morphism(e, r, s)
    g = F.morphism(r, s, r)
    fg = int(F.tensor(f, g))
    assert F.lab[fg] == S3.mul(r, r)
    assert (F.src[fg], F.dst[fg]) == (S3.mul(e, r), S3.mul(r, s))


@pytest.mark.parametrize("ref", FIBER_GROUPS)
def test_whiskering_conjugates_and_truncates(ref):
    G = builtin(ref)
    F = cat.build_fiber_F(G)
    ids = F.identities
    for c, x in itertools.product(range(G.order), range(F.n_morphisms)):
        a, b, lab = F.src[x], F.dst[x], F.lab[x]
        left = int(F.tensor(ids[c], x))
        assert F.lab[left] == G.conj(c, lab)
        right = int(F.tensor(x, ids[c]))
        assert F.lab[right] == G.mul(b, G.inv(a))


@pytest.mark.parametrize("ref", FIBER_GROUPS)
def test_fiber_category_is_strict_monoidal(ref):
    G = builtin(ref)
    F = cat.build_fiber_F(G)
    assert cat.composition_associative(F)
    assert cat.tensor_functoriality(F)["pass"]
    assert cat.vectors_and_preservation(F)["pass"]
    assert cat.untwist_check(G)["pass"]


def test_broken_tensor_is_caught():
    F = cat.build_fiber_F(S3)
    bad = F.with_tensor(lambda sf, tf, lf, sg, tg, lg: S3.table[lg, S3.table[tf, S3.inverses[sf]]])
    r = cat.tensor_functoriality(bad)
    assert not r["pass"] and r["witness"] is not None


def test_vector_product_rule_z3():
    F = cat.build_fiber_F(Z3)
    a, a2 = 1, 2
    v = int(F.tensor(F.vector(0, a), F.vector(a, a2)))
    assert v == int(F.vector(Z3.mul(0, a), Z3.mul(a, a2)))


def test_untwisting_formula_z2():
    # D(x = a: a -> a) = a^-1 a a = a
    G = Z2
    F, U = cat.build_fiber_F(G), cat.build_fiber_F(G, False)
    x = F.morphism(1, 1, 1)
    assert G.mul(G.mul(G.inv(F.dst[x]), F.lab[x]), F.src[x]) == 1
    assert U.lab[U.morphism(1, 1, 1)] == 1


def test_monoidal_structure_of_a_function():
    _, r = cat.functor_of_function(Z2, Z4, [0, 1])
    F, _ = cat.functor_of_function(Z2, Z4, [0, 1])
    assert F.target.lab[F.structure[1, 1]] == 2
    assert r["pass"] and not r["strict"]


@pytest.mark.parametrize("n", ["cyclic:3", "cyclic:4"])
def test_strict_exactly_for_morphisms(n):
    N = builtin(n)
    for x in range(N.order):
        _, r = cat.functor_of_function(Z2, N, [0, x])
        assert r["strict"] == (N.mul(x, x) == 0)
        assert r["pass"], r


def test_function_must_be_normalized():
    with pytest.raises(NotNormalized):
        cat.functor_of_function(Z2, Z3, [1, 0])


def test_structure_is_a_categorical_two_cocycle_on_z3():
    for tail in itertools.product(range(3), repeat=2):
        s = (0,) + tail
        F, r = cat.functor_of_function(Z3, Z3, s)
        plus, minus = cat.categorical_parity(F.target, F.structure, 2, left_obj=s, right_obj=s,
                                             source_tensor=Z3.table)
        assert np.array_equal(plus, minus) and r["phi_is_delta_s"]


@given(st.lists(st.integers(0, 2), min_size=3, max_size=3), st.lists(st.integers(0, 2), min_size=2, max_size=2))
def test_functor_lemma(lam, tail):
    r = cat.functor_lemma(Z3, Z3, [0] + tail, lam)
    assert r["agree"]


def test_coface_zero_whiskers_on_the_left():
    U = cat.build_fiber_F(Z2, False)
    phi = np.array([U.morphism(0, 0, 1), U.morphism(1, 1, 1)])
    d0 = cat.categorical_coboundary(U, phi, 1, 0)
    ids = U.identities
    for a, b in itertools.product(range(2), repeat=2):
        assert d0[a, b] == U.tensor(ids[a], phi[b])
    with pytest.raises(DegreeOutOfRange):
        cat.categorical_coboundary(U, phi, 1, 5)


def test_identity_family_has_identity_cofaces():
    F = cat.build_fiber_F(S3)
    phi = F.identities
    for face in cat.categorical_cofaces(F, phi, 1):
        assert np.all(F.src[face] == F.dst[face]) and np.all(F.lab[face] == 0)


@pytest.mark.parametrize("E,N", [("sym:3", "cyclic:3"), ("dihedral:4", "cyclic:4"), ("klein", "cyclic:2")])
def test_section_pairs_give_monoidal_morphisms(E, N):
    G = builtin(E)
    H = find_normal_subgroup(G, builtin(N))
    from parityc.groups import quotient
    Q, proj = quotient(G, H)
    fibers = [np.flatnonzero(proj == q) for q in range(Q.order)]
    secs = [np.array((0,) + t) for t in itertools.product(*fibers[1:])]
    for s, t in itertools.product(secs, repeat=2):
        assert cat.monoidal_morphism_check(G, H, s, t)["pass"]


def test_monoidal_morphism_needs_sections():
    G = builtin("sym:3")
    H = find_normal_subgroup(G, Z3)
    with pytest.raises(cat.TargetMismatch):
        cat.monoidal_morphism_check(G, H, np.array([0, 0]), np.array([0, 1]))


@pytest.mark.parametrize("ref", ["cyclic:2", "cyclic:3", "klein"])
def test_abelian_symmetry_on_vectors(ref):
    U = cat.build_fiber_F(builtin(ref), False)
    sigma = cat.canonical_symmetry(U)
    assert np.all(U.lab[sigma] == 0)
    assert cat.commutativity_constraint_check(U, sigma, "vectors")["pass"]
    # on all morphisms ~(x) cannot be natural as a transformation to its opposite
    assert not cat.commutativity_constraint_check(U, sigma, "all")["natural"]


def test_perturbed_symmetry_is_not_natural():
    F = cat.build_fiber_F(S3)
    sigma = cat.canonical_symmetry(F).copy()
    assert cat.commutativity_constraint_check(F, sigma, "vectors")["pass"]
    m = sigma[1, 2]
    sigma[1, 2] = F.index[F.src[m], F.dst[m], S3.mul(F.lab[m], 1)]
    r = cat.commutativity_constraint_check(F, sigma, "vectors")
    assert not r["natural"] and r["witness"] is not None
    with pytest.raises(cat.NotNatural):
        cat.commutativity_constraint_check(F, sigma, "vectors", raise_on_failure=True)


def test_identity_monoidal_structure():
    F = cat.build_fiber_F(S3)
    Phi = F.identities[S3.table]
    assert cat.monoidal_structure_2cocycle_check(F, Phi)["pass"]


@pytest.mark.parametrize("ref", ["trivial", "cyclic:2", "cyclic:4", "klein", "sym:3", "quat:8"])
def test_fiber_and_base_are_restrictions_of_the_bundle(ref):
    assert cat.categ_comparison(builtin(ref))["pass"]


def test_bundle_category_of_a_proper_extension():
    G = builtin("dihedral:4")
    C = cat.build_bundle_C(G, find_normal_subgroup(G, Z4))
    assert cat.tensor_functoriality(C)["pass"]
    assert cat.vectors_and_preservation(C)["pass"]


@given(cochains(2, pairs=[("cyclic:2", "sym:3"), ("cyclic:3", "cyclic:3"), ("cyclic:2", "quat:8")]),
       st.sampled_from(["holonomy", "full"]))
def test_reduced_category_diagrams_commute(f, fiber):
    E = build_quasi_extension(f, fiber)
    r = cat.er_pentagon(E, instance_rng(0, "er"), 2000)
    assert r["pass"] and r["alpha_defined"]
    C = cat.build_reduced_Er(E)
    # one vector between fiber-mates
    homs = np.zeros((C.n_objects, C.n_objects), dtype=int)
    np.add.at(homs, (C.src, C.dst), 1)
    assert homs.max() == 1
    assert cat.vectors_and_preservation(C, instance_rng(0, "v"), 2000)["triangles"]


def test_category_dump():
    d = cat.build_fiber_F(Z2).to_json()
    assert json.loads(json.dumps(d))["hom_sizes"] == [[2, 2], [2, 2]]
