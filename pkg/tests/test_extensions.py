import numpy as np
import pytest
from hypothesis import assume, given

from parityc.cochains import Cochain, Quasiaction, identity_cochain, is_cocycle, parity_boundary
from parityc.extensions import (
    FiberMismatch,
    NoSplittingFound,
    NotIntegrable,
    associator_formula,
    associator_routes_agree,
    associator_table,
    build_quasi_extension,
    canonical_roundtrip,
    classify_splittings,
    conjugated_cocycle,
    find_normal_subgroup,
    iso_profile,
    mc_triple,
    pentagon_defects,
    qext_lemma_checks,
    right_inverse,
    section_triple_checks,
    semidirect_product,
    split_iso_phi,
    three_cocycle_check,
    vector_between,
)
from parityc.groups import automorphism_group, builtin, find_isomorphism
from parityc.integrability import is_integrable

from conftest import cochains, cocycles

Z2, Z3, Z4, S3 = builtin("cyclic:2"), builtin("cyclic:3"), builtin("cyclic:4"), builtin("sym:3")


def _inversion(G, N):
    aut = automorphism_group(N)
    inv = aut.index_of(N.inverses)
    return Quasiaction.from_indices(G, aut, [0, inv])


def test_z4_from_the_nontrivial_z2_cocycle():
    f = Cochain(2, Quasiaction.trivial(Z2, Z2), np.array([[0, 0], [0, 1]]))
    E = build_quasi_extension(f)
    assert E.associative
    assert iso_profile(E.as_group()) == [1, 1, 2]
    assert [right_inverse(E, e) for e in range(4)] == [0, 3, 2, 1]
    assert canonical_roundtrip(f)["exact"]


def test_trivial_cochain_gives_direct_product():
    E = build_quasi_extension(identity_cochain(2, Quasiaction.trivial(Z2, Z2)), "full")
    assert iso_profile(E.as_group()) == [1, 3]


def test_semidirect_products():
    assert find_isomorphism(semidirect_product(_inversion(Z2, Z3)), S3) is not None
    assert find_isomorphism(semidirect_product(_inversion(Z2, Z4)), builtin("dihedral:4")) is not None


def test_non_action_full_fiber_is_not_associative():
    aut = automorphism_group(S3)
    L = Quasiaction.from_indices(Z2, aut, [0, int(aut.inner_index[3])])
    E = build_quasi_extension(identity_cochain(2, L), "full")
    assert not E.associative
    assert E.associativity_witness is not None
    assert build_quasi_extension(identity_cochain(2, L), "holonomy").associative


@given(cocycles())
def test_roundtrip_recovers_action_and_cocycle(f):
    r = canonical_roundtrip(f)
    assert r["exact"], r


@given(cocycles(pairs=[("cyclic:2", "sym:3"), ("cyclic:2", "quat:8"), ("cyclic:3", "cyclic:3")]))
def test_mc_conditions_agree_on_cocycles(f):
    assert mc_triple(f)["conditions"] == [True, True, True]
    assert all(section_triple_checks(f).values())


@given(cochains(2, pairs=[("cyclic:2", "sym:3"), ("cyclic:3", "cyclic:3"), ("cyclic:2", "cyclic:4")]))
def test_associator_routes_and_pentagon_hold_for_any_cochain(f):
    for fiber in ("holonomy", "full"):
        E = build_quasi_extension(f, fiber)
        assert associator_routes_agree(E)["agree"]
        assert np.array_equal(associator_table(E), associator_formula(E))
        assert pentagon_defects(E)[1] is None


@given(cochains(2, pairs=[("cyclic:2", "sym:3"), ("cyclic:2", "klein")]))
def test_quasi_extension_lemma(f):
    E = build_quasi_extension(f)
    r = qext_lemma_checks(E)
    assert r["section_vector_is_f"] and r["pi_multiplicative"]
    if E.associative:
        assert r["normal"] and r["conjugation_is_C_n_L"]


@given(cocycles(pairs=[("cyclic:2", "sym:3"), ("cyclic:2", "cyclic:4"), ("klein", "cyclic:2")]))
def test_three_cocycle_report_is_consistent(f):
    r = three_cocycle_check(f)
    assert r["pentagon_holds"] and r["consistent"]
    assert r["alpha_trivial"] == is_cocycle(f)


def test_non_central_associator_does_not_factor():
    aut = automorphism_group(S3)
    f = Cochain(2, Quasiaction.from_indices(Z2, aut, [0, 1]), np.array([[0, 0], [0, 2]]))
    r = three_cocycle_check(f)
    assert not r["factors"]
    assert r["factor_witness"] is not None
    with pytest.raises(NotIntegrable):
        canonical_roundtrip(f)


def test_vectors_only_inside_a_fiber():
    E = build_quasi_extension(identity_cochain(2, Quasiaction.trivial(Z2, Z3)), "full")
    assert vector_between(E, E.index(1, 0), E.index(2, 0)) == 1
    with pytest.raises(FiberMismatch):
        vector_between(E, E.index(0, 0), E.index(0, 1))


def test_split_isomorphism_for_a_coboundary():
    L = _inversion(Z2, Z3)
    gamma = Cochain(1, L, np.array([0, 1]))
    f = Cochain(2, L, np.zeros((2, 2), dtype=np.intp))
    r = split_iso_phi(f, gamma)
    assert r["all_pass"], r
    assert r["pairs_checked"] == 36


@given(cocycles(pairs=[("cyclic:2", "sym:3"), ("cyclic:2", "quat:8"), ("cyclic:2", "cyclic:3")]))
def test_conjugating_absolute_cocycles_by_one_cochains(f):
    assume(is_integrable(f, absolute=True))
    G, N = f.G, f.N
    for g in range(1, N.order):
        gamma = np.zeros(G.order, dtype=np.intp)
        gamma[-1] = g
        f2 = conjugated_cocycle(f, gamma)
        assert is_cocycle(f2) and is_integrable(f2, absolute=True)
        plus = parity_boundary(Cochain(1, f2.L, gamma), "+")
        minus = parity_boundary(Cochain(1, f.L, gamma), "-")
        assert np.array_equal(N.table[plus, f.table], N.table[f2.table, minus])


def test_conjugating_with_the_action_held_fixed_can_leave_cocycles():
    # keeping L instead of passing to C_gamma L: 6 of the 36 pairs on (Z2, S3) stop being cocycles
    from parityc.census import cocycles_of, enumerate_quasiactions
    from parityc.cochains import cohomologous_image
    total = kept = 0
    for L in enumerate_quasiactions(Z2, S3, automorphism_group(S3)):
        for f in cocycles_of(Z2, S3, L, 2):
            if not is_integrable(f, absolute=True):
                continue
            for g in range(6):
                img = cohomologous_image(f, Cochain(1, L, np.array([0, g])))
                total += 1
                kept += is_cocycle(Cochain(2, L, img))
    assert (total, kept) == (36, 30)


@pytest.mark.parametrize("E,N,counts", [
    ("sym:3", "cyclic:3", (3, 1, 1)),
    ("klein", "cyclic:2", (2, 2, 2)),
    ("cyclic:2", "cyclic:2", (1, 1, 1)),
])
def test_splittings(E, N, counts):
    G = builtin(E)
    r = classify_splittings(G, find_normal_subgroup(G, builtin(N)))
    assert (r["splittings"], r["classes"], r["H1"]) == counts
    assert r["match"]


def test_trivial_quotient_has_one_class():
    G = builtin("sym:3")
    r = classify_splittings(G, find_normal_subgroup(G, list(range(6))))
    assert r["classes"] == 1 and r["match"]


@pytest.mark.parametrize("E,N", [("cyclic:4", "cyclic:2"), ("quat:8", "cyclic:4")])
def test_non_split_extensions(E, N):
    G = builtin(E)
    with pytest.raises(NoSplittingFound):
        classify_splittings(G, find_normal_subgroup(G, builtin(N)))
