import numpy as np
import pytest
from hypothesis import given

from parityc.cochains import Cochain, DegreeOutOfRange, Quasiaction, all_tables, delta, identity_cochain
from parityc.groups import automorphism_group, builtin
from parityc.integrability import (
    dds_battery,
    derived_two_cochain,
    holonomy_group,
    is_integrable,
    is_invariant,
    mc_check,
    mc_witness,
)

from conftest import all_quasiactions, cochains, cocycles

Z2, S3 = builtin("cyclic:2"), builtin("sym:3")


def _rotation_quasiaction():
    # L_a = conjugation by a 3-cycle: L_a L_a != id, so not an action
    aut = automorphism_group(S3)
    return Quasiaction.from_indices(Z2, aut, [0, int(aut.inner_index[3])])


def test_identity_cochain_has_trivial_holonomy():
    L = _rotation_quasiaction()
    f = identity_cochain(2, L)
    assert holonomy_group(f).members == (0,)
    assert is_integrable(f)
    assert not is_integrable(f, absolute=True)
    a, b, n = mc_witness(f, L, range(6))
    assert (a, b) == (1, 1) and n != 0


@given(cochains(2))
def test_holonomy_is_invariant_and_contains_image(f):
    H = holonomy_group(f).subgroup
    assert is_invariant(H, f.L)
    assert set(np.asarray(f.table).ravel().tolist()) <= set(H.members)


@given(cocycles())
def test_cocycles_are_integrable(f):
    assert is_integrable(f)


@given(cocycles(pairs=[("cyclic:2", "sym:3"), ("cyclic:2", "cyclic:4"), ("klein", "cyclic:2")]))
def test_irreducible_cocycles_are_absolutely_integrable(f):
    if holonomy_group(f).subgroup.order == f.N.order:
        assert is_integrable(f, absolute=True)


@given(cochains(1))
def test_dds_conditions_agree(s):
    r = dds_battery(s)
    assert r["agree"], r


@pytest.mark.parametrize("g,n", [("cyclic:2", "sym:3"), ("cyclic:2", "cyclic:3"), ("cyclic:3", "cyclic:3")])
def test_dds_exhaustive(g, n):
    for L in all_quasiactions(g, n):
        for t in all_tables(L.G, range(L.N.order), 1):
            assert dds_battery(Cochain(1, L, t))["agree"]


def test_derived_two_cochain_degrees():
    L = Quasiaction.trivial(Z2, S3)
    s = Cochain(1, L, np.array([0, 3]))
    assert np.array_equal(derived_two_cochain(s).table, delta(s).table)
    c0 = Cochain(0, L, np.array(2))
    assert derived_two_cochain(c0).p == 2
    with pytest.raises(DegreeOutOfRange):
        derived_two_cochain(Cochain(3, L, np.zeros((2, 2, 2), dtype=np.intp)))


def test_mc_on_full_group_for_actions():
    for L in all_quasiactions("cyclic:2", "sym:3"):
        f = identity_cochain(2, L)
        assert mc_check(f, L, range(6)) == L.is_action()
