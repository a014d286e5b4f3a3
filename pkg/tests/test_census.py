import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parityc.census import (
    BudgetExceeded,
    NotAbelian,
    NotAnAction,
    abelian_oracle,
    cocycle_census,
    enumerate_quasiactions,
    instance_rng,
    weak_classes,
)
from parityc.cochains import Quasiaction, is_cocycle
from parityc.groups import automorphism_group, builtin

from conftest import all_quasiactions

G2, G3, G4 = builtin("cyclic:2"), builtin("cyclic:3"), builtin("cyclic:4")
K = builtin("klein")


@pytest.mark.parametrize("g,n,p,z,h", [
    ("cyclic:2", "cyclic:2", 2, 2, 2),
    ("cyclic:3", "cyclic:3", 2, 9, 3),
    ("cyclic:2", "cyclic:4", 2, 4, 2),
    ("klein", "cyclic:2", 2, 16, 8),
    ("cyclic:2", "cyclic:2", 1, 2, 2),
    ("trivial", "cyclic:5", 2, 1, 1),
])
def test_trivial_action_counts(g, n, p, z, h):
    # normalized counts; H^2(Z_m, Z_n) = Z_gcd, H^2(V4, Z2) = Z2^3, H^1 = Hom
    r = cocycle_census(builtin(g), builtin(n), p, "trivial")
    assert (r.cocycles, r.classes) == (z, h)


def test_z2_z3_all_quasiactions_degree_one():
    r = cocycle_census(G2, G3, 1, "all")
    assert [(f.indices, f.cocycles, f.classes) for f in r.fibers] == [([0, 0], 1, 1), ([0, 1], 3, 1)]


def test_quasiaction_counts():
    assert len(enumerate_quasiactions(G3, G3, automorphism_group(G3))) == 4
    assert sum(L.is_action() for L in all_quasiactions("cyclic:3", "cyclic:3")) == 1
    assert len(all_quasiactions("klein", "klein")) == 216


@pytest.mark.parametrize("g,n", [("cyclic:2", "cyclic:2"), ("cyclic:3", "cyclic:3"),
                                 ("cyclic:2", "cyclic:4"), ("cyclic:2", "klein"), ("klein", "cyclic:2")])
@pytest.mark.parametrize("p", [0, 1, 2])
def test_oracle_agreement_on_actions(g, n, p):
    for L in all_quasiactions(g, n):
        if not L.is_action():
            continue
        r = cocycle_census(L.G, L.N, p, L).fibers[0]
        o = abelian_oracle(L.G, L.N, L, p)
        assert o["divides"]
        assert r.classes == o["H"]


def test_oracle_rejects_bad_inputs():
    with pytest.raises(NotAbelian):
        abelian_oracle(G2, builtin("sym:3"), Quasiaction.trivial(G2, builtin("sym:3")), 1)
    aut = automorphism_group(G3)
    L = Quasiaction.from_indices(G3, aut, [0, 1, 0])
    with pytest.raises(NotAnAction):
        abelian_oracle(G3, G3, L, 1)


def test_budget():
    with pytest.raises(BudgetExceeded):
        cocycle_census(G4, G4, 2, "trivial", budget=10)


@pytest.mark.parametrize("g,n,p", [("cyclic:2", "sym:3", 2), ("klein", "cyclic:2", 2), ("cyclic:3", "cyclic:3", 1)])
def test_sharding_does_not_change_results(g, n, p):
    a = cocycle_census(builtin(g), builtin(n), p, "all", shards=1).dumps()
    b = cocycle_census(builtin(g), builtin(n), p, "all", shards=4).dumps()
    assert a == b


def test_report_formats():
    r = cocycle_census(G2, G2, 2, "trivial")
    data = json.loads(r.dumps())
    assert data["Z2"] == 2 and data["H2"] == 2
    lines = r.to_tsv().strip().split("\n")
    assert lines[0].split("\t")[:2] == ["position", "L"]
    assert len(lines) == 2


def test_strata_partition_cocycles():
    r = cocycle_census(G2, builtin("sym:3"), 2, "all")
    for f in r.fibers:
        assert sum(c for c, _ in f.strata.values()) == f.cocycles


def test_census_tables_are_cocycles():
    from parityc.census import cocycles_of
    for L in all_quasiactions("cyclic:2", "sym:3"):
        for f in cocycles_of(L.G, L.N, L, 2):
            assert is_cocycle(f)


def test_weak_classes_merge_fibers():
    r = weak_classes(G2, G3, 1)
    assert r["classes"] >= 1
    assert r["classes"] <= sum(f.classes for f in cocycle_census(G2, G3, 1, "all").fibers)


@given(st.integers(0, 2**31), st.text(max_size=8))
def test_instance_rng_is_reproducible(seed, key):
    a = instance_rng(seed, key).integers(0, 1000, 5)
    b = instance_rng(seed, key).integers(0, 1000, 5)
    assert np.array_equal(a, b)
