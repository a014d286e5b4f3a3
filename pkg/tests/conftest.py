import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from parityc.census import enumerate_quasiactions, solve_cocycles, to_shape
from parityc.cochains import Cochain, Quasiaction
from parityc.groups import automorphism_group, builtin

settings.register_profile("parityc", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("parityc")

SMALL = ["trivial", "cyclic:2", "cyclic:3", "cyclic:4", "klein"]
CATALOG = SMALL + ["sym:3", "dihedral:4", "quat:8"]
PAIRS = [(g, n) for g in SMALL for n in SMALL] + [("cyclic:2", "sym:3"), ("cyclic:3", "sym:3")]

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture
def record():
    def _record(k, ok, text):
        ACCEPTANCE[k] = (bool(ok), text)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {text}")
    return _record


@st.composite
def quasiactions(draw, pairs=PAIRS):
    g, n = draw(st.sampled_from(pairs))
    G, N = builtin(g), builtin(n)
    aut = automorphism_group(N)
    idx = [0] + [draw(st.integers(0, aut.order - 1)) for _ in range(G.order - 1)]
    return Quasiaction.from_indices(G, aut, idx)


@st.composite
def cochains(draw, p, pairs=PAIRS):
    L = draw(quasiactions(pairs))
    G, N = L.G, L.N
    t = np.array(draw(st.lists(st.integers(0, N.order - 1), min_size=G.order ** p,
                               max_size=G.order ** p)), dtype=np.intp).reshape((G.order,) * p)
    for axis in range(p):
        idx = [slice(None)] * p
        idx[axis] = 0
        t[tuple(idx)] = 0
    return Cochain(p, L, t)


@st.composite
def cocycles(draw, pairs=PAIRS, p=2):
    """A uniformly chosen cocycle of a drawn fiber (fibers without cocycles beyond 1 are fine)."""
    L = draw(quasiactions(pairs))
    Z, _ = solve_cocycles(L.G, L.N, L, p)
    row = Z[draw(st.integers(0, len(Z) - 1))]
    return Cochain(p, L, to_shape(row, L.G, p))


def all_quasiactions(g, n):
    G, N = builtin(g), builtin(n)
    return enumerate_quasiactions(G, N, automorphism_group(N))
