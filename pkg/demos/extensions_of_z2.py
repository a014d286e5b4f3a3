"""Walk through the 2-cocycles of Z2 with values in Z2 and the groups they build."""
from parityc.census import cocycle_census
from parityc.cochains import Cochain, Quasiaction
from parityc.extensions import build_quasi_extension, canonical_roundtrip, iso_profile
from parityc.groups import builtin

G = N = builtin("cyclic:2")
L = Quasiaction.trivial(G, N)

rep = cocycle_census(G, N, 2, L)
fib = rep.fibers[0]
print(f"Z2 cocycles: {fib.cocycles}, classes: {fib.classes}")

for f_aa in (0, 1):
    f = Cochain(2, L, [[0, 0], [0, f_aa]])
    E = build_quasi_extension(f, "full").as_group()
    rt = canonical_roundtrip(f, "full")
    # [1, 1, 2] is Z4, [1, 3] the Klein group
    print(f"f(a,a) = {f_aa}: order profile {iso_profile(E)}, round trip exact: {rt['exact']}")
