"""Which normalized functions Z2 -> Z4 give strict monoidal functors of fiber categories."""
from parityc.categorify import functor_of_function
from parityc.groups import builtin

G, N = builtin("cyclic:2"), builtin("cyclic:4")
for x in range(N.order):
    F, r = functor_of_function(G, N, [0, x])
    phi = F.target.lab[F.structure[1, 1]]
    print(f"s(a) = r^{x}: Phi(a,a) label r^{phi}, strict {r['strict']}, homomorphism {r['s_is_morphism']}")
