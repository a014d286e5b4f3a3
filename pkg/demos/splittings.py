"""Count splittings of small split extensions and compare with H1."""
from parityc.extensions import NoSplittingFound, classify_splittings, find_normal_subgroup
from parityc.groups import builtin

cases = [("sym:3", "cyclic:3"), ("klein", "cyclic:2"), ("dihedral:4", "cyclic:4"), ("cyclic:4", "cyclic:2")]
for e, n in cases:
    E = builtin(e)
    N = find_normal_subgroup(E, builtin(n))
    try:
        r = classify_splittings(E, N)
    except NoSplittingFound:
        print(f"{e} over {n}: no splitting")
        continue
    print(f"{e} over {n}: {r['splittings']} splittings, {r['classes']} classes, |H1| = {r['H1']}")
