"""Walk through the b = (9, 18) decomposition step by step."""

from fourblock import cones
from fourblock.acceptance import worked_example
from fourblock.decomposition import build_scheme, decompose
from fourblock.exactmath import columns, format_rational


def main():
    bases = cones.enumerate_bases(2, 1)
    U = cones.generating_bases((9, 18), bases)
    cone_sets = sorted({tuple(sorted(columns(M))) for M in U})
    print(f"{len(bases.bases)} bases of [-1,1]^2, {len(cone_sets)} generating bases (as column sets):")
    for cols in cone_sets:
        print("   ", cols)
    info = worked_example()
    print("Psi =", info["psi"], " generators =", sorted(info["generators"]))

    scheme = build_scheme(2, 1, t_dec=2, modulus=4)
    amap, mult = decompose(scheme, (9, 18))
    print("residue r =", amap.r, " S =", amap.S,
          " gamma =", [format_rational(g) for g in amap.gamma])
    names = ["q"] + [f"w{i}" for i in range(1, len(amap.support))]
    for name, vec, k in zip(names, amap.support, mult):
        print(f"   {name} = {vec}  x {k}")
    print(f"uniform modulus for this scheme would be {scheme.uniform_M}; the example uses {scheme.M}")


if __name__ == "__main__":
    main()
