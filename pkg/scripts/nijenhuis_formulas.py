"""Compare the closed-form and frame-derived Nijenhuis families of the lifts
with the brute-force tensor of the lifted chart.

    python3 scripts/nijenhuis_formulas.py [--samples N] [--seed S]
"""

import argparse

from metallic import builtin, lifts
from metallic.manifold import from_strings

PHI = "1.6180339887498949"


def sphere_trivial():
    return from_strings("sphere_phi", ["u", "v"], [["1", "0"], ["0", "sin(u)^2"]],
                        [[PHI, "0"], ["0", PHI]], 1, 1, [[0.5, 1.0], [0, 1]])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    charts = [builtin.load_example(eid) for eid in builtin.example_ids()] + [sphere_trivial()]
    print(f"{'chart':<11}{'lift':<11}{'family':<15}{'closed form':>13}{'derived':>13}")
    for M in charts:
        for kind in (lifts.TANGENT, lifts.COTANGENT):
            L = lifts.build_lift(M, kind)
            s = L.sample(args.samples, args.seed)
            printed = lifts.check_nijenhuis_tables(L, s)
            derived = lifts.check_nijenhuis_derived(L, s)
            for a, b in zip(printed, derived):
                fam = a.check_id.rsplit(".", 1)[1]
                print(f"{M.name:<11}{kind:<11}{fam:<15}{a.max_abs_err:>13.3e}{b.max_abs_err:>13.3e}")


if __name__ == "__main__":
    main()
