"""Extra charts used by several test modules, beyond the built-in examples."""

from metallic.manifold import from_strings

S5 = "sqrt(5)"
EUCLID3 = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]


def helix():
    """Euclidean 3-space, golden projector onto a direction turning with z (N != 0)."""
    J = [[f"(1-{S5})/2 + {S5}*cos(z)^2", f"{S5}*cos(z)*sin(z)", "0"],
         [f"{S5}*cos(z)*sin(z)", f"(1-{S5})/2 + {S5}*sin(z)^2", "0"],
         ["0", "0", f"(1-{S5})/2"]]
    return from_strings("helix", ["x", "y", "z"], EUCLID3, J, 1, 1, [[-1, 1]] * 3)


def twisted_norden():
    """Neutral plane with a non-constant Norden structure, (p, q) = (0, -1)."""
    a = "sin(x*y)"
    r = f"sqrt(1 + {a}^2)"
    return from_strings("twisted", ["x", "y"], [["1", "0"], ["0", "-1"]],
                        [[a, r], [f"-{r}", f"-{a}"]], 0, -1, [[-1, 1], [-1, 1]])


def sphere_trivial():
    """Curved base with the parallel structure phi I."""
    return from_strings("sphere_phi", ["u", "v"], [["1", "0"], ["0", "sin(u)^2"]],
                        [["1.6180339887498949", "0"], ["0", "1.6180339887498949"]], 1, 1,
                        [[0.5, 1.0], [0, 1]])


def product_structure():
    """Euclidean plane with J = diag(1, -1) bent by a coordinate-dependent metric."""
    return from_strings("warped", ["x", "y"], [["1 + x^2", "0"], ["0", "exp(x)"]],
                        [["1", "0"], ["0", "-1"]], 0, 1, [[-1, 1], [-1, 1]])
