"""Built-in example charts E1-E4."""

from .manifold import ChartManifold, manifest_from_dict

PHI = "1.6180339887498949"
PHI_CONJ = "-0.6180339887498949"

# theta(x, y) sets the direction of the golden projector in E2
_THETA = "(x*y + x/2)"

MANIFESTS = {
    "E1": {
        "name": "E1",
        "dim": 2,
        "coords": ["x", "y"],
        "p": 2,
        "q": -2,
        "domain": [[-1, 1], [-1, 1]],
        "g": [["1", "0"], ["0", "-1"]],
        "J": [["1", "1"], ["-1", "1"]],
    },
    "E2": {
        "name": "E2",
        "dim": 2,
        "coords": ["x", "y"],
        "p": 1,
        "q": 1,
        "domain": [[-1, 1], [-1, 1]],
        "g": [["1", "0"], ["0", "1"]],
        "J": [[f"(1-sqrt(5))/2 + sqrt(5)*cos{_THETA}^2", f"sqrt(5)*cos{_THETA}*sin{_THETA}"],
              [f"sqrt(5)*cos{_THETA}*sin{_THETA}", f"(1-sqrt(5))/2 + sqrt(5)*sin{_THETA}^2"]],
    },
    "E3": {
        "name": "E3",
        "dim": 2,
        "coords": ["u", "v"],
        "p": 1,
        "q": 1,
        "domain": [[1, 2], [0, 1]],
        "g": [["1", "0"], ["0", "u^2"]],
        "J": [[PHI, "0"], ["0", PHI]],
    },
    "E4": {
        "name": "E4",
        "dim": 2,
        "coords": ["u", "v"],
        "p": 1,
        "q": 1,
        "domain": [[0.5, 1.0], [0, 1]],
        "g": [["1", "0"], ["0", "sin(u)^2"]],
        "J": [[PHI, "0"], ["0", PHI_CONJ]],
    },
}

DESCRIPTIONS = {
    "E1": "flat neutral plane, constant J = J_N + I with J^2 = 2J - 2I",
    "E2": "Euclidean plane, golden projector structure with rotating eigenframe",
    "E3": "flat plane in polar-like coordinates g = diag(1, u^2), trivial J = phi I",
    "E4": "unit sphere patch g = diag(1, sin(u)^2), constant diagonal golden J",
}


def example_ids():
    return sorted(MANIFESTS)


def load_example(example_id: str) -> ChartManifold:
    try:
        data = MANIFESTS[example_id]
    except KeyError:
        raise KeyError(f"unknown example {example_id!r}; choose from {example_ids()}") from None
    return manifest_from_dict(data)
