"""Metallic structures on coordinate charts: symbolic fields, connections,
generalized structures on TM + T*M, bundle lifts and a batch checker."""

from .builtin import example_ids, load_example
from .core import MetallicParams, metallic_number
from .expr import differentiate, evaluate, parse, simplify, to_string
from .lifts import build_cotangent_lift, build_tangent_lift
from .manifold import ChartManifold, CheckReport, from_strings, load_manifest

__all__ = [
    "ChartManifold",
    "CheckReport",
    "MetallicParams",
    "build_cotangent_lift",
    "build_tangent_lift",
    "differentiate",
    "evaluate",
    "example_ids",
    "from_strings",
    "load_example",
    "load_manifest",
    "metallic_number",
    "parse",
    "simplify",
    "to_string",
]
