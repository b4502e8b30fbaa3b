"""Write the tangent and cotangent lifts of the built-in examples as JSON
manifests that ``metallic run --input`` accepts.

    python3 scripts/export_lifts.py OUTDIR
"""

import argparse
import pathlib

from metallic import builtin, lifts
from metallic.manifold import dump_manifest


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", type=pathlib.Path)
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for eid in builtin.example_ids():
        M = builtin.load_example(eid)
        for kind, tag in ((lifts.TANGENT, "TM"), (lifts.COTANGENT, "TstarM")):
            path = args.outdir / f"{eid}_{tag}.json"
            path.write_text(dump_manifest(lifts.build_lift(M, kind).chart) + "\n")
            print(path)


if __name__ == "__main__":
    main()
