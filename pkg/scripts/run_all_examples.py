"""Run every suite on every built-in example and print the summary.

Equivalent to ``metallic run --example all``; extra arguments are passed on.

    python3 scripts/run_all_examples.py [--samples N] [--format json] ...
"""

import sys

from metallic.cli import main

if __name__ == "__main__":
    sys.exit(main(["run", "--example", "all"] + sys.argv[1:]))
