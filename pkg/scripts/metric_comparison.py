"""Report how the closed-form lifted metric tables relate to the pullbacks of
the two generalized metrics, for every built-in example.

    python3 scripts/metric_comparison.py
"""

from metallic import builtin, lifts


def main():
    for eid in builtin.example_ids():
        M = builtin.load_example(eid)
        for c in lifts.metric_pullback_comparison(M):
            pulls = ", ".join(f"{k}: compat={c.pullback_compatibility[k]:.1e} "
                              f"|table-pullback|={c.table_minus_pullback[k]:.3g} "
                              f"vertical ratio={c.vertical_ratio[k]:.4g}"
                              for k in sorted(c.pullback_compatibility))
            print(f"{eid} d={M.discriminant:g} {c.kind:<9} table compat="
                  f"{c.table_compatibility:.1e} | {pulls}")


if __name__ == "__main__":
    main()
