"""Largest entanglement-condition value over x on an (eb, d) grid.

    python scripts/separability_scan.py --points 1000 --jobs 4
"""

import argparse
from pathlib import Path

from kondo_entanglement import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eb-list", type=cli.float_list, default=list(cli.DEFAULT_SCAN_EB))
    ap.add_argument("--d-list", type=cli.float_list, default=list(cli.DEFAULT_SCAN_D))
    ap.add_argument("--x-max-xi", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=1000)
    ap.add_argument("--cutoff-mode", default="derived")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/scan.json")
    args = ap.parse_args()

    result = cli.run_scan(args.eb_list, args.d_list, points=args.points, cutoff_mode=args.cutoff_mode,
                          x_max_xi=args.x_max_xi, jobs=args.jobs)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(cli.scan_text(result, cli.OutputFormat.JSON))
    print(f"{'eb':>8} {'d':>6} {'max cond':>10} {'at x':>10}")
    for pt in result.points:
        print(f"{pt.eb_ratio:8.0e} {pt.d_ratio:6.2f} {pt.max_condition_lhs:10.4g} {pt.x_at_max:10.4g}")
    print(f"global max {result.global_max:.4g}; entangled anywhere: {result.any_entangled}")


if __name__ == "__main__":
    main()
