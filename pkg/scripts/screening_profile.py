"""Normalised screening-cloud profile f_N(x)/f_N(0) for a few binding energies.

Writes one CSV per eb into the output directory, ready for plotting.

    python scripts/screening_profile.py --out results/profile --d-ratio 0.1
"""

import argparse
from pathlib import Path

from kondo_entanglement import cli
from kondo_entanglement.model import derive_scales, make_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eb-list", type=cli.float_list, default=[1e-2, 1e-3, 1e-4])
    ap.add_argument("--d-ratio", type=float, default=0.1)
    ap.add_argument("--span-xi", type=float, default=3.0, help="x range in units of xi_K k_F")
    ap.add_argument("--points", type=int, default=1000)
    ap.add_argument("--out", default="results/profile")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for eb in args.eb_list:
        params = make_params(eb, args.d_ratio)
        x_max = args.span_xi * derive_scales(params).xi_k
        config = cli.SweepConfig(params, 0.0, x_max, args.points)
        prof = cli.run_profile(config)
        path = out / f"profile_eb{eb:g}_d{args.d_ratio:g}.csv"
        path.write_text(cli.profile_text(prof, config))
        print(f"{path}: max condition {prof.cond_lhs.max():.4g}")


if __name__ == "__main__":
    main()
