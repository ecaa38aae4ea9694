"""Lattice-sum error against the continuum kernels as the grid is refined.

For each resolution K (1/dk^2 = K^2 + 1/2) prints the relative error of the
lattice f_N at a few x and of the lattice normalisation, and writes a CSV.

    python scripts/oracle_convergence.py --eb-ratio 1e-2 --d-ratio 0.1
"""

import argparse
import csv
import math
from pathlib import Path

from kondo_entanglement import kernels, oracle
from kondo_entanglement.model import make_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eb-ratio", type=float, default=1e-2)
    ap.add_argument("--d-ratio", type=float, default=0.1)
    ap.add_argument("--resolutions", default="50,100,200,400,800")
    ap.add_argument("--out", default="results/oracle_convergence.csv")
    args = ap.parse_args()

    params = make_params(args.eb_ratio, args.d_ratio)
    xs = [0.0, 1.0, math.pi, 10.0]
    header = ["resolution", "dk"] + [f"f_n({x:.4g})" for x in xs] + ["norm", "norm_paper_literal"]
    y_literal = kernels.y_integral(params.with_mode("paper-literal"))
    rows = []
    for k in (int(v) for v in args.resolutions.split(",")):
        spec = oracle.LatticeSpec.from_resolution(k, params.d_ratio)
        errs = [abs(oracle.lattice_f_n(x, params, spec) / kernels.f_n(x, params) - 1) for x in xs]
        lat_norm = oracle.lattice_norm(params, spec)
        errs.append(abs(lat_norm / kernels.y_integral(params) - 1))
        errs.append(abs(lat_norm / y_literal - 1))
        rows.append([k, spec.dk] + errs)
        print(" ".join(f"{v:11.3e}" if isinstance(v, float) else f"{v:6d}" for v in rows[-1]))

    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows([[format(v, ".17g") if isinstance(v, float) else v for v in r] for r in rows])


if __name__ == "__main__":
    main()
