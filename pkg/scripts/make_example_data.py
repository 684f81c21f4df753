#!/usr/bin/env python3
"""Generate an example design/response CSV pair for the `dirfdr run` command.

Writes data/design.csv (headerless, rows = observations) and
data/response.csv (single column) so that configs/run_knockoff.json works
out of the box:

    python3 scripts/make_example_data.py
    dirfdr run --config configs/run_knockoff.json --out results/
"""

import argparse
import os

import numpy as np

from dirfdr.simulate import CoefSpec, DesignSpec, gen_coefficients, gen_design, gen_response


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--p", type=int, default=600)
    parser.add_argument("--rho", type=float, default=0.3)
    parser.add_argument("--k0", type=int, default=8, help="strong signals")
    parser.add_argument("--k1", type=int, default=20, help="weak signals")
    parser.add_argument("--sigma", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    design = gen_design(DesignSpec(kind="ar", n=args.n, p=args.p, rho=args.rho),
                        seed=args.seed)
    truth = gen_coefficients(CoefSpec(k0=args.k0, k1=args.k1, seed=args.seed),
                             p=args.p)
    y = gen_response(design, truth.beta, sigma=args.sigma, seed=args.seed + 1)

    os.makedirs(args.out, exist_ok=True)
    np.savetxt(os.path.join(args.out, "design.csv"), design.values,
               delimiter=",", fmt="%.12g")
    np.savetxt(os.path.join(args.out, "response.csv"), y.values,
               delimiter=",", fmt="%.12g")
    np.savetxt(os.path.join(args.out, "true_signs.csv"),
               np.sign(truth.beta), delimiter=",", fmt="%d")
    print(f"wrote design ({args.n}x{args.p}), response, and true signs to {args.out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
