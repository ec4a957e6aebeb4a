"""Sweep the horizon and print how slowly the log-density extremes of the block set close in.

    python scripts/log_density_sweep.py --max-exponent 256
"""
import argparse

from densitylab.density import estimate_alpha_density
from densitylab.setexpr import Blocks


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-exponent", type=int, default=256)
    ap.add_argument("--alpha", type=float, default=-1.0)
    args = ap.parse_args()
    a = Blocks(2, 2, (0,))
    print("exponent,liminf,limsup,spread,exists")
    for e in [k for k in (12, 16, 20, 24, 28, 32, 64, 128, 256, 512) if k <= args.max_exponent]:
        est = estimate_alpha_density(a, args.alpha, 2**e)
        print(f"{e},{est.liminf_est:.6f},{est.limsup_est:.6f},{est.limsup_est - est.liminf_est:.6f},{est.exists}")


if __name__ == "__main__":
    main()
