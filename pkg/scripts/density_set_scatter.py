"""Write (ld, ud) points of random subsets to CSV, with the line y = lambda x for reference.

    python scripts/density_set_scatter.py "blocks(2,2,on=[0])" --num 200 --out points.csv
"""
import argparse
import sys
from pathlib import Path

from densitylab.parse import parse_set_expr
from densitylab.polya import density_set_csv, density_set_line_check, density_set_sample, gap_density


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("expr")
    ap.add_argument("--num", type=int, default=100)
    ap.add_argument("--horizon", type=int, default=1 << 20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    e = parse_set_expr(args.expr)
    pts = density_set_sample(e, args.num, args.horizon, args.seed)
    text = density_set_csv(pts)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    lam = gap_density(e, min(args.horizon, 1 << 22))
    rep = density_set_line_check(pts, lam)
    worst = min((r["margin"] for r in rep.rows), default=float("nan"))
    print(f"lambda = {lam:.6f}; worst margin ud - lambda*ld = {worst:.4f}; above line: {rep.passed}", file=sys.stderr)


if __name__ == "__main__":
    main()
