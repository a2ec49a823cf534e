"""Hausdorff convergence rates for one (alpha, beta) pair per region.

Usage::

    python3 scripts/convergence_study.py --out rates.csv
    python3 scripts/convergence_study.py --pairs 0.3,0.8 0.9,0.6 --eps-list 8e-3,4e-3,2e-3,1e-3
"""
import argparse
import sys

from bottleneck_flow import convergence_rate, parse_profile
from bottleneck_flow.analysis import DEFAULT_EPS_LIST
from bottleneck_flow.io import records_to_csv, write_text

DEFAULT_PAIRS = ["0.1,0.4", "0.1,0.9", "0.3,0.6", "0.3,0.8", "0.9,0.6", "0.9,0.8", "0.7,0.2", "0.9,0.2"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--profile", default="cosine:a=0.3,b=1.5")
    ap.add_argument("--pairs", nargs="+", default=DEFAULT_PAIRS, help="alpha,beta pairs")
    ap.add_argument("--eps-list", default=",".join(map(str, DEFAULT_EPS_LIST)))
    ap.add_argument("--out", help="CSV file (default: stdout)")
    args = ap.parse_args(argv)

    profile = parse_profile(args.profile)
    eps = [float(e) for e in args.eps_list.split(",")]
    rows = []
    for pair in args.pairs:
        a, b = (float(v) for v in pair.split(","))
        rep = convergence_rate(profile, a, b, eps)
        row = rep.summary()
        row.update({f"d_{e:g}": d for e, d in rep.pairs})
        rows.append(row)
        print(f"{rep.label} ({a}, {b}): mu_hat={rep.mu_hat:.3f} expected={rep.expected_mu} r2={rep.r_squared:.4f}", file=sys.stderr)
    write_text(records_to_csv(rows), args.out, sys.stdout)


if __name__ == "__main__":
    main()
