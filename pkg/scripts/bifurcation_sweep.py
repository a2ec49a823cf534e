"""Region diagram of the (alpha, beta) square, optionally with eps-solutions per cell.

Usage::

    python3 scripts/bifurcation_sweep.py --grid 50 --out diagram.csv
    python3 scripts/bifurcation_sweep.py --grid 20 --eps 1e-3 --workers 4 --out diagram_eps.csv
"""
import argparse
import sys

from bottleneck_flow import parse_profile, sweep
from bottleneck_flow.analysis import FINGERPRINT_X
from bottleneck_flow.io import records_to_csv, write_text


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--profile", default="cosine:a=0.3,b=1.5")
    ap.add_argument("--grid", type=int, default=50)
    ap.add_argument("--eps", type=float)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    table = sweep(parse_profile(args.profile), args.grid, args.eps, workers=args.workers)
    rows = []
    for c in table.cells:
        row = {"alpha": c.alpha, "beta": c.beta, "region": c.region, "flux_singular": c.flux_singular}
        if args.eps is not None:
            row["flux_eps"] = c.flux_eps
            row.update({f"rho_{x:g}": v for x, v in zip(FINGERPRINT_X, c.fingerprint or (None,) * len(FINGERPRINT_X))})
            row["error"] = c.error
        rows.append(row)
    counts = table.region_counts()
    print(" ".join(f"{k}={counts[k]}" for k in sorted(counts)), file=sys.stderr)
    write_text(records_to_csv(rows), args.out, sys.stdout)


if __name__ == "__main__":
    main()
