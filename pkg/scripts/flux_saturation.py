"""Flux through supergaussian necks of decreasing width at alpha = beta = 0.5.

Compares the eps-flux with w_m / 4 and reports the transitional area
fraction (regions G3..G6) for each neck width.

Usage::

    python3 scripts/flux_saturation.py --widths 0.9,0.7,0.5 --eps 1e-3
"""
import argparse
import sys

from bottleneck_flow import WidthProfile, solve
from bottleneck_flow.analysis import transitional_fraction
from bottleneck_flow.io import records_to_csv, write_text


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--widths", default="0.9,0.7,0.5")
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--we", type=float, default=1.0, help="width away from the neck")
    ap.add_argument("--d", type=float, default=0.2, help="neck length")
    ap.add_argument("--xi0", type=float, default=0.6, help="neck centre")
    ap.add_argument("--grid", type=int, default=50)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    rows = []
    for wm in (float(w) for w in args.widths.split(",")):
        profile = WidthProfile.supergaussian(args.we, wm, args.d, args.xi0)
        sol = solve(profile, 0.5, 0.5, args.eps)
        rows.append(
            {
                "w_m": wm,
                "flux_eps": sol.flux,
                "saturation": wm / 4,
                "rel_error": abs(sol.flux - wm / 4) / (wm / 4),
                "transitional_fraction_grid": transitional_fraction(profile, args.grid),
                "transitional_fraction_exact": transitional_fraction(profile),
            }
        )
    write_text(records_to_csv(rows), args.out, sys.stdout)


if __name__ == "__main__":
    main()
