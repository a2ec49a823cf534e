"""Command-line interface.

Examples::

    bottleneck-flow classify --profile cosine:a=0.3,b=1.5 --alpha 0.3 --beta 0.6
    bottleneck-flow solve --profile cosine:a=0.3,b=1.5 --alpha 0.1 --beta 0.4 --eps 1e-3 --out rho.csv
    bottleneck-flow converge --alpha 0.3 --beta 0.8 --eps-list 8e-3,4e-3,2e-3,1e-3

Exit status is 0 on success, 1 on domain or convergence errors (message on
stderr) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, io
from .atlas import classify
from .bvp import SolverOptions, solve
from .errors import BottleneckError, DegenerateParameters
from .singular import build_singular, sample_profile
from .slowfast import canard_data, canard_records, folded_saddle_check
from .width import format_profile, parse_profile, validate_default

DEFAULT_PROFILE = "cosine:a=0.3,b=1.5"
COMMANDS = ("validate-k", "classify", "singular", "solve", "sweep", "flux-map", "converge")

# flag name -> converter, used for both the command line and the config file
_NUMERIC = {"alpha": float, "beta": float, "eps": float, "grid": int, "mesh": int}


class UsageError(Exception):
    pass


def _eps_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --eps-list {text!r}") from None
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", help=f"width profile spec (default {DEFAULT_PROFILE})")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--config", help="key=value file with defaults for any flag")
    for name, conv in _NUMERIC.items():
        common.add_argument(f"--{name}", type=conv)
    common.add_argument("--eps-list", dest="eps_list")

    parser = argparse.ArgumentParser(prog="bottleneck-flow", description="Stationary corridor profiles with a bottleneck.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def read_config(path) -> dict:
    """Parse a key=value text file; '#' starts a comment, dashes and underscores are equivalent."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    try:
        cfg = read_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for key, raw in cfg.items():
        if key in ("command", "config") or not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key) is not None:
            continue  # flags override the config file
        conv = _NUMERIC.get(key, str)
        try:
            setattr(args, key, conv(raw))
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.command} requires " + ", ".join(f"--{n}" for n in missing))


def _setup(args):
    profile = parse_profile(args.profile or DEFAULT_PROFILE)
    info = validate_default(profile)
    return profile, info, canard_data(profile, info)


def _options(args) -> SolverOptions:
    return SolverOptions(mesh_size=args.mesh)


def _emit(args, records=None, payload=None, stdout=sys.stdout):
    """Write records as CSV or payload as JSON according to --format."""
    fmt = args.format or ("csv" if records is not None else "json")
    if fmt == "csv" and records is not None:
        text = io.records_to_csv(records)
    else:
        text = io.to_json(payload if payload is not None else records)
    io.write_text(text, args.out, stdout)


def _sidecar(args, payload):
    if args.out and (args.format or "csv") == "csv":
        io.write_text(io.to_json(payload), str(args.out) + ".json")


# -- subcommands ---------------------------------------------------------------


def cmd_validate_k(args, stdout):
    profile, info, canard = _setup(args)
    payload = {
        "profile": format_profile(profile),
        "xi_star": info.xi_star,
        "k_min": info.k_min,
        "k0": info.k0,
        "k1": info.k1,
        "g_prime_at_star": info.g_prime_at_star,
        "nondegenerate": info.nondegenerate,
        "canard_level": info.canard_level,
        "rho_c0": canard.rho_c0,
        "rho_c1": canard.rho_c1,
        "folded_saddle": folded_saddle_check(canard),
    }
    if args.format == "csv":
        # the sampled canard branches; the scalar summary goes to the sidecar
        _emit(args, records=canard_records(canard), stdout=stdout)
        _sidecar(args, payload)
    else:
        _emit(args, payload=payload, stdout=stdout)


def cmd_classify(args, stdout):
    _require(args, "alpha", "beta")
    profile, _, canard = _setup(args)
    label = classify(args.alpha, args.beta, profile, canard)
    rec = {"alpha": args.alpha, "beta": args.beta, "label": label.name, "kind": label.kind}
    if (args.format or "json") == "json":
        _emit(args, payload=dict(rec, margins=label.margins), stdout=stdout)
    else:
        _emit(args, records=[rec], stdout=stdout)


def cmd_singular(args, stdout):
    _require(args, "alpha", "beta")
    profile, _, canard = _setup(args)
    label = classify(args.alpha, args.beta, profile, canard)
    orbit = build_singular(args.alpha, args.beta, profile, canard, label)
    x, rho, pieces = sample_profile(orbit)
    records = [{"x": a, "rho": r, "piece": p} for a, r, p in zip(x, rho, pieces)]
    if args.format == "json":
        _emit(args, payload=dict(orbit.as_dict(), x=x, rho=rho, piece=pieces), stdout=stdout)
    else:
        _emit(args, records=records, stdout=stdout)
        _sidecar(args, orbit.as_dict())


def cmd_solve(args, stdout):
    _require(args, "alpha", "beta", "eps")
    profile, _, _ = _setup(args)
    sol = solve(profile, args.alpha, args.beta, args.eps, _options(args))
    meta = dict(sol.metadata(), profile=format_profile(profile), mesh_cells=sol.mesh.size - 1, continuation=list(sol.continuation_trace))
    if args.format == "json":
        _emit(args, payload=dict(meta, x=sol.mesh, rho=sol.rho), stdout=stdout)
    else:
        _emit(args, records=[{"x": a, "rho": r} for a, r in zip(sol.mesh, sol.rho)], stdout=stdout)
        _sidecar(args, meta)


def _sweep_records(table: analysis.SweepTable, with_eps: bool):
    out = []
    for c in table.cells:
        rec = {"alpha": c.alpha, "beta": c.beta, "region": c.region, "flux_singular": c.flux_singular}
        if with_eps:
            rec["flux_eps"] = c.flux_eps
            for x, v in zip(analysis.FINGERPRINT_X, c.fingerprint or (None,) * 5):
                rec[f"rho_{x:g}"] = v
            rec["error"] = c.error
        out.append(rec)
    return out


def cmd_sweep(args, stdout):
    _require(args, "grid")
    profile, _, _ = _setup(args)
    table = analysis.sweep(profile, args.grid, args.eps, _options(args))
    _emit(args, records=_sweep_records(table, args.eps is not None), stdout=stdout)


def cmd_flux_map(args, stdout):
    _require(args, "grid")
    profile, info, canard = _setup(args)
    table = analysis.sweep(profile, args.grid)
    records = []
    for c in table.cells:
        j1 = analysis.flux_unit_width(c.alpha, c.beta)
        records.append(
            {
                "alpha": c.alpha,
                "beta": c.beta,
                "region": c.region,
                "flux_singular": c.flux_singular,
                "flux_unit_width": j1,
                "min_identity": min(j1, info.k_min / 4.0),
            }
        )
    _emit(args, records=records, stdout=stdout)


def cmd_converge(args, stdout):
    _require(args, "alpha", "beta")
    eps = _eps_list(args.eps_list) if args.eps_list else list(analysis.DEFAULT_EPS_LIST)
    profile, _, _ = _setup(args)
    rep = analysis.convergence_rate(profile, args.alpha, args.beta, eps, _options(args))
    summary = rep.summary()
    if args.format == "json":
        _emit(args, payload=dict(summary, eps=rep.eps, distance=rep.distances, flux=rep.fluxes), stdout=stdout)
    else:
        _emit(args, records=[{"eps": e, "distance": d} for e, d in rep.pairs], stdout=stdout)
        _sidecar(args, summary)


HANDLERS = {
    "validate-k": cmd_validate_k,
    "classify": cmd_classify,
    "singular": cmd_singular,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "flux-map": cmd_flux_map,
    "converge": cmd_converge,
}


def cli_main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = merge_config(args)
        HANDLERS[args.command](args, stdout)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except DegenerateParameters as exc:
        print(f"error: {exc} (degenerate parameters)", file=stderr)
        return 1
    except BottleneckError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    return 0


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
