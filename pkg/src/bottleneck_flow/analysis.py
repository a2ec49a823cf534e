"""Convergence-rate studies, parameter sweeps and flux maps."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .atlas import classify, transitional_area
from .bvp import EpsSolution, SolverOptions, continuation_solve, solve
from .errors import BottleneckError, DimensionMismatch, DomainError
from .singular import SingularOrbit, build_singular, flux_singular, orbit_polyline
from .slowfast import canard_data
from .width import WidthProfile, validate_default

FINGERPRINT_X = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_EPS_LIST = (8e-3, 4e-3, 2e-3, 1e-3)


def resample_polyline(vertices: np.ndarray, spacing: float) -> np.ndarray:
    """Points along a polyline with arclength gaps of at most ``spacing``."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise DimensionMismatch(f"expected (m, 2) vertices, got {v.shape}")
    seg = np.diff(v, axis=0)
    length = np.hypot(seg[:, 0], seg[:, 1])
    pieces = [v[:1]]
    for p, d, L in zip(v[:-1], seg, length):
        k = max(1, int(math.ceil(L / spacing)))
        t = np.arange(1, k + 1)[:, None] / k
        pieces.append(p + t * d)
    return np.concatenate(pieces)


def _directed(a: np.ndarray, b: np.ndarray, stride: int) -> float:
    """max over a of the distance to the nearest point of b, pruned through a subset of b.

    Every point of ``b`` lies within ``gap / 2`` of the subset ``b[::stride]``
    (plus the last point), so the subset distance overestimates the true one
    by at most that amount; only points of ``a`` whose subset distance is
    within ``gap / 2`` of the subset maximum can attain the maximum.  The
    result equals the brute-force value.
    """
    if len(b) <= 4 * stride:
        return float(cKDTree(b).query(a)[0].max())
    coarse = np.concatenate([b[::stride], b[-1:]])
    steps = np.hypot(*np.diff(b, axis=0).T)
    slack = 0.5 * stride * float(steps.max())
    d_c = cKDTree(coarse).query(a)[0]
    cand = a[d_c >= d_c.max() - slack]
    return float(cKDTree(b).query(cand)[0].max())


def point_set_hausdorff(a: np.ndarray, b: np.ndarray, stride: int = 64) -> float:
    """Symmetric Hausdorff distance between two finite point sets in the plane.

    ``stride`` only affects speed: points are pruned against every
    ``stride``-th point of the other set, which assumes both sets are ordered
    samples of a curve (consecutive points close together).  The value is
    exact for any ordering.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"point sets {a.shape} and {b.shape}")
    return max(_directed(a, b, stride), _directed(b, a, stride))


def solution_polyline(sol: EpsSolution) -> np.ndarray:
    return np.column_stack([sol.mesh, sol.rho])


def hausdorff_distance(singular: SingularOrbit, eps_sol: EpsSolution, n: int = 400_000) -> float:
    """Hausdorff distance between the singular orbit and an eps-solution in the (x, rho) square.

    Both curves, including the vertical layer segments of the singular
    orbit, are resampled along arclength to about ``n`` points each.
    """
    if (singular.alpha, singular.beta) != (eps_sol.alpha, eps_sol.beta):
        raise DimensionMismatch("orbit and solution belong to different (alpha, beta)")
    a = orbit_polyline(singular)
    b = solution_polyline(eps_sol)
    length = max(_length(a), _length(b))
    spacing = length / n
    return point_set_hausdorff(resample_polyline(a, spacing), resample_polyline(b, spacing))


def _length(v):
    d = np.diff(v, axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


@dataclass(frozen=True)
class ConvergenceReport:
    alpha: float
    beta: float
    label: str
    eps: tuple
    distances: tuple
    mu_hat: float
    r_squared: float
    expected_mu: float
    fluxes: tuple = field(default_factory=tuple)

    @property
    def pairs(self):
        return list(zip(self.eps, self.distances))

    def summary(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "region": self.label,
            "mu_hat": self.mu_hat,
            "expected_mu": self.expected_mu,
            "r_squared": self.r_squared,
        }


def fit_rate(eps, dist) -> tuple[float, float]:
    """Least-squares slope of log(dist) against log(eps) and its R^2."""
    x, y = np.log(np.asarray(eps, float)), np.log(np.asarray(dist, float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), min(max(r2, 0.0), 1.0)


def expected_rate(region_index: int) -> float:
    return 0.5 if 3 <= region_index <= 6 else 1.0


def convergence_rate(profile: WidthProfile, alpha, beta, eps_list=DEFAULT_EPS_LIST, options: SolverOptions = SolverOptions(), n: int = 400_000) -> ConvergenceReport:
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    if len(eps_list) < 4:
        raise DomainError("a rate fit needs at least four eps values")
    info = validate_default(profile)
    canard = canard_data(profile, info)
    label = classify(alpha, beta, profile, canard)
    if not label.is_region:
        raise DomainError(f"rates are only defined inside open regions, got {label.name}")
    orbit = build_singular(alpha, beta, profile, canard, label)
    sols = continuation_solve(profile, alpha, beta, eps_list, options)
    dist = [hausdorff_distance(orbit, s, n) for s in sols]
    mu, r2 = fit_rate(eps_list, dist)
    return ConvergenceReport(
        alpha, beta, label.name, tuple(eps_list), tuple(dist), mu, r2, expected_rate(label.index), tuple(s.flux for s in sols)
    )


# -- sweeps --------------------------------------------------------------------


@dataclass
class SweepCell:
    row: int
    col: int
    alpha: float
    beta: float
    region: str
    flux_singular: float | None = None
    flux_eps: float | None = None
    fingerprint: tuple | None = None
    error: str | None = None


@dataclass
class SweepTable:
    grid_n: int
    epsilon: float | None
    cells: list

    def region_counts(self) -> dict:
        out: dict[str, int] = {}
        for c in self.cells:
            out[c.region] = out.get(c.region, 0) + 1
        return out

    def area_fraction(self, regions) -> float:
        names = {f"G{i}" for i in regions}
        return sum(c.region in names for c in self.cells) / len(self.cells)


def grid_values(grid_n: int) -> np.ndarray:
    """Cell centres of a uniform grid_n partition of (0, 1)."""
    if grid_n < 2:
        raise DomainError("grid_n must be >= 2")
    return (np.arange(grid_n) + 0.5) / grid_n


def _solve_cell(args):
    profile, alpha, beta, eps, options = args
    try:
        sol = solve(profile, alpha, beta, eps, options)
    except BottleneckError as exc:
        return None, None, f"{type(exc).__name__}: {exc}"
    return sol.flux, tuple(float(v) for v in sol.at(FINGERPRINT_X)), None


def sweep(profile: WidthProfile, grid_n: int, epsilon: float | None = None, options: SolverOptions = SolverOptions(), values=None, workers: int | None = None) -> SweepTable:
    """Classify every grid cell; with ``epsilon`` also solve the BVP per cell.

    ``values`` overrides the default cell-centre coordinates (same for alpha
    and beta).  Rows run over beta, columns over alpha.
    """
    vals = grid_values(grid_n) if values is None else np.asarray(values, float)
    info = validate_default(profile)
    canard = canard_data(profile, info)
    cells = []
    for r, beta in enumerate(vals):
        for c, alpha in enumerate(vals):
            label = classify(float(alpha), float(beta), profile, canard)
            cell = SweepCell(r, c, float(alpha), float(beta), label.name)
            if label.is_region:
                cell.flux_singular = flux_singular(alpha, beta, profile, canard, label)
            cells.append(cell)
    if epsilon is not None:
        jobs = [(profile, c.alpha, c.beta, epsilon, options) for c in cells]
        workers = workers if workers is not None else min(len(jobs), os.cpu_count() or 1)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_solve_cell, jobs))
        else:
            results = [_solve_cell(j) for j in jobs]
        # pool.map keeps submission order, so rows/columns stay fixed
        for cell, (flux, fp, err) in zip(cells, results):
            cell.flux_eps, cell.fingerprint, cell.error = flux, fp, err
    return SweepTable(len(vals), epsilon, cells)


def flux_unit_width(alpha, beta) -> float:
    """Singular flux of the straight corridor k = 1."""
    if alpha <= 0.5 and alpha <= beta:
        return alpha * (1.0 - alpha)
    if beta <= 0.5 and beta <= alpha:
        return beta * (1.0 - beta)
    return 0.25


def flux_map(profile: WidthProfile, grid_n: int) -> SweepTable:
    return sweep(profile, grid_n)


def transitional_fraction(profile: WidthProfile, grid_n: int | None = None) -> float:
    """Share of the (alpha, beta) square covered by G3..G6 (exact if ``grid_n`` is None)."""
    info = validate_default(profile)
    canard = canard_data(profile, info)
    if grid_n is None:
        return transitional_area(profile, canard)
    return sweep(profile, grid_n).area_fraction(range(3, 7))
