"""Finite-eps stationary profiles.

Unknowns are the mesh densities rho_0..rho_N and the constant flux J = k j.
On each cell the box (implicit midpoint) scheme gives::

    eps (rho_{i+1} - rho_i) / h_i = m (1 - m) - J / k(x_{i+1/2}),   m = (rho_i + rho_{i+1}) / 2

and the two boundary conditions close the system::

    rho_0 = 1 - J / (alpha k(0)),      rho_N = J / (beta k(1)).

Newton's method on this (N + 2)-dimensional system is continued in eps.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .atlas import classify
from .errors import BottleneckError, DimensionMismatch, DomainError, NoConvergence
from .singular import build_singular
from .slowfast import canard_data
from .width import WidthProfile, eval_k, validate_default

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    mesh_size: int | None = None  # None: max(2000, ceil(20 / eps))
    grading: str = "graded"  # or "uniform"
    grading_ratio: float = 1.05
    newton_tol: float = 1e-10
    max_iterations: int = 50
    min_step: float = 2.0**-20
    eps_start: float = 0.1
    eps_factor: float = 0.5
    initial_guess: str = "singular"  # "singular" | "constant"
    smooth_window: int = 5

    def __post_init__(self):
        if self.mesh_size is not None and self.mesh_size < 100:
            raise DomainError("mesh_size must be >= 100")
        if self.grading not in ("graded", "uniform"):
            raise DomainError(f"unknown grading {self.grading!r}")
        if self.initial_guess not in ("singular", "constant"):
            raise DomainError(f"unknown initial guess {self.initial_guess!r}")
        if not (0.0 < self.eps_factor < 1.0):
            raise DomainError("eps_factor must lie in (0, 1)")


@dataclass(frozen=True)
class EpsSolution:
    epsilon: float
    alpha: float
    beta: float
    mesh: np.ndarray
    rho: np.ndarray
    flux: float
    residual_norm: float
    newton_iterations: int
    continuation_trace: tuple = field(default_factory=tuple)

    def at(self, x):
        return np.interp(x, self.mesh, self.rho)

    def metadata(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "flux": self.flux,
            "residual_norm": self.residual_norm,
            "iterations": self.newton_iterations,
        }


def default_mesh_size(eps: float) -> int:
    return max(2000, math.ceil(20.0 / eps))


def make_mesh(n_cells: int, eps: float, xi_star: float | None, grading: str = "graded", ratio: float = 1.05) -> np.ndarray:
    """Mesh with ``n_cells`` cells on [0, 1].

    The graded mesh starts at h_min = min(eps / 40, 1 / n_cells) at x = 0,
    x = 1 and xi*, lets the cell size grow geometrically (factor ``ratio``
    per cell) away from them, i.e. h(x) = h_min + (ratio - 1) d(x), and caps
    it at the h_max that makes exactly ``n_cells`` cells fit.
    """
    if grading == "uniform" or n_cells < 4:
        return np.linspace(0.0, 1.0, n_cells + 1)
    x = np.linspace(0.0, 1.0, 100001)
    foci = [0.0, 1.0] + ([xi_star] if xi_star is not None else [])
    d = np.min(np.abs(x[:, None] - np.asarray(foci)[None, :]), axis=1)
    h_min = min(eps / 40.0, 1.0 / n_cells)

    def cumulative(h_max):
        dens = 1.0 / np.minimum(h_min + (ratio - 1.0) * d, h_max)
        return np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(x))])

    lo, hi = h_min, 1.0
    if cumulative(hi)[-1] > n_cells:
        return np.linspace(0.0, 1.0, n_cells + 1)
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if cumulative(mid)[-1] > n_cells:
            lo = mid
        else:
            hi = mid
    c = cumulative(hi)
    c *= n_cells / c[-1]
    mesh = np.interp(np.arange(n_cells + 1), c, x)
    mesh[0], mesh[-1] = 0.0, 1.0
    return mesh


# -- discrete system -----------------------------------------------------------


class _System:
    """Residual and Jacobian of the box scheme on a fixed mesh."""

    def __init__(self, profile, alpha, beta, eps, mesh, forcing=None):
        self.alpha, self.beta, self.eps = float(alpha), float(beta), float(eps)
        self.mesh = np.asarray(mesh, dtype=float)
        self.h = np.diff(self.mesh)
        mid = 0.5 * (self.mesh[1:] + self.mesh[:-1])
        self.inv_k_mid = 1.0 / np.asarray(eval_k(profile, mid))
        self.k0 = eval_k(profile, 0.0)
        self.k1 = eval_k(profile, 1.0)
        self.f = np.zeros_like(mid) if forcing is None else np.asarray(forcing(mid), dtype=float)
        n = self.mesh.size
        self.n = n
        cells = np.arange(n - 1)
        # sparsity pattern is fixed: build index arrays once
        self._rows = np.concatenate([cells, cells, cells, [n - 1, n - 1, n, n]])
        self._cols = np.concatenate([cells, cells + 1, np.full(n - 1, n), [0, n, n - 1, n]])

    def residual(self, u):
        rho, J = u[:-1], u[-1]
        m = 0.5 * (rho[1:] + rho[:-1])
        cell = self.eps * np.diff(rho) / self.h - m * (1.0 - m) + J * self.inv_k_mid - self.f
        bc0 = rho[0] - 1.0 + J / (self.alpha * self.k0)
        bc1 = rho[-1] - J / (self.beta * self.k1)
        return np.concatenate([cell, [bc0, bc1]])

    def jacobian(self, u):
        rho = u[:-1]
        m = 0.5 * (rho[1:] + rho[:-1])
        half = 0.5 * (1.0 - 2.0 * m)
        e_h = self.eps / self.h
        vals = np.concatenate(
            [-e_h - half, e_h - half, self.inv_k_mid, [1.0, 1.0 / (self.alpha * self.k0), 1.0, -1.0 / (self.beta * self.k1)]]
        )
        size = self.n + 1
        return sp.csc_matrix((vals, (self._rows, self._cols)), shape=(size, size))


def _newton(system: _System, u0, options: SolverOptions):
    u = np.array(u0, dtype=float)
    F = system.residual(u)
    norm = float(np.max(np.abs(F)))
    for it in range(1, options.max_iterations + 1):
        if norm <= options.newton_tol:
            return u, norm, it - 1
        delta = spsolve(system.jacobian(u), -F)
        if not np.all(np.isfinite(delta)):
            break
        lam = 1.0
        while lam >= options.min_step:
            trial = u + lam * delta
            trial[:-1] = np.clip(trial[:-1], 0.0, 1.0)
            F_t = system.residual(trial)
            n_t = float(np.max(np.abs(F_t)))
            if n_t < (1.0 - 1e-4 * lam) * norm or n_t <= options.newton_tol:
                break
            lam *= 0.5
        else:
            break
        u, F, norm = trial, F_t, n_t
    if norm <= options.newton_tol:
        return u, norm, options.max_iterations
    raise NoConvergence(f"Newton stalled at residual {norm:.3e} (eps = {system.eps:g})")


def _polish(system: _System, u, norm):
    """Extra full Newton steps below tolerance while they keep helping."""
    for _ in range(3):
        delta = spsolve(system.jacobian(u), -system.residual(u))
        trial = u + delta
        n_t = float(np.max(np.abs(system.residual(trial))))
        if not n_t < norm:
            break
        u, norm = trial, n_t
    return u, norm


def _smooth(values, window):
    if window <= 1:
        return values
    pad = window // 2
    padded = np.concatenate([np.full(pad, values[0]), values, np.full(pad, values[-1])])
    out = np.convolve(padded, np.ones(window) / window, mode="valid")
    out[0], out[-1] = values[0], values[-1]
    return out


def singular_guess(profile, alpha, beta, mesh, window=5):
    """Initial densities and flux taken from the singular orbit, or None if there is none."""
    try:
        info = validate_default(profile)
        canard = canard_data(profile, info)
        label = classify(alpha, beta, profile, canard)
        orbit = build_singular(alpha, beta, profile, canard, label)
    except BottleneckError:
        return None
    rho = np.interp(mesh, orbit.slow.xi, orbit.slow.rho)
    rho[0], rho[-1] = orbit.rho0, orbit.rho1
    return _smooth(rho, window), orbit.flux


def constant_guess(profile, alpha, mesh):
    rho = np.full(mesh.size, 0.5)
    return rho, alpha * eval_k(profile, 0.0) * 0.5


def _bottleneck_location(profile):
    try:
        return validate_default(profile).xi_star
    except BottleneckError:
        return None


def _check_inputs(alpha, beta, eps):
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise DomainError(f"(alpha, beta) = ({alpha}, {beta}) outside (0, 1)^2")
    if not (eps > 0.0 and math.isfinite(eps)):
        raise DomainError(f"eps must be positive, got {eps}")


def solve_on_mesh(profile, alpha, beta, eps, mesh, rho_guess, flux_guess, options=SolverOptions(), forcing=None):
    """Newton solve on a given mesh from a given initial guess (no continuation)."""
    _check_inputs(alpha, beta, eps)
    system = _System(profile, alpha, beta, eps, mesh, forcing)
    u0 = np.concatenate([np.asarray(rho_guess, float), [float(flux_guess)]])
    u, norm, its = _newton(system, u0, options)
    u, norm = _polish(system, u, norm)
    rho = u[:-1]
    if np.any(rho < -1e-12) or np.any(rho > 1.0 + 1e-12):
        raise NoConvergence(f"converged densities leave [0, 1] (eps = {eps:g})")
    return EpsSolution(eps, alpha, beta, system.mesh, np.clip(rho, 0.0, 1.0), float(u[-1]), norm, its, (eps,))


def _mesh_for(eps, options, xi_star):
    n = options.mesh_size or default_mesh_size(eps)
    return make_mesh(n, eps, xi_star, options.grading, options.grading_ratio)


def _schedule(eps_from, eps_to, factor):
    out = []
    e = eps_from
    while e * factor > eps_to * (1.0 + 1e-12):
        e *= factor
        out.append(e)
    out.append(eps_to)
    return out


def _step_down(profile, prev: EpsSolution, eps_target, options, xi_star, trace):
    """Continue ``prev`` down to ``eps_target``; halve the step on failure."""
    current = prev
    for e in _schedule(prev.epsilon, eps_target, options.eps_factor):
        mesh = _mesh_for(e, options, xi_star)
        try:
            sol = solve_on_mesh(profile, current.alpha, current.beta, e, mesh, current.at(mesh), current.flux, options)
        except NoConvergence:
            # one retry through an intermediate eps
            mid = math.sqrt(current.epsilon * e)
            mesh_mid = _mesh_for(mid, options, xi_star)
            inter = solve_on_mesh(profile, current.alpha, current.beta, mid, mesh_mid, current.at(mesh_mid), current.flux, options)
            trace.append(mid)
            sol = solve_on_mesh(profile, current.alpha, current.beta, e, mesh, inter.at(mesh), inter.flux, options)
        trace.append(e)
        log.debug("eps=%g N=%d its=%d J=%.10g", e, mesh.size - 1, sol.newton_iterations, sol.flux)
        current = sol
    return current


def solve(profile: WidthProfile, alpha: float, beta: float, epsilon: float, options: SolverOptions = SolverOptions()) -> EpsSolution:
    """Solve the stationary problem at ``epsilon`` by continuation from ``options.eps_start``."""
    _check_inputs(alpha, beta, epsilon)
    xi_star = _bottleneck_location(profile)
    eps0 = max(options.eps_start, epsilon)
    mesh = _mesh_for(eps0, options, xi_star)
    guess = None
    if options.initial_guess == "singular":
        guess = singular_guess(profile, alpha, beta, mesh, options.smooth_window)
    if guess is None:
        guess = constant_guess(profile, alpha, mesh)
    trace = [eps0]
    try:
        sol = solve_on_mesh(profile, alpha, beta, eps0, mesh, guess[0], guess[1], options)
        if epsilon < eps0:
            sol = _step_down(profile, sol, epsilon, options, xi_star, trace)
    except NoConvergence as exc:
        raise NoConvergence(str(exc), trace=trace) from None
    return replace(sol, continuation_trace=tuple(trace))


def continuation_solve(profile, alpha, beta, eps_list, options: SolverOptions = SolverOptions()) -> list[EpsSolution]:
    """Solve for each eps in a strictly decreasing list, warm-starting each from the last."""
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise DomainError("eps_list must be positive and strictly decreasing")
    out: list[EpsSolution] = []
    if not eps_list:
        return out
    xi_star = _bottleneck_location(profile)
    for e in eps_list:
        try:
            if not out:
                sol = solve(profile, alpha, beta, e, options)
            else:
                trace = []
                sol = _step_down(profile, out[-1], e, options, xi_star, trace)
                sol = replace(sol, continuation_trace=tuple(trace))
        except NoConvergence as exc:
            raise NoConvergence(str(exc), trace=exc.trace, solutions=out) from None
        out.append(sol)
    return out


def residual(solution: EpsSolution, profile: WidthProfile, alpha: float | None = None, beta: float | None = None, forcing=None) -> float:
    """Max-norm of all N + 2 discrete equations at ``solution``."""
    mesh, rho = np.asarray(solution.mesh), np.asarray(solution.rho)
    if mesh.ndim != 1 or mesh.shape != rho.shape:
        raise DimensionMismatch(f"mesh {mesh.shape} vs rho {rho.shape}")
    a = solution.alpha if alpha is None else alpha
    b = solution.beta if beta is None else beta
    system = _System(profile, a, b, solution.epsilon, mesh, forcing)
    return float(np.max(np.abs(system.residual(np.concatenate([rho, [solution.flux]])))))


def extract_flux(solution: EpsSolution) -> float:
    return solution.flux


def reconstructed_flux_error(solution: EpsSolution, profile: WidthProfile) -> float:
    """max_i |k(x_i) j_i - J| with j_i = rho(1 - rho) - eps rho' from central differences.

    Interior nodes only; measures how well the node values satisfy the
    continuous flux balance (second order on smooth solutions).
    """
    x, r = solution.mesh, solution.rho
    dr = np.gradient(r, x, edge_order=2)
    j = r * (1.0 - r) - solution.epsilon * dr
    k = eval_k(profile, x)
    return float(np.max(np.abs(k[1:-1] * j[1:-1] - solution.flux)))
