"""Layer problem, critical manifold and reduced flow of the corridor model.

The stationary problem ``eps rho' = rho(1 - rho) - j`` with ``k j`` constant
is a slow-fast system.  For eps = 0 the fast (layer) flow freezes ``j`` and
``xi``; its equilibria form the critical manifold ``j = rho(1 - rho)`` whose
upper half (rho > 1/2) attracts and lower half repels.  Reduced orbits are
level sets of ``H(xi, rho) = k(xi) rho (1 - rho)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import AssumptionViolated, DomainError, InadmissibleEnd, InadmissibleStart, NoRealRoot
from .width import BottleneckInfo, WidthProfile, eval_k

ATTRACTING, REPELLING, FOLD = "attracting", "repelling", "fold"

# relative band around k(xi*)/4 treated as the canard level
CANARD_RTOL = 1e-12
DEFAULT_SAMPLES = 2001


def branch_of(rho: float, tol: float = 1e-12) -> str:
    if abs(rho - 0.5) <= tol:
        return FOLD
    return ATTRACTING if rho > 0.5 else REPELLING


@dataclass(frozen=True)
class ManifoldPoint:
    j: float
    xi: float
    rho: float
    branch: str

    @classmethod
    def on_manifold(cls, xi: float, rho: float) -> ManifoldPoint:
        return cls(rho * (1.0 - rho), xi, rho, branch_of(rho))


def conserved_H(profile: WidthProfile, xi, rho):
    r = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < 0.0) or np.any(r > 1.0):
        raise DomainError(f"density outside [0, 1]: {rho!r}")
    return eval_k(profile, xi) * r * (1.0 - r)


def critical_roots(j: float) -> tuple[float, float]:
    """Both densities on the critical manifold with flux density ``j``."""
    if not math.isfinite(j) or j < 0.0:
        raise DomainError(f"flux density must be >= 0, got {j}")
    disc = 0.25 - j
    if disc < 0.0:
        if disc > -1e-15:
            disc = 0.0
        else:
            raise NoRealRoot(f"j = {j} lies above the fold j = 1/4")
    s = math.sqrt(disc)
    return 0.5 - s, 0.5 + s


def _check_rate(name, value):
    if not (0.0 < value < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {value}")


def rho_admissible_left(alpha: float) -> float:
    """Lowest density at xi = 0 whose layer orbit does not escape to infinity."""
    _check_rate("alpha", alpha)
    return alpha if alpha <= 0.5 else 1.0 - 1.0 / (4.0 * alpha)


def rho_admissible_right(beta: float) -> float:
    """Highest admissible density at xi = 1."""
    _check_rate("beta", beta)
    return 1.0 - beta if beta <= 0.5 else 1.0 / (4.0 * beta)


def layer_limit_entrance(alpha: float, s: float) -> float:
    """Attracting-branch density reached by the layer flow from (alpha(1-s), 0, s)."""
    lo = rho_admissible_left(alpha)
    if not (0.0 <= s <= 1.0) or s < lo - 1e-14:
        raise InadmissibleStart(f"s = {s} below admissible bound rho_alpha = {lo}")
    return critical_roots(alpha * (1.0 - s))[1]


def layer_limit_exit(beta: float, t: float) -> float:
    """Repelling-branch density whose forward layer flow ends at (beta t, 1, t)."""
    hi = rho_admissible_right(beta)
    if not (0.0 <= t <= 1.0) or t > hi + 1e-14:
        raise InadmissibleEnd(f"t = {t} above admissible bound rho_beta = {hi}")
    return critical_roots(beta * t)[0]


def layer_orbit(j: float, rho_start: float, tau):
    """Exact solution of the layer equation rho' = rho(1 - rho) - j.

    Used for diagnostics and plots only; ``tau`` is fast time.  Starting on
    an equilibrium returns a constant.
    """
    lo, hi = critical_roots(j)
    tau = np.asarray(tau, dtype=float)
    s = hi - 0.5
    if s == 0.0:
        # rho' = -(rho - 1/2)^2
        d = rho_start - 0.5
        return 0.5 + d / (1.0 + d * tau)
    if rho_start in (lo, hi):
        return np.full_like(tau, rho_start)
    # with u = rho - 1/2: u' = s^2 - u^2 -> u = s tanh(s tau + c) or s coth(...)
    u0 = rho_start - 0.5
    if abs(u0) < s:
        c = math.atanh(u0 / s)
        return 0.5 + s * np.tanh(s * tau + c)
    c = math.atanh(s / u0)
    return 0.5 + s / np.tanh(s * tau + c)


@dataclass(frozen=True)
class CanardData:
    rho_c0: float
    rho_c1: float
    xi: np.ndarray
    rho_plus: np.ndarray
    rho_minus: np.ndarray
    p_star: ManifoldPoint
    p_c0: ManifoldPoint
    p_c1: ManifoldPoint
    saddle_matrix: np.ndarray
    info: BottleneckInfo

    @property
    def level(self) -> float:
        return self.info.canard_level


def canard_branches(profile: WidthProfile, info: BottleneckInfo, xi):
    """Return (rho_c^+, rho_c^-) evaluated at ``xi``."""
    ratio = info.k_min / np.asarray(eval_k(profile, xi), dtype=float)
    root = np.sqrt(np.clip(1.0 - ratio, 0.0, None))
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def clustered_mesh(xi_star: float, n: int, cluster: bool = True) -> np.ndarray:
    """Mesh of [0, 1] with ``n`` points that always contains xi*.

    With ``cluster`` the points on each side of xi* follow a half-cosine
    map, which packs them near xi* and near the ends.
    """
    n = max(int(n), 3)
    n_left = max(2, int(round(n * xi_star)))
    n_right = max(2, n - n_left + 1)
    t_l = np.linspace(0.0, 1.0, n_left)
    t_r = np.linspace(0.0, 1.0, n_right)
    if cluster:
        t_l = np.sin(0.5 * np.pi * t_l)
        t_r = 1.0 - np.cos(0.5 * np.pi * t_r)
    left = xi_star * t_l
    right = xi_star + (1.0 - xi_star) * t_r
    mesh = np.concatenate([left, right[1:]])
    mesh[0], mesh[-1] = 0.0, 1.0
    return mesh


def canard_data(profile: WidthProfile, info: BottleneckInfo, n_samples: int = DEFAULT_SAMPLES) -> CanardData:
    if not info.assumption_ok:
        raise AssumptionViolated("canard data needs a valid bottleneck")
    xi = clustered_mesh(info.xi_star, n_samples)
    plus, minus = canard_branches(profile, info, xi)
    i_star = int(np.argmin(np.abs(xi - info.xi_star)))
    plus[i_star] = minus[i_star] = 0.5
    rho_c0 = float(canard_branches(profile, info, 0.0)[1])
    rho_c1 = float(canard_branches(profile, info, 1.0)[0])
    A = np.array([[0.0, -2.0], [-info.g_prime_at_star / 4.0, 0.0]])
    if info.nondegenerate and not np.linalg.det(A) < 0.0:
        raise AssumptionViolated("linearisation at p* is not a saddle")
    return CanardData(
        rho_c0=rho_c0,
        rho_c1=rho_c1,
        xi=xi,
        rho_plus=plus,
        rho_minus=minus,
        p_star=ManifoldPoint(0.25, info.xi_star, 0.5, FOLD),
        p_c0=ManifoldPoint.on_manifold(0.0, 1.0 - rho_c0),
        p_c1=ManifoldPoint.on_manifold(1.0, 1.0 - rho_c1),
        saddle_matrix=A,
        info=info,
    )


def folded_saddle_check(canard: CanardData) -> dict:
    A = canard.saddle_matrix
    gp = canard.info.g_prime_at_star
    lam = math.sqrt(gp / 2.0) if gp > 0 else 0.0
    return {
        "det": float(np.linalg.det(A)),
        "det_closed_form": -gp / 2.0,
        "eigenvalues": (-lam, lam),
        "trace": float(np.trace(A)),
        "is_saddle": gp > 0.0,
    }


# -- reduced flow ------------------------------------------------------------

FORWARD, BACKWARD = "forward", "backward"
REACHED_TARGET, HIT_FOLD, ENTERS_REGION_N, REACHED_CANARD_POINT = (
    "reached_target",
    "hit_fold",
    "enters_region_N",
    "reached_canard_point",
)


@dataclass(frozen=True)
class SlowSegment:
    xi: np.ndarray
    rho: np.ndarray
    level: float
    termination: str
    xi_hit: float | None = None
    crosses_canard_point: bool = False

    @property
    def enters_region_N(self) -> bool:
        return self.termination == HIT_FOLD

    @property
    def branches(self) -> list[str]:
        return [branch_of(r) for r in self.rho]


def _branch_root(level, kval, upper):
    disc = np.clip(0.25 - level / kval, 0.0, None)
    s = np.sqrt(disc)
    return 0.5 + s if upper else 0.5 - s


def reduced_orbit(
    profile: WidthProfile,
    start: tuple[float, float],
    direction: str,
    canard: CanardData,
    n: int = DEFAULT_SAMPLES,
    cluster: bool = True,
    through_canard: bool = True,
) -> SlowSegment:
    """Trace the reduced orbit through ``start`` as a level set of H.

    Densities are obtained per mesh point from the quadratic
    ``k(xi) rho (1 - rho) = level`` on the starting branch, so the conserved
    quantity holds to rounding.  A level above k(xi*)/4 meets the fold where
    ``k(xi) = 4 level`` and stops there.  At the canard level the orbit goes
    through p* and switches branch (canard from the attracting side, faux
    canard from the repelling side); with ``through_canard=False`` it stops
    at p* instead, since the continuation there is not unique.
    """
    xi0, rho0 = map(float, start)
    if not (0.0 <= xi0 <= 1.0 and 0.0 <= rho0 <= 1.0):
        raise DomainError(f"start {start!r} outside [0, 1]^2")
    if direction not in (FORWARD, BACKWARD):
        raise DomainError(f"direction must be forward or backward, got {direction!r}")
    info = canard.info
    xs = info.xi_star
    at_p_star = abs(rho0 - 0.5) <= 1e-12 and abs(xi0 - xs) <= 1e-12
    if abs(rho0 - 0.5) <= 1e-12 and not at_p_star:
        raise DomainError("start on the fold line away from p*")

    level = float(conserved_H(profile, xi0, rho0))
    canard_level = info.canard_level
    is_canard = abs(level - canard_level) <= CANARD_RTOL * canard_level
    if is_canard:
        level = canard_level
    upper = rho0 > 0.5

    mesh = clustered_mesh(xs, n, cluster)
    if direction == FORWARD:
        path = np.concatenate([[xi0], mesh[mesh > xi0]])
    else:
        path = np.concatenate([[xi0], mesh[mesh < xi0][::-1]])

    if at_p_star:
        # starting on the saddle: follow the canard S_c in the given direction
        kv = eval_k(profile, path)
        upper_side = path < xs if direction == BACKWARD else np.zeros(path.size, bool)
        rho = np.where(upper_side, _branch_root(level, kv, True), _branch_root(level, kv, False))
        rho[0] = 0.5
        return SlowSegment(path, rho, level, REACHED_TARGET, crosses_canard_point=True)

    kv = np.asarray(eval_k(profile, path), dtype=float)
    termination, xi_hit = REACHED_TARGET, None
    crosses = False

    if is_canard:
        crosses = (xi0 < xs) if direction == FORWARD else (xi0 > xs)
        before = (path < xs) if direction == FORWARD else (path > xs)
        if crosses and not through_canard:
            path = np.concatenate([path[before], [xs]])
            kv = np.asarray(eval_k(profile, path), dtype=float)
            rho = _branch_root(level, kv, upper)
            rho[0], rho[-1] = rho0, 0.5
            return SlowSegment(path, rho, level, REACHED_CANARD_POINT, xs, False)
        if crosses:
            side = np.where(before, upper, not upper)
        else:
            side = np.full(path.size, upper)
        rho = np.where(side, _branch_root(level, kv, True), _branch_root(level, kv, False))
        at_star = np.abs(path - xs) <= 1e-14
        rho[at_star] = 0.5
        rho[0] = rho0
    elif level > canard_level:
        # orbit lies in region N and ends on the fold where k = 4 level
        over = np.nonzero(kv < 4.0 * level)[0]
        if over.size:
            m = over[0]
            f = lambda x: eval_k(profile, x) - 4.0 * level
            xi_hit = brentq(f, path[m - 1], path[m], xtol=1e-15)
            path = np.concatenate([path[:m], [xi_hit]])
            kv = np.concatenate([kv[:m], [4.0 * level]])
            termination = HIT_FOLD
        rho = _branch_root(level, kv, upper)
        rho[0] = rho0
        if termination == HIT_FOLD:
            rho[-1] = 0.5
    else:
        rho = _branch_root(level, kv, upper)
        rho[0] = rho0

    return SlowSegment(path, rho, level, termination, xi_hit, crosses)


# -- serialisation -------------------------------------------------------------


def segment_records(segment: SlowSegment) -> list[dict]:
    """Rows ``xi, rho, branch`` of a slow segment."""
    return [{"xi": float(x), "rho": float(r), "branch": branch_of(r)} for x, r in zip(segment.xi, segment.rho)]


def segment_summary(segment: SlowSegment) -> dict:
    return {
        "level": segment.level,
        "termination": segment.termination,
        "xi_hit": segment.xi_hit,
        "crosses_canard_point": segment.crosses_canard_point,
        "start": [float(segment.xi[0]), float(segment.rho[0])],
        "end": [float(segment.xi[-1]), float(segment.rho[-1])],
    }


def canard_records(canard: CanardData) -> list[dict]:
    """Rows ``xi, rho_plus, rho_minus`` of the sampled canard branches."""
    return [
        {"xi": float(x), "rho_plus": float(p), "rho_minus": float(m)}
        for x, p, m in zip(canard.xi, canard.rho_plus, canard.rho_minus)
    ]
