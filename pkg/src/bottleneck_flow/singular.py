"""Singular (eps = 0) stationary profiles assembled from layer jumps and reduced orbits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atlas import (
    BOUNDARY,
    CORNER,
    DEGENERATE_CURVES,
    OUTSIDE,
    REGION,
    RegionLabel,
    rho_star_backward,
    rho_star_forward,
)
from .errors import DegenerateParameters, OutOfScope
from .slowfast import (
    FORWARD,
    CanardData,
    SlowSegment,
    canard_branches,
    clustered_mesh,
    reduced_orbit,
)
from .width import WidthProfile, eval_k

# layers shorter than this are dropped
ZERO_LAYER = 1e-10

UP, DOWN = "up", "down"

# boundary curve -> (construction case, type index reported on the curve)
_CURVE_CASE = {"g12": (1, 1), "g34": (2, 3), "g35": (2, 3), "g46": (2, 4), "g56": (2, 5), "g78": (3, 7)}


@dataclass(frozen=True)
class Layer:
    xi: float
    rho_from: float
    rho_to: float

    @property
    def direction(self) -> str:
        return UP if self.rho_to > self.rho_from else DOWN

    @property
    def height(self) -> float:
        return abs(self.rho_to - self.rho_from)


@dataclass(frozen=True)
class SingularOrbit:
    type_index: int
    alpha: float
    beta: float
    label: RegionLabel
    entry_layer: Layer | None
    slow: SlowSegment
    exit_layer: Layer | None
    flux: float
    rho0: float
    rho1: float

    @property
    def case(self) -> int:
        return 1 if self.type_index <= 2 else (2 if self.type_index <= 6 else 3)

    def as_dict(self) -> dict:
        lay = lambda L: None if L is None else {"xi": L.xi, "from": L.rho_from, "to": L.rho_to, "direction": L.direction}
        return {
            "type": self.type_index,
            "label": self.label.name,
            "alpha": self.alpha,
            "beta": self.beta,
            "flux": self.flux,
            "rho0": self.rho0,
            "rho1": self.rho1,
            "entry_layer": lay(self.entry_layer),
            "exit_layer": lay(self.exit_layer),
            "slow_start": float(self.slow.rho[0]),
            "slow_end": float(self.slow.rho[-1]),
        }


@dataclass(frozen=True)
class DegenerateFamily:
    curve: str
    lower: SlowSegment
    upper: SlowSegment
    jump_window: tuple[float, float]


def _layer(xi, a, b):
    return None if abs(b - a) < ZERO_LAYER else Layer(xi, a, b)


def _curve_segment(xi, rho, level):
    return SlowSegment(np.asarray(xi), np.asarray(rho), float(level), "reached_target")


def degenerate_family(alpha, beta, profile: WidthProfile, canard: CanardData, curve: str, n: int = 2001) -> DegenerateFamily:
    """The two extreme reduced solutions between which layer jumps are possible."""
    info = canard.info
    xi = clustered_mesh(info.xi_star, n)
    plus, minus = canard_branches(profile, info, xi)
    at_star = xi == info.xi_star
    plus[at_star] = minus[at_star] = 0.5
    level = info.canard_level
    s_c = np.where(xi <= info.xi_star, plus, minus)
    if curve == "g17":
        lo = reduced_orbit(profile, (0.0, alpha), FORWARD, canard, n)
        hi = reduced_orbit(profile, (0.0, 1.0 - alpha), FORWARD, canard, n)
        return DegenerateFamily(curve, lo, hi, (0.0, 1.0))
    if curve in ("g13", "g24"):
        return DegenerateFamily(curve, _curve_segment(xi, minus, level), _curve_segment(xi, s_c, level), (0.0, info.xi_star))
    if curve in ("g37", "g58", CORNER):
        window = (info.xi_star, 1.0) if curve != CORNER else (0.0, 1.0)
        return DegenerateFamily(curve, _curve_segment(xi, s_c, level), _curve_segment(xi, plus, level), window)
    raise OutOfScope(f"no degenerate family on {curve}")


def _case_of(label: RegionLabel) -> tuple[int, int]:
    if label.kind == REGION:
        i = label.index
        return (1 if i <= 2 else 2 if i <= 6 else 3), i
    if label.kind == BOUNDARY and label.curve in _CURVE_CASE:
        return _CURVE_CASE[label.curve]
    raise OutOfScope(f"no unique singular solution for label {label.name}")


def build_singular(alpha, beta, profile: WidthProfile, canard: CanardData, label: RegionLabel, n: int = 2001) -> SingularOrbit:
    """Construct the unique singular orbit for (alpha, beta).

    Case 1 (G1, G2): slow flow on the repelling branch from (0, alpha) to
    (1, rho^*(alpha)) and a single exit layer.  Case 2 (G3..G6): entry
    layer onto the canard, passage through p*, exit layer.  Case 3 (G7, G8):
    entry layer onto the attracting branch, slow flow to (1, 1 - beta).
    """
    if label.kind == OUTSIDE:
        raise OutOfScope("(alpha, beta) outside (0, 1)^2")
    if label.kind == CORNER or (label.kind == BOUNDARY and label.curve in DEGENERATE_CURVES):
        curve = label.curve or CORNER
        fam = degenerate_family(alpha, beta, profile, canard, curve, n)
        raise DegenerateParameters(f"singular solutions form a continuum on {curve}", family=fam)
    case, type_index = _case_of(label)
    info = canard.info
    k0, k1, ks = info.k0, info.k1, info.k_min

    if case == 1:
        rho0 = alpha
        slow = reduced_orbit(profile, (0.0, alpha), FORWARD, canard, n)
        end = rho_star_forward(alpha, profile, canard)
        flux = k0 * alpha * (1.0 - alpha)
        rho1 = alpha * (1.0 - alpha) * k0 / (beta * k1)
        entry, exit_ = None, _layer(1.0, end, rho1)
        if label.kind == REGION:
            type_index = 1 if rho1 > end else 2
    elif case == 2:
        start = 1.0 - canard.rho_c0
        end = 1.0 - canard.rho_c1
        rho0 = 1.0 - ks / (4.0 * alpha * k0)
        rho1 = ks / (4.0 * beta * k1)
        slow = reduced_orbit(profile, (0.0, start), FORWARD, canard, n)
        flux = ks / 4.0
        entry, exit_ = _layer(0.0, rho0, start), _layer(1.0, end, rho1)
        if label.kind == REGION:
            up0 = rho0 < start
            up1 = rho1 > end
            type_index = {(True, True): 3, (True, False): 4, (False, True): 5, (False, False): 6}[(up0, up1)]
    else:
        start = rho_star_backward(beta, profile, canard)
        rho1 = 1.0 - beta
        rho0 = 1.0 - beta * (1.0 - beta) * k1 / (alpha * k0)
        slow = reduced_orbit(profile, (0.0, start), FORWARD, canard, n)
        flux = k1 * beta * (1.0 - beta)
        entry, exit_ = _layer(0.0, rho0, start), None
        if label.kind == REGION:
            type_index = 7 if rho0 < start else 8

    return SingularOrbit(type_index, alpha, beta, label, entry, slow, exit_, flux, rho0, rho1)


def flux_singular(alpha, beta, profile: WidthProfile, canard: CanardData, label: RegionLabel) -> float:
    if label.kind == OUTSIDE:
        raise OutOfScope("(alpha, beta) outside (0, 1)^2")
    if label.kind == CORNER or (label.kind == BOUNDARY and label.curve in DEGENERATE_CURVES):
        raise DegenerateParameters(f"flux not unique on {label.name}")
    case, _ = _case_of(label)
    info = canard.info
    if case == 1:
        return info.k0 * alpha * (1.0 - alpha)
    if case == 3:
        return info.k1 * beta * (1.0 - beta)
    return info.k_min / 4.0


def sample_profile(orbit: SingularOrbit, n: int | None = None):
    """Render the orbit as (x, rho, piece) with layers as vertical jumps.

    Layers appear as two points sharing the same x.  ``n`` caps the number
    of slow samples (thinned uniformly, keeping both ends and xi*).
    """
    xi, rho = orbit.slow.xi, orbit.slow.rho
    if n is not None and n < xi.size:
        keep = np.unique(np.round(np.linspace(0, xi.size - 1, max(n, 2))).astype(int))
        star = np.nonzero(orbit.slow.rho == 0.5)[0]
        keep = np.union1d(keep, star)
        xi, rho = xi[keep], rho[keep]
    xs, rs, pieces = [], [], []
    if orbit.entry_layer is not None:
        xs.append(0.0)
        rs.append(orbit.entry_layer.rho_from)
        pieces.append("entry_layer")
    xs.extend(xi.tolist())
    rs.extend(rho.tolist())
    pieces.extend(["slow"] * xi.size)
    if orbit.exit_layer is not None:
        xs.append(1.0)
        rs.append(orbit.exit_layer.rho_to)
        pieces.append("exit_layer")
    return np.array(xs), np.array(rs), pieces


def orbit_polyline(orbit: SingularOrbit) -> np.ndarray:
    """Vertices of the singular orbit as an (m, 2) array in the (x, rho) square."""
    x, r, _ = sample_profile(orbit)
    return np.column_stack([x, r])


def check_flux_constancy(orbit: SingularOrbit, profile: WidthProfile) -> float:
    """Largest deviation of k rho (1 - rho) from the flux along the slow part."""
    k = eval_k(profile, orbit.slow.xi)
    return float(np.max(np.abs(k * orbit.slow.rho * (1.0 - orbit.slow.rho) - orbit.flux)))
