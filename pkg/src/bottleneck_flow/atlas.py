"""The (alpha, beta) bifurcation atlas: special densities, curves, regions.

Regions G1..G8 are separated by eleven curves named after the two regions
they separate (``"g12"`` separates G1 and G2, and so on).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomain, UndefinedInsideCanardBand
from .slowfast import CanardData, rho_admissible_left, rho_admissible_right  # noqa: F401 (re-export)
from .width import WidthProfile

CURVES = ("g12", "g13", "g17", "g24", "g34", "g35", "g37", "g46", "g56", "g58", "g78")
# boundary curves on which the singular solution is still unique
UNIQUE_CURVES = ("g12", "g34", "g35", "g46", "g56", "g78")
DEGENERATE_CURVES = ("g13", "g17", "g24", "g37", "g58")
DEFAULT_TOL = 1e-9

REGION, BOUNDARY, CORNER, OUTSIDE = "region", "boundary", "degenerate_corner", "out_of_domain"


@dataclass(frozen=True)
class RegionLabel:
    kind: str
    index: int | None = None
    curve: str | None = None
    margins: dict = field(default_factory=dict)

    @property
    def is_region(self) -> bool:
        return self.kind == REGION

    @property
    def name(self) -> str:
        if self.kind == REGION:
            return f"G{self.index}"
        if self.kind == BOUNDARY:
            return self.curve
        return self.kind

    def __str__(self):
        return self.name


def region(i: int, **margins) -> RegionLabel:
    return RegionLabel(REGION, index=i, margins=margins)


def _radicand(x, ratio):
    return 1.0 - 4.0 * x * (1.0 - x) * ratio


def rho_star_forward(alpha: float, profile: WidthProfile, canard: CanardData) -> float:
    """Density at xi = 1 of the reduced orbit leaving (0, alpha)."""
    info = canard.info
    c0 = canard.rho_c0
    if not (alpha < c0 or alpha > 1.0 - c0):
        raise UndefinedInsideCanardBand(f"alpha = {alpha} in [{c0}, {1 - c0}]: orbit ends on the fold")
    root = math.sqrt(max(_radicand(alpha, info.k0 / info.k1), 0.0))
    return 0.5 * (1.0 - root) if alpha < c0 else 0.5 * (1.0 + root)


def rho_star_backward(beta: float, profile: WidthProfile, canard: CanardData) -> float:
    """Density at xi = 0 of the reduced orbit ending at (1, 1 - beta)."""
    info = canard.info
    c1 = canard.rho_c1
    if not (beta < 1.0 - c1 or beta > c1):
        raise UndefinedInsideCanardBand(f"beta = {beta} in [{1 - c1}, {c1}]: orbit ends on the fold")
    root = math.sqrt(max(_radicand(beta, info.k1 / info.k0), 0.0))
    return 0.5 * (1.0 + root) if beta < 1.0 - c1 else 0.5 * (1.0 - root)


def classify(alpha: float, beta: float, profile: WidthProfile, canard: CanardData, tol: float = DEFAULT_TOL) -> RegionLabel:
    """Place (alpha, beta) in a region, on a boundary curve, or on the degenerate corner.

    Distances below ``tol`` to a curve yield a boundary label.  Margins are
    signed distances (positive inside the returned region) to the curves
    that bound it along the tested coordinate.
    """
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not (0.0 < v < 1.0) or not math.isfinite(v):
            raise OutOfDomain(f"{name} = {v} outside (0, 1)")
    c0, c1 = canard.rho_c0, canard.rho_c1
    a_lo, a_hi = c0, 1.0 - c0
    b_lo, b_hi = 1.0 - c1, c1

    if abs(alpha - a_lo) <= tol and abs(beta - b_lo) <= tol:
        return RegionLabel(CORNER, margins={"alpha": alpha - a_lo, "beta": beta - b_lo})

    if beta < b_lo - tol:
        # high-density band: compare alpha with 1 - rho_*(beta) and rho_*(beta)
        rs = rho_star_backward(beta, profile, canard)
        lo, hi = 1.0 - rs, rs
        m = {"beta_to_g37": b_lo - beta}
        if abs(alpha - lo) <= tol:
            return RegionLabel(BOUNDARY, curve="g17", margins=dict(m, g17=alpha - lo))
        if abs(alpha - hi) <= tol:
            return RegionLabel(BOUNDARY, curve="g78", margins=dict(m, g78=alpha - hi))
        if alpha < lo:
            return region(1, g17=lo - alpha, **m)
        if alpha < hi:
            return region(7, g17=alpha - lo, g78=hi - alpha, **m)
        return region(8, g78=alpha - hi, **m)

    if alpha < a_lo - tol:
        # low-density column: compare beta with 1 - rho^*(alpha)
        top = 1.0 - rho_star_forward(alpha, profile, canard)
        m = {"alpha_to_g13": a_lo - alpha}
        if abs(beta - top) <= tol:
            return RegionLabel(BOUNDARY, curve="g12", margins=dict(m, g12=beta - top))
        if beta < top:
            return region(1, g12=top - beta, **m)
        return region(2, g12=beta - top, **m)

    if abs(beta - b_lo) <= tol:
        curve = "g37" if alpha < a_hi - tol else "g58"
        return RegionLabel(BOUNDARY, curve=curve, margins={curve: beta - b_lo})

    if abs(alpha - a_lo) <= tol:
        curve = "g13" if beta <= b_hi else "g24"
        return RegionLabel(BOUNDARY, curve=curve, margins={curve: alpha - a_lo})

    upper = beta > b_hi
    if abs(beta - b_hi) <= tol:
        curve = "g34" if alpha < a_hi - tol else "g56"
        return RegionLabel(BOUNDARY, curve=curve, margins={curve: beta - b_hi})
    if abs(alpha - a_hi) <= tol:
        curve = "g46" if upper else "g35"
        return RegionLabel(BOUNDARY, curve=curve, margins={curve: alpha - a_hi})

    if alpha < a_hi:
        m = {"g13": alpha - a_lo, "g35": a_hi - alpha}
        if upper:
            return region(4, g34=beta - b_hi, **m)
        return region(3, g37=beta - b_lo, g34=b_hi - beta, **m)
    m = {"g35": alpha - a_hi}
    if upper:
        return region(6, g56=beta - b_hi, **m)
    return region(5, g58=beta - b_lo, g56=b_hi - beta, **m)


def region_bounds(canard: CanardData) -> dict:
    c0, c1 = canard.rho_c0, canard.rho_c1
    return {"alpha_band": (c0, 1.0 - c0), "beta_band": (1.0 - c1, c1)}


def boundary_curves(profile: WidthProfile, canard: CanardData, n: int = 200) -> dict[str, np.ndarray]:
    """Polylines (shape (m, 2), columns alpha, beta) for all eleven curves."""
    c0, c1 = canard.rho_c0, canard.rho_c1
    a_lo, a_hi, b_lo, b_hi = c0, 1.0 - c0, 1.0 - c1, c1
    line = lambda p, q: np.column_stack([np.linspace(p[0], q[0], n), np.linspace(p[1], q[1], n)])
    # open ends of the arcs are approached but not reached
    a_arc = np.linspace(0.0, a_lo, n + 1)[1:]
    a_arc[-1] = a_lo * (1.0 - 1e-12)
    b_arc = np.linspace(0.0, b_lo, n + 1)[1:]
    b_arc[-1] = b_lo * (1.0 - 1e-12)
    g12 = np.column_stack([a_arc, [1.0 - rho_star_forward(a, profile, canard) for a in a_arc]])
    g17 = np.column_stack([[1.0 - rho_star_backward(b, profile, canard) for b in b_arc], b_arc])
    g78 = np.column_stack([[rho_star_backward(b, profile, canard) for b in b_arc], b_arc])
    g12[-1] = (a_lo, b_hi)
    g17[-1] = (a_lo, b_lo)
    g78[-1] = (a_hi, b_lo)
    return {
        "g12": g12,
        "g13": line((a_lo, b_lo), (a_lo, b_hi)),
        "g17": g17,
        "g24": line((a_lo, b_hi), (a_lo, 1.0)),
        "g34": line((a_lo, b_hi), (a_hi, b_hi)),
        "g35": line((a_hi, b_lo), (a_hi, b_hi)),
        "g37": line((a_lo, b_lo), (a_hi, b_lo)),
        "g46": line((a_hi, b_hi), (a_hi, 1.0)),
        "g56": line((a_hi, b_hi), (1.0, b_hi)),
        "g58": line((a_hi, b_lo), (1.0, b_lo)),
        "g78": g78,
    }


def transitional_area(profile: WidthProfile, canard: CanardData) -> float:
    """Exact area of G3..G6, the rectangle of canard-mediated profiles."""
    c0, c1 = canard.rho_c0, canard.rho_c1
    # alpha in (c0, 1), beta in (1 - c1, 1)
    return (1.0 - c0) * c1
