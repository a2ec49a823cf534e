"""Corridor width profiles k(xi) on [0, 1] and the bottleneck check.

Three kinds are supported::

    cosine        k = 1 + a cos(2 pi xi / b)
    supergaussian k = w_e - (w_e - w_m) exp(-|(xi - xi0)/d|^6)
    tabulated     C2 cubic spline through (xi, k) knots
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import AssumptionViolated, DomainError

KINDS = ("cosine", "supergaussian", "tabulated")

# Curvature below this counts as a degenerate minimum.
MIN_CURVATURE = 1e-8
SCAN_POINTS = 10001


@dataclass(frozen=True)
class WidthProfile:
    kind: str
    params: tuple = ()
    knots: tuple = ()
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if self.kind == "tabulated":
            xi, k = np.asarray(self.knots[0], float), np.asarray(self.knots[1], float)
            if xi.size < 4 or xi.size != k.size:
                raise DomainError("tabulated profile needs >= 4 (xi, k) knots")
            if np.any(np.diff(xi) <= 0):
                raise DomainError("knot positions must be strictly increasing")
            if xi[0] > 0.0 or xi[-1] < 1.0:
                raise DomainError("knots must cover [0, 1]")
            object.__setattr__(self, "_spline", CubicSpline(xi, k))

    # -- constructors ------------------------------------------------------

    @classmethod
    def cosine(cls, a: float, b: float) -> WidthProfile:
        return cls("cosine", (float(a), float(b)))

    @classmethod
    def supergaussian(cls, we: float, wm: float, d: float, xi0: float) -> WidthProfile:
        if d <= 0:
            raise DomainError("neck length d must be positive")
        return cls("supergaussian", (float(we), float(wm), float(d), float(xi0)))

    @classmethod
    def tabulated(cls, xi, k) -> WidthProfile:
        return cls("tabulated", knots=(tuple(map(float, xi)), tuple(map(float, k))))

    @classmethod
    def constant(cls, value: float, n: int = 5) -> WidthProfile:
        xi = np.linspace(0.0, 1.0, n)
        return cls.tabulated(xi, np.full(n, float(value)))

    # -- evaluation --------------------------------------------------------

    def derivatives(self, xi, order: int = 0):
        """Return d^order k / dxi^order at ``xi`` (order 0, 1 or 2); no domain check."""
        x = np.asarray(xi, dtype=float)
        if self.kind == "cosine":
            a, b = self.params
            w = 2.0 * np.pi / b
            if order == 0:
                return 1.0 + a * np.cos(w * x)
            if order == 1:
                return -a * w * np.sin(w * x)
            return -a * w * w * np.cos(w * x)
        if self.kind == "supergaussian":
            we, wm, d, xi0 = self.params
            u = (x - xi0) / d
            e = np.exp(-(u**6))
            if order == 0:
                return we - (we - wm) * e
            if order == 1:
                return (we - wm) * 6.0 * u**5 * e / d
            return (we - wm) * e * (30.0 * u**4 - 36.0 * u**10) / d**2
        return self._spline(x, order)

    def as_dict(self) -> dict:
        if self.kind == "cosine":
            return {"kind": "cosine", "a": self.params[0], "b": self.params[1]}
        if self.kind == "supergaussian":
            return dict(zip(("we", "wm", "d", "xi0"), self.params), kind="supergaussian")
        return {"kind": "tabulated", "xi": list(self.knots[0]), "k": list(self.knots[1])}


def _check_domain(xi):
    x = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"position outside [0, 1]: {xi!r}")
    return x


def _out(val):
    return float(val) if np.ndim(val) == 0 else val


def eval_k(profile: WidthProfile, xi):
    x = _check_domain(xi)
    return _out(profile.derivatives(x, 0))


def eval_dk(profile: WidthProfile, xi):
    x = _check_domain(xi)
    return _out(profile.derivatives(x, 1))


def eval_g(profile: WidthProfile, xi):
    """Logarithmic derivative g = k'/k."""
    x = _check_domain(xi)
    k = profile.derivatives(x, 0)
    if np.any(k <= 0):
        raise DomainError("width must be positive to form k'/k")
    return _out(profile.derivatives(x, 1) / k)


def eval_dg(profile: WidthProfile, xi):
    x = _check_domain(xi)
    k = profile.derivatives(x, 0)
    k1 = profile.derivatives(x, 1)
    k2 = profile.derivatives(x, 2)
    return _out((k2 * k - k1 * k1) / (k * k))


@dataclass(frozen=True)
class BottleneckInfo:
    xi_star: float
    k_min: float
    k0: float
    k1: float
    g_prime_at_star: float
    assumption_ok: bool
    nondegenerate: bool = True

    @property
    def canard_level(self) -> float:
        """The conserved-quantity value k(xi*)/4 carried by both canards."""
        return self.k_min / 4.0


def _refine_minimum(profile, lo, hi):
    dk = lambda x: float(profile.derivatives(x, 1))
    flo, fhi = dk(lo), dk(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo < 0.0 < fhi:
        return brentq(dk, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    # no sign change inside the bracket: fall back to bounded Newton on k'
    x = 0.5 * (lo + hi)
    for _ in range(50):
        d2 = float(profile.derivatives(x, 2))
        if d2 <= 0:
            break
        x = min(max(x - dk(x) / d2, lo), hi)
    return x


def validate(profile: WidthProfile, tol: float = 1e-9, *, allow_degenerate: bool = False) -> BottleneckInfo:
    """Locate the bottleneck and check the width assumptions.

    Scans ``SCAN_POINTS`` grid points, refines every sign change of k' from
    negative to positive with Brent's method and keeps the smallest width.
    Raises ``AssumptionViolated`` for a minimum on the boundary, a second
    minimum within ``tol`` of the global one, a nonpositive width, or a
    degenerate minimum (k'' below ``MIN_CURVATURE``).

    ``allow_degenerate`` admits a strict global minimum whose curvature
    vanishes (the supergaussian neck is flat to sixth order); the returned
    info then has ``nondegenerate=False``.
    """
    x = np.linspace(0.0, 1.0, SCAN_POINTS)
    k = profile.derivatives(x, 0)
    dk = profile.derivatives(x, 1)
    if not np.all(np.isfinite(k)) or np.min(k) <= 0.0:
        i = int(np.argmin(k))
        raise AssumptionViolated("width is not positive on [0, 1]", {"xi": float(x[i]), "k": float(k[i])})

    # minima of the scan: k' goes from < 0 to >= 0
    idx = np.nonzero((dk[:-1] < 0.0) & (dk[1:] >= 0.0))[0]
    candidates = []
    for i in idx:
        xs = _refine_minimum(profile, x[i], x[i + 1])
        candidates.append((float(profile.derivatives(xs, 0)), xs))
    k0, k1 = float(k[0]), float(k[-1])
    diag = {"k0": k0, "k1": k1, "interior_minima": [(xs, km) for km, xs in candidates]}

    if not candidates:
        raise AssumptionViolated("width has no interior minimum (boundary minimum)", diag)
    candidates.sort()
    k_min, xi_star = candidates[0]
    if k_min >= min(k0, k1):
        raise AssumptionViolated("global minimum of the width lies on the boundary", diag)
    if len(candidates) > 1 and candidates[1][0] - k_min <= tol:
        raise AssumptionViolated("tied global minima of the width", diag)

    kpp = float(profile.derivatives(xi_star, 2))
    dk_scale = max(float(np.max(np.abs(dk))), np.finfo(float).tiny)
    if abs(float(profile.derivatives(xi_star, 1))) > 1e-10 * dk_scale:
        raise AssumptionViolated("could not refine k'(xi*) to zero", diag)
    nondegenerate = kpp >= MIN_CURVATURE
    if not nondegenerate and not allow_degenerate:
        diag["k2_at_star"] = kpp
        raise AssumptionViolated("degenerate minimum: k''(xi*) vanishes", diag)
    if not nondegenerate:
        # a flat minimum still has to be strict
        left, right = x[x < xi_star - 1e-3], x[x > xi_star + 1e-3]
        for side in (left, right):
            if side.size and np.min(profile.derivatives(side, 0)) <= k_min:
                raise AssumptionViolated("flat minimum is not strict", diag)

    return BottleneckInfo(
        xi_star=float(xi_star),
        k_min=k_min,
        k0=k0,
        k1=k1,
        g_prime_at_star=kpp / k_min,
        assumption_ok=True,
        nondegenerate=nondegenerate,
    )


def needs_flat_minimum(profile: WidthProfile) -> bool:
    """True for builtin kinds whose minimum is flat by construction."""
    return profile.kind == "supergaussian"


def validate_default(profile: WidthProfile, tol: float = 1e-9) -> BottleneckInfo:
    """``validate`` with flat minima admitted exactly for supergaussian necks."""
    return validate(profile, tol, allow_degenerate=needs_flat_minimum(profile))


# -- profile specification strings -------------------------------------------

def _kv(body: str) -> dict:
    out = {}
    for item in filter(None, body.split(",")):
        key, sep, val = item.partition("=")
        if not sep:
            raise DomainError(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise DomainError(f"bad number in profile spec: {item!r}") from None
    return out


def read_table(path) -> WidthProfile:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:2]] != ["xi", "k"]:
            raise DomainError(f"{path}: expected CSV header 'xi,k'")
        rows = [(float(r["xi"]), float(r["k"])) for r in reader]
    xi, k = zip(*rows) if rows else ((), ())
    return WidthProfile.tabulated(xi, k)


def parse_profile(spec: str) -> WidthProfile:
    """Parse ``cosine:a=..,b=..``, ``supergauss:we=..,wm=..,d=..,xi0=..`` or ``table:path.csv``."""
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "cosine":
        p = _kv(body)
        try:
            return WidthProfile.cosine(p["a"], p["b"])
        except KeyError as exc:
            raise DomainError(f"cosine profile missing {exc}") from None
    if kind in ("supergauss", "supergaussian"):
        p = _kv(body)
        try:
            return WidthProfile.supergaussian(p["we"], p["wm"], p["d"], p["xi0"])
        except KeyError as exc:
            raise DomainError(f"supergauss profile missing {exc}") from None
    if kind == "table":
        path = Path(body)
        if not path.is_file():
            raise DomainError(f"no such table: {body}")
        return read_table(path)
    raise DomainError(f"unknown profile spec {spec!r}")


def format_profile(profile: WidthProfile) -> str:
    if profile.kind == "cosine":
        return "cosine:a={!r},b={!r}".format(*profile.params)
    if profile.kind == "supergaussian":
        return "supergauss:we={!r},wm={!r},d={!r},xi0={!r}".format(*profile.params)
    return f"table:<{len(profile.knots[0])} knots>"
