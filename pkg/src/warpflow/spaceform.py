"""Translated circles in space forms and the characteristic ODE.

Coordinates are x = r cos(theta), y = r sin(theta) in the plane and
(sin r cos theta, sin r sin theta, cos r) on the unit sphere. A circle
whose radial derivative along arc length is r_s = a cos(theta + alpha)
is the Euclidean circle of radius R centred at a R (sin alpha, cos alpha).
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .curve import RadialCurve, geometry
from .errors import InvalidOffset, OutOfDomain, PoleCrossing, StalledTheta
from .warp import WarpPotential

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class CircleSpec:
    model: str  # "euclidean" | "sphere"
    a: float  # offset ratio a (euclidean) or b (sphere)
    alpha: float
    R: float

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise InvalidOffset(f"offset ratio must satisfy |a| < 1, got {self.a}")
        if self.R <= 0 or (self.model == "sphere" and self.R >= math.pi):
            raise ValueError(f"bad circle radius {self.R}")

    def radius(self, theta):
        if self.model == "euclidean":
            return euclidean_circle_radius(self.a, self.alpha, self.R, theta)
        return spherical_circle_radius(self.a, self.R, theta)


def euclidean_circle_radius(a, alpha, R, theta):
    """Polar radius of the circle centred at a R (sin alpha, cos alpha) with radius R."""
    if not abs(a) < 1:
        raise InvalidOffset(f"offset ratio must satisfy |a| < 1, got {a}")
    proj = a * R * np.sin(np.asarray(theta) + alpha)  # centre . (cos theta, sin theta)
    return proj + np.sqrt(proj * proj + (1.0 - a * a) * R * R)


def euclidean_circle(a, alpha, R, n, warp: WarpPotential | None = None) -> RadialCurve:
    """Radial graph of a translated Euclidean circle with r_s = a cos(theta + alpha)."""
    if R <= 0:
        raise ValueError("circle radius must be positive")
    warp = warp or WarpPotential.euclidean()
    return RadialCurve.from_function(warp, n, lambda th: euclidean_circle_radius(a, alpha, R, th))


def sphere_center_offset(b, R):
    """Angular distance f of the centre from the pole: sin f = b sin R."""
    return math.asin(b * math.sin(R))


def spherical_circle_radius(b, R, theta):
    """Colatitude of the geodesic circle of radius R about p on the meridian theta = pi.

    p = (-sin f, 0, cos f) with sin f = b sin R; this orientation gives
    r_s = b sin(theta).
    """
    if not abs(b) < 1:
        raise InvalidOffset(f"offset ratio must satisfy |b| < 1, got {b}")
    if not 0 < R < math.pi:
        raise ValueError("geodesic radius must lie in (0, pi)")
    f = sphere_center_offset(b, R)
    if abs(f) + R >= math.pi or abs(f) >= R:
        raise PoleCrossing(f"circle (b={b}, R={R}) meets a pole")
    theta = np.asarray(theta, dtype=float)
    # q . p = cos R with q = (sin r cos t, sin r sin t, cos r)
    A = math.cos(f)
    B = -math.sin(f) * np.cos(theta)
    amp = np.sqrt(A * A + B * B)
    return np.arctan2(B, A) + np.arccos(math.cos(R) / amp)


def spherical_circle(b, R, n, warp: WarpPotential | None = None) -> RadialCurve:
    """Radial graph of a geodesic circle on the unit sphere with r_s = b sin(theta)."""
    warp = warp or WarpPotential.sphere()
    return RadialCurve.from_function(warp, n, lambda th: spherical_circle_radius(b, R, th))


@dataclass(frozen=True)
class ProfileFit:
    residual: float
    a: float
    alpha: float


def rs_profile_residual(curve: RadialCurve, a: float | None = None, alpha: float | None = None) -> ProfileFit:
    """max_j |r_s - a cos(theta_j + alpha)|.

    Without ``a`` the first-harmonic least-squares fit of r_s is used.
    """
    b = geometry(curve).b
    th = curve.theta
    if a is None:
        c1 = 2 * float(np.mean(b * np.cos(th)))
        s1 = 2 * float(np.mean(b * np.sin(th)))
        a = math.hypot(c1, s1)
        alpha = math.atan2(-s1, c1)
    elif alpha is None:
        alpha = 0.0
    res = float(np.max(np.abs(b - a * np.cos(th + alpha))))
    return ProfileFit(residual=res, a=float(a), alpha=float(alpha))


@dataclass
class CharacteristicPath:
    s: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    closure_defect: float
    s_close: float

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "r", "theta"])
            for row in zip(self.s, self.r, self.theta):
                w.writerow([repr(float(v)) for v in row])


def _hermite(y0, y1, d0, d1, h, tau):
    x = tau / h
    h00 = 2 * x**3 - 3 * x**2 + 1
    h10 = x**3 - 2 * x**2 + x
    h01 = -2 * x**3 + 3 * x**2
    h11 = x**3 - x**2
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1


def _hermite_slope(y0, y1, d0, d1, h, tau):
    x = tau / h
    return ((6 * x**2 - 6 * x) * y0 + (3 * x**2 - 4 * x + 1) * h * d0
            + (-6 * x**2 + 6 * x) * y1 + (3 * x**2 - 2 * x) * h * d1) / h


def integrate_characteristic(warp: WarpPotential, a: float, alpha: float, p0, ds: float = 1e-3,
                             max_length: float | None = None) -> CharacteristicPath:
    """Integrate r' = a cos(theta + alpha), theta' = sqrt(1 - a^2 cos^2(theta + alpha)) / phi(r).

    Arc length is the parameter. Integration stops once theta has advanced
    by 2 pi; the crossing is located on the last step by cubic Hermite
    interpolation. ``closure_defect`` is |r_end - r0| + |theta_end - theta0 - 2 pi|.
    """
    if not abs(a) < 1:
        raise InvalidOffset(f"offset ratio must satisfy |a| < 1, got {a}")
    r0, th0 = float(p0[0]), float(p0[1])
    lo, hi = warp.domain

    def rhs(r, th):
        if not lo < r < hi:
            raise OutOfDomain(f"characteristic left warp domain at r={r}")
        c = math.cos(th + alpha)
        dth = math.sqrt(1.0 - a * a * c * c) / float(warp._phi(r))
        if dth < 1e-12:
            raise StalledTheta(f"theta' = {dth} at r={r}")
        return a * c, dth

    target = th0 + TWO_PI
    if max_length is None:
        max_length = 100.0 * TWO_PI * max(1.0, float(warp._phi(r0)))
    s_list, r_list, t_list = [0.0], [r0], [th0]
    r, th, s = r0, th0, 0.0
    dr, dth = rhs(r, th)
    while s < max_length:
        k1 = (dr, dth)
        k2 = rhs(r + 0.5 * ds * k1[0], th + 0.5 * ds * k1[1])
        k3 = rhs(r + 0.5 * ds * k2[0], th + 0.5 * ds * k2[1])
        k4 = rhs(r + ds * k3[0], th + ds * k3[1])
        r_new = r + ds / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        th_new = th + ds / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        dr_new, dth_new = rhs(r_new, th_new)
        if th_new >= target:
            # Newton on the Hermite cubic theta(tau) = target
            tau = ds * (target - th) / (th_new - th)
            for _ in range(20):
                g = _hermite(th, th_new, dth, dth_new, ds, tau) - target
                gp = _hermite_slope(th, th_new, dth, dth_new, ds, tau)
                step = g / gp
                tau -= step
                if abs(step) < 1e-16 * ds:
                    break
            r_end = _hermite(r, r_new, dr, dr_new, ds, tau)
            th_end = _hermite(th, th_new, dth, dth_new, ds, tau)
            s_list.append(s + tau)
            r_list.append(r_end)
            t_list.append(th_end)
            defect = abs(r_end - r0) + abs(th_end - target)
            path = CharacteristicPath(np.array(s_list), np.array(r_list), np.array(t_list), defect, s + tau)
            _warn_if_not_spaceform(warp, path.r)
            return path
        r, th, s = r_new, th_new, s + ds
        dr, dth = dr_new, dth_new
        s_list.append(s)
        r_list.append(r)
        t_list.append(th)
    raise StalledTheta(f"theta did not advance by 2 pi within arc length {max_length}")


def _warn_if_not_spaceform(warp, r):
    rr = np.linspace(float(np.min(r)), float(np.max(r)), 33)
    beta = warp.beta(rr)
    if np.max(np.abs(beta - 1.0)) > 1e-8:
        warnings.warn("beta != 1 on the traversed range; closure is not expected", RuntimeWarning)


def f_monotonicity(b: float, R_grid) -> tuple[bool, bool]:
    """Whether f(R) + R increases and f(R) - R decreases along ``R_grid``."""
    R = np.asarray(R_grid, dtype=float)
    f = np.arcsin(b * np.sin(R))
    return bool(np.all(np.diff(f + R) > 0)), bool(np.all(np.diff(f - R) < 0))
