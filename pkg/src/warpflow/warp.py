"""Warp potentials for surfaces with metric dr^2 + phi(r)^2 dtheta^2.

A :class:`WarpPotential` bundles phi with its first two derivatives, the
area density antiderivative ``Phi(r) = int_0^r phi``, the quantity
``beta = phi'^2 - phi phi''`` and the isoperimetric profile of coordinate
slices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import (
    DegeneratePotential,
    InconsistentCurvature,
    NotSpaceform,
    OutOfDomain,
    OutOfRange,
)

FAMILIES = ("euclidean", "sphere", "hyperbolic", "cylinder", "scaled_sinh", "tabulated")

SPHERE_EPS = 1e-3
_PROBE_POINTS = 257
_PROBE_SPAN = 50.0  # probe extent used for unbounded domains


@dataclass(frozen=True, eq=False)
class WarpPotential:
    """Immutable warp potential on the open interval ``domain``.

    Build instances with the family constructors (:meth:`euclidean`,
    :meth:`sphere`, ...) or :meth:`from_dict`.
    """

    family: str
    params: dict
    domain: tuple[float, float]
    phi_floor: float = 1e-8
    _spline: Any = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown warp family {self.family!r}")
        lo, hi = float(self.domain[0]), float(self.domain[1])
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")
        object.__setattr__(self, "domain", (lo, hi))
        if self.family == "tabulated" and self._spline is None:
            r = np.asarray(self.params["r"], dtype=float)
            phi = np.asarray(self.params["phi"], dtype=float)
            object.__setattr__(self, "_spline", CubicSpline(r, phi))
        probe = self.probe_grid()
        if np.any(~(self._phi(probe) > self.phi_floor)):
            raise DegeneratePotential(
                f"{self.family} warp has phi <= {self.phi_floor} inside {self.domain}"
            )

    # -- constructors -------------------------------------------------

    @classmethod
    def euclidean(cls, r0=0.0, domain=None, **kw):
        return cls("euclidean", {"r0": float(r0)}, domain or (float(r0), math.inf), **kw)

    @classmethod
    def sphere(cls, k=1.0, r0=0.0, domain=None, **kw):
        # phi = sin(k(r - r0))/k so that beta == 1 and K = k^2
        if domain is None:
            domain = (r0 + SPHERE_EPS, r0 + math.pi / k - SPHERE_EPS)
        return cls("sphere", {"k": float(k), "r0": float(r0)}, domain, **kw)

    @classmethod
    def hyperbolic(cls, k=1.0, r0=0.0, domain=None, **kw):
        return cls("hyperbolic", {"k": float(k), "r0": float(r0)}, domain or (float(r0), math.inf), **kw)

    @classmethod
    def cylinder(cls, c=1.0, domain=None, **kw):
        return cls("cylinder", {"c": float(c)}, domain or (0.0, math.inf), **kw)

    @classmethod
    def scaled_sinh(cls, amplitude=1.0, k=1.0, domain=None, **kw):
        """phi = amplitude * sinh(k r), with constant beta = amplitude^2 k^2."""
        return cls(
            "scaled_sinh", {"amplitude": float(amplitude), "k": float(k)}, domain or (0.0, math.inf), **kw
        )

    @classmethod
    def tabulated(cls, r, phi, domain=None, **kw):
        r = [float(x) for x in r]
        phi = [float(x) for x in phi]
        if len(r) < 4 or np.any(np.diff(r) <= 0):
            raise ValueError("tabulated warp needs >= 4 increasing r samples")
        return cls("tabulated", {"r": r, "phi": phi}, domain or (r[0], r[-1]), **kw)

    @classmethod
    def from_dict(cls, spec: dict) -> "WarpPotential":
        spec = dict(spec)
        family = spec.pop("family", None)
        if family not in FAMILIES:
            raise ValueError(f"unknown warp family {family!r}")
        domain = spec.pop("domain", None)
        if domain is not None:
            domain = tuple(math.inf if d is None else float(d) for d in domain)
        phi_floor = spec.pop("phi_floor", 1e-8)
        ctor = getattr(cls, family)
        return ctor(domain=domain, phi_floor=phi_floor, **spec)

    def to_dict(self) -> dict:
        out = {"family": self.family, **self.params}
        out["domain"] = [None if math.isinf(d) else d for d in self.domain]
        out["phi_floor"] = self.phi_floor
        return out

    # -- raw evaluation (no checks) -------------------------------------

    def _phi(self, r):
        f, p = self.family, self.params
        if f == "euclidean":
            return r - p["r0"]
        if f == "sphere":
            return np.sin(p["k"] * (r - p["r0"])) / p["k"]
        if f == "hyperbolic":
            return np.sinh(p["k"] * (r - p["r0"])) / p["k"]
        if f == "cylinder":
            return np.full_like(np.asarray(r, dtype=float), p["c"])
        if f == "scaled_sinh":
            return p["amplitude"] * np.sinh(p["k"] * r)
        return self._spline(r)

    def _dphi(self, r):
        f, p = self.family, self.params
        if f == "euclidean":
            return np.ones_like(np.asarray(r, dtype=float))
        if f == "sphere":
            return np.cos(p["k"] * (r - p["r0"]))
        if f == "hyperbolic":
            return np.cosh(p["k"] * (r - p["r0"]))
        if f == "cylinder":
            return np.zeros_like(np.asarray(r, dtype=float))
        if f == "scaled_sinh":
            return p["amplitude"] * p["k"] * np.cosh(p["k"] * r)
        return self._spline(r, 1)

    def _ddphi(self, r):
        f, p = self.family, self.params
        if f in ("euclidean", "cylinder"):
            return np.zeros_like(np.asarray(r, dtype=float))
        if f == "sphere":
            return -p["k"] * np.sin(p["k"] * (r - p["r0"]))
        if f == "hyperbolic":
            return p["k"] * np.sinh(p["k"] * (r - p["r0"]))
        if f == "scaled_sinh":
            return p["amplitude"] * p["k"] ** 2 * np.sinh(p["k"] * r)
        return self._spline(r, 2)

    def _big_phi(self, r):
        f, p = self.family, self.params
        if f == "euclidean":
            return 0.5 * r * r - p["r0"] * r
        if f == "sphere":
            k, r0 = p["k"], p["r0"]
            return (math.cos(k * r0) - np.cos(k * (r - r0))) / k**2
        if f == "hyperbolic":
            k, r0 = p["k"], p["r0"]
            return (np.cosh(k * (r - r0)) - math.cosh(k * r0)) / k**2
        if f == "cylinder":
            return p["c"] * r
        if f == "scaled_sinh":
            k = p["k"]
            return p["amplitude"] * (np.cosh(k * r) - 1.0) / k
        # spline is extrapolated below the first sample when integrating from 0
        vals = [quad(self._spline, 0.0, float(x), epsabs=1e-12, epsrel=1e-12, limit=200)[0]
                for x in np.ravel(r)]
        return np.reshape(vals, np.shape(r)) if np.ndim(r) else vals[0]

    # -- checked evaluation ---------------------------------------------

    def probe_grid(self, m: int = _PROBE_POINTS) -> np.ndarray:
        lo, hi = self.domain
        if math.isinf(hi):
            hi = lo + _PROBE_SPAN
        return np.linspace(lo, hi, m)[1:-1]

    def contains(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        lo, hi = self.domain
        return bool(np.all((r > lo) & (r < hi)))

    def _check(self, r):
        if not self.contains(r):
            raise OutOfDomain(f"radius outside {self.family} domain {self.domain}")

    def phi(self, r):
        self._check(r)
        out = self._phi(r)
        if np.any(out < self.phi_floor):
            raise DegeneratePotential(f"phi below floor {self.phi_floor}")
        return out

    def eval(self, r):
        """Return ``(phi, dphi, ddphi, beta)`` at ``r`` (scalar or array)."""
        phi = self.phi(r)
        dphi = self._dphi(r)
        ddphi = self._ddphi(r)
        return phi, dphi, ddphi, dphi * dphi - phi * ddphi

    def beta(self, r):
        return self.eval(r)[3]

    def gauss_curvature(self, r):
        phi, _, ddphi, _ = self.eval(r)
        return -ddphi / phi

    def nominal_beta(self):
        """Closed-form constant beta of the family, or None for tabulated data."""
        f, p = self.family, self.params
        if f in ("euclidean", "sphere", "hyperbolic"):
            return 1.0
        if f == "cylinder":
            return 0.0
        if f == "scaled_sinh":
            return (p["amplitude"] * p["k"]) ** 2
        return None

    def big_phi(self, r):
        """Area density antiderivative, ``2*pi*big_phi(r)`` is the slice area."""
        lo, hi = self.domain
        ra = np.asarray(r, dtype=float)
        if np.any(ra < 0) or np.any(ra < lo) or np.any(ra > hi):
            raise OutOfDomain(f"radius outside closure of {self.domain}")
        return self._big_phi(ra if np.ndim(r) else float(r))

    # -- slices ---------------------------------------------------------

    def radius_of_area(self, area: float) -> float:
        """Radius of the slice enclosing ``area``: solves 2*pi*Phi(r) = area."""
        lo, hi = self.domain
        lo = max(lo, 0.0)
        a_lo = 2 * math.pi * self._big_phi(lo)
        if math.isinf(hi):
            hi = max(1.0, 2 * lo)
            while 2 * math.pi * self._big_phi(hi) < area:
                hi *= 2
                if hi > 1e6:
                    raise OutOfRange(f"area {area} not attained")
            a_hi = math.inf
        else:
            a_hi = 2 * math.pi * self._big_phi(hi)
        if not a_lo < area < a_hi:
            raise OutOfRange(f"area {area} outside ({a_lo}, {a_hi})")

        def resid(r):
            return 2 * math.pi * self._big_phi(r) - area

        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if resid(mid) > 0:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-9 * max(1.0, abs(hi)):
                break
        r = 0.5 * (lo + hi)
        for _ in range(8):
            res = resid(r)
            if abs(res) <= 1e-13 * abs(area):
                break
            step = res / (2 * math.pi * float(self._phi(r)))
            r = min(max(r - step, lo), hi)
        return float(r)

    def iso_profile(self, area: float) -> float:
        """F(A): squared length of the slice enclosing ``area``."""
        r = self.radius_of_area(area)
        return float((2 * math.pi * self.phi(r)) ** 2)


@dataclass(frozen=True)
class SpaceformClassification:
    curvature_sign: str  # "negative" | "zero" | "positive"
    k: float | None
    r0: float
    gauss_curvature: float
    amplitude: float
    unit_beta: bool


_TEMPLATES = {
    "positive": lambda x, k: np.sin(k * x) / k,
    "negative": lambda x, k: np.sinh(k * x) / k,
    "zero": lambda x, k: x,
}


def classify_spaceform(warp: WarpPotential, interval, tol: float = 1e-8) -> SpaceformClassification:
    """Identify a constant-curvature warp as sinh/sin/linear in ``r - r0``.

    The potential must have constant beta on ``interval``; it is then
    ``amplitude * template(r - r0)`` with templates ``sinh(k x)/k``,
    ``sin(k x)/k`` and ``x``, and ``amplitude = sqrt(beta)``.
    """
    r1, r2 = map(float, interval)
    r = np.linspace(r1, r2, 129)
    phi, dphi, ddphi, beta = warp.eval(r)
    beta_mean = float(np.mean(beta))
    if beta_mean <= 0 or np.max(np.abs(beta - beta_mean)) > tol * max(1.0, beta_mean):
        raise NotSpaceform(f"beta not constant on {interval}: range [{beta.min()}, {beta.max()}]")
    K = -ddphi / phi
    K_mean = float(np.mean(K))
    if np.max(np.abs(K - K_mean)) > tol * max(1.0, abs(K_mean)):
        raise InconsistentCurvature(f"Gauss curvature varies on {interval}")
    amp = math.sqrt(beta_mean)
    if abs(K_mean) <= tol:
        sign, k = "zero", None
        x = float(phi[0]) / amp
    else:
        k = math.sqrt(abs(K_mean))
        if K_mean > 0:
            sign = "positive"
            x = math.atan2(k * float(phi[0]), float(dphi[0])) / k
        else:
            sign = "negative"
            x = math.asinh(k * float(phi[0]) / amp) / k
    template = _TEMPLATES[sign]
    kk = k if k is not None else 1.0
    r0 = r1 - x
    # Newton polish of phi(r1) = amp * template(r1 - r0) in r0
    for _ in range(3):
        res = amp * template(r1 - r0, kk) - float(phi[0])
        deriv = -float(dphi[0])
        if deriv == 0:
            break
        r0 -= res / deriv
    fit = amp * template(r - r0, kk)
    if np.max(np.abs(fit - phi)) > tol * max(1.0, float(np.max(np.abs(phi)))):
        raise InconsistentCurvature("closed form does not reproduce phi")
    return SpaceformClassification(
        curvature_sign=sign,
        k=k,
        r0=float(r0),
        gauss_curvature=0.0 if sign == "zero" else K_mean,
        amplitude=amp,
        unit_beta=abs(beta_mean - 1.0) <= tol,
    )
