"""Radial-graph curves r = rho(theta) sampled on a uniform periodic grid."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OutOfDomain
from .warp import WarpPotential

TWO_PI = 2 * math.pi


def periodic_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of periodic samples on [0, 2pi).

    Exact for trigonometric polynomials of degree < n/2. The Nyquist
    mode is dropped for odd orders.
    """
    n = values.shape[-1]
    coef = np.fft.rfft(values)
    k = np.arange(n // 2 + 1)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[-1] = 0.0
    return np.fft.irfft(coef * mult, n)


@dataclass(frozen=True, eq=False)
class RadialCurve:
    """Closed radial graph over the grid theta_j = 2 pi j / n.

    ``rho_theta`` optionally carries derivative samples for data that is
    only piecewise C^1 (cut-and-reflect output); smooth curves leave it
    unset and are differentiated spectrally.
    """

    warp: WarpPotential
    rho: np.ndarray
    rho_theta: np.ndarray | None = None

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        n = rho.shape[0]
        if rho.ndim != 1 or n < 32 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 32, got {rho.shape}")
        if not np.all(np.isfinite(rho)) or not self.warp.contains(rho):
            raise OutOfDomain(f"curve leaves warp domain {self.warp.domain}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if self.rho_theta is not None:
            d = np.array(self.rho_theta, dtype=float)
            if d.shape != rho.shape:
                raise ValueError("rho_theta must match rho")
            d.setflags(write=False)
            object.__setattr__(self, "rho_theta", d)

    @property
    def n(self) -> int:
        return self.rho.shape[0]

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    @classmethod
    def from_function(cls, warp: WarpPotential, n: int, f: Callable) -> "RadialCurve":
        theta = TWO_PI * np.arange(n) / n
        rho = np.broadcast_to(np.asarray(f(theta), dtype=float), theta.shape)
        return cls(warp, rho)

    @classmethod
    def harmonic(cls, warp, n, r0, cos=None, sin=None) -> "RadialCurve":
        """rho = r0 + sum_k cos[k] cos(k theta) + sin[k] sin(k theta)."""
        def f(theta):
            out = np.full_like(theta, float(r0))
            for k, c in (cos or {}).items():
                out += float(c) * np.cos(int(k) * theta)
            for k, s in (sin or {}).items():
                out += float(s) * np.sin(int(k) * theta)
            return out

        return cls.from_function(warp, n, f)

    def with_rho(self, rho) -> "RadialCurve":
        return RadialCurve(self.warp, rho)


def differentiate(curve: RadialCurve) -> tuple[np.ndarray, np.ndarray]:
    """Return (rho_theta, rho_thetatheta) at the grid nodes."""
    if curve.rho_theta is not None:
        return curve.rho_theta, periodic_derivative(curve.rho_theta)
    coef = np.fft.rfft(curve.rho)
    k = np.arange(curve.n // 2 + 1)
    d1 = 1j * k * coef
    d1[-1] = 0.0
    return np.fft.irfft(d1, curve.n), np.fft.irfft(-(k * k) * coef, curve.n)


@dataclass(frozen=True)
class GeometrySample:
    """Nodewise geometric fields of a radial graph.

    ``b`` is the radial component of the unit tangent (r_s), ``a`` the
    radial component of the outward normal; ``a^2 + b^2 = 1``.
    """

    s_theta: np.ndarray
    a: np.ndarray
    b: np.ndarray
    u: np.ndarray
    kappa: np.ndarray
    phi_s: np.ndarray
    phi_ss: np.ndarray
    speed: np.ndarray


def geometry(curve: RadialCurve) -> GeometrySample:
    rho_t, rho_tt = differentiate(curve)
    phi, dphi, _, _ = curve.warp.eval(curve.rho)
    s_theta = np.sqrt(phi * phi + rho_t * rho_t)
    a = phi / s_theta
    b = rho_t / s_theta
    u = phi * a
    # kappa = phi' a / phi - b_s / a with b_s = (a / phi) b_theta
    kappa = (dphi * a - periodic_derivative(b)) / phi
    phi_ss = (phi**3 * rho_tt + dphi * rho_t**4) / (s_theta**2) ** 2
    return GeometrySample(
        s_theta=s_theta,
        a=a,
        b=b,
        u=u,
        kappa=kappa,
        phi_s=phi * b,
        phi_ss=phi_ss,
        speed=dphi - u * kappa,
    )


@dataclass(frozen=True)
class Functionals:
    L: float
    A: float
    osc: float
    lam: float | None  # L^2 - 4 pi A, Euclidean warps only


def length(curve: RadialCurve) -> float:
    rho_t = differentiate(curve)[0]
    phi = curve.warp.phi(curve.rho)
    return float(np.sum(np.sqrt(phi * phi + rho_t * rho_t)) * curve.dtheta)


def area(curve: RadialCurve) -> float:
    """Enclosed area measured from r = 0, i.e. the sum of Phi(rho) dtheta."""
    return float(np.sum(curve.warp.big_phi(curve.rho)) * curve.dtheta)


def functionals(curve: RadialCurve) -> Functionals:
    L = length(curve)
    A = area(curve)
    lam = L * L - 4 * math.pi * A if curve.warp.family == "euclidean" else None
    return Functionals(L=L, A=A, osc=float(np.ptp(curve.rho)), lam=lam)


def iso_difference(curve: RadialCurve) -> float:
    """Isoperimetric deficit L^2 - F(A)."""
    L = length(curve)
    return L * L - curve.warp.iso_profile(area(curve))


@dataclass(frozen=True)
class PerturbationResult:
    predicted: float
    predicted_unscaled: float
    measured: list[float]
    eps: list[float]


def perturbation_coefficient(warp: WarpPotential, r0: float, g, eps_list, n: int = 256) -> PerturbationResult:
    """Second-order coefficient of the deficit of rho = r0 + eps * g.

    ``predicted`` is the full expansion
    ``4 pi^2 [gbar^2 + mean(g_theta^2 - g^2) + (beta - 1)(gbar^2 - mean(g^2))]``,
    which is what ``measured`` converges to. ``predicted_unscaled`` is the
    same expression with the (beta - 1) term left unscaled by 4 pi^2.
    """
    theta = TWO_PI * np.arange(n) / n
    gv = np.asarray(g(theta) if callable(g) else g, dtype=float)
    gv = np.broadcast_to(gv, theta.shape).copy()
    gbar = float(np.mean(gv))
    g2 = float(np.mean(gv * gv))
    gt2 = float(np.mean(periodic_derivative(gv) ** 2))
    beta = float(warp.beta(r0))
    first = gbar**2 + gt2 - g2
    second = (beta - 1.0) * (gbar**2 - g2)
    measured = []
    for eps in eps_list:
        curve = RadialCurve(warp, r0 + eps * gv)
        measured.append(iso_difference(curve) / eps**2)
    return PerturbationResult(
        predicted=4 * math.pi**2 * (first + second),
        predicted_unscaled=4 * math.pi**2 * first + second,
        measured=measured,
        eps=[float(e) for e in eps_list],
    )


def write_curve_csv(curve: RadialCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "rho"])
        for th, r in zip(curve.theta, curve.rho):
            w.writerow([repr(float(th)), repr(float(r))])


def read_curve_csv(warp: WarpPotential, path) -> RadialCurve:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    theta = np.array([float(r["theta"]) for r in rows])
    rho = np.array([float(r["rho"]) for r in rows])
    n = len(rho)
    if n == 0 or not np.allclose(theta, TWO_PI * np.arange(n) / n, atol=1e-9):
        raise ValueError(f"{path}: theta column is not the uniform grid 2 pi j / n")
    return RadialCurve(warp, rho)
