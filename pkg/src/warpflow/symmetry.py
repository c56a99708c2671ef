"""Reflections theta -> 2 alpha - theta, cut-and-reflect and mollification."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import RadialCurve, area, differentiate, length
from .errors import OffGridAxis

TWO_PI = 2 * math.pi


def _axis_index(curve: RadialCurve, alpha: float) -> int:
    """Integer m with 2 alpha = m dtheta, so node j reflects onto node m - j."""
    x = 2 * alpha / curve.dtheta
    m = round(x)
    if abs(x - m) > 1e-9 * max(1.0, abs(x)):
        raise OffGridAxis(f"axis {alpha} is not on the grid or half-grid of n={curve.n}")
    return m % (2 * curve.n)


def _mirror(curve: RadialCurve, m: int) -> np.ndarray:
    return (m - np.arange(curve.n)) % curve.n


def reflect(curve: RadialCurve, alpha: float) -> RadialCurve:
    idx = _mirror(curve, _axis_index(curve, alpha))
    rho_t = None if curve.rho_theta is None else -curve.rho_theta[idx]
    return RadialCurve(curve.warp, curve.rho[idx], rho_t)


def symmetry_defect(curve: RadialCurve, alpha: float) -> float:
    idx = _mirror(curve, _axis_index(curve, alpha))
    return float(np.max(np.abs(curve.rho - curve.rho[idx])))


def cut_and_reflect(curve: RadialCurve, alpha: float) -> tuple[RadialCurve, RadialCurve]:
    """Split into two curves symmetric about ``alpha``.

    The first keeps rho on theta in [alpha - pi, alpha], the second on
    [alpha, alpha + pi]; each mirrors its kept half onto the other. Nodes
    on the axis belong to both kept halves. The outputs carry explicit
    derivative samples (mirrored with a sign flip) because they are only
    piecewise C^1; this makes L1 + L2 = 2 L0 hold at quadrature precision.
    """
    n = curve.n
    m = _axis_index(curve, alpha)
    j = np.arange(n)
    idx = _mirror(curve, m)
    # twice the angular offset alpha - theta_j, in units of dtheta, mod 2 pi
    d = (m - 2 * j) % (2 * n)
    keep1 = d <= n
    keep2 = (d == 0) | (d >= n)
    rho_t = differentiate(curve)[0]
    out = []
    for keep in (keep1, keep2):
        rho = np.where(keep, curve.rho, curve.rho[idx])
        drho = np.where(keep, rho_t, -rho_t[idx])
        out.append(RadialCurve(curve.warp, rho, drho))
    return out[0], out[1]


def rotate(curve: RadialCurve, shift: float) -> RadialCurve:
    """Curve with rho_new(theta) = rho(theta + shift).

    Whole-node shifts are exact rolls; other shifts use the trigonometric
    interpolant and drop any explicit derivative samples.
    """
    x = shift / curve.dtheta
    s = round(x)
    if abs(x - s) <= 1e-12 * max(1.0, abs(x)):
        rho_t = None if curve.rho_theta is None else np.roll(curve.rho_theta, -s)
        return RadialCurve(curve.warp, np.roll(curve.rho, -s), rho_t)
    n = curve.n
    k = np.arange(n // 2 + 1)
    # on the grid sin(n theta_j / 2) = 0, so irfft's real part of the
    # shifted Nyquist coefficient is the exact interpolant
    coef = np.fft.rfft(curve.rho) * np.exp(1j * k * shift)
    return curve.with_rho(np.fft.irfft(coef, n))


def area_imbalance(curve: RadialCurve, alpha: float) -> float:
    """A1 - A2 for the cut at ``alpha`` after rotating the axis onto theta = 0."""
    c1, c2 = cut_and_reflect(rotate(curve, alpha), 0.0)
    return area(c1) - area(c2)


def equalizing_axis(curve: RadialCurve, rtol: float = 1e-10) -> float:
    """Axis angle in [0, pi] whose cut halves enclose equal area.

    Uses h(alpha + pi) = -h(alpha) to bracket a root on [0, pi] and
    bisects. Returns 0 when h(0) already vanishes.
    """
    target = rtol * abs(area(curve))
    lo, hi = 0.0, math.pi
    h_lo = area_imbalance(curve, lo)
    if abs(h_lo) <= target:
        return 0.0
    h_hi = area_imbalance(curve, hi)
    if abs(h_hi) <= target:
        return hi
    best, best_h = lo, abs(h_lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        h_mid = area_imbalance(curve, mid)
        if abs(h_mid) < best_h:
            best, best_h = mid, abs(h_mid)
        if abs(h_mid) <= target or hi - lo < 1e-15:
            break
        if (h_mid > 0) == (h_lo > 0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid
    return best


@dataclass
class Symmetrization:
    alpha: float
    source: RadialCurve  # input rotated so the axis sits at theta = 0
    curve1: RadialCurve
    curve2: RadialCurve
    L0: float
    A0: float
    L1: float
    L2: float
    A1: float
    A2: float

    def report(self) -> dict:
        return {
            "alpha": self.alpha,
            "L0": self.L0,
            "A0": self.A0,
            "L1": self.L1,
            "L2": self.L2,
            "A1": self.A1,
            "A2": self.A2,
            "area_balance": abs(self.A1 - self.A2) / abs(self.A0),
            "length_sum_error": abs(self.L1 + self.L2 - 2 * self.L0) / self.L0,
            "area_sum_error": abs(self.A1 + self.A2 - 2 * self.A0) / abs(self.A0),
            "length_bracketed": min(self.L1, self.L2) <= self.L0 <= max(self.L1, self.L2),
        }


def symmetrize(curve: RadialCurve) -> Symmetrization:
    """Equal-area cut-and-reflect of ``curve``."""
    alpha = equalizing_axis(curve)
    src = rotate(curve, alpha)
    c1, c2 = cut_and_reflect(src, 0.0)
    return Symmetrization(
        alpha=alpha,
        source=src,
        curve1=c1,
        curve2=c2,
        L0=length(src),
        A0=area(src),
        L1=length(c1),
        L2=length(c2),
        A1=area(c1),
        A2=area(c2),
    )


def bump_kernel(n: int, h: float) -> np.ndarray:
    """Grid weights of exp(1/((theta/h)^2 - 1)), unit mass under dtheta-sums."""
    dtheta = TWO_PI / n
    j = np.arange(n)
    offset = np.minimum(j, n - j) * dtheta
    x = offset / h
    w = np.zeros(n)
    inside = x < 1
    w[inside] = np.exp(1.0 / (x[inside] ** 2 - 1.0))
    return w / (w.sum() * dtheta)


def mollify(curve: RadialCurve, h: float) -> RadialCurve:
    """Periodic convolution with the even bump of half-width ``h``."""
    if not 0 < h < math.pi:
        raise ValueError("smoothing width must lie in (0, pi)")
    n = curve.n
    w = bump_kernel(n, h) * curve.dtheta
    out = np.zeros(n)
    for s in np.nonzero(w)[0]:
        out += w[s] * np.roll(curve.rho, s)
    return curve.with_rho(out)
