"""Method-of-lines integration of the radial-graph flow.

The radius evolves by

    rho_t = (phi^3 rho_tt + phi' rho_t^4) / (phi (phi^2 + rho_t^2)^(3/2)),

the radial-graph form of the normal speed phi' - u kappa. Spatial
derivatives are spectral, time stepping is classical RK4.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .curve import RadialCurve, differentiate, functionals, geometry, periodic_derivative
from .errors import BoundsViolation, OutOfDomain, WarpFlowError


@lru_cache(maxsize=16)
def _spectral_ops(n: int) -> np.ndarray:
    k = np.arange(n // 2 + 1)
    ik = 1j * k
    ik[-1] = 0.0
    return np.stack([ik, -(k * k).astype(complex)])


def _derivs(rho: np.ndarray):
    n = rho.shape[0]
    return np.fft.irfft(_spectral_ops(n) * np.fft.rfft(rho), n)


def _rhs(warp, rho, derivs=None):
    # stage values are validated once per step, not per stage
    rt, rtt = _derivs(rho) if derivs is None else derivs
    phi = warp._phi(rho)
    dphi = warp._dphi(rho)
    rt2 = rt * rt
    s2 = phi * phi + rt2
    return (phi * phi * phi * rtt + dphi * rt2 * rt2) / (phi * s2 * np.sqrt(s2))


def _check_state(warp, rho):
    if not np.all(np.isfinite(rho)) or not warp.contains(rho):
        raise OutOfDomain(f"flow left warp domain {warp.domain}")
    warp.phi(rho)


def rhs(curve: RadialCurve) -> np.ndarray:
    """Time derivative of rho at every node."""
    _check_state(curve.warp, curve.rho)
    return _rhs(curve.warp, curve.rho)


def stable_dt(curve: RadialCurve, safety: float = 0.5) -> float:
    """Explicit step bound safety / (D_max (n/2)^2), D = phi^2 / (phi^2 + rho_t^2)^(3/2)."""
    rho_t = differentiate(curve)[0]
    phi = curve.warp.phi(curve.rho)
    d_max = float(np.max(phi * phi / (phi * phi + rho_t * rho_t) ** 1.5))
    return safety / (d_max * (curve.n / 2) ** 2)


def _rk4(warp, rho, dt, derivs=None):
    k1 = _rhs(warp, rho, derivs)
    k2 = _rhs(warp, rho + 0.5 * dt * k1)
    k3 = _rhs(warp, rho + 0.5 * dt * k2)
    k4 = _rhs(warp, rho + dt * k3)
    return rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def step(curve: RadialCurve, dt: float, bounds: tuple[float, float] | None = None) -> RadialCurve:
    """One RK4 step. ``bounds`` is the allowed (min, max) envelope for rho."""
    rho = _rk4(curve.warp, curve.rho, dt)
    _check_state(curve.warp, rho)
    if bounds is not None and (rho.min() < bounds[0] or rho.max() > bounds[1]):
        raise BoundsViolation(
            f"rho range [{rho.min():.12g}, {rho.max():.12g}] left [{bounds[0]:.12g}, {bounds[1]:.12g}]"
        )
    return curve.with_rho(rho)


def dLdt_formula(curve: RadialCurve) -> tuple[float, float]:
    """Length derivative along the flow, in two forms.

    Returns ``(int beta b^2 - b_theta^2 dtheta, int kappa Phi_ss ds)``.
    """
    g = geometry(curve)
    beta = curve.warp.beta(curve.rho)
    b_t = periodic_derivative(g.b)
    theta_form = float(np.sum(beta * g.b**2 - b_t**2) * curve.dtheta)
    cross = float(np.sum(g.kappa * g.phi_ss * g.s_theta) * curve.dtheta)
    return theta_form, cross


def max_gradient_sq(curve: RadialCurve, refine: int = 16) -> float:
    """max over the circle of omega = rho_theta^2, located off-grid.

    The trigonometric interpolant of rho_theta is sampled on a grid
    ``refine`` times finer and the peak is polished by Newton steps.
    """
    if curve.rho_theta is not None:
        return float(np.max(curve.rho_theta**2))
    n = curve.n
    coef = np.fft.rfft(curve.rho) / n
    k = np.arange(n // 2 + 1)
    c1 = 1j * k * coef
    c1[-1] = 0.0
    m = refine * n
    fine = np.fft.irfft(c1 * m, m)
    j = int(np.argmax(fine**2))
    th = 2 * math.pi * j / m
    w = np.where((k == 0) | (k == n // 2), 1.0, 2.0)

    def series(c, x):
        return float(np.sum(w * (c * np.exp(1j * k * x)).real))

    c2 = 1j * k * c1
    c3 = 1j * k * c2
    for _ in range(6):
        d3 = series(c3, th)
        if d3 == 0.0:
            break
        delta = series(c2, th) / d3
        th -= delta
        if abs(delta) < 1e-15:
            break
    return max(series(c1, th) ** 2, float(fine[j] ** 2))


@dataclass
class FlowConfig:
    safety: float = 0.5
    t_max: float = 100.0
    osc_tol: float = 1e-8
    sample_every: int = 100
    enforce_bounds: bool = True

    def __post_init__(self):
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")
        if not self.osc_tol > 0:
            raise ValueError("osc_tol must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")


class TraceRow(NamedTuple):
    t: float
    L: float
    A: float
    osc: float
    max_omega: float
    dLdt_formula: float
    lam: float | None


TRACE_HEADER = ("t", "L", "A", "osc", "max_omega", "dLdt_formula", "lambda")


@dataclass
class FlowTrace:
    rows: list[TraceRow]
    final: RadialCurve
    termination: str  # converged | horizon | error
    steps: int = 0
    samples: list[RadialCurve] = field(default_factory=list, repr=False)
    error: str | None = None

    def column(self, name: str) -> np.ndarray:
        idx = TraceRow._fields.index("lam" if name == "lambda" else name)
        return np.array([np.nan if r[idx] is None else r[idx] for r in self.rows], dtype=float)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_HEADER)
            for r in self.rows:
                w.writerow(["" if v is None else repr(float(v)) for v in r])


class FlowFailure(WarpFlowError):
    """Raised by :func:`evolve` when a step fails; carries the partial trace."""

    def __init__(self, cause: Exception, trace: FlowTrace):
        super().__init__(f"{type(cause).__name__}: {cause}")
        self.cause = cause
        self.trace = trace


def sample_row(curve: RadialCurve, t: float) -> TraceRow:
    f = functionals(curve)
    return TraceRow(
        t=float(t),
        L=f.L,
        A=f.A,
        osc=f.osc,
        max_omega=max_gradient_sq(curve),
        dLdt_formula=dLdt_formula(curve)[0],
        lam=f.lam,
    )


def evolve(curve: RadialCurve, config: FlowConfig | None = None, keep_samples: bool = False) -> FlowTrace:
    """Run the flow until osc < osc_tol or t >= t_max.

    Diagnostics are recorded at t = 0, every ``sample_every`` steps and at
    the final state. Step failures raise :class:`FlowFailure`.
    """
    cfg = config or FlowConfig()
    slack = 10 * cfg.osc_tol
    bounds = (curve.rho.min() - slack, curve.rho.max() + slack) if cfg.enforce_bounds else None
    rows = [sample_row(curve, 0.0)]
    samples = [curve] if keep_samples else []
    if np.ptp(curve.rho) < cfg.osc_tol:
        return FlowTrace(rows, curve, "converged", 0, samples)

    warp = curve.warp
    half_n2 = (curve.n / 2) ** 2
    rho = np.array(curve.rho)
    t, steps = 0.0, 0
    while True:
        try:
            derivs = _derivs(rho)
            rt = derivs[0]
            phi = warp._phi(rho)
            s2 = phi * phi + rt * rt
            d_max = float(np.max(phi * phi / (s2 * np.sqrt(s2))))
            dt = min(cfg.safety / (d_max * half_n2), cfg.t_max - t)
            new = _rk4(warp, rho, dt, derivs)
            _check_state(warp, new)
            if bounds is not None and (new.min() < bounds[0] or new.max() > bounds[1]):
                raise BoundsViolation(
                    f"rho range [{new.min():.12g}, {new.max():.12g}] left "
                    f"[{bounds[0]:.12g}, {bounds[1]:.12g}] at t={t + dt:.6g}"
                )
        except WarpFlowError as exc:
            current = curve.with_rho(rho)
            trace = FlowTrace(rows, current, "error", steps, samples, error=str(exc))
            raise FlowFailure(exc, trace) from exc
        rho = new
        t += dt
        steps += 1
        converged = np.ptp(rho) < cfg.osc_tol
        done = converged or t >= cfg.t_max
        if done or steps % cfg.sample_every == 0:
            current = curve.with_rho(rho)
            rows.append(sample_row(current, t))
            if keep_samples:
                samples.append(current)
        if done:
            return FlowTrace(rows, curve.with_rho(rho), "converged" if converged else "horizon", steps, samples)


def gradient_barrier(v0: float, c1: float, c2: float, t_grid) -> np.ndarray:
    """RK4 solution of v' = -c1 v^3 - c2 v^4 sampled at ``t_grid`` (from t=0)."""
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty_like(t_grid)
    if v0 == 0:
        out[:] = 0.0
        return out

    def f(v):
        return -c1 * v**3 - c2 * v**4

    t, v = 0.0, float(v0)
    for i, target in enumerate(t_grid):
        while t < target:
            rate = c1 * v * v + c2 * v**3
            h = min(target - t, 0.002 / rate if rate > 0 else target - t)
            k1 = f(v)
            k2 = f(v + 0.5 * h * k1)
            k3 = f(v + 0.5 * h * k2)
            k4 = f(v + h * k3)
            v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            t = target if h == target - t else t + h
        out[i] = v
    return out
