import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpflow.curve import RadialCurve, functionals, length
from warpflow.errors import BoundsViolation
from warpflow.flow import (
    TRACE_HEADER,
    FlowConfig,
    FlowFailure,
    dLdt_formula,
    evolve,
    gradient_barrier,
    max_gradient_sq,
    rhs,
    stable_dt,
    step,
)
from warpflow.spaceform import euclidean_circle
from warpflow.symmetry import symmetry_defect
from warpflow.warp import WarpPotential

from conftest import builtin_warps, random_trig

E = WarpPotential.euclidean()


def const(warp, n, r):
    return RadialCurve.from_function(warp, n, lambda th: np.full_like(th, r))


def test_stable_dt_examples():
    assert stable_dt(const(E, 64, 1.0)) == pytest.approx(0.5 / 1024, rel=1e-14)
    assert stable_dt(const(E, 128, 1.0)) == pytest.approx(0.5 / 1024 / 4, rel=1e-14)
    # D = 1/c on a cylinder slice
    assert stable_dt(const(WarpPotential.cylinder(2.0), 64, 3.0)) == pytest.approx(0.5 / (0.5 * 1024), rel=1e-14)


@pytest.mark.parametrize("label,warp,r0", builtin_warps())
def test_slices_are_fixed_points(label, warp, r0):
    c = const(warp, 64, r0)
    assert np.max(np.abs(rhs(c))) < 1e-13
    after = step(c, stable_dt(c))
    assert np.max(np.abs(after.rho - r0)) < 1e-13


def test_one_step_reduces_oscillation():
    c = RadialCurve.from_function(E, 64, lambda th: 1 + 0.1 * np.cos(2 * th))
    after = step(c, stable_dt(c))
    assert np.ptp(after.rho) < np.ptp(c.rho)


def test_rk4_fourth_order():
    c = RadialCurve.from_function(E, 32, lambda th: 1 + 0.2 * np.cos(2 * th) + 0.05 * np.sin(3 * th))
    T = 8 * stable_dt(c)

    def run(m):
        x = c
        for _ in range(m):
            x = step(x, T / m)
        return x.rho

    ref = run(64)
    e4, e8 = (np.max(np.abs(run(m) - ref)) for m in (4, 8))
    assert e4 / e8 > 12


def test_bounds_violation_raised():
    c = RadialCurve.from_function(E, 64, lambda th: 1 + 0.1 * np.cos(2 * th))
    with pytest.raises(BoundsViolation):
        step(c, stable_dt(c), bounds=(0.95, 1.05))


def test_evolve_on_slice_terminates_immediately():
    tr = evolve(const(E, 64, 1.3))
    assert tr.termination == "converged" and tr.steps == 0 and len(tr.rows) == 1


def test_evolve_horizon_and_trace(tmp_path):
    c = RadialCurve.from_function(E, 64, lambda th: 1 + 0.1 * np.cos(2 * th))
    tr = evolve(c, FlowConfig(t_max=0.05, sample_every=10), keep_samples=True)
    assert tr.termination == "horizon"
    assert tr.rows[-1].t == pytest.approx(0.05, abs=1e-15)
    assert len(tr.samples) == len(tr.rows)
    tr.write_csv(tmp_path / "trace.csv")
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == ",".join(TRACE_HEADER)
    assert len(lines) == len(tr.rows) + 1


def test_evolve_failure_carries_trace():
    step_fn = lambda th: np.where(np.cos(th) > 0, 1.2, 0.8)
    c = RadialCurve.from_function(E, 64, step_fn)
    with pytest.raises(FlowFailure) as info:
        evolve(c, FlowConfig(t_max=1.0))
    assert info.value.trace.termination == "error"
    assert len(info.value.trace.rows) >= 1


def test_sphere_converges_to_area_slice():
    s = WarpPotential.sphere()
    c = RadialCurve.from_function(s, 64, lambda th: math.pi / 2 + 0.15 * np.cos(3 * th))
    A0 = functionals(c).A
    tr = evolve(c, FlowConfig(safety=1.0, t_max=50.0))
    assert tr.termination == "converged"
    assert abs(np.mean(tr.final.rho) - s.radius_of_area(A0)) < 1e-6


def test_dLdt_examples():
    for warp, r in ((E, 1.0), (WarpPotential.sphere(), 1.0), (WarpPotential.cylinder(1.0), 2.0)):
        a, b = dLdt_formula(const(warp, 64, r))
        assert abs(a) < 1e-13 and abs(b) < 1e-13


def test_dLdt_vanishes_on_translated_circle():
    c = euclidean_circle(0.3, 0.7, 1.0, 256)
    a, b = dLdt_formula(c)
    assert abs(a) < 1e-8 and abs(b) < 1e-8


@given(st.integers(0, 2**32 - 1), st.sampled_from(range(len(builtin_warps()))))
@settings(max_examples=30, deadline=None)
def test_dLdt_forms_agree(seed, which):
    _, warp, r0 = builtin_warps()[which]
    c = RadialCurve.from_function(warp, 128, random_trig(np.random.default_rng(seed), r0, 0.2 * r0))
    a, b = dLdt_formula(c)
    assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


def test_dLdt_matches_finite_difference():
    c = RadialCurve.from_function(E, 128, lambda th: 1 + 0.2 * np.cos(2 * th) + 0.05 * np.sin(3 * th))
    dt = 0.1 * stable_dt(c)
    mid = step(c, dt)
    fd = (length(step(mid, dt)) - length(c)) / (2 * dt)
    assert fd == pytest.approx(dLdt_formula(mid)[0], rel=1e-6)


def test_max_gradient_finds_off_grid_peak():
    c = RadialCurve.from_function(E, 64, lambda th: 1 + 0.1 * np.sin(th + 0.3 * 2 * math.pi / 64))
    assert max_gradient_sq(c) == pytest.approx(0.01, rel=1e-12)


def test_gradient_barrier_closed_form():
    t = np.array([0.0, 1.0, 10.0])
    v = gradient_barrier(1.0, 1.0, 0.0, t)
    np.testing.assert_allclose(v, (1 + 2 * t) ** -0.5, atol=1e-8)
    v0, c1 = 0.7, 2.5
    tt = np.linspace(0, 20, 41)
    np.testing.assert_allclose(gradient_barrier(v0, c1, 0.0, tt), (1 / v0**2 + 2 * c1 * tt) ** -0.5, atol=1e-8)
    assert np.all(gradient_barrier(0.0, 1.0, 1.0, tt) == 0)


def test_gradient_barrier_decays_like_inverse_sqrt():
    tt = np.geomspace(1e-2, 1e3, 30)
    v = gradient_barrier(2.0, 1.0, 0.5, tt)
    assert np.all(np.diff(v) < 0) and np.all(v > 0)
    assert np.max(v * np.sqrt(tt)) < 1.0  # bounded by 1/sqrt(2 c1)


@pytest.mark.parametrize("warp", [E, WarpPotential.cylinder(1.0), WarpPotential.scaled_sinh(1.0, 1 / math.sqrt(2))])
def test_flow_preserves_reflection_symmetry(warp):
    r0 = 1.0 if warp.family != "cylinder" else 2.0
    c = RadialCurve.from_function(warp, 64, lambda th: r0 + 0.1 * np.cos(th) + 0.05 * np.cos(2 * th))
    tr = evolve(c, FlowConfig(t_max=0.2, sample_every=5), keep_samples=True)
    for s in tr.samples:
        assert symmetry_defect(s, 0.0) < 1e-12


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(safety=1.5)
    with pytest.raises(ValueError):
        FlowConfig(osc_tol=0)
    with pytest.raises(ValueError):
        FlowConfig(sample_every=0)
