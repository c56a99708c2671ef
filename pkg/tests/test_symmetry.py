import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpflow.curve import RadialCurve, area, length
from warpflow.errors import OffGridAxis
from warpflow.symmetry import (
    area_imbalance,
    bump_kernel,
    cut_and_reflect,
    equalizing_axis,
    mollify,
    reflect,
    rotate,
    symmetrize,
    symmetry_defect,
)
from warpflow.warp import WarpPotential

from conftest import random_trig

E = WarpPotential.euclidean()
N = 64
DT = 2 * math.pi / N


def curve(f, n=N, warp=E):
    return RadialCurve.from_function(warp, n, f)


@given(st.integers(0, 2**32 - 1), st.integers(0, 2 * N - 1))
@settings(max_examples=40, deadline=None)
def test_reflection_is_an_involution(seed, m):
    c = curve(random_trig(np.random.default_rng(seed), 1.0, 0.3))
    alpha = m * DT / 2
    twice = reflect(reflect(c, alpha), alpha)
    assert np.array_equal(twice.rho, c.rho)


def test_reflection_examples():
    c = curve(lambda th: 1 + 0.1 * np.cos(th))
    assert symmetry_defect(c, 0.0) < 1e-15
    assert symmetry_defect(c, math.pi / 2) == pytest.approx(0.2, abs=1e-14)
    s = curve(lambda th: 1 + 0.1 * np.sin(th))
    assert symmetry_defect(s, math.pi / 2) < 1e-15


def test_off_grid_axis_rejected():
    c = curve(lambda th: 1 + 0.1 * np.cos(th))
    with pytest.raises(OffGridAxis):
        reflect(c, 0.3 * DT)


def test_reflection_preserves_functionals():
    rng = np.random.default_rng(11)
    for _ in range(100):
        c = curve(random_trig(rng, 1.0, 0.3))
        alpha = rng.integers(0, 2 * N) * DT / 2
        r = reflect(c, alpha)
        assert abs(length(r) - length(c)) < 1e-12
        assert abs(area(r) - area(c)) < 1e-12


def test_cut_and_reflect_example():
    c = curve(lambda th: 1 + 0.1 * np.sin(th))
    c1, c2 = cut_and_reflect(c, 0.0)
    assert symmetry_defect(c1, 0.0) == 0 and symmetry_defect(c2, 0.0) == 0
    assert area(c1) < area(c) < area(c2)
    assert area(c1) + area(c2) == pytest.approx(2 * area(c), abs=1e-13)
    assert equalizing_axis(c) == pytest.approx(math.pi / 2, abs=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(0, 2 * N - 1))
@settings(max_examples=40, deadline=None)
def test_cut_and_reflect_conservation(seed, m):
    c = curve(random_trig(np.random.default_rng(seed), 1.0, 0.3))
    alpha = m * DT / 2
    c1, c2 = cut_and_reflect(c, alpha)
    assert symmetry_defect(c1, alpha) == 0 and symmetry_defect(c2, alpha) == 0
    assert abs(area(c1) + area(c2) - 2 * area(c)) < 1e-12
    assert abs(length(c1) + length(c2) - 2 * length(c)) < 1e-12


def test_area_imbalance_antisymmetric():
    c = curve(random_trig(np.random.default_rng(5), 1.0, 0.3))
    for alpha in (0.1, 0.7, 2.0):
        assert area_imbalance(c, alpha + math.pi) == pytest.approx(-area_imbalance(c, alpha), abs=1e-12)


def test_equalizing_axis_examples():
    assert equalizing_axis(curve(lambda th: np.full_like(th, 1.5))) == 0.0
    assert equalizing_axis(curve(lambda th: 1 + 0.1 * np.cos(2 * th))) == 0.0


def test_rotation_by_whole_nodes_is_exact():
    c = curve(random_trig(np.random.default_rng(2), 1.0, 0.3))
    r = rotate(c, 3 * DT)
    assert np.array_equal(r.rho, np.roll(c.rho, -3))


def test_rotation_off_grid_is_spectral():
    f = lambda th: 1 + 0.1 * np.cos(2 * th) + 0.05 * np.sin(5 * th)
    r = rotate(curve(f), 0.123)
    np.testing.assert_allclose(r.rho, f(r.theta + 0.123), atol=1e-14)


def test_symmetrize_report():
    c = curve(random_trig(np.random.default_rng(9), 1.0, 0.3), n=128)
    rep = symmetrize(c).report()
    assert rep["area_balance"] <= 1e-10
    assert rep["length_sum_error"] <= 1e-10 and rep["area_sum_error"] <= 1e-10
    assert rep["length_bracketed"]


def test_bump_kernel():
    w = bump_kernel(128, 0.3)
    assert np.sum(w) * 2 * math.pi / 128 == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(w, np.roll(w[::-1], 1))
    assert np.all(w >= 0)


def test_mollify_constant_and_mean():
    c = curve(lambda th: np.full_like(th, 1.25))
    np.testing.assert_allclose(mollify(c, 0.4).rho, 1.25, atol=1e-14)
    c = curve(random_trig(np.random.default_rng(4), 1.0, 0.3), n=128)
    m = mollify(c, 0.4)
    assert np.mean(m.rho) == pytest.approx(np.mean(c.rho), abs=1e-14)
    assert c.rho.min() - 1e-14 <= m.rho.min() and m.rho.max() <= c.rho.max() + 1e-14


def test_mollify_preserves_symmetry():
    c = curve(lambda th: 1 + 0.1 * np.cos(th) + 0.07 * np.cos(3 * th), n=128)
    assert symmetry_defect(mollify(c, 0.5), 0.0) < 1e-14


def test_mollify_lipschitz_estimate():
    # triangle wave, Lipschitz constant 0.2 / pi
    tri = lambda th: 1 + 0.1 * (1 - 2 * np.abs(((th + math.pi) % (2 * math.pi)) - math.pi) / math.pi)
    c = curve(tri, n=512)
    lip = 0.2 / math.pi
    for h in (0.05, 0.2, 0.5):
        assert np.max(np.abs(mollify(c, h).rho - c.rho)) < lip * h


def test_mollify_rejects_bad_width():
    c = curve(lambda th: np.full_like(th, 1.0))
    with pytest.raises(ValueError):
        mollify(c, 0.0)
