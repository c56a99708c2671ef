import math

import numpy as np
import pytest

from warpflow.warp import WarpPotential

CRITERIA: list[str] = []


def builtin_warps():
    """(label, warp, typical radius) for every closed-form family."""
    return [
        ("euclidean", WarpPotential.euclidean(), 1.0),
        ("sphere", WarpPotential.sphere(1.0, 0.0), math.pi / 2),
        ("hyperbolic", WarpPotential.hyperbolic(1.0, 0.0), 1.0),
        ("cylinder", WarpPotential.cylinder(1.0), 1.0),
        ("scaled_sinh", WarpPotential.scaled_sinh(math.sqrt(2), 1.0), 1.0),
        ("sinh_half_beta", WarpPotential.scaled_sinh(1.0, 1 / math.sqrt(2)), 1.0),
    ]


def random_trig(rng, r0, amp, degree=4):
    """theta -> r0 + random trigonometric polynomial with sup-norm <= amp."""
    c = rng.normal(size=degree)
    s = rng.normal(size=degree)
    scale = amp / (np.abs(c).sum() + np.abs(s).sum())
    k = np.arange(1, degree + 1)

    def f(theta):
        th = np.asarray(theta)[..., None]
        return r0 + scale * (c * np.cos(k * th) + s * np.sin(k * th)).sum(-1)

    return f


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
