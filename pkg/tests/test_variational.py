import math

import numpy as np
import pytest

from szego_lab.domains import DomainSpec, PointDir
from szego_lab.errors import CapabilityError
from szego_lab.metrics import hessian_metric, kernel_for, metric
from szego_lab.quadrature import CurveSpec
from szego_lab.variational import (
    annulus_caratheodory_bounds,
    auto_frame,
    build_frame,
    extremal_coefficients,
    variational_metric,
)

CASES = [
    ("disk", 0.4 - 0.2j, 1.0),
    ("ball:2", [0.3, 0.1j], [1.0, 0.5j]),
    ("ball:3", [0.2, -0.1, 0.3j], [0.2, 1.0, -1j]),
    ("annulus:0.25", 0.6j, 1.0),
    ("annulus:0.05", -0.3 + 0.1j, 1.0),
]


@pytest.mark.parametrize("domain, z, xi", CASES)
@pytest.mark.parametrize("kind", ["szego", "bergman"])
def test_variational_matches_hessian(domain, z, xi, kind):
    d = DomainSpec.parse(domain)
    at = PointDir(z, xi)
    frame = auto_frame(d, kind, z)
    assert variational_metric(frame, at) == pytest.approx(hessian_metric(kernel_for(d, kind), at), rel=1e-10)


def test_frame_is_orthonormal_under_disk_szego():
    # on the unit circle with arclength, |c_k z^k|^2 integrates to one
    frame = build_frame(DomainSpec.disk(), "szego", 6)
    th = 2 * np.pi * np.arange(64) / 64
    vals = np.array([frame.values(np.exp(1j * t)) for t in th])
    gram = vals.T.conj() @ vals * (2 * np.pi / 64)
    np.testing.assert_allclose(gram, np.eye(7), atol=1e-14)


def test_extremal_function_vanishes_and_attains_the_metric():
    d = DomainSpec.ball(2)
    at = PointDir([0.2, 0.3j], [1.0, -0.4])
    frame = auto_frame(d, "bergman", at.z)
    c = extremal_coefficients(frame, at)
    assert np.linalg.norm(c) == pytest.approx(1.0)
    z, xi = at.resolved(d)
    assert abs(frame.evaluate(c, z)) < 1e-12
    deriv = abs(np.dot(c, frame.directional(z, xi)))
    k0 = np.vdot(frame.values(z), frame.values(z)).real
    assert deriv / math.sqrt(k0) == pytest.approx(variational_metric(frame, at), rel=1e-12)


def test_truncation_is_monotone_in_cutoff():
    d = DomainSpec.disk()
    at = PointDir(0.7, 1.0)
    vals = [variational_metric(build_frame(d, "szego", m), at) for m in range(1, 40)]
    assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1 / (1 - 0.49), rel=1e-5)


def test_curve_domain_has_no_frame():
    with pytest.raises(CapabilityError):
        build_frame(DomainSpec.planar_curve(CurveSpec.ellipse(1, 0.5)), "szego", 4)


@pytest.mark.parametrize("r", [0.01, 0.2, 0.5])
def test_szego_dominates_caratheodory_bounds(r):
    for rad in np.linspace(r + 0.05 * (1 - r), 1 - 0.05 * (1 - r), 9):
        fs = metric(DomainSpec.annulus(r), "szego", PointDir(rad, 1.0))
        for bound in annulus_caratheodory_bounds(r, rad, 1.0).values():
            assert fs >= bound - 1e-12
