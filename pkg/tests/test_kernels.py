import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from szego_lab.domains import DomainSpec, NumericConfig
from szego_lab.errors import CapabilityError, DomainMarginError, PrecisionError
from szego_lab.kernels import (
    MAX_CUTOFF,
    KernelEvaluator,
    KernelKind,
    annulus_coefficients,
    annulus_cutoffs,
)
from szego_lab.quadrature import CurveSpec


def test_disk_closed_forms():
    z, w = 0.3 + 0.1j, -0.2 + 0.4j
    t = z * np.conj(w)
    s = KernelEvaluator(DomainSpec.disk(), "szego").eval(z, w)
    b = KernelEvaluator(DomainSpec.disk(), "bergman").eval(z, w)
    assert s == pytest.approx(1 / (2 * math.pi * (1 - t)), rel=1e-15)
    assert b == pytest.approx(1 / (math.pi * (1 - t) ** 2), rel=1e-15)


def test_disk_bergman_jet_at_origin():
    # K(z,z) = 1/(pi (1-|z|^2)^2): value 1/pi, no gradient, mixed derivative 2/pi
    jet = KernelEvaluator(DomainSpec.disk(), "bergman").diagonal_jet(0.0)
    assert jet.k0 == pytest.approx(1 / math.pi)
    assert abs(jet.k1[0]) == 0
    assert jet.k2[0, 0] == pytest.approx(2 / math.pi)


def test_ball_szego_normalisation_tracks_cn():
    z = [0.1, 0.2j]
    base = KernelEvaluator(DomainSpec.ball(2), "szego").eval(z, z)
    halved = KernelEvaluator(DomainSpec.ball(2), "szego", NumericConfig(cn=0.5)).eval(z, z)
    assert halved == pytest.approx(2 * base)


@pytest.mark.parametrize("kind", ["szego", "bergman"])
@pytest.mark.parametrize("r, z, w", [(0.3, 0.5, 0.6 + 0.1j), (0.05, 0.2j, -0.4), (0.8, 0.9, 0.85j)])
def test_annulus_series_matches_oracle(kind, r, z, w):
    k = KernelEvaluator(DomainSpec.annulus(r), kind)
    want = oracles.annulus_kernel(kind, r, z, w)
    # off-diagonal values can cancel; the natural scale is sqrt(K(z,z) K(w,w))
    scale = math.sqrt(abs(k.eval(z, z) * k.eval(w, w)))
    assert abs(k.eval(z, w) - want) <= 1e-13 * scale


@pytest.mark.parametrize("kind", list(KernelKind))
def test_hermitian_symmetry(kind):
    k = KernelEvaluator(DomainSpec.annulus(0.2), kind)
    z, w = 0.4 + 0.3j, -0.6 + 0.1j
    assert k.eval(z, w) == pytest.approx(np.conj(k.eval(w, z)), rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.6), st.floats(0.0, 2 * math.pi), st.floats(0.1, 0.9))
def test_annulus_rotation_invariance(r, theta, frac):
    k = KernelEvaluator(DomainSpec.annulus(r), "bergman")
    rad = r + frac * (1 - r)
    z, w = rad, rad * np.exp(0.3j)
    rot = np.exp(1j * theta)
    assert k.eval(rot * z, rot * w) == pytest.approx(k.eval(z, w), rel=1e-12)


def test_thin_annulus_szego_approaches_disk():
    # negative-power terms carry a factor r, so the annulus kernel tends to the disk kernel
    ann = KernelEvaluator(DomainSpec.annulus(1e-8), "szego").eval(0.5, 0.4j)
    disk = KernelEvaluator(DomainSpec.disk(), "szego").eval(0.5, 0.4j)
    assert abs(ann - disk) <= 1e-7 * abs(disk)


def test_coefficients_overflow_safe():
    # very negative n would overflow r**(2n+1) if computed naively; the true value underflows
    assert annulus_coefficients(1e-8, -500, "szego") == 0.0
    assert annulus_coefficients(1e-8, -400, "bergman") == 0.0
    assert annulus_coefficients(0.5, -3, "szego") == pytest.approx(1 / (66 * math.pi), rel=1e-15)
    assert annulus_coefficients(0.5, -3, "bergman") == pytest.approx(2 / (15 * math.pi), rel=1e-15)
    assert annulus_coefficients(0.5, -1, "bergman") == pytest.approx(1 / (2 * math.pi * math.log(2)))


def _fd_jet(kernel, z, h):
    def k(p):
        return kernel.eval(p, p).real

    dx = (k(z + h) - k(z - h)) / (2 * h)
    dy = (k(z + 1j * h) - k(z - 1j * h)) / (2 * h)
    lap = (k(z + h) + k(z - h) + k(z + 1j * h) + k(z - 1j * h) - 4 * k(z)) / h**2
    return 0.5 * (dx - 1j * dy), lap / 4


@pytest.mark.parametrize("domain, z", [("disk", 0.3 + 0.2j), ("annulus:0.2", 0.5 - 0.3j), ("annulus:0.6", 0.8j)])
@pytest.mark.parametrize("kind", ["szego", "bergman"])
def test_jet_matches_finite_differences(domain, z, kind):
    cfg = NumericConfig()
    kernel = KernelEvaluator(DomainSpec.parse(domain), kind, cfg)
    jet = kernel.diagonal_jet(z)
    d1, d2 = _fd_jet(kernel, z, cfg.fd_step)
    assert abs(jet.k1[0] - d1) <= 1e-6 * abs(jet.k0)
    # the second difference loses about eps/h^2 relative accuracy
    assert abs(jet.k2[0, 0] - d2) <= 1e-6 * abs(jet.k2[0, 0]) + 1e-5 * jet.k0


def test_ball_jet_matches_finite_differences():
    kernel = KernelEvaluator(DomainSpec.ball(2), "szego")
    z = np.array([0.2 + 0.1j, -0.3j])
    jet = kernel.diagonal_jet(z)
    h = 1e-5
    for j in range(2):
        e = np.zeros(2, complex)
        e[j] = h
        k = lambda p: kernel.eval(p, p).real  # noqa: E731
        dx = (k(z + e) - k(z - e)) / (2 * h)
        dy = (k(z + 1j * e) - k(z - 1j * e)) / (2 * h)
        assert abs(jet.k1[j] - 0.5 * (dx - 1j * dy)) <= 1e-8


def test_cutoffs_grow_toward_the_boundary():
    near = annulus_cutoffs(0.5, 0.99**2, 0.25 / 0.99**2, "szego")
    mid = annulus_cutoffs(0.5, 0.75**2, 0.25 / 0.75**2, "szego")
    assert near[0] > mid[0]


def test_cutoff_escalation_failure():
    k = KernelEvaluator(DomainSpec.annulus(0.5), "szego")
    with pytest.raises(PrecisionError):
        k.eval(1 - 2e-8, 1 - 2e-8)
    assert MAX_CUTOFF == 200_000


def test_margin_and_capability_errors():
    with pytest.raises(DomainMarginError):
        KernelEvaluator(DomainSpec.disk(), "szego").eval(1 - 1e-9, 0)
    with pytest.raises(CapabilityError):
        KernelEvaluator(DomainSpec.planar_curve(CurveSpec.ellipse(1, 0.6)), "szego")


def test_eval_many_matches_eval():
    k = KernelEvaluator(DomainSpec.annulus(0.3), "bergman")
    zs = np.array([0.5, 0.6j, -0.7 + 0.1j])
    ws = np.array([0.4j, 0.8, 0.5])
    many = k.eval_many(zs, ws)
    for i in range(3):
        assert many[i] == pytest.approx(k.eval(zs[i], ws[i]), rel=1e-13)
