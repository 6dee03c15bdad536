"""Szegő, Bergman and Carathéodory metrics, the SK invariant and the E quantity."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .domains import DomainKind, DomainSpec, NumericConfig, PointDir, require_interior
from .errors import ArgumentError, CapabilityError, NumericalError
from .kernels import DiagonalJet, KernelEvaluator, KernelKind

NEGATIVE_CLAMP = -1e-14
DIVISION_HAZARD = 1e-30


class MetricKind(enum.Enum):
    SZEGO = "szego"
    BERGMAN = "bergman"
    CARATHEODORY = "caratheodory"


def kernel_for(domain: DomainSpec, kind, config: NumericConfig | None = None):
    """Kernel object for ``domain``: closed form or series, else a quadrature kernel."""
    config = config or NumericConfig()
    kind = kind if isinstance(kind, KernelKind) else KernelKind(str(kind).lower())
    if domain.kind is DomainKind.PLANAR_CURVE:
        from .quadrature import default_curve_kernel

        return default_curve_kernel(domain.curve, kind, config)
    return KernelEvaluator(domain, kind, config)


def _form(h: np.ndarray, xi: np.ndarray) -> float:
    value = complex(xi @ h @ np.conj(xi))
    return value.real


def metric_squared(kernel, at: PointDir) -> float:
    """F^2 = sum_{jk} d^2 log K / dz_j dconj(z_k) xi_j conj(xi_k), unclamped."""
    z, xi = at.resolved(kernel.domain)
    jet = kernel.diagonal_jet(z)
    if not jet.k0 > 0:
        raise NumericalError(f"kernel is not positive on the diagonal (K(z,z)={jet.k0})")
    return _form(jet.log_hessian(), xi)


def _root(f2: float) -> float:
    if f2 < 0.0:
        if f2 < NEGATIVE_CLAMP:
            raise NumericalError(f"metric form is negative ({f2:.3e})")
        return 0.0
    return math.sqrt(f2)


def hessian_metric(kernel, at: PointDir) -> float:
    """Metric length of ``at.xi`` at ``at.z`` from the complex Hessian of log K(z, z)."""
    return _root(metric_squared(kernel, at))


def caratheodory(at: PointDir, domain: DomainSpec) -> float:
    """Exact Carathéodory metric where a closed form is available.

    Disk: |xi| / (1 - |z|^2). Ball: |xi| at the origin only.
    """
    z, xi = at.resolved(domain)
    if domain.kind is DomainKind.UNIT_DISK or (
        domain.kind is DomainKind.UNIT_BALL and domain.dimension == 1
    ):
        require_interior(domain, z)
        return float(abs(xi[0]) / (1.0 - abs(z[0]) ** 2))
    if domain.kind is DomainKind.UNIT_BALL and not np.any(z):
        return float(np.linalg.norm(xi))
    raise CapabilityError(
        f"no closed-form Carathéodory metric for {domain.label()} at z={z}"
    )


def metric(domain: DomainSpec, which, at: PointDir, config: NumericConfig | None = None) -> float:
    which = which if isinstance(which, MetricKind) else MetricKind(str(which).lower())
    if which is MetricKind.CARATHEODORY:
        return caratheodory(at, domain)
    return hessian_metric(kernel_for(domain, which.value, config), at)


def sk_function(domain: DomainSpec, z, w, config: NumericConfig | None = None) -> complex:
    """SK(z, w) = S(z, w)^(n+1) / K(z, w)^n."""
    n = domain.dimension
    s = kernel_for(domain, KernelKind.SZEGO, config).eval(z, w)
    k = kernel_for(domain, KernelKind.BERGMAN, config).eval(z, w)
    if abs(k) < DIVISION_HAZARD:
        raise NumericalError(f"Bergman kernel vanishes at ({z}, {w}): |K|={abs(k):.3e}")
    return complex(s ** (n + 1) / k**n)


def _sk_jet(s: DiagonalJet, k: DiagonalJet, n: int) -> DiagonalJet:
    # Diagonal jet of g = S^(n+1) K^(-n) by the product rule.
    a, b = n + 1, n
    g0 = s.k0**a * k.k0 ** (-b)
    grad = a * s.k1 / s.k0 - b * k.k1 / k.k0
    curv = a * s.log_hessian() - b * k.log_hessian()
    g1 = g0 * grad
    g2 = g0 * (np.outer(grad, np.conj(grad)) + curv)
    return DiagonalJet(float(g0), g1, g2)


def _log_sk_fd(domain, z, xi, config, step):
    # Richardson-extrapolated central differences of log SK(z, z) along the
    # real coordinates; d_j dbar_k = (d_xj - i d_yj)(d_xk + i d_yk) / 4.
    n = domain.dimension

    def log_sk(p):
        return math.log(sk_function(domain, p, p, config).real)

    def hessian(h):
        dim = 2 * n
        base = np.concatenate([z.real, z.imag])
        f0 = log_sk(z)
        hess = np.empty((dim, dim))
        unit = np.eye(dim)

        def f(v):
            return log_sk(v[:n] + 1j * v[n:])

        for i in range(dim):
            hess[i, i] = (f(base + h * unit[i]) - 2 * f0 + f(base - h * unit[i])) / h**2
            for j in range(i + 1, dim):
                e = h * (unit[i] + unit[j])
                d = h * (unit[i] - unit[j])
                hess[i, j] = hess[j, i] = (f(base + e) - f(base + d) - f(base - d) + f(base - e)) / (4 * h**2)
        xx, xy, yy = hess[:n, :n], hess[:n, n:], hess[n:, n:]
        return (xx + yy + 1j * (xy - xy.T)) / 4.0

    h1 = hessian(step)
    h2 = hessian(step / 2)
    return _form((4 * h2 - h1) / 3.0, xi)


def e_quantity(domain: DomainSpec, at: PointDir, config: NumericConfig | None = None,
               path: str = "direct", fd_step: float = 2e-3) -> float:
    """E(z, xi) = (n+1) F_S^2 - n F_B^2.

    ``path`` selects the computation: ``direct`` combines the two metric forms,
    ``log-sk`` takes the Hessian of log SK from its diagonal jet, ``log-sk-fd``
    differentiates log SK numerically (Richardson, steps ``fd_step`` and half).
    """
    n = domain.dimension
    z, xi = at.resolved(domain)
    if path == "log-sk-fd":
        require_interior(domain, z)
        return _log_sk_fd(domain, z, xi, config, fd_step)
    s_kernel = kernel_for(domain, KernelKind.SZEGO, config)
    k_kernel = kernel_for(domain, KernelKind.BERGMAN, config)
    if path == "direct":
        return (n + 1) * metric_squared(s_kernel, at) - n * metric_squared(k_kernel, at)
    if path == "log-sk":
        jet = _sk_jet(s_kernel.diagonal_jet(z), k_kernel.diagonal_jet(z), n)
        return _form(jet.log_hessian(), xi)
    raise ArgumentError(f"unknown E path {path!r}")


@dataclass(frozen=True)
class MetricRequest:
    domain: DomainSpec
    which: MetricKind
    at: PointDir

    def compute(self, config: NumericConfig | None = None) -> float:
        return metric(self.domain, self.which, self.at, config)


@dataclass(frozen=True)
class ComparisonValue:
    sk: complex
    e_val: float


def compare(domain: DomainSpec, at: PointDir, config: NumericConfig | None = None) -> ComparisonValue:
    """SK(z, z) and E(z, xi) at one point."""
    z, _ = at.resolved(domain)
    return ComparisonValue(sk_function(domain, z, z, config), e_quantity(domain, at, config))


def ball_sk_constant(n: int, config: NumericConfig | None = None) -> float:
    """(n-1)! / (c_n^(n+1) (n pi)^n), the constant value of SK on the ball."""
    config = config or NumericConfig()
    c = config.dimensional_constant(n)
    return math.factorial(n - 1) / (c ** (n + 1) * (n * math.pi) ** n)
