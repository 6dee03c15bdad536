"""Fefferman boundary measure from a defining function.

The density against Euclidean surface measure at a boundary point is

    c_n * (-det [[0, rho_kbar], [rho_j, rho_jkbar]])^(1/(n+1)) / |grad rho|

where |grad rho| is the norm of the real gradient, 2 |(rho_1, ..., rho_n)|.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domains import DomainKind, DomainSpec, NumericConfig
from .errors import ArgumentError, CapabilityError, NumericalError, PrecisionError
from .quadrature import sphere_quadrature

BOUNDARY_TOLERANCE = 1e-8
MAX_PULLBACK_DIMENSION = 2


class NotStronglyPseudoconvex(NumericalError):
    pass


class ProbeMode(enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "fd"


@dataclass(frozen=True)
class DefiningFunctionProbe:
    """rho with its complex gradient (d rho / dz_j) and Levi matrix (d^2 rho / dz_j dzbar_k)."""

    name: str
    dimension: int
    rho: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    mode: ProbeMode = ProbeMode.ANALYTIC

    def real_gradient(self, z) -> np.ndarray:
        """Real gradient of rho packed as a complex vector, 2 * conj(d rho / dz)."""
        return 2.0 * np.conj(self.grad(z))


def ball_probe(n: int) -> DefiningFunctionProbe:
    """rho = |z|^2 - 1."""
    return DefiningFunctionProbe(
        "ball",
        n,
        lambda z: float(np.vdot(z, z).real) - 1.0,
        lambda z: np.conj(np.asarray(z, dtype=complex)),
        lambda z: np.eye(n, dtype=complex),
    )


def annulus_probe(r: float) -> DefiningFunctionProbe:
    """rho = (|z|^2 - 1)(|z|^2 - r^2), negative exactly on r < |z| < 1."""

    def rho(z):
        t = abs(z[0]) ** 2
        return (t - 1.0) * (t - r * r)

    def grad(z):
        t = abs(z[0]) ** 2
        return np.array([(2 * t - 1 - r * r) * np.conj(z[0])])

    def hess(z):
        t = abs(z[0]) ** 2
        return np.array([[4 * t - 1 - r * r + 0j]])

    return DefiningFunctionProbe(f"annulus:{r!r}", 1, rho, grad, hess)


@dataclass(frozen=True)
class Factor:
    """A smooth positive multiplier h with its complex derivatives."""

    name: str
    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]


def _e1(n):
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return v


def builtin_factors(n: int) -> dict[str, Factor]:
    """Positive multipliers on a neighbourhood of the closed unit ball."""

    def exp_im(z):
        return math.exp(z[0].imag)

    e11 = np.zeros((n, n), dtype=complex)
    e11[0, 0] = 1.0
    return {
        "const3": Factor("const3", lambda z: 3.0, lambda z: np.zeros(n, complex),
                         lambda z: np.zeros((n, n), complex)),
        "affine": Factor("affine", lambda z: 2.0 + z[0].real, lambda z: 0.5 * _e1(n),
                         lambda z: np.zeros((n, n), complex)),
        "exp": Factor("exp", exp_im, lambda z: -0.5j * exp_im(z) * _e1(n),
                      lambda z: 0.25 * exp_im(z) * e11),
        "quad": Factor("quad",
                       lambda z: 3.0 + (z[0] ** 2).real + float(np.vdot(z, z).real),
                       lambda z: z[0] * _e1(n) + np.conj(z),
                       lambda z: np.eye(n, dtype=complex)),
    }


def scaled_probe(base: DefiningFunctionProbe, h: Factor) -> DefiningFunctionProbe:
    """The defining function h * rho, derivatives by the product rule."""

    def rho(z):
        return h.value(z) * base.rho(z)

    def grad(z):
        return h.grad(z) * base.rho(z) + h.value(z) * base.grad(z)

    def hess(z):
        r0, r1 = base.rho(z), base.grad(z)
        h0, h1 = h.value(z), h.grad(z)
        return (h.hess(z) * r0 + np.outer(h1, np.conj(r1)) + np.outer(r1, np.conj(h1))
                + h0 * base.hess(z))

    return DefiningFunctionProbe(f"{h.name}*{base.name}", base.dimension, rho, grad, hess, base.mode)


def finite_difference_probe(base: DefiningFunctionProbe, step: float = 1e-4) -> DefiningFunctionProbe:
    """Same rho, derivatives from second-order central differences in the real coordinates."""
    n = base.dimension
    f = base.rho

    def partials(z):
        # real derivatives d/dx_j, d/dy_j
        dx = np.empty(n)
        dy = np.empty(n)
        for j in range(n):
            e = np.zeros(n, dtype=complex)
            e[j] = step
            dx[j] = (f(z + e) - f(z - e)) / (2 * step)
            dy[j] = (f(z + 1j * e) - f(z - 1j * e)) / (2 * step)
        return dx, dy

    def grad(z):
        dx, dy = partials(z)
        return 0.5 * (dx - 1j * dy)

    def hess(z):
        units = []
        for j in range(n):
            e = np.zeros(n, dtype=complex)
            e[j] = 1.0
            units.append(e)
        basis = units + [1j * u for u in units]
        m = 2 * n
        h2 = np.empty((m, m))
        f0 = f(z)
        for a in range(m):
            ea = step * basis[a]
            h2[a, a] = (f(z + ea) - 2 * f0 + f(z - ea)) / step**2
            for b in range(a + 1, m):
                eb = step * basis[b]
                h2[a, b] = h2[b, a] = (f(z + ea + eb) - f(z + ea - eb) - f(z - ea + eb)
                                       + f(z - ea - eb)) / (4 * step**2)
        xx, xy, yy = h2[:n, :n], h2[:n, n:], h2[n:, n:]
        return (xx + yy + 1j * (xy - xy.T)) / 4.0

    return DefiningFunctionProbe(base.name, n, f, grad, hess, ProbeMode.FINITE_DIFFERENCE)


def probe_from_name(name: str, n: int, mode: str = "analytic", step: float = 1e-4) -> DefiningFunctionProbe:
    """Registry: ``ball``, ``scaled-ball:H`` (constant H), ``perturbed-ball:FACTOR``, ``annulus:r``."""
    head, _, arg = name.partition(":")
    if head == "ball":
        probe = ball_probe(n)
    elif head == "scaled-ball":
        c = float(arg or 3.0)
        if c <= 0:
            raise ArgumentError("scale must be positive")
        h = Factor(f"const{c:g}", lambda z: c, lambda z: np.zeros(n, complex),
                   lambda z: np.zeros((n, n), complex))
        probe = scaled_probe(ball_probe(n), h)
    elif head == "perturbed-ball":
        factors = builtin_factors(n)
        if arg not in factors:
            raise ArgumentError(f"unknown factor {arg!r}; choose from {sorted(factors)}")
        probe = scaled_probe(ball_probe(n), factors[arg])
    elif head == "annulus":
        if n != 1:
            raise ArgumentError("annulus probe is planar")
        probe = annulus_probe(float(arg))
    else:
        raise ArgumentError(f"unknown defining function {name!r}")
    if mode == "fd":
        return finite_difference_probe(probe, step)
    if mode != "analytic":
        raise ArgumentError(f"unknown probe mode {mode!r}")
    return probe


def _project(probe: DefiningFunctionProbe, z: np.ndarray, tol: float) -> np.ndarray:
    value = probe.rho(z)
    if abs(value) > tol:
        raise ArgumentError(f"|rho(z)| = {abs(value):.3e} exceeds boundary tolerance {tol:g}")
    g = probe.real_gradient(z)
    gg = float(np.vdot(g, g).real)
    if gg == 0.0:
        raise NumericalError("defining function has a critical point on the boundary")
    return z - value * g / gg


def bordered_matrix(probe: DefiningFunctionProbe, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    n = probe.dimension
    g = probe.grad(z)
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[0, 1:] = np.conj(g)
    m[1:, 0] = g
    m[1:, 1:] = probe.hess(z)
    return m


def bordered_det(probe: DefiningFunctionProbe, z, tol: float = BOUNDARY_TOLERANCE) -> float:
    """Determinant of the bordered complex Hessian at a boundary point."""
    z = _project(probe, np.asarray(z, dtype=complex).reshape(-1), tol)
    return float(np.linalg.det(bordered_matrix(probe, z)).real)


@dataclass(frozen=True)
class FeffermanDensity:
    value: float


def density(probe: DefiningFunctionProbe, z, config: NumericConfig | None = None,
            tol: float = BOUNDARY_TOLERANCE) -> FeffermanDensity:
    """d sigma_F / d sigma_E at the boundary point ``z``."""
    config = config or NumericConfig()
    n = probe.dimension
    z = _project(probe, np.asarray(z, dtype=complex).reshape(-1), tol)
    det = float(np.linalg.det(bordered_matrix(probe, z)).real)
    if det >= 0.0:
        raise NotStronglyPseudoconvex(f"bordered determinant {det:.3e} is not negative")
    grad_norm = 2.0 * float(np.linalg.norm(probe.grad(z)))
    return FeffermanDensity(config.dimensional_constant(n) * (-det) ** (1.0 / (n + 1)) / grad_norm)


# -- boundary quadrature and the pullback law --------------------------------


def boundary_quadrature(domain: DomainSpec, nodes: int):
    """(points (m, n), Euclidean weights) on the boundary of a model domain."""
    if domain.kind is DomainKind.UNIT_DISK or (domain.kind is DomainKind.UNIT_BALL and domain.dimension == 1):
        th = 2 * np.pi * np.arange(nodes) / nodes
        return np.exp(1j * th)[:, None], np.full(nodes, 2 * np.pi / nodes)
    if domain.kind is DomainKind.ANNULUS:
        r = domain.inner_radius
        th = 2 * np.pi * np.arange(nodes) / nodes
        pts = np.concatenate([np.exp(1j * th), r * np.exp(1j * th)])[:, None]
        wts = np.concatenate([np.full(nodes, 2 * np.pi / nodes), np.full(nodes, 2 * np.pi * r / nodes)])
        return pts, wts
    if domain.kind is DomainKind.UNIT_BALL:
        if domain.dimension > MAX_PULLBACK_DIMENSION:
            raise CapabilityError("tensor sphere quadrature is only provided up to n = 2")
        return sphere_quadrature(domain.dimension, angular=nodes, polar=max(8, nodes // 2))
    raise ArgumentError(f"no boundary quadrature for {domain.label()}")


def domain_probe(domain: DomainSpec) -> DefiningFunctionProbe:
    if domain.kind is DomainKind.ANNULUS:
        return annulus_probe(domain.inner_radius)
    if domain.kind in (DomainKind.UNIT_DISK, DomainKind.UNIT_BALL):
        return ball_probe(domain.dimension)
    raise ArgumentError(f"no built-in defining function for {domain.label()}")


def fefferman_weights(domain: DomainSpec, nodes: int, config: NumericConfig | None = None):
    """Boundary nodes with weights for sigma_F (density times Euclidean weight)."""
    pts, wts = boundary_quadrature(domain, nodes)
    probe = domain_probe(domain)
    # model boundaries are homogeneous: one density per boundary component suffices
    dens = np.array([density(probe, p, config).value for p in _component_representatives(domain, pts)])
    return pts, wts * _spread(domain, dens, len(wts))


def _component_representatives(domain, pts):
    if domain.kind is DomainKind.ANNULUS:
        return [pts[0], pts[len(pts) // 2]]
    return [pts[0]]


def _spread(domain, dens, m):
    if domain.kind is DomainKind.ANNULUS:
        return np.repeat(dens, m // 2)
    return np.full(m, dens[0])


def pullback_sides(amap, f: Callable, nodes: int, config: NumericConfig | None = None) -> tuple[float, float]:
    """Both sides of  int |f|^2 d sigma_F = int |f o Phi|^2 |det J Phi|^(2n/(n+1)) d sigma_F."""
    domain = amap.domain
    n = domain.dimension
    pts, wts = fefferman_weights(domain, nodes, config)
    lhs = float(np.sum(np.abs(f(pts)) ** 2 * wts))
    image = amap.forward(pts)
    jac = np.abs(amap.jac_det(pts)) ** (2.0 * n / (n + 1))
    rhs = float(np.sum(np.abs(f(image)) ** 2 * jac * wts))
    return lhs, rhs


def pullback_check(amap, f: Callable, nodes: int = 512, config: NumericConfig | None = None,
                   relative: bool = False) -> float:
    """|LHS - RHS| of the measure pullback identity, with a refinement sanity check.

    With ``relative`` the residual is divided by max(1, LHS).
    """
    levels = [nodes // 4, nodes // 2, nodes]
    rhs_values = []
    for m in levels:
        lhs, rhs = pullback_sides(amap, f, m, config)
        rhs_values.append(rhs)
    floor = 1e-13 * max(1.0, abs(lhs))
    d_prev = abs(rhs_values[1] - rhs_values[0])
    d_last = abs(rhs_values[2] - rhs_values[1])
    if d_last > floor and d_last > 0.5 * d_prev:
        raise PrecisionError(
            f"boundary quadrature not converging (refinement ratio {d_last / max(d_prev, 1e-300):.2f})"
        )
    scale = max(1.0, abs(lhs)) if relative else 1.0
    return abs(lhs - rhs) / scale
