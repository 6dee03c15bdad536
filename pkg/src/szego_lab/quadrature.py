"""Szegő and Bergman kernels of planar domains built numerically.

Monomials are integrated with the periodic trapezoid rule on the boundary
(Szegő) or a polar Gauss-Legendre x trapezoid grid (Bergman), then
orthonormalised by a diagonally scaled, pivoted Cholesky factorisation of the
Gram matrix followed by one symmetric re-orthogonalisation pass.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.linalg import eigh, lapack, solve_triangular

from .domains import DomainKind, DomainSpec, NumericConfig, contains
from .errors import ArgumentError, CapabilityError, NumericalError
from .kernels import DiagonalJet, KernelKind

MAX_GRAM_CONDITION = 1e12


class DegreeError(NumericalError):
    """Gram matrix too ill-conditioned for the requested degree range."""


# -- boundary curves ---------------------------------------------------------


def _circle(radius):
    def param(t):
        return radius * np.exp(1j * t)

    def deriv(t):
        return 1j * radius * np.exp(1j * t)

    return param, deriv


def _ellipse(a, b):
    def param(t):
        return a * np.cos(t) + 1j * b * np.sin(t)

    def deriv(t):
        return -a * np.sin(t) + 1j * b * np.cos(t)

    return param, deriv


def _warped_circle(eps):
    # the unit circle traversed at non-uniform speed
    def param(t):
        return np.exp(1j * (t + eps * np.sin(t)))

    def deriv(t):
        return 1j * (1 + eps * np.cos(t)) * np.exp(1j * (t + eps * np.sin(t)))

    return param, deriv


@dataclass(frozen=True)
class CurveSpec:
    """A smooth closed boundary: one curve, or the two circles of an annulus."""

    name: str
    family: str
    params: tuple[float, ...]
    nodes: int = 256

    def __post_init__(self):
        m = self.nodes
        if m < 64 or m & (m - 1):
            raise ArgumentError(f"nodes must be a power of two >= 64, got {m}")
        if self.family not in ("circle", "annulus", "ellipse", "warped-circle"):
            raise ArgumentError(f"unknown curve family {self.family!r}")
        if self.family == "annulus" and not 0 < self.params[0] < 1:
            raise ArgumentError("annulus inner radius must lie in (0, 1)")
        if self.family == "ellipse" and min(self.params) <= 0:
            raise ArgumentError("ellipse semi-axes must be positive")
        if self.family == "warped-circle" and not abs(self.params[0]) < 1:
            raise ArgumentError("warp must satisfy |eps| < 1")

    @classmethod
    def circle(cls, nodes: int = 256) -> CurveSpec:
        return cls("circle", "circle", (), nodes)

    @classmethod
    def annulus(cls, r: float, nodes: int = 256) -> CurveSpec:
        return cls(f"annulus:{r!r}", "annulus", (float(r),), nodes)

    @classmethod
    def ellipse(cls, a: float, b: float, nodes: int = 256) -> CurveSpec:
        return cls(f"ellipse:{a!r},{b!r}", "ellipse", (float(a), float(b)), nodes)

    @classmethod
    def warped_circle(cls, eps: float, nodes: int = 256) -> CurveSpec:
        return cls(f"warped-circle:{eps!r}", "warped-circle", (float(eps),), nodes)

    @classmethod
    def parse(cls, text: str, nodes: int = 256) -> CurveSpec:
        """Registry lookup: ``circle``, ``annulus:r``, ``ellipse:a,b``, ``warped-circle:eps``."""
        head, _, arg = text.strip().partition(":")
        try:
            if head == "circle" and not arg:
                return cls.circle(nodes)
            if head == "annulus":
                return cls.annulus(float(arg), nodes)
            if head == "ellipse":
                a, b = (float(v) for v in arg.split(","))
                return cls.ellipse(a, b, nodes)
            if head == "warped-circle":
                return cls.warped_circle(float(arg), nodes)
        except ValueError as exc:
            raise ArgumentError(f"bad curve {text!r}: {exc}") from exc
        raise ArgumentError(f"unknown curve {text!r}")

    def with_nodes(self, nodes: int) -> CurveSpec:
        return replace(self, nodes=nodes)

    @property
    def components(self) -> int:
        return 2 if self.family == "annulus" else 1

    def pieces(self) -> list[tuple[Callable, Callable]]:
        if self.family in ("circle",):
            return [_circle(1.0)]
        if self.family == "annulus":
            return [_circle(1.0), _circle(self.params[0])]
        if self.family == "ellipse":
            return [_ellipse(*self.params)]
        return [_warped_circle(self.params[0])]

    def boundary_nodes(self, c1: float = 2.0, nodes: int | None = None):
        """Trapezoid nodes and weights for (c1/2) * arclength on every component."""
        m = nodes or self.nodes
        t = 2 * np.pi * np.arange(m) / m
        pts, wts = [], []
        for param, deriv in self.pieces():
            pts.append(param(t))
            wts.append(np.abs(deriv(t)) * (2 * np.pi / m) * (c1 / 2.0))
        return np.concatenate(pts), np.concatenate(wts)

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if self.family in ("circle", "warped-circle"):
            return abs(z) < 1
        if self.family == "annulus":
            return self.params[0] < abs(z) < 1
        a, b = self.params
        return (z.real / a) ** 2 + (z.imag / b) ** 2 < 1

    def boundary_distance(self, z: complex) -> float:
        z = complex(z)
        if self.family in ("circle", "warped-circle"):
            return 1 - abs(z)
        if self.family == "annulus":
            return min(abs(z) - self.params[0], 1 - abs(z))
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        d = float(np.min(np.abs(_ellipse(*self.params)[0](t) - z)))
        return d if self.contains(z) else -d


# -- interior grids ------------------------------------------------------------


@dataclass(frozen=True)
class PolarGrid:
    """Gauss-Legendre in the radius times trapezoid in the angle on inner < |z| < 1."""

    inner_radius: float = 0.0
    radial: int = 64
    angular: int = 128

    def nodes(self):
        x, w = np.polynomial.legendre.leggauss(self.radial)
        a = self.inner_radius
        s = 0.5 * (1 - a) * x + 0.5 * (1 + a)
        ws = 0.5 * (1 - a) * w * s
        th = 2 * np.pi * np.arange(self.angular) / self.angular
        pts = (s[:, None] * np.exp(1j * th[None, :])).ravel()
        wts = np.repeat(ws * (2 * np.pi / self.angular), self.angular)
        return pts, wts

    def domain(self) -> DomainSpec:
        return DomainSpec.disk() if self.inner_radius == 0 else DomainSpec.annulus(self.inner_radius)


def sphere_quadrature(n: int, angular: int = 32, polar: int = 24):
    """Nodes and weights for Euclidean surface measure on the unit sphere of C^n.

    Coordinates z_j = sqrt(u_j) exp(i theta_j) with u on the simplex; the simplex
    is swept by nested angles eta in [0, pi/2] with Gauss-Legendre nodes.
    """
    if n == 1:
        th = 2 * np.pi * np.arange(angular) / angular
        return np.exp(1j * th)[:, None], np.full(angular, 2 * np.pi / angular)
    x, w = np.polynomial.legendre.leggauss(polar)
    eta = 0.25 * np.pi * (x + 1)
    weta = 0.25 * np.pi * w
    idx = np.stack([g.ravel() for g in np.meshgrid(*([np.arange(polar)] * (n - 1)), indexing="ij")], axis=1)
    remaining = np.ones(len(idx))
    jac = np.ones(len(idx))
    cols = []
    for k in range(n - 1):
        e = eta[idx[:, k]]
        # u_k = R^2 cos^2(eta) given the modulus R left over from earlier angles
        jac = jac * remaining**2 * 2 * np.cos(e) * np.sin(e) * weta[idx[:, k]]
        cols.append(remaining * np.cos(e))
        remaining = remaining * np.sin(e)
    cols.append(remaining)
    moduli = np.stack(cols, axis=1)
    th = 2 * np.pi * np.arange(angular) / angular
    grids = np.meshgrid(*([th] * n), indexing="ij")
    phases = np.exp(1j * np.stack([g.ravel() for g in grids], axis=1))
    pts = (moduli[:, None, :] * phases[None, :, :]).reshape(-1, n)
    wt = np.outer(jac, np.full(phases.shape[0], (2 * np.pi / angular) ** n)).ravel()
    return pts, wt * 2.0 ** (1 - n)


def ball_quadrature(n: int, radial: int = 24, angular: int = 32, polar: int = 24):
    """Nodes and weights for Lebesgue measure on the unit ball of C^n."""
    sp, sw = sphere_quadrature(n, angular, polar)
    x, w = np.polynomial.legendre.leggauss(radial)
    s = 0.5 * (x + 1)
    ws = 0.5 * w * s ** (2 * n - 1)
    pts = (s[:, None, None] * sp[None, :, :]).reshape(-1, n)
    return pts, np.outer(ws, sw).ravel()


# -- kernels -----------------------------------------------------------------


def _monomials(z: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    return np.asarray(z, dtype=complex).reshape(-1, 1) ** degrees[None, :]


def _orthonormalize(v: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, float]:
    # rows of A give psi = A m with <psi_a, psi_b> = delta_ab under weights w
    b = v * np.sqrt(w)[:, None]
    g = b.T @ np.conj(b)
    scale = 1.0 / np.sqrt(np.real(np.diag(g)))
    gs = g * scale[:, None] * scale[None, :]
    ev = eigh(gs, eigvals_only=True)
    cond = ev[-1] / ev[0] if ev[0] > 0 else math.inf
    if cond > MAX_GRAM_CONDITION:
        raise DegreeError(
            f"scaled Gram condition number {cond:.3e} exceeds {MAX_GRAM_CONDITION:.0e}; "
            "reduce the degree range or add quadrature nodes"
        )
    c, piv, rank, info = lapack.zpstrf(gs, lower=1)
    if info < 0 or rank < gs.shape[0]:
        raise DegreeError(f"pivoted Cholesky lost rank ({rank} of {gs.shape[0]})")
    low = np.tril(c)
    perm = piv - 1
    # gs[perm][:, perm] = L L^H  =>  A = L^{-1} P^T D
    a = np.zeros_like(gs)
    a[:, perm] = solve_triangular(low, np.eye(len(perm)), lower=True)
    a = a * scale[None, :]
    # symmetric re-orthogonalisation: A <- (A G A^H)^{-1/2} A
    bp = b @ a.T
    g2 = bp.T @ np.conj(bp)
    vals, vecs = eigh(g2)
    a = (vecs * vals ** -0.5) @ vecs.conj().T @ a
    bp = b @ a.T
    resid = float(np.max(np.abs(bp.T @ np.conj(bp) - np.eye(len(a)))))
    return a, resid


@dataclass(frozen=True, eq=False)
class NumericKernel:
    """K(z, w) = sum_a psi_a(z) conj(psi_a(w)) with psi = A (z^k)_k."""

    domain: DomainSpec
    kind: KernelKind
    degrees: np.ndarray
    coefficients: np.ndarray
    gram_residual: float
    nodes: np.ndarray
    weights: np.ndarray
    c1: float = 2.0

    def basis(self, z) -> np.ndarray:
        """psi_a(z) for each point: shape (len(z), m)."""
        return _monomials(z, self.degrees) @ self.coefficients.T

    def basis_derivative(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1, 1)
        k = self.degrees[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            dm = np.where(k != 0, k * z ** (k - 1), 0.0)
        return dm @ self.coefficients.T

    def eval(self, z, w) -> complex:
        return complex(self.eval_matrix([z], [w])[0, 0])

    def eval_matrix(self, zs, ws) -> np.ndarray:
        """Matrix K(zs[i], ws[j])."""
        return self.basis(zs) @ np.conj(self.basis(ws)).T

    def diagonal_jet(self, z) -> DiagonalJet:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if not self.domain_contains(z[0]):
            raise ArgumentError(f"{z[0]} is not interior")
        psi = self.basis(z)[0]
        dpsi = self.basis_derivative(z)[0]
        k0 = float(np.vdot(psi, psi).real)
        k1 = np.array([np.vdot(psi, dpsi)])
        k2 = np.array([[np.vdot(dpsi, dpsi)]])
        return DiagonalJet(k0, k1, k2)

    def domain_contains(self, z) -> bool:
        return contains(self.domain, z)


def build_szego(curve: CurveSpec, degrees, c1: float = 2.0) -> NumericKernel:
    """Szegő kernel for the measure (c1/2) ds on ``curve`` from monomials z^k, k in ``degrees``.

    ``degrees`` is an inclusive ``(lo, hi)`` pair or an explicit sequence.
    """
    ks = _degree_array(degrees)
    if ks.min() < 0 and curve.components < 2:
        raise ArgumentError("negative exponents need a doubly connected boundary")
    pts, wts = curve.boundary_nodes(c1)
    a, resid = _orthonormalize(_monomials(pts, ks), wts)
    domain = _curve_domain(curve)
    return NumericKernel(domain, KernelKind.SZEGO, ks, a, resid, pts, wts, c1)


def build_bergman(grid: PolarGrid, degrees) -> NumericKernel:
    """Bergman kernel of the disk or annulus covered by ``grid``."""
    ks = _degree_array(degrees)
    if ks.min() < 0 and grid.inner_radius == 0:
        raise ArgumentError("negative exponents are not square integrable on the disk")
    pts, wts = grid.nodes()
    a, resid = _orthonormalize(_monomials(pts, ks), wts)
    return NumericKernel(grid.domain(), KernelKind.BERGMAN, ks, a, resid, pts, wts)


def _degree_array(degrees) -> np.ndarray:
    if isinstance(degrees, tuple) and len(degrees) == 2:
        lo, hi = degrees
        if lo > hi:
            raise ArgumentError(f"empty degree range {degrees}")
        return np.arange(int(lo), int(hi) + 1)
    return np.array(sorted(set(int(k) for k in degrees)))


def _curve_domain(curve: CurveSpec) -> DomainSpec:
    if curve.family == "circle":
        return DomainSpec.disk()
    if curve.family == "annulus":
        return DomainSpec.annulus(curve.params[0])
    return DomainSpec.planar_curve(curve)


def reproducing_residual(kernel: NumericKernel, f: Callable, z, nodes=None) -> float:
    """|integral of K(z, .) f against the kernel's measure - f(z)|.

    ``nodes`` optionally supplies an independent (points, weights) quadrature;
    for Szegő kernels on a curve the default is the trapezoid rule with twice
    the construction nodes.
    """
    if nodes is None:
        if kernel.kind is KernelKind.SZEGO and kernel.domain.kind is DomainKind.PLANAR_CURVE:
            curve = kernel.domain.curve
            pts, wts = curve.boundary_nodes(kernel.c1, 2 * curve.nodes)
        else:
            pts, wts = kernel.nodes, kernel.weights
    else:
        pts, wts = nodes
    kz = kernel.eval_matrix([z], pts)[0]
    value = np.sum(kz * f(pts) * wts)
    return float(abs(value - f(np.asarray(z, dtype=complex))))


@functools.lru_cache(maxsize=32)
def _cached_curve_kernel(curve: CurveSpec, c1: float, degree: int) -> NumericKernel:
    lo = -degree if curve.components == 2 else 0
    return build_szego(curve, (lo, degree), c1)


def default_curve_kernel(curve: CurveSpec, kind, config: NumericConfig) -> NumericKernel:
    """Szegő kernel of a curve domain at the default degree range (0..30)."""
    if kind is not KernelKind.SZEGO:
        raise CapabilityError("Bergman kernels are built only on disk/annulus polar grids")
    return _cached_curve_kernel(curve, float(config.c1), 30)
