"""Model domains, points, and numeric configuration shared by every module."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ArgumentError, DomainError, DomainMarginError

#: Kernel and metric evaluations refuse points closer than this to the boundary.
BOUNDARY_MARGIN = 1e-8
MAX_BALL_DIMENSION = 12


class DomainKind(enum.Enum):
    UNIT_DISK = "disk"
    ANNULUS = "annulus"
    UNIT_BALL = "ball"
    PLANAR_CURVE = "curve"


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind
    inner_radius: float | None = None
    dimension: int = 1
    curve: Any = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ArgumentError(f"dimension must be >= 1, got {self.dimension}")
        if self.kind is DomainKind.ANNULUS:
            r = self.inner_radius
            if r is None or not 0.0 < r < 1.0:
                raise ArgumentError(f"annulus inner radius must lie in (0, 1), got {r}")
        elif self.inner_radius is not None:
            raise ArgumentError("inner_radius is only meaningful for an annulus")
        if self.kind is not DomainKind.UNIT_BALL and self.dimension != 1:
            raise ArgumentError(f"{self.kind.value} is planar; dimension must be 1")
        if self.kind is DomainKind.UNIT_BALL and self.dimension > MAX_BALL_DIMENSION:
            raise ArgumentError(f"ball dimension capped at {MAX_BALL_DIMENSION}")
        if self.kind is DomainKind.PLANAR_CURVE and self.curve is None:
            raise ArgumentError("planar curve domain needs a curve")

    @classmethod
    def disk(cls) -> DomainSpec:
        return cls(DomainKind.UNIT_DISK)

    @classmethod
    def annulus(cls, r: float) -> DomainSpec:
        return cls(DomainKind.ANNULUS, inner_radius=float(r))

    @classmethod
    def ball(cls, n: int) -> DomainSpec:
        return cls(DomainKind.UNIT_BALL, dimension=int(n))

    @classmethod
    def planar_curve(cls, curve) -> DomainSpec:
        return cls(DomainKind.PLANAR_CURVE, curve=curve)

    @classmethod
    def parse(cls, selector: str) -> DomainSpec:
        """Build a domain from ``disk``, ``annulus:R``, ``ball:N`` or ``curve:NAME``."""
        head, _, arg = selector.strip().partition(":")
        try:
            if head == "disk" and not arg:
                return cls.disk()
            if head == "annulus":
                return cls.annulus(float(arg))
            if head == "ball":
                n = int(arg)
                return cls.disk() if n == 1 else cls.ball(n)
            if head == "curve":
                from .quadrature import CurveSpec

                return cls.planar_curve(CurveSpec.parse(arg))
        except ValueError as exc:
            raise ArgumentError(f"bad domain selector {selector!r}: {exc}") from exc
        raise ArgumentError(f"unknown domain selector {selector!r}")

    @property
    def is_planar(self) -> bool:
        return self.kind is not DomainKind.UNIT_BALL

    def label(self) -> str:
        if self.kind is DomainKind.ANNULUS:
            return f"annulus:{self.inner_radius!r}"
        if self.kind is DomainKind.UNIT_BALL:
            return f"ball:{self.dimension}"
        if self.kind is DomainKind.PLANAR_CURVE:
            return f"curve:{self.curve.name}"
        return "disk"

    def boundary_distance(self, z) -> float:
        """Signed Euclidean distance to the boundary, positive inside."""
        p = as_point(self, z)
        if self.kind is DomainKind.UNIT_DISK:
            return 1.0 - abs(p[0])
        if self.kind is DomainKind.ANNULUS:
            a = abs(p[0])
            return min(a - self.inner_radius, 1.0 - a)
        if self.kind is DomainKind.UNIT_BALL:
            return 1.0 - float(np.linalg.norm(p))
        return self.curve.boundary_distance(p[0])


def as_point(domain: DomainSpec, z) -> np.ndarray:
    """Coerce ``z`` to a complex vector of the domain's dimension."""
    p = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if p.shape[0] != domain.dimension:
        raise DomainError(
            f"point has {p.shape[0]} components, {domain.label()} needs {domain.dimension}"
        )
    if not np.all(np.isfinite(p)):
        raise DomainError("point has non-finite components")
    return p


def contains(domain: DomainSpec, z) -> bool:
    """True iff ``z`` lies strictly inside ``domain``."""
    p = as_point(domain, z)
    if domain.kind is DomainKind.UNIT_DISK:
        return abs(p[0]) < 1.0
    if domain.kind is DomainKind.ANNULUS:
        return domain.inner_radius < abs(p[0]) < 1.0
    if domain.kind is DomainKind.UNIT_BALL:
        return float(np.vdot(p, p).real) < 1.0
    return bool(domain.curve.contains(p[0]))


def require_interior(domain: DomainSpec, z, margin: float = BOUNDARY_MARGIN) -> np.ndarray:
    p = as_point(domain, z)
    if not contains(domain, p):
        raise DomainError(f"{p} is not interior to {domain.label()}")
    if domain.boundary_distance(p) < margin:
        raise DomainMarginError(
            f"{p} is within {margin:g} of the boundary of {domain.label()}"
        )
    return p


@dataclass(frozen=True)
class PointDir:
    z: Any
    xi: Any

    def resolved(self, domain: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
        z = as_point(domain, self.z)
        xi = np.atleast_1d(np.asarray(self.xi, dtype=complex)).ravel()
        if xi.shape != z.shape:
            raise ArgumentError("direction and point dimensions differ")
        if not np.any(xi):
            raise ArgumentError("direction must be nonzero")
        return z, xi


@dataclass(frozen=True)
class NumericConfig:
    series_cutoff: int = 32
    fd_step: float = 1e-5
    c1: float = 2.0
    cn: float = 1.0

    def __post_init__(self):
        if self.series_cutoff < 1:
            raise ArgumentError("series_cutoff must be >= 1")
        if not 0.0 < self.fd_step <= 1e-2:
            raise ArgumentError("fd_step must lie in (0, 1e-2]")
        if self.c1 <= 0 or self.cn <= 0:
            raise ArgumentError("dimensional constants must be positive")

    def dimensional_constant(self, n: int) -> float:
        """The Fefferman-measure constant c_n used for dimension ``n``."""
        return self.c1 if n == 1 else self.cn
