"""Closed-form and series Szegő/Bergman kernels on the disk, annulus and ball.

Every model kernel here has the form K(z, w) = f(z . conj(w)) for a profile
``f``: a negative power of ``1 - t`` on the ball (and disk), a Laurent series
in ``t`` on the annulus. On-diagonal derivatives follow from ``f`` directly:

    K_j      = f'(t) conj(z_j)
    K_{j k~} = f''(t) conj(z_j) z_k + f'(t) delta_{jk}

with ``t = |z|^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _accel
from .domains import DomainKind, DomainSpec, NumericConfig, require_interior
from .errors import ArgumentError, CapabilityError, PrecisionError

#: Relative size of the neglected series tail we aim for when choosing a cutoff.
TAIL_TARGET = 1e-17
#: A computed tail bound above this (relative) forces a larger cutoff.
TAIL_ESCALATE = 1e-14
MAX_CUTOFF = 200_000


class KernelKind(enum.Enum):
    SZEGO = "szego"
    BERGMAN = "bergman"


def _kind(kind) -> KernelKind:
    return kind if isinstance(kind, KernelKind) else KernelKind(str(kind).lower())


def annulus_coefficients(r: float, n: int, kind) -> float:
    """Squared norm factor |a_n(r)|^2 (Szegő) or |b_n(r)|^2 (Bergman) on r < |z| < 1.

    The Szegő value is for arclength measure on both boundary circles.
    """
    kind = _kind(kind)
    if not 0.0 < r < 1.0:
        raise ArgumentError(f"r must lie in (0, 1), got {r}")
    n = int(n)
    if kind is KernelKind.SZEGO:
        e = 2 * n + 1
        if e >= 0:
            return 1.0 / (2 * math.pi * (1.0 + r**e))
        q = r ** (-e)
        return q / (2 * math.pi * (1.0 + q))
    if n == -1:
        return 1.0 / (2 * math.pi * math.log(1.0 / r))
    e = 2 * n + 2
    if e > 0:
        return (n + 1) / (math.pi * (1.0 - r**e))
    q = r ** (-e)
    return (-(n + 1)) * q / (math.pi * (1.0 - q))


def _tail_bound(rho: float, degree: int, scale: float, n: int) -> float:
    # Bound on sum_{k > n} scale * k^degree * rho^k, valid once the term
    # ratio ((k+1)/k)^degree * rho drops below one.
    if rho <= 0.0:
        return 0.0
    q = ((n + 2) / (n + 1)) ** degree * rho
    if q >= 1.0:
        return math.inf
    return scale * (n + 1) ** degree * rho ** (n + 1) / (1.0 - q)


def _cutoff_for(rho: float, degree: int, scale: float, target: float, start: int) -> int:
    n = max(1, start)
    if rho <= 0.0:
        return n
    # jump close to the answer, then walk
    guess = int(math.log(target / scale) / math.log(rho)) if rho < 1.0 else MAX_CUTOFF
    n = max(n, min(guess, MAX_CUTOFF))
    while _tail_bound(rho, degree, scale, n) > target:
        n = int(n * 1.25) + 1
        if n > MAX_CUTOFF:
            raise PrecisionError(
                f"annulus series needs more than {MAX_CUTOFF} terms (rho={rho:.17g})"
            )
    return n


def annulus_cutoffs(r: float, rho_pos: float, rho_neg: float, kind, start: int = 1,
                    target: float = TAIL_TARGET) -> tuple[int, int]:
    """Cutoffs (N+, N-) whose geometric tails, including the n^2 moment weight,
    fall below ``target`` relative to the n = 0 term."""
    kind = _kind(kind)
    if kind is KernelKind.BERGMAN:
        ref = 1.0 / (math.pi * (1.0 - r * r))
        pos = _cutoff_for(rho_pos, 3, 1.0 / (math.pi * (1.0 - r * r)) / ref, target, start)
        neg = _cutoff_for(rho_neg, 3, 1.0 / (math.pi * r * r * (1.0 - r * r)) / ref, target, start)
    else:
        ref = 1.0 / (2 * math.pi * (1.0 + r))
        pos = _cutoff_for(rho_pos, 2, 1.0 / (2 * math.pi) / ref, target, start)
        neg = _cutoff_for(rho_neg, 2, 1.0 / (2 * math.pi * r) / ref, target, start)
    return pos, neg


def annulus_tail_estimate(r: float, rho_pos: float, rho_neg: float, kind,
                          n_pos: int, n_neg: int) -> float:
    """Absolute bound on the neglected part of the n^2-weighted moment."""
    kind = _kind(kind)
    if kind is KernelKind.BERGMAN:
        return (_tail_bound(rho_pos, 3, 1.0 / (math.pi * (1.0 - r * r)), n_pos)
                + _tail_bound(rho_neg, 3, 1.0 / (math.pi * r * r * (1.0 - r * r)), n_neg))
    return (_tail_bound(rho_pos, 2, 1.0 / (2 * math.pi), n_pos)
            + _tail_bound(rho_neg, 2, 1.0 / (2 * math.pi * r), n_neg))


@dataclass(frozen=True)
class DiagonalJet:
    """K(z, z) with its first and mixed second derivatives at one point."""

    k0: float
    k1: np.ndarray
    k2: np.ndarray

    def log_hessian(self) -> np.ndarray:
        """Matrix of d^2 log K / dz_j dconj(z_k)."""
        return (self.k0 * self.k2 - np.outer(self.k1, np.conj(self.k1))) / self.k0**2


@dataclass(frozen=True)
class KernelEvaluator:
    domain: DomainSpec
    kind: KernelKind
    config: NumericConfig = field(default_factory=NumericConfig)

    def __post_init__(self):
        object.__setattr__(self, "kind", _kind(self.kind))
        if self.domain.kind is DomainKind.PLANAR_CURVE:
            raise CapabilityError(
                "no closed-form kernel for a general curve; build one with quadrature"
            )

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    def with_cutoff(self, n: int) -> KernelEvaluator:
        return replace(self, config=replace(self.config, series_cutoff=int(n)))

    # -- ball and disk -------------------------------------------------------

    def _ball_profile(self):
        n = self.dimension
        if self.kind is KernelKind.SZEGO:
            c = math.factorial(n - 1) / (self.config.dimensional_constant(n) * math.pi**n)
            return c, n
        return math.factorial(n) / math.pi**n, n + 1

    # -- annulus -------------------------------------------------------------

    def _annulus_moments(self, t: np.ndarray, rho_pos: float, rho_neg: float) -> np.ndarray:
        r = self.domain.inner_radius
        bergman = self.kind is KernelKind.BERGMAN
        n_pos, n_neg = annulus_cutoffs(r, rho_pos, rho_neg, self.kind,
                                       start=self.config.series_cutoff)
        while True:
            m = _accel.series_moments(t, r, bergman, n_pos, n_neg)
            tail = annulus_tail_estimate(r, rho_pos, rho_neg, self.kind, n_pos, n_neg)
            ref = np.min(np.abs(m[0]))
            if tail <= TAIL_ESCALATE * ref:
                break
            n_pos, n_neg = 2 * n_pos, 2 * n_neg
            if max(n_pos, n_neg) > MAX_CUTOFF:
                raise PrecisionError("annulus series cutoff escalation failed")
        if not bergman:
            m = m * (2.0 / self.config.c1)
        return m

    def _annulus_t(self, z: np.ndarray, w: np.ndarray):
        t = z * np.conj(w)
        a = np.abs(t)
        r = self.domain.inner_radius
        return t, float(np.max(a)), float(r * r / np.min(a))

    # -- public --------------------------------------------------------------

    def eval(self, z, w) -> complex:
        """K(z, w), holomorphic in z and antiholomorphic in w."""
        z = require_interior(self.domain, z)
        w = require_interior(self.domain, w)
        if self.domain.kind is DomainKind.ANNULUS:
            t, rp, rn = self._annulus_t(z, w)
            return complex(self._annulus_moments(t, rp, rn)[0, 0])
        c, p = self._ball_profile()
        return complex(c * (1.0 - np.dot(z, np.conj(w))) ** (-p))

    def eval_many(self, zs, ws) -> np.ndarray:
        """Vectorised ``eval`` over rows of ``zs`` and ``ws`` (no margin checks)."""
        n = self.dimension
        zs = np.asarray(zs, dtype=complex).reshape(-1, n)
        ws = np.asarray(ws, dtype=complex).reshape(-1, n)
        if self.domain.kind is DomainKind.ANNULUS:
            t, rp, rn = self._annulus_t(zs[:, 0], ws[:, 0])
            return self._annulus_moments(t, rp, rn)[0]
        c, p = self._ball_profile()
        return c * (1.0 - np.sum(zs * np.conj(ws), axis=1)) ** (-p)

    def diagonal_jet(self, z) -> DiagonalJet:
        z = require_interior(self.domain, z)
        t = float(np.vdot(z, z).real)
        if self.domain.kind is DomainKind.ANNULUS:
            _, rp, rn = self._annulus_t(z, z)
            m = self._annulus_moments(np.array([t + 0j]), rp, rn)[:, 0]
            k0 = float(m[0].real)
            k1 = np.array([m[1].real / z[0]])
            k2 = np.array([[m[2].real / t]], dtype=complex)
            return DiagonalJet(k0, k1, k2)
        c, p = self._ball_profile()
        u = 1.0 - t
        f0 = c * u ** (-p)
        f1 = c * p * u ** (-p - 1)
        f2 = c * p * (p + 1) * u ** (-p - 2)
        zb = np.conj(z)
        k2 = f2 * np.outer(zb, z) + f1 * np.eye(len(z))
        return DiagonalJet(float(f0), f1 * zb, k2)
