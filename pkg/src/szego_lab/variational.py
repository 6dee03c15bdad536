"""Metric values from the extremal problem over a truncated orthonormal basis.

For an orthonormal family phi_a, write e_a = phi_a(p) and d_a = (xi . grad phi_a)(p).
Over unit-norm g = sum c_a phi_a with g(p) = 0, the largest |xi g(p)|^2 is the
squared length of conj(d) projected off conj(e); dividing by S(p, p) = |e|^2
gives F^2. This is computed independently of any kernel derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .domains import DomainKind, DomainSpec, NumericConfig, PointDir, require_interior
from .errors import CapabilityError, NumericalError
from .kernels import KernelKind, _cutoff_for, annulus_coefficients, annulus_cutoffs


@dataclass(frozen=True)
class BasisFrame:
    """Orthonormal monomial family c_a z^a for one domain and kernel kind."""

    domain: DomainSpec
    kind: KernelKind
    exponents: np.ndarray  # (m, n) integer multi-indices
    coefficients: np.ndarray  # (m,) positive normalisers
    cutoff: int

    def __len__(self):
        return self.exponents.shape[0]

    def _powers(self, p) -> list[np.ndarray]:
        """p_j ** alpha_j for each column j, looked up from a table of powers."""
        alpha = self.exponents
        lo, hi = int(alpha.min()), int(alpha.max())
        out = []
        for j, pj in enumerate(p):
            with np.errstate(divide="ignore", invalid="ignore"):
                table = pj ** np.arange(lo, hi + 1, dtype=float)
            out.append(table[alpha[:, j] - lo])
        return out

    def values(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=complex).reshape(-1)
        mono = np.ones(len(self), dtype=complex)
        for col in self._powers(p):
            mono *= col
        return self.coefficients * mono

    def directional(self, p, xi) -> np.ndarray:
        p = np.asarray(p, dtype=complex).reshape(-1)
        xi = np.asarray(xi, dtype=complex).reshape(-1)
        alpha = self.exponents
        cols = self._powers(p)
        out = np.zeros(len(self), dtype=complex)
        for j in range(len(p)):
            aj = alpha[:, j]
            # d/dz_j z^a = a_j z^(a - e_j); the lowered power is zero where a_j = 0
            with np.errstate(divide="ignore", invalid="ignore"):
                table = p[j] ** np.arange(int(aj.min()) - 1, int(aj.max()), dtype=float)
            term = xi[j] * aj * np.where(aj != 0, table[aj - int(aj.min())], 0.0)
            for i, col in enumerate(cols):
                if i != j:
                    term = term * col
            out += term
        return self.coefficients * out

    def evaluate(self, coeffs, z) -> complex:
        """g(z) for g = sum coeffs_a phi_a."""
        return complex(np.dot(coeffs, self.values(z)))


def _ball_exponents(n: int, degree: int) -> np.ndarray:
    """All multi-indices in n variables with total degree <= degree."""
    rows = np.arange(degree + 1, dtype=np.int64).reshape(-1, 1)
    for _ in range(n - 1):
        budget = degree - rows.sum(axis=1)
        counts = budget + 1
        parent = np.repeat(np.arange(len(rows)), counts)
        offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        rows = np.column_stack([rows[parent], offsets])
    return rows


def frame_cutoff(domain: DomainSpec, p, kind, target: float = 1e-17) -> int:
    """Smallest degree whose neglected kernel tail at ``p`` is below ``target``."""
    p = np.asarray(p, dtype=complex).reshape(-1)
    rho = float(np.vdot(p, p).real)
    if domain.kind is DomainKind.ANNULUS:
        r = domain.inner_radius
        return max(annulus_cutoffs(r, rho, r * r / rho, kind, target=target))
    return _cutoff_for(rho, domain.dimension + 2, 1.0, target, 4)


def build_frame(domain: DomainSpec, kind, cutoff: int, config: NumericConfig | None = None) -> BasisFrame:
    """Orthonormal monomials of total degree <= cutoff (|exponent| <= cutoff on the annulus)."""
    config = config or NumericConfig()
    kind = kind if isinstance(kind, KernelKind) else KernelKind(str(kind).lower())
    if domain.kind is DomainKind.ANNULUS:
        r = domain.inner_radius
        ks = np.arange(-cutoff, cutoff + 1)
        sq = np.array([annulus_coefficients(r, k, kind) for k in ks])
        if kind is KernelKind.SZEGO:
            sq = sq * (2.0 / config.c1)
        return BasisFrame(domain, kind, ks.reshape(-1, 1), np.sqrt(sq), cutoff)
    if domain.kind not in (DomainKind.UNIT_DISK, DomainKind.UNIT_BALL):
        raise CapabilityError(f"no monomial frame for {domain.label()}")
    n = domain.dimension
    alpha = _ball_exponents(n, cutoff)
    total = alpha.sum(axis=1)
    log_fact = gammaln(alpha + 1).sum(axis=1)
    if kind is KernelKind.SZEGO:
        # |z^a|^2 integrated against c_n/2 times Euclidean measure on the sphere
        log_norm = math.log(config.dimensional_constant(n)) + n * math.log(math.pi) + log_fact - gammaln(n + total)
    else:
        log_norm = n * math.log(math.pi) + log_fact - gammaln(n + 1 + total)
    return BasisFrame(domain, kind, alpha, np.exp(-0.5 * log_norm), cutoff)


def _projection(frame: BasisFrame, z: np.ndarray, xi: np.ndarray):
    e = frame.values(z)
    d = frame.directional(z, xi)
    ee = float(np.vdot(e, e).real)
    if ee == 0.0:
        raise NumericalError("all frame elements vanish at the point")
    u, v = np.conj(e), np.conj(d)
    resid = v - (np.vdot(u, v) / ee) * u
    return e, d, ee, resid


def variational_metric(frame: BasisFrame, at: PointDir) -> float:
    z, xi = at.resolved(frame.domain)
    require_interior(frame.domain, z)
    _, _, ee, resid = _projection(frame, z, xi)
    return math.sqrt(float(np.vdot(resid, resid).real) / ee)


def extremal_coefficients(frame: BasisFrame, at: PointDir) -> np.ndarray:
    """Coefficients of the unit-norm maximiser g with g(p) = 0."""
    z, xi = at.resolved(frame.domain)
    _, _, _, resid = _projection(frame, z, xi)
    norm = np.linalg.norm(resid)
    if norm == 0.0:
        raise NumericalError("extremal problem is degenerate in this direction")
    return resid / norm


def auto_frame(domain: DomainSpec, kind, p, config: NumericConfig | None = None) -> BasisFrame:
    return build_frame(domain, kind, frame_cutoff(domain, p, kind), config)


def annulus_caratheodory_bounds(r: float, p: complex, xi: complex) -> dict[str, float]:
    """Lower bounds |xi phi'(p)| from explicit maps phi: {r<|z|<1} -> unit disk, phi(p) = 0.

    ``disk-automorphism``: (z - p) / (1 - conj(p) z).
    ``inverted-automorphism``: the same automorphism centred at r/p, applied to r/z.
    """
    p = complex(p)
    a = abs(p)
    if not r < a < 1:
        raise NumericalError(f"{p} is not in the annulus r={r}")
    return {
        "disk-automorphism": abs(xi) / (1.0 - a * a),
        "inverted-automorphism": abs(xi) * r / (a * a - r * r),
    }
