"""Automorphism families with Jacobians and explicit branches, and the
transformation-law checks built on them.

Every map here is a self-map of its domain. Branches of (det J)^(n/(n+1))
are explicit formulas per family, never numerical continuation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import unitary_group

from .domains import DomainKind, DomainSpec, NumericConfig, PointDir
from .errors import ArgumentError, BranchError
from .fefferman import MAX_PULLBACK_DIMENSION, pullback_check
from .kernels import KernelKind
from .metrics import hessian_metric, kernel_for, sk_function

DEFAULT_SEED = 0x5EED
BRANCH_TOLERANCE = 1e-12
SERIES_TOLERANCE = 1e-8
CLOSED_FORM_TOLERANCE = 1e-10


class Family(enum.Enum):
    IDENTITY = "identity"
    DISK_MOBIUS = "disk-mobius"
    DISK_ROTATION = "disk-rotation"
    ANNULUS_ROTATION = "annulus-rotation"
    ANNULUS_INVERSION = "annulus-inversion"
    BALL_AUTOMORPHISM = "ball-automorphism"
    COMPOSITE = "composite"


def _rows(z, n: int) -> np.ndarray:
    return np.asarray(z, dtype=complex).reshape(-1, n)


@dataclass(frozen=True, eq=False)
class AutomorphismMap:
    """A biholomorphic self-map acting on rows of an (m, n) array.

    ``jacobian`` returns (m, n, n); ``jac_det`` and ``branch_power`` return (m,).
    """

    family: Family
    domain: DomainSpec
    params: dict
    _forward: Callable = field(repr=False)
    _inverse: Callable = field(repr=False)
    _jacobian: Callable = field(repr=False)
    _branch: Callable = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    def forward(self, z) -> np.ndarray:
        return self._forward(_rows(z, self.dimension))

    def inverse(self, z) -> np.ndarray:
        return self._inverse(_rows(z, self.dimension))

    def jacobian(self, z) -> np.ndarray:
        return self._jacobian(_rows(z, self.dimension))

    def jac_det(self, z) -> np.ndarray:
        return np.linalg.det(self.jacobian(z))

    def branch_power(self, z) -> np.ndarray:
        """The chosen holomorphic branch of (det J)^(n/(n+1))."""
        return self._branch(_rows(z, self.dimension))

    def branch_residual(self, z) -> float:
        """max |b^(n+1) - det J^n| / |det J^n| over the rows of ``z``."""
        n = self.dimension
        b = self.branch_power(z)
        d = self.jac_det(z) ** n
        return float(np.max(np.abs(b ** (n + 1) - d) / np.abs(d)))

    def label(self) -> str:
        inner = ", ".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.family.value}({inner})"


def _fmt(v):
    if isinstance(v, np.ndarray):
        return "[" + " ".join(_fmt(x) for x in v.ravel()) + "]"
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# -- constructors ------------------------------------------------------------


def identity(domain: DomainSpec) -> AutomorphismMap:
    n = domain.dimension

    def jac(z):
        return np.broadcast_to(np.eye(n, dtype=complex), (len(z), n, n)).copy()

    return AutomorphismMap(Family.IDENTITY, domain, {}, lambda z: z.copy(), lambda z: z.copy(),
                           jac, lambda z: np.ones(len(z), dtype=complex))


def disk_mobius(a: complex, theta: float = 0.0) -> AutomorphismMap:
    """z -> e^(i theta) (z - a) / (1 - conj(a) z)."""
    a = complex(a)
    if abs(a) >= 1.0:
        raise ArgumentError(f"|a| must be < 1, got {abs(a)}")
    rot = complex(math.cos(theta), math.sin(theta))
    half = complex(math.cos(theta / 2), math.sin(theta / 2))
    s = 1.0 - abs(a) ** 2
    ac = a.conjugate()

    def fwd(z):
        return rot * (z - a) / (1.0 - ac * z)

    def inv(w):
        u = w / rot
        return (u + a) / (1.0 + ac * u)

    def jac(z):
        return (rot * s / (1.0 - ac * z) ** 2)[:, :, None]

    def branch(z):
        return (half * math.sqrt(s) / (1.0 - ac * z))[:, 0]

    return AutomorphismMap(Family.DISK_MOBIUS, DomainSpec.disk(), {"a": a, "theta": float(theta)},
                           fwd, inv, jac, branch)


def disk_rotation(theta: float) -> AutomorphismMap:
    m = disk_mobius(0.0, theta)
    return AutomorphismMap(Family.DISK_ROTATION, m.domain, {"theta": float(theta)},
                           m._forward, m._inverse, m._jacobian, m._branch)


def annulus_rotation(r: float, theta: float) -> AutomorphismMap:
    domain = DomainSpec.annulus(r)
    rot = complex(math.cos(theta), math.sin(theta))
    half = complex(math.cos(theta / 2), math.sin(theta / 2))
    return AutomorphismMap(
        Family.ANNULUS_ROTATION, domain, {"r": float(r), "theta": float(theta)},
        lambda z: rot * z, lambda w: w / rot,
        lambda z: np.full((len(z), 1, 1), rot),
        lambda z: np.full(len(z), half),
    )


def annulus_inversion(r: float) -> AutomorphismMap:
    """z -> r / z, an involution of r < |z| < 1; branch of (-r/z^2)^(1/2) is i sqrt(r)/z."""
    domain = DomainSpec.annulus(r)
    sr = math.sqrt(r)
    return AutomorphismMap(
        Family.ANNULUS_INVERSION, domain, {"r": float(r)},
        lambda z: r / z, lambda w: r / w,
        lambda z: (-r / z**2)[:, :, None],
        lambda z: (1j * sr / z)[:, 0],
    )


def ball_automorphism(a, unitary=None) -> AutomorphismMap:
    """U phi_a with phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - |a|^2).

    phi_a is an involution exchanging a and 0. The branch of (det J)^(n/(n+1)) is
    omega (1 - |a|^2)^(n/2) / (1 - <z, a>)^n with omega the principal root of
    ((-1)^n det U)^(n/(n+1)).
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    n = len(a)
    aa = float(np.vdot(a, a).real)
    if aa >= 1.0:
        raise ArgumentError(f"|a| must be < 1, got {math.sqrt(aa)}")
    u = np.eye(n, dtype=complex) if unitary is None else np.asarray(unitary, dtype=complex)
    if u.shape != (n, n) or not np.allclose(u.conj().T @ u, np.eye(n), atol=1e-12):
        raise ArgumentError("unitary must be an n x n unitary matrix")
    p = np.outer(a, a.conj()) / aa if aa > 0 else np.zeros((n, n), dtype=complex)
    q = np.eye(n) - p
    s = math.sqrt(1.0 - aa)
    lin = p + s * q
    ac = a.conj()
    omega = ((-1) ** n * np.linalg.det(u)) ** (n / (n + 1))
    domain = DomainSpec.ball(n)

    def phi(z):
        d = 1.0 - z @ ac
        return (a[None, :] - z @ lin.T) / d[:, None]

    def fwd(z):
        return phi(z) @ u.T

    def inv(w):
        return phi(w @ u.conj())

    def jac(z):
        d = 1.0 - z @ ac
        num = a[None, :] - z @ lin.T
        j = -lin[None, :, :] / d[:, None, None] + num[:, :, None] * ac[None, None, :] / (d**2)[:, None, None]
        return u[None, :, :] @ j

    def branch(z):
        d = 1.0 - z @ ac
        return omega * (1.0 - aa) ** (n / 2) / d**n

    return AutomorphismMap(Family.BALL_AUTOMORPHISM, domain, {"a": a, "unitary": u},
                           fwd, inv, jac, branch)


def compose(outer: AutomorphismMap, inner: AutomorphismMap) -> AutomorphismMap:
    """outer o inner, with Jacobian and branch by the chain rule."""
    if outer.domain != inner.domain:
        raise ArgumentError("maps act on different domains")
    return AutomorphismMap(
        Family.COMPOSITE, inner.domain, {"outer": outer.label(), "inner": inner.label()},
        lambda z: outer._forward(inner._forward(z)),
        lambda w: inner._inverse(outer._inverse(w)),
        lambda z: outer._jacobian(inner._forward(z)) @ inner._jacobian(z),
        lambda z: outer._branch(inner._forward(z)) * inner._branch(z),
    )


def cocycle_residual(outer: AutomorphismMap, inner: AutomorphismMap, z) -> float:
    """Compare the composite's Jacobian determinant and branch to the factor products."""
    z = _rows(z, inner.dimension)
    comp = compose(outer, inner)
    w = inner.forward(z)
    det_direct = np.linalg.det(comp.jacobian(z))
    det_factor = outer.jac_det(w) * inner.jac_det(z)
    res = np.abs(det_direct - det_factor) / np.abs(det_factor)
    res = max(float(np.max(res)), comp.branch_residual(z))
    return res


# -- laws ----------------------------------------------------------------------


def _relative(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / abs(lhs)


def _require_branch(amap: AutomorphismMap, z: np.ndarray):
    res = amap.branch_residual(z)
    if not res <= BRANCH_TOLERANCE:
        raise BranchError(f"branch of (det J)^(n/(n+1)) is inconsistent for {amap.label()} "
                          f"(residual {res:.3e})")


def check_szego_law(amap: AutomorphismMap, z, w, config: NumericConfig | None = None) -> float:
    """|S(z,w) - S(Phi z, Phi w) b(z) conj(b(w))| / |S(z,w)|."""
    pts = _rows(np.concatenate([_rows(z, amap.dimension), _rows(w, amap.dimension)]), amap.dimension)
    _require_branch(amap, pts)
    kernel = kernel_for(amap.domain, KernelKind.SZEGO, config)
    img = amap.forward(pts)
    b = amap.branch_power(pts)
    lhs = kernel.eval(pts[0], pts[1])
    rhs = kernel.eval(img[0], img[1]) * b[0] * np.conj(b[1])
    return _relative(lhs, rhs)


def check_bergman_law(amap: AutomorphismMap, z, w, config: NumericConfig | None = None) -> float:
    """|K(z,w) - K(Phi z, Phi w) det J(z) conj(det J(w))| / |K(z,w)|."""
    pts = _rows(np.concatenate([_rows(z, amap.dimension), _rows(w, amap.dimension)]), amap.dimension)
    kernel = kernel_for(amap.domain, KernelKind.BERGMAN, config)
    img = amap.forward(pts)
    d = amap.jac_det(pts)
    lhs = kernel.eval(pts[0], pts[1])
    rhs = kernel.eval(img[0], img[1]) * d[0] * np.conj(d[1])
    return _relative(lhs, rhs)


def check_metric_invariance(amap: AutomorphismMap, at: PointDir, which="szego",
                            config: NumericConfig | None = None) -> float:
    """Relative difference of F(z, xi) and F(Phi z, J(z) xi)."""
    z, xi = at.resolved(amap.domain)
    kernel = kernel_for(amap.domain, which, config)
    lhs = hessian_metric(kernel, PointDir(z, xi))
    img = amap.forward(z)[0]
    pushed = amap.jacobian(z)[0] @ xi
    rhs = hessian_metric(kernel, PointDir(img, pushed))
    return abs(lhs - rhs) / lhs


def check_sk_invariance(amap: AutomorphismMap, z, w, config: NumericConfig | None = None) -> float:
    n = amap.dimension
    pts = np.concatenate([_rows(z, n), _rows(w, n)])
    img = amap.forward(pts)
    lhs = sk_function(amap.domain, pts[0], pts[1], config)
    rhs = sk_function(amap.domain, img[0], img[1], config)
    return _relative(lhs, rhs)


def branch_loop_check(amap: AutomorphismMap, radius: float, points: int = 256) -> float:
    """Branch consistency around the circle |z| = radius, plus continuity across the loop.

    Returns the worst of the consistency residual and the largest step between
    consecutive branch values relative to the step of a smooth sampled curve.
    Closing the loop must return the starting value, so there is no monodromy.
    """
    if amap.dimension != 1:
        raise ArgumentError("loop check is for planar maps")
    th = 2 * np.pi * np.arange(points + 1) / points
    z = radius * np.exp(1j * th)
    b = amap.branch_power(z)
    consistency = amap.branch_residual(z)
    closure = abs(b[-1] - b[0]) / abs(b[0])
    # a sign flip shows up as a jump of size ~2|b|; smooth steps are O(2 pi / points)
    jumps = np.abs(np.diff(b)) / np.abs(b[:-1])
    if np.max(jumps) > 0.5:
        raise BranchError(f"branch jumps by {np.max(jumps):.3f} along the loop")
    return max(consistency, closure)


# -- randomized sweeps ---------------------------------------------------------


LAWS = ("szego", "bergman", "metric", "sk", "pullback")


@dataclass(frozen=True)
class LawResult:
    family: str
    law: str
    draws: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def _disk_point(rng, rmax):
    return math.sqrt(rng.uniform(0, rmax**2)) * np.exp(2j * np.pi * rng.uniform())


def _annulus_point(rng, r):
    lo, hi = r + 0.05 * (1 - r), 1 - 0.05 * (1 - r)
    return rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform())


def _ball_point(rng, n, rmax):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v) * rmax * rng.uniform() ** (1 / (2 * n))


def random_draw(family: Family, rng: np.random.Generator):
    """(map, z, w, xi) for one randomized trial."""
    if family is Family.DISK_MOBIUS:
        amap = disk_mobius(_disk_point(rng, 0.8), rng.uniform(0, 2 * np.pi))
        pts = [_disk_point(rng, 0.8) for _ in range(2)]
    elif family is Family.DISK_ROTATION:
        amap = disk_rotation(rng.uniform(0, 2 * np.pi))
        pts = [_disk_point(rng, 0.9) for _ in range(2)]
    elif family in (Family.ANNULUS_ROTATION, Family.ANNULUS_INVERSION):
        r = rng.uniform(0.05, 0.5)
        amap = (annulus_rotation(r, rng.uniform(0, 2 * np.pi)) if family is Family.ANNULUS_ROTATION
                else annulus_inversion(r))
        pts = [_annulus_point(rng, r) for _ in range(2)]
    elif family is Family.BALL_AUTOMORPHISM:
        n = int(rng.integers(2, 4))
        u = unitary_group.rvs(n, random_state=rng)
        amap = ball_automorphism(_ball_point(rng, n, 0.6), u)
        pts = [_ball_point(rng, n, 0.8) for _ in range(2)]
    else:
        raise ArgumentError(f"no random draws for {family.value}")
    n = amap.dimension
    xi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return amap, np.atleast_1d(pts[0]), np.atleast_1d(pts[1]), xi


def _test_function(rng, n):
    coeffs = rng.uniform(-1, 1, size=(3, n)) + 1j * rng.uniform(-1, 1, size=(3, n))
    c0 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))

    def f(pts):
        pts = np.asarray(pts).reshape(-1, n)
        out = np.full(len(pts), c0)
        for k in range(3):
            out = out + (pts ** (k + 1)) @ coeffs[k]
        return out

    return f


def tolerance_for(family: Family) -> float:
    if family in (Family.ANNULUS_ROTATION, Family.ANNULUS_INVERSION):
        return SERIES_TOLERANCE
    return CLOSED_FORM_TOLERANCE


SWEEP_FAMILIES = (Family.DISK_MOBIUS, Family.DISK_ROTATION, Family.ANNULUS_ROTATION,
                  Family.ANNULUS_INVERSION, Family.BALL_AUTOMORPHISM)


def law_sweep(seed: int = DEFAULT_SEED, draws: int = 100, families=SWEEP_FAMILIES, laws=LAWS,
              config: NumericConfig | None = None, pullback_nodes: int = 512) -> list[LawResult]:
    """Maximum residual of each law over ``draws`` seeded random trials per family.

    Draw ``k`` of family ``i`` uses the generator seeded by (seed, i, k), so any
    single draw can be reproduced in isolation.
    """
    unknown = set(laws) - set(LAWS)
    if unknown:
        raise ArgumentError(f"unknown laws {sorted(unknown)}")
    results = []
    for family in families:
        idx = list(Family).index(family)
        worst = dict.fromkeys(laws, 0.0)
        counts = dict.fromkeys(laws, 0)
        for k in range(draws):
            rng = np.random.default_rng([seed, idx, k])
            amap, z, w, xi = random_draw(family, rng)
            f = _test_function(rng, amap.dimension)
            for law in laws:
                if law == "szego":
                    res = check_szego_law(amap, z, w, config)
                elif law == "bergman":
                    res = check_bergman_law(amap, z, w, config)
                elif law == "metric":
                    res = max(check_metric_invariance(amap, PointDir(z, xi), kind, config)
                              for kind in ("szego", "bergman"))
                elif law == "sk":
                    res = check_sk_invariance(amap, z, w, config)
                elif amap.dimension > MAX_PULLBACK_DIMENSION:
                    continue
                else:
                    res = pullback_check(amap, f, _pullback_nodes(amap, pullback_nodes), config,
                                         relative=True)
                worst[law] = max(worst[law], float(res))
                counts[law] += 1
        results.extend(LawResult(family.value, law, counts[law], worst[law], tolerance_for(family))
                       for law in laws)
    return results


def _pullback_nodes(amap, nodes):
    # sphere quadrature cost grows like nodes^(n-1) * polar; keep the ball cheaper
    return 64 if amap.domain.kind is DomainKind.UNIT_BALL else nodes

