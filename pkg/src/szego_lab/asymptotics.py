"""Metric limits on thin annuli r < |z| < 1 as r -> 0.

Each experiment evaluates F(r^q, 1) along a decreasing sequence of inner radii,
applies a normalisation and compares with the limiting value. The last three
rows also feed an Aitken extrapolation, which estimates the limit without
assuming a convergence rate.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .domains import DomainSpec, NumericConfig, PointDir
from .errors import ArgumentError, PrecisionError
from .kernels import KernelEvaluator, KernelKind
from .metrics import hessian_metric

MIN_RADIUS = 1e-12


class Normalization(enum.Enum):
    DIV_SQRT_LOG = "div-sqrt-log"
    MUL_SQRT_R = "mul-sqrt-r"
    RAW = "raw"

    def apply(self, value: float, r: float) -> float:
        if self is Normalization.DIV_SQRT_LOG:
            return value / math.sqrt(math.log(1.0 / r))
        if self is Normalization.MUL_SQRT_R:
            return value * math.sqrt(r)
        return value


class Probe(enum.Enum):
    SQRT = Fraction(1, 2)
    FIFTH_ROOT = Fraction(1, 5)

    @classmethod
    def parse(cls, text: str) -> Probe:
        key = str(text).lower().replace("_", "-")
        names = {"sqrt": cls.SQRT, "1/2": cls.SQRT, "fifth-root": cls.FIFTH_ROOT, "fifth": cls.FIFTH_ROOT,
                 "1/5": cls.FIFTH_ROOT}
        if key not in names:
            raise ArgumentError(f"unknown probe {text!r}; use sqrt or fifth-root")
        return names[key]


def default_sequence(probe: Probe) -> list[float]:
    """r = 10^-k with k = 1..6 (square-root probe) or k = 1..12 (fifth-root probe)."""
    last = 6 if probe is Probe.SQRT else 12
    return [10.0 ** (-k) for k in range(1, last + 1)]


def decade_sequence(decades: int) -> list[float]:
    if decades < 1:
        raise ArgumentError("need at least one decade")
    return [10.0 ** (-k) for k in range(1, decades + 1)]


#: (kernel, probe) -> (normalisation, limit)
LIMITS = {
    (KernelKind.BERGMAN, Probe.SQRT): (Normalization.DIV_SQRT_LOG, 2.0),
    (KernelKind.SZEGO, Probe.SQRT): (Normalization.MUL_SQRT_R, 0.5),
    (KernelKind.BERGMAN, Probe.FIFTH_ROOT): (Normalization.DIV_SQRT_LOG, math.sqrt(2.0)),
    (KernelKind.SZEGO, Probe.FIFTH_ROOT): (Normalization.RAW, 1.0),
}


@dataclass(frozen=True)
class LimitExperiment:
    kind: KernelKind
    probe: Probe
    r_sequence: tuple[float, ...]
    normalization: Normalization
    expected_limit: float

    def __post_init__(self):
        rs = tuple(float(r) for r in self.r_sequence)
        object.__setattr__(self, "r_sequence", rs)
        if not rs:
            raise ArgumentError("empty r sequence")
        if any(b >= a for a, b in zip(rs, rs[1:])):
            raise ArgumentError("r sequence must be strictly decreasing")
        if rs[-1] < MIN_RADIUS or rs[0] >= 1.0:
            raise ArgumentError(f"radii must lie in [{MIN_RADIUS:g}, 1)")

    @classmethod
    def standard(cls, kind, probe: Probe, r_sequence=None) -> LimitExperiment:
        kind = kind if isinstance(kind, KernelKind) else KernelKind(str(kind).lower())
        norm, limit = LIMITS[(kind, probe)]
        seq = default_sequence(probe) if r_sequence is None else r_sequence
        return cls(kind, probe, tuple(seq), norm, limit)

    @property
    def exponent(self) -> float:
        return float(self.probe.value)


@dataclass(frozen=True)
class LimitRow:
    r: float
    z: float
    raw_F: float
    normalized: float
    expected: float

    @property
    def abs_error(self) -> float:
        return abs(self.normalized - self.expected)


@dataclass
class LimitTable:
    experiment: LimitExperiment
    rows: list[LimitRow] = field(default_factory=list)
    failure: str | None = None

    @property
    def final(self) -> LimitRow:
        return self.rows[-1]

    def extrapolated(self) -> float | None:
        """Aitken delta-squared estimate of the limit from the last three rows."""
        if len(self.rows) < 3:
            return None
        return aitken(*(row.normalized for row in self.rows[-3:]))

    def tail_is_cauchy(self) -> bool:
        """Successive differences shrink over the last three decades."""
        vals = [row.normalized for row in self.rows[-4:]]
        diffs = [abs(b - a) for a, b in zip(vals, vals[1:])]
        return len(diffs) >= 2 and all(b < a for a, b in zip(diffs, diffs[1:]))

    def to_csv(self, metadata: dict | None = None) -> str:
        buf = io.StringIO()
        exp = self.experiment
        meta = {
            "kernel": exp.kind.value,
            "probe": f"z = r^({exp.probe.value})",
            "normalization": exp.normalization.value,
            "expected_limit": repr(exp.expected_limit),
        }
        extra = self.extrapolated()
        if extra is not None:
            meta["aitken_extrapolation"] = repr(extra)
            meta["note"] = "tolerances rest on the empirical rate of the last three rows"
        if self.failure:
            meta["precision_failure"] = self.failure
            meta["last_trustworthy_r"] = repr(self.rows[-1].r) if self.rows else "none"
        meta.update(metadata or {})
        for key, value in meta.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["r", "z", "raw_F", "normalized", "expected", "abs_error"])
        for row in self.rows:
            writer.writerow([repr(row.r), repr(row.z), repr(row.raw_F), repr(row.normalized),
                             repr(row.expected), repr(row.abs_error)])
        return buf.getvalue()


def aitken(x0: float, x1: float, x2: float) -> float:
    denom = (x2 - x1) - (x1 - x0)
    if denom == 0.0:
        return x2
    return x2 - (x2 - x1) ** 2 / denom


def annulus_metric(kind, r: float, z: float, config: NumericConfig | None = None) -> float:
    """F(z, 1) on r < |z| < 1."""
    kernel = KernelEvaluator(DomainSpec.annulus(r), kind, config or NumericConfig())
    return hessian_metric(kernel, PointDir(z, 1.0))


def run_limit(experiment: LimitExperiment, config: NumericConfig | None = None) -> LimitTable:
    """Rows of normalised metric values, one per radius.

    A precision failure stops the run; earlier rows are kept and the failure is
    recorded on the table.
    """
    table = LimitTable(experiment)
    for r in experiment.r_sequence:
        z = r**experiment.exponent
        try:
            raw = annulus_metric(experiment.kind, r, z, config)
        except PrecisionError as exc:
            table.failure = f"r={r!r}: {exc}"
            break
        table.rows.append(LimitRow(r, z, raw, experiment.normalization.apply(raw, r),
                                   experiment.expected_limit))
    return table


@dataclass(frozen=True)
class RatioRow:
    r: float
    z: float
    szego: float
    bergman: float

    @property
    def ratio(self) -> float:
        return self.szego / self.bergman


def run_ratio(probe: Probe, r_sequence, config: NumericConfig | None = None) -> list[RatioRow]:
    """F_S / F_B at z = r^q along ``r_sequence``."""
    rows = []
    q = float(probe.value)
    for r in r_sequence:
        z = r**q
        rows.append(RatioRow(r, z, annulus_metric(KernelKind.SZEGO, r, z, config),
                             annulus_metric(KernelKind.BERGMAN, r, z, config)))
    return rows


def is_monotone(values, increasing: bool) -> bool:
    pairs = list(zip(values, values[1:]))
    return all(b > a for a, b in pairs) if increasing else all(b < a for a, b in pairs)


def ratio_csv(probe: Probe, rows: list[RatioRow]) -> str:
    buf = io.StringIO()
    buf.write(f"# probe: z = r^({probe.value})\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "z", "F_S", "F_B", "ratio"])
    for row in rows:
        writer.writerow([repr(row.r), repr(row.z), repr(row.szego), repr(row.bergman), repr(row.ratio)])
    return buf.getvalue()


# -- diagonal sums and their leading behaviour ---------------------------------


def diagonal_sums(kind, r: float, z: float) -> tuple[float, float, float]:
    """(K(z,z), d/dz K(z,z), d^2/dz dzbar K(z,z)) at real z, arclength Szegő normalisation."""
    kernel = KernelEvaluator(DomainSpec.annulus(r), kind, NumericConfig(c1=2.0))
    jet = kernel.diagonal_jet(z)
    return jet.k0, float(jet.k1[0].real), float(jet.k2[0, 0].real)


def leading_terms(kind, probe: Probe, r: float) -> list[tuple[float, float]]:
    """Leading behaviour of the scaled diagonal sums with the order of the remainder.

    Returns [(approximation, p)] for j = 0, 1, 2, where the neglected part is
    O(r^p). Szegő sums are scaled by 2 pi, Bergman sums by pi.
    """
    kind = kind if isinstance(kind, KernelKind) else KernelKind(str(kind).lower())
    lg = math.log(1.0 / r)
    if kind is KernelKind.SZEGO and probe is Probe.SQRT:
        s = math.sqrt(r)
        return [
            (2.0 / (1.0 + r) + 2.0 * r / (1.0 + r**3), 2.0),
            (-1.0 / (s * (1.0 + r)) - s / (1.0 + r**3), 1.5),
            (1.0 / (r * (1.0 + r)) + 5.0 / (1.0 + r**3), 1.0),
        ]
    if kind is KernelKind.SZEGO:
        q1, q2 = r**0.2, r**0.4
        return [
            (1.0 / (1.0 + r) + q2 / (1.0 + r**3), 0.6),
            (q1 / (1.0 + r**3) - q2 / (1.0 + r), 0.6),
            (1.0 / (1.0 + r**3) + q1 / (1.0 + r), 0.4),
        ]
    if probe is Probe.SQRT:
        s = math.sqrt(r)
        return [
            (1.0 / (2 * r * lg) + 2.0 / (1.0 - r * r), 1.0),
            (-1.0 / (2 * r**1.5 * lg) - 2.0 / (s * (1.0 - r * r)), 0.5),
            (1.0 / (2 * r * r * lg) + 4.0 / (r * (1.0 - r * r)), 0.0),
        ]
    return [
        (1.0 / (2 * r**0.4 * lg) + 1.0 / (1.0 - r * r), 0.4),
        (-1.0 / (2 * r**0.6 * lg) + 2 * r**0.2 / (1.0 - r**4), 0.6),
        (1.0 / (2 * r**0.8 * lg) + 2.0 / (1.0 - r**4), 0.4),
    ]


def scaled_sums(kind, probe: Probe, r: float) -> list[float]:
    kind = kind if isinstance(kind, KernelKind) else KernelKind(str(kind).lower())
    scale = 2 * math.pi if kind is KernelKind.SZEGO else math.pi
    return [scale * v for v in diagonal_sums(kind, r, r ** float(probe.value))]

