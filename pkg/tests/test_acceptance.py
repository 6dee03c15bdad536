"""Acceptance criteria, one test each, run at their stated tolerances."""

import math
import time

import numpy as np

from szego_lab.asymptotics import LimitExperiment, Probe, run_limit, run_ratio
from szego_lab.automorphisms import DEFAULT_SEED, disk_mobius, law_sweep
from szego_lab.domains import DomainSpec, NumericConfig, PointDir
from szego_lab.fefferman import ball_probe, density, probe_from_name, pullback_check
from szego_lab.kernels import KernelEvaluator, KernelKind
from szego_lab.metrics import ball_sk_constant, caratheodory, e_quantity, kernel_for, metric, sk_function
from szego_lab.quadrature import CurveSpec, PolarGrid, build_bergman, build_szego, reproducing_residual
from szego_lab.variational import annulus_caratheodory_bounds, auto_frame, variational_metric

CFG = NumericConfig()


def _ball(n):
    return DomainSpec.disk() if n == 1 else DomainSpec.ball(n)


def _ball_points(rng, n, count, rmax=0.95):
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * (rmax * rng.uniform(size=count) ** (1 / (2 * n)))[:, None]


def _sphere_points(rng, n, count):
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return v / np.linalg.norm(v, axis=1)[:, None]


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_ball_constants(report):
    start = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3):
        xi = np.arange(1, n + 1) * (0.3 + 0.4j)
        at = PointDir(np.zeros(n), xi)
        size = np.linalg.norm(xi)
        worst = max(worst,
                    _rel(metric(_ball(n), "szego", at), math.sqrt(n) * size),
                    _rel(metric(_ball(n), "bergman", at), math.sqrt(n + 1) * size),
                    _rel(caratheodory(at, _ball(n)), size))
    elapsed = time.perf_counter() - start
    report("criterion 1 (ball constants at the origin)", worst <= 1e-10 and elapsed < 1.0,
           f"max rel err {worst:.2e} (tol 1e-10), {elapsed:.3f}s (limit 1s)")


def test_criterion_02_szego_bergman_ratio(report):
    rng = np.random.default_rng(DEFAULT_SEED)
    worst = 0.0
    for n in (1, 2, 3):
        want = math.sqrt(n / (n + 1))
        for z in _ball_points(rng, n, 50):
            xi = rng.normal(size=n) + 1j * rng.normal(size=n)
            at = PointDir(z, xi)
            worst = max(worst, _rel(metric(_ball(n), "szego", at) / metric(_ball(n), "bergman", at), want))
    report("criterion 2 (F_S/F_B = sqrt(n/(n+1)))", worst <= 1e-8, f"max rel err {worst:.2e} over 150 points (tol 1e-8)")


def test_criterion_03_sk_constant(report):
    rng = np.random.default_rng(DEFAULT_SEED + 3)
    worst = 0.0
    for n in (1, 2, 3):
        const = ball_sk_constant(n, CFG)
        for z in _ball_points(rng, n, 100):
            worst = max(worst, abs(sk_function(_ball(n), z, z, CFG) - const) / const)
    report("criterion 3 (SK constant on disk and balls)", worst <= 1e-10,
           f"max |SK - c|/c {worst:.2e} over 3 x 100 points (tol 1e-10)")


def test_criterion_04_annulus_limits(report):
    start = time.perf_counter()
    cases = [(KernelKind.BERGMAN, Probe.SQRT, 5e-3), (KernelKind.SZEGO, Probe.SQRT, 5e-3),
             (KernelKind.BERGMAN, Probe.FIFTH_ROOT, 1e-2), (KernelKind.SZEGO, Probe.FIFTH_ROOT, 1e-2)]
    ok = True
    parts = []
    for kind, probe, tol in cases:
        table = run_limit(LimitExperiment.standard(kind, probe), CFG)
        if table.failure:
            ok = False
            parts.append(f"{kind.value}/{probe.name}: {table.failure}")
            continue
        err = table.final.abs_error
        extra = abs(table.extrapolated() - table.experiment.expected_limit)
        ok &= err <= tol and extra <= 1e-4
        parts.append(f"{kind.value}/q={probe.value} r={table.final.r:g} err {err:.1e} (tol {tol:g}), "
                     f"extrapolated {extra:.1e} (tol 1e-4)")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30
    report("criterion 4 (thin-annulus limits)", ok, "; ".join(parts) + f"; {elapsed:.2f}s (limit 30s)")


def test_criterion_05_ratio_behaviour(report):
    rs = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    up = [row.ratio for row in run_ratio(Probe.SQRT, rs, CFG)]
    down = [row.ratio for row in run_ratio(Probe.FIFTH_ROOT, rs, CFG)]
    grow = up[-1] / up[0]
    shrink = down[0] / down[-1]
    report("criterion 5 (F_S/F_B divergence and decay)", grow >= 10 and shrink >= 3,
           f"sqrt probe grows x{grow:.2f} (need >= 10); fifth-root probe shrinks x{shrink:.3f} (need >= 3)")


def test_criterion_06_transformation_laws(report):
    results = law_sweep(DEFAULT_SEED, 100, config=CFG)
    failed = [r for r in results if not r.passed]
    worst = max(results, key=lambda r: r.max_residual / r.tolerance)
    report("criterion 6 (transformation laws, 100 seeded draws per family)", not failed,
           f"{len(results)} family/law pairs, {len(failed)} over tolerance; tightest "
           f"{worst.family}/{worst.law} {worst.max_residual:.1e} (tol {worst.tolerance:g})")


def test_criterion_07_caratheodory(report):
    rng = np.random.default_rng(DEFAULT_SEED + 7)
    disk_worst = 0.0
    for z in _ball_points(rng, 1, 50, 0.98)[:, 0]:
        at = PointDir(z, 1.0)
        disk_worst = max(disk_worst, _rel(metric(DomainSpec.disk(), "szego", at), caratheodory(at, DomainSpec.disk())))
    slack = math.inf
    for k in range(50):
        r = [0.01, 0.1, 0.3, 0.6, 0.9][k % 5]
        p = (r + (1 - r) * rng.uniform(0.02, 0.98)) * np.exp(2j * np.pi * rng.uniform())
        fs = metric(DomainSpec.annulus(r), "szego", PointDir(p, 1.0))
        slack = min(slack, min(fs - b for b in annulus_caratheodory_bounds(r, p, 1.0).values()))
    report("criterion 7 (F_S = F_C on the disk, F_S above annulus bounds)", disk_worst <= 1e-10 and slack >= -1e-12,
           f"disk max rel diff {disk_worst:.2e} (tol 1e-10); annulus min F_S - bound {slack:.3e} (>= -1e-12)")


def _triples():
    rng = np.random.default_rng(DEFAULT_SEED + 8)
    out = []
    specs = ["disk", "ball:2", "ball:3", "annulus:0.05", "annulus:0.1", "annulus:0.3"]
    for k in range(50):
        domain = DomainSpec.parse(specs[k % len(specs)])
        n = domain.dimension
        if domain.kind.value == "annulus":
            r = domain.inner_radius
            z = np.array([(r + (1 - r) * rng.uniform(0.1, 0.9)) * np.exp(2j * np.pi * rng.uniform())])
        else:
            z = _ball_points(rng, n, 1, 0.9)[0]
        xi = rng.normal(size=n) + 1j * rng.normal(size=n)
        out.append((domain, PointDir(z, xi), ("szego", "bergman")[k % 2]))
    return out


def test_criterion_08_oracle_equivalence(report):
    worst = 0.0
    for domain, at, kind in _triples():
        frame = auto_frame(domain, kind, at.z, CFG)
        worst = max(worst, _rel(variational_metric(frame, at), metric(domain, kind, at, CFG)))
    report("criterion 8 (variational vs Hessian metric)", worst <= 1e-8, f"max rel diff {worst:.2e} over 50 triples (tol 1e-8)")


def test_criterion_09_fefferman(report):
    rng = np.random.default_rng(DEFAULT_SEED + 9)
    ball_err = 0.0
    indep = 0.0
    for n in (1, 2, 3):
        want = CFG.dimensional_constant(n) / 2
        for p in _sphere_points(rng, n, 20):
            base = density(ball_probe(n), p, CFG).value
            ball_err = max(ball_err, abs(base - want))
            for factor in ("affine", "exp", "quad"):
                indep = max(indep, _rel(density(probe_from_name(f"perturbed-ball:{factor}", n), p, CFG).value, base))
    pull = 0.0
    for a, theta in [(0.4, 0.0), (0.3 + 0.5j, 1.0), (-0.7j, 2.5), (0.85, 4.0)]:
        for f in (lambda q: np.ones(len(q)), lambda q: 1 + q[:, 0] ** 2, lambda q: np.exp(q[:, 0])):
            pull = max(pull, pullback_check(disk_mobius(a, theta), f, 512, CFG))
    ok = ball_err <= 1e-10 and indep <= 1e-8 and pull <= 1e-10
    report("criterion 9 (Fefferman measure)", ok,
           f"ball density err {ball_err:.1e} (tol 1e-10); h-factor rel diff {indep:.1e} (tol 1e-8); "
           f"Mobius pullback residual {pull:.1e} (tol 1e-10)")


def test_criterion_10_quadrature_kernels(report):
    errs = {}
    circle = build_szego(CurveSpec.circle(), (0, 40))
    errs["circle szego"] = abs(circle.eval(0.3, 0.2) - KernelEvaluator(DomainSpec.disk(), "szego").eval(0.3, 0.2))
    disk_b = build_bergman(PolarGrid(), (0, 40))
    errs["disk bergman"] = abs(disk_b.eval(0.3, 0.2) - KernelEvaluator(DomainSpec.disk(), "bergman").eval(0.3, 0.2))
    ann = build_szego(CurveSpec.annulus(0.5), (-40, 40))
    errs["annulus szego"] = abs(ann.eval(0.7, 0.7) - kernel_for(DomainSpec.annulus(0.5), "szego").eval(0.7, 0.7))
    ann_b = build_bergman(PolarGrid(0.5), (-60, 60))
    errs["annulus bergman"] = abs(ann_b.eval(0.7, 0.7) - kernel_for(DomainSpec.annulus(0.5), "bergman").eval(0.7, 0.7))
    ellipse = build_szego(CurveSpec.ellipse(1, 0.6), (0, 30))
    repro = reproducing_residual(ellipse, lambda z: z**3, 0.2)
    exact = KernelEvaluator(DomainSpec.disk(), "szego").eval(0.3, 0.2)
    steps = [abs(build_szego(CurveSpec.warped_circle(0.7, m), (0, 40)).eval(0.3, 0.2) - exact)
             for m in (64, 128, 256, 512)]
    spectral = all(fine <= max(coarse / 10, 1e-12) for coarse, fine in zip(steps, steps[1:]))
    worst = max(errs.values())
    ok = worst <= 1e-8 and repro <= 1e-8 and spectral
    report("criterion 10 (quadrature kernels)", ok,
           f"max closed-form err {worst:.1e} (tol 1e-8); ellipse reproducing {repro:.1e} (tol 1e-8); "
           f"warped-circle errors by nodes {', '.join(f'{e:.0e}' for e in steps)} (ratio test {'ok' if spectral else 'failed'})")


def test_criterion_11_e_quantity(report):
    rng = np.random.default_rng(DEFAULT_SEED + 11)
    e_ball = 0.0
    for n in (1, 2, 3):
        for z in _ball_points(rng, n, 30, 0.9):
            xi = rng.normal(size=n) + 1j * rng.normal(size=n)
            e_ball = max(e_ball, abs(e_quantity(_ball(n), PointDir(z, xi), CFG)))
    paths = 0.0
    for r in (0.05, 0.2, 0.5):
        for frac in (0.2, 0.5, 0.8):
            z = (r + frac * (1 - r)) * np.exp(1.1j)
            at = PointDir(z, 1.0)
            d = e_quantity(DomainSpec.annulus(r), at, CFG, path="direct")
            for path in ("log-sk", "log-sk-fd"):
                paths = max(paths, abs(e_quantity(DomainSpec.annulus(r), at, CFG, path=path) - d))
    report("criterion 11 (E quantity)", e_ball <= 1e-8 and paths <= 1e-8,
           f"max |E| on disk/balls {e_ball:.1e} (tol 1e-8); annulus path disagreement {paths:.1e} (tol 1e-8)")
