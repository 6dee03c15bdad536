"""Command-line front end.

Exit status: 0 success, 2 bad arguments, 3 numerical or precision failure,
4 a check ran but a residual exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import asymptotics, automorphisms, fefferman, metrics, quadrature, variational
from .domains import DomainKind, DomainSpec, NumericConfig, PointDir
from .errors import ArgumentError, CheckFailed, SzegoLabError

SEED_ENV = "SZEGO_LAB_SEED"


# -- argument parsing helpers --------------------------------------------------


def parse_complex(text: str) -> complex:
    """``re,im``, a real number, or a Python complex literal such as ``0.3-0.1j``."""
    text = text.strip()
    try:
        if "," in text:
            re_part, im_part = text.split(",")
            return complex(float(re_part), float(im_part))
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise ArgumentError(f"cannot parse complex number {text!r}") from exc


def parse_vector(text: str, n: int) -> np.ndarray:
    """Components separated by ``;``, each in :func:`parse_complex` form.

    Without a ``;``, a string with exactly n - 1 commas is read as n real
    components when n > 1 (so ``0,0`` is the origin of the 2-ball).
    """
    text = text.strip()
    if ";" in text:
        parts = [parse_complex(p) for p in text.split(";")]
    elif n > 1 and text.count(",") == n - 1:
        try:
            parts = [complex(p.replace("i", "j")) for p in text.split(",")]
        except ValueError as exc:
            raise ArgumentError(f"cannot parse vector {text!r}") from exc
    else:
        parts = [parse_complex(text)]
    if len(parts) != n:
        raise ArgumentError(f"expected {n} components, got {len(parts)} from {text!r}")
    return np.array(parts, dtype=complex)


def parse_degrees(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            return 0, int(lo)
        return int(lo), int(hi)
    except ValueError as exc:
        raise ArgumentError(f"degree range must look like LO:HI, got {text!r}") from exc


def parse_seed(text) -> int:
    try:
        value = int(str(text), 0)
    except ValueError as exc:
        raise ArgumentError(f"bad seed {text!r}") from exc
    if not 0 <= value < 2**64:
        raise ArgumentError("seed must be a 64-bit unsigned integer")
    return value


# -- output --------------------------------------------------------------------


def _cell(value):
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return f"{value.real!r},{value.imag!r}"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def _json_value(value):
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


class Output:
    """Collects metadata and rows, then renders CSV or JSON."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.meta: dict[str, object] = {}
        self.columns: list[str] = []
        self.rows: list[list] = []
        self.raw: str | None = None
        self.failure: str | None = None

    def table(self, columns, rows):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]

    def render(self) -> str:
        if self.raw is not None and self.fmt == "csv":
            return self.raw
        if self.fmt == "json":
            doc = {"meta": {k: _json_value(v) for k, v in self.meta.items()},
                   "rows": [{c: _json_value(v) for c, v in zip(self.columns, row)} for row in self.rows]}
            return json.dumps(doc, indent=2) + "\n"
        lines = [f"# {k}: {_cell(v)}" for k, v in self.meta.items()]
        lines.append(",".join(self.columns))
        for row in self.rows:
            # complex cells carry a comma, so quote them
            lines.append(",".join(f'"{c}"' if "," in c else c for c in map(_cell, row)))
        return "\n".join(lines) + "\n"


# -- subcommands ---------------------------------------------------------------


def _config(args) -> NumericConfig:
    return NumericConfig(series_cutoff=args.series_cutoff, c1=args.c1, cn=args.cn)


def cmd_kernel(args, out: Output):
    domain = DomainSpec.parse(args.domain)
    n = domain.dimension
    z = parse_vector(args.z, n)
    w = parse_vector(args.w, n) if args.w else z
    kernel = metrics.kernel_for(domain, args.kind, _config(args))
    out.meta.update(domain=domain.label(), kind=args.kind)
    out.table(["value"], [[kernel.eval(z, w)]])


def cmd_metric(args, out: Output):
    domain = DomainSpec.parse(args.domain)
    n = domain.dimension
    at = PointDir(parse_vector(args.z, n), parse_vector(args.xi, n))
    config = _config(args)
    if args.method == "variational":
        if args.which == "caratheodory":
            raise ArgumentError("the variational method computes Szegő or Bergman lengths")
        frame = variational.auto_frame(domain, args.which, at.z, config)
        value = variational.variational_metric(frame, at)
        out.meta["frame_cutoff"] = frame.cutoff
    else:
        value = metrics.metric(domain, args.which, at, config)
    out.meta.update(domain=domain.label(), which=args.which, method=args.method)
    out.table(["value"], [[value]])


def cmd_sk(args, out: Output):
    domain = DomainSpec.parse(args.domain)
    n = domain.dimension
    config = _config(args)
    z = parse_vector(args.z, n)
    w = parse_vector(args.w, n) if args.w else z
    sk = metrics.sk_function(domain, z, w, config)
    columns, row = ["sk"], [sk if args.w else sk.real]
    if args.xi:
        at = PointDir(z, parse_vector(args.xi, n))
        columns.append("e")
        row.append(metrics.e_quantity(domain, at, config, path=args.e_path))
        out.meta["e_path"] = args.e_path
    out.meta["domain"] = domain.label()
    out.table(columns, [row])


def cmd_fefferman(args, out: Output):
    probe = fefferman.probe_from_name(args.probe, args.dim, args.mode, args.fd_step)
    z = parse_vector(args.z, args.dim)
    det = fefferman.bordered_det(probe, z)
    dens = fefferman.density(probe, z, _config(args))
    out.meta.update(probe=probe.name, mode=args.mode, dimension=args.dim)
    out.table(["bordered_det", "density"], [[det, dens.value]])


def cmd_check(args, out: Output):
    laws = automorphisms.LAWS if args.law == "all" else (args.law,)
    if args.family == "all":
        families = automorphisms.SWEEP_FAMILIES
    else:
        families = (automorphisms.Family(args.family),)
    results = automorphisms.law_sweep(args.seed, args.draws, families, laws, _config(args))
    out.meta.update(seed=hex(args.seed), draws=args.draws,
                    tolerance_series=automorphisms.SERIES_TOLERANCE,
                    tolerance_closed_form=automorphisms.CLOSED_FORM_TOLERANCE)
    out.table(["family", "law", "draws", "max_residual", "tolerance", "passed"],
              [[r.family, r.law, r.draws, r.max_residual, r.tolerance, r.passed] for r in results])
    failed = [r for r in results if not r.passed]
    if failed:
        names = ", ".join(f"{r.family}/{r.law}" for r in failed)
        raise CheckFailed(f"residual above tolerance for {names}")


def cmd_annulus_limits(args, out: Output):
    probe = asymptotics.Probe.parse(args.probe)
    rs = asymptotics.decade_sequence(args.decades) if args.decades else asymptotics.default_sequence(probe)
    config = _config(args)
    if args.metric == "ratio":
        rows = asymptotics.run_ratio(probe, rs, config)
        out.meta.update(probe=f"z = r^({probe.value})", kind="ratio")
        out.table(["r", "z", "F_S", "F_B", "ratio"],
                  [[r.r, r.z, r.szego, r.bergman, r.ratio] for r in rows])
        return
    experiment = asymptotics.LimitExperiment.standard(args.metric, probe, rs)
    table = asymptotics.run_limit(experiment, config)
    out.raw = table.to_csv()
    out.meta.update(kernel=experiment.kind.value, probe=f"z = r^({probe.value})",
                    normalization=experiment.normalization.value,
                    expected_limit=experiment.expected_limit)
    extra = table.extrapolated()
    if extra is not None:
        out.meta["aitken_extrapolation"] = extra
    out.table(["r", "z", "raw_F", "normalized", "expected", "abs_error"],
              [[r.r, r.z, r.raw_F, r.normalized, r.expected, r.abs_error] for r in table.rows])
    if table.failure:
        out.meta["precision_failure"] = table.failure
        out.failure = table.failure


def cmd_quadkernel(args, out: Output):
    z = parse_complex(args.z)
    w = parse_complex(args.w) if args.w else z
    lo, hi = parse_degrees(args.degrees)
    if args.kind == "szego":
        curve = quadrature.CurveSpec.parse(args.curve, args.nodes)
        kernel = quadrature.build_szego(curve, (lo, hi), args.c1)
    else:
        curve = quadrature.CurveSpec.parse(args.curve)
        if curve.family not in ("circle", "annulus"):
            raise ArgumentError("numeric Bergman kernels need a disk or annulus polar grid")
        inner = curve.params[0] if curve.family == "annulus" else 0.0
        kernel = quadrature.build_bergman(quadrature.PolarGrid(inner), (lo, hi))
    value = kernel.eval(z, w)
    columns, row = ["value", "gram_residual"], [value, kernel.gram_residual]
    if kernel.domain.kind is not DomainKind.PLANAR_CURVE:
        exact = metrics.kernel_for(kernel.domain, args.kind, _config(args)).eval(z, w)
        columns += ["reference", "abs_difference"]
        row += [exact, abs(value - exact)]
    out.meta.update(curve=curve.name, kind=args.kind, degrees=f"{lo}:{hi}")
    out.table(columns, [row])


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=parse_seed, default=None,
                        help=f"random seed (default ${SEED_ENV} or 0x5EED)")
    common.add_argument("--c1", type=float, default=2.0, help="boundary measure constant for n = 1")
    common.add_argument("--cn", type=float, default=1.0, help="boundary measure constant for n > 1")
    common.add_argument("--series-cutoff", type=int, default=32,
                        help="minimum number of annulus series terms per side")

    parser = argparse.ArgumentParser(prog="szego-lab",
                                     description="Invariant metrics from Szegő and Bergman kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", parents=[common], help="evaluate S(z, w) or K(z, w)")
    p.add_argument("--kind", choices=("szego", "bergman"), default="szego")
    p.add_argument("--domain", required=True, help="disk, annulus:R, ball:N or curve:NAME")
    p.add_argument("--z", required=True)
    p.add_argument("--w")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("metric", parents=[common], help="metric length F(z, xi)")
    p.add_argument("--which", choices=("szego", "bergman", "caratheodory"), default="szego")
    p.add_argument("--domain", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--method", choices=("hessian", "variational"), default="hessian")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("sk", parents=[common], help="SK(z, w) and optionally E(z, xi)")
    p.add_argument("--domain", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--w")
    p.add_argument("--xi")
    p.add_argument("--e-path", choices=("direct", "log-sk", "log-sk-fd"), default="direct")
    p.set_defaults(func=cmd_sk)

    p = sub.add_parser("fefferman", parents=[common], help="Fefferman density at a boundary point")
    p.add_argument("--probe", default="ball",
                   help="ball, scaled-ball:H, perturbed-ball:{affine,exp,quad,const3}, annulus:R")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--z", required=True)
    p.add_argument("--mode", choices=("analytic", "fd"), default="analytic")
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.set_defaults(func=cmd_fefferman)

    p = sub.add_parser("check", parents=[common], help="randomized transformation-law sweep")
    p.add_argument("--law", choices=("all",) + automorphisms.LAWS, default="all")
    p.add_argument("--family", choices=("all",) + tuple(f.value for f in automorphisms.SWEEP_FAMILIES),
                   default="all")
    p.add_argument("--draws", type=int, default=100)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("annulus-limits", parents=[common], help="thin-annulus limit tables")
    p.add_argument("--probe", default="sqrt", help="sqrt or fifth-root")
    p.add_argument("--metric", choices=("szego", "bergman", "ratio"), default="bergman")
    p.add_argument("--decades", type=int, default=None,
                   help="use r = 10^-1 .. 10^-D (default: 6 for sqrt, 12 for fifth-root)")
    p.set_defaults(func=cmd_annulus_limits)

    p = sub.add_parser("quadkernel", parents=[common], help="kernel built by quadrature")
    p.add_argument("--curve", default="circle", help="circle, annulus:R, ellipse:A,B, warped-circle:EPS")
    p.add_argument("--kind", choices=("szego", "bergman"), default="szego")
    p.add_argument("--degrees", default="0:40", help="LO:HI")
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--z", required=True)
    p.add_argument("--w")
    p.set_defaults(func=cmd_quadkernel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.seed is None:
            args.seed = parse_seed(os.environ.get(SEED_ENV, hex(automorphisms.DEFAULT_SEED)))
        if getattr(args, "draws", 1) < 1:
            raise ArgumentError("--draws must be positive")
        out = Output(args.format)
        status = 0
        try:
            args.func(args, out)
        except CheckFailed as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = exc.exit_code
        text = out.render()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if out.failure:
            # partial results were written; report the precision failure
            print(f"error: {out.failure}", file=sys.stderr)
            return 3
        return status
    except SzegoLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
