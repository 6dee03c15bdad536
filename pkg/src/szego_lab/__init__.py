"""Szegő and Bergman kernels, the invariant metrics they induce, and checks of
their transformation laws on the disk, annuli, balls and planar curves."""

from .automorphisms import (
    AutomorphismMap,
    annulus_inversion,
    annulus_rotation,
    ball_automorphism,
    check_bergman_law,
    check_metric_invariance,
    check_sk_invariance,
    check_szego_law,
    compose,
    disk_mobius,
    disk_rotation,
    law_sweep,
)
from .domains import DomainKind, DomainSpec, NumericConfig, PointDir
from .errors import (
    ArgumentError,
    BranchError,
    CapabilityError,
    CheckFailed,
    DomainError,
    DomainMarginError,
    NumericalError,
    PrecisionError,
    SzegoLabError,
)
from .fefferman import DefiningFunctionProbe, bordered_det, density, probe_from_name, pullback_check
from .kernels import KernelEvaluator, KernelKind, annulus_coefficients
from .metrics import MetricKind, caratheodory, e_quantity, hessian_metric, metric, sk_function
from .quadrature import CurveSpec, NumericKernel, PolarGrid, build_bergman, build_szego, reproducing_residual
from .variational import BasisFrame, build_frame, variational_metric

__all__ = [
    "ArgumentError", "AutomorphismMap", "BasisFrame", "BranchError", "CapabilityError", "CheckFailed",
    "CurveSpec", "DefiningFunctionProbe", "DomainError", "DomainKind", "DomainMarginError", "DomainSpec",
    "KernelEvaluator", "KernelKind", "MetricKind", "NumericConfig", "NumericKernel", "NumericalError",
    "PointDir", "PolarGrid", "PrecisionError", "SzegoLabError", "annulus_coefficients",
    "annulus_inversion", "annulus_rotation", "ball_automorphism", "bordered_det", "build_bergman",
    "build_frame", "build_szego", "caratheodory", "check_bergman_law", "check_metric_invariance",
    "check_sk_invariance", "check_szego_law", "compose", "density", "disk_mobius", "disk_rotation",
    "e_quantity", "hessian_metric", "law_sweep", "metric", "probe_from_name", "pullback_check",
    "reproducing_residual", "sk_function", "variational_metric",
]
