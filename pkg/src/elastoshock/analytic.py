"""Closed-form uniform-stability classification of planar elastic shocks.

For a unit vector w = (cos t, sin t) in the front plane let
``Fw = w2 * row2(F) + w3 * row3(F)`` and define

    l0    = row1(F) . Fw            M2 = |Fw|          kappa = |row1(F) x Fw|
    sigma = sqrt(1 + M1^2 + M2^2 + kappa^2)

The shock is uniformly stable iff

    margin(w) = (M sigma - |l0| beta)^2 - M*^4 (R (M^2 - M1^2) - 1)

is positive for every w, and weakly stable otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import AdmissibilityError, ParameterError
from .lax import check_lax_pointwise
from .states import DimensionlessShock, SurfacePointData

TWO_PI = 2.0 * math.pi
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
VERDICT_ATOL = 1e-9
UNIT_TOL = 1e-12


class Verdict(str, Enum):
    UNIFORM = "uniformly_stable"
    WEAK = "weakly_stable"


@dataclass(frozen=True)
class CircleCoefficients:
    omega: tuple[float, float]
    l0: float
    M2: float
    kappa: float
    sigma: float
    K0: float
    K: float
    K1: float
    K2: float
    D: float

    def as_dict(self) -> dict:
        return asdict(self)


def circle_arrays(shock: DimensionlessShock, w2, w3) -> dict[str, np.ndarray]:
    """All angle-dependent coefficients, vectorized over (w2, w3) arrays.

    No admissibility checks; callers decide what to require.
    """
    w2 = np.asarray(w2, dtype=float)
    w3 = np.asarray(w3, dtype=float)
    r1 = shock.F[0]
    Fw = w2[..., None] * shock.F[1] + w3[..., None] * shock.F[2]
    l0 = Fw @ r1
    M2 = np.linalg.norm(Fw, axis=-1)
    kappa = np.linalg.norm(np.cross(r1, Fw), axis=-1)
    M, M1, Ms, R = shock.M, shock.M1, shock.Mstar, shock.R
    beta = shock.beta
    mt2 = M**2 - M1**2
    sigma = np.sqrt(1.0 + M1**2 + M2**2 + kappa**2)
    K0 = 1.0 + M2**2
    K = R * mt2 + M2**2
    minus = M * sigma - np.abs(l0) * beta
    plus = M * sigma + np.abs(l0) * beta
    Ms4 = Ms**4
    D = minus**2 - Ms4 * mt2
    return dict(
        l0=l0, M2=M2, kappa=kappa, sigma=sigma, K0=K0, K=K,
        K1=minus**2 / Ms4, K2=plus**2 / Ms4, D=D,
        margin=minus**2 - Ms4 * (R * mt2 - 1.0),
    )


def _unit(omega) -> tuple[float, float]:
    w2, w3 = (float(x) for x in omega)
    if abs(math.hypot(w2, w3) - 1.0) > UNIT_TOL:
        raise ParameterError(f"omega must be a unit 2-vector, |omega| = {math.hypot(w2, w3)!r}")
    return w2, w3


def circle_coefficients(shock: DimensionlessShock, omega) -> CircleCoefficients:
    shock.require_admissible()
    w2, w3 = _unit(omega)
    a = circle_arrays(shock, w2, w3)
    return CircleCoefficients(
        omega=(w2, w3),
        **{k: float(a[k]) for k in ("l0", "M2", "kappa", "sigma", "K0", "K", "K1", "K2", "D")},
    )


def stability_margin(shock: DimensionlessShock, omega) -> float:
    """(M sigma - |l0| beta)^2 - M*^4 (R Mtilde^2 - 1) at one wave direction."""
    shock.require_admissible()
    w2, w3 = _unit(omega)
    return float(circle_arrays(shock, w2, w3)["margin"])


class _MarginOnCircle:
    """Scalar margin(theta) in plain floats; the golden search calls it often."""

    def __init__(self, shock: DimensionlessShock):
        F = shock.F
        self.r1 = tuple(F[0])
        self.r2 = tuple(F[1])
        self.r3 = tuple(F[2])
        self.M = shock.M
        self.beta = shock.beta
        self.base = 1.0 + shock.M1**2
        mt2 = shock.M**2 - shock.M1**2
        self.offset = shock.Mstar**4 * (shock.R * mt2 - 1.0)

    def __call__(self, theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        r1, r2, r3 = self.r1, self.r2, self.r3
        f = (c * r2[0] + s * r3[0], c * r2[1] + s * r3[1], c * r2[2] + s * r3[2])
        l0 = r1[0] * f[0] + r1[1] * f[1] + r1[2] * f[2]
        m2 = f[0] * f[0] + f[1] * f[1] + f[2] * f[2]
        cx = r1[1] * f[2] - r1[2] * f[1]
        cy = r1[2] * f[0] - r1[0] * f[2]
        cz = r1[0] * f[1] - r1[1] * f[0]
        sigma = math.sqrt(self.base + m2 + cx * cx + cy * cy + cz * cz)
        d = self.M * sigma - abs(l0) * self.beta
        return d * d - self.offset


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float, max_iter: int = 200):
    """Minimize a unimodal f on [a, b] to bracket width ``tol``; returns (x, f(x))."""
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def minimize_on_circle(shock: DimensionlessShock, scan_points: int = 1024, refine_tol: float = 1e-10):
    """Dense scan plus golden refinement of margin(theta); returns (theta, min, scan)."""
    theta = np.arange(scan_points) * (TWO_PI / scan_points)
    scan = circle_arrays(shock, np.cos(theta), np.sin(theta))["margin"]
    k = int(np.argmin(scan))
    best_t, best_m = float(theta[k]), float(scan[k])
    spread = float(scan.max() - scan.min())
    if spread > 1e-15 * max(1.0, abs(best_m)):
        h = TWO_PI / scan_points
        t, m = golden_section(_MarginOnCircle(shock), best_t - h, best_t + h, refine_tol)
        if m < best_m:
            best_t, best_m = t, m
    return best_t % TWO_PI, best_m, scan


@dataclass
class StabilityReport:
    verdict: Verdict
    min_margin: float
    argmin_angle: float
    coeffs_at_argmin: CircleCoefficients | None
    lax_pass: bool
    method: str = "analytic"
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "min_margin": self.min_margin,
            "argmin_angle": self.argmin_angle,
            "lax_pass": self.lax_pass,
            "method": self.method,
            "coeffs_at_argmin": None if self.coeffs_at_argmin is None else self.coeffs_at_argmin.as_dict(),
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=_jsonable)

    CSV_HEADER = ("verdict", "min_margin", "argmin_angle", "lax_pass", "method")

    def to_csv_row(self) -> str:
        return ",".join([
            self.verdict.value, repr(self.min_margin), repr(self.argmin_angle),
            str(self.lax_pass).lower(), self.method,
        ])


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Enum):
        return obj.value
    raise TypeError(f"not serializable: {type(obj)}")


def classify(shock: DimensionlessShock, scan_points: int = 1024, refine_tol: float = 1e-10) -> StabilityReport:
    """Uniform vs weak stability from the minimum of the margin over the circle.

    A Lax shock is never violently unstable, so these are the only verdicts.
    """
    if scan_points < 64:
        raise ParameterError("scan_points must be at least 64")
    shock.require_admissible()
    theta, m, _ = minimize_on_circle(shock, scan_points, refine_tol)
    verdict = Verdict.UNIFORM if m > VERDICT_ATOL else Verdict.WEAK
    coeffs = circle_coefficients(shock, (math.cos(theta), math.sin(theta)))
    return StabilityReport(verdict, float(m), float(theta), coeffs, True, "analytic")


def pointwise_margin(point: SurfacePointData, scan_points: int = 1024, refine_tol: float = 1e-10) -> float:
    """Minimum over the circle of the margin with frozen-coefficient parameters."""
    if not check_lax_pointwise(point):
        raise AdmissibilityError("surface point violates the Lax 1-shock inequalities")
    _, m, _ = minimize_on_circle(point.frozen_shock(), scan_points, refine_tol)
    return m


def classify_pointwise(point: SurfacePointData, eps: float, scan_points: int = 1024) -> bool:
    """Sufficient structural-stability test at one front point: min margin >= eps."""
    if not eps > 0:
        raise ParameterError("eps must be positive")
    return pointwise_margin(point, scan_points) >= eps


@dataclass(frozen=True)
class SpecialConditions:
    majda: bool
    elastic_majda: bool
    Q: float
    D_min: float


def special_conditions(shock: DimensionlessShock, scan_points: int = 1024) -> SpecialConditions:
    """Gas-dynamic and elastic Majda conditions, the elastic additive Q and min D."""
    shock.require_admissible()
    M, M1, R = shock.M, shock.M1, shock.R
    theta, _, _ = minimize_on_circle(shock, scan_points)
    at = circle_arrays(shock, math.cos(theta), math.sin(theta))
    t = np.arange(scan_points) * (TWO_PI / scan_points)
    D_scan = circle_arrays(shock, np.cos(t), np.sin(t))["D"]
    return SpecialConditions(
        majda=M**2 * (R - 1.0) < 1.0,
        elastic_majda=(M**2 - M1**2) * (R - 1.0) < 1.0,
        Q=float(M1**2 * (R - 1.0) + at["D"] / shock.Mstar**4),
        D_min=float(D_scan.min()),
    )


def positivity_chain_terms(shock: DimensionlessShock, omega) -> dict[str, float]:
    """Quantities in the positivity chain behind D > 0 at one direction."""
    w2, w3 = _unit(omega)
    a = circle_arrays(shock, w2, w3)
    M, M1, Ms, beta = shock.M, shock.M1, shock.Mstar, shock.beta
    mt2 = M**2 - M1**2
    mt = math.sqrt(mt2)
    sigma, l0, M2, kappa = (float(a[k]) for k in ("sigma", "l0", "M2", "kappa"))
    return {
        "lhs_identity": M**2 * sigma**2 - Ms**4 * mt2,
        "rhs_identity": Ms**2 * M1**2 * beta**2 + (M2**2 + kappa**2) * M**2,
        "first_factor": M * sigma - Ms**2 * mt,
        "second_lhs": M**2 * sigma**2 - l0**2 * beta**2 + Ms**4 * mt2,
        "final": (
            4 * kappa**2 * mt2 * (1 - mt2)
            + ((M1**2 + M2**2) * mt2 - (M1**2 + kappa**2)) ** 2
            + 4 * M2**2 * kappa**2 * mt2
        ),
        "K1_numerator": M**2 * sigma**2 - l0**2 * beta**2,
    }


def margin_2d(M: float, R: float, F) -> tuple[float, bool]:
    """Uniform stability margin of a 2D elastic shock with 2x2 scaled F."""
    F = np.asarray(F, dtype=float).reshape(2, 2)
    r1, r2 = F[0], F[1]
    M1sq = float(r1 @ r1)
    Ms2 = 1.0 + M1sq
    if not (math.sqrt(M1sq) < M < math.sqrt(Ms2)):
        raise AdmissibilityError("2D shock violates M1 < M < M*")
    beta = math.sqrt(Ms2 - M * M)
    det = float(r1[0] * r2[1] - r1[1] * r2[0])
    sigma = math.sqrt(1.0 + M1sq + float(r2 @ r2) + det * det)
    margin = (M * sigma - abs(float(r1 @ r2)) * beta) ** 2 - Ms2**2 * (R * (M * M - M1sq) - 1.0)
    return margin, margin > 0
