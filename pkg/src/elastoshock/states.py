"""Constant states of a planar shock and their dimensionless reduction.

Frame convention: the shock sits at rest on the plane x1 = 0, the tangential
velocities vanish on both sides and v1 > 0, so material crosses from the
upstream side (minus, x1 < 0) to the downstream side (plus, x1 > 0).
F is the deformation gradient with entries F[i, j]; its rows are the vectors
the stability formulas act on.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .eos import EquationOfState, evaluate, from_reference
from .errors import AdmissibilityError, NoPhysicalShockError, ParameterError

UNIMODULAR_TOL = 1e-10


@dataclass(frozen=True)
class MaterialState:
    """Density, velocity and deformation gradient on one side of the front."""

    rho: float
    v: np.ndarray
    F: np.ndarray
    unimodular: bool = False

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3)
        F = np.asarray(self.F, dtype=float).reshape(3, 3)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def detF(self) -> float:
        return float(np.linalg.det(self.F))

    def elastic_normal_sq(self) -> float:
        """sum_j F_1j^2, the normal elastic term for the normal N = e1."""
        return float(self.F[0] @ self.F[0])


@dataclass
class AdmissibilityReport:
    checks: dict[str, bool]
    values: dict[str, float]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def check_admissibility(
    state: MaterialState, eos: EquationOfState, unimodular: bool | None = None
) -> AdmissibilityReport:
    """Pass/fail diagnostics for rho > 0, c^2 > 0, det F > 0 and rho det F = 1.

    The unimodularity test runs when ``unimodular`` is true, or when it is
    left as None and the state carries the flag.
    """
    if unimodular is None:
        unimodular = state.unimodular
    checks: dict[str, bool] = {}
    values: dict[str, float] = {"rho": state.rho, "detF": state.detF}
    checks["rho_positive"] = state.rho > 0
    try:
        _, c2 = evaluate(eos, state.rho)
        values["c2"] = c2
        checks["c2_positive"] = True
    except ValueError:
        checks["c2_positive"] = False
    checks["detF_positive"] = state.detF > 0
    if unimodular:
        values["rho_detF"] = state.rho * state.detF
        checks["unimodular"] = abs(state.rho * state.detF - 1.0) <= UNIMODULAR_TOL
    return AdmissibilityReport(checks, values)


@dataclass(frozen=True)
class DimensionlessShock:
    """Scaled parameters (M, M-, R, F) of a planar shock.

    ``F`` is the downstream deformation gradient divided by the downstream
    sound speed.  ``formal`` admits F with det F <= 0 (notably F = 0, the
    gas-dynamics limit), which is unphysical but useful for regression.
    """

    M: float
    Mminus: float
    R: float
    F: np.ndarray
    formal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "F", np.asarray(self.F, dtype=float).reshape(3, 3))
        for name in ("M", "Mminus", "R"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.M > 0 and self.R > 0 and self.Mminus > 0):
            raise ParameterError("M, Mminus and R must be positive")

    # row vectors of F
    @property
    def row1(self) -> np.ndarray:
        return self.F[0]

    @property
    def row2(self) -> np.ndarray:
        return self.F[1]

    @property
    def row3(self) -> np.ndarray:
        return self.F[2]

    @property
    def M1(self) -> float:
        return float(np.linalg.norm(self.F[0]))

    @property
    def Mstar(self) -> float:
        return math.sqrt(1.0 + self.M1**2)

    @property
    def Mtilde(self) -> float:
        d = self.M**2 - self.M1**2
        return math.sqrt(d) if d > 0 else math.nan

    @property
    def beta(self) -> float:
        d = self.Mstar**2 - self.M**2
        return math.sqrt(d) if d > 0 else math.nan

    @property
    def l2(self) -> float:
        return float(self.F[0] @ self.F[1])

    @property
    def l3(self) -> float:
        return float(self.F[0] @ self.F[2])

    @property
    def detF(self) -> float:
        return float(np.linalg.det(self.F))

    def lax_margins(self) -> tuple[float, float, float]:
        """(M - M1, M* - M, M- sqrt(M^2 - M1^2) - M); Lax iff all positive."""
        mt2 = self.M**2 - self.M1**2
        slack = self.Mminus * math.sqrt(mt2) - self.M if mt2 > 0 else -math.inf
        return self.M - self.M1, self.Mstar - self.M, slack

    @property
    def is_lax(self) -> bool:
        return all(m > 0 for m in self.lax_margins())

    def require_admissible(self) -> None:
        """Raise unless the shock is Lax and (unless formal) det F > 0."""
        if not self.is_lax:
            raise AdmissibilityError(f"shock violates the Lax conditions, margins {self.lax_margins()}")
        if not self.formal and not self.detF > 0:
            raise AdmissibilityError("det F <= 0; pass formal=True for gas-dynamic regression inputs")

    def with_(self, **kw) -> "DimensionlessShock":
        data = dict(M=self.M, Mminus=self.Mminus, R=self.R, F=self.F, formal=self.formal)
        data.update(kw)
        return DimensionlessShock(**data)


def gas_limit(M: float, R: float, Mminus: float | None = None) -> DimensionlessShock:
    """Formal F = 0 shock (isentropic gas dynamics).

    With F = 0 the upstream Lax bound is M- > 1 for every M, so the default
    M- = 2 is always admissible.
    """
    if Mminus is None:
        Mminus = 2.0
    return DimensionlessShock(M, Mminus, R, np.zeros((3, 3)), formal=True)


@dataclass
class PlanarShockPair:
    minus: MaterialState
    plus: MaterialState
    eos: EquationOfState
    lax_pass: bool | None = field(default=None)

    @property
    def R(self) -> float:
        return self.plus.rho / self.minus.rho

    def residuals(self) -> dict[str, float]:
        """Relative residuals of the planar jump relations."""
        m, p = self.minus, self.plus
        p_m, _ = evaluate(self.eos, m.rho)
        p_p, _ = evaluate(self.eos, p.rho)
        R = self.R
        drho = p.rho - m.rho
        out = {}
        out["mass"] = abs(R * p.v[0] - m.v[0]) / max(abs(m.v[0]), 1e-300)
        mom_l = R * (p.v[0] ** 2 - p.elastic_normal_sq()) * drho
        dp = p_p - p_m
        out["momentum"] = abs(mom_l - dp) / max(abs(dp), abs(mom_l), 1e-300)
        scale_F = max(np.abs(m.F).max(), np.abs(p.F).max(), 1e-300)
        out["F_tangential"] = float(np.abs(p.F[1:] - m.F[1:]).max() / scale_F)
        rF = p.rho * p.F[0] - m.rho * m.F[0]
        out["rho_F1"] = float(np.abs(rF).max() / max(np.abs(m.rho * m.F[0]).max(), 1e-300))
        out["v_tangential"] = float(max(np.abs(m.v[1:]).max(), np.abs(p.v[1:]).max()))
        return out

    def max_residual(self) -> float:
        return max(self.residuals().values())


def solve_downstream(eos: EquationOfState, upstream: MaterialState, R: float) -> PlanarShockPair:
    """Build the downstream state for density ratio R = rho+/rho-.

    Only the upstream density and deformation gradient are inputs; the
    upstream normal velocity is returned as ``R * v1+``.
    """
    if not (R > 0) or R == 1.0 or not math.isfinite(R):
        raise ParameterError(f"density ratio must be positive and != 1, got {R}")
    if upstream.rho <= 0:
        raise AdmissibilityError("upstream density must be positive")
    if np.any(upstream.v[1:] != 0):
        raise ParameterError("upstream tangential velocity must vanish in the shock frame")
    rho_p = R * upstream.rho
    p_m, _ = evaluate(eos, upstream.rho)
    p_p, _ = evaluate(eos, rho_p)
    F_p = upstream.F.copy()
    F_p[0] = upstream.F[0] / R
    quotient = (p_p - p_m) / (R * (rho_p - upstream.rho))
    if not quotient > 0:
        raise NoPhysicalShockError(
            f"[p]/(R[rho]) = {quotient} <= 0: no real downstream normal velocity"
        )
    v1p = math.sqrt(float(F_p[0] @ F_p[0]) + quotient)
    minus = MaterialState(upstream.rho, np.array([R * v1p, 0.0, 0.0]), upstream.F, upstream.unimodular)
    plus = MaterialState(rho_p, np.array([v1p, 0.0, 0.0]), F_p, upstream.unimodular)
    pair = PlanarShockPair(minus, plus, eos)
    pair.lax_pass = nondimensionalize(pair).is_lax
    return pair


def nondimensionalize(pair: PlanarShockPair, formal: bool = False) -> DimensionlessShock:
    _, c2p = evaluate(pair.eos, pair.plus.rho)
    _, c2m = evaluate(pair.eos, pair.minus.rho)
    cp, cm = math.sqrt(c2p), math.sqrt(c2m)
    return DimensionlessShock(
        M=pair.plus.v[0] / cp,
        Mminus=pair.minus.v[0] / cm,
        R=pair.R,
        F=pair.plus.F / cp,
        formal=formal,
    )


# --- key-value text block -----------------------------------------------------

def _fmt(arr) -> str:
    return " ".join(repr(float(x)) for x in np.ravel(arr))


def pair_to_text(pair: PlanarShockPair) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp["pair"] = {
        "rho_minus": repr(pair.minus.rho),
        "v_minus": _fmt(pair.minus.v),
        "F_minus": _fmt(pair.minus.F),
        "rho_plus": repr(pair.plus.rho),
        "v_plus": _fmt(pair.plus.v),
        "F_plus": _fmt(pair.plus.F),
        "eos": pair.eos.describe(),
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def pair_from_text(text: str) -> PlanarShockPair:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string(text)
    sec = cp["pair"]

    def vec(key, n):
        vals = [float(x) for x in sec[key].split()]
        if len(vals) != n:
            raise ParameterError(f"{key}: expected {n} numbers, got {len(vals)}")
        return np.array(vals)

    eos = from_reference(sec["eos"])
    minus = MaterialState(float(sec["rho_minus"]), vec("v_minus", 3), vec("F_minus", 9).reshape(3, 3))
    plus = MaterialState(float(sec["rho_plus"]), vec("v_plus", 3), vec("F_plus", 9).reshape(3, 3))
    return PlanarShockPair(minus, plus, eos)


@dataclass(frozen=True)
class SurfacePointData:
    """Traces on both sides of a curved front x1 = phi(t, x2, x3) at one point.

    Velocities and deformation gradients are in the laboratory frame; the
    slopes phi_t, phi_x2, phi_x3 define N = (1, -phi_x2, -phi_x3).
    """

    rho_plus: float
    rho_minus: float
    c_plus: float
    c_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    F_plus: np.ndarray
    F_minus: np.ndarray
    phi_t: float = 0.0
    phi_x2: float = 0.0
    phi_x3: float = 0.0

    def __post_init__(self):
        for name in ("v_plus", "v_minus"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))
        for name in ("F_plus", "F_minus"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3, 3))

    @property
    def N(self) -> np.ndarray:
        return np.array([1.0, -self.phi_x2, -self.phi_x3])

    @property
    def normN(self) -> float:
        return float(np.linalg.norm(self.N))

    def F_N(self, side: str = "plus") -> np.ndarray:
        """(F_1N, F_2N, F_3N) with F_jN = F_j . N for the columns F_j."""
        F = self.F_plus if side == "plus" else self.F_minus
        return self.N @ F

    def v_N(self, side: str = "plus") -> float:
        v = self.v_plus if side == "plus" else self.v_minus
        return float(v @ self.N)

    @property
    def Mcal(self) -> float:
        return (self.v_N("plus") - self.phi_t) / (self.c_plus * self.normN)

    @property
    def Rcal(self) -> float:
        return self.rho_plus / self.rho_minus

    def frozen_shock(self) -> DimensionlessShock:
        """Constant-coefficient shock with (M, F rows, R) -> (Mcal, F_N, F_2, F_3, Rcal)."""
        rows = np.vstack([
            self.F_N("plus") / (self.c_plus * self.normN),
            self.F_plus[1] / self.c_plus,
            self.F_plus[2] / self.c_plus,
        ])
        Mminus = (self.v_N("minus") - self.phi_t) / (self.c_minus * self.normN)
        return DimensionlessShock(self.Mcal, max(Mminus, 1e-300), self.Rcal, rows, formal=True)

    @classmethod
    def planar_embedding(cls, shock: DimensionlessShock, **slopes) -> "SurfacePointData":
        """Traces realizing ``shock`` with c+ = 1 and rho- = 1 on a flat front.

        The upstream state follows from the planar jump relations, so the
        pointwise and planar Lax checks coincide when all slopes vanish.
        """
        R, M = shock.R, shock.M
        F_minus = shock.F.copy()
        F_minus[0] = R * shock.F[0]
        return cls(
            rho_plus=R,
            rho_minus=1.0,
            c_plus=1.0,
            c_minus=R * M / shock.Mminus,
            v_plus=np.array([M, 0.0, 0.0]),
            v_minus=np.array([R * M, 0.0, 0.0]),
            F_plus=shock.F,
            F_minus=F_minus,
            **slopes,
        )
