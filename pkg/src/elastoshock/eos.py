"""Barotropic pressure laws p(rho).

Two families are supported: polytropic ``p = k rho**gamma`` and tabulated laws
given by monotone (rho, p) samples.  Tabulated laws are interpolated by a
monotone cubic Hermite spline whose slopes come from three-point parabolic
estimates followed by the Fritsch-Carlson/Hyman limiter, so p'(rho) stays
positive wherever the samples are strictly increasing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import bisect

from .errors import ParameterError


class EOSError(ParameterError):
    """Invalid pressure-law parameters or queries."""


class DomainError(EOSError):
    """Density outside the admissible interval of the law."""


class HyperbolicityError(EOSError):
    """Sound speed squared is not positive (rho'(p) <= 0)."""


class Convexity(str, Enum):
    CONVEX = "convex"
    NONCONVEX = "nonconvex"
    UNDETERMINED = "undetermined"


SLOPE_FLOOR = 1e-3


def _hyman_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h = np.diff(x)
    delta = np.diff(y) / h
    n = len(x)
    d = np.empty(n)
    # interior: derivative of the interpolating parabola through 3 points
    d[1:-1] = (h[1:] * delta[:-1] + h[:-1] * delta[1:]) / (h[:-1] + h[1:])
    # ends: one-sided three-point formula
    if n > 2:
        d[0] = ((2 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1])
        d[-1] = ((2 * h[-1] + h[-2]) * delta[-1] - h[-1] * delta[-2]) / (h[-1] + h[-2])
    else:
        d[:] = delta[0]
    # monotonicity filter for increasing data, kept strictly inside
    # 0 < d_k < 3 min(adjacent secants) so that p' > 0 everywhere
    smin = np.empty(n)
    smin[0] = delta[0]
    smin[-1] = delta[-1]
    smin[1:-1] = np.minimum(delta[:-1], delta[1:])
    return np.clip(d, SLOPE_FLOOR * smin, (3.0 - SLOPE_FLOOR) * smin)


@dataclass(frozen=True)
class EquationOfState:
    """A pressure law with its admissible density interval.

    Build instances with :func:`make_polytropic` or :func:`make_tabulated`
    rather than calling the constructor directly.
    """

    kind: str
    params: tuple
    domain: tuple[float, float]
    _spline: CubicHermiteSpline | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if not (lo >= 0 and hi > lo):
            raise EOSError(f"bad density domain {self.domain}")

    # --- queries -----------------------------------------------------------
    def contains(self, rho: float) -> bool:
        lo, hi = self.domain
        if self.kind == "polytropic":
            return lo < rho < hi or (rho == hi and math.isfinite(hi))
        return lo <= rho <= hi

    def pressure(self, rho):
        if self.kind == "polytropic":
            k, gamma = self.params
            return k * np.power(rho, gamma)
        return self._spline(rho)

    def sound_speed_sq(self, rho):
        if self.kind == "polytropic":
            k, gamma = self.params
            return k * gamma * np.power(rho, gamma - 1.0)
        return self._spline(rho, 1)

    def describe(self) -> str:
        """Short reference string used by the text serializers."""
        if self.kind == "polytropic":
            k, gamma = self.params
            return f"polytropic k={k!r} gamma={gamma!r}"
        rho, p = self.params
        pts = ";".join(f"{r!r}:{q!r}" for r, q in zip(rho, p))
        return f"tabulated {pts}"

    def scaled(self, factor: float) -> "EquationOfState":
        """Law with pressure multiplied by ``factor`` (sound speed by sqrt(factor))."""
        if factor <= 0:
            raise EOSError("scale factor must be positive")
        if self.kind == "polytropic":
            k, gamma = self.params
            return make_polytropic(k * factor, gamma)
        rho, p = self.params
        return make_tabulated(list(zip(rho, np.asarray(p) * factor)))


def make_polytropic(k: float, gamma: float) -> EquationOfState:
    """Polytropic law p = k rho**gamma on rho > 0."""
    if not (k > 0 and gamma > 0) or not (math.isfinite(k) and math.isfinite(gamma)):
        raise EOSError(f"polytropic law needs k > 0 and gamma > 0, got k={k}, gamma={gamma}")
    return EquationOfState("polytropic", (float(k), float(gamma)), (0.0, math.inf))


def make_tabulated(samples: Sequence[tuple[float, float]]) -> EquationOfState:
    """Tabulated law from (rho, p) pairs, strictly increasing in both columns."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise EOSError("need at least three (rho, p) samples")
    rho, p = arr[:, 0], arr[:, 1]
    if np.any(rho <= 0):
        raise EOSError("tabulated densities must be positive")
    if np.any(np.diff(rho) <= 0) or np.any(np.diff(p) <= 0):
        raise EOSError("tabulated samples must be strictly increasing in rho and p")
    spline = CubicHermiteSpline(rho, p, _hyman_slopes(rho, p), extrapolate=False)
    return EquationOfState(
        "tabulated",
        (tuple(rho.tolist()), tuple(p.tolist())),
        (float(rho[0]), float(rho[-1])),
        spline,
    )


def load_tabulated_csv(path: str | Path) -> EquationOfState:
    """Read a two-column CSV with header ``rho,p``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["rho", "p"]:
            raise EOSError(f"expected header 'rho,p', got {header}")
        rows = [(float(a), float(b)) for a, b in reader if a.strip()]
    return make_tabulated(rows)


def from_reference(ref: str) -> EquationOfState:
    """Parse the string produced by :meth:`EquationOfState.describe`.

    Also accepts ``tabulated-csv <path>``.
    """
    kind, _, rest = ref.strip().partition(" ")
    if kind == "polytropic":
        kv = dict(tok.split("=", 1) for tok in rest.split())
        try:
            return make_polytropic(float(kv["k"]), float(kv["gamma"]))
        except KeyError as exc:
            raise EOSError(f"polytropic reference needs k and gamma: {ref!r}") from exc
    if kind == "tabulated":
        pts = [tuple(float(x) for x in item.split(":")) for item in rest.split(";") if item]
        return make_tabulated(pts)
    if kind == "tabulated-csv":
        return load_tabulated_csv(rest.strip())
    raise EOSError(f"unknown equation of state reference {ref!r}")


def evaluate(eos: EquationOfState, rho: float) -> tuple[float, float]:
    """Return ``(p, c2)`` at density ``rho`` with ``c2 = dp/drho``."""
    if not eos.contains(rho):
        raise DomainError(f"rho={rho} outside domain {eos.domain}")
    p = float(eos.pressure(rho))
    c2 = float(eos.sound_speed_sq(rho))
    if not c2 > 0:
        raise HyperbolicityError(f"c^2={c2} <= 0 at rho={rho}")
    return p, c2


def density(eos: EquationOfState, p: float) -> float:
    """Invert p(rho) by bisection on the law's domain."""
    lo, hi = eos.domain
    if eos.kind == "polytropic":
        # grow a finite bracket; p is increasing on (0, inf)
        lo, hi = 1.0, 1.0
        while eos.pressure(lo) > p:
            lo *= 0.5
            if lo < 1e-300:
                raise DomainError(f"pressure {p} not attained")
        while eos.pressure(hi) < p:
            hi *= 2.0
            if hi > 1e300:
                raise DomainError(f"pressure {p} not attained")
    elif not (eos.pressure(lo) <= p <= eos.pressure(hi)):
        raise DomainError(f"pressure {p} outside tabulated range")
    if eos.pressure(lo) == p:
        return float(lo)
    if eos.pressure(hi) == p:
        return float(hi)
    return float(bisect(lambda r: float(eos.pressure(r)) - p, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000))


def is_convex(
    eos: EquationOfState,
    interval: tuple[float, float],
    samples: int = 10_000,
    noise: float = 1e-9,
) -> Convexity:
    """Classify p(rho) on ``interval`` by sampling c2 = p' densely.

    p is convex iff p' is nondecreasing.  Differences of p' more negative
    than ``noise * max|p'|`` mark the law nonconvex; tabulated laws whose
    smallest difference lies within the noise band are undetermined.
    """
    a, b = interval
    if not b > a:
        raise EOSError(f"empty interval {interval}")
    if not (eos.contains(a) and eos.contains(b)):
        raise DomainError(f"interval {interval} not inside domain {eos.domain}")
    rho = np.linspace(a, b, samples)
    c2 = np.asarray(eos.sound_speed_sq(rho), dtype=float)
    dc = np.diff(c2)
    worst = dc.min()
    if worst >= 0:
        return Convexity.CONVEX
    band = noise * np.abs(c2).max()
    if worst < -band:
        return Convexity.NONCONVEX
    return Convexity.CONVEX if eos.kind == "polytropic" else Convexity.UNDETERMINED
