"""Characteristic speeds, Lax 1-shock conditions and block structure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh

from .eos import EquationOfState, evaluate
from .errors import AdmissibilityError, ParameterError
from .states import DimensionlessShock, MaterialState, SurfacePointData

MULTIPLICITIES = (1, 2, 7, 2, 1)
CLUSTER_GAP = 1e-8


@dataclass(frozen=True)
class CharacteristicSpectrum:
    speeds: tuple[float, ...]
    multiplicities: tuple[int, ...] = MULTIPLICITIES


def _check_xi(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).reshape(3)
    if not np.any(xi):
        raise ParameterError("wave vector must be nonzero")
    return xi


def characteristic_speeds(state: MaterialState, eos: EquationOfState, xi) -> CharacteristicSpectrum:
    """Closed-form eigenvalues of A0^{-1} sum_j xi_j A_j, sorted ascending."""
    xi = _check_xi(xi)
    _, c2 = evaluate(eos, state.rho)
    drift = float(state.v @ xi)
    elastic = float(np.sum((xi @ state.F) ** 2))  # sum_j (F_j . xi)^2, F_j = columns
    fast = math.sqrt(c2 * float(xi @ xi) + elastic)
    slow = math.sqrt(elastic)
    speeds = (
        [drift - fast]
        + [drift - slow] * 2
        + [drift] * 7
        + [drift + slow] * 2
        + [drift + fast]
    )
    return CharacteristicSpectrum(tuple(speeds))


def symbol_matrices(state: MaterialState, eos: EquationOfState) -> tuple[np.ndarray, list[np.ndarray]]:
    """A0 and [A1, A2, A3] of the symmetric form in U = (p, v, F1, F2, F3)."""
    _, c2 = evaluate(eos, state.rho)
    rho, v, F = state.rho, state.v, state.F
    A0 = np.diag([1.0 / (rho * c2)] + [rho] * 12)
    mats = []
    for j in range(3):
        A = np.zeros((13, 13))
        A[0, 0] = v[j] / (rho * c2)
        A[0, 1 + j] = A[1 + j, 0] = 1.0
        for i in range(12):
            A[1 + i, 1 + i] = rho * v[j]
        for k in range(3):
            for i in range(3):
                A[1 + i, 4 + 3 * k + i] = A[4 + 3 * k + i, 1 + i] = -rho * F[j, k]
        mats.append(A)
    return A0, mats


def dense_speeds(state: MaterialState, eos: EquationOfState, xi) -> np.ndarray:
    """Eigenvalues of the assembled symbol by a generalized symmetric solver."""
    xi = _check_xi(xi)
    A0, mats = symbol_matrices(state, eos)
    S = sum(x * A for x, A in zip(xi, mats))
    return eigh(S, A0, eigvals_only=True)


def cluster_multiplicities(values, gap: float = CLUSTER_GAP) -> tuple[int, ...]:
    vals = np.sort(np.asarray(values, dtype=float))
    scale = max(float(np.abs(vals).max()), 1.0)
    counts = [1]
    for a, b in zip(vals[:-1], vals[1:]):
        if b - a <= gap * scale:
            counts[-1] += 1
        else:
            counts.append(1)
    return tuple(counts)


class LaxCheck(NamedTuple):
    passed: bool
    margins: tuple[float, float]
    mach_minus_slack: float


def check_lax_planar(shock: DimensionlessShock) -> LaxCheck:
    """M1 < M < M* and M- sqrt(M^2 - M1^2) > M, all strict."""
    lower, upper, slack = shock.lax_margins()
    return LaxCheck(lower > 0 and upper > 0 and slack > 0, (lower, upper), slack)


def check_lax_pointwise(point: SurfacePointData) -> bool:
    """The two 1-shock inequalities at a point of a curved front."""
    nn = point.normN
    rel_m = point.v_N("minus") - point.phi_t
    rel_p = point.v_N("plus") - point.phi_t
    fn_m = float(np.sum(point.F_N("minus") ** 2))
    fn_p = float(np.sum(point.F_N("plus") ** 2))
    upstream = rel_m > math.sqrt((point.c_minus * nn) ** 2 + fn_m)
    downstream = math.sqrt(fn_p) < rel_p < math.sqrt((point.c_plus * nn) ** 2 + fn_p)
    return bool(upstream and downstream)


def block_structure_check(
    state: MaterialState,
    eos: EquationOfState,
    sample_count: int = 1000,
    seed: int = 0,
) -> bool:
    """Constant multiplicity (1, 2, 7, 2, 1) over random unit wave vectors.

    Multiplicities are read off the dense eigensolver, not the closed forms.
    """
    if not state.detF > 0:
        raise AdmissibilityError(f"block structure needs det F > 0, got {state.detF}")
    rng = np.random.default_rng(seed)
    xis = rng.standard_normal((sample_count, 3))
    xis /= np.linalg.norm(xis, axis=1, keepdims=True)
    for xi in xis:
        if not np.sum((xi @ state.F) ** 2) > 0:
            return False
        if cluster_multiplicities(dense_speeds(state, eos, xi)) != MULTIPLICITIES:
            return False
    return True
