"""Seeded generators of admissible shocks for sweeps, tests and verification runs.

Every draw ``i`` uses its own generator ``default_rng([seed, i])`` so results
do not depend on how work is split between processes.
"""

from __future__ import annotations

import math

import numpy as np

from .eos import make_polytropic
from .errors import NoPhysicalShockError
from .states import DimensionlessShock, MaterialState, PlanarShockPair, nondimensionalize, solve_downstream

MAX_TRIES = 1000


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & (2**64 - 1), int(index)])


def physical_pair(seed: int, index: int, perturbation: float = 0.3) -> PlanarShockPair:
    """Compressive Lax pair from a convex polytropic law p = rho**gamma.

    gamma in [1, 3], rho- in [0.5, 2], F- = I + perturbation rescaled so that
    rho- det F- = 1, R in [1.05, 4].  Non-Lax draws are rejected.
    """
    rng = _rng(seed, index)
    for _ in range(MAX_TRIES):
        gamma = rng.uniform(1.0, 3.0)
        rho = rng.uniform(0.5, 2.0)
        F = np.eye(3) + perturbation * rng.uniform(-1.0, 1.0, (3, 3))
        det = np.linalg.det(F)
        if det <= 0.05:
            continue
        F = F * (1.0 / (rho * det)) ** (1.0 / 3.0)
        R = rng.uniform(1.05, 4.0)
        upstream = MaterialState(rho, np.zeros(3), F, unimodular=True)
        try:
            pair = solve_downstream(make_polytropic(1.0, gamma), upstream, R)
        except NoPhysicalShockError:
            continue
        if pair.lax_pass:
            return pair
    raise RuntimeError("no Lax draw found")


def physical_shock(seed: int, index: int) -> DimensionlessShock:
    return nondimensionalize(physical_pair(seed, index))


def _random_F(rng: np.random.Generator, scale: float) -> np.ndarray:
    while True:
        F = scale * rng.normal(size=(3, 3))
        d = np.linalg.det(F)
        if abs(d) > 1e-3 * scale**3:
            if d < 0:
                F[2] = -F[2]
            return F


def dimensionless_shock(
    seed: int,
    index: int,
    F_scale: float = 0.7,
    R_range: tuple[float, float] = (1.05, 8.0),
    edge: float = 0.02,
) -> DimensionlessShock:
    """Generic Lax shock drawn directly in scaled variables.

    M is uniform in the Lax window (M1, M*) shrunk by ``edge`` at both ends;
    M- exceeds its lower bound M / Mtilde by a random 5-100 %.  Both
    stability verdicts occur with comparable frequency.
    """
    rng = _rng(seed, index)
    F = _random_F(rng, F_scale)
    M1 = float(np.linalg.norm(F[0]))
    Ms = math.sqrt(1.0 + M1**2)
    t = rng.uniform(edge, 1.0 - edge)
    M = M1 + t * (Ms - M1)
    Mt = math.sqrt(M**2 - M1**2)
    Mminus = M / Mt * (1.0 + rng.uniform(0.05, 1.0))
    R = rng.uniform(*R_range)
    return DimensionlessShock(M, Mminus, R, F)


def subsonic_elastic_shock(seed: int, index: int, F_scale: float = 0.7) -> DimensionlessShock:
    """Lax shock with R (M^2 - M1^2) < 1, so K < K0 at every angle."""
    rng = _rng(seed, index)
    F = _random_F(rng, F_scale)
    M1 = float(np.linalg.norm(F[0]))
    Ms = math.sqrt(1.0 + M1**2)
    M = M1 + rng.uniform(0.02, 0.98) * (Ms - M1)
    Mt2 = M**2 - M1**2
    R = rng.uniform(0.05, 0.999) / Mt2
    Mminus = M / math.sqrt(Mt2) * (1.0 + rng.uniform(0.05, 1.0))
    return DimensionlessShock(M, Mminus, R, F)


def unit_angle(seed: int, index: int) -> tuple[float, float]:
    th = _rng(seed, index).uniform(0.0, 2 * math.pi)
    return math.cos(th), math.sin(th)
