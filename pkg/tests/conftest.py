import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from elastoshock.states import DimensionlessShock

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def matrices(draw, scale=1.5, positive_det=True):
    entries = draw(st.lists(st.floats(-scale, scale, **finite), min_size=9, max_size=9))
    F = np.array(entries).reshape(3, 3)
    if positive_det:
        d = np.linalg.det(F)
        if abs(d) < 1e-2:
            F = F + np.eye(3)
            d = np.linalg.det(F)
        if d < 0:
            F[2] = -F[2]
        if abs(np.linalg.det(F)) < 1e-3:
            F = np.eye(3)
    return F


@st.composite
def lax_shocks(draw, R_range=(0.2, 8.0)):
    """Lax shocks with det F > 0 kept away from the edges of the Lax window."""
    F = draw(matrices())
    t = draw(st.floats(0.02, 0.98))
    M1 = float(np.linalg.norm(F[0]))
    M = M1 + t * (math.sqrt(1 + M1**2) - M1)
    Mt = math.sqrt(M**2 - M1**2)
    Mminus = M / Mt * draw(st.floats(1.05, 3.0))
    R = draw(st.floats(*R_range))
    return DimensionlessShock(M, Mminus, R, F)


@st.composite
def unit_vectors2(draw):
    th = draw(st.floats(0.0, 2 * math.pi))
    return math.cos(th), math.sin(th)


@pytest.fixture
def identity_shock():
    return DimensionlessShock(1.2, 3.0, 2.0, np.eye(3))
