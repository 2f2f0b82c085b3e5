import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elastoshock.eos import make_polytropic
from elastoshock.errors import AdmissibilityError, ParameterError
from elastoshock.lax import (
    MULTIPLICITIES,
    block_structure_check,
    characteristic_speeds,
    check_lax_planar,
    check_lax_pointwise,
    cluster_multiplicities,
    dense_speeds,
)
from elastoshock.states import DimensionlessShock, MaterialState, SurfacePointData, gas_limit

from conftest import lax_shocks, matrices

UNIT_SOUND = make_polytropic(1, 1)   # c^2 = 1


def test_identity_spectrum():
    sp = characteristic_speeds(MaterialState(1.0, np.zeros(3), np.eye(3)), UNIT_SOUND, [1, 0, 0])
    r2 = math.sqrt(2)
    np.testing.assert_allclose(sp.speeds, [-r2, -1, -1] + [0] * 7 + [1, 1, r2])
    assert sp.multiplicities == (1, 2, 7, 2, 1)


def test_drift_shifts_spectrum():
    base = characteristic_speeds(MaterialState(1.0, np.zeros(3), np.eye(3)), UNIT_SOUND, [1, 0, 0])
    moved = characteristic_speeds(MaterialState(1.0, np.array([1.0, 0, 0]), np.eye(3)), UNIT_SOUND, [1, 0, 0])
    np.testing.assert_allclose(np.array(moved.speeds) - 1.0, base.speeds, atol=1e-15)


def test_zero_wave_vector():
    with pytest.raises(ParameterError):
        characteristic_speeds(MaterialState(1.0, np.zeros(3), np.eye(3)), UNIT_SOUND, [0, 0, 0])


def test_planar_lax_examples():
    assert check_lax_planar(gas_limit(0.5, 2.0)).passed
    edge = DimensionlessShock(1.0, 3.0, 2.0, np.eye(3))
    assert not check_lax_planar(edge).passed
    res = check_lax_planar(DimensionlessShock(1.2, 3.0, 2.0, np.eye(3)))
    assert res.passed
    assert res.mach_minus_slack == pytest.approx(3 * math.sqrt(0.44) - 1.2)
    assert 3 > 1.2 / math.sqrt(0.44)


def test_pointwise_agrees_on_flat_front(identity_shock):
    point = SurfacePointData.planar_embedding(identity_shock)
    assert check_lax_pointwise(point) == check_lax_planar(identity_shock).passed


def test_large_front_speed_breaks_pointwise_lax(identity_shock):
    flips = [t for t in np.linspace(0, 3, 301)
             if not check_lax_pointwise(SurfacePointData.planar_embedding(identity_shock, phi_t=t))]
    assert flips, "some front speed must violate the downstream inequality"
    # once violated it stays violated as phi_t grows
    first = flips[0]
    assert all(not check_lax_pointwise(SurfacePointData.planar_embedding(identity_shock, phi_t=t))
               for t in np.linspace(first, 3, 50))


def test_pointwise_upper_bound_is_strict(identity_shock):
    point = SurfacePointData.planar_embedding(identity_shock)
    upper = math.sqrt(1.0 + float(np.sum(point.F_N() ** 2)))
    phi_t = point.v_N() - upper
    assert not check_lax_pointwise(SurfacePointData.planar_embedding(identity_shock, phi_t=phi_t))


def test_block_structure_examples():
    eos = UNIT_SOUND
    assert block_structure_check(MaterialState(1.0, np.zeros(3), np.eye(3)), eos, 1000)
    assert block_structure_check(MaterialState(1.0, np.zeros(3), np.diag([1, 1, 1e-6])), eos, 1000)
    with pytest.raises(AdmissibilityError):
        block_structure_check(MaterialState(1.0, np.zeros(3), np.diag([1.0, 1.0, 0.0])), eos)


def test_cluster_gap():
    assert cluster_multiplicities([0, 1e-10, 1]) == (2, 1)
    assert cluster_multiplicities([0, 1e-6, 1]) == (1, 1, 1)


states = st.builds(
    lambda rho, v, F: MaterialState(rho, np.array(v), F),
    st.floats(0.2, 5), st.lists(st.floats(-3, 3), min_size=3, max_size=3), matrices(),
)
wave_vectors = st.lists(st.floats(-2, 2), min_size=3, max_size=3).filter(lambda x: np.linalg.norm(x) > 1e-2)
laws = st.builds(make_polytropic, st.floats(0.2, 5), st.floats(1.0, 3.0))


@given(states, laws, wave_vectors)
def test_closed_form_matches_dense(state, eos, xi):
    sp = np.array(characteristic_speeds(state, eos, xi).speeds)
    dense = dense_speeds(state, eos, xi)
    scale = max(1.0, np.abs(sp).max())
    assert np.abs(sp - dense).max() <= 1e-10 * scale
    assert cluster_multiplicities(dense) == MULTIPLICITIES


@given(states, laws, wave_vectors)
def test_spectrum_symmetric_about_drift(state, eos, xi):
    sp = np.array(characteristic_speeds(state, eos, xi).speeds)
    drift = float(state.v @ np.array(xi))
    np.testing.assert_allclose(sp + sp[::-1], 2 * drift, atol=1e-12 * max(1, np.abs(sp).max()))
    assert np.all(np.diff(sp) >= 0)


@given(lax_shocks())
def test_planar_and_pointwise_lax_agree(shock):
    assert check_lax_pointwise(SurfacePointData.planar_embedding(shock)) == check_lax_planar(shock).passed


@given(st.floats(0.05, 3), st.floats(0.05, 5), matrices())
def test_planar_and_pointwise_agree_beyond_lax(M, Mminus, F):
    shock = DimensionlessShock(M, Mminus, 2.0, F)
    assert check_lax_pointwise(SurfacePointData.planar_embedding(shock)) == check_lax_planar(shock).passed
