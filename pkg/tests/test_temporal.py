import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbspurify.temporal import (
    WavePacketConvention,
    build_temporal_basis,
    calibrate_sigma,
    default_convention,
    hom_visibility,
    overlap,
)

CONV = default_convention()
taus = st.floats(-3, 3, allow_nan=False)


def test_sigma_positive():
    with pytest.raises(ValueError):
        WavePacketConvention(0.0)


def test_overlap_identity():
    assert overlap(0.0, 0.0, CONV) == 1.0


@given(taus, taus, taus)
def test_overlap_symmetry_and_shift(a, b, c):
    assert overlap(a, b, CONV) == overlap(b, a, CONV)
    assert overlap(a, b, CONV) == pytest.approx(overlap(a + c, b + c, CONV), rel=1e-9, abs=1e-300)
    assert 0.0 <= overlap(a, b, CONV) <= 1.0


def test_overlap_below_one_off_diagonal():
    assert overlap(0.0, 1e-3, CONV) < 1.0


def test_visibility_anchors():
    assert hom_visibility(0.0, CONV) == 1.0
    assert hom_visibility(0.4, CONV) == pytest.approx(0.74, abs=1e-12)
    assert 0.49 <= hom_visibility(0.6, CONV) <= 0.58
    assert overlap(0.0, 0.4, CONV) ** 2 == pytest.approx(0.74, abs=0.02)


def test_calibrate_closed_form():
    # 0.16 / (-4 ln 0.74), evaluated separately.
    assert calibrate_sigma(0.4, 0.74).sigma ** 2 == pytest.approx(0.13284398357454788, rel=1e-12)
    assert calibrate_sigma(0.4, math.exp(-1)).sigma ** 2 == pytest.approx(0.04, rel=1e-12)


@given(st.floats(0.05, 2.0), st.floats(0.01, 0.99))
def test_calibrate_round_trip(tau, vis):
    assert hom_visibility(tau, calibrate_sigma(tau, vis)) == pytest.approx(vis, abs=1e-12)


@pytest.mark.parametrize("tau, vis", [(0.4, 0.0), (0.4, 1.0), (0.0, 0.5)])
def test_calibrate_domain(tau, vis):
    with pytest.raises(ValueError):
        calibrate_sigma(tau, vis)


def test_basis_single():
    b = build_temporal_basis([0.0], CONV)
    assert b.rank == 1
    np.testing.assert_array_equal(b.gram, [[1.0]])
    np.testing.assert_array_equal(b.coeffs, [[1.0]])


def test_basis_degenerate():
    b = build_temporal_basis([0.0, 0.0], CONV)
    assert b.rank == 1
    np.testing.assert_allclose(b.coeffs, [[1.0], [1.0]])


def test_basis_two_delays():
    b = build_temporal_basis([0.0, 0.4], CONV)
    assert b.rank == 2
    assert b.gram[0, 1] == pytest.approx(math.sqrt(0.74), abs=0.012)
    np.testing.assert_allclose(b.coeffs[1], [math.sqrt(0.74), math.sqrt(0.26)], atol=1e-12)
    assert b.coeffs[0, 1] == 0.0


def test_basis_empty():
    with pytest.raises(ValueError):
        build_temporal_basis([], CONV)


@given(st.lists(taus, min_size=1, max_size=4))
def test_basis_reproduces_gram(delays):
    b = build_temporal_basis(delays, CONV)
    np.testing.assert_allclose(b.coeffs @ b.coeffs.T, b.gram, atol=1e-12)
    np.testing.assert_allclose(np.diag(b.gram), 1.0)
    assert 1 <= b.rank <= len(delays)
    assert np.allclose(np.triu(b.coeffs, 1), 0.0)
