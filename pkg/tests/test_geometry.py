import numpy as np
import pytest
from hypothesis import given, strategies as st

from fhspec.errors import OnCurveError
from fhspec.geometry import distance_to_polyline, hull_centroid, polyline_winding

SQUARE = np.array([0, 1, 1 + 1j, 1j])


def test_square():
    assert polyline_winding(SQUARE, 0.5 + 0.5j) == 1
    assert polyline_winding(SQUARE[::-1], 0.5 + 0.5j) == -1
    assert polyline_winding(SQUARE, 3.0) == 0
    assert distance_to_polyline(SQUARE, 0.5 + 2j) == pytest.approx(1.0)
    assert hull_centroid(SQUARE) == pytest.approx(0.5 + 0.5j)


def test_on_curve():
    with pytest.raises(OnCurveError):
        polyline_winding(SQUARE, 0.5, tol=1e-9)
    with pytest.raises(OnCurveError):
        polyline_winding(SQUARE, 1.0)


def test_degenerate_hull():
    assert hull_centroid(np.array([0, 1, 2])) == pytest.approx(1.0)


@given(st.integers(1, 5), st.integers(8, 200))
def test_multiple_turns(k, m):
    n = m * k + 1
    z = 0.3 + 2.0 * np.exp(2j * np.pi * k * np.arange(n) / n)
    assert polyline_winding(z, 0.3) == k
