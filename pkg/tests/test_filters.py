import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saturn.errors import ParameterError, UnsupportedError
from saturn.filters import FILTERS, filter_value, get_filter, residual_value


def test_values():
    assert filter_value("krr", 1.0, 1.0) == 0.5
    assert filter_value("cut", 0.5, 1.0) == 0.0
    assert filter_value("cut", 2.0, 1.0) == 0.5
    assert filter_value("gf", 1.0, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)


def test_gf_continuous_at_zero():
    assert filter_value("gf", 0.0, 0.25) == 4.0
    assert filter_value("gf", 1e-12, 0.25) == pytest.approx(4.0, rel=1e-10)


def test_residuals():
    assert residual_value("krr", 1.0, 1.0) == 0.5
    assert residual_value("cut", 2.0, 1.0) == 0.0
    assert residual_value("gf", 1.0, 0.5) == pytest.approx(math.exp(-2), rel=1e-15)


@pytest.mark.parametrize("fid", sorted(FILTERS))
def test_residual_consistent(fid):
    t = np.linspace(0, 3, 301)
    np.testing.assert_allclose(residual_value(fid, t, 0.3), 1 - t * filter_value(fid, t, 0.3), atol=1e-14)


@pytest.mark.parametrize("fid", sorted(FILTERS))
def test_bad_lambda(fid):
    for lam in (0.0, -1.0):
        with pytest.raises(ParameterError):
            filter_value(fid, 1.0, lam)
        with pytest.raises(ParameterError):
            residual_value(fid, 1.0, lam)


def test_negative_t():
    with pytest.raises(ParameterError):
        filter_value("krr", -1.0, 0.1)


def test_unknown_filter():
    with pytest.raises(UnsupportedError):
        get_filter("tikhonov2")


def test_qualification():
    assert FILTERS["krr"].qualification == 1
    assert math.isinf(FILTERS["gf"].qualification) and math.isinf(FILTERS["cut"].qualification)


@given(st.floats(0, 1e3), st.floats(1e-6, 1e2), st.sampled_from(sorted(FILTERS)))
@settings(max_examples=300, deadline=None)
def test_range_bounds(t, lam, fid):
    g = filter_value(fid, t, lam)
    assert 0 <= t * g <= 1 + 1e-12
    assert g <= 1 / lam * (1 + 1e-12)
    assert 0 <= residual_value(fid, t, lam) <= 1


@given(st.floats(0, 1e3), st.floats(1e-6, 1e2), st.floats(0, 1))
@settings(max_examples=300, deadline=None)
def test_krr_interpolation_bound(t, lam, s):
    # sup_t t^s g(t) <= lambda^(s - 1) for KRR, 0 <= s <= 1
    assert t**s * filter_value("krr", t, lam) <= lam ** (s - 1) * (1 + 1e-12)


@given(st.floats(0, 1e3), st.floats(1e-6, 1e2), st.floats(0, 1))
@settings(max_examples=300, deadline=None)
def test_krr_residual_qualification(t, lam, s):
    # t^s r(t) <= lambda^s up to qualification 1
    assert t**s * residual_value("krr", t, lam) <= lam**s * (1 + 1e-12)


def test_gf_residual_superpolynomial():
    # exp(-1/lam)/lam^4 decreases once lam < 1/4
    lam = 2.0 ** -np.arange(3, 10)
    ratio = residual_value("gf", 1.0, lam) / lam**4
    assert np.all(np.diff(ratio) < 0) and ratio[-1] < 1e-200


def test_krr_saturates():
    # with s > 1 the residual t^s r(t) no longer decays like lambda^s
    lam = 2.0 ** -np.arange(4, 12)
    t = 1.0
    ratio = t**2 * residual_value("krr", t, lam) / lam**2
    assert np.all(np.diff(ratio) > 0)


def test_vectorised_shape():
    assert filter_value("cut", np.array([0.1, 0.5, 2.0]), 0.4).shape == (3,)
    assert isinstance(filter_value("cut", 0.5, 0.4), float)
