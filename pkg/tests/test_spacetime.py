import math

import pytest
from hypothesis import given, settings, strategies as st

from geonresp import spacetime
from geonresp.errors import DomainError

EXTERIOR = st.floats(min_value=1.0 + 1e-9, max_value=1e6,
                     allow_nan=False, allow_infinity=False)


def test_horizon_constants():
    assert spacetime.T_HAWKING == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-15)
    geo = spacetime.GeometryParams()
    assert geo.r_horizon == 1.0


@given(r=EXTERIOR)
def test_metric_f_range(r):
    f = spacetime.metric_f(r)
    assert 0.0 < f < 1.0
    assert spacetime.redshift(r) == pytest.approx(math.sqrt(f), rel=1e-15)


@pytest.mark.parametrize("r", [1.0, 0.5, 0.0, -3.0])
def test_interior_rejected(r):
    for fn in (spacetime.metric_f, spacetime.tortoise, spacetime.redshift,
               spacetime.local_temperature):
        with pytest.raises(DomainError):
            fn(r)
    with pytest.raises(DomainError):
        spacetime.DetectorWorldline(r)


@given(r=st.floats(min_value=1.001, max_value=1e5))
@settings(max_examples=200)
def test_tortoise_round_trip(r):
    rstar = spacetime.tortoise(r)
    back = spacetime.inverse_tortoise(rstar)
    assert back == pytest.approx(r, rel=1e-11, abs=1e-11)


def test_tortoise_monotone_near_horizon():
    rs = [1.0 + 10.0 ** (-k) for k in range(1, 12)]
    vals = [spacetime.tortoise(r) for r in rs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # deep near-horizon inversion stays outside the horizon
    assert spacetime.inverse_tortoise(-30.0) > 1.0


@given(omega=st.floats(min_value=0.0, max_value=100.0), r=EXTERIOR)
def test_frequency_frames_inverse(omega, r):
    local = spacetime.local_frequency(omega, r)
    assert local >= omega  # blueshift near the hole
    assert spacetime.killing_frequency(local, r) == pytest.approx(
        omega, rel=1e-12, abs=1e-300)


def test_negative_killing_frequency_rejected():
    with pytest.raises(DomainError):
        spacetime.local_frequency(-0.1, 3.0)


@given(r=EXTERIOR)
def test_local_temperature_tolman(r):
    t = spacetime.local_temperature(r)
    assert t > spacetime.T_HAWKING  # diverges at the horizon, approaches T_H far out
    assert t == pytest.approx(spacetime.T_HAWKING / spacetime.redshift(r),
                              rel=1e-14)
