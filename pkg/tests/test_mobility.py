import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import P0, V0
from walkfront.errors import ParameterError
from walkfront.mobility import MobilityModel

MODEL = MobilityModel()

# direct extended-precision evaluations of the closed forms
V_AT_1 = 0.013137116181932129
V_AT_M1 = 0.018478223049249563
VIC_AT_0 = 1.1077802450856064
P_AT_3 = 0.017986209962091558


def test_velocity_peak_exact():
    assert MODEL.velocity(-0.02) == 1.11


def test_velocity_at_zero():
    assert MODEL.velocity(0.0) == pytest.approx(V0, rel=1e-14)
    assert 1.1080 <= MODEL.velocity(0.0) <= 1.1082


def test_velocity_steep_values():
    assert MODEL.velocity(1.0) == pytest.approx(V_AT_1, rel=1e-12)
    assert MODEL.velocity(-1.0) == pytest.approx(V_AT_M1, rel=1e-12)


def test_velocity_vectorized():
    S = np.array([-0.02, 0.0, 1.0])
    out = MODEL.velocity(S)
    assert out.shape == (3,)
    assert out[0] == 1.11


@given(st.floats(min_value=-5.0, max_value=5.0))
def test_velocity_unique_maximizer(S):
    if abs(S + 0.02) < 1e-6:
        return
    assert MODEL.velocity(S) < 1.11


def test_velocity_ic_peak_and_floor():
    assert MODEL.velocity_ic(-0.02) == 1.11
    assert MODEL.velocity_ic(0.0) == pytest.approx(VIC_AT_0, rel=1e-12)
    assert MODEL.velocity_ic(100.0) == pytest.approx(0.11, rel=1e-9)
    assert MODEL.velocity_ic(-100.0) == pytest.approx(0.11, rel=1e-9)


def test_velocity_laws_agree_for_small_slopes():
    S = np.linspace(-0.25, 0.25, 10001)
    assert np.max(np.abs(MODEL.velocity(S) - MODEL.velocity_ic(S))) < 0.05


def test_penalization_values():
    assert MODEL.penalization(1.0) == 0.5
    assert MODEL.penalization(0.0) == pytest.approx(P0, rel=1e-14)
    assert MODEL.penalization(3.0) == pytest.approx(P_AT_3, rel=1e-12)


def test_penalization_rejects_negative():
    with pytest.raises(ParameterError):
        MODEL.penalization(-0.1)


def test_penalization_strictly_decreasing_and_in_unit_interval():
    S = np.linspace(0.0, 6.0, 2001)
    P = MODEL.penalization(S)
    assert np.all(np.diff(P) < 0)
    assert np.all((P > 0) & (P < 1))


@given(st.floats(min_value=0.0, max_value=2.0))
def test_penalization_antisymmetry(S):
    # tanh antisymmetry about the center: P(S) + P(2c - S) = 1
    total = MODEL.penalization(S) + MODEL.penalization(2.0 * MODEL.pen_center - S)
    assert total == pytest.approx(1.0, abs=1e-14)


def test_directional_speed_examples():
    g = (1.0, 0.0)
    assert MODEL.directional_speed(g, np.pi / 2) == pytest.approx(V0, rel=1e-12)
    assert MODEL.directional_speed(g, 0.0) == pytest.approx(V_AT_1, rel=1e-12)
    assert MODEL.directional_speed(g, np.pi) == pytest.approx(V_AT_M1, rel=1e-12)


@given(st.floats(min_value=0.0, max_value=2.0 * np.pi),
       st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=-2.0, max_value=2.0))
def test_directional_speed_periodic(theta, gx, gy):
    a = MODEL.directional_speed((gx, gy), theta)
    b = MODEL.directional_speed((gx, gy), theta + 2.0 * np.pi)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_constructor_validation():
    with pytest.raises(ParameterError):
        MobilityModel(v_amp=-1.0)
    with pytest.raises(ParameterError):
        MobilityModel(pen_scale=0.0)
    # non-default constants shift the peak accordingly
    m = MobilityModel(v_shift=4.0)
    assert m.velocity(-0.04) == pytest.approx(1.11, abs=1e-12)
