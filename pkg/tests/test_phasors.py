import cmath
import math

import numpy as np
import pytest

from corridormon.phasors import (
    angle_between_deg,
    angle_deg,
    from_polar,
    is_finite,
    to_polar,
)


def test_polar_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(200):
        mag = rng.uniform(1e-3, 50.0)
        ang = rng.uniform(-180.0, 180.0)
        value = from_polar(mag, ang)
        mag2, ang2 = to_polar(value)
        assert mag2 == pytest.approx(mag, rel=1e-12)
        assert ang2 == pytest.approx(ang, abs=1e-9)


def test_from_polar_degrees():
    assert from_polar(2.0, 90.0) == pytest.approx(2j)
    assert from_polar(1.0, -180.0) == pytest.approx(-1.0)


def test_angle_deg():
    assert angle_deg(1j) == pytest.approx(90.0)
    assert angle_deg(-1.0 + 0j) == pytest.approx(180.0)


def test_angle_between_wraps():
    """The relative angle must come out near zero, not near 360."""
    a = cmath.rect(1.0, math.radians(170.0))
    b = cmath.rect(1.0, math.radians(-170.0))
    assert angle_between_deg(a, b) == pytest.approx(-20.0)
    assert angle_between_deg(b, a) == pytest.approx(20.0)


def test_angle_between_magnitude_independent():
    assert angle_between_deg(5.0 + 0j, 0.25j) == pytest.approx(-90.0)


def test_is_finite():
    assert is_finite(1.0 - 2.0j)
    assert not is_finite(complex(float("nan"), 0.0))
    assert not is_finite(complex(0.0, float("inf")))
