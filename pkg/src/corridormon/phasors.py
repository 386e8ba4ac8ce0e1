"""Small helpers for complex per-unit phasors.

A phasor is a plain ``complex``: the real and imaginary parts are the
rectangular per-unit components.  Angles cross the API boundary in degrees;
everything internal works in radians via :mod:`cmath`.
"""

from __future__ import annotations

import cmath
import math

Phasor = complex


def from_polar(magnitude: float, angle_deg: float) -> complex:
    """Build a phasor from a magnitude and an angle in degrees."""
    return cmath.rect(magnitude, math.radians(angle_deg))


def to_polar(value: complex) -> tuple[float, float]:
    """Return ``(magnitude, angle_deg)`` for a phasor."""
    return abs(value), math.degrees(cmath.phase(value))


def angle_deg(value: complex) -> float:
    return math.degrees(cmath.phase(value))


def angle_between_deg(a: complex, b: complex) -> float:
    """Angle of ``a`` relative to ``b`` in degrees, wrapped to (-180, 180]."""
    return math.degrees(cmath.phase(a * b.conjugate()))


def is_finite(value: complex) -> bool:
    return math.isfinite(value.real) and math.isfinite(value.imag)
