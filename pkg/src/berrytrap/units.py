"""The single Hz/degree <-> internal-unit conversion layer.

Everything inside the library works in radians and angular frequencies
(rad/s) with hbar = 1.  The CLI accepts angles in degrees and frequencies
in Hz and converts exactly once, through these helpers.
"""
import math

__all__ = ["hz_to_rad", "rad_to_hz", "deg_to_rad", "rad_to_deg"]


def hz_to_rad(f):
    return 2.0 * math.pi * f


def rad_to_hz(w):
    return w / (2.0 * math.pi)


def deg_to_rad(d):
    return math.radians(d)


def rad_to_deg(r):
    return math.degrees(r)
