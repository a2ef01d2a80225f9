"""Curve surgery and random curves shared by the property tests."""

import numpy as np

from kjplus.curve import PolylineCurve


def smooth_closed(coeffs: np.ndarray, n: int = 1200, shift: complex = 0j) -> PolylineCurve:
    """Trigonometric polynomial sum_m c_m e^{imt}, m = -M..M."""
    m = np.arange(len(coeffs)) - len(coeffs) // 2
    t = 2 * np.pi * np.arange(n) / n
    z = np.exp(1j * np.outer(t, m)) @ coeffs + shift
    return PolylineCurve.from_complex(z)


def insert_loop(curve: PolylineCurve, index: int, size: float, left: bool, lam: float = 2.0) -> PolylineCurve:
    """Replace a short stretch around vertex ``index`` by a prolate-trochoid kink.

    The kink bulges to the left of the direction of travel when ``left``
    is true, otherwise to the right, and crosses itself once.
    """
    z = curve.as_complex()
    n = len(z)
    z = np.roll(z, -index)
    p = z[0]
    tangent = z[1] - z[-1]
    tangent /= abs(tangent)
    normal = 1j * tangent if left else -1j * tangent
    half = np.pi * size
    keep = np.abs(z - p) > 1.2 * half
    # drop the stretch around p, which is contiguous at the start and end after rolling
    first = np.argmax(keep)
    last = n - np.argmax(keep[::-1])
    s = np.linspace(-np.pi, np.pi, 200)
    x = s - lam * np.sin(s)
    y = lam * (1 + np.cos(s)) / 2
    kink = p + size * (x * tangent + y * normal)
    body = z[first:last]
    return PolylineCurve.from_complex(np.concatenate([kink, body]))
