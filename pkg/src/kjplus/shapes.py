"""Hand-built test curves: standard curves K_j, worked examples, and the
combinatorial schematic of a T_{k,l}-type orbit."""

from __future__ import annotations

import numpy as np

from kjplus.curve import PolylineCurve
from kjplus.kepler import Direction, check_pair

CHAMFER = 1e-3
SCHEMATIC_SUBSTEPS = 8


def circle(radius: float = 1.0, n: int = 256, center: complex = 0j) -> PolylineCurve:
    t = 2 * np.pi * np.arange(n) / n
    return PolylineCurve.from_complex(center + radius * np.exp(1j * t), label="circle")


def figure_eight(n: int = 512, center: complex = 3.0) -> PolylineCurve:
    t = 2 * np.pi * np.arange(n) / n
    return PolylineCurve.from_complex(center + np.cos(t) + 0.5j * np.sin(2 * t), label="figure-eight")


def standard_curve(j: int, n_per_loop: int = 256) -> PolylineCurve:
    """K_j: figure eight for j=0, circle for j=1, otherwise a circle with
    j-1 small interior loops. Rotation number is j for j >= 1.

    For j >= 2 this is ``e^{it} + b e^{ijt}`` with ``b`` slightly above
    ``1/j``, which makes the fast term dominate the velocity so every
    inward bulge closes into a small loop.
    """
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return figure_eight(n_per_loop * 2)
    if j == 1:
        return circle(n=n_per_loop)
    n = n_per_loop * j
    t = 2 * np.pi * np.arange(n) / n
    b = 1.3 / j
    z = np.exp(1j * t) * (1 + b * np.exp(1j * (j - 1) * t))
    return PolylineCurve.from_complex(z, label=f"K_{j}")


def trefoil_shadow(n: int = 1536) -> PolylineCurve:
    """Three double points; windings 2 in the center, 1 in the petals."""
    t = 2 * np.pi * np.arange(n) / n
    return PolylineCurve.from_complex(
        (np.sin(t) + 2 * np.sin(2 * t)) + 1j * (np.cos(t) - 2 * np.cos(2 * t)), label="trefoil-shadow"
    )


def limacon(b: float = 0.75, n: int = 1024) -> PolylineCurve:
    """One interior loop; windings 1 and 2."""
    if b <= 0.5:
        raise ValueError("b must exceed 1/2 for an inner loop")
    t = 2 * np.pi * np.arange(n) / n
    return PolylineCurve.from_complex(np.exp(1j * t) + b * np.exp(2j * t) - 0.1, label="limacon")


def schematic_orbit(
    k: int,
    l: int,
    direction: Direction | str = Direction.DIRECT,
    *,
    r_inner: float = 1.0,
    r_outer: float = 2.0,
    chamfer: float = CHAMFER,
) -> PolylineCurve:
    """Piecewise-linear model of a T_{k,l}-type orbit below its loop threshold.

    Marked points sit on the rays at multiples of pi/k. Walking one step of
    pi/k moves one layer outward or inward, perihelion to aphelion in M
    steps, where M is |k - l| for direct orbits and k + l for retrograde
    ones. Points are joined by straight lines in the (angle, radius) chart;
    each corner is cut by a short chamfer so that strands meeting at a
    marked point cross transversally in the middle of their chamfers.
    """
    check_pair(k, l)
    direction = Direction.parse(direction)
    if direction is Direction.DIRECT:
        if k == l:
            raise ValueError("k = l has no direct schematic")
        m, sign = abs(k - l), (1 if l > k else -1)
    else:
        m, sign = k + l, 1
    steps = 2 * m * k
    s = np.arange(steps)
    p = s % (2 * m)
    height = np.where(p <= m, p, 2 * m - p)
    theta = sign * s * np.pi / k
    radius = r_inner + (r_outer - r_inner) * height / m
    pts = np.column_stack([theta, radius])

    prev = np.roll(pts, 1, axis=0)
    prev[0, 0] -= sign * 2 * np.pi * m
    nxt = np.roll(pts, -1, axis=0)
    nxt[-1, 0] += sign * 2 * np.pi * m
    before = pts + chamfer * (prev - pts)
    after = pts + chamfer * (nxt - pts)
    corners = np.empty((2 * steps, 2))
    corners[0::2] = before
    corners[1::2] = after

    # Subdivide the long chart segments so the polar image stays curved.
    chart = []
    for i in range(len(corners)):
        a = corners[i]
        b = corners[(i + 1) % len(corners)].copy()
        if i == len(corners) - 1:
            b[0] += sign * 2 * np.pi * m
        sub = SCHEMATIC_SUBSTEPS if i % 2 else 1
        f = np.arange(sub)[:, None] / sub
        chart.append(a + f * (b - a))
    chart = np.concatenate(chart)
    z = chart[:, 1] * np.exp(1j * chart[:, 0])
    return PolylineCurve.from_complex(z, label=f"schematic-{k}-{l}-{direction.value}")
