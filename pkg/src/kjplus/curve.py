"""Closed polygonal curves in the punctured plane."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Point2 = tuple[float, float]


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PolylineCurve:
    """A closed oriented polyline; ``vertices[-1]`` connects back to ``vertices[0]``.

    Vertices are stored as an ``(n, 2)`` float array and must not repeat the
    first vertex at the end.
    """

    vertices: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        v = np.array(self.vertices, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[1] != 2:
            raise CurveError(f"vertices must have shape (n, 2), got {v.shape}")
        if len(v) >= 2 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise CurveError("a closed curve needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise CurveError("vertices must be finite")
        if np.any(np.all(np.roll(v, -1, axis=0) == v, axis=1)):
            raise CurveError("consecutive vertices must be distinct")
        if np.any(np.all(v == 0.0, axis=1)):
            raise CurveError("a vertex lies exactly at the origin")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_complex(cls, z: np.ndarray, label: str = "") -> PolylineCurve:
        z = np.asarray(z, dtype=complex)
        return cls(np.column_stack([z.real, z.imag]), label=label)

    def as_complex(self) -> np.ndarray:
        return self.vertices[:, 0] + 1j * self.vertices[:, 1]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def diameter(self) -> float:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def reversed(self) -> PolylineCurve:
        return PolylineCurve(self.vertices[::-1], label=self.label)

    def transformed(
        self,
        rotation: float = 0.0,
        scale: float = 1.0,
        shift: Point2 = (0.0, 0.0),
    ) -> PolylineCurve:
        z = self.as_complex() * scale * np.exp(1j * rotation) + complex(*shift)
        return PolylineCurve.from_complex(z, label=self.label)

    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def radii(self) -> np.ndarray:
        return np.hypot(self.vertices[:, 0], self.vertices[:, 1])
