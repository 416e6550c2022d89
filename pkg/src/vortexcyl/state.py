"""Phase-space points for the two Hamiltonian charts.

The momentum chart carries the body triple (A, Lx, Ly); the velocity chart
carries (Omega, Vx, Vy). Vortex positions are body-frame and identical in
both charts. Flat layout is (body triple, X1, Y1, ..., XN, YN).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

MOMENTUM = "momentum"
VELOCITY = "velocity"

# Short aliases accepted anywhere a chart tag is read (CLI flags, configs).
CHART_ALIASES = {
    "momentum": MOMENTUM,
    "velocity": VELOCITY,
    "smbk": MOMENTUM,
    "bmr": VELOCITY,
}

__all__ = ["MOMENTUM", "VELOCITY", "CHART_ALIASES", "canonical_chart", "ChartState"]


def canonical_chart(tag: str) -> str:
    try:
        return CHART_ALIASES[tag.lower()]
    except KeyError:
        raise ValueError(f"unknown chart {tag!r}; expected one of {sorted(CHART_ALIASES)}") from None


@dataclass(frozen=True)
class ChartState:
    """A phase point in one chart: body triple plus body-frame vortex positions."""

    chart: str
    body: FloatArray = field(default_factory=lambda: np.zeros(3))
    positions: FloatArray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self) -> None:
        object.__setattr__(self, "chart", canonical_chart(self.chart))
        object.__setattr__(self, "body", np.asarray(self.body, dtype=np.float64).reshape(3))
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=np.float64).reshape(-1, 2))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return 3 + 2 * self.n

    def flat(self) -> FloatArray:
        return np.concatenate([self.body, self.positions.reshape(-1)])

    @classmethod
    def from_flat(cls, chart: str, z: FloatArray) -> "ChartState":
        z = np.asarray(z, dtype=np.float64).reshape(-1)
        if z.size < 3 or (z.size - 3) % 2:
            raise ValueError("flat state must have length 3 + 2N")
        return cls(chart, z[:3], z[3:].reshape(-1, 2))

    def replace(self, body: FloatArray | None = None, positions: FloatArray | None = None) -> "ChartState":
        return ChartState(
            self.chart,
            self.body if body is None else body,
            self.positions if positions is None else positions,
        )
