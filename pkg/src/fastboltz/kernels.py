"""Variable-hard-spheres collision kernels B(g) = C * |g|**gamma."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VHSKernel:
    """Power-law collision kernel.

    gamma = 0 is the pseudo-Maxwell gas (collision rate independent of the
    relative speed); gamma = 1 in three dimensions is the hard-spheres gas.
    """

    gamma: float
    C: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not self.C > 0:
            raise ValueError(f"kernel strength must be positive, got {self.C}")

    @property
    def is_maxwell(self) -> bool:
        return self.gamma == 0.0

    def scaled(self, factor: float) -> "VHSKernel":
        return VHSKernel(gamma=self.gamma, C=self.C * factor)

    def total_rate(self, g, d: int):
        """sigma-integrated kernel: C * |g|**gamma * |S^(d-1)|."""
        return self.C * np.asarray(g) ** self.gamma * sphere_area(d)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^(d-1)."""
    if d == 2:
        return 2.0 * np.pi
    if d == 3:
        return 4.0 * np.pi
    raise ValueError(f"dimension must be 2 or 3, got {d}")
