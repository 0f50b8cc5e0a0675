"""
Velocity grids, periodic Fourier transforms, and dealiasing parameters.

The velocity domain is the periodic box ``[-T_dom, T_dom]^d`` sampled on a
uniform grid with an even number of points per direction.  Mode coefficients
use the convention

    f_hat[k] = (2*T_dom)**(-d) * integral( f(v) * exp(-i*pi*k.v/T_dom) dv )

so the zero mode equals the mean of ``f`` over the box.  Modes are stored in
standard FFT order, ``k in {0, 1, ..., n/2-1, -n/2, ..., -1}`` per axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

SQRT2 = float(np.sqrt(2.0))

#: ratio T_min / S required so periodized collisions do not alias back
#: onto the support of the solution
DEALIAS_BOX_FACTOR = (3.0 + SQRT2) / 2.0


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform periodic velocity grid on ``[-T_dom, T_dom]^d``.

    Parameters
    ----------
    d : int
        Velocity dimension, 2 or 3.
    n_v : int
        Points per direction; must be even and >= 8.
    T_dom : float
        Half-length of the box.
    """

    d: int
    n_v: int
    T_dom: float

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.d}")
        if self.n_v < 8 or self.n_v % 2 != 0:
            raise ValueError(f"n_v must be even and >= 8, got {self.n_v}")
        if not self.T_dom > 0:
            raise ValueError(f"T_dom must be positive, got {self.T_dom}")
        n = self.n_v
        modes = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
        # grid-offset phase: nodes start at -T_dom, not 0
        phase1d = np.where(modes % 2 == 0, 1.0, -1.0)
        phase = phase1d
        for _ in range(self.d - 1):
            phase = np.multiply.outer(phase, phase1d)
        object.__setattr__(self, "_modes1d", modes)
        object.__setattr__(self, "_phase", phase)

    @property
    def dv(self) -> float:
        return 2.0 * self.T_dom / self.n_v

    @property
    def n_modes(self) -> int:
        return self.n_v ** self.d

    @property
    def shape(self) -> tuple:
        return (self.n_v,) * self.d

    def nodes_1d(self) -> np.ndarray:
        """Node coordinates along one axis: v_i = -T_dom + i*dv."""
        return -self.T_dom + self.dv * np.arange(self.n_v)

    def modes_1d(self) -> np.ndarray:
        """Integer mode numbers along one axis, FFT order."""
        return self._modes1d.copy()

    def velocity_mesh(self) -> tuple:
        """d-tuple of broadcastable node-coordinate arrays."""
        x = self.nodes_1d()
        return tuple(
            x.reshape((1,) * ax + (self.n_v,) + (1,) * (self.d - 1 - ax))
            for ax in range(self.d)
        )

    def squared_speed(self) -> np.ndarray:
        mesh = self.velocity_mesh()
        out = np.zeros(self.shape)
        for comp in mesh:
            out = out + comp ** 2
        return out

    def mode_mesh(self) -> tuple:
        """d-tuple of broadcastable integer mode arrays, FFT order."""
        k = self._modes1d
        return tuple(
            k.reshape((1,) * ax + (self.n_v,) + (1,) * (self.d - 1 - ax))
            for ax in range(self.d)
        )


@dataclass
class SpectralField:
    """Fourier coefficients of a (possibly batched) field on a VelocityGrid.

    ``coeffs`` has shape ``(..., n_v, ..., n_v)`` with the trailing ``d`` axes
    in FFT mode order.  For real physical fields the coefficients are
    Hermitian-symmetric: ``f_hat[-k] == conj(f_hat[k])``.
    """

    grid: VelocityGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.coeffs.shape[-self.grid.d:] != self.grid.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid "
                f"{self.grid.shape}"
            )
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)

    @property
    def zero_mode(self):
        return self.coeffs[(..., ) + (0,) * self.grid.d]

    def hermitian_defect(self) -> float:
        """Max deviation from f_hat[-k] == conj(f_hat[k]) over all modes."""
        c = self.coeffs
        axes = tuple(range(c.ndim - self.grid.d, c.ndim))
        rev = c
        for ax in axes:
            rev = np.roll(np.flip(rev, axis=ax), 1, axis=ax)
        return float(np.max(np.abs(rev - np.conj(c))))

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())


class FourierPlan:
    """Forward/inverse transform pair for one grid.

    Construction precomputes the node-offset phase; ``forward`` and
    ``inverse`` are pure and safe to call concurrently on distinct buffers.
    A plan can be swapped for another FFT provider by reimplementing these
    two methods.
    """

    def __init__(self, grid: VelocityGrid, workers: int | None = None):
        self.grid = grid
        self._axes = tuple(range(-grid.d, 0))
        self._norm = float(grid.n_v ** grid.d)
        self._workers = workers

    def forward(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        if values.shape[-self.grid.d:] != self.grid.shape:
            raise ValueError(
                f"value shape {values.shape} does not match grid {self.grid.shape}"
            )
        fk = sp_fft.fftn(values, axes=self._axes, workers=self._workers)
        return fk * (self.grid._phase / self._norm)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs)
        if coeffs.shape[-self.grid.d:] != self.grid.shape:
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match grid "
                f"{self.grid.shape}"
            )
        out = sp_fft.ifftn(coeffs * self.grid._phase, axes=self._axes,
                           workers=self._workers)
        return out * self._norm


_PLAN_CACHE: dict = {}


def get_plan(grid: VelocityGrid) -> FourierPlan:
    key = (grid.d, grid.n_v, grid.T_dom)
    plan = _PLAN_CACHE.get(key)
    if plan is None:
        plan = FourierPlan(grid)
        _PLAN_CACHE[key] = plan
    return plan


def build_grid(d: int, n_v: int, T_dom: float) -> VelocityGrid:
    """Validate arguments and build a velocity grid."""
    return VelocityGrid(d=int(d), n_v=int(n_v), T_dom=float(T_dom))


def forward_transform(grid: VelocityGrid, values: np.ndarray) -> SpectralField:
    """Nodal values -> mode coefficients (supports leading batch axes)."""
    return SpectralField(grid, get_plan(grid).forward(values))


def inverse_transform(fld: SpectralField, real: bool = True) -> np.ndarray:
    """Mode coefficients -> nodal values.

    Physical fields in this package are real; by default the (machine-level)
    imaginary residue of the inverse transform is dropped.
    """
    out = get_plan(fld.grid).inverse(fld.coeffs)
    return out.real if real else out


@dataclass(frozen=True)
class TruncationParams:
    """Dealiasing parameters tied to a support radius S.

    For solutions supported in the ball of radius S, relative velocities are
    truncated at R and the periodic box must satisfy T_dom >= T_min so the
    periodized collision term sees no spurious images.
    """

    S: float
    R: float
    T_min: float
    representation: str


def dealias_params(S: float, representation: str) -> TruncationParams:
    """Truncation radius and minimal box size for a given support radius.

    ``representation`` selects the collision-integral parametrization:
    ``"classical"`` truncates relative velocities at R = 2S, ``"carleman"``
    at R = sqrt(2)*S.  Both need T_dom >= (3 + sqrt(2))*S/2.
    """
    if not S > 0:
        raise ValueError(f"support radius must be positive, got {S}")
    if representation == "classical":
        R = 2.0 * S
    elif representation == "carleman":
        R = SQRT2 * S
    else:
        raise ValueError(f"unknown representation {representation!r}")
    return TruncationParams(S=float(S), R=R, T_min=DEALIAS_BOX_FACTOR * S,
                            representation=representation)


def support_radius_for_box(T_dom: float) -> float:
    """Largest support radius S admissible for a box of half-length T_dom."""
    return 2.0 * T_dom / (3.0 + SQRT2)


def pad_spectral(coeffs: np.ndarray, grid: VelocityGrid, factor: int = 2) -> np.ndarray:
    """Embed mode coefficients into a finer grid's (zero-filled) mode array."""
    d = grid.d
    n = grid.n_v
    fine = factor * n
    idx = grid.modes_1d() % fine
    out_shape = coeffs.shape[:-d] + (fine,) * d
    out = np.zeros(out_shape, dtype=np.complex128)
    out[(Ellipsis,) + np.ix_(*([idx] * d))] = coeffs
    return out


def truncate_spectral(fine_coeffs: np.ndarray, grid: VelocityGrid, factor: int = 2) -> np.ndarray:
    """Extract this grid's mode window from a finer grid's mode array."""
    d = grid.d
    fine = factor * grid.n_v
    idx = grid.modes_1d() % fine
    return fine_coeffs[(Ellipsis,) + np.ix_(*([idx] * d))]
