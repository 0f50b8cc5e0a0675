"""
Exact solutions and canonical initial data.

The 2D pseudo-Maxwell gas admits an exact self-similar relaxation solution
(the BKW solution) used as the accuracy benchmark; the other kinds cover the
anisotropic, discontinuous, and spatially perturbed test problems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .grid import VelocityGrid


def bkw_scale(t):
    """Self-similar scale S(t) = 1 - exp(-t/8)/2 of the 2D relaxation solution."""
    return 1.0 - 0.5 * np.exp(-np.asarray(t, dtype=np.float64) / 8.0)


def _bkw_from_r2(t, r2):
    S = bkw_scale(t)
    return np.exp(-r2 / (2.0 * S)) / (2.0 * np.pi * S * S) \
        * (2.0 * S - 1.0 + (1.0 - S) * r2 / (2.0 * S))


def bkw_2d(t, v):
    """Exact 2D Maxwell-gas relaxation density at time t >= 0.

    ``v`` is an array of velocities with the component axis last.
    """
    if np.any(np.asarray(t) < 0):
        raise ValueError("time must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    return _bkw_from_r2(t, np.sum(v * v, axis=-1))


def bkw_on_grid(t, grid: VelocityGrid) -> np.ndarray:
    if grid.d != 2:
        raise ValueError("the BKW benchmark solution is two-dimensional")
    return _bkw_from_r2(t, grid.squared_speed())


def _bkw_dt_from_r2(t, r2):
    # f = A(S) (B(S) + C(S) r^2) exp(-r^2/2S); differentiate along S(t)
    S = bkw_scale(t)
    Sdot = (1.0 - S) / 8.0
    A = 1.0 / (2.0 * np.pi * S * S)
    B = 2.0 * S - 1.0
    C = (1.0 - S) / (2.0 * S)
    E = np.exp(-r2 / (2.0 * S))
    dA = -2.0 * A / S
    dB = 2.0
    dC = -1.0 / (2.0 * S * S)
    poly = B + C * r2
    df_dS = E * (dA * poly + A * (dB + dC * r2) + A * poly * r2 / (2.0 * S * S))
    return Sdot * df_dS


def bkw_time_derivative(t, v):
    """Exact time derivative of the BKW solution (the collision term)."""
    v = np.asarray(v, dtype=np.float64)
    return _bkw_dt_from_r2(t, np.sum(v * v, axis=-1))


def bkw_time_derivative_on_grid(t, grid: VelocityGrid) -> np.ndarray:
    return _bkw_dt_from_r2(t, grid.squared_speed())


def maxwellian(rho, u, T, v, d):
    """Maxwellian density rho (2 pi T)^(-d/2) exp(-|v-u|^2 / 2T).

    ``v`` has the component axis last; ``u`` may be a scalar (isotropic
    shift) or a length-d vector.
    """
    if np.any(np.asarray(rho) < 0):
        raise ValueError("density must be nonnegative")
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    v = np.asarray(v, dtype=np.float64)
    u = np.broadcast_to(np.asarray(u, dtype=np.float64), (d,))
    dv2 = np.sum((v - u) ** 2, axis=-1)
    return rho * (2.0 * np.pi * T) ** (-d / 2.0) * np.exp(-dv2 / (2.0 * T))


def maxwellian_on_grid(grid: VelocityGrid, rho=1.0, u=0.0, T=1.0) -> np.ndarray:
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    u = np.broadcast_to(np.asarray(u, dtype=np.float64), (grid.d,))
    mesh = grid.velocity_mesh()
    dv2 = np.zeros(grid.shape)
    for ax in range(grid.d):
        dv2 = dv2 + (mesh[ax] - u[ax]) ** 2
    return rho * (2.0 * np.pi * T) ** (-grid.d / 2.0) * np.exp(-dv2 / (2.0 * T))


HOMOGENEOUS_KINDS = ("bkw2d", "bi_gaussian", "ball_indicator")
INHOMOGENEOUS_KINDS = ("perturbed_maxwellian", "perturbed_double_bump")


@dataclass(frozen=True)
class InitialCondition:
    """Named initial datum with its parameters.

    kinds: ``bkw2d``; ``bi_gaussian`` (two Gaussian bumps at +-v0, width
    sigma); ``ball_indicator`` (mollified and normalized to unit mass);
    ``perturbed_maxwellian`` (density wave 1 + A0*cos(2*pi*x/L) on the global
    equilibrium); ``perturbed_double_bump`` (the same wave on a two-bump
    velocity profile, far from equilibrium).
    """

    kind: str
    v0: tuple = ()
    sigma: float = 1.0
    v_th: float = np.sqrt(3.0) / 2.0
    A0: float = 0.1
    L: float = 2.0 * np.pi
    moll_width: float | None = None

    def __post_init__(self):
        if self.kind not in HOMOGENEOUS_KINDS + INHOMOGENEOUS_KINDS:
            raise ValueError(f"unknown initial-condition kind {self.kind!r}")

    @property
    def k0(self) -> float:
        """Perturbation wavenumber, 2*pi/L exactly."""
        return 2.0 * np.pi / self.L


def _bi_gaussian(grid: VelocityGrid, v0, sigma):
    v0 = np.asarray(v0, dtype=np.float64)
    if v0.shape != (grid.d,):
        raise ValueError(f"v0 must have {grid.d} components, got {v0!r}")
    half = 0.5 * maxwellian_on_grid(grid, 1.0, v0, sigma ** 2)
    other = 0.5 * maxwellian_on_grid(grid, 1.0, -v0, sigma ** 2)
    return half + other


def _mollified_ball(grid: VelocityGrid, width):
    """Indicator of the unit ball convolved with a Gaussian of std ``width``.

    The convolution has the closed form P(|Z| <= 1) for Z ~ N(v, width^2 I),
    a noncentral chi-square tail, so both resolutions sample the same smooth
    function.  The result is normalized to unit discrete mass.
    """
    r2 = grid.squared_speed()
    w2 = width ** 2
    vals = stats.ncx2.cdf(1.0 / w2, df=grid.d, nc=r2 / w2)
    mass = grid.dv ** grid.d * np.sum(vals)
    return vals / mass


def sample_initial(ic: InitialCondition, grid: VelocityGrid, x=None) -> np.ndarray:
    """Nodal sampling of an initial condition.

    Homogeneous kinds return an array of grid shape.  The spatially
    perturbed kinds require ``x`` (cell-center positions on [0, L]) and
    return shape ``(len(x),) + grid.shape``.
    """
    if ic.kind in HOMOGENEOUS_KINDS:
        if ic.kind == "bkw2d":
            return bkw_on_grid(0.0, grid)
        if ic.kind == "bi_gaussian":
            return _bi_gaussian(grid, ic.v0, ic.sigma)
        width = ic.moll_width if ic.moll_width is not None else 2.0 * grid.dv
        return _mollified_ball(grid, width)

    if x is None:
        raise ValueError(f"{ic.kind!r} needs the spatial grid positions x")
    x = np.asarray(x, dtype=np.float64)
    wave = 1.0 + ic.A0 * np.cos(ic.k0 * x)
    wave = wave.reshape((-1,) + (1,) * grid.d)
    if ic.kind == "perturbed_maxwellian":
        prof = maxwellian_on_grid(grid, 1.0, 0.0, 1.0)
    else:
        v0 = np.asarray(ic.v0 if ic.v0 else (0.5, 0.5), dtype=np.float64)
        mesh = grid.velocity_mesh()
        d2a = np.zeros(grid.shape)
        d2b = np.zeros(grid.shape)
        for ax in range(grid.d):
            d2a = d2a + (mesh[ax] - v0[ax]) ** 2
            d2b = d2b + (mesh[ax] + v0[ax]) ** 2
        vt2 = ic.v_th ** 2
        prof = (np.exp(-d2a / (2 * vt2)) + np.exp(-d2b / (2 * vt2))) \
            / (2.0 * np.pi * vt2)
    return wave * prof


def calibrate_collision_scale(collision_values: np.ndarray,
                              exact_rate_values: np.ndarray) -> float:
    """Least-squares scale c minimizing || c*Q - df/dt || over the grid.

    Used to pin the Maxwell-kernel strength from the exact relaxation rate
    of the BKW solution, which the reference data leaves implicit.
    """
    q = np.asarray(collision_values, dtype=np.float64).ravel()
    r = np.asarray(exact_rate_values, dtype=np.float64).ravel()
    denom = float(q @ q)
    if denom == 0.0:
        raise ValueError("collision term vanishes; cannot calibrate")
    return float(q @ r) / denom
