"""
Observables: moments, stress tensor, entropy functionals, error norms.

All integrals are midpoint sums with weight dv^d (and dx for phase-space
fields).  Entropy integrands skip nodes where f <= 0 -- spectral solutions
are not positivity preserving -- and report how many nodes were skipped.
The stored H is the integral of f*log(f); the physical entropy is -H.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import VelocityGrid

RADIAL_ORDERS = (2, 4, 5, 6, 8)


@dataclass
class MomentSet:
    rho: float
    u: np.ndarray
    T: float
    P: np.ndarray
    radial: dict
    H: float
    neg_nodes: int
    degenerate: bool = False

    def temperature_components(self) -> np.ndarray:
        """Per-axis temperatures P_ii / rho."""
        return np.diag(self.P) / self.rho


def moments(values: np.ndarray, grid: VelocityGrid) -> MomentSet:
    """Density, mean velocity, temperature, stress, radial moments, entropy."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != grid.shape:
        raise ValueError(f"value shape {values.shape} does not match grid")
    w = grid.dv ** grid.d
    d = grid.d
    rho = w * float(values.sum())

    mesh = grid.velocity_mesh()
    r2 = grid.squared_speed()
    radial = {}
    for k in RADIAL_ORDERS:
        radial[k] = w * float(np.sum(r2 ** (k / 2.0) * values))
    pos = values > 0
    H = w * float(np.sum(values[pos] * np.log(values[pos])))
    neg = int(np.count_nonzero(values <= 0))

    if rho <= 0:
        return MomentSet(rho=rho, u=np.full(d, np.nan), T=np.nan,
                         P=np.full((d, d), np.nan), radial=radial, H=H,
                         neg_nodes=neg, degenerate=True)

    u = np.array([w * float(np.sum(mesh[ax] * values)) for ax in range(d)]) / rho
    P = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            P[i, j] = P[j, i] = w * float(
                np.sum((mesh[i] - u[i]) * (mesh[j] - u[j]) * values))
    T = float(np.trace(P)) / (d * rho)
    return MomentSet(rho=rho, u=u, T=T, P=P, radial=radial, H=H, neg_nodes=neg)


def error_norms(f_num: np.ndarray, f_ref: np.ndarray, p) -> float:
    """Relative discrete norm of f_num - f_ref against f_ref.

    E_p = (sum |f_num - f_ref|^p / sum |f_ref|^p)^(1/p); infinity uses the
    max-magnitude ratio.
    """
    f_num = np.asarray(f_num, dtype=np.float64)
    f_ref = np.asarray(f_ref, dtype=np.float64)
    if f_num.shape != f_ref.shape:
        raise ValueError("shapes differ")
    diff = np.abs(f_num - f_ref)
    if p in (np.inf, "inf"):
        denom = float(np.max(np.abs(f_ref)))
        if denom == 0:
            raise ValueError("reference norm is zero")
        return float(np.max(diff)) / denom
    if p not in (1, 2):
        raise ValueError(f"p must be 1, 2 or inf, got {p}")
    denom = float(np.sum(np.abs(f_ref) ** p))
    if denom == 0:
        raise ValueError("reference norm is zero")
    return float(np.sum(diff ** p) / denom) ** (1.0 / p)


@dataclass
class EntropyPair:
    """Relative entropies of a phase-space field.

    ``h_local`` is the entropy relative to the cell-wise Maxwellian,
    ``h_global`` relative to the Maxwellian built from the global moments,
    and ``hydro`` the hydrodynamic share int rho*log(rho/T) dx (2D form).
    With zero total momentum and energy normalized to the mass,
    h_global == h_local + hydro up to quadrature error, and
    h_local <= h_global always.
    """

    h_local: float
    h_global: float
    hydro: float
    neg_nodes: int
    mass: float = np.nan


@dataclass
class CellMoments:
    rho: np.ndarray
    u: np.ndarray          # (n_x, d)
    T: np.ndarray
    energy: np.ndarray     # int |v|^2 f dv per cell


def cell_moments(values: np.ndarray, grid: VelocityGrid) -> CellMoments:
    """Per-cell density, velocity, temperature for (n_x,) + grid.shape data."""
    w = grid.dv ** grid.d
    d = grid.d
    vaxes = tuple(range(1, 1 + d))
    rho = w * values.sum(axis=vaxes)
    if np.any(rho <= 0):
        raise ValueError("vanishing local density in some cell")
    mesh = grid.velocity_mesh()
    u = np.stack([w * (values * mesh[ax]).sum(axis=vaxes) / rho
                  for ax in range(d)], axis=1)
    e2 = w * (values * grid.squared_speed()).sum(axis=vaxes)
    T = (e2 / rho - np.sum(u ** 2, axis=1)) / d
    if np.any(T <= 0):
        raise ValueError("nonpositive local temperature in some cell")
    return CellMoments(rho=rho, u=u, T=T, energy=e2)


def relative_entropies(values: np.ndarray, grid: VelocityGrid,
                       dx: float) -> EntropyPair:
    """Entropy relative to the local and to the global Maxwellian.

    ``values`` has shape (n_x,) + grid.shape.  Nodes with f <= 0 contribute
    zero to both integrands and are counted.
    """
    values = np.asarray(values, dtype=np.float64)
    cm = cell_moments(values, grid)
    d = grid.d
    n_x = values.shape[0]
    L = n_x * dx
    w = grid.dv ** d

    mass = dx * float(np.sum(cm.rho))
    rho_bar = mass / L
    u_bar = dx * np.einsum("x,xi->i", cm.rho, cm.u) / mass
    e2_tot = dx * float(np.sum(cm.energy))
    T_bar = (e2_tot / mass - float(u_bar @ u_bar)) / d

    mesh = grid.velocity_mesh()
    dv2_local = np.zeros((n_x,) + grid.shape)
    dv2_global = np.zeros(grid.shape)
    for ax in range(d):
        ul = cm.u[:, ax].reshape((-1,) + (1,) * d)
        dv2_local = dv2_local + (mesh[ax] - ul) ** 2
        dv2_global = dv2_global + (mesh[ax] - u_bar[ax]) ** 2
    Tl = cm.T.reshape((-1,) + (1,) * d)
    rl = cm.rho.reshape((-1,) + (1,) * d)
    m_local = rl * (2 * np.pi * Tl) ** (-d / 2.0) * np.exp(-dv2_local / (2 * Tl))
    m_global = rho_bar * (2 * np.pi * T_bar) ** (-d / 2.0) \
        * np.exp(-dv2_global / (2 * T_bar))

    pos = values > 0
    f_pos = values[pos]
    h_local = dx * w * float(np.sum(f_pos * np.log(f_pos / m_local[pos])))
    mg = np.broadcast_to(m_global, values.shape)[pos]
    h_global = dx * w * float(np.sum(f_pos * np.log(f_pos / mg)))
    hydro = dx * float(np.sum(cm.rho * np.log(cm.rho / cm.T)))
    neg = int(np.count_nonzero(values <= 0))
    return EntropyPair(h_local=h_local, h_global=h_global, hydro=hydro,
                       neg_nodes=neg, mass=mass)


def l1_distance_to_global(values: np.ndarray, grid: VelocityGrid,
                          dx: float) -> float:
    """|| f - M_global ||_L1 over phase space, for the CKP lower bound.

    The Csiszar-Kullback-Pinsker inequality for total mass Lambda reads
    h_global >= ||f - M||_L1^2 / (2*Lambda).
    """
    values = np.asarray(values, dtype=np.float64)
    cm = cell_moments(values, grid)
    d = grid.d
    n_x = values.shape[0]
    L = n_x * dx
    mass = dx * float(np.sum(cm.rho))
    u_bar = dx * np.einsum("x,xi->i", cm.rho, cm.u) / mass
    e2_tot = dx * float(np.sum(cm.energy))
    T_bar = (e2_tot / mass - float(u_bar @ u_bar)) / d
    rho_bar = mass / L

    mesh = grid.velocity_mesh()
    dv2 = np.zeros(grid.shape)
    for ax in range(d):
        dv2 = dv2 + (mesh[ax] - u_bar[ax]) ** 2
    m_global = rho_bar * (2 * np.pi * T_bar) ** (-d / 2.0) \
        * np.exp(-dv2 / (2 * T_bar))
    w = grid.dv ** d
    return dx * w * float(np.sum(np.abs(values - m_global)))
