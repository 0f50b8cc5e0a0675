"""
Dense Fourier-Galerkin collision operator.

The quadratic mode system is

    Q_hat[k] = sum_{l+m=k} (beta(l, m) - beta(m, m)) f_hat[l] f_hat[m]

with kernel modes

    beta(l, m) = integral over B_R x S^(d-1) of
                 B(|g|) * exp(-i*kappa*(l+m).g + i*kappa*|g|*(l-m).omega)

where kappa = pi/(2*T_dom).  For VHS kernels the two angular integrals have
closed forms (a Bessel J0 factor in 2D, a sinc factor in 3D), leaving a 1D
radial integral that depends on (l, m) only through |l+m|^2 and |l-m|^2.
That pair compresses the table from O(N^2d) entries to a modest matrix.

Evaluating the double sum costs O(N^2d); this is the reference method the
fast decomposition is benchmarked against.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from . import cache_io
from .grid import SpectralField, VelocityGrid
from .kernels import VHSKernel, sphere_area

logger = logging.getLogger(__name__)

_MAX_QUAD_NODES = 16384


class QuadratureError(RuntimeError):
    """Radial quadrature failed to converge within the refinement budget."""


@dataclass
class ClassicalModesTable:
    """Compressed kernel modes beta(l, m) for the dense Galerkin sum.

    ``values[ia, ib]`` holds beta for the invariant pair
    (|l+m|^2, |l-m|^2) = (sq_vals[ia], sq_vals[ib]).  The matrix is
    symmetric, which encodes both beta(l, m) == beta(m, l) and the exact
    cancellation that conserves mass.
    """

    grid: VelocityGrid
    kernel: VHSKernel
    R: float
    sq_vals: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    quad_nodes: int = 0

    def __post_init__(self):
        object.__setattr__(self, "_diag_cache", None)

    def lookup(self, a, b) -> np.ndarray:
        """beta for integer invariants a = |l+m|^2, b = |l-m|^2."""
        ia = np.searchsorted(self.sq_vals, a)
        ib = np.searchsorted(self.sq_vals, b)
        return self.values[ia, ib]

    def beta(self, l, m) -> complex:
        l = np.asarray(l, dtype=np.int64)
        m = np.asarray(m, dtype=np.int64)
        a = int(np.sum((l + m) ** 2))
        b = int(np.sum((l - m) ** 2))
        return complex(self.lookup(a, b))

    def diag_shifted(self) -> np.ndarray:
        """beta(m, m) over the shifted (natural-order) mode grid."""
        if self._diag_cache is None:
            n, N = self.grid.n_v, self.grid.n_v // 2
            mv = np.arange(n, dtype=np.int64) - N
            sq = 0
            for ax in range(self.grid.d):
                shape = (1,) * ax + (n,) + (1,) * (self.grid.d - 1 - ax)
                sq = sq + mv.reshape(shape) ** 2
            self._diag_cache = self.lookup(4 * sq, np.zeros_like(sq))
        return self._diag_cache

    def scaled(self, factor: float) -> "ClassicalModesTable":
        return ClassicalModesTable(
            grid=self.grid, kernel=self.kernel.scaled(factor), R=self.R,
            sq_vals=self.sq_vals, values=self.values * factor,
            quad_nodes=self.quad_nodes,
        )

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _square_norm_values(n_v: int, d: int) -> np.ndarray:
    """Sorted |u|^2 values over u in [-n_v, n_v-1]^d (covers l+m and l-m)."""
    comps = np.arange(-n_v, n_v, dtype=np.int64) ** 2
    vals = comps
    for _ in range(d - 1):
        vals = np.unique(np.add.outer(vals, comps))
    return np.unique(vals)


def _radial_matrix(sq_vals, R, kappa, d, gamma, n_q):
    """V[ia, ib] = int_0^R r^(d-1+gamma) Om(r*kappa*sqrt(a)) Om(r*kappa*sqrt(b)) dr."""
    x, w = np.polynomial.legendre.leggauss(n_q)
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * w * r ** (d - 1 + gamma)
    arg = np.multiply.outer(r, kappa * np.sqrt(sq_vals.astype(np.float64)))
    if d == 2:
        J = special.j0(arg)
    else:
        J = np.sinc(arg / np.pi)  # sin(x)/x
    return (J * wr[:, None]).T @ J


def compute_classical_modes(grid: VelocityGrid, kernel: VHSKernel, R: float,
                            cache_dir=None, tol: float = 1e-8) -> ClassicalModesTable:
    """Precompute kernel modes for the dense Galerkin sum.

    The radial quadrature is refined (node doubling) until the largest
    relative change over the whole table is below ``tol``.  Results are
    optionally cached on disk keyed by (d, gamma, C, n_v, R, T_dom).
    """
    if not R > 0:
        raise ValueError(f"truncation radius must be positive, got {R}")
    header = cache_io.CacheHeader(cache_io.REP_CLASSICAL, grid.d, grid.n_v,
                                  kernel.gamma, kernel.C, float(R), grid.T_dom)
    cache_path = None
    if cache_dir is not None:
        cache_path = Path(cache_dir) / cache_io.classical_cache_name(header)
        if cache_path.exists():
            try:
                sq_vals, V = cache_io.load_classical(cache_path, header)
                return ClassicalModesTable(grid, kernel, float(R), sq_vals, V)
            except cache_io.CacheMismatchError as exc:
                logger.warning("ignoring stale cache %s: %s", cache_path, exc)

    sq_vals = _square_norm_values(grid.n_v, grid.d)
    kappa = np.pi / (2.0 * grid.T_dom)
    # phase across [0, R] of the most oscillatory integrand sets the budget
    max_phase = 2.0 * R * kappa * np.sqrt(float(sq_vals[-1]))
    n_q = max(64, int(0.75 * max_phase) + 32)

    prefactor = kernel.C * sphere_area(grid.d) ** 2
    V = prefactor * _radial_matrix(sq_vals, R, kappa, grid.d, kernel.gamma, n_q)
    while True:
        n_next = 2 * n_q
        V2 = prefactor * _radial_matrix(sq_vals, R, kappa, grid.d, kernel.gamma, n_next)
        diff = np.abs(V2 - V)
        err = np.max(diff) / max(np.max(np.abs(V2)), 1e-300)
        V, n_q = V2, n_next
        if err <= tol:
            break
        if 2 * n_q > _MAX_QUAD_NODES:
            ia, ib = np.unravel_index(np.argmax(diff), diff.shape)
            raise QuadratureError(
                f"radial quadrature did not reach tol={tol} within "
                f"{_MAX_QUAD_NODES} nodes; worst invariant class "
                f"(|l+m|^2, |l-m|^2) = ({sq_vals[ia]}, {sq_vals[ib]})"
            )

    # bitwise symmetry => exact mass cancellation in the k=0 sum
    V = 0.5 * (V + V.T)
    V = V.astype(np.complex128)
    table = ClassicalModesTable(grid, kernel, float(R), sq_vals, V, quad_nodes=n_q)
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_io.save_classical(cache_path, header, sq_vals, V)
        logger.info("cached classical modes at %s (%d nodes)", cache_path, n_q)
    return table


def apply_classical(table: ClassicalModesTable, fhat: SpectralField) -> SpectralField:
    """Dense O(N^2d) evaluation of the collision mode system.

    The sum runs over exact mode pairs l + m = k with all three in the
    truncated set (no circular wrap-around), so the zero mode of the output
    vanishes to machine precision.
    """
    grid = table.grid
    if fhat.grid != grid:
        raise ValueError("spectral field and modes table use different grids")
    d, n = grid.d, grid.n_v
    N = n // 2
    vaxes = tuple(range(-d, 0))

    fs = np.fft.fftshift(fhat.coeffs, axes=vaxes)
    if fs.ndim != d:
        raise ValueError("apply_classical expects an unbatched field")
    diag = table.diag_shifted()
    sq_vals = table.sq_vals
    V = table.values
    mv = np.arange(n, dtype=np.int64) - N

    Q = np.zeros_like(fs)
    for l_idx in itertools.product(*([range(n)] * d)):
        fl = fs[l_idx]
        if fl == 0:
            continue
        lv = [i - N for i in l_idx]
        m_slices = tuple(
            slice(max(0, -lc), min(n, n - lc)) for lc in lv
        )
        k_slices = tuple(
            slice(s.start + lc, s.stop + lc) for s, lc in zip(m_slices, lv)
        )
        a_sq = 0
        b_sq = 0
        for ax in range(d):
            mwin = mv[m_slices[ax]]
            shape = (1,) * ax + (mwin.size,) + (1,) * (d - 1 - ax)
            a_sq = a_sq + ((lv[ax] + mwin) ** 2).reshape(shape)
            b_sq = b_sq + ((lv[ax] - mwin) ** 2).reshape(shape)
        ia = np.searchsorted(sq_vals, a_sq)
        ib = np.searchsorted(sq_vals, b_sq)
        row = V[ia, ib] - diag[m_slices]
        Q[k_slices] += (fl * fs[m_slices]) * row

    return SpectralField(grid, np.fft.ifftshift(Q, axes=vaxes))
