"""Periodic 1-D nuclear grid, scaled Fourier analysis, and wavefunction containers.

All operators in this package are dense matrices acting on value vectors
sampled on a periodic grid.  Inner products carry the quadrature weight dx,
so ``norm(w) = sqrt(sum |w|^2 dx)``.

Momentum convention: the lattice is ``k_j = 2*pi*j/L`` in standard FFT
ordering ``{0, 1, ..., n/2-1, -n/2, ..., -1}`` (times ``2*pi/L``), plane
waves are ``exp(+i*k*X)``, and the momentum operator is ``eps*(-i d/dX)``
with eigenvalue ``eps*k`` on ``exp(+i*k*X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid1D",
    "NuclearWave",
    "MolecularWave",
    "make_grid",
    "norm",
    "sobolev_norm",
    "spectral_derivative_matrix",
    "fourier_matrix",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [x_min, x_max) with 2^m points.

    Attributes
    ----------
    x : ndarray
        Grid points ``x_min + dx*j``, j = 0..n-1 (right endpoint excluded).
    k : ndarray
        Momentum lattice ``2*pi*fftfreq(n, dx)`` in FFT ordering.
    """

    x_min: float
    x_max: float
    n_points: int
    x: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.length

    def index_of(self, x0: float) -> int:
        """Index of the grid point closest to x0."""
        return int(np.argmin(np.abs(self.x - x0)))


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid1D:
    """Build a periodic grid; n_points must be a power of two >= 8."""
    if not x_max > x_min:
        raise ValueError(f"degenerate interval [{x_min}, {x_max}]")
    if n_points < 8 or (n_points & (n_points - 1)) != 0:
        raise ValueError(f"n_points must be a power of two >= 8, got {n_points}")
    dx = (x_max - x_min) / n_points
    x = x_min + dx * np.arange(n_points)
    k = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dx)
    return Grid1D(x_min=x_min, x_max=x_max, n_points=n_points, x=x, k=k)


@dataclass(frozen=True)
class NuclearWave:
    """Scalar wavefunction phi(X_i) of the nuclei at semiclassical parameter eps."""

    grid: Grid1D
    values: np.ndarray
    eps: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"values shape {v.shape} does not match grid ({self.grid.n_points},)")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite wavefunction values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class MolecularWave:
    """Fiber-valued wavefunction psi(X_i) in C^m, stored as an (n, m) array."""

    grid: Grid1D
    values: np.ndarray
    eps: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != self.grid.n_points:
            raise ValueError(f"values must be (n_points, m), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite wavefunction values")
        object.__setattr__(self, "values", v)

    @property
    def fiber_dim(self) -> int:
        return self.values.shape[1]

    def flat(self) -> np.ndarray:
        """Flattened (n*m,) vector, grid-major: entry i*m + a is component a at X_i."""
        return self.values.reshape(-1)


def norm(w: NuclearWave | MolecularWave) -> float:
    """L^2 norm with the quadrature weight dx (fiber components summed)."""
    return float(np.sqrt(np.sum(np.abs(w.values) ** 2) * w.grid.dx))


def _momentum_weights(w, order: int) -> float:
    """|| (eps k)^order phi ||, derivatives taken spectrally along X."""
    vals = w.values if w.values.ndim == 2 else w.values[:, None]
    ft = np.fft.fft(vals, axis=0) / np.sqrt(w.grid.n_points)
    weight = (w.eps * np.abs(w.grid.k)) ** order
    return float(np.sqrt(np.sum((weight[:, None] * np.abs(ft)) ** 2) * w.grid.dx))


def sobolev_norm(w: NuclearWave | MolecularWave, order: int) -> float:
    """Scaled Sobolev norm: ``||(eps d/dX)^order w|| + ||w||``, order 1 or 2.

    Order 1 uses eps*|d/dX|, order 2 uses eps^2*Laplacian, both spectral.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    return _momentum_weights(w, order) + norm(w)


def fourier_matrix(grid: Grid1D) -> np.ndarray:
    """Unitary DFT matrix F with (F psi)_k = sum_x e^{-i k x} psi(x)/sqrt(n)."""
    return np.exp(-1j * np.outer(grid.k, grid.x)) / np.sqrt(grid.n_points)


def spectral_derivative_matrix(grid: Grid1D) -> np.ndarray:
    """Dense matrix of -i d/dX on the periodic grid: F^dag diag(k) F.

    Hermitian, annihilates constants, and maps exp(i*k0*X) to k0*exp(i*k0*X)
    for every lattice mode k0.
    """
    F = fourier_matrix(grid)
    return F.conj().T @ (grid.k[:, None] * F)
