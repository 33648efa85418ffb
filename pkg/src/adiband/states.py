"""Initial-state families and their matched classical distributions.

Every constructor returns a (wave, ClassicalDensity) pair such that the
quantum expectations of Weyl observables converge to the classical ones as
eps -> 0.  The families converge at different rates:

* localized wave packets (coherent_state): sqrt(eps) in general; symmetric
  envelopes hide the sqrt(eps) moment term, the skewed preset exposes it;
* sharp momentum / sharp position: eps (the boosted preset makes the
  first-order term visible in the momentum moments);
* WKB states f e^{iS/eps}: at least sqrt(eps) (the standard polynomial
  observables converge faster).

Envelope presets are Schwartz-class, so the L^1 moment conditions needed
by the wave-packet estimates hold automatically.
"""

from __future__ import annotations

import numpy as np

from .electronic import BandData
from .grids import Grid1D, MolecularWave, NuclearWave
from .hamiltonians import u_star_map
from .semiclassics import ClassicalDensity

__all__ = [
    "envelope",
    "coherent_state",
    "sharp_momentum_state",
    "sharp_position_state",
    "wkb_state",
    "lift_to_band",
    "position_moments",
    "momentum_moments",
]


def envelope(name: str = "gaussian", **params):
    """Schwartz-class envelope presets on the rescaled coordinate u.

    'gaussian':       exp(-u^2/2)
    'gaussian_skew':  (1 + skew*u) exp(-u^2/2), skew default 0.5 (nonzero
                      first moment: exposes the sqrt(eps) packet rate)
    'boosted_gaussian': exp(i*boost*u) exp(-u^2/2) (nonzero momentum-frame
                      mean: exposes the eps rate of the sharp families)
    """
    if name == "gaussian":
        return lambda u: np.exp(-(u**2) / 2)
    if name == "gaussian_skew":
        c = params.get("skew", 0.5)
        return lambda u: (1 + c * u) * np.exp(-(u**2) / 2)
    if name == "boosted_gaussian":
        b = params.get("boost", 1.0)
        return lambda u: np.exp(1j * b * u) * np.exp(-(u**2) / 2)
    raise KeyError(f"unknown envelope {name!r}")


def _normalized(grid, values, eps):
    nrm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.dx)
    if nrm == 0:
        raise ValueError("zero state")
    return NuclearWave(grid, values / nrm, eps=eps)


def _check_position_clearance(grid, q0, clearance):
    if q0 - grid.x_min < clearance or grid.x_max - q0 < clearance:
        raise ValueError(
            f"center {q0} closer than {clearance:.3f} to the box edge; "
            "state would wrap around"
        )


def coherent_state(
    grid: Grid1D,
    eps: float,
    q0: float,
    p0: float,
    profile="gaussian",
    **profile_params,
):
    """Wave packet tracking the classical point (q0, p0).

    phi(X) = eps^{-1/4} e^{i p0 (X-q0)/eps} profile((X-q0)/sqrt(eps)),
    normalized.  The matched classical density is the point mass at
    (q0, p0).  Raises if the packet (5*sqrt(eps) halo) does not fit in the
    position or momentum window.
    """
    halo = 5 * np.sqrt(eps)
    _check_position_clearance(grid, q0, halo)
    p_max = eps * np.abs(grid.k).max()
    if abs(p0) + halo > p_max:
        raise ValueError(f"momentum center {p0} too close to the lattice edge {p_max:.3f}")
    prof = envelope(profile, **profile_params) if isinstance(profile, str) else profile
    u = (grid.x - q0) / np.sqrt(eps)
    vals = eps**-0.25 * np.exp(1j * p0 * (grid.x - q0) / eps) * np.asarray(prof(u), dtype=complex)
    wave = _normalized(grid, vals, eps)
    rho = ClassicalDensity(np.array([[q0, p0]]), np.array([1.0]))
    return wave, rho


def sharp_momentum_state(grid: Grid1D, eps: float, p0: float, profile=None, center=0.0, width=1.0):
    """Plane-wave-modulated envelope: sharp momentum, eps-independent density.

    phi(X) = e^{i p0 X / eps} g(X), classical density
    delta(p - p0) |g(q)|^2 dq dp.  The modulus of the state does not depend
    on eps; the scaled momentum concentrates at p0 at rate eps.
    """
    if profile is None:
        g = np.exp(-((grid.x - center) ** 2) / (2 * width**2)).astype(complex)
    else:
        g = np.asarray(profile(grid.x), dtype=complex)
    p_max = eps * np.abs(grid.k).max()
    if abs(p0) > 0.8 * p_max:
        raise ValueError(f"momentum {p0} too close to the lattice edge {p_max:.3f}")
    vals = np.exp(1j * p0 * grid.x / eps) * g
    wave = _normalized(grid, vals, eps)
    dens = np.abs(wave.values) ** 2 * grid.dx
    pts = np.column_stack([grid.x, np.full(grid.n_points, p0)])
    rho = ClassicalDensity(pts, dens)
    return wave, rho


def sharp_position_state(grid: Grid1D, eps: float, q0: float, width=1.0, n_cloud=129):
    """Position concentrating at rate eps with an eps-independent momentum density.

    phi(X) = eps^{-1/2} g((X-q0)/eps) with Gaussian g; classical density
    delta(q - q0) |g-hat(p)|^2 dp.  Requires the eps-thin feature to stay
    resolved by the grid.
    """
    if eps * width < 4 * grid.dx:
        raise ValueError(
            f"feature width {eps * width:.4f} under-resolved by the grid spacing {grid.dx}"
        )
    _check_position_clearance(grid, q0, 10 * eps * width)
    u = (grid.x - q0) / eps
    vals = eps**-0.5 * np.exp(-(u**2) / (2 * width**2))
    wave = _normalized(grid, vals.astype(complex), eps)
    # Fourier transform of the Gaussian envelope: width 1/width in p
    ps = np.linspace(-5 / width, 5 / width, n_cloud)
    w = np.exp(-(ps**2) * width**2)
    pts = np.column_stack([np.full(n_cloud, q0), ps])
    rho = ClassicalDensity(pts, w / w.sum())
    return wave, rho


def wkb_state(grid: Grid1D, eps: float, f, S, dS=None):
    """Oscillatory state f(X) e^{i S(X)/eps} on the Lagrangian graph p = S'(q).

    f and S must be real and periodic on the box (the phase may also wind
    by multiples of 2*pi*eps).  The classical density is the graph cloud
    {(X_i, S'(X_i))} weighted by the normalized f^2 dX.
    """
    fv = np.asarray(f(grid.x), dtype=float)
    Sv = np.asarray(S(grid.x), dtype=float)
    jump = abs(float(S(grid.x_max)) - float(S(grid.x_min)))
    winding = 2 * np.pi * eps
    if min(jump % winding, winding - (jump % winding)) > 1e-9 and jump > 1e-9:
        raise ValueError(
            f"phase function jumps by {jump:.3e} across the seam; "
            "not a multiple of 2*pi*eps"
        )
    wave = _normalized(grid, fv * np.exp(1j * Sv / eps), eps)
    if dS is not None:
        slope = np.asarray(dS(grid.x), dtype=float)
    else:
        ft = np.fft.fft(Sv)
        slope = np.fft.ifft(1j * grid.k * ft).real
    dens = np.abs(wave.values) ** 2 * grid.dx
    rho = ClassicalDensity(np.column_stack([grid.x, slope]), dens)
    return wave, rho


def lift_to_band(phi: NuclearWave, band: BandData, delta: float = 0.5) -> MolecularWave:
    """Embed a nuclear wave onto the tracked electronic band frame."""
    return u_star_map(phi, band, delta)


def position_moments(wave: NuclearWave | MolecularWave):
    """(mean, variance) of the position density."""
    dens = np.abs(wave.values) ** 2
    if dens.ndim == 2:
        dens = dens.sum(axis=1)
    dens = dens * wave.grid.dx
    dens = dens / dens.sum()
    mean = float(np.sum(wave.grid.x * dens))
    var = float(np.sum((wave.grid.x - mean) ** 2 * dens))
    return mean, var


def momentum_moments(wave: NuclearWave | MolecularWave):
    """(mean, variance) of the eps-scaled momentum density."""
    vals = wave.values if wave.values.ndim == 2 else wave.values[:, None]
    ft = np.fft.fft(vals, axis=0)
    dens = (np.abs(ft) ** 2).sum(axis=1)
    dens = dens / dens.sum()
    p = wave.eps * wave.grid.k
    mean = float(np.sum(p * dens))
    var = float(np.sum((p - mean) ** 2 * dens))
    return mean, var
