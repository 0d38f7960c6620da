"""Phase transfer functions, their point-spread kernels, and edge responses.

The DPC phase transfer function along one axis is

    H(f) = i * A * (P conv Q)(f)

with P the binary objective pupil, Q the antisymmetrized illumination, and
A the energy normalization: A = 1/rms(P conv Q) over the grid, which gives
the spatial kernel ifft(H) unit L2 energy (mean |H|^2 = 1). Normalizing the
filter's energy rather than its peak keeps the scale of H independent of
both grid resolution and source discretization density, and it is the scale
the solver's quadratic splitting weights (alpha0 = beta0 = 1) are calibrated
against. H is pure imaginary, odd under index negation, and supported inside
|f| < 2NA/lambda; the pupil builder's Nyquist guard makes the FFT circular
convolution here equal to the continuous one, so the band limit is exact
rather than approximate.

ptf_direct evaluates the same quantity as an explicit double sum over source
and frequency bins with analytic disk membership, sharing no code with the
FFT path; it exists as the independent cross-check and is O(N^4).

The kernel ifft(H) is a real, odd, oriented edge detector: its response to a
sign step peaks on the step line when the step direction matches theta0 and
vanishes for the orthogonal orientation.
"""

from dataclasses import dataclass

import numpy as np

from .core import FrequencyGrid, forward_transform, inverse_transform
from .pupils import IlluminationPupil, PupilMask, SourcePattern
from .validation import check_same_grid

__all__ = [
    "TransferFunction",
    "PsfKernel",
    "ptf",
    "ptf_direct",
    "psf",
    "edge_step",
    "edge_response",
]


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """One axis's phase transfer function H (complex, DFT order).

    norm_a is the energy normalization A actually applied; 0 marks the
    degenerate all-zero illumination.
    """

    grid: FrequencyGrid
    data: np.ndarray
    theta0: float
    norm_a: float


@dataclass(frozen=True, eq=False)
class PsfKernel:
    """Real spatial kernel of a transfer function (DFT order, r=0 at [0,0])."""

    grid: FrequencyGrid
    data: np.ndarray
    theta0: float


def _energy_norm(conv):
    """A = 1/rms(conv), making mean |A conv|^2 = 1; 0 for a vanished pattern."""
    rms = np.sqrt(np.mean(conv ** 2))
    return 1.0 / rms if rms > 0 else 0.0


def ptf(pupil, illum, theta0=None):
    """Phase transfer function H = i A (P conv Q) via FFT circular convolution.

    Parameters
    ----------
    pupil : PupilMask
    illum : IlluminationPupil
        Antisymmetrized illumination pattern Q.
    theta0 : float, optional
        Axis angle stored on the result; defaults to 0.0.
    """
    check_same_grid(pupil, illum, "pupil and illumination")
    theta0 = 0.0 if theta0 is None else float(theta0)
    q = np.asarray(illum.data, dtype=np.float64)
    conv = inverse_transform(
        forward_transform(pupil.data) * forward_transform(q)
    ).real
    a = _energy_norm(conv)
    data = 1j * (a * conv)
    return TransferFunction(grid=pupil.grid, data=data, theta0=theta0, norm_a=a)


def ptf_direct(pupil, src):
    """Direct double-sum evaluation of the transfer function (oracle path).

    H(f) = i A sum_rho m(rho) [P(f - rho) - P(f + rho)], m = q * P, with P
    evaluated analytically as |v| < NA/lambda at every (off-grid) argument.
    No FFTs are involved. Quadratic in the number of grid bins; intended for
    small grids.
    """
    check_same_grid(pupil, src, "pupil and source")
    grid = pupil.grid
    cutoff = pupil.na / pupil.lambda_um
    inside = grid.f_radius < cutoff
    m = np.asarray(src.data, dtype=np.float64) * inside
    fx, fy = grid.f_x, grid.f_y
    acc = np.zeros(grid.shape, dtype=np.float64)
    iy, ix = np.nonzero(m)
    for k in range(iy.size):
        rho_x = fx[iy[k], ix[k]]
        rho_y = fy[iy[k], ix[k]]
        minus = np.hypot(fx - rho_x, fy - rho_y) < cutoff
        plus = np.hypot(fx + rho_x, fy + rho_y) < cutoff
        acc += m[iy[k], ix[k]] * (minus.astype(np.float64) - plus)
    a = _energy_norm(acc)
    return TransferFunction(grid=grid, data=1j * (a * acc),
                            theta0=src.theta0, norm_a=a)


def psf(tf, tol=1e-12):
    """Spatial kernel of a transfer function: real part of ifft(H).

    A pure-imaginary odd H has an exactly real, odd inverse transform; any
    imaginary residue beyond tol (relative to the kernel peak) means the
    input violated those invariants, and is rejected.
    """
    kernel = inverse_transform(tf.data)
    scale = np.abs(kernel.real).max() or 1.0
    residue = np.abs(kernel.imag).max()
    if residue > tol * scale:
        raise ValueError(
            f"kernel has imaginary residue {residue:.3g} (relative "
            f"{residue / scale:.3g}); transfer function is not pure-imaginary odd"
        )
    return PsfKernel(grid=tf.grid, data=kernel.real.copy(), theta0=tf.theta0)


def edge_step(grid, edge_angle):
    """Periodic two-strip sign step: +1 where the folded projection is >= 0.

    The step direction (surface normal) is edge_angle; the edge line through
    the origin runs along (-sin a, cos a). On a periodic grid the pattern
    necessarily has a second, wraparound transition half a period away. For
    axis and diagonal orientations the projection x cos(a) + y sin(a) is
    folded by its exact lattice period first, so both transitions run
    parallel to the edge; a plain sign of the projection would instead seam
    along the coordinate wrap, and those seams are themselves steps of the
    wrong orientation. Orientations whose strips cannot tile the periodic
    cell are left unfolded and keep the unavoidable wrap seams. Projections
    within numerical dust of a transition count as on it (trig dust at
    special angles would otherwise split the line by sign).
    """
    c, s = np.cos(edge_angle), np.sin(edge_angle)
    proj = grid.x_um * c + grid.y_um * s
    # projections of the two lattice periods onto the edge normal
    px = grid.width * grid.dx_um * abs(c)
    py = grid.height * grid.dx_um * abs(s)
    scale = max(px, py)
    if py <= 1e-9 * scale:
        period = px
    elif px <= 1e-9 * scale:
        period = py
    elif abs(px - py) <= 1e-9 * scale:
        period = px
    else:
        period = None
    if period is None:
        # oblique: strips cannot tile the cell, wrap seams are unavoidable
        eps = 1e-9 * np.abs(proj).max()
        return np.where(proj >= -eps, 1.0, -1.0)
    # strip index along the normal (transitions at half-period multiples);
    # even strips are +1. Bins within dust of a transition snap onto it so
    # trig roundoff cannot split a transition line by sign.
    t = 2.0 * proj / period
    r = np.round(t)
    k = np.where(np.abs(t - r) <= 1e-9, r, np.floor(t))
    return np.where(k % 2.0 == 0.0, 1.0, -1.0)


def edge_response(kernel, edge_angle):
    """Magnitude of the kernel's periodic convolution with an oriented step."""
    u = edge_step(kernel.grid, edge_angle)
    conv = inverse_transform(forward_transform(kernel.data) * forward_transform(u))
    return np.abs(conv.real)
