"""Phase targets, defocus propagation, and DPC stack simulation.

The measurement model per axis n is

    S_n = ifft( H_n * fft(Phi) ) + b_n + eps,

the weak-object linear model plus an optional structured background residual
and white Gaussian noise. The background models an out-of-focus layer: its
phase is propagated by the angular-spectrum method to an intensity B, the two
illumination half-pupils see oppositely displaced copies of that shadow
(displacement |z| tan(asin(s*NA)) per side along the axis direction, s = 4/3pi
the half-disk centroid factor) with a relative intensity mismatch, and the
DPC ratio of the mismatched pair is the residual

    b_n = (B_l - B_r) / (B_l + B_r).

Noise is calibrated against the ideal (convolution-only) signal power so that
10 log10(P_signal / P_noise) equals the requested snr_db, drawn from
numpy's default_rng seeded per stack: identical inputs give bit-identical
stacks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .core import FrequencyGrid, forward_transform, inverse_transform
from .fileio import load_array
from .pupils import annular_source, antisymmetrize, half_circle_source, objective_pupil
from .transfer import TransferFunction, ptf
from .validation import check_finite_array, check_real_image

__all__ = [
    "BackgroundSpec",
    "DpcStack",
    "wedding_cake",
    "focal_star",
    "phase_target",
    "propagate_field",
    "propagate",
    "background_residual",
    "simulate_stack",
    "dpc_from_raw",
    "build_tfs",
]

HALF_DISK_CENTROID = 4.0 / (3.0 * np.pi)


@dataclass(frozen=True, eq=False)
class BackgroundSpec:
    """Out-of-focus corruption layer: its phase, defocus distance, imbalance."""

    layer_phase: np.ndarray
    z_um: float = -200.0
    mismatch: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.mismatch <= 0.2:
            raise ValueError(f"mismatch must lie in [0, 0.2], got {self.mismatch!r}")


@dataclass(frozen=True, eq=False)
class DpcStack:
    """A set of DPC images with the transfer functions that produced them."""

    grid: FrequencyGrid
    images: np.ndarray          # (n_axes, height, width)
    tfs: tuple
    na: float
    lambda_um: float
    rng_seed: int | None = None
    snr_db: float | None = None

    @property
    def n_axes(self):
        return len(self.tfs)


def _centered_radius_px(grid):
    yy, xx = np.indices(grid.shape)
    return np.hypot(yy - grid.height // 2, xx - grid.width // 2)


def _smooth(data, sigma_px):
    if sigma_px > 0:
        return gaussian_filter(data, sigma=sigma_px, mode="wrap")
    return data


def wedding_cake(grid, radii_frac=(0.12, 0.22, 0.34), levels=(1.0, 2.0 / 3.0, 1.0 / 3.0),
                 edge_sigma_px=1.0):
    """Concentric phase discs, brightest innermost (default 1, 2/3, 1/3 rad).

    Radii are fractions of the smaller grid dimension. edge_sigma_px softens
    the disc edges with a periodic Gaussian; the default single pixel keeps
    the target's spectrum inside the reconstructible band without visibly
    changing it. Pass 0 for hard edges.
    """
    if len(radii_frac) != len(levels):
        raise ValueError("radii_frac and levels must have equal length")
    if any(a >= b for a, b in zip(radii_frac, radii_frac[1:])):
        raise ValueError(f"radii must increase, got {radii_frac}")
    r = _centered_radius_px(grid)
    scale = min(grid.shape)
    phase = np.zeros(grid.shape, dtype=np.float64)
    for frac, level in sorted(zip(radii_frac, levels), reverse=True):
        phase[r < frac * scale] = level
    return _smooth(phase, edge_sigma_px)


def focal_star(grid, spokes=8, amplitude=1.0, radius_frac=0.40, edge_sigma_px=1.0):
    """Radial spoke target: `spokes` wedges at `amplitude` inside a disc."""
    if spokes < 1:
        raise ValueError(f"spokes must be >= 1, got {spokes}")
    yy, xx = np.indices(grid.shape)
    theta = np.arctan2(yy - grid.height // 2, xx - grid.width // 2)
    r = _centered_radius_px(grid)
    wedge = np.cos(spokes * theta) > 0
    phase = np.where(wedge & (r < radius_frac * min(grid.shape)), amplitude, 0.0)
    return _smooth(phase, edge_sigma_px)


def phase_target(grid, kind, **params):
    """Build a named phase target: 'wedding_cake', 'focal_star', or 'custom'.

    'custom' loads params['path'] (NPY) and validates it against the grid.
    """
    if kind == "wedding_cake":
        return wedding_cake(grid, **params)
    if kind == "focal_star":
        return focal_star(grid, **params)
    if kind == "custom":
        path = params.get("path")
        if path is None:
            raise ValueError("custom phase target requires a 'path' parameter")
        return check_real_image(load_array(path, "phase target"), grid, "phase target")
    raise ValueError(f"unknown phase target kind {kind!r}")


def propagate_field(phase, z_um, lambda_um, grid):
    """Angular-spectrum propagation of the unit-amplitude field exp(i*phase).

    The transfer multiplier is exp(i z sqrt(k^2 - 4 pi^2 |f|^2)), k = 2 pi /
    lambda; evanescent bins (the root argument negative) are zeroed. Energy is
    conserved exactly when no bin is evanescent.
    """
    phase = check_real_image(phase, grid, "layer phase")
    if not np.isfinite(z_um):
        raise ValueError(f"z_um must be finite, got {z_um!r}")
    k = 2.0 * np.pi / lambda_um
    arg = k * k - (2.0 * np.pi * grid.f_radius) ** 2
    propagating = arg > 0
    kz = np.sqrt(np.where(propagating, arg, 0.0))
    transfer = np.where(propagating, np.exp(1j * z_um * kz), 0.0)
    return inverse_transform(forward_transform(np.exp(1j * phase)) * transfer)


def propagate(phase, z_um, lambda_um, grid):
    """Defocused intensity of a pure-phase layer, normalized to mean 1."""
    intensity = np.abs(propagate_field(phase, z_um, lambda_um, grid)) ** 2
    mean = intensity.mean()
    if mean == 0.0:
        raise ValueError("propagated field lost all energy (fully evanescent)")
    return intensity / mean


def background_residual(background, grid, na, lambda_um, theta0):
    """DPC residual of the defocus layer along one axis.

    The two half-pupils see the layer's shadow displaced by +-|z| tan(theta_c)
    pixels along (cos theta0, sin theta0), theta_c the half-disk centroid
    obliquity asin(4/(3 pi) * NA), with mismatched intensities.
    """
    b = propagate(background.layer_phase, background.z_um, lambda_um, grid)
    sin_bar = min(HALF_DISK_CENTROID * na, 1.0)
    tan_bar = sin_bar / np.sqrt(max(1.0 - sin_bar * sin_bar, np.finfo(float).eps))
    shift_px = int(round(abs(background.z_um) * tan_bar / grid.dx_um))
    dx = int(round(shift_px * np.cos(theta0)))
    dy = int(round(shift_px * np.sin(theta0)))
    g = background.mismatch
    left = (1.0 + 0.5 * g) * np.roll(b, (-dy, -dx), axis=(0, 1))
    right = (1.0 - 0.5 * g) * np.roll(b, (dy, dx), axis=(0, 1))
    total = left + right
    if (total <= 0).any():
        raise ValueError("background pair has nonpositive total intensity")
    return (left - right) / total


def simulate_stack(phase, tfs, background=None, snr_db=None, seed=0, *,
                   na, lambda_um):
    """Simulate a DPC stack from a phase map and per-axis transfer functions.

    Linear in the phase (exactly, when background and noise are off); the
    ideal images are band-limited to 2NA/lambda because the transfer
    functions are. Noise variance per image is P_signal / 10^(snr_db/10)
    with P_signal the mean squared ideal image; a zero-power ideal image
    with snr_db set is rejected. Same seed, same stack, bit for bit.
    """
    grid = tfs[0].grid
    phase = check_real_image(phase, grid, "phase")
    spectrum = forward_transform(phase)
    rng = np.random.default_rng(seed)
    images = np.empty((len(tfs), grid.height, grid.width), dtype=np.float64)
    for n, tf in enumerate(tfs):
        if tf.grid != grid:
            raise ValueError("transfer functions live on different grids")
        ideal = inverse_transform(tf.data * spectrum).real
        out = ideal
        if background is not None:
            out = out + background_residual(background, grid, na, lambda_um, tf.theta0)
        if snr_db is not None:
            p_signal = float(np.mean(ideal * ideal))
            if p_signal == 0.0:
                raise ValueError(
                    "cannot set an SNR against a zero-power ideal signal"
                )
            sigma = np.sqrt(p_signal / 10.0 ** (snr_db / 10.0))
            out = out + rng.normal(0.0, sigma, size=grid.shape)
        images[n] = out
    return DpcStack(grid=grid, images=images, tfs=tuple(tfs), na=na,
                    lambda_um=lambda_um, rng_seed=seed,
                    snr_db=None if snr_db is None else float(snr_db))


def dpc_from_raw(i_left, i_right):
    """DPC normalization (I_l - I_r) / (I_l + I_r) of a raw intensity pair.

    Rejects pixels where the summed intensity is not positive, reporting
    the first offending coordinate.
    """
    i_left = check_finite_array(np.asarray(i_left, dtype=np.float64), "i_left")
    i_right = check_finite_array(np.asarray(i_right, dtype=np.float64), "i_right")
    if i_left.shape != i_right.shape:
        raise ValueError(f"shape mismatch: {i_left.shape} vs {i_right.shape}")
    total = i_left + i_right
    bad = total <= 0
    if bad.any():
        idx = tuple(int(v) for v in np.argwhere(bad)[0])
        raise ValueError(
            f"{int(bad.sum())} pixels have nonpositive total intensity "
            f"(first at {idx}); DPC normalization undefined"
        )
    return (i_left - i_right) / total


def build_tfs(grid, na, lambda_um, theta0s=(0.0, np.pi / 2), source="half-circle",
              na_inner=0.0):
    """Objective pupil + one transfer function per axis angle.

    source: 'half-circle' or 'annular' (the latter with na_inner > 0).
    """
    pupil = objective_pupil(grid, na, lambda_um)
    tfs = []
    for theta0 in theta0s:
        if source == "half-circle":
            src = half_circle_source(grid, na, lambda_um, theta0)
        elif source == "annular":
            src = annular_source(grid, na, na_inner, lambda_um, theta0)
        else:
            raise ValueError(f"unknown source kind {source!r}")
        tfs.append(ptf(pupil, antisymmetrize(src, pupil), theta0))
    return tfs
