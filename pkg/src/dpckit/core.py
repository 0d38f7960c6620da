"""Frequency grids, Fourier transforms, and spectral derivative operators.

Contents
--------
FrequencyGrid        physical frequency coordinates for an even-sized image grid
forward_transform    2D DFT (unnormalized), rejects non-finite input
inverse_transform    2D inverse DFT (1/N-normalized)
SpectralOperators    periodic forward-difference multipliers and their Laplacian
spectral_gradient_ops  build SpectralOperators for a grid
forward_difference   spatial periodic forward difference (the multipliers' twin)
index_negate         point reflection through the zero-frequency bin
fourier_shift        subpixel periodic translation of a real image

Conventions: images are float64 (real) or complex128 (complex) numpy arrays of
shape (height, width); the x axis runs along columns (axis 1), y along rows
(axis 0). Spectra are stored in standard DFT order with the zero-frequency bin
at index (0, 0); any center-shifted layout is display-only. The transform pair
is numpy's unnormalized forward / 1/N inverse, so Parseval reads
sum|x|^2 == sum|X|^2 / (width*height). All functions are pure; nothing here
holds mutable state, so everything is safe to share across threads.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "FrequencyGrid",
    "SpectralOperators",
    "forward_transform",
    "inverse_transform",
    "spectral_gradient_ops",
    "forward_difference",
    "index_negate",
    "fourier_shift",
]


@dataclass(frozen=True)
class FrequencyGrid:
    """Frequency coordinates of a sampled field of view.

    Parameters
    ----------
    width, height : int
        Grid size in pixels. Both must be even and positive; the odd-size
        special cases of index negation are not worth supporting.
    pixel_size_um : float
        Camera pixel pitch in micrometers.
    magnification : float
        Optical magnification; the object-plane sampling step is
        pixel_size_um / magnification.

    Attributes
    ----------
    f_x, f_y : ndarray, shape (height, width)
        Frequency coordinate of every bin in cycles/um, DFT order.
    f_radius : ndarray, shape (height, width)
        Radial frequency magnitude |f|.
    """

    width: int = 256
    height: int = 256
    pixel_size_um: float = 4.0
    magnification: float = 10.0

    def __post_init__(self):
        for name in ("width", "height"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or n <= 0 or n % 2 != 0:
                raise ValueError(f"{name} must be a positive even integer, got {n!r}")
        for name in ("pixel_size_um", "magnification"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def shape(self):
        return (self.height, self.width)

    @property
    def dx_um(self):
        """Object-plane sampling step in micrometers."""
        return self.pixel_size_um / self.magnification

    @property
    def df_x(self):
        """Frequency step along x in cycles/um: magnification/(pixel_size*width)."""
        return 1.0 / (self.width * self.dx_um)

    @property
    def df_y(self):
        return 1.0 / (self.height * self.dx_um)

    @property
    def nyquist(self):
        """Nyquist frequency 1/(2*dx) in cycles/um (square pixels, both axes)."""
        return 0.5 / self.dx_um

    @cached_property
    def f_x(self):
        row = np.fft.fftfreq(self.width, d=self.dx_um)
        out = np.broadcast_to(row[None, :], self.shape)
        out.flags.writeable = False
        return out

    @cached_property
    def f_y(self):
        col = np.fft.fftfreq(self.height, d=self.dx_um)
        out = np.broadcast_to(col[:, None], self.shape)
        out.flags.writeable = False
        return out

    @cached_property
    def f_radius(self):
        out = np.hypot(self.f_x, self.f_y)
        out.flags.writeable = False
        return out

    @cached_property
    def x_um(self):
        """Spatial x coordinate per pixel (DFT order, 0 at index 0), micrometers."""
        row = np.fft.fftfreq(self.width, d=1.0 / (self.width * self.dx_um))
        out = np.broadcast_to(row[None, :], self.shape)
        out.flags.writeable = False
        return out

    @cached_property
    def y_um(self):
        col = np.fft.fftfreq(self.height, d=1.0 / (self.height * self.dx_um))
        out = np.broadcast_to(col[:, None], self.shape)
        out.flags.writeable = False
        return out


def _check_finite(data, name):
    data = np.asarray(data)
    if data.ndim < 2:
        raise ValueError(f"{name} must be at least 2-dimensional, got shape {data.shape}")
    if not np.isfinite(data).all():
        bad = int(np.size(data) - np.count_nonzero(np.isfinite(data)))
        raise ValueError(f"{name} contains {bad} non-finite values")
    return data


def forward_transform(data):
    """2D DFT over the trailing two axes, unnormalized.

    Rejects non-finite input; inverse_transform(forward_transform(x)) == x to
    1e-12 relative.
    """
    return np.fft.fft2(_check_finite(data, "forward_transform input"))


def inverse_transform(data):
    """Inverse 2D DFT over the trailing two axes (1/N normalization)."""
    return np.fft.ifft2(_check_finite(data, "inverse_transform input"))


@dataclass(frozen=True)
class SpectralOperators:
    """Spectral multipliers of the periodic forward-difference gradient.

    grad_x_mult / grad_y_mult multiply a spectrum so that the inverse
    transform equals x[.., j+1] - x[.., j] along the corresponding axis
    (periodic); lap_mult = |grad_x_mult|^2 + |grad_y_mult|^2 is the multiplier
    of the discrete grad-transpose-grad. All three are exactly 0 at the DC bin.
    """

    grid: FrequencyGrid
    grad_x_mult: np.ndarray
    grad_y_mult: np.ndarray
    lap_mult: np.ndarray


def spectral_gradient_ops(grid):
    """Build the forward-difference multipliers e^{2 pi i f dx} - 1 for a grid."""
    kx = np.fft.fftfreq(grid.width)[None, :]    # f_x * dx, unitless cycles/sample
    ky = np.fft.fftfreq(grid.height)[:, None]
    gx = np.exp(2j * np.pi * kx) - 1.0
    gy = np.exp(2j * np.pi * ky) - 1.0
    # np.exp(0j) is exactly 1, so the DC entries are exactly 0 without pinning
    gx = np.ascontiguousarray(np.broadcast_to(gx, (grid.height, grid.width)))
    gy = np.ascontiguousarray(np.broadcast_to(gy, (grid.height, grid.width)))
    lap = (gx * gx.conj() + gy * gy.conj()).real
    for arr in (gx, gy, lap):
        arr.flags.writeable = False
    return SpectralOperators(grid=grid, grad_x_mult=gx, grad_y_mult=gy, lap_mult=lap)


def forward_difference(data, axis):
    """Periodic forward difference x[i+1] - x[i] along the given axis."""
    data = np.asarray(data)
    return np.roll(data, -1, axis=axis) - data


def index_negate(data):
    """Point reflection through the (0, 0) bin: out[i, j] = in[-i mod H, -j mod W].

    Acts on the trailing two axes. The zero-frequency bin maps to itself, as do
    the pure-Nyquist bins on even grids.
    """
    data = np.asarray(data)
    return np.roll(np.flip(data, axis=(-2, -1)), shift=(1, 1), axis=(-2, -1))


def fourier_shift(data, shift_x_px, shift_y_px):
    """Translate a real image periodically by a (possibly fractional) pixel offset.

    Positive shift_x_px moves content toward larger x (column index).
    """
    data = _check_finite(data, "fourier_shift input")
    h, w = data.shape[-2:]
    kx = np.fft.fftfreq(w)[None, :]
    ky = np.fft.fftfreq(h)[:, None]
    phase = np.exp(-2j * np.pi * (kx * shift_x_px + ky * shift_y_px))
    return np.fft.ifft2(np.fft.fft2(data) * phase).real
