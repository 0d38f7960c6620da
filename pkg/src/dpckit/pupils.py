"""Objective pupils, half-plane illumination sources, and antisymmetrization.

The objective pupil P is the binary disk |f| < NA/lambda. Sources are
nonnegative intensity patterns q(f) on the frequency grid; the half-circle and
half-annulus builders fill the open half-plane around the axis angle theta0
(membership: f . (cos theta0, sin theta0) > 0, boundary line excluded, so the
DC bin never belongs). Antisymmetrization forms the odd illumination pupil
Q(f) = m(f) - m(-f) with m = q * P, the quantity the phase transfer function
is built from: for theta0 = 0 it is +1 on the right half-disk and -1 on the
left, and it vanishes identically for any symmetric source.
"""

from dataclasses import dataclass

import numpy as np

from .core import FrequencyGrid, index_negate
from .fileio import load_array
from .validation import check_real_image, check_same_grid, check_source_pattern

__all__ = [
    "PupilMask",
    "SourcePattern",
    "IlluminationPupil",
    "objective_pupil",
    "half_circle_source",
    "annular_source",
    "antisymmetrize",
    "source_from_npy",
]


@dataclass(frozen=True, eq=False)
class PupilMask:
    """Binary objective aperture on a frequency grid."""

    grid: FrequencyGrid
    data: np.ndarray
    na: float
    lambda_um: float

    @property
    def cutoff(self):
        """Coherent cutoff NA/lambda in cycles/um."""
        return self.na / self.lambda_um


@dataclass(frozen=True, eq=False)
class SourcePattern:
    """Illumination intensity pattern and its axis angle."""

    grid: FrequencyGrid
    data: np.ndarray
    theta0: float = 0.0


@dataclass(frozen=True, eq=False)
class IlluminationPupil:
    """Antisymmetrized illumination Q(f) = m(f) - m(-f), m = source * pupil."""

    grid: FrequencyGrid
    data: np.ndarray


def _check_optics(na, lambda_um, name="na"):
    if not (np.isfinite(na) and na > 0):
        raise ValueError(f"{name} must be positive and finite, got {na!r}")
    if not (np.isfinite(lambda_um) and lambda_um > 0):
        raise ValueError(f"lambda_um must be positive and finite, got {lambda_um!r}")


def objective_pupil(grid, na, lambda_um):
    """Binary disk |f| < NA/lambda.

    The phase transfer function occupies twice the coherent cutoff, so
    configurations with 2NA/lambda at or beyond the grid Nyquist frequency are
    rejected: their transfer functions would alias (the circular convolution
    that builds them would wrap).
    """
    _check_optics(na, lambda_um)
    cutoff = na / lambda_um
    if 2.0 * cutoff >= grid.nyquist:
        raise ValueError(
            f"NA/lambda = {cutoff:.4g} cycles/um needs 2NA/lambda < Nyquist "
            f"= {grid.nyquist:.4g}; the transfer function would alias"
        )
    data = (grid.f_radius < cutoff).astype(np.float64)
    return PupilMask(grid=grid, data=data, na=na, lambda_um=lambda_um)


def _half_plane(grid, theta0):
    proj = grid.f_x * np.cos(theta0) + grid.f_y * np.sin(theta0)
    # trig dust at special angles (sin(pi) ~ 1e-16) would otherwise pull
    # boundary-line bins into the open half-plane; snap them onto the line
    eps = 1e-9 * np.abs(proj).max()
    return proj > eps


def half_circle_source(grid, na, lambda_um, theta0=0.0):
    """Uniform half-disk source: |f| < NA/lambda, open half-plane about theta0."""
    _check_optics(na, lambda_um)
    data = ((grid.f_radius < na / lambda_um) & _half_plane(grid, theta0)).astype(
        np.float64
    )
    return SourcePattern(grid=grid, data=data, theta0=float(theta0))


def annular_source(grid, na_outer, na_inner, lambda_um, theta0=0.0):
    """Uniform half-annulus: na_inner/lambda <= |f| < na_outer/lambda.

    na_inner = 0 degenerates to the half-circle source.
    """
    _check_optics(na_outer, lambda_um, "na_outer")
    if not (np.isfinite(na_inner) and 0 <= na_inner < na_outer):
        raise ValueError(
            f"need 0 <= na_inner < na_outer, got inner {na_inner!r}, outer {na_outer!r}"
        )
    radial = (grid.f_radius >= na_inner / lambda_um) & (
        grid.f_radius < na_outer / lambda_um
    )
    data = (radial & _half_plane(grid, theta0)).astype(np.float64)
    return SourcePattern(grid=grid, data=data, theta0=float(theta0))


def antisymmetrize(src, pupil, allow_signed=False):
    """Form the odd illumination pupil Q = m - m(-f), m = src * pupil.

    Acquisition sources must be nonnegative; pass allow_signed=True only for
    synthetic patterns where signedness is deliberate (learned pupils).
    """
    check_same_grid(src, pupil, "source and pupil")
    if not allow_signed:
        check_source_pattern(src)
    m = np.asarray(src.data, dtype=np.float64) * pupil.data
    q = m - index_negate(m)
    return IlluminationPupil(grid=src.grid, data=q)


def source_from_npy(path, grid, theta0=0.0):
    """Load a custom source pattern, validating shape and nonnegativity."""
    data = load_array(path, "source pattern")
    data = check_real_image(data, grid, "source pattern")
    src = SourcePattern(grid=grid, data=data, theta0=float(theta0))
    return check_source_pattern(src)
