"""Blind noise estimation from the out-of-band spectrum, and the penalty map.

The transfer functions vanish beyond 2NA/lambda, so everything out there is
noise. Each DPC image is high-pass filtered to that region, convolved with
the second-difference kernel

    Gamma = [[-1,  2, -1],
             [ 2, -4,  2],
             [-1,  2, -1]]

(periodic boundaries), and the mean absolute response over all images and
pixels is scaled to the estimate

    sigma = (1/5) sqrt(pi/2) * (1/(N W H)) * sum |Gamma conv HPF(S_n)|.

sigma is zero (to round-off) on clean simulated stacks, invariant under
adding any band-limited signal, and linear in the noise level. The mapping to
penalty weights is alpha = sigma/2, beta = sigma/10; alpha additionally gets
a floor of 1e-6 * max|S_n| (recorded by noise_sigma) so that a perfectly
clean stack cannot switch the sparsity penalties off entirely.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve

from .core import forward_transform, inverse_transform
from .validation import check_stack

__all__ = ["NoiseEstimate", "noise_sigma", "auto_params", "SECOND_DIFF_KERNEL"]

logger = logging.getLogger(__name__)

SECOND_DIFF_KERNEL = np.array(
    [[-1.0, 2.0, -1.0],
     [2.0, -4.0, 2.0],
     [-1.0, 2.0, -1.0]]
)


@dataclass(frozen=True)
class NoiseEstimate:
    """Noise level of a stack: pooled sigma, per-image values, alpha floor."""

    sigma: float
    per_image_sigmas: tuple
    alpha_floor: float = 0.0


def noise_sigma(stack):
    """Estimate the noise standard deviation of a DPC stack.

    Rejects geometries whose band limit 2NA/lambda reaches the grid Nyquist
    frequency: no out-of-band region would exist to measure.
    """
    images = check_stack(stack)
    band = 2.0 * stack.na / stack.lambda_um
    if band >= stack.grid.nyquist:
        raise ValueError(
            f"band limit 2NA/lambda = {band:.4g} >= Nyquist "
            f"{stack.grid.nyquist:.4g}: no out-of-band region to estimate from"
        )
    out_of_band = stack.grid.f_radius > band
    scale = 0.2 * np.sqrt(np.pi / 2.0)
    sigmas = []
    for image in images:
        hp = inverse_transform(forward_transform(image) * out_of_band).real
        response = convolve(hp, SECOND_DIFF_KERNEL, mode="wrap")
        sigmas.append(scale * float(np.abs(response).mean()))
    return NoiseEstimate(
        sigma=float(np.mean(sigmas)),
        per_image_sigmas=tuple(sigmas),
        alpha_floor=1e-6 * float(np.abs(images).max()),
    )


def auto_params(estimate):
    """Map a noise estimate to penalty weights: alpha = sigma/2, beta = sigma/10.

    The recorded alpha floor is applied (and logged) when it binds.
    """
    alpha = estimate.sigma / 2.0
    beta = estimate.sigma / 10.0
    if alpha < estimate.alpha_floor:
        logger.info(
            "alpha floor engaged: sigma/2 = %.3g < floor %.3g",
            alpha, estimate.alpha_floor,
        )
        alpha = estimate.alpha_floor
    return alpha, beta
