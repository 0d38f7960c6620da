"""Reconstruction quality metrics: rpSNR, PSNR, SSIM.

DPC reconstructions are only defined up to an affine intensity map (the
missing DC and the arbitrary transfer-function scale), so the headline metric
is the regression-based rpSNR: fit a, b minimizing ||a rec + b - gt||^2, then

    rpSNR = 10 log10( Var(gt) / MSE(a rec + b, gt) ),

capped at 300 dB for exact recovery. PSNR uses peak = max(gt) - min(gt).
SSIM is the standard 11x11 Gaussian-window formulation (sigma 1.5, K1 = 0.01,
K2 = 0.03, population covariance) with the dynamic range taken from the
ground truth; the map's border (half a window) is cropped before averaging.
"""

import numpy as np
from scipy.ndimage import gaussian_filter

from .validation import check_real_image

__all__ = ["rpsnr", "psnr", "ssim"]

DB_CAP = 300.0


def _pair(rec, gt):
    rec = check_real_image(rec, None, "reconstruction")
    gt = check_real_image(gt, None, "ground truth")
    if rec.shape != gt.shape:
        raise ValueError(f"shape mismatch: {rec.shape} vs {gt.shape}")
    return rec, gt


def rpsnr(rec, gt):
    """Regression-based pseudo SNR in dB; affine-invariant in rec."""
    rec, gt = _pair(rec, gt)
    var_gt = float(gt.var())
    var_rec = float(rec.var())
    if var_rec > 0:
        a = float(np.mean((rec - rec.mean()) * (gt - gt.mean()))) / var_rec
    else:
        a = 0.0
    b = float(gt.mean()) - a * float(rec.mean())
    mse = float(np.mean((a * rec + b - gt) ** 2))
    if mse <= var_gt * 1e-30:
        return DB_CAP
    return min(10.0 * np.log10(var_gt / mse), DB_CAP)


def psnr(rec, gt):
    """Peak SNR with peak = max(gt) - min(gt), capped at 300 dB."""
    rec, gt = _pair(rec, gt)
    peak = float(gt.max() - gt.min())
    mse = float(np.mean((rec - gt) ** 2))
    if mse == 0.0:
        return DB_CAP
    if peak == 0.0:
        raise ValueError("ground truth has zero dynamic range")
    return min(10.0 * np.log10(peak * peak / mse), DB_CAP)


def ssim(rec, gt, win_size=11, sigma=1.5, k1=0.01, k2=0.03):
    """Mean structural similarity against the ground truth.

    Local statistics come from a Gaussian window (sigma, truncated to give
    win_size taps), the stabilizers are (k R)^2 with R the ground truth's
    peak-to-peak range, and the un-windowed border is cropped before the mean.
    """
    rec, gt = _pair(rec, gt)
    if win_size % 2 != 1 or win_size < 3:
        raise ValueError(f"win_size must be odd and >= 3, got {win_size}")
    if min(rec.shape) < win_size:
        raise ValueError(f"images smaller than the {win_size}-tap window")
    data_range = float(gt.max() - gt.min())
    if data_range == 0.0:
        raise ValueError("ground truth has zero dynamic range")
    # truncate chosen so ndimage's radius int(truncate*sigma + 0.5) spans win_size
    truncate = ((win_size - 1) // 2) / sigma
    filt = dict(sigma=sigma, truncate=truncate, mode="reflect")
    ux = gaussian_filter(rec, **filt)
    uy = gaussian_filter(gt, **filt)
    vx = gaussian_filter(rec * rec, **filt) - ux * ux
    vy = gaussian_filter(gt * gt, **filt) - uy * uy
    vxy = gaussian_filter(rec * gt, **filt) - ux * uy
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    s = ((2 * ux * uy + c1) * (2 * vxy + c2)) / (
        (ux * ux + uy * uy + c1) * (vx + vy + c2)
    )
    pad = (win_size - 1) // 2
    return float(s[pad:-pad, pad:-pad].mean())
