"""Test-only helpers shared between module tests and the acceptance suite."""

import numpy as np

from dpckit.core import forward_transform, inverse_transform
from dpckit.transfer import edge_response, edge_step


def edge_argmax_offsets(kernel, theta0):
    """Per-scan-line distance (px) between the response argmax and the edge.

    Convolves the kernel with the step aligned to theta0 and, for every scan
    line crossing the edge, measures how far the response peak sits from the
    step's sign change. The periodic step has a second (wraparound)
    transition half a field away; a 2-pixel band around it is excluded
    before taking the argmax. Scan lines run along x when the step direction
    is mostly horizontal, along y otherwise.
    """
    grid = kernel.grid
    response = edge_response(kernel, theta0)
    step = edge_step(grid, theta0)
    if abs(np.cos(theta0)) < abs(np.sin(theta0)):
        response, step = response.T, step.T
    n = step.shape[1]
    offsets = []
    for row_step, row_resp in zip(step, response):
        flips = np.nonzero(row_step != np.roll(row_step, 1))[0]
        if flips.size != 2:
            continue  # edge parallel to the scan line; no crossing to locate
        # the transition out of the -1 strip into +1 is the true edge; the
        # other is the periodic wraparound
        edge_col, wrap_col = (
            (flips[0], flips[1]) if row_step[flips[0]] > 0 else (flips[1], flips[0])
        )
        masked = row_resp.copy()
        for off in range(-2, 3):
            masked[(wrap_col + off) % n] = -np.inf
        peak = int(np.argmax(masked))
        dist = abs(peak - edge_col)
        offsets.append(min(dist, n - dist))
    return np.asarray(offsets)


def orthogonal_peak_ratio(kernel, theta0):
    """max response to the orthogonal edge over max response to the aligned."""
    aligned = edge_response(kernel, theta0).max()
    crossed = edge_response(kernel, theta0 + np.pi / 2.0).max()
    return crossed / aligned


def band_limited_phase(grid, na, lambda_um, seed=0, frac=0.5):
    """Random phase supported inside frac * (2NA/lambda): exactly recoverable."""
    rng = np.random.default_rng(seed)
    spectrum = forward_transform(rng.standard_normal(grid.shape))
    spectrum[grid.f_radius > frac * 2.0 * na / lambda_um] = 0.0
    phase = inverse_transform(spectrum).real
    return phase / np.abs(phase).max()
