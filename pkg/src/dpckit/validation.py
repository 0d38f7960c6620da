"""Input validation helpers shared by builders, loaders, solvers, and the CLI.

Every helper raises ValueError with a diagnostic message and returns the
validated array (as float64/complex128 ndarray) so callers can write
``data = check_real_image(data, grid, "phase")``. Domain-object checks are
attribute-based (``obj.grid``, ``obj.data``) so acquisition invariants can be
enforced at API boundaries without constraining what a dataclass may hold
in between (learned source patterns, for instance, are legitimately signed).
"""

import numpy as np

__all__ = [
    "check_finite_array",
    "check_real_image",
    "check_complex_image",
    "check_same_grid",
    "check_source_pattern",
    "check_pupil_mask",
    "check_illumination_pupil",
    "check_transfer_function",
    "check_stack",
]


def check_finite_array(data, name="array"):
    data = np.asarray(data)
    if not np.isfinite(data).all():
        bad = int(data.size - np.count_nonzero(np.isfinite(data)))
        idx = tuple(int(v) for v in np.argwhere(~np.isfinite(data))[0])
        raise ValueError(
            f"{name} contains {bad} non-finite values (first at index {idx})"
        )
    return data


def check_real_image(data, grid=None, name="image"):
    data = check_finite_array(data, name)
    if np.iscomplexobj(data):
        raise ValueError(f"{name} must be real-valued, got dtype {data.dtype}")
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {data.shape}")
    if grid is not None and data.shape != grid.shape:
        raise ValueError(
            f"{name} shape {data.shape} does not match grid shape {grid.shape}"
        )
    return data


def check_complex_image(data, grid=None, name="spectrum"):
    data = check_finite_array(data, name)
    data = np.asarray(data, dtype=np.complex128)
    if data.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {data.shape}")
    if grid is not None and data.shape != grid.shape:
        raise ValueError(
            f"{name} shape {data.shape} does not match grid shape {grid.shape}"
        )
    return data


def check_same_grid(a, b, what="objects"):
    if a.grid != b.grid:
        raise ValueError(f"{what} live on different grids: {a.grid} vs {b.grid}")
    return a.grid


def check_pupil_mask(pupil):
    """Binary support, correct shape, cutoff consistent with the stored NA."""
    data = check_real_image(pupil.data, pupil.grid, "pupil mask")
    if not np.isin(data, (0.0, 1.0)).all():
        raise ValueError("pupil mask must be binary (0/1)")
    cutoff = pupil.na / pupil.lambda_um
    outside = data * (pupil.grid.f_radius >= cutoff)
    if outside.any():
        raise ValueError("pupil mask has support at or beyond NA/lambda")
    return pupil


def check_source_pattern(src):
    """Acquisition invariant: nonnegative intensity on the grid."""
    data = check_real_image(src.data, src.grid, "source pattern")
    if (data < 0).any():
        raise ValueError(
            f"source pattern must be nonnegative, min = {data.min():.3g}"
        )
    return src


def check_illumination_pupil(illum, tol=1e-12):
    """Exact antisymmetry under index negation, zero at the DC bin."""
    from .core import index_negate

    data = check_real_image(illum.data, illum.grid, "illumination pupil")
    scale = np.abs(data).max() or 1.0
    asym = np.abs(data + index_negate(data)).max()
    if asym > tol * scale:
        raise ValueError(
            f"illumination pupil is not antisymmetric: residual {asym:.3g}"
        )
    return illum


def check_transfer_function(tf, na=None, lambda_um=None, tol=1e-12):
    """Pure-imaginary, odd under index negation; band-limited when NA is given."""
    from .core import index_negate

    data = check_complex_image(tf.data, tf.grid, "transfer function")
    scale = np.abs(data).max() or 1.0
    re = np.abs(data.real).max()
    if re > tol * scale:
        raise ValueError(f"transfer function has a real part: max |Re| = {re:.3g}")
    odd = np.abs(data + index_negate(data)).max()
    if odd > tol * scale:
        raise ValueError(f"transfer function is not odd: residual {odd:.3g}")
    if na is not None and lambda_um is not None:
        band = 2.0 * na / lambda_um
        leak = np.abs(data[tf.grid.f_radius > band]).max(initial=0.0)
        if leak > tol * scale:
            raise ValueError(
                f"transfer function leaks beyond 2NA/lambda: max {leak:.3g}"
            )
    return tf


def check_stack(stack):
    """Shape agreement between images, transfer functions, and the grid."""
    n = len(stack.tfs)
    images = np.asarray(stack.images, dtype=np.float64)
    if images.ndim != 3 or images.shape[0] != n:
        raise ValueError(
            f"stack must hold {n} images of shape {stack.grid.shape}, "
            f"got array of shape {images.shape}"
        )
    check_finite_array(images, "stack images")
    for tf in stack.tfs:
        if tf.grid != stack.grid:
            raise ValueError("transfer function grid differs from stack grid")
        if tf.data.shape != stack.grid.shape:
            raise ValueError("transfer function shape differs from stack grid")
    if images.shape[1:] != stack.grid.shape:
        raise ValueError(
            f"stack image shape {images.shape[1:]} != grid shape {stack.grid.shape}"
        )
    if not (np.isfinite(stack.na) and stack.na > 0):
        raise ValueError(f"stack NA must be positive, got {stack.na!r}")
    if not (np.isfinite(stack.lambda_um) and stack.lambda_um > 0):
        raise ValueError(f"stack lambda_um must be positive, got {stack.lambda_um!r}")
    return images
