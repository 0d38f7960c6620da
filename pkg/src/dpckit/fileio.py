"""Array and preview-image file I/O.

Arrays travel as NPY version 1.0: magic \\x93NUMPY, format version (1, 0),
little-endian float64 or complex128, C-order. Previews are 16-bit grayscale
PNGs, min-max normalized, each with a plain-text sidecar recording the bounds
so the physical values can be recovered to one quantization step.
"""

import os

import numpy as np
from PIL import Image

__all__ = ["save_array", "load_array", "preview_png", "read_preview_png"]

_MAGIC = b"\x93NUMPY"


def save_array(path, data):
    """Write data as NPY v1.0, cast to float64 (real) or complex128 (complex)."""
    data = np.asarray(data)
    dtype = np.complex128 if np.iscomplexobj(data) else np.float64
    data = np.ascontiguousarray(data, dtype=dtype)
    with open(path, "wb") as f:
        np.lib.format.write_array(f, data, version=(1, 0))
    return path


def load_array(path, name=None):
    """Read an NPY array, checking the magic bytes before parsing.

    Raises ValueError on wrong magic or non-finite contents, OSError on
    missing/unreadable files.
    """
    name = name or os.path.basename(path)
    with open(path, "rb") as f:
        head = f.read(len(_MAGIC))
        if head != _MAGIC:
            raise ValueError(f"{name}: not an NPY file (magic {head!r})")
        f.seek(0)
        data = np.lib.format.read_array(f)
    if not np.isfinite(data).all():
        raise ValueError(f"{name}: array contains non-finite values")
    return data


def preview_png(path, data):
    """Write a 16-bit grayscale preview plus a '<path>.bounds.txt' sidecar.

    Values are mapped linearly from [min, max] onto [0, 65535]; a constant
    image maps to uniform mid-gray with the degenerate (equal) bounds
    recorded. The sidecar documents the inverse mapping
    value = lo + code/65535 * (hi - lo).
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"preview expects a 2D array, got shape {data.shape}")
    if not np.isfinite(data).all():
        raise ValueError("preview input contains non-finite values")
    lo, hi = float(data.min()), float(data.max())
    if hi > lo:
        codes = np.round((data - lo) / (hi - lo) * 65535.0).astype(np.uint16)
    else:
        codes = np.full(data.shape, 32768, dtype=np.uint16)
    Image.fromarray(codes, mode="I;16").save(path, format="PNG")
    with open(str(path) + ".bounds.txt", "w") as f:
        f.write(f"min = {lo!r}\n")
        f.write(f"max = {hi!r}\n")
        f.write("mapping: value = min + code/65535 * (max - min)\n")
    return path


def read_preview_png(path):
    """Invert preview_png using the sidecar; returns float64 values."""
    codes = np.asarray(Image.open(path), dtype=np.float64)
    bounds = {}
    with open(str(path) + ".bounds.txt") as f:
        for line in f:
            if "=" in line:
                key, _, value = line.partition("=")
                try:
                    bounds[key.strip()] = float(value.strip())
                except ValueError:
                    pass
    lo, hi = bounds["min"], bounds["max"]
    return lo + codes / 65535.0 * (hi - lo)
