"""Quantitative DPC microscopy: simulation, reconstruction, and evaluation.

Layers
------
core            frequency grids, transforms, spectral operators
pupils          objective pupils, half-plane sources, antisymmetrization
transfer        phase transfer functions, kernels, edge responses
forward         phase targets, defocus propagation, stack simulation
solvers         L2 / isotropic / TV / Retinex-TV baselines and the
                pupil-driven split-Bregman reconstructor
sensor          out-of-band noise estimation and automatic penalty weights
metrics         rpSNR, PSNR, SSIM
pupil_learn     gradient-ascent recovery of the illumination pupil from edges
estimators      sklearn-style fit/transform wrappers around the solvers
fileio, cli     NPY/PNG I/O and the command-line interface
"""

__version__ = "0.1.0"

from .core import (
    FrequencyGrid,
    SpectralOperators,
    forward_transform,
    inverse_transform,
    spectral_gradient_ops,
)
from .pupils import (
    IlluminationPupil,
    PupilMask,
    SourcePattern,
    annular_source,
    antisymmetrize,
    half_circle_source,
    objective_pupil,
)
from .transfer import PsfKernel, TransferFunction, edge_response, psf, ptf, ptf_direct
from .forward import (
    BackgroundSpec,
    DpcStack,
    build_tfs,
    dpc_from_raw,
    focal_star,
    phase_target,
    simulate_stack,
    wedding_cake,
)
from .solvers import (
    PdParams,
    PdResult,
    SolverDivergenceError,
    phi_update,
    rst_shrink,
    soft_shrink,
    solve_iso,
    solve_l2,
    solve_pd,
    solve_retinex_tv,
    solve_tv,
)
from .sensor import NoiseEstimate, auto_params, noise_sigma
from .metrics import psnr, rpsnr, ssim
from .pupil_learn import (
    LearnConfig,
    LearnTrace,
    edge_angles_from_image,
    edge_cost,
    grad_edge_cost,
    learn_pupil,
)
from .estimators import (
    IsotropicDpc,
    L2Dpc,
    PupilDrivenDpc,
    RetinexTVDpc,
    TotalVariationDpc,
)

__all__ = [
    "__version__",
    "FrequencyGrid",
    "SpectralOperators",
    "forward_transform",
    "inverse_transform",
    "spectral_gradient_ops",
    "PupilMask",
    "SourcePattern",
    "IlluminationPupil",
    "objective_pupil",
    "half_circle_source",
    "annular_source",
    "antisymmetrize",
    "TransferFunction",
    "PsfKernel",
    "ptf",
    "ptf_direct",
    "psf",
    "edge_response",
    "BackgroundSpec",
    "DpcStack",
    "build_tfs",
    "dpc_from_raw",
    "focal_star",
    "phase_target",
    "simulate_stack",
    "wedding_cake",
    "PdParams",
    "PdResult",
    "SolverDivergenceError",
    "phi_update",
    "rst_shrink",
    "soft_shrink",
    "solve_iso",
    "solve_l2",
    "solve_pd",
    "solve_retinex_tv",
    "solve_tv",
    "NoiseEstimate",
    "auto_params",
    "noise_sigma",
    "psnr",
    "rpsnr",
    "ssim",
    "LearnConfig",
    "LearnTrace",
    "edge_angles_from_image",
    "edge_cost",
    "grad_edge_cost",
    "learn_pupil",
    "L2Dpc",
    "IsotropicDpc",
    "TotalVariationDpc",
    "RetinexTVDpc",
    "PupilDrivenDpc",
]
