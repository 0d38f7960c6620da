"""Reference benchmark: the corrupted-stack reconstruction comparison.

One standard acquisition — wedding-cake phase target behind a defocused
field-of-view-scale layer, at a fixed SNR — reconstructed by every solver in
the package under a single parameter policy: the Tikhonov baseline runs its
standard strength sweep, every other method takes its penalty weights from
the adaptive noise sensor (alpha = sigma/2, beta = sigma/10). The corruption
layer is deliberately smooth and strong: its DPC residual is concentrated at
the lowest spatial frequencies, where plain least-squares inversions are
essentially unregularized, the gradient-domain fidelity is de-weighted, and
the pupil-driven fidelity plus edge shrink rejects it hardest. That is what
separates the methods.

`comparison_table` repeats the comparison over seeds and reports mean/std per
method; `ablation_table` scores the pupil-driven solver against its
single-term-disabled variants on the same data.
"""

from dataclasses import dataclass

import numpy as np

from .core import FrequencyGrid
from .forward import (
    BackgroundSpec,
    build_tfs,
    focal_star,
    simulate_stack,
    wedding_cake,
)
from .metrics import psnr, rpsnr, ssim
from .sensor import auto_params, noise_sigma
from .solvers import (
    PdParams,
    solve_iso,
    solve_l2,
    solve_pd,
    solve_retinex_tv,
    solve_tv,
)

__all__ = [
    "BENCH_NA",
    "BENCH_LAMBDA_UM",
    "L2_SWEEP",
    "MethodScore",
    "benchmark_stack",
    "benchmark_methods",
    "comparison_table",
    "ablation_table",
]

BENCH_NA = 0.25
BENCH_LAMBDA_UM = 0.532
# the calibrated corruption: FOV-scale smooth layer, strong defocus shadow
BENCH_LAYER_AMPLITUDE = 2.0
BENCH_LAYER_SIGMA_PX = 24.0
BENCH_Z_UM = -200.0
BENCH_MISMATCH = 0.1
L2_SWEEP = (1e-4, 1e-3, 1e-2, 1e-1)
PD_ITERS = 100
BASELINE_ITERS = 50


@dataclass(frozen=True, eq=False)
class MethodScore:
    """One reconstruction's identity, parameters, and scores."""

    method: str
    seed: int
    alpha: float
    beta: float | None
    iters: int | None
    rpsnr: float
    psnr: float
    ssim: float
    phase: np.ndarray


def benchmark_stack(snr_db=5.0, seed=0, grid=None):
    """Simulate the reference corrupted acquisition.

    Parameters
    ----------
    snr_db : float
        Per-image noise level of the stack.
    seed : int
        Noise seed; the target and layer are deterministic.
    grid : FrequencyGrid, optional
        Defaults to the standard 256 x 256 grid.

    Returns
    -------
    stack : DpcStack
    gt : ndarray
        The ground-truth phase map.
    """
    grid = FrequencyGrid() if grid is None else grid
    gt = wedding_cake(grid)
    layer = focal_star(
        grid, amplitude=BENCH_LAYER_AMPLITUDE, edge_sigma_px=BENCH_LAYER_SIGMA_PX
    )
    background = BackgroundSpec(
        layer_phase=layer, z_um=BENCH_Z_UM, mismatch=BENCH_MISMATCH
    )
    tfs = build_tfs(grid, na=BENCH_NA, lambda_um=BENCH_LAMBDA_UM)
    stack = simulate_stack(
        gt,
        tfs,
        background=background,
        snr_db=snr_db,
        seed=seed,
        na=BENCH_NA,
        lambda_um=BENCH_LAMBDA_UM,
    )
    return stack, gt


def _score(method, seed, alpha, beta, iters, phase, gt):
    return MethodScore(
        method=method,
        seed=seed,
        alpha=float(alpha),
        beta=None if beta is None else float(beta),
        iters=iters,
        rpsnr=rpsnr(phase, gt),
        psnr=psnr(phase, gt),
        ssim=ssim(phase, gt),
        phase=phase,
    )


def benchmark_methods(stack, gt, seed=0, pd_iters=PD_ITERS,
                      baseline_iters=BASELINE_ITERS):
    """Reconstruct one stack with every method under the standard policy.

    The Tikhonov baseline contributes one row per sweep strength
    (method "l2[alpha]"); iso/tv/retinex-tv/pd take sensor-driven weights.
    Returns the rows in a fixed order, pd last.
    """
    alpha, beta = auto_params(noise_sigma(stack))
    rows = []
    for a in L2_SWEEP:
        rows.append(_score(f"l2[{a:g}]", seed, a, None, None,
                           solve_l2(stack, alpha=a), gt))
    rows.append(_score("iso", seed, alpha, beta, None,
                       solve_iso(stack, alpha=alpha, beta=beta), gt))
    rows.append(_score("tv", seed, alpha, None, baseline_iters,
                       solve_tv(stack, alpha=alpha, iters=baseline_iters), gt))
    rows.append(_score("retinex-tv", seed, alpha, None, baseline_iters,
                       solve_retinex_tv(stack, alpha=alpha, iters=baseline_iters),
                       gt))
    pd = solve_pd(stack, PdParams(max_iters=pd_iters))
    rows.append(_score("pd", seed, alpha, beta, pd.iterations_run, pd.phase, gt))
    return rows


def comparison_table(snr_db=5.0, seeds=(0, 1, 2), grid=None,
                     pd_iters=PD_ITERS, baseline_iters=BASELINE_ITERS):
    """Run the benchmark over seeds; per-seed rows plus mean/std per method.

    Returns
    -------
    dict with keys
        "rows" : list of MethodScore (all seeds, method order preserved)
        "mean", "std" : dict method -> statistic of rpSNR over seeds
    """
    rows = []
    for seed in seeds:
        stack, gt = benchmark_stack(snr_db=snr_db, seed=seed, grid=grid)
        rows.extend(benchmark_methods(stack, gt, seed=seed, pd_iters=pd_iters,
                                      baseline_iters=baseline_iters))
    methods = []
    for r in rows:
        if r.method not in methods:
            methods.append(r.method)
    by_method = {
        m: np.array([r.rpsnr for r in rows if r.method == m]) for m in methods
    }
    return {
        "rows": rows,
        "mean": {m: float(v.mean()) for m, v in by_method.items()},
        "std": {m: float(v.std()) for m, v in by_method.items()},
    }


ABLATIONS = (
    ("full", {}),
    ("fidelity-off", {"fidelity_pupil_driven": False}),
    ("pupil-penalty-off", {"penalty_pupil": False}),
    ("grad-penalty-off", {"penalty_grad": False}),
)


def ablation_table(snr_db=5.0, seed=0, grid=None, pd_iters=PD_ITERS):
    """Score the full pupil-driven solver against single-term-disabled variants.

    All variants see the same stack and the same sensor-driven weights; only
    one term is toggled at a time. Returns dict variant -> rpSNR.
    """
    stack, gt = benchmark_stack(snr_db=snr_db, seed=seed, grid=grid)
    scores = {}
    for name, flags in ABLATIONS:
        res = solve_pd(stack, PdParams(max_iters=pd_iters, **flags))
        scores[name] = rpsnr(res.phase, gt)
    return scores
