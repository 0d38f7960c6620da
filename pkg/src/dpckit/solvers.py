"""Phase reconstruction from DPC stacks.

Baselines
---------
solve_l2          Tikhonov-regularized single-step deconvolution
solve_iso         L2 plus a Gaussian-weighted low-frequency penalty
solve_tv          split Bregman, traditional fidelity, anisotropic TV penalty
solve_retinex_tv  split Bregman, gradient-domain fidelity, TV penalty

Pupil-driven reconstruction
---------------------------
solve_pd minimizes, by split Bregman with one splitting variable per term,

    sum_n ||H_n S_n - H_n^2 Phi||^2
        + alpha sum_n ||f(H_n Phi)||_1 + beta ||f(grad Phi)||_1,

where f(x) = 1 - exp(-omega |x|) saturates so that edges are counted, not
taxed. The Phi update is a closed-form spectral division; the splitting
variables Psi_n (per-axis edge maps) and G (gradient pair) are updated by the
regularized shrink rst_shrink, whose omega -> 0 limit is the plain soft
threshold the TV baselines use. All solvers share that one skeleton so method
comparisons isolate the cost function, not the implementation.

The public phi_update exposes the spectral Phi step on its own; its
denominator stabilizer eta defaults to 1e-9 times the largest assembled
denominator entry (large enough to condition degenerate bins, far below any
physical term) and is recorded in the result. All functions are pure: the
stack is never modified, and repeated calls give identical results.
"""

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    forward_difference,
    forward_transform,
    inverse_transform,
    spectral_gradient_ops,
)
from .validation import check_finite_array, check_stack

__all__ = [
    "PdParams",
    "PdResult",
    "SolverDivergenceError",
    "rst_shrink",
    "soft_shrink",
    "phi_update",
    "solve_l2",
    "solve_iso",
    "solve_tv",
    "solve_retinex_tv",
    "solve_pd",
]


@dataclass(frozen=True)
class PdParams:
    """Hyperparameters of the pupil-driven reconstructor.

    alpha/beta left as None are resolved from the stack by the noise sensor
    (alpha = sigma/2, beta = sigma/10). The fidelity_* / penalty_* flags
    switch individual cost terms for ablation studies; eta = None applies the
    relative stabilizer rule, an explicit value (including 0) is used as is.
    """

    alpha: float | None = None
    beta: float | None = None
    omega: float = 10.0
    alpha0: float = 1.0
    beta0: float = 1.0
    eta: float | None = None
    max_iters: int = 50
    tol: float = 1e-6
    isotropic: bool = False
    fidelity_pupil_driven: bool = True
    penalty_pupil: bool = True
    penalty_grad: bool = True

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        for name in ("alpha0", "beta0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True, eq=False)
class PdResult:
    """Reconstruction output: phase plus the solver's internal state and trace."""

    phase: np.ndarray
    edge_maps: np.ndarray       # final Psi_n, (n_axes, H, W)
    grad_map: np.ndarray        # final G, (2, H, W)
    cost_trace: np.ndarray
    iterations_run: int
    eta: float


class SolverDivergenceError(RuntimeError):
    """Raised when an iterate stops being finite; carries the partial trace."""

    def __init__(self, iteration, cost_trace):
        super().__init__(
            f"solver diverged at iteration {iteration} (non-finite iterate)"
        )
        self.iteration = iteration
        self.cost_trace = np.asarray(cost_trace)


def rst_shrink(v, threshold, omega, isotropic=False):
    """Regularized shrink: sign(v) * max(|v| - t e^{omega (t - |v|)}, 0).

    The shrink amount decays exponentially past the threshold, so large
    entries pass nearly untouched (approaching a hard threshold as omega
    grows) while omega = 0 gives exactly the plain soft threshold.
    isotropic=True couples entries across axis 0, shrinking the pixelwise
    Euclidean magnitude and rescaling each component.
    """
    v = np.asarray(v, dtype=np.float64)
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    if isotropic:
        mag = np.sqrt((v * v).sum(axis=0))
        shrunk = _shrink_magnitude(mag, threshold, omega)
        with np.errstate(invalid="ignore", divide="ignore"):
            factor = np.where(mag > 0, shrunk / np.where(mag > 0, mag, 1.0), 0.0)
        return v * factor
    return np.sign(v) * _shrink_magnitude(np.abs(v), threshold, omega)


def _shrink_magnitude(mag, t, omega):
    # exponent is clamped to the kept region, where it is <= 0: no overflow
    keep = mag >= t
    amount = t * np.exp(np.minimum(omega * (t - mag), 0.0))
    return np.where(keep, mag - amount, 0.0)


def soft_shrink(v, threshold, isotropic=False):
    """Plain soft threshold, the omega = 0 case of rst_shrink."""
    return rst_shrink(v, threshold, 0.0, isotropic=isotropic)


def _stack_spectra(stack):
    images = check_stack(stack)
    h = np.stack([tf.data for tf in stack.tfs])
    s_hat = forward_transform(images)
    return h, s_hat


def _gradient(phase):
    return np.stack(
        [forward_difference(phase, axis=1), forward_difference(phase, axis=0)]
    )


class _System:
    """Precomputed spectral pieces of the Phi update for one configuration."""

    def __init__(self, stack, params):
        h, s_hat = _stack_spectra(stack)
        ops = spectral_gradient_ops(stack.grid)
        self.h = h
        self.s_hat = s_hat
        self.mults = (ops.grad_x_mult, ops.grad_y_mult)
        self.params = params
        h2 = (h * h.conj()).real
        if params.fidelity_pupil_driven:
            self.num_fid = (h.conj() ** 2 * h * s_hat).sum(axis=0)
            den = (h2 * h2).sum(axis=0)
        else:
            self.num_fid = (h.conj() * s_hat).sum(axis=0)
            den = h2.sum(axis=0)
        if params.penalty_pupil:
            den = den + params.alpha0 * h2.sum(axis=0)
        if params.penalty_grad:
            den = den + params.beta0 * ops.lap_mult
        if params.eta is None:
            # relative rule: grid-independent conditioning, but small enough
            # not to bias the weakly-constrained low-frequency bins, whose
            # fidelity weight sum |H|^4 is orders below the denominator peak
            self.eta = 1e-9 * float(den.max())
        else:
            self.eta = float(params.eta)
        if self.eta == 0.0 and (den == 0.0).any():
            idx = tuple(int(v) for v in np.argwhere(den == 0.0)[0])
            raise ValueError(
                f"denominator vanishes at bin {idx} with eta = 0; "
                "the update is undefined there"
            )
        self.den = den + self.eta

    def phi_step(self, psis, bs, grads, ds):
        # raw ffts: mid-solve overflow must surface as a non-finite iterate
        # for the caller's divergence check, not as a transform-guard error
        num = self.num_fid
        if self.params.penalty_pupil:
            num = num + self.params.alpha0 * (
                self.h.conj() * np.fft.fft2(psis + bs)
            ).sum(axis=0)
        if self.params.penalty_grad:
            g_hat = np.fft.fft2(grads + ds)
            num = num + self.params.beta0 * (
                self.mults[0].conj() * g_hat[0] + self.mults[1].conj() * g_hat[1]
            )
        return np.fft.ifft2(num / self.den).real


def phi_update(stack, psis=None, bs=None, grads=None, ds=None, params=None):
    """One closed-form spectral Phi update given the splitting variables.

    Solves the normal equations of the active quadratic terms:

        [ sum_n (|H|^4 + alpha0 |H|^2) + beta0 L + eta ] Phi_hat
            = sum_n [ conj(H)^2 H S_hat + alpha0 conj(H) (Psi_hat + b_hat) ]
              + beta0 grad^T (G_hat + d_hat)

    (|H|^4 -> |H|^2 and conj(H)^2 H -> conj(H) when the pupil-driven fidelity
    is switched off; terms drop with their flags). Splitting variables default
    to zero, matching the solver's initialization.
    """
    params = params or PdParams()
    system = _System(stack, params)
    n, shape = len(stack.tfs), stack.grid.shape
    if psis is None:
        psis = np.zeros((n,) + shape)
    if bs is None:
        bs = np.zeros((n,) + shape)
    if grads is None:
        grads = np.zeros((2,) + shape)
    if ds is None:
        ds = np.zeros((2,) + shape)
    for name, aux in (("psis", psis), ("bs", bs), ("grads", grads), ("ds", ds)):
        check_finite_array(aux, name)
    return system.phi_step(np.asarray(psis), np.asarray(bs),
                           np.asarray(grads), np.asarray(ds))


def solve_l2(stack, alpha):
    """Tikhonov deconvolution: Phi_hat = sum conj(H) S_hat / (sum |H|^2 + alpha)."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    h, s_hat = _stack_spectra(stack)
    num = (h.conj() * s_hat).sum(axis=0)
    den = (h * h.conj()).real.sum(axis=0) + alpha
    return inverse_transform(num / den).real


def solve_iso(stack, alpha, beta, gaussian_sigma=5.0):
    """L2 deconvolution with an extra Gaussian-weighted penalty.

    The denominator gains beta |G_hat|^2 with G the periodic unit-sum Gaussian
    kernel of the given sigma (pixels), penalizing the low frequencies the
    kernel passes. beta = 0 reduces exactly to solve_l2.
    """
    from scipy.ndimage import gaussian_filter

    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if beta < 0 or gaussian_sigma <= 0:
        raise ValueError("need beta >= 0 and gaussian_sigma > 0")
    h, s_hat = _stack_spectra(stack)
    impulse = np.zeros(stack.grid.shape)
    impulse[0, 0] = 1.0
    g_hat = forward_transform(gaussian_filter(impulse, gaussian_sigma, mode="wrap"))
    num = (h.conj() * s_hat).sum(axis=0)
    den = (h * h.conj()).real.sum(axis=0) + alpha + beta * (g_hat * g_hat.conj()).real
    return inverse_transform(num / den).real


def _tv_like(stack, alpha, iters, gradient_fidelity, return_trace=False):
    """Shared split-Bregman TV skeleton for the two baselines."""
    if not alpha >= 0:
        raise ValueError(f"alpha must be >= 0, got {alpha!r}")
    h, s_hat = _stack_spectra(stack)
    ops = spectral_gradient_ops(stack.grid)
    mults = (ops.grad_x_mult, ops.grad_y_mult)
    h2 = (h * h.conj()).real.sum(axis=0)
    beta0 = 1.0
    if gradient_fidelity:
        num_fid = (h.conj() * s_hat).sum(axis=0) * ops.lap_mult
        den = h2 * ops.lap_mult + beta0 * ops.lap_mult
    else:
        num_fid = (h.conj() * s_hat).sum(axis=0)
        den = h2 + beta0 * ops.lap_mult
    # the DC bin carries no fidelity (H(0) = 0) and no gradient: pin it to 0
    zero_bins = den == 0.0
    den = np.where(zero_bins, 1.0, den)
    shape = stack.grid.shape
    grads = np.zeros((2,) + shape)
    ds = np.zeros((2,) + shape)
    phase = np.zeros(shape)
    trace = []
    for it in range(1, iters + 1):
        # raw ffts: a diverging iterate must reach the isfinite check below
        # rather than trip the transform guard with a bare ValueError
        g_hat = np.fft.fft2(grads + ds)
        num = num_fid + beta0 * (mults[0].conj() * g_hat[0] + mults[1].conj() * g_hat[1])
        phase_new = np.fft.ifft2(np.where(zero_bins, 0.0, num / den)).real
        if not np.isfinite(phase_new).all():
            raise SolverDivergenceError(it, trace)
        dphi = _gradient(phase_new)
        grads = soft_shrink(dphi - ds, alpha / beta0)
        ds = ds + grads - dphi
        residual_hat = s_hat - h * np.fft.fft2(phase_new)
        if gradient_fidelity:
            fid = sum(
                float((np.fft.ifft2(m * residual_hat).real ** 2).sum())
                for m in mults
            )
        else:
            fid = float((np.fft.ifft2(residual_hat).real ** 2).sum())
        trace.append(fid + alpha * float(np.abs(dphi).sum()))
        done = (
            np.linalg.norm(phase_new - phase) < 1e-6 * max(np.linalg.norm(phase), 1e-300)
            and it > 1
        )
        phase = phase_new
        if done:
            break
    if return_trace:
        return phase, np.asarray(trace)
    return phase


def solve_tv(stack, alpha, iters=50, return_trace=False):
    """Split-Bregman minimizer of sum ||S - H Phi||^2 + alpha ||grad Phi||_1.

    With return_trace=True, also returns the per-iteration objective values.
    """
    return _tv_like(stack, alpha, iters, gradient_fidelity=False,
                    return_trace=return_trace)


def solve_retinex_tv(stack, alpha, iters=50, return_trace=False):
    """Gradient-domain fidelity sum ||grad S - H grad Phi||^2 + alpha ||grad Phi||_1.

    Constant offsets in the images lie in the fidelity null space and are
    absorbed by pinning the DC bin of Phi to 0, so the output is invariant
    under adding a constant to every image. With return_trace=True, also
    returns the per-iteration objective values.
    """
    return _tv_like(stack, alpha, iters, gradient_fidelity=True,
                    return_trace=return_trace)


def _pd_cost(system, phase, params, alpha, beta):
    """Objective value at Phi (the traced quantity; splitting-free).

    Uses raw ffts so an overflowing iterate yields an inf/nan trace entry
    instead of tripping the transform guard mid-solve.
    """
    phi_hat = np.fft.fft2(phase)
    if params.fidelity_pupil_driven:
        res = np.fft.ifft2(system.h * (system.s_hat - system.h * phi_hat))
    else:
        res = np.fft.ifft2(system.s_hat - system.h * phi_hat)
    cost = float((res.real ** 2).sum())

    def pen(values, coupled):
        if params.omega == 0.0:
            mag = np.abs(values) if not coupled else np.sqrt((values ** 2).sum(axis=0))
            return float(mag.sum())
        if coupled:
            mag = np.sqrt((values ** 2).sum(axis=0))
            return float((1.0 - np.exp(-params.omega * mag)).sum())
        return float((1.0 - np.exp(-params.omega * np.abs(values))).sum())

    if params.penalty_pupil:
        resp = np.fft.ifft2(system.h * phi_hat).real
        cost += alpha * pen(resp, params.isotropic)
    if params.penalty_grad:
        cost += beta * pen(_gradient(phase), params.isotropic)
    return cost


def solve_pd(stack, params=None):
    """Pupil-driven reconstruction by split Bregman.

    Starting from Phi = Psi = G = b = d = 0, each iteration runs the spectral
    Phi update, shrinks Psi_n on H_n Phi - b_n (threshold alpha/alpha0) and G
    on grad Phi - d (threshold beta/beta0), then steps the Bregman
    accumulators b_n += Psi_n - H_n Phi and d += G - grad Phi. Stops early
    when the relative Phi change drops below params.tol. The traced objective
    is evaluated at Phi each iteration; its final value not exceeding its
    first is asserted by the tests, not enforced here.
    """
    params = params or PdParams()
    if params.alpha is None or params.beta is None:
        from .sensor import auto_params, noise_sigma

        auto_alpha, auto_beta = auto_params(noise_sigma(stack))
        params = replace(
            params,
            alpha=params.alpha if params.alpha is not None else auto_alpha,
            beta=params.beta if params.beta is not None else auto_beta,
        )
    alpha, beta = float(params.alpha), float(params.beta)
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be >= 0")
    system = _System(stack, params)
    n, shape = len(stack.tfs), stack.grid.shape
    psis = np.zeros((n,) + shape)
    bs = np.zeros((n,) + shape)
    grads = np.zeros((2,) + shape)
    ds = np.zeros((2,) + shape)
    phase = np.zeros(shape)
    trace = []
    iterations = 0
    for it in range(1, params.max_iters + 1):
        phase_new = system.phi_step(psis, bs, grads, ds)
        if not np.isfinite(phase_new).all():
            raise SolverDivergenceError(it, trace)
        if params.penalty_pupil:
            resp = np.fft.ifft2(system.h * np.fft.fft2(phase_new)).real
            psis = rst_shrink(resp - bs, alpha / params.alpha0, params.omega,
                              isotropic=params.isotropic)
            bs = bs + psis - resp
        if params.penalty_grad:
            dphi = _gradient(phase_new)
            grads = rst_shrink(dphi - ds, beta / params.beta0, params.omega,
                               isotropic=params.isotropic)
            ds = ds + grads - dphi
        trace.append(_pd_cost(system, phase_new, params, alpha, beta))
        iterations = it
        rel = np.linalg.norm(phase_new - phase) / max(
            np.linalg.norm(phase), 1e-300
        )
        phase = phase_new
        if it > 1 and rel < params.tol:
            break
    return PdResult(
        phase=phase,
        edge_maps=psis,
        grad_map=grads,
        cost_trace=np.asarray(trace),
        iterations_run=iterations,
        eta=system.eta,
    )
