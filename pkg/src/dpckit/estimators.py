"""Estimator-style wrappers around the reconstruction solvers.

Each reconstructor follows the fit/transform protocol: ``fit`` validates a
measurement stack and resolves the data-dependent pieces (grid binding, and
for the pupil-driven method any penalty weights left as None, via the noise
sensor), ``transform`` maps a stack on the same grid to a phase image. The
constructors only store hyperparameters, so ``get_params`` / ``set_params``
and ``clone`` behave as usual.

    >>> rec = PupilDrivenDpc(max_iters=30).fit(stack)
    >>> phase = rec.transform(stack)
"""

import dataclasses

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import solvers
from .sensor import auto_params, noise_sigma
from .validation import check_stack

__all__ = [
    "L2Dpc",
    "IsotropicDpc",
    "TotalVariationDpc",
    "RetinexTVDpc",
    "PupilDrivenDpc",
]


class _StackReconstructor(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing; subclasses implement _resolve/_solve."""

    def fit(self, X, y=None):
        check_stack(X)
        self.grid_ = X.grid
        self.n_axes_ = X.n_axes
        self._resolve(X)
        return self

    def transform(self, X):
        check_is_fitted(self)
        check_stack(X)
        if X.grid != self.grid_:
            raise ValueError(
                f"stack grid {X.grid!r} does not match fitted grid {self.grid_!r}"
            )
        return self._solve(X)

    def _resolve(self, stack):
        pass

    def _solve(self, stack):  # pragma: no cover - abstract
        raise NotImplementedError


class L2Dpc(_StackReconstructor):
    """Tikhonov-regularized spectral deconvolution."""

    def __init__(self, alpha=1e-3):
        self.alpha = alpha

    def _resolve(self, stack):
        self.alpha_ = float(self.alpha)

    def _solve(self, stack):
        return solvers.solve_l2(stack, self.alpha_)


class IsotropicDpc(_StackReconstructor):
    """L2 deconvolution with an additional Gaussian-weighted spectral penalty."""

    def __init__(self, alpha=1e-3, beta=1e-3, gaussian_sigma=5.0):
        self.alpha = alpha
        self.beta = beta
        self.gaussian_sigma = gaussian_sigma

    def _resolve(self, stack):
        self.alpha_ = float(self.alpha)
        self.beta_ = float(self.beta)

    def _solve(self, stack):
        return solvers.solve_iso(
            stack, self.alpha_, self.beta_, gaussian_sigma=self.gaussian_sigma
        )


class TotalVariationDpc(_StackReconstructor):
    """Split-Bregman total-variation reconstruction."""

    def __init__(self, alpha=1e-3, iters=50):
        self.alpha = alpha
        self.iters = iters

    def _resolve(self, stack):
        self.alpha_ = float(self.alpha)

    def _solve(self, stack):
        return solvers.solve_tv(stack, self.alpha_, iters=self.iters)


class RetinexTVDpc(_StackReconstructor):
    """Gradient-domain-fidelity TV reconstruction, immune to constant offsets."""

    def __init__(self, alpha=1e-3, iters=50):
        self.alpha = alpha
        self.iters = iters

    def _resolve(self, stack):
        self.alpha_ = float(self.alpha)

    def _solve(self, stack):
        return solvers.solve_retinex_tv(stack, self.alpha_, iters=self.iters)


class PupilDrivenDpc(_StackReconstructor):
    """Pupil-driven split-Bregman reconstruction.

    alpha/beta left as None are resolved at fit time from the fitted stack's
    out-of-band noise level (alpha = sigma/2, beta = sigma/10); the resolved
    values are exposed as alpha_/beta_. transform returns the phase image;
    reconstruct returns the full result with edge maps and cost trace.
    """

    def __init__(self, alpha=None, beta=None, omega=10.0, alpha0=1.0,
                 beta0=1.0, eta=None, max_iters=50, tol=1e-6, isotropic=False,
                 fidelity_pupil_driven=True, penalty_pupil=True,
                 penalty_grad=True):
        self.alpha = alpha
        self.beta = beta
        self.omega = omega
        self.alpha0 = alpha0
        self.beta0 = beta0
        self.eta = eta
        self.max_iters = max_iters
        self.tol = tol
        self.isotropic = isotropic
        self.fidelity_pupil_driven = fidelity_pupil_driven
        self.penalty_pupil = penalty_pupil
        self.penalty_grad = penalty_grad

    def _params(self):
        return solvers.PdParams(
            alpha=self.alpha, beta=self.beta, omega=self.omega,
            alpha0=self.alpha0, beta0=self.beta0, eta=self.eta,
            max_iters=self.max_iters, tol=self.tol, isotropic=self.isotropic,
            fidelity_pupil_driven=self.fidelity_pupil_driven,
            penalty_pupil=self.penalty_pupil, penalty_grad=self.penalty_grad,
        )

    def _resolve(self, stack):
        params = self._params()
        if params.alpha is None or params.beta is None:
            auto_alpha, auto_beta = auto_params(noise_sigma(stack))
            params = dataclasses.replace(
                params,
                alpha=auto_alpha if params.alpha is None else params.alpha,
                beta=auto_beta if params.beta is None else params.beta,
            )
        self.alpha_ = float(params.alpha)
        self.beta_ = float(params.beta)
        self.params_ = params

    def reconstruct(self, X):
        """Full solver output (phase, edge maps, trace) for a fitted model."""
        check_is_fitted(self)
        check_stack(X)
        if X.grid != self.grid_:
            raise ValueError(
                f"stack grid {X.grid!r} does not match fitted grid {self.grid_!r}"
            )
        return solvers.solve_pd(X, self.params_)

    def _solve(self, stack):
        return solvers.solve_pd(stack, self.params_).phase
