"""Blind noise estimation and the penalty-weight mapping."""

import logging

import numpy as np
import pytest

from conftest import LAMBDA_UM, NA
from dpckit.core import FrequencyGrid
from dpckit.forward import DpcStack, build_tfs, simulate_stack
from dpckit.sensor import NoiseEstimate, auto_params, noise_sigma
from dpckit.transfer import TransferFunction
from helpers import band_limited_phase

# sigma-hat / true-sigma on white Gaussian noise at the default geometry,
# measured once by Monte-Carlo (200 seeds, 64x64, out-of-band fraction 0.56)
CALIBRATION_RATIO = 1.1857


def noise_stack(grid, tfs, sigma, seed):
    rng = np.random.default_rng(seed)
    images = sigma * rng.standard_normal((len(tfs),) + grid.shape)
    return DpcStack(grid=grid, images=images, tfs=tfs, na=NA, lambda_um=LAMBDA_UM)


class TestNoiseSigma:
    def test_zeros_stack_gives_exact_zero(self, grid64, tfs64):
        stack = DpcStack(grid=grid64, images=np.zeros((2,) + grid64.shape),
                         tfs=tfs64, na=NA, lambda_um=LAMBDA_UM)
        estimate = noise_sigma(stack)
        assert estimate.sigma == 0.0
        assert estimate.per_image_sigmas == (0.0, 0.0)

    def test_clean_simulated_stack_is_noise_free(self, clean_stack64):
        # ideal images are band-limited, so the high-pass leaves only fft dust
        assert noise_sigma(clean_stack64).sigma <= 1e-10

    @pytest.mark.parametrize("sigma", [0.01, 0.05, 0.1])
    def test_calibration_ratio_on_white_noise(self, grid64, tfs64, sigma):
        estimates = [noise_sigma(noise_stack(grid64, tfs64, sigma, seed)).sigma
                     for seed in range(10)]
        ratio = np.mean(estimates) / sigma
        assert abs(ratio / CALIBRATION_RATIO - 1.0) <= 0.05

    def test_strictly_increasing_in_noise_level(self, grid64, tfs64):
        values = [noise_sigma(noise_stack(grid64, tfs64, s, seed=100 + k)).sigma
                  for k, s in enumerate((0.01, 0.05, 0.1))]
        assert values[0] < values[1] < values[2]

    def test_invariant_under_band_limited_signal(self, grid64, tfs64):
        base = noise_stack(grid64, tfs64, 0.05, seed=3)
        signal = band_limited_phase(grid64, NA, LAMBDA_UM, seed=9, frac=0.9)
        shifted = DpcStack(grid=grid64, images=base.images + signal,
                           tfs=tfs64, na=NA, lambda_um=LAMBDA_UM)
        assert abs(noise_sigma(shifted).sigma - noise_sigma(base).sigma) <= 1e-9

    @pytest.mark.parametrize("factor", [2.0])
    def test_linear_in_noise_std(self, grid64, tfs64, factor):
        for seed in range(5):
            low = noise_sigma(noise_stack(grid64, tfs64, 0.04, seed)).sigma
            high = noise_sigma(noise_stack(grid64, tfs64, 0.04 * factor,
                                           1000 + seed)).sigma
            assert high / low == pytest.approx(factor, rel=0.05)

    def test_snr_ordering_on_simulated_stacks(self, tfs64, cake64):
        noisier = simulate_stack(cake64, tfs64, snr_db=10.0, seed=0,
                                 na=NA, lambda_um=LAMBDA_UM)
        cleaner = simulate_stack(cake64, tfs64, snr_db=30.0, seed=0,
                                 na=NA, lambda_um=LAMBDA_UM)
        assert noise_sigma(noisier).sigma > noise_sigma(cleaner).sigma

    def test_alpha_floor_recorded(self, noisy_stack64):
        estimate = noise_sigma(noisy_stack64)
        assert estimate.alpha_floor == 1e-6 * np.abs(noisy_stack64.images).max()

    def test_band_reaching_nyquist_rejected(self):
        # dx = 4/2 = 2 um -> Nyquist 0.25 cyc/um < 2NA/lambda = 0.94
        grid = FrequencyGrid(width=16, height=16, pixel_size_um=4.0,
                             magnification=2.0)
        tfs = [TransferFunction(grid=grid, data=np.zeros(grid.shape, complex),
                                theta0=t, norm_a=0.0) for t in (0.0, np.pi / 2)]
        stack = DpcStack(grid=grid, images=np.zeros((2,) + grid.shape),
                         tfs=tfs, na=NA, lambda_um=LAMBDA_UM)
        with pytest.raises(ValueError, match="no out-of-band region"):
            noise_sigma(stack)


class TestAutoParams:
    @pytest.mark.parametrize("sigma, want", [
        (0.0, (0.0, 0.0)),
        (0.1, (0.05, 0.01)),
        (1.0, (0.5, 0.1)),
    ])
    def test_mapping_is_exact(self, sigma, want):
        estimate = NoiseEstimate(sigma=sigma, per_image_sigmas=(sigma,),
                                 alpha_floor=0.0)
        assert auto_params(estimate) == want

    def test_floor_engages_on_clean_stack(self, clean_stack64, caplog):
        estimate = noise_sigma(clean_stack64)
        with caplog.at_level(logging.INFO, logger="dpckit.sensor"):
            alpha, beta = auto_params(estimate)
        assert alpha == estimate.alpha_floor
        assert beta == estimate.sigma / 10.0
        assert "alpha floor engaged" in caplog.text

    def test_floor_silent_when_not_binding(self, caplog):
        estimate = NoiseEstimate(sigma=0.1, per_image_sigmas=(0.1,),
                                 alpha_floor=1e-9)
        with caplog.at_level(logging.INFO, logger="dpckit.sensor"):
            assert auto_params(estimate) == (0.05, 0.01)
        assert caplog.text == ""
