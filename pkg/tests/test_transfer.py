"""Transfer functions against the direct double-sum oracle, plus PSF/edge laws."""

import numpy as np
import pytest

from dpckit.core import index_negate
from dpckit.pupils import (
    SourcePattern,
    annular_source,
    antisymmetrize,
    half_circle_source,
    objective_pupil,
)
from dpckit.transfer import (
    TransferFunction,
    edge_response,
    edge_step,
    psf,
    ptf,
    ptf_direct,
)
from dpckit.validation import check_transfer_function

from conftest import LAMBDA_UM, NA, make_grid
from helpers import edge_argmax_offsets, orthogonal_peak_ratio


def _source(kind, grid, theta0):
    if kind == "half":
        return half_circle_source(grid, NA, LAMBDA_UM, theta0)
    if kind == "annular":
        return annular_source(grid, NA, 0.5 * NA, LAMBDA_UM, theta0)
    data = np.random.default_rng(7).random(grid.shape)
    return SourcePattern(grid=grid, data=data, theta0=theta0)


class TestPtfAgainstDirectSum:
    @pytest.mark.parametrize("n", [16, 32])
    @pytest.mark.parametrize("theta0", [0.0, np.pi / 2])
    @pytest.mark.parametrize("kind", ["half", "annular", "random"])
    def test_fft_path_matches_direct_sum(self, n, theta0, kind):
        grid = make_grid(n)
        pupil = objective_pupil(grid, NA, LAMBDA_UM)
        src = _source(kind, grid, theta0)
        h_direct = ptf_direct(pupil, src)
        h_fft = ptf(pupil, antisymmetrize(src, pupil), theta0)
        assert h_fft.norm_a > 0 and h_direct.norm_a > 0
        assert np.abs(h_fft.data - h_direct.data).max() <= 1e-10

    def test_direct_sum_of_symmetric_source_is_zero(self, grid16):
        pupil = objective_pupil(grid16, NA, LAMBDA_UM)
        full = SourcePattern(grid=grid16, data=np.ones(grid16.shape))
        tf = ptf_direct(pupil, full)
        assert tf.norm_a == 0.0
        assert np.abs(tf.data).max() == 0.0

    def test_direct_sum_dc_bin_is_exactly_zero(self, grid16, rng):
        pupil = objective_pupil(grid16, NA, LAMBDA_UM)
        src = SourcePattern(grid=grid16, data=rng.random(grid16.shape))
        assert ptf_direct(pupil, src).data[0, 0] == 0.0


class TestPtfInvariants:
    @pytest.mark.parametrize("n", [16, 32])
    @pytest.mark.parametrize(
        "theta0", [0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4]
    )
    @pytest.mark.parametrize("kind", ["half", "annular"])
    def test_pure_imaginary_odd_band_limited(self, n, theta0, kind):
        grid = make_grid(n)
        pupil = objective_pupil(grid, NA, LAMBDA_UM)
        tf = ptf(pupil, antisymmetrize(_source(kind, grid, theta0), pupil), theta0)
        check_transfer_function(tf, na=NA, lambda_um=LAMBDA_UM)
        assert abs(tf.data[0, 0]) <= 1e-12 * np.abs(tf.data).max()
        assert tf.theta0 == theta0

    def test_energy_normalization_makes_unit_rms(self, tfs64):
        for tf in tfs64:
            assert tf.norm_a > 0
            assert abs(np.sqrt(np.mean(np.abs(tf.data) ** 2)) - 1.0) <= 1e-12

    def test_peak_magnitude_is_grid_independent_scale(self):
        peaks = []
        for n in (32, 64, 128):
            grid = make_grid(n)
            pupil = objective_pupil(grid, NA, LAMBDA_UM)
            src = half_circle_source(grid, NA, LAMBDA_UM, 0.0)
            peaks.append(np.abs(ptf(pupil, antisymmetrize(src, pupil)).data).max())
        assert all(3.0 <= p <= 4.5 for p in peaks)
        assert abs(peaks[1] - peaks[2]) / peaks[2] <= 0.03

    def test_half_circle_tf_vanishes_on_zero_fx_line(self, tfs64, grid64):
        tf = tfs64[0]  # theta0 = 0
        scale = np.abs(tf.data).max()
        assert np.abs(tf.data[grid64.f_x == 0]).max() <= 1e-12 * scale

    def test_vanished_illumination_gives_zero_tf(self, grid16):
        pupil = objective_pupil(grid16, NA, LAMBDA_UM)
        full = SourcePattern(grid=grid16, data=pupil.data.copy())
        tf = ptf(pupil, antisymmetrize(full, pupil))
        assert tf.norm_a == 0.0
        assert np.abs(tf.data).max() == 0.0


class TestPsf:
    def test_kernel_is_real_and_odd(self, tfs64):
        for tf in tfs64:
            k = psf(tf)
            assert k.data.dtype == np.float64
            scale = np.abs(k.data).max()
            assert np.abs(k.data + index_negate(k.data)).max() <= 1e-12 * scale

    def test_axis_kernel_vanishes_on_zero_x_column(self, tfs64, grid64):
        k = psf(tfs64[0])  # theta0 = 0
        scale = np.abs(k.data).max()
        assert np.abs(k.data[grid64.x_um == 0]).max() <= 1e-12 * scale

    def test_envelope_decays_beyond_three_wavelengths_per_na(self):
        for n in (64, 128):
            grid = make_grid(n)
            pupil = objective_pupil(grid, NA, LAMBDA_UM)
            src = half_circle_source(grid, NA, LAMBDA_UM, 0.0)
            k = psf(ptf(pupil, antisymmetrize(src, pupil)))
            r = np.hypot(grid.x_um, grid.y_um)
            outside = np.abs(k.data)[r > 3.0 * LAMBDA_UM / NA]
            assert outside.max() <= 0.20 * np.abs(k.data).max()

    def test_zero_tf_gives_zero_kernel(self, grid16):
        tf = TransferFunction(
            grid=grid16, data=np.zeros(grid16.shape, dtype=complex),
            theta0=0.0, norm_a=0.0,
        )
        assert np.abs(psf(tf).data).max() == 0.0

    def test_broken_tf_rejected(self, grid16, rng):
        data = rng.standard_normal(grid16.shape) + 0j  # real, not imaginary-odd
        tf = TransferFunction(grid=grid16, data=data, theta0=0.0, norm_a=1.0)
        with pytest.raises(ValueError, match="imaginary residue"):
            psf(tf)


class TestEdgeStep:
    @pytest.mark.parametrize(
        "angle", [0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi]
    )
    def test_two_transitions_per_period(self, grid64, angle):
        u = edge_step(grid64, angle)
        assert set(np.unique(u)) <= {-1.0, 1.0}
        assert u[0, 0] == 1.0  # origin sits on the +1 side of the edge
        flips_x = (u != np.roll(u, 1, axis=1)).sum(axis=1)
        flips_y = (u != np.roll(u, 1, axis=0)).sum(axis=0)
        # every scan line that is not constant crosses exactly two strips
        assert set(np.unique(flips_x)) <= {0, 2}
        assert set(np.unique(flips_y)) <= {0, 2}

    def test_axis_step_matches_sign_of_x(self, grid64):
        u = edge_step(grid64, 0.0)
        assert np.array_equal(u, np.where(grid64.x_um >= 0, 1.0, -1.0))

    def test_oblique_angle_on_rectangular_grid_still_binary(self):
        from dpckit.core import FrequencyGrid

        grid = FrequencyGrid(width=32, height=16)
        u = edge_step(grid, 0.3)
        assert u.shape == (16, 32)
        assert set(np.unique(u)) <= {-1.0, 1.0}


class TestEdgeResponse:
    @pytest.mark.parametrize("axis", [0, 1])
    def test_aligned_edge_peaks_on_edge_line(self, tfs64, axis):
        kernel = psf(tfs64[axis])
        offsets = edge_argmax_offsets(kernel, kernel.theta0)
        assert offsets.max() <= 1

    @pytest.mark.parametrize("axis", [0, 1])
    def test_orthogonal_edge_is_null(self, tfs64, axis):
        kernel = psf(tfs64[axis])
        assert orthogonal_peak_ratio(kernel, kernel.theta0) <= 1e-10

    def test_response_is_nonnegative_and_grid_shaped(self, tfs64, grid64):
        resp = edge_response(psf(tfs64[0]), 0.0)
        assert resp.shape == grid64.shape
        assert (resp >= 0).all()
