"""Grids, transforms, and spectral operators against direct oracles."""

import numpy as np
import pytest

from dpckit.core import (
    FrequencyGrid,
    forward_difference,
    forward_transform,
    fourier_shift,
    index_negate,
    inverse_transform,
    spectral_gradient_ops,
)

from conftest import make_grid


class TestFrequencyGrid:
    @pytest.mark.parametrize("bad", [15, 0, -2, 7])
    def test_odd_or_nonpositive_sizes_rejected(self, bad):
        with pytest.raises(ValueError, match="positive even"):
            FrequencyGrid(width=bad, height=16)
        with pytest.raises(ValueError, match="positive even"):
            FrequencyGrid(width=16, height=bad)

    @pytest.mark.parametrize("field", ["pixel_size_um", "magnification"])
    @pytest.mark.parametrize("bad", [0.0, -1.0, np.nan, np.inf])
    def test_bad_optics_rejected(self, field, bad):
        with pytest.raises(ValueError, match=field):
            FrequencyGrid(**{field: bad})

    def test_zero_bin_is_exactly_zero(self, grid32):
        assert grid32.f_x[0, 0] == 0.0
        assert grid32.f_y[0, 0] == 0.0
        assert grid32.f_radius[0, 0] == 0.0

    def test_radius_symmetric_under_index_negation(self, grid32):
        assert np.array_equal(grid32.f_radius, index_negate(grid32.f_radius))

    def test_sampling_algebra(self):
        g = FrequencyGrid(width=64, height=32, pixel_size_um=4.0, magnification=10.0)
        assert g.dx_um == pytest.approx(0.4)
        assert g.df_x == pytest.approx(1.0 / (64 * 0.4))
        assert g.df_y == pytest.approx(1.0 / (32 * 0.4))
        assert g.nyquist == pytest.approx(1.25)
        assert g.shape == (32, 64)

    def test_frequency_steps_match_coordinates(self, grid16):
        assert grid16.f_x[0, 1] == pytest.approx(grid16.df_x)
        assert grid16.f_y[1, 0] == pytest.approx(grid16.df_y)


class TestTransforms:
    @pytest.mark.parametrize("n", [8, 32, 256])
    def test_round_trip(self, rng, n):
        x = rng.standard_normal((n, n))
        back = inverse_transform(forward_transform(x))
        assert np.abs(back - x).max() <= 1e-12 * np.abs(x).max()

    def test_parseval(self, rng):
        x = rng.standard_normal((32, 32))
        spectrum = forward_transform(x)
        lhs = (x ** 2).sum()
        rhs = (np.abs(spectrum) ** 2).sum() / x.size
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_matches_direct_dft_sum(self, rng):
        x = rng.standard_normal((8, 8))
        direct = np.zeros((8, 8), dtype=complex)
        for u in range(8):
            for v in range(8):
                for i in range(8):
                    for j in range(8):
                        direct[u, v] += x[i, j] * np.exp(-2j * np.pi * (u * i + v * j) / 8)
        assert np.abs(forward_transform(x) - direct).max() <= 1e-10

    def test_constant_image_is_dc_only(self):
        spectrum = forward_transform(np.full((16, 16), 3.5))
        assert spectrum[0, 0] == pytest.approx(3.5 * 256)
        off_dc = spectrum.copy()
        off_dc[0, 0] = 0.0
        assert np.abs(off_dc).max() <= 1e-10 * np.abs(spectrum[0, 0])

    def test_impulse_has_flat_spectrum(self):
        x = np.zeros((16, 16))
        x[0, 0] = 1.0
        assert np.abs(forward_transform(x) - 1.0).max() <= 1e-12

    def test_non_finite_rejected(self):
        x = np.zeros((8, 8))
        x[3, 3] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            forward_transform(x)
        with pytest.raises(ValueError, match="non-finite"):
            inverse_transform(x.astype(complex))


class TestSpectralOperators:
    def test_dc_multipliers_exactly_zero(self, grid32):
        ops = spectral_gradient_ops(grid32)
        assert ops.grad_x_mult[0, 0] == 0.0
        assert ops.grad_y_mult[0, 0] == 0.0
        assert ops.lap_mult[0, 0] == 0.0

    def test_lap_is_squared_gradient_magnitude(self, grid32):
        ops = spectral_gradient_ops(grid32)
        expected = np.abs(ops.grad_x_mult) ** 2 + np.abs(ops.grad_y_mult) ** 2
        assert np.allclose(ops.lap_mult, expected, atol=1e-15)
        assert not np.iscomplexobj(ops.lap_mult)
        assert (ops.lap_mult >= 0).all()

    def test_matches_spatial_forward_difference(self, grid32, rng):
        ops = spectral_gradient_ops(grid32)
        for _ in range(10):
            x = rng.standard_normal(grid32.shape)
            spectrum = forward_transform(x)
            gx = inverse_transform(ops.grad_x_mult * spectrum).real
            gy = inverse_transform(ops.grad_y_mult * spectrum).real
            assert np.abs(gx - forward_difference(x, axis=1)).max() <= 1e-12
            assert np.abs(gy - forward_difference(x, axis=0)).max() <= 1e-12

    def test_constant_image_has_zero_gradient(self, grid16):
        ops = spectral_gradient_ops(grid16)
        spectrum = forward_transform(np.full(grid16.shape, 2.0))
        gx = inverse_transform(ops.grad_x_mult * spectrum).real
        assert np.abs(gx).max() <= 1e-12

    def test_ramp_with_wraparound(self, grid16):
        ramp = np.broadcast_to(np.arange(16.0), (16, 16)).copy()
        ops = spectral_gradient_ops(grid16)
        gx = inverse_transform(ops.grad_x_mult * forward_transform(ramp)).real
        expected = np.ones_like(ramp)
        expected[:, -1] = -15.0  # periodic wrap of the ramp
        assert np.abs(gx - expected).max() <= 1e-10

    def test_grad_transpose_grad_is_lap_mult(self, rng):
        grid = make_grid(8)
        ops = spectral_gradient_ops(grid)
        # dense forward-difference matrices on the flattened image
        n = 8 * 8
        dx = np.zeros((n, n))
        dy = np.zeros((n, n))
        for i in range(8):
            for j in range(8):
                k = i * 8 + j
                dx[k, i * 8 + (j + 1) % 8] += 1.0
                dx[k, k] -= 1.0
                dy[k, ((i + 1) % 8) * 8 + j] += 1.0
                dy[k, k] -= 1.0
        lap_dense = dx.T @ dx + dy.T @ dy
        x = rng.standard_normal(grid.shape)
        via_dense = (lap_dense @ x.ravel()).reshape(grid.shape)
        via_mult = inverse_transform(ops.lap_mult * forward_transform(x)).real
        assert np.abs(via_dense - via_mult).max() <= 1e-10


class TestIndexOps:
    def test_index_negate_fixes_dc_and_nyquist(self, rng):
        x = rng.standard_normal((8, 8))
        y = index_negate(x)
        assert y[0, 0] == x[0, 0]
        assert y[4, 4] == x[4, 4]
        assert y[0, 4] == x[0, 4]
        assert y[1, 2] == x[-1, -2]

    def test_index_negate_is_involution(self, rng):
        x = rng.standard_normal((6, 10))
        assert np.array_equal(index_negate(index_negate(x)), x)

    def test_fourier_shift_integer_matches_roll(self, rng):
        x = rng.standard_normal((16, 16))
        shifted = fourier_shift(x, 3, -2)
        assert np.allclose(shifted, np.roll(x, (-2, 3), axis=(0, 1)), atol=1e-12)

    def test_fourier_shift_fractional_on_harmonic(self):
        n = 16
        j = np.arange(n)[None, :] * np.ones((n, 1))
        x = np.cos(2 * np.pi * 3 * j / n)
        shifted = fourier_shift(x, 1.5, 0.0)
        assert np.abs(shifted - np.cos(2 * np.pi * 3 * (j - 1.5) / n)).max() <= 1e-12

    def test_fourier_shift_fractional_round_trip_band_limited(self, rng):
        # real-output fractional shifts are only invertible below Nyquist
        spec = np.fft.fft2(rng.standard_normal((16, 16)))
        kx, ky = np.fft.fftfreq(16)[None, :], np.fft.fftfreq(16)[:, None]
        spec[(np.abs(kx) >= 0.25) | (np.abs(ky) >= 0.25)] = 0.0
        x = np.fft.ifft2(spec).real
        back = fourier_shift(fourier_shift(x, 1.5, -0.25), -1.5, 0.25)
        assert np.abs(back - x).max() <= 1e-12
