import numpy as np
import pytest

from ofdm_im_dither.channel import (
    ChannelRealization,
    apply_channel,
    calibrate_noise,
    energy_per_bit,
    sample_channel,
)
from ofdm_im_dither.dither import ConstraintScheme, constraint_arrays, generate_dither_icf
from ofdm_im_dither.errors import InvalidTapsError
from ofdm_im_dither.modem import modulate


def test_flat_fading_single_tap(rng):
    H = sample_channel(1, 128, rng)
    np.testing.assert_allclose(np.abs(H), np.abs(H[0]), rtol=1e-12)


def test_unit_average_gain(rng):
    H = sample_channel(8, 128, rng, size=100_000 // 128 + 1)
    assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, abs=0.02)
    single = sample_channel(8, 128, rng, size=100_000)[:, 5]
    assert np.mean(np.abs(single) ** 2) == pytest.approx(1.0, abs=0.02)


def test_interleaved_subcarriers_uncorrelated(rng):
    H = sample_channel(8, 128, rng, size=100_000)
    for a, b in [(0, 32), (32, 64), (5, 101)]:
        rho = np.mean(H[:, a] * np.conj(H[:, b])) / np.sqrt(
            np.mean(np.abs(H[:, a]) ** 2) * np.mean(np.abs(H[:, b]) ** 2))
        assert abs(rho) < 0.05
    # adjacent subcarriers of an 8-tap channel are strongly correlated
    rho_adj = np.mean(H[:, 0] * np.conj(H[:, 1]))
    assert abs(rho_adj) > 0.9


@pytest.mark.parametrize("taps", [0, 129])
def test_taps_out_of_range(taps, rng):
    with pytest.raises(InvalidTapsError):
        sample_channel(taps, 128, rng)


def test_apply_channel_noiseless(rng):
    X = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    np.testing.assert_array_equal(apply_channel(X, ChannelRealization(np.ones(128), 0.0)), X)
    H = sample_channel(8, 128, rng)
    Y = apply_channel(X, ChannelRealization(H, 0.0))
    np.testing.assert_allclose(Y / H, X, rtol=1e-12)


def test_noise_variance(rng):
    X = np.ones((1000, 100), dtype=complex)
    H = np.full(100, 0.5 + 0.5j)
    Y = apply_channel(X, ChannelRealization(H, 0.3), rng)
    assert np.var(Y - H * X) == pytest.approx(0.3, rel=0.02)


def test_energy_per_bit_mean_symbol(cfg):
    # every active subcarrier at the mean 16-QAM energy: Eb = g*k*10 / m
    X = np.zeros(cfg.N, dtype=complex)
    X[: cfg.g * cfg.k] = np.sqrt(10)
    assert energy_per_bit(X, cfg) == pytest.approx(2.0, abs=1e-12)
    assert calibrate_noise(0.0, X, cfg) == pytest.approx(2.0, abs=1e-12)
    assert calibrate_noise(10.0, X, cfg) == pytest.approx(0.2, abs=1e-12)


def test_random_symbols_energy(cfg, rng):
    batch = modulate(rng.integers(0, 2, (5000, cfg.m), dtype=np.uint8), cfg)
    assert energy_per_bit(batch.X, cfg) == pytest.approx(2.0, rel=0.01)


def test_dither_raises_eb_and_n0(cfg, rng):
    batch = modulate(rng.integers(0, 2, (200, cfg.m), dtype=np.uint8), cfg)
    D = generate_dither_icf(batch.X, constraint_arrays(batch, ConstraintScheme.proposed(0.5), cfg), cfg)
    assert energy_per_bit(batch.X + D, cfg) > energy_per_bit(batch.X, cfg)
    assert calibrate_noise(20, batch.X + D, cfg) > calibrate_noise(20, batch.X, cfg)
    # dither energy is simply additive: it lives on subcarriers where X is zero
    expected = (np.sum(np.abs(batch.X) ** 2) + np.sum(np.abs(D) ** 2)) / 200 / cfg.m
    assert energy_per_bit(batch.X + D, cfg) == pytest.approx(expected, rel=1e-12)
