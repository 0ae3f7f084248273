import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from phy_backscatter import PhyLink, balanced_bits, ber_curve, demodulate, modulate, received_signal
from scenario_error import DemodulationError, ScenarioValidationError


@pytest.fixture
def link():
    return PhyLink()


class TestPhyLink:
    def test_levels_must_be_ordered(self):
        with pytest.raises(ScenarioValidationError):
            PhyLink(reflect_coeff_on=0.2, reflect_coeff_off=0.7)

    def test_window_must_fit_in_a_bit(self):
        with pytest.raises(ScenarioValidationError):
            PhyLink(samples_per_bit=4, avg_window=8)

    def test_snr_convention(self, link):
        assert link.with_snr(20.0).noise_sigma == pytest.approx(0.1)
        assert link.with_snr(0.0).noise_sigma == pytest.approx(link.carrier_amplitude)


class TestModulation:
    def test_constant_streams(self, link):
        assert_array_equal(modulate([0, 0], link), np.full(32, link.reflect_coeff_off))
        assert_array_equal(modulate([1, 1], link), np.full(32, link.reflect_coeff_on))

    def test_staircase(self, link):
        waveform = modulate([1, 0, 1], link)
        assert waveform.size == 3 * link.samples_per_bit
        plateaus = waveform.reshape(3, -1)
        assert_array_equal(plateaus[:, 0], [0.7, 0.2, 0.7])
        assert np.all(plateaus == plateaus[:, :1])

    @pytest.mark.parametrize("bits", [[], [0, 2]])
    def test_invalid_streams(self, link, bits):
        with pytest.raises(DemodulationError):
            modulate(bits, link)

    def test_noiseless_levels(self, link):
        samples = received_signal([0, 1], link)
        assert_allclose(samples[:16], 1.0 + 0.5 * 0.2)
        assert_allclose(samples[16:], 1.0 + 0.5 * 0.7)

    def test_seeded_noise_is_reproducible(self, link):
        noisy = link.with_snr(10.0)
        assert_array_equal(received_signal([0, 1, 1, 0], noisy, 5), received_signal([0, 1, 1, 0], noisy, 5))
        assert np.all(received_signal([0, 1, 1, 0], noisy, 5) >= 0.0)


class TestDemodulation:
    def test_noiseless_loopback(self, link):
        bits = balanced_bits(10_000, np.random.default_rng(1))
        assert_array_equal(demodulate(received_signal(bits, link), link), bits)

    def test_twenty_db_is_nearly_error_free(self, link):
        rng = np.random.default_rng(2)
        bits = balanced_bits(10_000, rng)
        noisy = link.with_snr(20.0)
        errors = np.count_nonzero(demodulate(received_signal(bits, noisy, rng), noisy) != bits)
        assert errors <= 10

    def test_flat_envelope_is_ambiguous(self, link, caplog):
        with caplog.at_level(logging.WARNING):
            decoded = demodulate(received_signal([1] * 8, link), link)
        assert_array_equal(decoded, np.zeros(8))
        assert "Flat envelope" in caplog.text

    def test_length_mismatch(self, link):
        with pytest.raises(DemodulationError):
            demodulate(np.ones(link.samples_per_bit + 1), link)


class TestBerCurve:
    def test_balanced_bits(self):
        bits = balanced_bits(1001, np.random.default_rng(0))
        assert bits.size == 1001
        assert bits.sum() == 500

    def test_operating_points(self, link):
        high, low = ber_curve(link, [20.0, -10.0], n_bits=100_000, seed=11)
        assert high.ber <= 1e-3
        assert abs(low.ber - 0.5) <= 0.05
        assert low.errors == round(low.ber * low.n_bits)

    def test_indistinguishable_levels(self):
        link = PhyLink(backscatter_path_gain=0.0)
        (point,) = ber_curve(link, [10.0], n_bits=100_000, seed=3)
        assert abs(point.ber - 0.5) <= 0.02

    def test_monotone_within_confidence(self, link):
        points = ber_curve(link, [-10.0, -5.0, 0.0, 5.0, 10.0], n_bits=20_000, seed=4)
        for lower, higher in zip(points, points[1:]):
            spread = 1.96 * math.sqrt((lower.ber * (1 - lower.ber) + higher.ber * (1 - higher.ber)) / lower.n_bits)
            assert higher.ber <= lower.ber + spread

    def test_deterministic(self, link):
        assert ber_curve(link, [0.0, 5.0], n_bits=5_000, seed=9) == ber_curve(link, [0.0, 5.0], n_bits=5_000, seed=9)

    def test_minimum_bits(self, link):
        with pytest.raises(ScenarioValidationError):
            ber_curve(link, [0.0], n_bits=999)
