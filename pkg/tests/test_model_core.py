import logging
import math

import numpy as np
import pytest

from model_core import (MODE_BACKSCATTER, MODE_HARVEST_THEN_TRANSMIT, PHASE_ACTIVE, PHASE_BACKSCATTER,
                        PHASE_HARVEST, Allocation, ChannelGains, build_schedule, check_feasibility,
                        dbm_to_watts, default_scenario, evaluate, friis_gain, harvested_energy,
                        st_throughput, stored_energy, sum_throughput, watts_to_dbm, with_placement)
from scenario_error import DomainError, ScenarioValidationError


class TestUnits:
    def test_dbm_round_trip(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0)
        assert dbm_to_watts(-25.0) == pytest.approx(3.1623e-6, rel=1e-4)
        assert watts_to_dbm(dbm_to_watts(-25.0)) == pytest.approx(-25.0)


class TestFriisGain:
    def test_reference_distance(self):
        assert friis_gain(6.0, 6.0, 900e6, 11.0) == pytest.approx(9.2035e-5, rel=1e-4)

    def test_inverse_square(self):
        near = friis_gain(6.0, 6.0, 900e6, 2.0)
        far = friis_gain(6.0, 6.0, 900e6, 4.0)
        assert near / far == pytest.approx(4.0)

    @pytest.mark.parametrize("distance", [0.0, -1.0])
    def test_non_positive_distance(self, distance):
        with pytest.raises(DomainError):
            friis_gain(6.0, 6.0, 900e6, distance)

    def test_near_field_flag(self, caplog):
        cfg = with_placement(default_scenario(), (0.01, 11.0), (2.0, 2.5))
        with caplog.at_level(logging.WARNING):
            gains = ChannelGains.from_config(cfg)
        assert gains.near_field == (True, False)
        assert gains.h[0] > 1.0
        assert "near field" in caplog.text


class TestScenarioConfig:
    def test_tau_out_of_range(self):
        with pytest.raises(ScenarioValidationError) as e:
            default_scenario(tau=1.5)
        assert e.value.field == "tau"

    def test_list_length_mismatch(self):
        with pytest.raises(ScenarioValidationError) as e:
            default_scenario(d_st_sap=(2.0,))
        assert e.value.field == "d_st_sap"

    def test_lists_become_tuples(self):
        cfg = default_scenario(r_b=[1e5, 1e5])
        assert cfg.r_b == (1e5, 1e5)


class TestAllocation:
    def test_alpha_must_sum_to_one(self):
        with pytest.raises(ScenarioValidationError) as e:
            Allocation(rho=0.5, alpha=(0.5, 0.4), beta=(0.5, 0.5))
        assert e.value.field == "alpha"

    def test_zero_beta_is_accepted(self):
        alloc = Allocation(rho=0.0, alpha=(0.5, 0.5), beta=(0.0, 0.0))
        assert alloc.n_st == 2

    def test_partial_beta_is_rejected(self):
        with pytest.raises(ScenarioValidationError):
            Allocation(rho=0.0, alpha=(0.5, 0.5), beta=(0.2, 0.2))

    def test_rho_range(self):
        with pytest.raises(ScenarioValidationError):
            Allocation(rho=1.5, alpha=(1.0,), beta=(1.0,))


class TestEnergyAndThroughput:
    def test_full_harvest_energy(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=1.0, alpha=(0.5, 0.5), beta=(0.5, 0.5))
        assert harvested_energy(cfg, gains, alloc, 0) == pytest.approx(9.6637e-6, rel=1e-4)

    def test_backscattering_st_does_not_harvest(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=0.0, alpha=(1.0, 0.0), beta=(0.0, 1.0))
        assert harvested_energy(cfg, gains, alloc, 0) == 0.0
        assert stored_energy(cfg, gains, alloc, 0) == 0.0
        assert stored_energy(cfg, gains, alloc, 1) == pytest.approx(9.6637e-6 - cfg.e_c, rel=1e-4)

    def test_backscatter_only_throughput(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=0.0, alpha=(1.0, 0.0), beta=(0.0, 0.0))
        assert st_throughput(cfg, gains, alloc, 0) == (pytest.approx(70_000.0), 0.0)
        assert sum_throughput(cfg, gains, alloc) == pytest.approx(70_000.0)

    def test_active_throughput_closed_form(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=1.0, alpha=(0.5, 0.5), beta=(1.0, 0.0))
        stored = stored_energy(cfg, gains, alloc, 0)
        expected = 0.3 * cfg.eta * cfg.bandwidth_w * math.log2(1.0 + stored * gains.g[0] / (0.3 * cfg.noise_power))
        backscatter, active = st_throughput(cfg, gains, alloc, 0)
        assert backscatter == 0.0
        assert active == pytest.approx(expected, rel=1e-12)

    def test_sum_is_sum_of_parts(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=0.3, alpha=(0.4, 0.6), beta=(0.7, 0.3))
        parts = [v for n in range(2) for v in st_throughput(cfg, gains, alloc, n)]
        assert sum_throughput(cfg, gains, alloc) == pytest.approx(sum(parts), rel=1e-14)

    def test_index_out_of_range(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=0.3, alpha=(0.4, 0.6), beta=(0.7, 0.3))
        with pytest.raises(DomainError):
            harvested_energy(cfg, gains, alloc, 2)


class TestFeasibility:
    def test_idle_st_with_energy_meets_power(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=1.0, alpha=(0.5, 0.5), beta=(1.0, 0.0))
        report = check_feasibility(cfg, gains, alloc)
        assert report.feasible_power == (True, True)
        # ST 1 neither backscatters nor transmits
        assert report.feasible_qos == (True, False)
        assert not report.feasible

    def test_power_cap(self, two_st):
        cfg, gains = two_st
        capped = default_scenario(p_bar=1e-6)
        alloc = Allocation(rho=1.0, alpha=(0.5, 0.5), beta=(0.5, 0.5))
        assert check_feasibility(cfg, gains, alloc).feasible_power == (True, True)
        assert check_feasibility(capped, gains, alloc).feasible_power == (False, False)

    def test_energy_flag_is_reported_only(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=0.0, alpha=(1.0, 0.0), beta=(0.0, 1.0))
        report = check_feasibility(cfg, gains, alloc)
        assert report.feasible_energy == (False, True)


class TestEvaluateAndSchedule:
    def test_modes(self, two_st):
        cfg, gains = two_st
        report = evaluate(cfg, gains, Allocation(rho=0.0, alpha=(1.0, 0.0), beta=(0.0, 1.0)))
        assert report.modes == (MODE_BACKSCATTER, MODE_HARVEST_THEN_TRANSMIT)
        assert report.tx_power[0] == 0.0
        assert report.sum_throughput == pytest.approx(sum(report.per_st_total))

    def test_schedule_tiles_the_period(self, two_st):
        cfg, _ = two_st
        slots = build_schedule(cfg, Allocation(rho=0.2, alpha=(0.25, 0.75), beta=(0.6, 0.4)))
        assert [s.phase for s in slots] == [PHASE_HARVEST, PHASE_BACKSCATTER, PHASE_BACKSCATTER,
                                            PHASE_ACTIVE, PHASE_ACTIVE]
        assert slots[0].start == 0.0
        assert slots[0].duration == pytest.approx(0.2 * 0.7)
        for previous, current in zip(slots, slots[1:]):
            assert current.start == pytest.approx(previous.end)
        assert slots[-1].end == pytest.approx(1.0)

    def test_schedule_skips_empty_slots(self, two_st):
        cfg, _ = two_st
        slots = build_schedule(cfg, Allocation(rho=0.0, alpha=(1.0, 0.0), beta=(0.0, 0.0)))
        assert [(s.phase, s.st) for s in slots] == [(PHASE_BACKSCATTER, 0)]


class TestModelProperties:
    def test_friis_inverse_square_over_distances(self):
        distances = np.arange(1, 101, dtype=float)
        gains = np.array([friis_gain(6.0, 6.0, 900e6, d) for d in distances])
        scaled = gains * distances ** 2
        assert np.all(np.diff(gains) < 0.0)
        assert np.max(np.abs(scaled / scaled[0] - 1.0)) <= 1e-12

    @pytest.mark.parametrize("alpha", [(0.3, 0.7), (0.9, 0.1)])
    def test_harvested_energy_grows_with_rho(self, two_st, alpha):
        cfg, gains = two_st
        for n in range(2):
            energy = [harvested_energy(cfg, gains, Allocation(rho=float(rho), alpha=alpha, beta=(0.5, 0.5)), n)
                      for rho in np.linspace(0.0, 1.0, 101)]
            assert np.all(np.diff(energy) >= 0.0)

    def test_active_bits_concave_and_nondecreasing_in_beta(self, two_st):
        cfg, gains = two_st
        betas = np.arange(1, 1001) * 1e-3
        active = np.array([st_throughput(cfg, gains, Allocation(rho=1.0, alpha=(0.5, 0.5), beta=(b, 1.0 - b)), 0)[1]
                           for b in betas])
        assert np.all(np.diff(active) >= 0.0)
        assert np.all(np.diff(active, 2) <= 1e-9)

    def test_relabeling_sts(self):
        cfg = default_scenario(n_st=3, r_b=(1e5, 1.2e5, 0.9e5), d_pt_st=(11.0, 9.0, 13.0), d_st_sap=(2.0, 3.0, 2.5))
        alloc = Allocation(rho=0.2, alpha=(0.5, 0.3, 0.2), beta=(0.1, 0.6, 0.3))
        order = (2, 0, 1)
        permuted_cfg = default_scenario(n_st=3, r_b=tuple(cfg.r_b[i] for i in order),
                                        d_pt_st=tuple(cfg.d_pt_st[i] for i in order),
                                        d_st_sap=tuple(cfg.d_st_sap[i] for i in order))
        permuted = Allocation(rho=0.2, alpha=tuple(alloc.alpha[i] for i in order),
                              beta=tuple(alloc.beta[i] for i in order))
        value = sum_throughput(cfg, ChannelGains.from_config(cfg), alloc)
        assert sum_throughput(permuted_cfg, ChannelGains.from_config(permuted_cfg), permuted) == \
            pytest.approx(value, rel=1e-12)

    def test_active_bits_vanish_below_linear_bound(self, two_st):
        cfg, gains = two_st
        alloc = Allocation(rho=1.0, alpha=(0.5, 0.5), beta=(1e-12, 1.0 - 1e-12))
        stored = stored_energy(cfg, gains, alloc, 0)
        bound = cfg.eta * cfg.bandwidth_w * stored * gains.g[0] / (cfg.noise_power * math.log(2.0))
        active = st_throughput(cfg, gains, alloc, 0)[1]
        assert math.isfinite(active)
        assert 0.0 < active <= bound * (1.0 + 1e-6)
        assert active < 1e-3
