import math

import numpy as np
import pytest

from subsystem_codes.codes import build_bbs, minimize_qubits_q, select_best_code
from subsystem_codes.decoders import induced_decoder_for
from subsystem_codes.evaluation import log_grid
from subsystem_codes.metrics import binomial_std, fit_power_law
from subsystem_codes.simulation import PhenoModel, run_importance, run_trials, sweep, trials_schedule
from subsystem_codes.simulation.pheno import block_sizes


def bacon_shor_rate(p: float) -> float:
    """Block failure rate of the 3x3 Bacon-Shor code with perfect measurements."""
    column = 3 * p * (1 - p) ** 2 + p**3
    one_type = 3 * column**2 * (1 - column) + column**3
    return 1 - (1 - one_type) ** 2


@pytest.fixture(scope="module")
def bs_decoder(bacon_shor):
    return induced_decoder_for(bacon_shor)


@pytest.fixture(scope="module")
def bbs21_decoder(bbs21):
    return induced_decoder_for(bbs21)


class TestPhenoModel:
    def test_measurement_rate_defaults_to_data_rate(self):
        assert PhenoModel(0.02).p_meas == 0.02

    def test_perfect_measurements_switch_off_measurement_nodes(self):
        assert not PhenoModel(0.02, 0.0).decoder_config().measurement_errors
        assert PhenoModel(0.02).decoder_config().measurement_errors

    @pytest.mark.parametrize("values", [(-0.1, None), (1.0, None), (0.1, 1.5)])
    def test_out_of_range(self, values):
        with pytest.raises(ValueError):
            PhenoModel(*values)


class TestDirect:
    def test_noiseless_runs_never_fail(self, bbs21, bbs21_decoder):
        result = run_trials(bbs21, bbs21_decoder, PhenoModel(0.0), trials=500)
        assert result.block_failures == 0
        assert not result.per_qubit_failures.any()
        assert result.unresolved == 0

    def test_bacon_shor_matches_closed_form(self, bacon_shor, bs_decoder):
        p, trials = 0.01, 40_000
        result = run_trials(bacon_shor, bs_decoder, PhenoModel(p, 0.0), trials=trials, seed=3)
        expected = bacon_shor_rate(p)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(result.block_rate - expected) < 4 * sigma

    def test_counts_are_consistent(self, bbs21, bbs21_decoder):
        result = run_trials(bbs21, bbs21_decoder, PhenoModel(0.03), trials=2000, seed=1)
        assert max(result.x_block_failures, result.z_block_failures) <= result.block_failures
        assert result.block_failures <= result.x_block_failures + result.z_block_failures
        assert np.all(result.per_qubit_failures <= result.block_failures)
        assert result.rate("x") == result.x_block_failures / 2000

    def test_worker_count_does_not_change_counts(self, bbs21, bbs21_decoder):
        model = PhenoModel(0.03)
        serial = run_trials(bbs21, bbs21_decoder, model, trials=2500, seed=9, n_jobs=1)
        pooled = run_trials(bbs21, bbs21_decoder, model, trials=2500, seed=9, n_jobs=2)
        assert serial.block_failures == pooled.block_failures
        assert np.array_equal(serial.per_qubit_failures, pooled.per_qubit_failures)
        assert np.array_equal(serial.z_qubit_failures, pooled.z_qubit_failures)

    def test_rejects_empty_runs(self, bbs21, bbs21_decoder):
        with pytest.raises(ValueError):
            run_trials(bbs21, bbs21_decoder, PhenoModel(0.01), trials=0)

    def test_block_sizes(self):
        assert block_sizes(2500, 1024) == [1024, 1024, 452]
        assert sum(block_sizes(1)) == 1


class TestImportance:
    def test_low_weights_never_fail(self, bbs21, bbs21_decoder):
        result = run_importance(bbs21, bbs21_decoder, PhenoModel(0.01, 0.0), weight_max=3, samples_per_weight=200)
        for error_type in ("x", "z"):
            assert result.loci[error_type] == 21
            assert result.conditional_rates(error_type)[:2].tolist() == [0.0, 0.0]

    def test_measurement_loci(self, bbs21, bbs21_decoder):
        result = run_importance(bbs21, bbs21_decoder, PhenoModel(0.01), weight_max=2, samples_per_weight=50)
        assert result.includes_measurements
        assert result.loci == {"x": 24, "z": 24}

    def test_agrees_with_closed_form(self, bacon_shor, bs_decoder):
        result = run_importance(bacon_shor, bs_decoder, PhenoModel(0.05, 0.0), weight_max=9, samples_per_weight=3000)
        rate, std, tail = result.at(0.05)
        assert tail == pytest.approx(0.0, abs=1e-15)
        assert abs(rate - bacon_shor_rate(0.05)) < 5 * std + 1e-3

    def test_mismatched_measurement_rate(self, bbs21, bbs21_decoder):
        with pytest.raises(ValueError):
            run_importance(bbs21, bbs21_decoder, PhenoModel(0.01, 0.02), weight_max=2, samples_per_weight=10)

    def test_per_qubit_estimates(self, bbs21, bbs21_decoder):
        result = run_importance(bbs21, bbs21_decoder, PhenoModel(0.05, 0.0), weight_max=4, samples_per_weight=200)
        rates, stds = result.qubit_at(0.05)
        assert rates.shape == stds.shape == (4,)
        assert np.all(rates <= result.at(0.05)[0] + 1e-12)

    def test_low_p_exponent_is_quadratic(self, bacon_shor, bs_decoder):
        model = PhenoModel(1e-3, 0.0)
        result = run_importance(bacon_shor, bs_decoder, model, weight_max=5, samples_per_weight=500, seed=2)
        points = [(p, result.at(p)[0]) for p in log_grid(3e-4, 3e-3, 5)]
        assert 1.7 <= fit_power_law(points).D <= 2.4


class TestSweep:
    def test_schedule_grows_at_low_p(self):
        schedule = trials_schedule([1e-3, 1e-2, 1e-1], target_failures=100, cap=10**6, floor=1000)
        assert schedule == [10**6, 10**6, 10_000]
        assert trials_schedule([0.5], floor=1000) == [1000]

    def test_noiseless_points_get_the_floor(self):
        assert trials_schedule([0.0, 1e-3], target_failures=100, cap=10**6, floor=500) == [500, 10**6]

    def test_empty_grid(self, bbs21, bbs21_decoder):
        assert sweep(bbs21, bbs21_decoder, [], trials=100) == []

    def test_points_are_seeded_independently(self, bbs21, bbs21_decoder):
        results = sweep(bbs21, bbs21_decoder, [0.02, 0.04], trials=[600, 300], seed=4)
        assert [r.trials for r in results] == [600, 300]
        assert results[0].seed != results[1].seed
        again = sweep(bbs21, bbs21_decoder, [0.04], trials=300, seed=4)
        assert again[0].seed == results[0].seed

    def test_schedule_length_must_match(self, bbs21, bbs21_decoder):
        with pytest.raises(ValueError):
            sweep(bbs21, bbs21_decoder, [0.01, 0.02], trials=[10])

    def test_writes_csv(self, bbs21, bbs21_decoder, tmp_path):
        sweep(bbs21, bbs21_decoder, [0.02], trials=200, csv_path=tmp_path / "pheno.csv")
        assert (tmp_path / "pheno.csv").exists()
        assert (tmp_path / "pheno_any.dat").exists()


@pytest.mark.slow
class TestLargeRuns:
    def test_importance_agrees_with_direct(self, bbs21, bbs21_decoder):
        p = 1e-2
        direct = run_trials(bbs21, bbs21_decoder, PhenoModel(p), trials=40_000, seed=11, n_jobs=-1)
        importance = run_importance(bbs21, bbs21_decoder, PhenoModel(p), weight_max=6, samples_per_weight=2000, seed=12)
        rate, std, tail = importance.at(p)
        assert tail < 1e-6
        assert abs(direct.block_rate - rate) < 3 * math.hypot(direct.block_std, std) + tail

    @pytest.mark.parametrize("fixture", ["bbs21", "shp49"])
    def test_low_p_exponent(self, request, fixture):
        code = request.getfixturevalue(fixture)
        decoder = induced_decoder_for(code)
        result = run_importance(code, decoder, PhenoModel(1e-3), weight_max=5, samples_per_weight=1000, seed=5)
        points = [(p, result.at(p)[0]) for p in log_grid(3e-4, 3e-3, 6)]
        assert 1.7 <= fit_power_law(points).D <= 2.4

    def test_five_six_bbs_beats_three_six_bbs(self):
        p, trials = 1e-2, 2000
        rates = {}
        for b in (3, 5):
            classical = select_best_code(24, b, 6, trials=10, shots=200, seed=b)
            q = minimize_qubits_q(classical, classical, attempts=200, seed=b)
            code = build_bbs(classical, classical, q, name=f"bbs-({b},6)")
            result = run_trials(code, induced_decoder_for(code), PhenoModel(p), trials=trials, seed=21, n_jobs=-1)
            rates[b] = float(result.per_qubit_rates.mean())
        sigma = float(np.hypot(binomial_std(rates[3] * trials, trials), binomial_std(rates[5] * trials, trials)))
        assert rates[3] - rates[5] > 3 * sigma
