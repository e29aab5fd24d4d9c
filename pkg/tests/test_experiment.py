"""Tests for the Monte-Carlo harness and RMSE aggregation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest_mock import MockerFixture

from quantum_music.config.loader import SweepKind, SweepSpec
from quantum_music.config.settings import Settings
from quantum_music.exceptions import InvalidArgumentError, NumericalError
from quantum_music.models.estimation import Pseudospectrum
from quantum_music.models.results import TrialResult
from quantum_music.models.scenario import Method, PairingMode, RfGainMode, ScenarioConfig
from quantum_music.numerics.random import RngStream
from quantum_music.services import experiment
from quantum_music.services.experiment import (
    SNR_DEFINITION,
    ExperimentService,
    bootstrap_interval,
    build_scene,
    rmse,
    run_trial,
    sample_angles,
    simulate_trial,
    transmit_power_for_snr,
    trial_squared_errors,
)


def _one_trial(cfg: ScenarioConfig) -> ScenarioConfig:
    return cfg.with_updates(trials=1)


class TestRmse:
    """Tests for rmse and per-trial squared errors."""

    def test_exact_estimates(self) -> None:
        """Test identical estimates and truths give zero error."""
        truths = [np.radians([40.0, 95.0]), np.radians([60.0, 120.0])]
        assert rmse(truths, truths) == 0.0

    def test_known_value(self) -> None:
        """Test errors of 1 and 2 degrees give sqrt(5/2)."""
        estimates = [np.radians([61.0, 92.0])]
        truths = [np.radians([60.0, 90.0])]
        assert rmse(estimates, truths) == pytest.approx(1.5811, abs=1e-4)

    def test_aggregates_over_trials_and_users(self) -> None:
        """Test the RMSE pools all Q*K squared errors."""
        truths = [np.radians([60.0, 90.0]), np.radians([50.0, 100.0])]
        estimates = [np.radians([61.0, 90.0]), np.radians([50.0, 103.0])]
        squared = trial_squared_errors(estimates, truths)
        np.testing.assert_allclose(squared, [1.0, 9.0])
        assert rmse(estimates, truths) == pytest.approx(math.sqrt(10.0 / 4.0))

    def test_pairs_by_sorted_order(self) -> None:
        """Test estimates are paired with truths after sorting."""
        estimates = [np.radians([92.0, 61.0])]
        truths = [np.radians([60.0, 90.0])]
        assert rmse(estimates, truths) == pytest.approx(math.sqrt(2.5))

    def test_optimal_pairing_agrees_on_sorted_case(self) -> None:
        """Test optimal assignment matches sorted pairing on well-separated angles."""
        estimates = [np.radians([100.0, 41.0, 70.0])]
        truths = [np.radians([40.0, 70.5, 101.0])]
        assert rmse(estimates, truths, PairingMode.OPTIMAL) == pytest.approx(
            rmse(estimates, truths, PairingMode.SORTED)
        )

    def test_length_mismatch(self) -> None:
        """Test a trial with the wrong number of estimates is rejected."""
        with pytest.raises(InvalidArgumentError):
            rmse([np.radians([60.0])], [np.radians([60.0, 90.0])])

    def test_trial_count_mismatch(self) -> None:
        """Test differing numbers of estimated and true trials are rejected."""
        with pytest.raises(InvalidArgumentError):
            rmse([np.radians([60.0])], [np.radians([60.0]), np.radians([70.0])])

    def test_empty(self) -> None:
        """Test at least one trial is required."""
        with pytest.raises(InvalidArgumentError):
            rmse([], [])

    @settings(max_examples=50)
    @given(
        angles=st.lists(
            st.floats(min_value=0.6, max_value=2.5), min_size=1, max_size=5
        ),
        offsets=st.lists(st.floats(min_value=-0.01, max_value=0.01), min_size=5, max_size=5),
        data=st.data(),
    )
    def test_permutation_invariance(
        self, angles: list[float], offsets: list[float], data: st.DataObject
    ) -> None:
        """Test reordering the estimates of a trial never changes the RMSE."""
        truth = np.asarray(angles)
        estimate = truth + np.asarray(offsets[: truth.size])
        order = data.draw(st.permutations(range(truth.size)))
        assert rmse([estimate[list(order)]], [truth]) == pytest.approx(
            rmse([estimate], [truth])
        )


class TestBootstrap:
    """Tests for bootstrap_interval."""

    def test_constant_errors(self) -> None:
        """Test identical trial errors give a degenerate interval at the RMSE."""
        lo, hi = bootstrap_interval(np.full(5, 2.0), 2, RngStream(0), resamples=100)
        assert lo == pytest.approx(1.0)
        assert hi == pytest.approx(1.0)

    def test_brackets_point_estimate(self) -> None:
        """Test the interval contains the RMSE of a spread sample."""
        squared = np.array([0.1, 0.4, 2.0, 0.3, 5.0, 0.2, 0.9, 1.1])
        lo, hi = bootstrap_interval(squared, 1, RngStream(1), resamples=500)
        point = math.sqrt(squared.mean())
        assert lo <= point <= hi
        assert lo < hi

    def test_invalid_level(self) -> None:
        """Test the confidence level must lie strictly between 0 and 1."""
        with pytest.raises(InvalidArgumentError):
            bootstrap_interval(np.ones(3), 1, RngStream(0), level=1.0)


class TestSampling:
    """Tests for angle sampling and scene construction."""

    def test_sample_angles(self) -> None:
        """Test angles are sorted, in range and separated."""
        angles = np.degrees(sample_angles(RngStream(5), 4, (30.0, 150.0), 2.0))
        assert angles.shape == (4,)
        assert np.all(np.diff(angles) >= 2.0)
        assert angles.min() >= 30.0
        assert angles.max() <= 150.0

    def test_sample_angles_impossible(self) -> None:
        """Test an unsatisfiable separation is reported."""
        with pytest.raises(InvalidArgumentError):
            sample_angles(RngStream(5), 3, (30.0, 31.0), 2.0)

    def test_fixed_angles(self, noiseless_config: ScenarioConfig) -> None:
        """Test configured angles are used as the truths."""
        scene = build_scene(noiseless_config, 0)
        np.testing.assert_allclose(np.degrees(scene.users.angles), [60.0, 90.0, 120.0])

    def test_scene_depends_on_trial(self, small_config: ScenarioConfig) -> None:
        """Test different trial ids draw different angles."""
        first = build_scene(small_config, 0).users.angles
        second = build_scene(small_config, 1).users.angles
        assert first != second

    def test_signal_rms(self, small_config: ScenarioConfig) -> None:
        """Test the scene reports the RMS of the noiseless interior."""
        scene = build_scene(small_config, 0)
        assert scene.signal_rms > 0
        assert len(scene.cell_rms) == 16

    def test_transmit_power_for_snr(self) -> None:
        """Test 10 dB in the normalized domain needs 30 sigma_n^2 (E[g^2] = 1/3)."""
        cfg = ScenarioConfig(sigma_n_sq=1e-19)
        assert transmit_power_for_snr(cfg, 10.0) == pytest.approx(3e-18)


class TestRunTrial:
    """Tests for single end-to-end trials."""

    def test_deterministic(self, small_config: ScenarioConfig) -> None:
        """Test the same (seed, trial_id) reproduces the estimate exactly."""
        first = run_trial(small_config, 1, Method.QUANTUM)
        second = run_trial(small_config, 1, Method.QUANTUM)
        np.testing.assert_array_equal(first.estimate.angles, second.estimate.angles)
        np.testing.assert_array_equal(first.truths, second.truths)

    def test_methods_share_truths(self, small_config: ScenarioConfig) -> None:
        """Test both receivers see the same users in a trial."""
        quantum = run_trial(small_config, 2, Method.QUANTUM)
        rf = run_trial(small_config, 2, Method.RF)
        np.testing.assert_array_equal(quantum.truths, rf.truths)
        assert quantum.estimate.angles.shape == (2,)
        assert rf.estimate.angles.shape == (2,)

    def test_diagnostics(self, small_config: ScenarioConfig) -> None:
        """Test quantum trials report bias and channel diagnostics, RF trials do not."""
        quantum = run_trial(small_config, 0, Method.QUANTUM)
        rf = run_trial(small_config, 0, Method.RF)
        diag = quantum.diagnostics
        assert diag.bias_magnitude == pytest.approx(5.0 * diag.signal_rms)
        assert diag.channel_relative_error is not None
        assert 0.0 <= diag.excitation_probability <= 1.0
        assert rf.diagnostics.channel_relative_error is None
        assert rf.diagnostics.bias_magnitude == 0.0

    def test_noiseless_rf(self, noiseless_config: ScenarioConfig) -> None:
        """Test noiseless RF MUSIC lands within one grid step of every user."""
        result = run_trial(noiseless_config, 0, Method.RF)
        step = noiseless_config.grid().step
        assert np.max(np.abs(result.estimate.angles - result.truths)) <= step + 1e-12

    def test_conventional_rf_gains(self, noiseless_config: ScenarioConfig) -> None:
        """Test the unit-gain RF channel also resolves noiseless users."""
        cfg = noiseless_config.with_updates(rf_gain_mode=RfGainMode.CONVENTIONAL)
        result = run_trial(cfg, 0, Method.RF)
        step = cfg.grid().step
        assert np.max(np.abs(result.estimate.angles - result.truths)) <= step + 1e-12

    def test_spectrum_returned(self, small_config: ScenarioConfig) -> None:
        """Test simulate_trial returns the pseudospectrum on the scenario grid."""
        _, spectrum = simulate_trial(small_config, 0, Method.QUANTUM)
        assert spectrum.size == small_config.grid_size

    def test_numerical_error_carries_trial(
        self, mocker: MockerFixture, small_config: ScenarioConfig
    ) -> None:
        """Test failures inside a trial are tagged with the trial and method."""
        mocker.patch(
            'quantum_music.services.experiment.recover_channel_matrix',
            side_effect=NumericalError('singular'),
        )
        with pytest.raises(NumericalError) as exc_info:
            run_trial(small_config, 4, Method.QUANTUM)
        assert exc_info.value.context == {'trial': 4, 'method': 'quantum_music'}


class TestExperimentService:
    """Tests for sweeps and trial orchestration."""

    def test_power_sweep(self, small_config: ScenarioConfig, test_settings: Settings) -> None:
        """Test one power point yields one record per method."""
        service = ExperimentService(_one_trial(small_config), settings=test_settings)
        result = service.power_sweep([1e-18], bootstrap=0)
        assert result.kind is SweepKind.POWER
        assert [r.method for r in result.records] == [Method.QUANTUM, Method.RF]
        for record in result.records:
            assert record.sweep_var == 'sigma_s_sq'
            assert record.sweep_value == 1e-18
            assert record.trials_used == 1
            assert record.ci_low_deg is None
        assert not result.failures

    def test_user_sweep_order(self, small_config: ScenarioConfig, test_settings: Settings) -> None:
        """Test records follow sweep order, then method order."""
        service = ExperimentService(_one_trial(small_config), settings=test_settings)
        result = service.user_sweep([1, 2], bootstrap=0)
        keys = [(r.sweep_value, r.num_users, r.method) for r in result.records]
        assert keys == [
            (1.0, 1, Method.QUANTUM),
            (1.0, 1, Method.RF),
            (2.0, 2, Method.QUANTUM),
            (2.0, 2, Method.RF),
        ]

    def test_bootstrap_interval_recorded(
        self, small_config: ScenarioConfig, test_settings: Settings
    ) -> None:
        """Test a bootstrap interval brackets the point RMSE."""
        service = ExperimentService(small_config, settings=test_settings)
        result = service.power_sweep([1e-18], methods=(Method.RF,), bootstrap=200)
        record = result.records[0]
        assert record.ci_low_deg is not None and record.ci_high_deg is not None
        assert record.ci_low_deg <= record.rmse_deg + 1e-12
        assert record.rmse_deg <= record.ci_high_deg + 1e-12

    def test_worker_count_does_not_change_results(
        self, small_config: ScenarioConfig, test_settings: Settings
    ) -> None:
        """Test a process pool reproduces the in-process records exactly."""
        serial = ExperimentService(small_config, settings=test_settings, workers=1)
        pooled = ExperimentService(small_config, settings=test_settings, workers=2)
        first = serial.power_sweep([1e-18], bootstrap=50)
        second = pooled.power_sweep([1e-18], bootstrap=50)
        assert first.records == second.records

    def test_failures_are_annotated(
        self,
        mocker: MockerFixture,
        small_config: ScenarioConfig,
        test_settings: Settings,
    ) -> None:
        """Test a failing trial is excluded from the RMSE and reported."""
        real_run_trial = experiment.run_trial

        def flaky(cfg: ScenarioConfig, trial_id: int, method: Method) -> TrialResult:
            if trial_id == 1:
                raise NumericalError('boom', trial=trial_id)
            return real_run_trial(cfg, trial_id, method)

        mocker.patch('quantum_music.services.experiment.run_trial', side_effect=flaky)
        service = ExperimentService(small_config, settings=test_settings)
        result = service.power_sweep([1e-18], methods=(Method.RF,), bootstrap=0)
        record = result.records[0]
        assert record.trials_used == 2
        assert record.failed_trials == 1
        assert len(result.failures) == 1
        failure = result.failures[0]
        assert failure.trial_id == 1
        assert failure.message == 'boom'
        assert failure.context == {'trial': '1'}

    def test_all_trials_failing(
        self,
        mocker: MockerFixture,
        small_config: ScenarioConfig,
        test_settings: Settings,
    ) -> None:
        """Test a point where every trial fails produces no record."""
        mocker.patch(
            'quantum_music.services.experiment.run_trial',
            side_effect=NumericalError('boom'),
        )
        service = ExperimentService(small_config, settings=test_settings)
        result = service.power_sweep([1e-18], methods=(Method.QUANTUM,), bootstrap=0)
        assert result.records == []
        assert len(result.failures) == small_config.trials

    def test_spectrum_dump(self, small_config: ScenarioConfig, test_settings: Settings) -> None:
        """Test one spectrum table per user count on the scenario grid."""
        service = ExperimentService(small_config, settings=test_settings)
        result = service.spectrum_dump([1, 3], snr_db=10.0)
        assert result.kind is SweepKind.SPECTRUM
        assert result.snr_definition == SNR_DEFINITION
        assert [table.num_users for table in result.spectra] == [1, 3]
        for table in result.spectra:
            assert table.spectrum.size == small_config.grid_size
            assert table.truths.shape == (table.num_users,)
            assert len(table.rows()) == small_config.grid_size
            assert table.sigma_s_sq == pytest.approx(
                transmit_power_for_snr(small_config, 10.0)
            )

    def test_run_sweep_dispatch(
        self, small_config: ScenarioConfig, test_settings: Settings
    ) -> None:
        """Test run_sweep follows the sweep kind."""
        service = ExperimentService(_one_trial(small_config), settings=test_settings)
        sweep = SweepSpec(kind=SweepKind.USERS, users=[2], bootstrap=0)
        result = service.run_sweep(sweep, methods=(Method.RF,))
        assert result.kind is SweepKind.USERS
        assert len(result.records) == 1

    def test_invalid_workers(self, test_settings: Settings) -> None:
        """Test a negative worker count is rejected."""
        with pytest.raises(InvalidArgumentError):
            ExperimentService(settings=test_settings, workers=-1)

    def test_zero_workers_rejected(self, test_settings: Settings) -> None:
        """Test an explicit zero worker count is rejected, not replaced by the default."""
        with pytest.raises(InvalidArgumentError, match='got 0'):
            ExperimentService(settings=test_settings, workers=0)

    def test_spectrum_dump_keeps_partial_results(
        self,
        mocker: MockerFixture,
        small_config: ScenarioConfig,
        test_settings: Settings,
    ) -> None:
        """Test a failing user count is annotated while the other tables are kept."""
        real_simulate = experiment.simulate_trial

        def failing_for_two_users(
            cfg: ScenarioConfig, trial_id: int, method: Method
        ) -> tuple[TrialResult, Pseudospectrum]:
            if cfg.num_users == 2:
                raise NumericalError('singular covariance', trial=trial_id)
            return real_simulate(cfg, trial_id, method)

        mocker.patch(
            'quantum_music.services.experiment.simulate_trial', side_effect=failing_for_two_users
        )
        service = ExperimentService(small_config, settings=test_settings)
        result = service.spectrum_dump([1, 2, 3], snr_db=10.0)
        assert [table.num_users for table in result.spectra] == [1, 3]
        assert len(result.failures) == 1
        failure = result.failures[0]
        assert failure.message == 'singular covariance'
        assert failure.context == {'trial': '0', 'K': '2'}


class TestGridRefinement:
    """Tests for the noiseless RMSE floor set by the search grid."""

    def test_refinement_never_hurts(self, test_settings: Settings) -> None:
        """Test a nested finer grid lowers noiseless RMSE and both stay within a step."""
        base = ScenarioConfig(
            num_elements=16,
            num_users=2,
            num_pilots=40,
            sigma_n_sq=0.0,
            sigma_t_sq=0.0,
            trials=4,
            seed=11,
        )
        service = ExperimentService(base, settings=test_settings)
        rmses = {}
        for grid_size in (1025, 2049):
            cfg = base.with_updates(grid_size=grid_size)
            record, failures = service.run_point(cfg, Method.RF, 'grid_size', grid_size, bootstrap=0)
            assert record is not None
            assert failures == []
            assert record.rmse_deg <= math.degrees(cfg.grid().step)
            rmses[grid_size] = record.rmse_deg
        assert rmses[2049] <= rmses[1025] + 1e-6
