"""Monte-Carlo experiment orchestration.

Every trial draws from RNG streams keyed by (seed, trial_id, purpose), so a
trial's scene is the same for both receivers and the same no matter which
worker process runs it. Aggregation is ordered by trial_id.
"""

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from enum import IntEnum
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel
from scipy.optimize import linear_sum_assignment

from quantum_music.config.loader import SweepKind, SweepSpec
from quantum_music.config.settings import Settings, get_settings
from quantum_music.exceptions import InvalidArgumentError, NumericalError
from quantum_music.models.channel import ChannelMatrix
from quantum_music.models.estimation import AoAEstimate, Pseudospectrum
from quantum_music.models.geometry import UserSet
from quantum_music.models.measurement import PilotMatrix
from quantum_music.models.results import (
    RmseRecord,
    SpectrumTable,
    TrialDiagnostics,
    TrialResult,
)
from quantum_music.models.scenario import Method, PairingMode, RfGainMode, ScenarioConfig
from quantum_music.numerics.random import RngStream
from quantum_music.services.measurement import (
    generate_pilots,
    noiseless_interior,
    synth_quantum_measurements,
    synth_rf_snapshots,
)
from quantum_music.services.music import compute_spectrum, find_peaks
from quantum_music.services.phase_retrieval import recover_channel_matrix, relative_channel_error
from quantum_music.services.scene import (
    conventional_channel,
    expected_gain_power,
    generate_bias,
    generate_channel,
    rabi_excitation_probability,
    rabi_frequency_scale,
)
from quantum_music.utils.log import get_logger

logger = get_logger(__name__)

MAX_ANGLE_DRAWS = 10_000
BOOTSTRAP_STREAM = 2**31
SNR_DEFINITION = (
    'SNR = alpha^2 * E[g^2] * sigma_s^2 / sigma_n^2: mean per-cell pre-noise power '
    'over quantum shot noise power'
)


class Purpose(IntEnum):
    """Sub-stream index of each random draw inside a trial."""

    ANGLES = 0
    CHANNEL = 1
    PILOTS = 2
    BIAS = 3
    QUANTUM_NOISE = 4
    RF_NOISE = 5


class Scene(BaseModel):
    """Everything both receivers share in one trial."""

    users: UserSet
    channel: ChannelMatrix
    pilots: PilotMatrix
    signal_rms: float
    cell_rms: list[float]

    model_config = {'arbitrary_types_allowed': True}


class TrialFailure(BaseModel):
    """A trial that raised a numerical error, kept as an annotation."""

    trial_id: int
    method: Method
    message: str
    context: dict[str, Any] = {}


class SweepResult(BaseModel):
    """Records, spectrum tables and failure annotations of one sweep."""

    kind: SweepKind
    records: list[RmseRecord] = []
    spectra: list[SpectrumTable] = []
    failures: list[TrialFailure] = []
    snr_definition: Optional[str] = None


TrialOutcome = Union[TrialResult, TrialFailure]


def trial_stream(cfg: ScenarioConfig, trial_id: int, purpose: Purpose) -> RngStream:
    return RngStream(cfg.seed, trial_id).child(int(purpose))


def sample_angles(
    rng: RngStream,
    num_users: int,
    angle_range: tuple[float, float],
    min_separation: float,
) -> np.ndarray:
    """K ascending angles (radians) uniform over a degree range, pairwise >= min_separation deg apart."""
    lo, hi = angle_range
    for _ in range(MAX_ANGLE_DRAWS):
        draw = np.sort(rng.generator.uniform(lo, hi, size=num_users))
        if num_users < 2 or np.min(np.diff(draw)) >= min_separation:
            return np.radians(draw)
    raise InvalidArgumentError(
        f'could not place {num_users} users {min_separation} deg apart in {angle_range}'
    )


def build_scene(cfg: ScenarioConfig, trial_id: int) -> Scene:
    """Angles, channel and pilots of one trial."""
    if cfg.angles is not None:
        angles = np.radians(np.sort(np.asarray(cfg.angles, dtype=float)))
    else:
        angles = sample_angles(
            trial_stream(cfg, trial_id, Purpose.ANGLES),
            cfg.num_users,
            cfg.angle_range,
            cfg.min_separation,
        )
    users = UserSet.uniform(
        tuple(angles),
        cfg.sigma_s_sq,
        alpha=cfg.alpha,
        min_separation=cfg.min_separation_rad,
    )
    channel = generate_channel(
        trial_stream(cfg, trial_id, Purpose.CHANNEL),
        cfg.geometry(),
        users,
        cfg.constants(),
        polarization_mode=cfg.polarization_mode,
        physical_units=cfg.physical_units,
    )
    pilots = generate_pilots(
        trial_stream(cfg, trial_id, Purpose.PILOTS),
        cfg.num_users,
        cfg.num_pilots,
        kind=cfg.pilot_kind,
    )
    interior = noiseless_interior(channel, pilots)
    cell_rms = np.sqrt(np.mean(np.abs(interior) ** 2, axis=1))
    return Scene(
        users=users,
        channel=channel,
        pilots=pilots,
        signal_rms=float(np.sqrt(np.mean(cell_rms**2))),
        cell_rms=[float(value) for value in cell_rms],
    )


def _rabi_diagnostics(cfg: ScenarioConfig, scene: Scene) -> tuple[float, float]:
    to_rad_s = 1.0 if cfg.physical_units else rabi_frequency_scale(cfg.constants())
    probabilities = [
        rabi_excitation_probability(rms * to_rad_s, cfg.dwell_time_s) for rms in scene.cell_rms
    ]
    return scene.signal_rms * to_rad_s, float(np.mean(probabilities))


def simulate_trial(
    cfg: ScenarioConfig, trial_id: int, method: Method
) -> tuple[TrialResult, Pseudospectrum]:
    """One end-to-end draw for one receiver, keeping the pseudospectrum."""
    try:
        scene = build_scene(cfg, trial_id)
        geom = cfg.geometry()
        grid = cfg.grid()
        bias_magnitude = 0.0
        channel_error = None

        if method is Method.QUANTUM:
            if scene.signal_rms <= 0:
                raise NumericalError('noiseless signal power is zero, bias cannot be scaled')
            bias = generate_bias(
                trial_stream(cfg, trial_id, Purpose.BIAS),
                geom,
                cfg.constants(),
                cfg.bias_ratio,
                scene.signal_rms,
            )
            panel = synth_quantum_measurements(
                scene.channel,
                scene.pilots,
                bias,
                cfg.noise(),
                trial_stream(cfg, trial_id, Purpose.QUANTUM_NOISE),
            )
            a_hat = recover_channel_matrix(
                scene.pilots,
                bias,
                panel,
                num_iterations=cfg.num_iterations,
                init_mode=cfg.init_mode,
                tolerance=cfg.gs_tolerance,
            )
            channel_error = relative_channel_error(a_hat, scene.channel.assembled())
            bias_magnitude = cfg.bias_ratio * scene.signal_rms
            spectrum = compute_spectrum(
                a_hat, cfg.num_users, geom, grid, num_pilots=cfg.num_pilots
            )
        else:
            channel = scene.channel
            if cfg.rf_gain_mode is RfGainMode.CONVENTIONAL:
                channel = conventional_channel(geom, scene.users)
            snapshots = synth_rf_snapshots(
                channel,
                scene.pilots,
                cfg.noise(),
                trial_stream(cfg, trial_id, Purpose.RF_NOISE),
            )
            spectrum = compute_spectrum(snapshots, cfg.num_users, geom, grid)
    except NumericalError as exc:
        raise exc.with_context(trial=trial_id, method=method.value)

    estimate = find_peaks(spectrum, cfg.num_users)
    if estimate.padded:
        logger.debug('trial %d (%s): fewer than K peaks, padded', trial_id, method.value)
    rabi_rms, excitation = _rabi_diagnostics(cfg, scene)
    result = TrialResult(
        trial_id=trial_id,
        method=method,
        truths=np.asarray(scene.users.angles, dtype=float),
        estimate=estimate,
        diagnostics=TrialDiagnostics(
            signal_rms=scene.signal_rms,
            bias_magnitude=bias_magnitude,
            rabi_frequency_rms=rabi_rms,
            excitation_probability=excitation,
            channel_relative_error=channel_error,
            padded_peaks=estimate.padded,
        ),
    )
    return result, spectrum


def run_trial(cfg: ScenarioConfig, trial_id: int, method: Method) -> TrialResult:
    """Deterministic end-to-end draw for (seed, trial_id) and one receiver."""
    return simulate_trial(cfg, trial_id, method)[0]


def _as_angles(estimate: Union[AoAEstimate, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(estimate, AoAEstimate):
        return np.asarray(estimate.angles, dtype=float)
    return np.asarray(estimate, dtype=float)


def _paired_errors(
    estimate: np.ndarray, truth: np.ndarray, pairing: PairingMode
) -> np.ndarray:
    if pairing is PairingMode.OPTIMAL:
        cost = np.abs(estimate[:, None] - truth[None, :])
        rows, cols = linear_sum_assignment(cost)
        return cost[rows, cols]
    return np.abs(np.sort(estimate) - np.sort(truth))


def trial_squared_errors(
    estimates: Sequence[Any],
    truths: Sequence[Any],
    pairing: PairingMode = PairingMode.SORTED,
) -> np.ndarray:
    """Per-trial sums of squared angular errors, in degrees^2."""
    if len(estimates) != len(truths):
        raise InvalidArgumentError(
            f'{len(estimates)} estimates for {len(truths)} ground truths'
        )
    totals = np.zeros(len(estimates))
    num_users: Optional[int] = None
    for q, (estimate, truth) in enumerate(zip(estimates, truths)):
        est = _as_angles(estimate)
        tru = np.asarray(truth, dtype=float)
        if est.shape != tru.shape or est.ndim != 1:
            raise InvalidArgumentError(
                f'trial {q}: {est.size} estimated angles for {tru.size} true angles'
            )
        if num_users is None:
            num_users = tru.size
        elif tru.size != num_users:
            raise InvalidArgumentError(f'trial {q} has K={tru.size}, expected K={num_users}')
        errors = np.degrees(_paired_errors(est, tru, pairing))
        totals[q] = float(errors @ errors)
    return totals


def rmse(
    estimates: Sequence[Any],
    truths: Sequence[Any],
    pairing: PairingMode = PairingMode.SORTED,
) -> float:
    """Root mean square angular error in degrees over all trials and users.

    Angles are given in radians, either as AoAEstimate objects or as plain
    sequences; estimates are paired with truths by ascending sort by default.
    """
    totals = trial_squared_errors(estimates, truths, pairing)
    if totals.size == 0:
        raise InvalidArgumentError('rmse needs at least one trial')
    num_users = np.asarray(truths[0]).size
    if num_users == 0:
        return 0.0
    return math.sqrt(float(np.sum(totals)) / (totals.size * num_users))


def bootstrap_interval(
    squared_errors: np.ndarray,
    num_users: int,
    rng: RngStream,
    resamples: int = 1000,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile bootstrap interval of the RMSE over resampled trials."""
    squared_errors = np.asarray(squared_errors, dtype=float)
    if squared_errors.size == 0 or resamples < 1:
        raise InvalidArgumentError('bootstrap needs at least one trial and one resample')
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError(f'confidence level must be in (0, 1), got {level}')
    picks = rng.generator.integers(0, squared_errors.size, size=(resamples, squared_errors.size))
    draws = np.sqrt(squared_errors[picks].mean(axis=1) / num_users)
    tail = (1.0 - level) / 2.0 * 100.0
    lo, hi = np.percentile(draws, [tail, 100.0 - tail])
    return float(lo), float(hi)


def transmit_power_for_snr(cfg: ScenarioConfig, snr_db: float) -> float:
    """Total transmit power putting the mean per-cell pre-noise power snr_db above sigma_n^2."""
    gain_power = cfg.alpha**2 * expected_gain_power(cfg.constants(), cfg.physical_units)
    if gain_power <= 0:
        raise InvalidArgumentError('channel gain is zero, no power reaches the target SNR')
    return 10.0 ** (snr_db / 10.0) * cfg.sigma_n_sq / gain_power


def _run_trial_task(task: tuple[ScenarioConfig, int, Method]) -> TrialOutcome:
    cfg, trial_id, method = task
    try:
        return run_trial(cfg, trial_id, method)
    except NumericalError as exc:
        return TrialFailure(
            trial_id=trial_id,
            method=method,
            message=exc.message,
            context={key: str(value) for key, value in exc.context.items()},
        )


class ExperimentService:
    """Runs trials, sweeps and spectrum dumps for one base scenario."""

    def __init__(
        self,
        config: Optional[ScenarioConfig] = None,
        settings: Optional[Settings] = None,
        workers: Optional[int] = None,
    ) -> None:
        """Initialize the experiment service."""
        self._settings = settings or get_settings()
        self.config = config or ScenarioConfig()
        self.workers = workers if workers is not None else self._settings.workers
        if self.workers < 1:
            raise InvalidArgumentError(f'workers must be at least 1, got {self.workers}')

    def run_trials(
        self, cfg: ScenarioConfig, method: Method, trial_ids: Iterable[int]
    ) -> list[TrialOutcome]:
        """Run trials, in trial_id order regardless of the worker count."""
        tasks = [(cfg, trial_id, method) for trial_id in trial_ids]
        if self.workers == 1 or len(tasks) < 2:
            return [_run_trial_task(task) for task in tasks]
        chunksize = max(1, len(tasks) // (4 * self.workers))
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(_run_trial_task, tasks, chunksize=chunksize))

    def run_point(
        self,
        cfg: ScenarioConfig,
        method: Method,
        sweep_var: str,
        sweep_value: float,
        bootstrap: int = 1000,
    ) -> tuple[Optional[RmseRecord], list[TrialFailure]]:
        """Q trials at one sweep point for one method, aggregated."""
        outcomes = self.run_trials(cfg, method, range(cfg.trials))
        results = [o for o in outcomes if isinstance(o, TrialResult)]
        failures = [o for o in outcomes if isinstance(o, TrialFailure)]
        for failure in failures:
            logger.warning(
                'trial %d (%s) failed at %s=%g: %s',
                failure.trial_id,
                method.value,
                sweep_var,
                sweep_value,
                failure.message,
            )
        if not results:
            return None, failures

        estimates = [r.estimate for r in results]
        truths = [r.truths for r in results]
        squared = trial_squared_errors(estimates, truths, cfg.pairing)
        ci_low = ci_high = None
        if bootstrap > 0:
            ci_low, ci_high = bootstrap_interval(
                squared,
                cfg.num_users,
                RngStream(cfg.seed, BOOTSTRAP_STREAM),
                resamples=bootstrap,
            )
        record = RmseRecord(
            sweep_var=sweep_var,
            sweep_value=sweep_value,
            method=method,
            num_users=cfg.num_users,
            num_elements=cfg.num_elements,
            num_pilots=cfg.num_pilots,
            num_iterations=cfg.num_iterations,
            sigma_s_sq=cfg.sigma_s_sq,
            sigma_n_sq=cfg.sigma_n_sq,
            sigma_t_sq=cfg.sigma_t_sq,
            trials_used=len(results),
            rmse_deg=math.sqrt(float(np.sum(squared)) / (len(results) * cfg.num_users)),
            flagged_trials=sum(1 for r in results if r.flagged),
            seed=cfg.seed,
            failed_trials=len(failures),
            ci_low_deg=ci_low,
            ci_high_deg=ci_high,
        )
        return record, failures

    def _sweep(
        self,
        kind: SweepKind,
        sweep_var: str,
        points: Iterable[tuple[float, ScenarioConfig]],
        methods: Sequence[Method],
        bootstrap: int,
    ) -> SweepResult:
        result = SweepResult(kind=kind)
        for value, cfg in points:
            for method in methods:
                record, failures = self.run_point(cfg, method, sweep_var, value, bootstrap)
                result.failures.extend(failures)
                if record is not None:
                    result.records.append(record)
                else:
                    logger.warning('every trial failed at %s=%g (%s)', sweep_var, value, method.value)
        return result

    def power_sweep(
        self,
        powers: Sequence[float],
        methods: Sequence[Method] = (Method.QUANTUM, Method.RF),
        bootstrap: int = 1000,
    ) -> SweepResult:
        """RMSE versus total transmit power sigma_s^2."""
        points = [(p, self.config.with_updates(sigma_s_sq=p)) for p in powers]
        return self._sweep(SweepKind.POWER, 'sigma_s_sq', points, methods, bootstrap)

    def user_sweep(
        self,
        users: Sequence[int],
        methods: Sequence[Method] = (Method.QUANTUM, Method.RF),
        bootstrap: int = 1000,
    ) -> SweepResult:
        """RMSE versus the number of users K at the configured power."""
        points = [(float(k), self.config.with_updates(num_users=k, angles=None)) for k in users]
        return self._sweep(SweepKind.USERS, 'K', points, methods, bootstrap)

    def spectrum_dump(self, users: Sequence[int], snr_db: float = 10.0) -> SweepResult:
        """One seeded quantum pseudospectrum per K at a fixed SNR."""
        result = SweepResult(kind=SweepKind.SPECTRUM, snr_definition=SNR_DEFINITION)
        power = transmit_power_for_snr(self.config, snr_db)
        for k in users:
            cfg = self.config.with_updates(num_users=k, angles=None, sigma_s_sq=power)
            try:
                trial, spectrum = simulate_trial(cfg, 0, Method.QUANTUM)
            except NumericalError as exc:
                logger.warning('spectrum for K=%d failed: %s', k, exc.message)
                context = {key: str(value) for key, value in exc.context.items()}
                context['K'] = str(k)
                result.failures.append(
                    TrialFailure(
                        trial_id=0, method=Method.QUANTUM, message=exc.message, context=context
                    )
                )
                continue
            result.spectra.append(
                SpectrumTable(
                    num_users=k,
                    truths=trial.truths,
                    spectrum=spectrum,
                    estimate=trial.estimate,
                    snr_db=snr_db,
                    sigma_s_sq=power,
                )
            )
        return result

    def run_sweep(
        self,
        sweep: SweepSpec,
        methods: Sequence[Method] = (Method.QUANTUM, Method.RF),
    ) -> SweepResult:
        """Dispatch on the sweep kind."""
        if sweep.kind is SweepKind.POWER:
            return self.power_sweep(sweep.powers, methods, sweep.bootstrap)
        if sweep.kind is SweepKind.USERS:
            return self.user_sweep(sweep.users, methods, sweep.bootstrap)
        return self.spectrum_dump(sweep.users, sweep.snr_db)
