"""Main CLI application for quantum-music."""

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from quantum_music.cli.common import (
    EXIT_NUMERICAL,
    MethodChoice,
    handle_errors,
    load_scenario,
)
from quantum_music.config.loader import SweepKind
from quantum_music.config.settings import get_settings
from quantum_music.exceptions import ConfigError
from quantum_music.models.results import RmseRecord
from quantum_music.models.scenario import ScenarioConfig
from quantum_music.services.experiment import ExperimentService, SweepResult, simulate_trial
from quantum_music.services.selftest import run_selftest
from quantum_music.storage.results_store import ResultFormat, ResultsStore
from quantum_music.utils.display import (
    console,
    create_rmse_table,
    create_selftest_table,
    create_trial_table,
    format_angles,
    print_info,
    print_success,
    print_warning,
    status_style,
)
from quantum_music.utils.log import configure_logging
from quantum_music.utils.units import format_power, parse_count_list, parse_power, parse_power_list

app = typer.Typer(
    name='quantum-music',
    help='Multi-user AoA estimation with magnitude-only Rydberg atomic receivers',
    no_args_is_help=True,
)

CONFIG_OPTION = typer.Option(None, '--config', '-c', help='TOML scenario file')
SEED_OPTION = typer.Option(None, '--seed', '-s', help='Master seed (overrides the scenario)')
TRIALS_OPTION = typer.Option(None, '--trials', '-q', help='Monte-Carlo trials per point')
OUT_OPTION = typer.Option(None, '--out', '-o', help='Output file (default: QMUSIC_OUTPUT_DIR)')
FORMAT_OPTION = typer.Option(ResultFormat.CSV, '--format', '-f', help='Output format')
WORKERS_OPTION = typer.Option(
    None, '--workers', '-w', help='Worker processes (default: QMUSIC_WORKERS)'
)
METHOD_OPTION = typer.Option(MethodChoice.BOTH, '--method', '-m', help='Receiver(s) to run')
BOOTSTRAP_OPTION = typer.Option(
    None, '--bootstrap', help='Bootstrap resamples for the RMSE interval (0 disables)'
)


@app.callback()
def main(
    verbose: bool = typer.Option(False, '--verbose', '-v', help='Show debug logging'),
) -> None:
    """Quantum-MUSIC: spectral init, biased Gerchberg-Saxton and MUSIC."""
    configure_logging('DEBUG' if verbose else get_settings().log_level)


def _show_records(records: list[RmseRecord], title: str) -> None:
    table = create_rmse_table(title)
    for record in records:
        ci = '-'
        if record.ci_low_deg is not None and record.ci_high_deg is not None:
            ci = f'[{record.ci_low_deg:.4f}, {record.ci_high_deg:.4f}]'
        value = (
            format_power(record.sweep_value)
            if record.sweep_var == 'sigma_s_sq'
            else f'{record.sweep_value:g}'
        )
        table.add_row(
            record.sweep_var,
            value,
            record.method.value,
            str(record.num_users),
            str(record.trials_used),
            f'{record.rmse_deg:.4f}',
            ci,
            str(record.flagged_trials),
        )
    console.print(table)


def _emit(
    result: SweepResult,
    scenario: ScenarioConfig,
    command: str,
    out: Optional[Path],
    fmt: ResultFormat,
) -> None:
    settings = get_settings()
    path = settings.resolve_output(out, f'{command.replace("-", "_")}.{fmt.value}')
    store = ResultsStore(fmt)
    if result.kind is SweepKind.SPECTRUM:
        store.emit_results(result.spectra, path)
        rows = sum(table.spectrum.size for table in result.spectra)
    else:
        store.emit_results(result.records, path)
        rows = len(result.records)
    store.write_meta(
        path,
        scenario,
        command,
        snr_definition=result.snr_definition,
        failures=[failure.model_dump(mode='json') for failure in result.failures],
    )
    if result.failures:
        print_warning(f'{len(result.failures)} trial(s) failed; see {store.meta_path(path)}')
    print_success(f'Wrote {rows} row(s) to {path}')


@app.command('spectrum')
def spectrum(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    users: Optional[str] = typer.Option(None, '--users', '-k', help='User counts, e.g. 1-4'),
    snr_db: Optional[float] = typer.Option(None, '--snr-db', help='Per-cell SNR in dB'),
    out: Optional[Path] = OUT_OPTION,
    fmt: ResultFormat = FORMAT_OPTION,
) -> None:
    """Dump one seeded Quantum-MUSIC pseudospectrum per user count."""
    with handle_errors():
        scenario, sweep = load_scenario(get_settings(), config, seed, None)
        try:
            user_counts = parse_count_list(users) if users else sweep.users
        except ValueError as e:
            raise ConfigError(str(e)) from e
        snr = snr_db if snr_db is not None else sweep.snr_db
        service = ExperimentService(scenario)
        result = service.spectrum_dump(user_counts, snr)

        table = create_trial_table(f'Pseudospectrum peaks at {snr:g} dB')
        for item in result.spectra:
            truths = np.degrees(item.truths)
            found = item.estimate.degrees
            table.add_row(
                f'K={item.num_users}',
                format_angles(list(truths)),
                format_angles(list(found)),
                f'{np.max(np.abs(found - truths)):.4f}',
                'yes' if item.estimate.padded else '',
            )
        console.print(table)
        _emit(result, scenario, 'spectrum', out, fmt)


@app.command('rmse-power')
def rmse_power(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    powers: Optional[str] = typer.Option(
        None, '--powers', '-p', help='Transmit powers, e.g. "-190dBm,-180dBm" or "1e-19,1e-18"'
    ),
    out: Optional[Path] = OUT_OPTION,
    fmt: ResultFormat = FORMAT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    method: MethodChoice = METHOD_OPTION,
    bootstrap: Optional[int] = BOOTSTRAP_OPTION,
) -> None:
    """RMSE versus transmit power."""
    with handle_errors():
        scenario, sweep = load_scenario(get_settings(), config, seed, trials)
        try:
            power_list = parse_power_list(powers) if powers else sweep.powers
        except ValueError as e:
            raise ConfigError(str(e)) from e
        print_info(f'{len(power_list)} power point(s) x {scenario.trials} trials, K={scenario.num_users}')
        service = ExperimentService(scenario, workers=workers)
        resamples = bootstrap if bootstrap is not None else sweep.bootstrap
        result = service.power_sweep(power_list, method.methods(), resamples)
        _show_records(result.records, 'AoA RMSE versus transmit power')
        _emit(result, scenario, 'rmse-power', out, fmt)


@app.command('rmse-users')
def rmse_users(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    users: Optional[str] = typer.Option(None, '--users', '-k', help='User counts, e.g. 1-4'),
    power: Optional[str] = typer.Option(None, '--power', help='Transmit power, e.g. 1e-18'),
    out: Optional[Path] = OUT_OPTION,
    fmt: ResultFormat = FORMAT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    method: MethodChoice = METHOD_OPTION,
    bootstrap: Optional[int] = BOOTSTRAP_OPTION,
) -> None:
    """RMSE versus number of users."""
    with handle_errors():
        try:
            sigma_s_sq = parse_power(power) if power else None
        except ValueError as e:
            raise ConfigError(str(e)) from e
        scenario, sweep = load_scenario(
            get_settings(), config, seed, trials, sigma_s_sq=sigma_s_sq
        )
        try:
            user_counts = parse_count_list(users) if users else sweep.users
        except ValueError as e:
            raise ConfigError(str(e)) from e
        print_info(f'K in {user_counts} x {scenario.trials} trials')
        service = ExperimentService(scenario, workers=workers)
        resamples = bootstrap if bootstrap is not None else sweep.bootstrap
        result = service.user_sweep(user_counts, method.methods(), resamples)
        _show_records(result.records, 'AoA RMSE versus number of users')
        _emit(result, scenario, 'rmse-users', out, fmt)


@app.command('trial')
def trial(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    trial_id: int = typer.Option(0, '--trial-id', '-t', min=0, help='Trial index'),
    method: MethodChoice = METHOD_OPTION,
) -> None:
    """Run a single trial and show its estimates and diagnostics."""
    with handle_errors():
        scenario, _ = load_scenario(get_settings(), config, seed, None)
        table = create_trial_table(f'Trial {trial_id} (seed {scenario.seed})')
        for selected in method.methods():
            result, _ = simulate_trial(scenario, trial_id, selected)
            truths = np.degrees(result.truths)
            found = result.estimate.degrees
            table.add_row(
                selected.value,
                format_angles(list(truths)),
                format_angles(list(found)),
                f'{np.max(np.abs(found - truths)):.4f}',
                'yes' if result.flagged else '',
            )
            diag = result.diagnostics
            if diag.channel_relative_error is not None:
                print_info(f'Channel relative error: {diag.channel_relative_error:.3e}')
                print_info(
                    f'RMS Rabi frequency: {diag.rabi_frequency_rms:.3e} rad/s, '
                    f'excitation probability {diag.excitation_probability:.3e}'
                )
        console.print(table)


@app.command('selftest')
def selftest(
    seed: int = typer.Option(0, '--seed', '-s', help='Seed for the random checks'),
) -> None:
    """Run the fast invariant suite."""
    results = run_selftest(seed)
    table = create_selftest_table()
    for check in results:
        table.add_row(check.name, status_style(check.passed), check.detail)
    console.print(table)
    failed = [check.name for check in results if not check.passed]
    if failed:
        print_warning(f'{len(failed)} check(s) failed: {", ".join(failed)}')
        raise typer.Exit(EXIT_NUMERICAL)
    print_success('All checks passed')


if __name__ == '__main__':
    app()
