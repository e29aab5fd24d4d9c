"""Fast invariant checks run by the ``selftest`` command."""

import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel

from quantum_music.models.estimation import ExpandedSystem, GsState
from quantum_music.models.geometry import UserSet
from quantum_music.models.measurement import NoiseModel, PilotKind
from quantum_music.models.scenario import Method, ScenarioConfig
from quantum_music.numerics.linalg import hermitian_eig, least_squares_solve
from quantum_music.numerics.random import RngStream, sample_complex_gaussian
from quantum_music.services.experiment import run_trial
from quantum_music.services.measurement import generate_pilots, synth_quantum_measurements
from quantum_music.services.music import channel_covariance, noise_subspace_leakage, subspace_split
from quantum_music.services.phase_retrieval import gs_iterations, gs_objective, spectral_init
from quantum_music.services.scene import (
    generate_bias,
    generate_channel,
    rabi_excitation_probability,
)

DESCENT_SLACK = 1e-12


class CheckResult(BaseModel):
    """Outcome of one invariant check."""

    name: str
    passed: bool
    detail: str


def check_rabi_formula(seed: int) -> CheckResult:
    rng = RngStream(seed, 0).generator
    omegas = rng.uniform(0.0, 1e7, size=1000)
    times = rng.uniform(0.0, 1e-6, size=1000)
    worst = max(
        abs(rabi_excitation_probability(w, t) - math.sin(w * t / 2.0) ** 2)
        for w, t in zip(omegas, times)
    )
    return CheckResult(name='rabi formula', passed=worst <= 1e-15, detail=f'max dev {worst:.2e}')


def check_eigen_residual(seed: int) -> CheckResult:
    base = sample_complex_gaussian(RngStream(seed, 1), 64, 1.0).reshape(8, 8)
    matrix = base @ base.conj().T
    eig = hermitian_eig(matrix)
    residual = np.linalg.norm(matrix @ eig.eigenvectors - eig.eigenvectors * eig.eigenvalues)
    ordered = bool(np.all(np.diff(eig.eigenvalues) <= 0))
    passed = residual <= 1e-10 * np.linalg.norm(matrix) and ordered
    return CheckResult(name='eigen residual', passed=passed, detail=f'residual {residual:.2e}')


def check_least_squares(seed: int) -> CheckResult:
    """Least-squares residual must be orthogonal to the pilot rows."""
    pilots = generate_pilots(RngStream(seed, 2), 3, 100, PilotKind.COMPLEX_GAUSSIAN).entries
    rhs = sample_complex_gaussian(RngStream(seed, 3), 100, 1.0)
    solution = least_squares_solve(pilots, rhs)
    leakage = np.linalg.norm(pilots @ (rhs - pilots.conj().T @ solution))
    return CheckResult(
        name='least-squares orthogonality',
        passed=leakage <= 1e-9 * np.linalg.norm(rhs) * np.linalg.norm(pilots),
        detail=f'|S r| = {leakage:.2e}',
    )


def check_gs_descent(seed: int, instances: int = 20) -> CheckResult:
    """The GS objective must not increase on random noisy instances."""
    cfg = ScenarioConfig(num_users=3, num_elements=4, sigma_n_sq=1e-4, sigma_s_sq=1.0)
    geom = cfg.geometry()
    worst = -math.inf
    for instance in range(instances):
        stream = RngStream(seed, 100 + instance)
        users = UserSet.uniform(np.radians([50.0, 90.0, 130.0]), cfg.sigma_s_sq)
        channel = generate_channel(stream.child(0), geom, users, cfg.constants())
        pilots = generate_pilots(stream.child(1), cfg.num_users, cfg.num_pilots)
        signal_rms = float(np.sqrt(np.mean(np.abs(channel.entries @ pilots.entries.conj()) ** 2)))
        bias = generate_bias(stream.child(2), geom, cfg.constants(), cfg.bias_ratio, signal_rms)
        panel = synth_quantum_measurements(
            channel, pilots, bias, NoiseModel(sigma_n_sq=cfg.sigma_n_sq), stream.child(3)
        )
        b_m, z_m = complex(bias.entries[0]), panel.entries[0]
        a0 = spectral_init(ExpandedSystem.build(pilots.entries, b_m), z_m)
        previous = gs_objective(a0, pilots, b_m, z_m)
        state = GsState(a_current=a0, iteration=0, objective=previous)
        for state in gs_iterations(state, pilots, b_m, z_m, cfg.num_iterations):
            worst = max(worst, state.objective - previous)
            previous = state.objective
    return CheckResult(
        name='GS descent',
        passed=worst <= DESCENT_SLACK,
        detail=f'max increase {worst:.2e}',
    )


def check_noiseless_pipeline(seed: int) -> CheckResult:
    """Noiseless K=3 scene must be resolved within one grid step by both receivers."""
    cfg = ScenarioConfig(
        angles=(60.0, 90.0, 120.0), sigma_n_sq=0.0, sigma_t_sq=0.0, seed=seed
    )
    step = math.degrees(cfg.grid().step)
    errors = []
    for method in (Method.QUANTUM, Method.RF):
        result = run_trial(cfg, 0, method)
        errors.append(float(np.max(np.abs(result.estimate.degrees - np.degrees(result.truths)))))
    worst = max(errors)
    return CheckResult(
        name='noiseless end-to-end',
        passed=worst <= step,
        detail=f'max error {worst:.5f} deg (step {step:.5f})',
    )


def check_subspace_orthogonality(seed: int) -> CheckResult:
    cfg = ScenarioConfig(angles=(45.0, 80.0, 135.0), seed=seed)
    geom = cfg.geometry()
    users = UserSet.uniform(np.radians(cfg.angles), cfg.sigma_s_sq)
    channel = generate_channel(RngStream(seed, 4), geom, users, cfg.constants())
    split = subspace_split(channel_covariance(channel.assembled(), cfg.num_pilots), cfg.num_users)
    leakage = noise_subspace_leakage(split, geom, np.asarray(users.angles))
    return CheckResult(
        name='subspace orthogonality', passed=leakage <= 1e-8, detail=f'leakage {leakage:.2e}'
    )


SELFTEST_CHECKS: tuple[Callable[[int], CheckResult], ...] = (
    check_rabi_formula,
    check_eigen_residual,
    check_least_squares,
    check_gs_descent,
    check_subspace_orthogonality,
    check_noiseless_pipeline,
)


def run_selftest(seed: int = 0) -> list[CheckResult]:
    """Run every check; exceptions count as failures."""
    results = []
    for check in SELFTEST_CHECKS:
        try:
            results.append(check(seed))
        except Exception as exc:  # noqa: BLE001
            name = check.__name__.removeprefix('check_').replace('_', ' ')
            results.append(CheckResult(name=name, passed=False, detail=f'raised {exc}'))
    return results
