"""Channel recovery from magnitude-only panels.

Spectral initialization on the bias-expanded pilot system followed by biased
Gerchberg-Saxton alternating minimization, run independently for every cell.
"""

from collections.abc import Iterator
from typing import Optional

import numpy as np

from quantum_music.exceptions import DegeneratePilotError, InvalidArgumentError, NumericalError
from quantum_music.models.channel import BiasVector
from quantum_music.models.estimation import ExpandedSystem, GsState
from quantum_music.models.measurement import MagnitudePanel, PilotMatrix
from quantum_music.models.scenario import InitMode
from quantum_music.numerics.linalg import LeastSquaresOperator, principal_eigenvector
from quantum_music.services.measurement import pilot_solver
from quantum_music.utils.log import get_logger

logger = get_logger(__name__)


def spectral_init(
    system: ExpandedSystem,
    z_m: np.ndarray,
    init_mode: InitMode = InitMode.TRUNCATE,
) -> np.ndarray:
    """Initial channel estimate a_m^0 from the principal direction of R_bar.

    R_bar = sum_p z_p s_bar_p s_bar_p^H, v its principal eigenvector and
    r_bar = (|v^H S_bar| z) / ||S_bar^H v||^2; the K leading entries of
    r_bar * v are returned.

    The cell is first rescaled to unit measurement RMS (z and the bias row
    divided by the same factor, the estimate multiplied back), so the bias row
    carries the same weight whatever unit system the amplitudes are in.
    Scaling z and b together by c therefore scales a_m^0 by c.
    """
    z_m = np.asarray(z_m, dtype=float)
    s_bar = system.s_bar
    num_users = system.num_users
    if z_m.shape != (system.num_snapshots,):
        raise InvalidArgumentError(
            f'z_m must have length P={system.num_snapshots}, got shape {z_m.shape}'
        )
    if system.num_snapshots < num_users + 1:
        raise InvalidArgumentError(
            f'spectral initialization needs P >= K+1, got P={system.num_snapshots}, K={num_users}'
        )
    if not np.all(np.isfinite(z_m)):
        raise InvalidArgumentError('z_m contains non-finite entries')

    if not np.any(z_m):
        return np.zeros(num_users, dtype=complex)

    scale = float(np.sqrt(np.mean(z_m**2)))
    s_bar = s_bar.copy()
    s_bar[-1] /= scale
    z_unit = z_m / scale

    r_bar_matrix = (s_bar * z_unit) @ s_bar.conj().T
    v = principal_eigenvector(r_bar_matrix)
    projection = s_bar.conj().T @ v
    energy = float(np.vdot(projection, projection).real)
    if energy == 0.0:
        raise DegeneratePilotError('expanded pilots annihilate the principal direction')
    r_bar = float(np.abs(projection) @ z_unit) / energy
    a_bar = r_bar * v

    if init_mode is InitMode.NORMALIZE_LAST and abs(a_bar[-1]) > 0:
        a_bar = a_bar / a_bar[-1]
    return scale * a_bar[:num_users]


def gs_objective(
    a_m: np.ndarray, pilots: PilotMatrix, b_m: complex, z_m: np.ndarray
) -> float:
    """Joint objective minimized over the phases: || z - |S^H a + b| ||^2."""
    interior = pilots.entries.conj().T @ a_m + b_m
    residual = z_m - np.abs(interior)
    return float(residual @ residual)


def gs_step(
    state: GsState,
    pilots: PilotMatrix,
    b_m: complex,
    z_m: np.ndarray,
    solver: Optional[LeastSquaresOperator] = None,
) -> GsState:
    """One alternating-minimization step.

    Phases are taken from the current model S^H a + b (phase of 0 is 0), then
    a is the least-squares fit of z * exp(j phase) - b.
    """
    solver = solver or pilot_solver(pilots)
    z_m = np.asarray(z_m, dtype=float)
    interior = pilots.entries.conj().T @ state.a_current + b_m
    target = z_m * np.exp(1j * np.angle(interior)) - b_m
    a_next = solver.solve(target)
    return GsState(
        a_current=a_next,
        iteration=state.iteration + 1,
        objective=gs_objective(a_next, pilots, b_m, z_m),
    )


def gs_iterations(
    state: GsState,
    pilots: PilotMatrix,
    b_m: complex,
    z_m: np.ndarray,
    num_iterations: int,
    solver: Optional[LeastSquaresOperator] = None,
    tolerance: Optional[float] = None,
) -> Iterator[GsState]:
    """Yield successive GS states.

    With a tolerance, iteration stops once the relative objective improvement
    falls to or below it.
    """
    solver = solver or pilot_solver(pilots)
    for _ in range(num_iterations):
        next_state = gs_step(state, pilots, b_m, z_m, solver)
        yield next_state
        improvement = state.objective - next_state.objective
        if tolerance is not None and improvement <= tolerance * state.objective:
            return
        state = next_state


def recover_cell_channel(
    pilots: PilotMatrix,
    b_m: complex,
    z_m: np.ndarray,
    num_iterations: int = 50,
    init_mode: InitMode = InitMode.TRUNCATE,
    tolerance: Optional[float] = None,
    solver: Optional[LeastSquaresOperator] = None,
) -> np.ndarray:
    """Spectral initialization followed by N biased GS steps for one cell."""
    if num_iterations < 0:
        raise InvalidArgumentError(f'iteration count must be non-negative, got {num_iterations}')
    solver = solver or pilot_solver(pilots)
    z_m = np.asarray(z_m, dtype=float)
    system = ExpandedSystem.build(pilots.entries, b_m)
    a_init = spectral_init(system, z_m, init_mode)
    state = GsState(
        a_current=a_init,
        iteration=0,
        objective=gs_objective(a_init, pilots, b_m, z_m),
    )
    for state in gs_iterations(
        state, pilots, b_m, z_m, num_iterations, solver=solver, tolerance=tolerance
    ):
        pass
    return state.a_current


def recover_channel_matrix(
    pilots: PilotMatrix,
    bias: BiasVector,
    panel: MagnitudePanel,
    num_iterations: int = 50,
    init_mode: InitMode = InitMode.TRUNCATE,
    tolerance: Optional[float] = None,
) -> np.ndarray:
    """Estimated channel A_hat = [a_hat_1, ..., a_hat_M]^H, shape M x K.

    Cells are recovered independently; failures are collected and raised
    together with their cell indices.
    """
    if panel.num_snapshots != pilots.num_snapshots:
        raise InvalidArgumentError(
            f'snapshot axis mismatch: panel has P={panel.num_snapshots}, '
            f'pilots have P={pilots.num_snapshots}'
        )
    if bias.num_elements != panel.num_elements:
        raise InvalidArgumentError(
            f'element axis mismatch: panel has M={panel.num_elements}, '
            f'bias has M={bias.num_elements}'
        )
    solver = pilot_solver(pilots)
    estimate = np.zeros((panel.num_elements, pilots.num_users), dtype=complex)
    failures: list[tuple[int, NumericalError]] = []
    for m in range(panel.num_elements):
        try:
            a_hat = recover_cell_channel(
                pilots,
                complex(bias.entries[m]),
                panel.entries[m],
                num_iterations=num_iterations,
                init_mode=init_mode,
                tolerance=tolerance,
                solver=solver,
            )
        except NumericalError as exc:
            logger.debug('channel recovery failed on cell %d: %s', m, exc)
            failures.append((m, exc.with_context(cell=m)))
            continue
        estimate[m] = a_hat.conj()

    if failures:
        cells = [m for m, _ in failures]
        raise NumericalError(
            f'channel recovery failed on {len(failures)} cell(s): {failures[0][1].message}',
            cells=cells,
        )
    return estimate


def relative_channel_error(estimate: np.ndarray, target: np.ndarray) -> float:
    """||A_hat - A||_F / ||A||_F."""
    scale = np.linalg.norm(target)
    if scale == 0:
        return float(np.linalg.norm(estimate))
    return float(np.linalg.norm(estimate - target) / scale)


def phase_aligned_error(estimate: np.ndarray, target: np.ndarray) -> float:
    """Relative error after removing the best global unit-modulus factor."""
    inner = np.vdot(estimate, target)
    rotation = inner / abs(inner) if abs(inner) > 0 else 1.0
    return relative_channel_error(estimate * rotation, target)
