"""Monte-Carlo check of the conditioning formulas and protocol works.

Gaussian states have a positive Wigner function, so their quadrature
statistics can be sampled classically: points are drawn from a normal
distribution with the state mean and covariance ``Gamma / 2``.

Random streams: sample ``i`` belongs to chunk ``i // CHUNK_SIZE`` and each
chunk draws from ``PCG64(SeedSequence(seed, spawn_key=(chunk,)))``.  Batches
are therefore identical whatever the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import MeasurementSpec, Mode, StandardFormParams, TwoModeState, is_physical, standard_form_state
from .errors import InsufficientSamples, NotPhysical
from .protocols import ProtocolKind, batch_trajectory_work, MEASUREMENTS

CHUNK_SIZE = 1 << 16
MIN_SAMPLES = 100


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Phase-space samples ``(x_A, p_A, x_B, p_B)`` plus unit-variance outcome noise."""

    n: int
    seed: int
    points: np.ndarray
    outcome_noise: np.ndarray


@dataclass(frozen=True, eq=False)
class MomentEstimate:
    """Regression of the kept mode's quadratures on the measurement outcome.

    ``slope[i, j]`` is the coefficient of outcome component ``j`` (x, p) for
    quadrature ``i``; columns of unmeasured components are NaN.
    ``conditional_cov`` is the residual covariance, i.e. an estimate of
    ``Gamma' / 2`` in variance units.
    """

    n: int
    slope: np.ndarray
    slope_stderr: np.ndarray
    conditional_cov: np.ndarray
    cov_stderr: np.ndarray


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _sample_chunk(args):
    seed, chunk, size, mean, chol = args
    rng = chunk_generator(seed, chunk)
    z = rng.standard_normal((size, 4))
    noise = rng.standard_normal((size, 2))
    return mean + z @ chol.T, noise


def sample_state(state: TwoModeState, n: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``n`` phase-space points from ``state``.

    Raises:
        NotPhysical: if the state's covariance violates the uncertainty relation.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not is_physical(state.cov):
        raise NotPhysical("cannot sample a nonphysical state")
    chol = np.linalg.cholesky(state.cov / 2.0)
    sizes = [min(CHUNK_SIZE, n - start) for start in range(0, n, CHUNK_SIZE)]
    tasks = [(seed, i, size, state.mean, chol) for i, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sample_chunk, tasks))
    else:
        parts = [_sample_chunk(t) for t in tasks]
    points = np.concatenate([p for p, _ in parts])
    noise = np.concatenate([q for _, q in parts])
    return SampleBatch(n=n, seed=seed, points=points, outcome_noise=noise)


def measurement_outcomes(batch: SampleBatch, meas: MeasurementSpec) -> np.ndarray:
    """Simulated outcomes ``(x_m, p_m)``, one row per sample.

    Homodyne rows copy the measured quadrature and put NaN in the other
    component; general measurements add noise of covariance ``Gamma_m / 2``.
    """
    cols = slice(2, 4) if meas.mode is Mode.B else slice(0, 2)
    quad = batch.points[:, cols]
    q = meas.measured_quadrature
    if q is not None:
        out = np.full_like(quad, np.nan)
        out[:, q] = quad[:, q]
        return out
    scale = np.sqrt(np.array([meas.lam, 1.0 / meas.lam]) / 2.0)
    return quad + batch.outcome_noise * scale


def estimate_conditional(batch: SampleBatch, meas: MeasurementSpec) -> MomentEstimate:
    """Ordinary least squares of the unmeasured mode on the outcome.

    Raises:
        InsufficientSamples: if the batch has fewer than 100 points.
    """
    if batch.n < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} samples, got {batch.n}")
    outcomes = measurement_outcomes(batch, meas)
    used = [j for j in range(2) if not np.isnan(outcomes[0, j])]
    kept = batch.points[:, 0:2] if meas.mode is Mode.B else batch.points[:, 2:4]

    design = np.column_stack([np.ones(batch.n), outcomes[:, used]])
    beta, *_ = np.linalg.lstsq(design, kept, rcond=None)
    resid = kept - design @ beta
    dof = batch.n - design.shape[1]
    cov = resid.T @ resid / dof
    xtx_inv = np.linalg.inv(design.T @ design)

    slope = np.full((2, 2), np.nan)
    slope_se = np.full((2, 2), np.nan)
    for k, j in enumerate(used):
        slope[:, j] = beta[1 + k]
        slope_se[:, j] = np.sqrt(np.diag(cov) * xtx_inv[1 + k, 1 + k])
    var = np.diag(cov)
    cov_se = np.sqrt((np.outer(var, var) + cov**2) / dof)
    return MomentEstimate(batch.n, slope, slope_se, cov, cov_se)


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def shot_works(params: StandardFormParams, kind: ProtocolKind | str, batch: SampleBatch) -> np.ndarray:
    """Per-shot work of a single-measurement protocol on the sampled outcomes."""
    kind = ProtocolKind(kind)
    outcomes = np.nan_to_num(measurement_outcomes(batch, MEASUREMENTS[kind]))
    return batch_trajectory_work(params, kind, outcomes)


def mc_work(
    params: StandardFormParams, kind: ProtocolKind | str, n: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    """Sample-mean work and its standard error.

    ``HOMODYNE_AVERAGE`` runs the X protocol on even-indexed shots and the P
    protocol on odd-indexed ones and weighs the two halves equally.

    Raises:
        NotPhysical: for nonphysical ``params``.
    """
    kind = ProtocolKind(kind)
    state = standard_form_state(params)
    if not is_physical(state.cov):
        raise NotPhysical(f"parameters {params.as_tuple()} do not describe a physical state")
    batch = sample_state(state, n, seed, workers=workers)
    if kind is not ProtocolKind.HOMODYNE_AVERAGE:
        return _mean_stderr(shot_works(params, kind, batch))
    if n < 2:
        raise InsufficientSamples("the homodyne average needs at least two shots")
    wx = shot_works(params, ProtocolKind.HOMODYNE_X, batch)[0::2]
    wp = shot_works(params, ProtocolKind.HOMODYNE_P, batch)[1::2]
    mx, sx = _mean_stderr(wx)
    mp, sp = _mean_stderr(wp)
    return 0.5 * (mx + mp), 0.5 * math.hypot(sx, sp)
