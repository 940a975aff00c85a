"""Measurement-feedback work extraction at Alice's mode.

Bob measures his mode, Alice undoes the conditional displacement and then
squeezes to balance her two variances.  The extracted work is the drop in
Alice's local energy, which does not depend on Bob's outcome.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import (
    PSD_TOL,
    MeasurementSpec,
    SingleModeState,
    StandardFormParams,
    conditional_update,
    is_physical,
    lmi_margin,
    local_energy,
    local_symplectic_form,
    standard_form_cov,
    standard_form_state,
)
from .errors import DegenerateConditioning, NonDiagonalInput, NonPositiveVariance, NotPhysical


class ProtocolKind(str, Enum):
    HOMODYNE_X = "homx"
    HOMODYNE_P = "homp"
    HOMODYNE_AVERAGE = "hom"
    HETERODYNE = "het"


OMEGA_AB = local_symplectic_form(True, True)

MEASUREMENTS = {
    ProtocolKind.HOMODYNE_X: MeasurementSpec.homodyne_x(),
    ProtocolKind.HOMODYNE_P: MeasurementSpec.homodyne_p(),
    ProtocolKind.HETERODYNE: MeasurementSpec.heterodyne(),
}

# X protocol squeezes with diag(s, 1/s); P and heterodyne with diag(1/s, s)
SQUEEZE_AXIS = {
    ProtocolKind.HOMODYNE_X: "x",
    ProtocolKind.HOMODYNE_P: "p",
    ProtocolKind.HETERODYNE: "p",
}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Every intermediate state of one run of a single-measurement protocol."""

    kind: ProtocolKind
    outcome: tuple[float, float]
    post_measurement: SingleModeState
    post_displacement: SingleModeState
    squeeze_s: float
    final_state: SingleModeState
    initial_energy: float
    final_energy: float
    work: float

    def to_dict(self) -> dict:
        def mode(s: SingleModeState) -> dict:
            return {"mean": s.mean.tolist(), "cov": s.cov.tolist()}

        return {
            "kind": self.kind.value,
            "outcome": list(self.outcome),
            "post_measurement": mode(self.post_measurement),
            "post_displacement": mode(self.post_displacement),
            "squeeze_s": self.squeeze_s,
            "final_state": mode(self.final_state),
            "initial_energy": self.initial_energy,
            "final_energy": self.final_energy,
            "work": self.work,
        }


@dataclass(frozen=True)
class WorkReport:
    w_hom: float
    w_het: float
    w_x: float
    w_p: float

    def to_dict(self) -> dict:
        return asdict(self)


def squeeze_matrix(s: float, axis: str = "x") -> np.ndarray:
    """``diag(s, 1/s)`` for ``axis='x'`` and ``diag(1/s, s)`` for ``axis='p'``."""
    if axis == "x":
        return np.diag([s, 1.0 / s])
    if axis == "p":
        return np.diag([1.0 / s, s])
    raise ValueError(f"axis must be 'x' or 'p', got {axis!r}")


def optimal_squeeze(cov, axis: str = "x") -> tuple[float, np.ndarray]:
    """Squeeze parameter minimising the trace of a diagonal covariance.

    For ``axis='x'`` the trace ``g1 s**2 + g2 / s**2`` is minimal at
    ``s**2 = sqrt(g2 / g1)``; for ``axis='p'`` the roles of ``g1`` and ``g2``
    swap.  Either way the squeezed covariance is
    ``diag(sqrt(g1 g2), sqrt(g1 g2))`` up to rounding.

    Returns:
        (s, squeezed covariance)

    Raises:
        NonDiagonalInput: if ``cov`` has off-diagonal entries.
        NonPositiveVariance: if a diagonal entry is not positive.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise ValueError(f"expected a 2x2 covariance, got {cov.shape}")
    if cov[0, 1] != 0.0 or cov[1, 0] != 0.0:
        raise NonDiagonalInput("optimal_squeeze needs a diagonal covariance")
    g1, g2 = cov[0, 0], cov[1, 1]
    if not (g1 > 0 and g2 > 0):
        raise NonPositiveVariance(f"variances must be positive, got {g1}, {g2}")
    ratio = g2 / g1 if axis == "x" else g1 / g2
    s = math.sqrt(math.sqrt(ratio))
    sq = squeeze_matrix(s, axis)
    return s, sq @ cov @ sq.T


def _physical_state(params: StandardFormParams):
    state = standard_form_state(params)
    if not is_physical(state.cov):
        raise NotPhysical(f"parameters {params.as_tuple()} do not describe a physical state")
    return state


def run_protocol(
    params: StandardFormParams, kind: ProtocolKind | str, outcome: Sequence[float] = (0.0, 0.0)
) -> Trajectory:
    """Run the X-homodyne, P-homodyne or heterodyne protocol for one outcome.

    Raises:
        NotPhysical: if ``params`` is not a physical state.
        DegenerateConditioning: if Alice's conditional state has a non-positive variance.
    """
    kind = ProtocolKind(kind)
    if kind not in MEASUREMENTS:
        raise ValueError(f"{kind.value} is an average of protocols, not a single run")
    state = _physical_state(params)
    outcome = (float(outcome[0]), float(outcome[1]))

    post = conditional_update(state, MEASUREMENTS[kind], outcome)
    # the displacement that exactly cancels the conditional mean
    displaced = SingleModeState(post.mean + (-post.mean), post.cov)
    try:
        s, final_cov = optimal_squeeze(displaced.cov, SQUEEZE_AXIS[kind])
    except NonPositiveVariance as exc:
        raise DegenerateConditioning(str(exc)) from exc
    final = SingleModeState(squeeze_matrix(s, SQUEEZE_AXIS[kind]) @ displaced.mean, final_cov)

    initial_energy = local_energy(state.reduced("A"))
    final_energy = local_energy(final)
    return Trajectory(
        kind=kind,
        outcome=outcome,
        post_measurement=post,
        post_displacement=displaced,
        squeeze_s=s,
        final_state=final,
        initial_energy=initial_energy,
        final_energy=final_energy,
        work=initial_energy - final_energy,
    )


def trajectory_works_many(a, b, c1, c2, kind: ProtocolKind | str, outcomes) -> np.ndarray:
    """Per-outcome protocol work for a stack of standard-form states.

    Runs the same steps as :func:`run_protocol` (conditional mean, exact
    displacement removal, balancing squeeze, local energy) on arrays.
    ``a, b, c1, c2`` have shape ``(n,)`` and ``outcomes`` shape ``(n, m, 2)``;
    the result has shape ``(n, m)``.

    Raises:
        NotPhysical: if any of the states is nonphysical.
    """
    kind = ProtocolKind(kind)
    meas = MEASUREMENTS[kind]
    a, b, c1, c2 = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (a, b, c1, c2))
    covs = standard_form_cov(a, b, c1, c2)
    if (lmi_margin(covs, OMEGA_AB) < -PSD_TOL).any():
        raise NotPhysical("trajectory_works_many needs physical states")
    cov_a, cov_b, cross = covs[:, :2, :2], covs[:, 2:, 2:], covs[:, :2, 2:]

    q = meas.measured_quadrature
    if q is not None:
        inv = np.zeros_like(cov_b)
        inv[:, q, q] = 1.0 / cov_b[:, q, q]
    else:
        inv = np.linalg.inv(cov_b + np.diag([meas.lam, 1.0 / meas.lam]))
    gain = cross @ inv
    post_cov = cov_a - gain @ np.swapaxes(cross, -1, -2)

    offsets = np.asarray(outcomes, dtype=float)
    if q is not None:
        offsets = np.where(np.arange(2) == q, offsets, 0.0)
    means = np.einsum("nij,nmj->nmi", gain, offsets)
    displaced = means + (-means)

    g1, g2 = post_cov[:, 0, 0], post_cov[:, 1, 1]
    ratio = g2 / g1 if SQUEEZE_AXIS[kind] == "x" else g1 / g2
    s = np.sqrt(np.sqrt(ratio))
    scale = np.stack([s, 1.0 / s], axis=-1) if SQUEEZE_AXIS[kind] == "x" else np.stack([1.0 / s, s], axis=-1)
    final_means = displaced * scale[:, None, :]
    final_trace = g1 * scale[:, 0] ** 2 + g2 * scale[:, 1] ** 2
    final_energy = 0.5 * (np.einsum("nmi,nmi->nm", final_means, final_means) + 0.5 * final_trace[:, None])
    return 0.5 * a[:, None] - final_energy


def batch_trajectory_work(params: StandardFormParams, kind: ProtocolKind | str, outcomes) -> np.ndarray:
    """Per-outcome work of a single-measurement protocol for one state.

    ``outcomes`` is an ``(n, 2)`` array; see :func:`trajectory_works_many`.
    """
    outcomes = np.atleast_2d(np.asarray(outcomes, dtype=float))
    return trajectory_works_many(*params.as_tuple(), kind, outcomes[None])[0]


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def work_x_closed(a, b, c1, c2=None):
    return a / 2 - a / 2 * np.sqrt(1 - np.square(c1) / (a * b))


def work_p_closed(a, b, c1, c2):
    return a / 2 - a / 2 * np.sqrt(1 - np.square(c2) / (a * b))


def work_hom_closed(a, b, c1, c2):
    """``a/2 - (a/4) (sqrt(1 - c1^2/ab) + sqrt(1 - c2^2/ab))``; no validation."""
    ab = a * b
    return a / 2 - a / 4 * (np.sqrt(1 - np.square(c1) / ab) + np.sqrt(1 - np.square(c2) / ab))


def work_het_closed(a, b, c1, c2):
    """``a/2 - (a/2) sqrt(1 - c1^2/(a(b+1))) sqrt(1 - c2^2/(a(b+1)))``; no validation."""
    n = a * (b + 1)
    return a / 2 - a / 2 * np.sqrt(1 - np.square(c1) / n) * np.sqrt(1 - np.square(c2) / n)


CLOSED_FORMS = {
    ProtocolKind.HOMODYNE_X: work_x_closed,
    ProtocolKind.HOMODYNE_P: work_p_closed,
    ProtocolKind.HOMODYNE_AVERAGE: work_hom_closed,
    ProtocolKind.HETERODYNE: work_het_closed,
}


def work_closed(kind: ProtocolKind | str, a, b, c1, c2):
    """Vectorised closed-form work for any protocol kind; inputs are not checked."""
    return CLOSED_FORMS[ProtocolKind(kind)](a, b, c1, c2)


def work_hom(params: StandardFormParams) -> float:
    """Average work of the equal-weight X/P homodyne protocols.

    Raises:
        NotPhysical: for nonphysical ``params``.
    """
    _physical_state(params)
    return float(work_hom_closed(*params.as_tuple()))


def work_het(params: StandardFormParams) -> float:
    """Work of the heterodyne protocol.

    Raises:
        NotPhysical: for nonphysical ``params``.
    """
    _physical_state(params)
    return float(work_het_closed(*params.as_tuple()))


def work_report(params: StandardFormParams) -> WorkReport:
    _physical_state(params)
    a, b, c1, c2 = params.as_tuple()
    return WorkReport(
        w_hom=float(work_hom_closed(a, b, c1, c2)),
        w_het=float(work_het_closed(a, b, c1, c2)),
        w_x=float(work_x_closed(a, b, c1, c2)),
        w_p=float(work_p_closed(a, b, c1, c2)),
    )

