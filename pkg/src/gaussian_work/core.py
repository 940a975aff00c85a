r"""Covariance-matrix algebra for one- and two-mode Gaussian states.

Convention used everywhere in this package: quadratures are ordered
``(x_A, p_A, x_B, p_B)`` with ``x = (a + a^\dagger)/\sqrt{2}`` and ``[x, p] = i``,
and the covariance matrix is the symmetrised second moment

.. math::
    \Gamma_{ij} = \langle \Delta R_i \Delta R_j + \Delta R_j \Delta R_i \rangle ,

so the vacuum has ``Gamma = identity`` and the quadrature variances of a
state are ``Gamma / 2``.  The uncertainty relation reads ``Gamma + i Omega >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    NonHermitianInput,
    NotPositiveDefinite,
    SingularConditioning,
)

#: Matrix inequalities ``M >= 0`` are accepted when ``min eig(M) >= -PSD_TOL``.
PSD_TOL = 1e-12
#: Symmetry / hermiticity tolerance for input validation.
SYMMETRY_TOL = 1e-12

_OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int = 2) -> np.ndarray:
    """Return ``Omega = (+)_i [[0, 1], [-1, 0]]`` for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), _OMEGA_1)


def local_symplectic_form(on_a: bool = True, on_b: bool = True) -> np.ndarray:
    """Two-mode block-diagonal ``diag(Omega_A, Omega_B)`` with either block zeroed.

    ``(True, True)`` gives the physicality / separability form, ``(True, False)``
    the Bob-to-Alice nonsteerability form and ``(False, True)`` the
    Alice-to-Bob one.
    """
    out = np.zeros((4, 4))
    if on_a:
        out[:2, :2] = _OMEGA_1
    if on_b:
        out[2:, 2:] = _OMEGA_1
    return out


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardFormParams:
    """The four reals ``(a, b, c1, c2)`` of a two-mode standard-form covariance."""

    a: float
    b: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("a", "b", "c1", "c2"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def swapped_parties(self) -> "StandardFormParams":
        """Relabel Alice and Bob (``a <-> b``)."""
        return StandardFormParams(self.b, self.a, self.c1, self.c2)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c1, self.c2)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_symmetric(cov: np.ndarray, n: int, what: str) -> None:
    if cov.shape != (n, n):
        raise ValueError(f"{what} must be {n}x{n}, got shape {cov.shape}")
    if np.abs(cov - cov.T).max() > SYMMETRY_TOL:
        raise ValueError(f"{what} is not symmetric")


@dataclass(frozen=True, eq=False)
class SingleModeState:
    """Mean pair and 2x2 covariance of a single mode."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (2,):
            raise ValueError(f"mean must have 2 entries, got {mean.shape}")
        _check_symmetric(cov, 2, "cov")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen((cov + cov.T) / 2))

    @property
    def is_physical(self) -> bool:
        return bool(np.trace(self.cov) > 0 and np.linalg.det(self.cov) >= 1.0 - PSD_TOL)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Mean vector ``(x_A, p_A, x_B, p_B)`` and 4x4 covariance ``Gamma_AB``."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (4,):
            raise ValueError(f"mean must have 4 entries, got {mean.shape}")
        _check_symmetric(cov, 4, "cov")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen((cov + cov.T) / 2))

    @property
    def cov_a(self) -> np.ndarray:
        return self.cov[:2, :2]

    @property
    def cov_b(self) -> np.ndarray:
        return self.cov[2:, 2:]

    @property
    def correlation(self) -> np.ndarray:
        """Off-diagonal block ``C`` (rows: Alice, columns: Bob)."""
        return self.cov[:2, 2:]

    def reduced(self, mode: "Mode | str") -> SingleModeState:
        mode = Mode(mode)
        sl = slice(0, 2) if mode is Mode.A else slice(2, 4)
        return SingleModeState(self.mean[sl], self.cov[sl, sl])


class Mode(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class MeasurementSpec:
    """Gaussian measurement with covariance ``diag(lam, 1/lam)`` on one mode.

    ``lam = 0`` is x-homodyne, ``lam = inf`` is p-homodyne, ``lam = 1`` is
    heterodyne.
    """

    mode: Mode = Mode.B
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        lam = float(self.lam)
        if math.isnan(lam) or lam < 0:
            raise ValueError(f"lambda must be in [0, inf], got {self.lam}")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def homodyne_x(cls, mode: Mode | str = Mode.B) -> "MeasurementSpec":
        return cls(mode, 0.0)

    @classmethod
    def homodyne_p(cls, mode: Mode | str = Mode.B) -> "MeasurementSpec":
        return cls(mode, math.inf)

    @classmethod
    def heterodyne(cls, mode: Mode | str = Mode.B) -> "MeasurementSpec":
        return cls(mode, 1.0)

    @property
    def is_homodyne(self) -> bool:
        return self.lam == 0.0 or math.isinf(self.lam)

    @property
    def measured_quadrature(self) -> int | None:
        """0 for x-homodyne, 1 for p-homodyne, None otherwise."""
        if self.lam == 0.0:
            return 0
        if math.isinf(self.lam):
            return 1
        return None

    @property
    def cov(self) -> np.ndarray:
        """``Gamma_m = diag(lam, 1/lam)``, with ``inf`` entries at the homodyne limits."""
        lam = self.lam
        inv = math.inf if lam == 0.0 else (0.0 if math.isinf(lam) else 1.0 / lam)
        return np.diag([lam, inv])


# ---------------------------------------------------------------------------
# Construction and matrix criteria
# ---------------------------------------------------------------------------


def standard_form_cov(a, b, c1, c2) -> np.ndarray:
    """Standard-form covariance matrix; arguments may be broadcastable arrays.

    Returns an array of shape ``broadcast_shape + (4, 4)``.
    """
    a, b, c1, c2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c1, c2)))
    out = np.zeros(a.shape + (4, 4))
    out[..., 0, 0] = out[..., 1, 1] = a
    out[..., 2, 2] = out[..., 3, 3] = b
    out[..., 0, 2] = out[..., 2, 0] = c1
    out[..., 1, 3] = out[..., 3, 1] = c2
    return out


def standard_form_state(params: StandardFormParams) -> TwoModeState:
    """Zero-mean two-mode state with the standard-form covariance of ``params``."""
    return TwoModeState(np.zeros(4), standard_form_cov(*params.as_tuple()))


def min_hermitian_eigenvalue(matrix) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    Raises:
        NonHermitianInput: if ``matrix`` deviates from its conjugate transpose by
            more than ``SYMMETRY_TOL``.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > SYMMETRY_TOL:
        raise NonHermitianInput("matrix is not Hermitian")
    return float(np.linalg.eigvalsh(m)[0])


def lmi_margin(covs, omega: np.ndarray) -> np.ndarray | float:
    """Minimum eigenvalue of ``cov + i*omega`` for one matrix or a stack of them.

    No validation is done; this is the vectorised workhorse behind every
    ``M >= 0`` criterion.
    """
    covs = np.asarray(covs, dtype=float)
    eig = np.linalg.eigvalsh(covs + 1j * omega)[..., 0]
    return float(eig) if eig.ndim == 0 else eig


def partial_transpose(cov) -> np.ndarray:
    """Covariance of the partially transposed state, ``L Gamma L^T`` with ``L = diag(1,1,1,-1)``.

    Works on a single 4x4 matrix or a stack of them.
    """
    out = np.array(cov, dtype=float, copy=True)
    out[..., 3, :] *= -1.0
    out[..., :, 3] *= -1.0
    return out


def symplectic_eigenvalues(cov) -> tuple[float, float]:
    """Symplectic eigenvalues ``(nu_minus, nu_plus)`` of a two-mode covariance.

    They are the moduli of the eigenvalues of ``i Omega Gamma``; here they are
    read off the Hermitian similar matrix ``Gamma^(1/2) (i Omega) Gamma^(1/2)``,
    which stays accurate when the two values coincide (pure states).

    Raises:
        NotPositiveDefinite: if ``cov`` is not positive definite.
    """
    cov = np.asarray(cov, dtype=float)
    _check_symmetric(cov, 4, "cov")
    w, v = np.linalg.eigh((cov + cov.T) / 2)
    if w[0] <= 0:
        raise NotPositiveDefinite("symplectic eigenvalues need a positive-definite matrix")
    root = (v * np.sqrt(w)) @ v.T
    spectrum = np.linalg.eigvalsh(root @ (1j * symplectic_form(2)) @ root)
    # spectrum is (-nu_plus, -nu_minus, nu_minus, nu_plus)
    nu_minus = 0.5 * (spectrum[2] - spectrum[1])
    nu_plus = 0.5 * (spectrum[3] - spectrum[0])
    return float(nu_minus), float(nu_plus)


_I_OMEGA_AB = 1j * local_symplectic_form(True, True)


def is_physical(cov) -> bool:
    """Uncertainty relation ``Gamma + i diag(Omega_A, Omega_B) >= 0``."""
    return float(np.linalg.eigvalsh(np.asarray(cov, dtype=float) + _I_OMEGA_AB)[0]) >= -PSD_TOL


# ---------------------------------------------------------------------------
# Measurement conditioning and energy
# ---------------------------------------------------------------------------


def _measured_blocks(state: TwoModeState, mode: Mode):
    """(kept cov, measured cov, cross-correlation kept x measured, kept mean, measured mean)."""
    if mode is Mode.B:
        return state.cov_a, state.cov_b, state.correlation, state.mean[:2], state.mean[2:]
    return state.cov_b, state.cov_a, state.correlation.T, state.mean[2:], state.mean[:2]


def _conditioning_inverse(cov_meas: np.ndarray, meas: MeasurementSpec) -> np.ndarray:
    """``(Gamma_meas + Gamma_m)^-1`` including the homodyne limits."""
    q = meas.measured_quadrature
    if q is not None:
        # projector form: only the measured quadrature carries information
        var = cov_meas[q, q]
        if var <= 0:
            raise SingularConditioning(f"measured quadrature has non-positive variance {var}")
        inv = np.zeros((2, 2))
        inv[q, q] = 1.0 / var
        return inv
    t = cov_meas + np.diag([meas.lam, 1.0 / meas.lam])
    det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
    if abs(det) <= 1e-14 * max(1.0, np.abs(t).max() ** 2):
        raise SingularConditioning("Gamma_B + Gamma_m is singular")
    return np.array([[t[1, 1], -t[0, 1]], [-t[1, 0], t[0, 0]]]) / det


def conditional_gain(state: TwoModeState, meas: MeasurementSpec) -> np.ndarray:
    """Matrix ``K = C (Gamma_B + Gamma_m)^-1`` mapping outcome offsets to mean shifts."""
    _, cov_meas, cross, _, _ = _measured_blocks(state, meas.mode)
    return cross @ _conditioning_inverse(cov_meas, meas)


def conditional_update(
    state: TwoModeState, meas: MeasurementSpec, outcome: Sequence[float]
) -> SingleModeState:
    """State of the unmeasured mode after ``meas`` returns ``outcome``.

    The mean becomes ``r_A + K (r_m - r_B)`` and the covariance
    ``Gamma_A - K C^T``; the covariance does not depend on the outcome.  For
    x-homodyne the p-component of ``outcome`` is ignored and vice versa.

    Raises:
        SingularConditioning: if ``Gamma_B + Gamma_m`` cannot be inverted.
    """
    cov_keep, cov_meas, cross, mean_keep, mean_meas = _measured_blocks(state, meas.mode)
    inv = _conditioning_inverse(cov_meas, meas)
    gain = cross @ inv
    offset = np.asarray(outcome, dtype=float).reshape(-1) - mean_meas
    if offset.shape != (2,):
        raise ValueError("outcome must have two components")
    q = meas.measured_quadrature
    if q is not None:
        offset = np.where(np.arange(2) == q, offset, 0.0)
    mean = mean_keep + gain @ offset
    cov = cov_keep - cross @ inv @ cross.T
    return SingleModeState(mean, (cov + cov.T) / 2)


def local_energy(state: SingleModeState) -> float:
    """Mean energy ``<a^dag a> + 1/2 = (|r|^2 + Tr(Gamma)/2) / 2`` of a single mode."""
    return 0.5 * (float(state.mean @ state.mean) + 0.5 * float(np.trace(state.cov)))
