"""Physicality, separability and Gaussian steerability of two-mode states.

All criteria are matrix inequalities evaluated through the smallest eigenvalue
of a Hermitian 4x4 matrix (see :func:`gaussian_work.core.lmi_margin`).  The
closed-form boundary curves work in the quadrant ``c1 <= 0, c2 >= 0``; the
other quadrants follow from ``c1 <-> c2`` and ``(c1, c2) -> (-c1, -c2)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .core import (
    PSD_TOL,
    StandardFormParams,
    lmi_margin,
    local_symplectic_form,
    partial_transpose,
    standard_form_cov,
)
from .errors import DomainError, NotPhysical

OMEGA_AB = local_symplectic_form(True, True)
OMEGA_A = local_symplectic_form(True, False)
OMEGA_B = local_symplectic_form(False, True)


@dataclass(frozen=True)
class ClassRecord:
    physical: bool
    separable: bool
    steerable_b_to_a: bool
    steerable_a_to_b: bool

    @property
    def label(self) -> str:
        """Coarse class name: nonphysical, separable, entangled or steerable."""
        if not self.physical:
            return "nonphysical"
        if self.separable:
            return "separable"
        if self.steerable_b_to_a or self.steerable_a_to_b:
            return "steerable"
        return "entangled"

    def to_dict(self) -> dict:
        return asdict(self)


class BoundaryKind(str, Enum):
    PHYSICALITY = "phys"
    SEPARABILITY = "sep"
    NONSTEERABILITY_B_TO_A = "steer"


# ---------------------------------------------------------------------------
# Raw margins (vectorised, no validation)
# ---------------------------------------------------------------------------


def physical_margin(cov):
    return lmi_margin(cov, OMEGA_AB)


def ppt_margin(cov):
    return lmi_margin(partial_transpose(cov), OMEGA_AB)


def steer_b_to_a_margin(cov):
    """Nonsteerability margin from Bob to Alice; negative means steerable."""
    return lmi_margin(cov, OMEGA_A)


def steer_a_to_b_margin(cov):
    return lmi_margin(cov, OMEGA_B)


# ---------------------------------------------------------------------------
# Single-matrix criteria
# ---------------------------------------------------------------------------


def _require_physical(cov) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance, got {cov.shape}")
    if physical_margin(cov) < -PSD_TOL:
        raise NotPhysical("covariance matrix violates the uncertainty relation")
    return cov


def is_separable(cov) -> bool:
    """PPT criterion, exact for two-mode Gaussian states.

    Raises:
        NotPhysical: if ``cov`` is not a valid quantum covariance.
    """
    return ppt_margin(_require_physical(cov)) >= -PSD_TOL


def is_steerable_b_to_a(cov) -> bool:
    """True when ``Gamma + i diag(Omega_A, 0) >= 0`` is violated."""
    return steer_b_to_a_margin(_require_physical(cov)) < -PSD_TOL


def is_steerable_a_to_b(cov) -> bool:
    """True when ``Gamma + i diag(0, Omega_B) >= 0`` is violated."""
    return steer_a_to_b_margin(_require_physical(cov)) < -PSD_TOL


def classify(params: StandardFormParams) -> ClassRecord:
    """Classify a standard-form state; nonphysical input gives all-false flags."""
    flags = classify_many(*params.as_tuple())
    return ClassRecord(*(bool(flags[k]) for k in _FLAG_NAMES))


_FLAG_NAMES = ("physical", "separable", "steerable_b_to_a", "steerable_a_to_b")


def classify_many(a, b, c1, c2) -> dict[str, np.ndarray]:
    """Vectorised :func:`classify` over broadcastable parameter arrays.

    Returns a dict of boolean arrays keyed by the :class:`ClassRecord` field
    names.  Flags other than ``physical`` are forced to False wherever the
    state is nonphysical.
    """
    cov = standard_form_cov(a, b, c1, c2)
    physical = physical_margin(cov) >= -PSD_TOL
    separable = (ppt_margin(cov) >= -PSD_TOL) & physical
    steer_ba = (steer_b_to_a_margin(cov) < -PSD_TOL) & physical
    steer_ab = (steer_a_to_b_margin(cov) < -PSD_TOL) & physical
    return dict(
        physical=np.asarray(physical),
        separable=np.asarray(separable),
        steerable_b_to_a=np.asarray(steer_ba),
        steerable_a_to_b=np.asarray(steer_ab),
    )


# ---------------------------------------------------------------------------
# Closed-form boundary curves in the c1 <= 0, c2 >= 0 quadrant
# ---------------------------------------------------------------------------


def _check_quadrant(a, b, c1):
    a, b, c1 = (np.asarray(v, dtype=float) for v in (a, b, c1))
    if np.any(c1 > 0):
        raise DomainError("closed-form boundaries take c1 <= 0")
    k = a * b - c1 * c1
    if np.any(k <= 0):
        raise DomainError("boundary requires c1**2 < a*b")
    return a, b, c1, k


def _maybe_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def boundary_c2_separable(a, b, c1):
    """Largest ``c2`` for which ``(a, b, c1, c2)`` is separable.

    With ``k = a*b - c1**2`` the PPT condition saturates at

    ``c2 = c1/k + sqrt(a*b + a*b/k**2 - (a**2 + b**2)/k)``.

    Raises:
        DomainError: if ``c1 > 0`` or ``c1**2 >= a*b``.
    """
    a, b, c1, k = _check_quadrant(a, b, c1)
    radicand = a * b + a * b / k**2 - (a * a + b * b) / k
    if np.any(radicand < 0):
        raise DomainError("separability boundary undefined here")
    return _maybe_scalar(c1 / k + np.sqrt(radicand))


def boundary_c2_nonsteer(a, b, c1):
    """Largest ``c2`` for which Bob cannot steer Alice: ``sqrt(b (a - b/k))``.

    Raises:
        DomainError: if ``c1 > 0``, ``c1**2 >= a*b``, or the radicand is not
            positive.  In the last case no nonsteerable state has this ``c1``:
            every physical state there is steerable from Bob to Alice.
    """
    a, b, c1, k = _check_quadrant(a, b, c1)
    radicand = b * (a - b / k)
    if np.any(radicand <= 0):
        raise DomainError("no nonsteerable states at this c1 (radicand <= 0)")
    return _maybe_scalar(np.sqrt(radicand))


def nonsteer_radicand(a, b, c1):
    """``b (a - b / (a b - c1**2))``; the squared nonsteerability boundary."""
    return b * (a - b / (a * b - np.square(c1)))


def physical_vertex_c2(a, b, c1):
    """``c2 >= 0`` maximising the uncertainty determinant at fixed ``c1 <= 0``.

    If any ``c2 >= 0`` is physical at this ``c1`` then this one is, so it
    serves as the lower bracket for :func:`boundary_c2_physical`.
    """
    k = a * b - np.square(c1)
    return np.maximum(-np.asarray(c1, dtype=float) / k, 0.0)


def boundary_c2_physical_many(a, b, c1, tol: float = 1e-13):
    """Vectorised bisection for the largest physical ``c2``; NaN where none exists."""
    a, b, c1, k = _check_quadrant(a, b, c1)
    a, b, c1 = np.broadcast_arrays(a, b, c1)
    shape = a.shape
    a, b, c1 = a.ravel(), b.ravel(), c1.ravel()
    lo = np.asarray(physical_vertex_c2(a, b, c1), dtype=float)
    hi = np.sqrt(a * b)
    ok = np.atleast_1d(physical_margin(standard_form_cov(a, b, c1, lo)) >= -PSD_TOL)
    out = np.full(a.shape, np.nan)
    if ok.any():
        a, b, c1, lo, hi = a[ok], b[ok], c1[ok], lo[ok], hi[ok]
        # the physical set at fixed c1 is an interval, so bisection between a
        # physical point and the singular edge c2 = sqrt(ab) locates its top
        n_iter = int(math.ceil(math.log2(max(hi.max(), 1.0) / tol))) + 1
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            good = physical_margin(standard_form_cov(a, b, c1, mid)) >= -PSD_TOL
            lo = np.where(good, mid, lo)
            hi = np.where(good, hi, mid)
        out[ok] = lo
    return out.reshape(shape)


def boundary_c2_physical(a: float, b: float, c1: float) -> float:
    """Largest ``c2 >= 0`` with ``(a, b, c1, c2)`` physical, by bisection on the uncertainty relation.

    Raises:
        DomainError: if ``c1 > 0``, ``c1**2 >= a*b`` or no ``c2 >= 0`` is physical.
    """
    val = float(boundary_c2_physical_many(a, b, c1))
    if math.isnan(val):
        raise DomainError(f"no physical c2 >= 0 at a={a}, b={b}, c1={c1}")
    return val


BOUNDARY_FUNCTIONS = {
    BoundaryKind.SEPARABILITY: boundary_c2_separable,
    BoundaryKind.NONSTEERABILITY_B_TO_A: boundary_c2_nonsteer,
    BoundaryKind.PHYSICALITY: boundary_c2_physical,
}
