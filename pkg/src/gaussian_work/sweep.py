"""Parameter sweeps, boundary maxima and transition finders.

Grid sweeps evaluate the closed-form works on vectorised parameter grids;
root finders use a fixed-resolution scan followed by bisection or
golden-section refinement so results are reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from .classification import (
    BoundaryKind,
    boundary_c2_nonsteer,
    boundary_c2_physical_many,
    boundary_c2_separable,
    classify_many,
    nonsteer_radicand,
    physical_margin,
    physical_vertex_c2,
    steer_b_to_a_margin,
)
from .core import PSD_TOL, StandardFormParams, standard_form_cov
from .errors import BadRange, EmptyBoundary, GaussianWorkError, NoTransition
from .protocols import ProtocolKind, run_protocol, work_closed, work_het_closed, work_hom_closed

SCAN_POINTS = 2001
GOLDEN_TOL = 1e-7
EDGE_TOL = 1e-4
TRANSITION_TOL = 1e-4
# lower end of b (or a) brackets; b = 1 exactly makes every boundary a point
BRACKET_FLOOR = 1.0 + 1e-9

CSV_FIELDS = (
    "a", "b", "c1", "c2",
    "physical", "separable", "steer_b_to_a", "steer_a_to_b",
    "w_hom", "w_het",
)  # fmt: skip


class VerificationFailed(GaussianWorkError, ArithmeticError):
    """A trajectory cross-check disagreed with the closed-form work."""


@dataclass(frozen=True)
class SweepRow:
    a: float
    b: float
    c1: float
    c2: float
    physical: bool
    separable: bool
    steer_b_to_a: bool
    steer_a_to_b: bool
    w_hom: float
    w_het: float


@dataclass(frozen=True)
class RedDot:
    """Point of maximum work along a class boundary in the ``c1 <= 0 <= c2`` quadrant."""

    boundary: BoundaryKind
    c1_star: float
    c2_star: float
    w_star: float
    at_edge: bool


# ---------------------------------------------------------------------------
# Grid sweeps
# ---------------------------------------------------------------------------


def _grid_counts(grid) -> tuple[int, int]:
    if isinstance(grid, int):
        grid = (grid, grid)
    n, m = (int(g) for g in grid)
    if n < 2 or m < 2:
        raise BadRange("grid needs at least 2 points per axis")
    return n, m


def _check_range(name: str, lo: float, hi: float) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise BadRange(f"{name} range [{lo}, {hi}] is empty or not finite")


def evaluate_rows(a, b, c1, c2, workers: int = 1) -> list[SweepRow]:
    """Classification flags and closed-form works for flat parameter arrays.

    Rows are evaluated in contiguous index blocks (optionally on worker
    threads) and returned in index order.
    """
    a, b, c1, c2 = (np.ravel(v).astype(float) for v in np.broadcast_arrays(a, b, c1, c2))
    n = a.size
    blocks = [(s, min(s + 4096, n)) for s in range(0, n, 4096)]

    def run(block):
        s, e = block
        flags = classify_many(a[s:e], b[s:e], c1[s:e], c2[s:e])
        phys = flags["physical"]
        with np.errstate(invalid="ignore"):
            w_hom = np.where(phys, work_hom_closed(a[s:e], b[s:e], c1[s:e], c2[s:e]), np.nan)
            w_het = np.where(phys, work_het_closed(a[s:e], b[s:e], c1[s:e], c2[s:e]), np.nan)
        return [
            SweepRow(
                float(a[i]), float(b[i]), float(c1[i]), float(c2[i]),
                bool(phys[i - s]), bool(flags["separable"][i - s]),
                bool(flags["steerable_b_to_a"][i - s]), bool(flags["steerable_a_to_b"][i - s]),
                float(w_hom[i - s]), float(w_het[i - s]),
            )  # fmt: skip
            for i in range(s, e)
        ]

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(bl) for bl in blocks]
    return [row for part in parts for row in part]


def sweep_symmetric(
    a_range: Sequence[float], c_range: Sequence[float], grid=41, workers: int = 1
) -> list[SweepRow]:
    """Sweep the ``a = b``, ``c1 = -c2 = c`` family; rows ordered by ``a`` then ``c``."""
    n_a, n_c = _grid_counts(grid)
    _check_range("a", *a_range)
    _check_range("c", *c_range)
    if a_range[0] < 1:
        raise BadRange("a must be at least 1")
    a, c = np.meshgrid(np.linspace(*a_range, n_a), np.linspace(*c_range, n_c), indexing="ij")
    # 0.0 - c keeps c2 = +0.0 on the c = 0 column
    return evaluate_rows(a, a, c, 0.0 - c, workers=workers)


def sweep_quadrant(
    a: float,
    b: float,
    c1_range: Sequence[float],
    c2_range: Sequence[float],
    grid=41,
    workers: int = 1,
) -> list[SweepRow]:
    """Sweep ``(c1, c2)`` at fixed ``(a, b)``; rows ordered by ``c1`` then ``c2``.

    Raises:
        BadRange: unless ``c1_range`` lies in ``(-sqrt(ab), 0]`` and ``c2_range``
            in ``[0, sqrt(ab))``.
    """
    n1, n2 = _grid_counts(grid)
    _check_range("c1", *c1_range)
    _check_range("c2", *c2_range)
    if a < 1 or b < 1:
        raise BadRange("a and b must be at least 1")
    limit = math.sqrt(a * b)
    if not (-limit < c1_range[0] and c1_range[1] <= 0):
        raise BadRange(f"c1 range must lie in (-{limit}, 0]")
    if not (0 <= c2_range[0] and c2_range[1] < limit):
        raise BadRange(f"c2 range must lie in [0, {limit})")
    c1, c2 = np.meshgrid(np.linspace(*c1_range, n1), np.linspace(*c2_range, n2), indexing="ij")
    return evaluate_rows(a, b, c1, c2, workers=workers)


def verify_rows(
    rows: Sequence[SweepRow],
    fraction: float = 0.01,
    seed: int = 0,
    tol: float = 1e-12,
    protocol: str = "both",
) -> int:
    """Re-derive the works of a random subsample of physical rows from trajectories.

    ``protocol`` picks the work column(s) to check: ``"hom"``, ``"het"`` or
    ``"both"``.  Returns the number of rows checked.

    Raises:
        VerificationFailed: if any trajectory work differs from the row by more
            than ``tol``.
    """
    physical = [i for i, r in enumerate(rows) if r.physical]
    if not physical:
        return 0
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(1,))))
    k = max(1, int(round(fraction * len(physical))))
    picked = sorted(rng.choice(physical, size=min(k, len(physical)), replace=False))
    for i in picked:
        row = rows[i]
        params = StandardFormParams(row.a, row.b, row.c1, row.c2)
        outcome = rng.normal(0.0, math.sqrt(row.b), size=2)
        if protocol in ("hom", "both"):
            wx = run_protocol(params, ProtocolKind.HOMODYNE_X, outcome).work
            wp = run_protocol(params, ProtocolKind.HOMODYNE_P, outcome).work
            if abs(0.5 * (wx + wp) - row.w_hom) > tol:
                raise VerificationFailed(f"homodyne trajectories disagree with row {i}: {row}")
        if protocol in ("het", "both"):
            wh = run_protocol(params, ProtocolKind.HETERODYNE, outcome).work
            if abs(wh - row.w_het) > tol:
                raise VerificationFailed(f"heterodyne trajectory disagrees with row {i}: {row}")
    return len(picked)


# ---------------------------------------------------------------------------
# Boundary curves and red dots
# ---------------------------------------------------------------------------


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _physical_c1_extent(a: float, b: float, tol: float = 1e-13) -> float:
    """Most negative ``c1`` at which some ``c2 >= 0`` is physical."""
    lo, hi = -math.sqrt(a * b) * (1 - 1e-15), 0.0

    def nonempty(c1):
        return physical_margin(standard_form_cov(a, b, c1, physical_vertex_c2(a, b, c1))) >= -PSD_TOL

    if nonempty(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if nonempty(mid):
            hi = mid
        else:
            lo = mid
    return hi


def boundary_curve(a: float, b: float, kind: BoundaryKind | str):
    """Return ``(curve, c1_min)`` for a boundary in the quadrant.

    ``curve`` maps an array of ``c1`` values in ``[c1_min, 0]`` to the
    boundary ``c2`` (NaN where the boundary point is not physical).
    """
    kind = BoundaryKind(kind)
    if kind is BoundaryKind.SEPARABILITY:
        c1_min = -boundary_c2_separable(a, b, 0.0)

        def curve(c1):
            c1 = np.asarray(c1, dtype=float)
            return np.maximum(boundary_c2_separable(a, b, np.minimum(c1, 0.0)), 0.0)

    elif kind is BoundaryKind.NONSTEERABILITY_B_TO_A:
        c1_min = -boundary_c2_nonsteer(a, b, 0.0)

        def curve(c1):
            c1 = np.asarray(c1, dtype=float)
            rad = nonsteer_radicand(a, b, c1)
            c2 = np.sqrt(np.maximum(rad, 0.0))
            ok = physical_margin(standard_form_cov(a, b, c1, c2)) >= -PSD_TOL
            return np.where(ok, c2, np.nan)

    else:
        c1_min = _physical_c1_extent(a, b)

        def curve(c1):
            return boundary_c2_physical_many(a, b, np.minimum(np.asarray(c1, dtype=float), 0.0))

    return curve, c1_min


def red_dot(
    a: float, b: float, boundary: BoundaryKind | str, protocol: ProtocolKind | str = ProtocolKind.HETERODYNE
) -> RedDot:
    """Maximum of the protocol's work along a boundary curve.

    A 2001-point scan over ``c1`` is refined by golden-section search to
    ``|dc1| < 1e-7``.

    Raises:
        EmptyBoundary: if no physical point of the boundary lies in the quadrant.
    """
    boundary = BoundaryKind(boundary)
    protocol = ProtocolKind(protocol)
    try:
        curve, c1_min = boundary_curve(a, b, boundary)
    except GaussianWorkError as exc:
        raise EmptyBoundary(f"{boundary.value} boundary is empty at a={a}, b={b}") from exc

    def work_at(c1):
        c2 = curve(c1)
        with np.errstate(invalid="ignore"):
            w = work_closed(protocol, a, b, c1, c2)
        return np.where(np.isnan(c2), -np.inf, w)

    grid = np.linspace(c1_min, 0.0, SCAN_POINTS)
    w = work_at(grid)
    if not np.isfinite(w).any():
        raise EmptyBoundary(f"{boundary.value} boundary has no physical point at a={a}, b={b}")
    i = int(np.argmax(w))
    best_c1, best_w = float(grid[i]), float(w[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, SCAN_POINTS - 1)]
    if hi > lo:
        x, fx = golden_section_max(lambda c: float(work_at(c)), float(lo), float(hi))
        if fx > best_w:
            best_c1, best_w = x, fx
    c2 = float(curve(best_c1))
    at_edge = abs(best_c1) < EDGE_TOL or abs(c2) < EDGE_TOL
    return RedDot(boundary, best_c1, c2, best_w, at_edge)


def _bisect_flip(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Locate where ``pred`` changes value on ``[lo, hi]`` to within ``tol``."""
    p_lo, p_hi = pred(lo), pred(hi)
    if p_lo == p_hi:
        raise NoTransition(f"no change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_transition_b(a: float, protocol: ProtocolKind | str, tol: float = TRANSITION_TOL) -> float:
    """``b`` at which the separability red dot jumps to the quadrant edges, for fixed ``a``.

    Raises:
        NoTransition: if the red dot does not change position for ``b`` in ``(1, a]``.
    """
    if a <= 1:
        raise NoTransition("a must exceed 1")
    return _bisect_flip(
        lambda b: red_dot(a, b, BoundaryKind.SEPARABILITY, protocol).at_edge, BRACKET_FLOOR, a, tol
    )


def find_transition_a(b: float, protocol: ProtocolKind | str, tol: float = TRANSITION_TOL) -> float:
    """Like :func:`find_transition_b` with ``b`` fixed and ``a`` scanned over ``(1, b]``."""
    if b <= 1:
        raise NoTransition("b must exceed 1")
    return _bisect_flip(
        lambda a: red_dot(a, b, BoundaryKind.SEPARABILITY, protocol).at_edge, BRACKET_FLOOR, b, tol
    )


def steering_margin(a: float, b: float, scan_points: int = 257, stop_below: float = -math.inf) -> float:
    """Smallest Bob-to-Alice nonsteerability margin over physical quadrant states.

    Negative values (below ``-PSD_TOL``) mean a steerable state exists.  The
    most steerable state at each ``c1`` sits on the physical boundary, so the
    search runs along that curve: a scan followed by golden-section
    refinement, skipped when the scan already reaches ``stop_below``.
    """
    curve, c1_min = boundary_curve(a, b, BoundaryKind.PHYSICALITY)

    def margin(c1):
        c1 = np.asarray(c1, dtype=float)
        c2 = curve(c1)
        m = steer_b_to_a_margin(standard_form_cov(a, b, c1, np.nan_to_num(c2)))
        return np.where(np.isnan(c2), np.inf, m)

    grid = np.linspace(c1_min, 0.0, scan_points)
    m = margin(grid)
    i = int(np.argmin(m))
    if m[i] < stop_below:
        return float(m[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, scan_points - 1)]
    # the margin is quadratic near its minimum, so 1e-6 in c1 is ~1e-12 in the margin
    _, neg = golden_section_max(lambda c: -float(margin(c)), float(lo), float(hi), tol=1e-6)
    return min(float(m[i]), -neg)


def steerable_set_nonempty(a: float, b: float) -> bool:
    return steering_margin(a, b, stop_below=-1e-6) < -PSD_TOL


def find_steer_vanish_b(a: float, tol: float = TRANSITION_TOL) -> float:
    """Smallest ``b`` (at fixed ``a``) for which Bob can steer Alice."""
    if a <= 1:
        raise NoTransition("a must exceed 1")
    return _bisect_flip(lambda b: steerable_set_nonempty(a, b), BRACKET_FLOOR, a, tol)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _plain(value):
    """JSON-ready value: enums to their value, NaN to None, numpy scalars to Python."""
    if hasattr(value, "to_dict"):
        return {k: _plain(v) for k, v in value.to_dict().items()}
    if hasattr(value, "__dataclass_fields__"):
        return {f.name: _plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(value)
    if hasattr(value, "value"):
        return value.value
    return value


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else repr(float(value))
    return str(value)


def format_rows_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow(_csv_cell(getattr(row, name)) for name in CSV_FIELDS)
    return buf.getvalue()


def format_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def emit(obj, fmt: str = "csv", destination=None) -> None:
    """Write sweep rows (CSV or JSON) or a single result (JSON) to ``destination``.

    ``destination`` may be a path, an open text stream, or None / ``"-"`` for
    standard output.  CSV columns are ``CSV_FIELDS``; reals use the shortest
    round-trip representation, booleans 0/1 and nonphysical works are empty.
    """
    if fmt == "csv":
        if not isinstance(obj, (list, tuple)):
            obj = [obj]
        text = format_rows_csv(obj)
    elif fmt == "json":
        text = format_json(obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None or destination == "-":
        sys.stdout.write(text)
    elif isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        destination.write(text)
