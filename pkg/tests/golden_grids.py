"""Golden 41x41 sweep grids and their spot validators.

The four grids cover the symmetric (a, c) plane and the second quadrant of
(c1, c2) at (a, b) = (5, 5), (5, 2) and (2, 5).  They are regenerated with
``UPDATE_GOLDEN=1 pytest tests/test_golden.py`` and otherwise compared byte
for byte.
"""

import csv
import io
import math
from pathlib import Path

import numpy as np

from gaussian_work.classification import boundary_c2_nonsteer, boundary_c2_separable, nonsteer_radicand
from gaussian_work.sweep import format_rows_csv, red_dot, sweep_quadrant, sweep_symmetric

GOLDEN_DIR = Path(__file__).parent / "golden"
GRID = 41

GRIDS = {
    "symmetric_a1-10_c0-10": ("symmetric", dict(a_range=(1.0, 10.0), c_range=(0.0, 10.0))),
    "quadrant_a5_b5": ("quadrant", dict(a=5.0, b=5.0, c1_range=(-4.8, 0.0), c2_range=(0.0, 4.8))),
    "quadrant_a5_b2": ("quadrant", dict(a=5.0, b=2.0, c1_range=(-3.0, 0.0), c2_range=(0.0, 3.0))),
    "quadrant_a2_b5": ("quadrant", dict(a=2.0, b=5.0, c1_range=(-3.0, 0.0), c2_range=(0.0, 3.0))),
}

# rows closer than this to a closed-form boundary are not used for flag checks
BOUNDARY_GAP = 1e-9


def path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.csv"


def render(name: str) -> str:
    mode, kwargs = GRIDS[name]
    sweep = sweep_symmetric if mode == "symmetric" else sweep_quadrant
    return format_rows_csv(sweep(grid=GRID, **kwargs))


def load(name: str) -> dict:
    """Columns of a golden CSV as numpy arrays (NaN for empty work cells)."""
    reader = csv.DictReader(io.StringIO(path(name).read_text(encoding="utf-8")))
    rows = list(reader)
    out = {}
    for key in reader.fieldnames:
        cells = [r[key] for r in rows]
        if key in ("physical", "separable", "steer_b_to_a", "steer_a_to_b"):
            out[key] = np.array([c == "1" for c in cells])
        else:
            out[key] = np.array([float(c) if c else math.nan for c in cells])
    return out


# ---------------------------------------------------------------------------
# spot validators; each returns a list of failure messages


def check_symmetric_works(g) -> list:
    """Symmetric-slice closed forms of the two works."""
    a, c, phys = g["a"], g["c1"], g["physical"]
    errors = []
    hom = (a - np.sqrt(np.maximum(a**2 - c**2, 0.0))) / 2
    het = c**2 / (2 * a + 2)
    if np.abs(g["w_hom"][phys] - hom[phys]).max() >= 1e-12:
        errors.append("w_hom differs from (a - sqrt(a^2 - c^2))/2")
    if np.abs(g["w_het"][phys] - het[phys]).max() >= 1e-12:
        errors.append("w_het differs from c^2/(2a + 2)")
    if not (np.isnan(g["w_hom"][~phys]).all() and np.isnan(g["w_het"][~phys]).all()):
        errors.append("nonphysical rows carry works")
    return errors


def check_symmetric_thresholds(g) -> list:
    """Physical, separable and steerable masks follow c = sqrt(a^2-1), a-1, sqrt(a^2-a)."""
    a, c = g["a"], g["c1"]
    errors = []
    for flag, edge in (
        ("physical", np.sqrt(a**2 - 1)),
        ("separable", a - 1),
        ("steer_b_to_a", np.sqrt(a**2 - a)),
        ("steer_a_to_b", np.sqrt(a**2 - a)),
    ):
        inside = c <= edge if flag in ("physical", "separable") else c > edge
        if flag != "physical":
            inside &= c <= np.sqrt(a**2 - 1)
        clear = np.abs(c - edge) > BOUNDARY_GAP
        if not np.array_equal(g[flag][clear], inside[clear]):
            errors.append(f"{flag} mask does not follow its threshold")
    return errors


def check_quadrant_boundaries(g) -> list:
    """Separable and steerable masks agree with the closed-form boundary curves."""
    errors = []
    a, b = g["a"][0], g["b"][0]
    phys = g["physical"]
    for i in np.flatnonzero(phys):
        c1, c2 = g["c1"][i], g["c2"][i]
        sep = boundary_c2_separable(a, b, c1)
        if abs(c2 - sep) > BOUNDARY_GAP and g["separable"][i] != (c2 <= sep):
            errors.append(f"separable flag at c1={c1}, c2={c2}")
        if nonsteer_radicand(a, b, c1) > 0:
            ns = boundary_c2_nonsteer(a, b, c1)
            if abs(c2 - ns) > BOUNDARY_GAP and g["steer_b_to_a"][i] != (c2 > ns):
                errors.append(f"steer_b_to_a flag at c1={c1}, c2={c2}")
        elif not g["steer_b_to_a"][i]:
            errors.append(f"steer_b_to_a flag at c1={c1}, c2={c2}")
    return errors


def separable_maximum_work(g, protocol: str) -> float:
    """Largest work among separable grid cells."""
    return float(np.where(g["separable"], g[f"w_{protocol}"], -np.inf).max())


def check_red_dot(g, on_diagonal: bool) -> list:
    """The grid never beats the optimised red dot and gets within 5% of it.

    At a = b the dot sits on the diagonal c1 = -c2 inside the quadrant; for
    unequal (a, b) past the transition it sits on a quadrant edge.
    """
    a, b = g["a"][0], g["b"][0]
    errors = []
    for protocol in ("hom", "het"):
        dot = red_dot(a, b, "sep", protocol)
        w = separable_maximum_work(g, protocol)
        if not (0.95 * dot.w_star <= w <= dot.w_star + 1e-12):
            errors.append(f"{protocol} grid maximum {w} inconsistent with red dot {dot.w_star}")
        if on_diagonal and (dot.at_edge or abs(dot.c1_star + dot.c2_star) > 1e-6):
            errors.append(f"{protocol} red dot ({dot.c1_star}, {dot.c2_star}) is off the diagonal")
        if not on_diagonal and not (dot.at_edge and min(abs(dot.c1_star), abs(dot.c2_star)) == 0):
            errors.append(f"{protocol} red dot ({dot.c1_star}, {dot.c2_star}) is not on an edge")
    return errors


def check_steering_presence(g, expected: bool) -> list:
    found = bool(g["steer_b_to_a"].any())
    return [] if found == expected else [f"steer_b_to_a present={found}, expected {expected}"]


VALIDATORS = {
    "symmetric_a1-10_c0-10": [check_symmetric_works, check_symmetric_thresholds],
    "quadrant_a5_b5": [check_quadrant_boundaries, lambda g: check_red_dot(g, True), lambda g: check_steering_presence(g, True)],
    "quadrant_a5_b2": [check_quadrant_boundaries, lambda g: check_red_dot(g, False), lambda g: check_steering_presence(g, False)],
    "quadrant_a2_b5": [check_quadrant_boundaries, lambda g: check_red_dot(g, False), lambda g: check_steering_presence(g, True)],
}


def validate(name: str) -> list:
    g = load(name)
    return [msg for check in VALIDATORS[name] for msg in check(g)]
