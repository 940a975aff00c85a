"""Random physical standard-form parameters for property tests.

(a, b) are uniform in [1, 10].  c1 is uniform in the second quadrant and c2
uniform between the vertex of the physical interval and its top, both ends
located by the library's bisection.  Random sign flips and x/p swaps then
spread the points over all four quadrants without leaving the physical set.
"""

import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from gaussian_work.classification import boundary_c2_physical_many, physical_vertex_c2
from gaussian_work.core import StandardFormParams, is_physical, standard_form_cov


def _fill(a, b, u1, u2):
    c1 = -u1 * np.sqrt(a * b) * 0.999
    top = boundary_c2_physical_many(a, b, c1)
    lo = physical_vertex_c2(a, b, c1)
    c2 = lo + u2 * (top - lo)
    return c1, c2


def random_physical_params(rng: np.random.Generator, n: int, quadrants: bool = True) -> np.ndarray:
    """Array of shape (n, 4) with physical (a, b, c1, c2) rows."""
    out = np.empty((0, 4))
    while len(out) < n:
        m = 2 * (n - len(out)) + 16
        a = rng.uniform(1, 10, m)
        b = rng.uniform(1, 10, m)
        c1, c2 = _fill(a, b, rng.uniform(0, 1, m), rng.uniform(0, 1, m))
        rows = np.column_stack([a, b, c1, c2])
        out = np.vstack([out, rows[~np.isnan(c2)]])
    out = out[:n]
    if quadrants:
        flip = rng.integers(0, 2, n).astype(bool)
        out[flip, 2:] *= -1
        swap = rng.integers(0, 2, n).astype(bool)
        out[swap, 2:] = out[swap][:, [3, 2]]
    return out


@st.composite
def physical_params(draw, quadrant_only: bool = False):
    a = draw(st.floats(1.0, 10.0))
    b = draw(st.floats(1.0, 10.0))
    u1 = draw(st.floats(0.0, 1.0))
    u2 = draw(st.floats(0.0, 1.0))
    c1, c2 = (float(v) for v in _fill(a, b, u1, u2))
    if np.isnan(c2):
        c1, c2 = 0.0, 0.0
    if not quadrant_only and draw(st.booleans()):
        c1, c2 = -c2, -c1
    # u2 = 1 sits on the physical edge, where rounding can tip either way
    assume(is_physical(standard_form_cov(a, b, c1, c2)))
    return StandardFormParams(a, b, c1, c2)
