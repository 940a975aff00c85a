import math

import numpy as np
import pytest

from gaussian_work.core import MeasurementSpec, StandardFormParams, conditional_update, standard_form_state
from gaussian_work.errors import InsufficientSamples, NotPhysical
from gaussian_work.montecarlo import (
    CHUNK_SIZE,
    estimate_conditional,
    mc_work,
    measurement_outcomes,
    sample_state,
)
from gaussian_work.protocols import work_closed

from strategies import random_physical_params

SEED = 12345
EPR = StandardFormParams(5, 5, 3, -3)


def var_stderr(var, n):
    return var * math.sqrt(2.0 / (n - 1))


def test_vacuum_variances():
    n = 10**6
    batch = sample_state(standard_form_state(StandardFormParams(1, 1, 0, 0)), n, SEED)
    var = batch.points.var(axis=0, ddof=1)
    assert np.all(np.abs(var - 0.5) < 3 * var_stderr(0.5, n))


def test_correlation_in_half_gamma_units():
    n = 10**6
    batch = sample_state(standard_form_state(EPR), n, SEED)
    cov = np.cov(batch.points, rowvar=False)
    stderr = math.sqrt((2.5 * 2.5 + 1.5**2) / n)
    assert abs(cov[0, 2] - 1.5) < 3 * stderr
    assert abs(cov[1, 3] + 1.5) < 3 * stderr


def test_sampling_is_deterministic():
    state = standard_form_state(EPR)
    one = sample_state(state, 1000, 7)
    two = sample_state(state, 1000, 7)
    assert np.array_equal(one.points, two.points)
    assert np.array_equal(one.outcome_noise, two.outcome_noise)
    assert not np.array_equal(one.points, sample_state(state, 1000, 8).points)


def test_sampling_independent_of_worker_count():
    state = standard_form_state(EPR)
    n = 3 * CHUNK_SIZE + 17
    serial = sample_state(state, n, 3)
    parallel = sample_state(state, n, 3, workers=4)
    assert np.array_equal(serial.points, parallel.points)
    # a prefix of a longer batch is the shorter batch
    assert np.array_equal(sample_state(state, 100, 3).points, serial.points[:100])


def test_sample_state_errors():
    with pytest.raises(NotPhysical):
        sample_state(standard_form_state(StandardFormParams(1, 1, 0.5, -0.5)), 10, 0)
    with pytest.raises(ValueError):
        sample_state(standard_form_state(EPR), 0, 0)


def test_x_homodyne_slope():
    batch = sample_state(standard_form_state(EPR), 10**6, SEED)
    est = estimate_conditional(batch, MeasurementSpec.homodyne_x())
    assert abs(est.slope[0, 0] - 0.6) < 3 * est.slope_stderr[0, 0]
    assert abs(est.slope[1, 0]) < 3 * est.slope_stderr[1, 0]
    assert np.isnan(est.slope[:, 1]).all()


def test_heterodyne_slope():
    batch = sample_state(standard_form_state(EPR), 10**6, SEED)
    est = estimate_conditional(batch, MeasurementSpec.heterodyne())
    expected = np.diag([0.5, -0.5])
    assert np.all(np.abs(est.slope - expected) < 3 * est.slope_stderr)


def test_product_state_slope_vanishes():
    batch = sample_state(standard_form_state(StandardFormParams(3, 2, 0, 0)), 10**5, SEED)
    est = estimate_conditional(batch, MeasurementSpec.heterodyne())
    assert np.all(np.abs(est.slope) < 4 * est.slope_stderr)


def test_stderr_shrinks_with_sample_size():
    state = standard_form_state(EPR)
    small = estimate_conditional(sample_state(state, 10**4, 1), MeasurementSpec.heterodyne())
    large = estimate_conditional(sample_state(state, 10**6, 1), MeasurementSpec.heterodyne())
    assert np.all(small.slope_stderr > 0) and np.all(small.cov_stderr > 0)
    ratio = small.slope_stderr / large.slope_stderr
    assert np.all(np.abs(ratio - 10.0) < 0.5)


def test_insufficient_samples():
    batch = sample_state(standard_form_state(EPR), 99, 0)
    with pytest.raises(InsufficientSamples):
        estimate_conditional(batch, MeasurementSpec.heterodyne())


def test_conditional_cov_on_random_states():
    rng = np.random.default_rng(19)
    specs = [MeasurementSpec.homodyne_x(), MeasurementSpec.homodyne_p(), MeasurementSpec.heterodyne()]
    for i, p in enumerate(random_physical_params(rng, 20)):
        state = standard_form_state(StandardFormParams(*p))
        meas = specs[i % 3]
        est = estimate_conditional(sample_state(state, 10**6, 1000 + i), meas)
        expected = conditional_update(state, meas, (0.0, 0.0)).cov / 2
        assert np.all(np.abs(est.conditional_cov - expected) < 5 * est.cov_stderr)


def test_outcome_marginals():
    params = StandardFormParams(4.0, 3.0, -2.0, 1.5)
    n = 10**6
    batch = sample_state(standard_form_state(params), n, SEED)
    hom = measurement_outcomes(batch, MeasurementSpec.homodyne_x())
    assert np.isnan(hom[:, 1]).all()
    assert abs(hom[:, 0].var(ddof=1) - 1.5) < 3 * var_stderr(1.5, n)
    het = measurement_outcomes(batch, MeasurementSpec.heterodyne())
    cov = np.cov(het, rowvar=False)
    expected = (3.0 * np.eye(2) + np.eye(2)) / 2
    assert np.all(np.abs(np.diag(cov) - 2.0) < 3 * var_stderr(2.0, n))
    assert abs(cov[0, 1] - expected[0, 1]) < 3 * math.sqrt(4.0 / n)


def test_general_lambda_outcome_noise():
    params = StandardFormParams(2.0, 2.0, 1.0, -1.0)
    n = 10**6
    batch = sample_state(standard_form_state(params), n, SEED)
    out = measurement_outcomes(batch, MeasurementSpec("B", 0.25))
    var = out.var(axis=0, ddof=1)
    expected = np.array([2.0 + 0.25, 2.0 + 4.0]) / 2
    assert np.all(np.abs(var - expected) < 3 * var_stderr(expected, n))


@pytest.mark.parametrize("kind, expected", [("hom", 0.5), ("het", 0.75), ("homx", 0.5), ("homp", 0.5)])
def test_mc_work_examples(kind, expected):
    mean, stderr = mc_work(EPR, kind, 10**5, SEED)
    assert abs(mean - expected) <= 4 * stderr + 1e-12
    assert stderr < 1e-12


def test_mc_work_uncorrelated_is_zero():
    for kind in ("hom", "het"):
        assert mc_work(StandardFormParams(3, 2, 0, 0), kind, 1000, SEED) == (0.0, 0.0)


def test_mc_work_random_states_match_closed_forms():
    rng = np.random.default_rng(20)
    for p in random_physical_params(rng, 30):
        for kind in ("hom", "het"):
            mean, stderr = mc_work(StandardFormParams(*p), kind, 2000, 5)
            assert abs(mean - work_closed(kind, *p)) <= 4 * stderr + 1e-12


def test_mc_work_reproducible():
    params = StandardFormParams(6.0, 2.5, -2.0, 1.0)
    assert mc_work(params, "het", 5000, 9) == mc_work(params, "het", 5000, 9)
    assert mc_work(params, "hom", 5000, 9) == mc_work(params, "hom", 5000, 9, workers=3)


def test_mc_work_rejects_nonphysical():
    with pytest.raises(NotPhysical):
        mc_work(StandardFormParams(1, 1, 0.5, -0.5), "het", 1000, 0)
