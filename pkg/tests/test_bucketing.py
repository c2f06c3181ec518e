import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from perfmine.bucketing import (
    BucketGrid,
    ConfidenceMapper,
    HitGrid,
    MissingBucketError,
    bucket_confidence,
    bucket_estimate,
    confidence_map,
    estimate_priors,
    hit,
)
from perfmine.sampler import Grid, PerformanceDatabase, PointRecord
from perfmine.simgen import PointConfig, closed_form_bep, synthetic_surface
from perfmine.stats import BerSample, PointEstimate, confidence_below, point_estimate


def test_priors():
    assert estimate_priors([2, 2]).tolist() == [0.5, 0.5]
    assert estimate_priors([6, 3, 1]) == pytest.approx([0.6, 0.3, 0.1])
    assert estimate_priors([5]).tolist() == [1.0]
    with pytest.raises(MissingBucketError):
        estimate_priors([])


def test_single_point_bucket():
    e = bucket_estimate([PointEstimate(2e-3, 1e-8, 5)])
    assert (e.mean, e.variance, e.n_total) == (2e-3, 1e-8, 5)


def test_two_equal_counts():
    e = bucket_estimate([PointEstimate(1.0, 4.0, 3), PointEstimate(3.0, 8.0, 3)])
    assert e.mean == 2.0 and e.variance == 3.0


def test_grand_mean_identity():
    rng = np.random.default_rng(0)
    groups = [rng.normal(m, s, n) for m, s, n in [(1.0, 0.1, 6), (2.0, 1.0, 3), (5.0, 0.01, 1)]]
    # the single-observation member needs n >= 2 for a variance; give it two
    groups[2] = np.array([5.0, 5.02])
    ests = [point_estimate(list(g)) for g in groups]
    e = bucket_estimate(ests)
    allv = np.concatenate(groups)
    assert e.mean == pytest.approx(allv.mean(), rel=1e-12)
    # the mixture variance is not the pooled sample variance
    assert not math.isclose(e.variance, allv.var(ddof=1), rel_tol=1e-3)


def test_misaligned_priors():
    with pytest.raises(ValueError):
        bucket_estimate([PointEstimate(1, 1, 2)], priors=[0.5, 0.5])


def test_bucket_confidence():
    z = np.array([-1.5, -1.0, -0.5, 0.5, 1.0, 1.5])
    vals = 5e-4 + 8.87e-4 * z / z.std(ddof=1)
    e = bucket_estimate([point_estimate(list(vals))])
    assert hit(bucket_confidence(e, 1e-3)) == 887
    assert bucket_confidence(bucket_estimate([PointEstimate(1e-3, 1e-8, 4)]), 1e-3) == 0.5
    assert bucket_confidence(bucket_estimate([PointEstimate(1e-4, 0.0, 2)]), 1e-3) == 1.0


def test_hit_rounding():
    assert hit(0.887) == 887
    assert hit(1.0) == 1000
    assert hit(0.99949) == 999
    assert hit(0.9995) == 1000
    with pytest.raises(ValueError):
        hit(1.2)


@given(st.floats(0, 1))
def test_hit_discretisation_error(p):
    assert abs(hit(p) / 1000 - p) <= 1 / 2000 + 1e-15


def test_zero_noise_map_is_indicator():
    grid = Grid.square(3, 20)
    db = synthetic_surface(grid, 0.0)
    hg = confidence_map(db, 1e-3)
    truth = np.array([[closed_form_bep(PointConfig(x, y)) < 1e-3 for y in grid.ys] for x in grid.xs])
    assert np.array_equal(hg.probabilities, truth.astype(float))
    assert np.array_equal(hg.hits, 1000 * truth)


def test_all_missing():
    grid = Grid.square(0, 2)
    db = PerformanceDatabase(grid)
    db.add(PointRecord(PointConfig(0, 0), [BerSample(5, 1000)]))
    hg = confidence_map(db, 1e-3)
    assert hg.mask.all()
    assert np.all(hg.hits == 0)


def test_one_point_buckets_match_point_map():
    db = synthetic_surface(Grid.square(0, 8), 0.3, seed=2, n_samples=4)
    hg = confidence_map(db, 1e-2)
    for rec in db:
        i, j = db.grid.index(rec.point)
        assert hg.probabilities[i, j] == confidence_below(point_estimate(rec.samples), 1e-2)


def test_multi_point_buckets():
    grid = Grid.square(0, 3)
    db = synthetic_surface(grid, 0.2, seed=1, n_samples=3)
    buckets = BucketGrid((0, 1), (0, 1), key=lambda p: (int(p.s1_db // 2), int(p.s2_db // 2)))
    hg = confidence_map(db, 5e-2, buckets)
    assert hg.shape == (2, 2)
    members = [r for r in db if r.point.s1_db < 2 and r.point.s2_db < 2]
    e = bucket_estimate([point_estimate(r.samples) for r in members])
    assert hg.probabilities[0, 0] == pytest.approx(bucket_confidence(e, 5e-2), abs=1e-15)


def test_mapper_estimator():
    db = synthetic_surface(Grid.square(0, 5), 0.0)
    m = ConfidenceMapper(threshold=1e-2)
    assert m.get_params()["threshold"] == 1e-2
    hg = m.fit_transform(db)
    assert isinstance(hg, HitGrid) and hg.shape == (6, 6)
    with pytest.raises(TypeError):
        ConfidenceMapper().fit(np.zeros((2, 2)))


def test_hitgrid_validation():
    with pytest.raises(ValueError):
        HitGrid.from_hits([[1001]])
    g = HitGrid.from_hits([[5, 7]], mask=[[False, True]])
    assert g.hits.tolist() == [[5, 0]]
    assert g.transpose().shape == (2, 1)
