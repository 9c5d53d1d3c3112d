import math

import numpy as np
import pytest

from accelseed import bench
from accelseed.core import Dataset


def test_exact_draw_laws_small():
    ds = Dataset(np.array([[0.0], [1.0], [3.0]]))
    first, second = bench.exact_draw_laws(ds)
    assert first.tolist() == pytest.approx([1 / 3] * 3)
    # from 0: masses (0,1,9); from 1: (1,0,4); from 2: (9,4,0)
    exp = np.array([1 / 5 + 9 / 13, 1 / 10 + 4 / 13, 9 / 10 + 4 / 5]) / 3
    np.testing.assert_allclose(second, exp)
    assert second.sum() == pytest.approx(1.0)


def test_run_seeding_reports_are_stable(blobs):
    for algo in bench.ALGOS:
        a, _ = bench.run_seeding(blobs, algo, 12, 3, dataset_tag="blobs")
        b, _ = bench.run_seeding(blobs, algo, 12, 3, dataset_tag="blobs")
        a.wall_time_ms = b.wall_time_ms = 0.0
        assert a == b
        assert a.potential > 0 and a.distance_count > 0
        assert len(a.csv_row()) == len(bench.CSV_HEADER)
    with pytest.raises(ValueError):
        bench.run_seeding(blobs, "nope", 3, 0)


def test_potential_matches_bruteforce(blobs):
    rep, _ = bench.run_seeding(blobs, "kpp", 5, 0)
    X = blobs.points
    d2 = ((X[:, None, :] - X[rep.seed_indices][None]) ** 2).sum(-1).min(axis=1)
    assert rep.potential == pytest.approx(float(d2.sum()), rel=1e-12)


def test_sweep_and_summary(blobs):
    reports = bench.sweep(blobs, [4, 16], bench.ALGOS, trials=2)
    assert len(reports) == 2 * 4 * 2
    assert {r.master_seed for r in reports} == {0, 1}
    summary = bench.summarize(reports)
    assert set(summary) == {"kpp", "kbb"}
    for rows in summary.values():
        assert [r["k"] for r in rows] == [4, 16]
        assert list(rows[0]) == bench.SUMMARY_HEADER
    kpp16 = summary["kpp"][1]
    assert kpp16["dist_avg"] / kpp16["tia_dist_avg"] >= 1.0
    assert kpp16["dist_avg"] == blobs.n * 15


def test_summary_handles_missing_partner(blobs):
    reports = bench.sweep(blobs, [4], ["kpp"], trials=1)
    row = bench.summarize(reports)["kpp"][0]
    assert math.isnan(row["tia_dist_avg"])


def test_equivalence_verdicts(blobs):
    v = bench.equivalence_check_kpp(blobs, 10, range(3))
    assert v.ok and v.checked == 3
    v = bench.equivalence_check_kbb(blobs, bench.ScalableConfig(6, 2), range(3))
    assert v.ok and v.checked == 3


def test_cdf_sampler_passes_distribution_check():
    ds = Dataset(np.array([[0.0], [1.0], [2.0], [4.0], [9.0]]), [1, 2, 1, 1, 0.5])
    v = bench.distribution_check(ds, trials=20_000, sampler="cdf")
    assert v.ok
    with pytest.raises(ValueError):
        bench.distribution_check(Dataset(np.zeros((11, 1))), trials=1)


def test_gaussian_mixture_shape_and_determinism():
    a = bench.gaussian_mixture(100, 5, 4, seed=1)
    b = bench.gaussian_mixture(100, 5, 4, seed=1)
    assert a.points.shape == (100, 5)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, bench.gaussian_mixture(100, 5, 4, seed=2).points)
