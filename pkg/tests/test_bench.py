import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aptemper.bench import (
    REPORT_COLUMNS,
    UNASSIGNED,
    ModeMap,
    RunSummary,
    acceptance_table,
    assign_mode,
    group_report,
    modemap_for,
    moment_truth,
    mode_mae,
    occupancy,
    rmse_over_runs,
    write_report,
)
from aptemper.targets import peaks20, peaks20_8d


class TestAssignMode:
    mm = ModeMap(np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]]), 0.4)

    def test_exact_center(self):
        assert assign_mode([5.0, 5.0], self.mm) == 2

    def test_outside_radius(self):
        assert assign_mode([2.5, 2.5], self.mm) == UNASSIGNED

    def test_tie_goes_to_lowest_index(self):
        mm = ModeMap(np.array([[0.0], [2.0], [4.0]]), 1.5, strict=False)
        assert assign_mode([3.0], mm) == 1
        assert assign_mode([1.0], mm) == 0

    def test_extra_coordinates_ignored(self):
        assert assign_mode([1.1, 0.1, 99.0, -7.0], self.mm) == 1

    def test_overlapping_centers_rejected(self):
        with pytest.raises(ValueError):
            ModeMap(np.array([[0.0], [0.5]]), 0.3)

    def test_canonical_map(self):
        mm = modemap_for(peaks20_8d())
        assert mm.n_modes == 20 and mm.capture_radius == pytest.approx(0.3)

    def test_vectorized_matches_scalar(self, rng):
        X = rng.uniform(-1, 6, size=(500, 2))
        labels = self.mm.predict(X)
        assert [assign_mode(x, self.mm) for x in X] == labels.tolist()


class TestMae:
    def test_uniform(self):
        assert mode_mae(np.full(20, 0.05)) == pytest.approx(0.0, abs=1e-15)

    def test_all_in_one_mode(self):
        t = np.zeros(20)
        t[7] = 1.0
        assert mode_mae(t) == pytest.approx(1.9, rel=1e-14)

    def test_sixteen_missing(self):
        t = np.zeros(20)
        t[:4] = 0.25
        direct = sum(abs(ti - 0.05) / 0.05 for ti in t) / 20
        assert mode_mae(t) == pytest.approx(direct, rel=1e-14)
        assert mode_mae(t) == pytest.approx(1.6, rel=1e-14)

    def test_renormalizes_assigned_mass(self):
        assert mode_mae(np.full(20, 0.04)) == pytest.approx(0.0, abs=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=25).filter(lambda v: sum(v) > 0),
           st.randoms(use_true_random=False))
    def test_permutation_invariant(self, occ, rnd):
        shuffled = list(occ)
        rnd.shuffle(shuffled)
        assert mode_mae(shuffled) == pytest.approx(mode_mae(occ), rel=1e-12, abs=1e-15)


class TestOccupancy:
    def test_simplex_with_unassigned(self):
        occ = occupancy(np.array([0, 0, 2, UNASSIGNED]), 3)
        np.testing.assert_allclose(occ, [0.5, 0.0, 0.25, 0.25])
        assert occ.sum() == pytest.approx(1.0)


class TestRmse:
    def test_exact(self):
        truth = np.array([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(rmse_over_runs([truth, truth, truth], truth), 0.0)

    def test_single_run_offset(self):
        truth = np.array([1.0, 2.0])
        np.testing.assert_allclose(rmse_over_runs([[1.5, 1.25]], truth), [0.5, 0.75])

    def test_two_pass_oracle(self):
        rng = np.random.default_rng(42)
        est = rng.normal(size=(37, 4)) * [1, 2, 3, 4] + 10
        truth = np.array([10.1, 9.8, 10.0, 10.5])
        expected = []
        for k in range(4):
            # first pass: deviations; second pass: mean of their squares
            dev = [est[r, k] - truth[k] for r in range(37)]
            acc = 0.0
            for v in dev:
                acc += v * v
            expected.append(math.sqrt(acc / 37))
        np.testing.assert_allclose(rmse_over_runs(est, truth), expected, rtol=1e-12)


def fake_summary(strategy, L0, swap_acc, missing=0, mae=0.1, moments=(1.0, 2.0, 3.0, 4.0)):
    return RunSummary(
        occupancy=np.full(21, 1 / 21), missing_modes=missing, mae=mae,
        moments={"EX": np.array(moments[:2]), "EX2": np.array(moments[2:])},
        swap_acc=swap_acc, rw_acc=np.array([0.3]), final_L=L0, strategy=strategy, L0=L0,
    )


class TestTables:
    def test_one_run_per_group(self):
        table = acceptance_table([fake_summary("ee", 4, 0.4), fake_summary("ra", 4, 0.1)])
        assert table[("ee", 4)] == 0.4 and table[("ra", 4)] == 0.1

    def test_identical_runs(self):
        table = acceptance_table([fake_summary("ee", 9, 0.37)] * 5)
        assert table[("ee", 9)] == pytest.approx(0.37)

    def test_group_report(self):
        runs = [fake_summary("ee", 4, 0.3, missing=0, mae=0.2), fake_summary("ee", 4, 0.5, missing=2, mae=0.4)]
        row = group_report("ee", 4, runs, truth=np.array([1.0, 2.0, 3.0, 5.0]))
        assert list(row) == REPORT_COLUMNS
        assert row["no_missing_pct"] == 50.0 and row["avg_missing"] == 1.0
        assert row["mae"] == pytest.approx(0.3) and row["swap_acc"] == pytest.approx(0.4)
        assert row["rmse_EX2sq"] == pytest.approx(1.0) and row["rmse_EX1"] == 0.0

    def test_write_report(self, tmp_path):
        runs = [fake_summary("ee", 4, 0.3)]
        row = group_report("ee", 4, runs, truth=None)
        write_report([row], tmp_path / "r.csv", tmp_path / "r.json", {"partial": False})
        with open(tmp_path / "r.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == REPORT_COLUMNS and len(rows) == 2
        doc = json.loads((tmp_path / "r.json").read_text(), parse_constant=lambda c: pytest.fail(c))
        assert doc["partial"] is False and doc["rows"][0]["rmse_EX1"] is None


def test_analytic_truth_against_monte_carlo():
    gm = peaks20()
    truth = moment_truth(gm)
    rng = np.random.default_rng(2024)
    n_total, chunk = 10 ** 7, 10 ** 6
    s1 = np.zeros(4)
    s2 = np.zeros(4)
    for _ in range(n_total // chunk):
        x = gm.sample(chunk, rng)
        f = np.column_stack([x, x ** 2])
        s1 += f.sum(axis=0)
        s2 += (f ** 2).sum(axis=0)
    mean = s1 / n_total
    se = np.sqrt((s2 / n_total - mean ** 2) / n_total)
    assert np.all(np.abs(mean - truth) < 3 * se)
    np.testing.assert_array_equal(moment_truth(peaks20_8d()), truth)


def test_close_components_fall_back_to_nearest_center():
    from aptemper.targets import GaussianMixture

    mm = modemap_for(GaussianMixture([[0.0], [1.0]], 0.5))
    assert not mm.strict
    assert assign_mode([0.6], mm) == 1
