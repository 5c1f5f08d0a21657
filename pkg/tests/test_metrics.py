import math

import numpy as np
import pytest

from koopmem.forecast import ForecastRecord
from koopmem.metrics import (absolute_errors, improvement,
                             median_relative_error)


def recs(targets, preds):
    return [ForecastRecord(t=tt - 1, target_t=tt, prediction=p,
                           source="sliding")
            for tt, p in zip(targets, preds)]


class TestMedianRelativeError:
    def test_perfect_predictions(self):
        truth = np.array([0.0, 10.0, 10.0, 10.0])
        summary = median_relative_error(truth, recs([1, 2, 3], [10, 10, 10]))
        assert summary.median_rel_error_pct == 0.0
        assert summary.median_abs_error == 0.0
        assert summary.n_points == 3

    def test_direct_median(self):
        truth = np.array([0.0, 10.0, 10.0, 10.0])
        summary = median_relative_error(truth, recs([1, 2, 3], [11, 12, 9]))
        assert summary.median_rel_error_pct == pytest.approx(10.0)

    def test_zero_target_excluded(self):
        truth = np.array([0.0, 10.0, 0.0, 10.0])
        summary = median_relative_error(truth, recs([1, 2, 3], [11, 5, 9]))
        assert summary.n_excluded == 1
        assert summary.n_points == 2

    def test_permutation_invariant(self):
        truth = np.arange(1.0, 10.0)
        rs = recs([1, 3, 5, 7], [1.5, 3.1, 5.9, 7.2])
        a = median_relative_error(truth, rs)
        b = median_relative_error(truth, rs[::-1])
        assert a == b

    def test_empty_records(self):
        with pytest.raises(ValueError):
            median_relative_error(np.array([1.0]), [])


class TestImprovement:
    def test_equal_sequences(self):
        errs = np.array([1.0, 2.0, 3.0])
        assert improvement(errs, errs) == 0.0

    def test_paper_flu_ratio(self):
        # medians 22.6 vs 14.6 must give just under 55%
        base = np.full(11, 22.6)
        mem = np.full(11, 14.6)
        assert improvement(base, mem) == pytest.approx(54.79, abs=0.01)

    def test_illustrative_650(self):
        assert improvement(np.full(5, 7.5), np.full(5, 1.0)) == pytest.approx(650.0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = rng.integers(2, 30)
            base = np.abs(rng.normal(size=n)) + 1e-3
            mem = np.abs(rng.normal(size=n)) + 1e-3
            c = float(rng.uniform(0.1, 50.0))
            assert improvement(base, mem) == pytest.approx(
                improvement(c * base, c * mem), rel=1e-9)

    def test_sign_iff_memory_better(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(2, 20))
            base = np.abs(rng.normal(size=n))
            mem = np.abs(rng.normal(size=n))
            imp = improvement(base, mem)
            mb, mm = np.median(base), np.median(mem)
            if mm == 0:
                continue
            assert (imp > 0) == (mm < mb)

    def test_zero_memory_median_is_infinite(self):
        assert improvement([1.0, 2.0, 3.0], [0.0, 0.0, 0.0]) == math.inf

    def test_both_zero_is_zero(self):
        assert improvement([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            improvement([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(ValueError):
            improvement([], [])


class TestAbsoluteErrors:
    def test_values(self):
        truth = np.array([0.0, 1.0, 2.0, 3.0])
        errs = absolute_errors(truth, recs([1, 3], [0.5, 3.25]))
        assert np.allclose(errs, [0.5, 0.25])
