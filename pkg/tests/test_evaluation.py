import random

import numpy as np
import pytest

import capweight as cw


class TestMacroF1:
    def test_perfect_over_all_classes(self):
        labels = [1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6]
        assert cw.macro_f1(labels, labels) == 1.0

    def test_two_active_classes(self):
        # per-class F1 = 0.5 each for classes 1 and 2; classes 3..6
        # absent from both sides contribute zero and still divide
        assert cw.macro_f1([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(1 / 6, abs=1e-15)

    def test_constant_predictor(self):
        truth = [1, 2, 3, 4, 5, 6]
        pred = [1, 1, 1, 1, 1, 1]
        # F1 for class 1 = 2·(1/6)/(1 + 1/6) = 2/7, everything else 0
        assert cw.macro_f1(truth, pred) == pytest.approx((2 / 7) / 6, abs=1e-15)

    def test_order_independence(self):
        rng = random.Random(20)
        truth = [rng.randint(1, 6) for _ in range(60)]
        pred = [rng.randint(1, 6) for _ in range(60)]
        base = cw.macro_f1(truth, pred)
        order = list(range(60))
        for _ in range(20):
            rng.shuffle(order)
            assert cw.macro_f1([truth[i] for i in order], [pred[i] for i in order]) == base

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cw.macro_f1([1, 2], [1])

    def test_bad_label(self):
        with pytest.raises(ValueError):
            cw.macro_f1([0], [1])


class TestRmse:
    def test_identical_is_zero(self):
        assert cw.rmse([1, 4, 6], [1, 4, 6]) == 0.0

    def test_hand_case(self):
        assert cw.rmse([1, 2], [1, 4]) == pytest.approx(2 ** 0.5, abs=1e-12)

    def test_constant_offset(self):
        assert cw.rmse([1] * 10, [6] * 10) == 5.0

    def test_symmetric(self):
        rng = random.Random(21)
        for _ in range(100):
            n = rng.randint(1, 30)
            a = [rng.randint(1, 6) for _ in range(n)]
            b = [rng.randint(1, 6) for _ in range(n)]
            assert cw.rmse(a, b) == cw.rmse(b, a)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            cw.rmse([], [])


class TestConfusion:
    def test_perfect_is_identity(self):
        labels = [1, 2, 3, 4, 5, 6] * 3
        assert np.array_equal(cw.confusion(labels, labels), np.eye(6))

    def test_row_counting(self):
        m = cw.confusion([1, 1, 1, 1], [1, 1, 1, 2])
        assert list(m[0]) == [0.75, 0.25, 0, 0, 0, 0]

    def test_zero_support_row(self):
        m = cw.confusion([1, 2], [1, 2])
        assert np.all(m[5] == 0)

    def test_rows_sum_to_one_or_zero(self):
        rng = random.Random(22)
        for _ in range(50):
            n = rng.randint(1, 40)
            truth = [rng.randint(1, 6) for _ in range(n)]
            pred = [rng.randint(1, 6) for _ in range(n)]
            m = cw.confusion(truth, pred)
            support = {c: truth.count(c) for c in range(1, 7)}
            for c in range(1, 7):
                row_sum = m[c - 1].sum()
                if support[c]:
                    assert abs(row_sum - 1.0) < 1e-9
                else:
                    assert row_sum == 0.0


class TestEvaluatePredictions:
    def test_bundles_everything(self):
        truth = [1, 1, 2, 2, 6]
        pred = [1, 2, 1, 2, 6]
        report = cw.evaluate_predictions(truth, pred)
        assert report.macro_f1 == cw.macro_f1(truth, pred)
        assert report.rmse == cw.rmse(truth, pred)
        assert np.array_equal(report.confusion, cw.confusion(truth, pred))
        assert report.support == (2, 2, 0, 0, 0, 1)

    def test_macro_f1_one_iff_diagonal(self):
        rng = random.Random(23)
        for _ in range(100):
            n = rng.randint(2, 30)
            truth = [rng.randint(1, 6) for _ in range(n)]
            if rng.random() < 0.5:
                pred = list(truth)
            else:
                pred = [rng.randint(1, 6) for _ in range(n)]
            report = cw.evaluate_predictions(truth, pred)
            m = report.confusion
            diagonal = all(
                m[c, c] == 1.0 for c in range(6) if report.support[c] > 0
            ) and all(
                m[c, j] == 0.0 for c in range(6) for j in range(6)
                if c != j and report.support[c] > 0
            )
            # absent classes drag the macro mean below 1 even for perfect rows
            perfect = diagonal and all(s > 0 for s in report.support)
            assert (report.macro_f1 == 1.0) == perfect

    def test_json_dict_shape(self):
        report = cw.evaluate_predictions([1, 2], [1, 2])
        d = report.to_json_dict()
        assert set(d) == {"confusion", "macro_f1", "rmse", "support"}
        assert len(d["confusion"]) == 6
        assert all(len(row) == 6 for row in d["confusion"])
        assert d["support"] == [1, 1, 0, 0, 0, 0]


def test_format_confusion_is_readable():
    table = cw.format_confusion(cw.confusion([1, 1, 2], [1, 2, 2]))
    lines = table.splitlines()
    assert len(lines) == 7
    assert "0.500" in lines[1]
