import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maskbench.data import (
    DatasetManifest,
    DataValidationError,
    LabelVector,
    SchemaError,
    TimeSeriesTensor,
    export_dataset,
    load_dataset,
    split_kfold,
    summarize,
)

from conftest import make_tensor, random_tensor


def write_wellformed(root):
    """Hand-written 2-sample, 3-step, 2-feature dataset directory."""
    (root / "data.csv").write_text(
        "sample_id,step,hr,temp\n"
        "0,0.0,80.0,36.6\n"
        "0,1.0,,36.7\n"
        "0,2.0,82.5,\n"
        "1,0.0,90.0,38.0\n"
        "1,1.0,91.0,38.1\n"
        "1,2.0,92.0,38.2\n"
    )
    (root / "mask.csv").write_text(
        "sample_id,step,hr,temp\n"
        "0,0.0,1,1\n"
        "0,1.0,0,1\n"
        "0,2.0,1,0\n"
        "1,0.0,1,1\n"
        "1,1.0,1,1\n"
        "1,2.0,1,1\n"
    )
    (root / "labels.csv").write_text("sample_id,label\n0,0\n1,1\n")
    (root / "manifest.json").write_text(json.dumps({
        "n_samples": 2, "n_steps": 3, "n_features": 2,
        "scale": "raw", "feature_names": ["hr", "temp"],
        "seed_provenance": 0,
    }))


class TestLoadDataset:
    def test_wellformed_shape_echo(self, tmp_path):
        write_wellformed(tmp_path)
        tensor, labels, manifest = load_dataset(tmp_path)
        assert tensor.values.shape == (2, 3, 2)
        assert len(labels) == 2
        assert labels.labels.tolist() == [0, 1]
        assert tensor.values[0, 0, 0] == 80.0
        assert not tensor.observed[0, 1, 0]
        assert tensor.values[0, 1, 0] == 0.0  # sentinel

    def test_row_count_mismatch_is_structural(self, tmp_path):
        write_wellformed(tmp_path)
        lines = (tmp_path / "mask.csv").read_text().splitlines()
        (tmp_path / "mask.csv").write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(SchemaError, match="mask.csv"):
            load_dataset(tmp_path)

    def test_nan_at_observed_cell(self, tmp_path):
        write_wellformed(tmp_path)
        text = (tmp_path / "data.csv").read_text().replace("91.0", "NaN")
        (tmp_path / "data.csv").write_text(text)
        with pytest.raises(DataValidationError, match=r"sample=1, step=1, feature=0"):
            load_dataset(tmp_path)

    def test_missing_file(self, tmp_path):
        write_wellformed(tmp_path)
        (tmp_path / "labels.csv").unlink()
        with pytest.raises(FileNotFoundError):
            load_dataset(tmp_path)

    def test_empty_field_under_mask_one(self, tmp_path):
        write_wellformed(tmp_path)
        text = (tmp_path / "data.csv").read_text().replace("0,0.0,80.0,36.6",
                                                           "0,0.0,,36.6")
        (tmp_path / "data.csv").write_text(text)
        with pytest.raises(SchemaError, match="empty field"):
            load_dataset(tmp_path)

    def test_header_mismatch(self, tmp_path):
        write_wellformed(tmp_path)
        text = (tmp_path / "data.csv").read_text().replace("hr,temp", "temp,hr")
        (tmp_path / "data.csv").write_text(text)
        with pytest.raises(SchemaError, match="header"):
            load_dataset(tmp_path)


class TestRoundTrip:
    def test_export_load_bit_exact(self, tmp_path, rng):
        tensor = random_tensor(rng, 4, 6, 3, observed_frac=0.7)
        labels = LabelVector(rng.integers(0, 2, size=4))
        manifest = DatasetManifest(4, 6, 3, "raw",
                                   list(tensor.feature_names), seed_provenance=9)
        export_dataset(tensor, labels, manifest, tmp_path / "ds")
        loaded, lab2, man2 = load_dataset(tmp_path / "ds")
        assert np.array_equal(loaded.observed, tensor.observed)
        obs = tensor.observed
        assert np.array_equal(loaded.values[obs], tensor.values[obs])
        assert lab2.labels.tolist() == labels.labels.tolist()
        assert man2.n_samples == 4

    def test_export_rejects_bad_manifest(self, tmp_path, rng):
        tensor = random_tensor(rng, 4, 6, 3)
        labels = LabelVector(rng.integers(0, 2, size=4))
        manifest = DatasetManifest(5, 6, 3, "raw", list(tensor.feature_names))
        with pytest.raises(SchemaError):
            export_dataset(tensor, labels, manifest, tmp_path / "ds")


class TestTensorInvariants:
    def test_shape_mismatch(self):
        with pytest.raises(SchemaError):
            TimeSeriesTensor(np.zeros((2, 3, 2)), np.ones((2, 3, 3), bool),
                             ("a", "b"), np.arange(3.0))

    def test_nonfinite_at_observed(self):
        vals = np.zeros((1, 2, 1))
        vals[0, 1, 0] = np.inf
        with pytest.raises(DataValidationError):
            TimeSeriesTensor(vals, np.ones((1, 2, 1), bool), ("a",), np.arange(2.0))

    def test_immutable(self, small_tensor):
        with pytest.raises(ValueError):
            small_tensor.values[0, 0, 0] = 99.0


class TestSplitKfold:
    def test_ten_samples_two_positives(self, rng, labels10):
        tensor = random_tensor(rng, 10, 4, 2)
        folds = split_kfold(tensor, labels10, k=5, seed=0)
        y = labels10.labels
        for train, val in folds:
            assert len(val) == 2
            assert y[val].sum() <= 1
        all_val = np.sort(np.concatenate([v for _, v in folds]))
        assert all_val.tolist() == list(range(10))

    def test_k2_balanced(self, rng):
        tensor = random_tensor(rng, 4, 4, 2)
        labels = LabelVector(np.array([1, 0, 1, 0]))
        folds = split_kfold(tensor, labels, k=2, seed=3)
        for _, val in folds:
            assert len(val) == 2
            assert labels.labels[val].sum() == 1

    def test_deterministic(self, rng, labels10):
        tensor = random_tensor(rng, 10, 4, 2)
        a = split_kfold(tensor, labels10, k=5, seed=42)
        b = split_kfold(tensor, labels10, k=5, seed=42)
        for (ta, va), (tb, vb) in zip(a, b):
            assert np.array_equal(ta, tb) and np.array_equal(va, vb)

    def test_argument_errors(self, rng, labels10):
        tensor = random_tensor(rng, 10, 4, 2)
        with pytest.raises(ValueError):
            split_kfold(tensor, labels10, k=11, seed=0)
        with pytest.raises(ValueError):
            split_kfold(tensor, labels10, k=1, seed=0)
        single = LabelVector(np.zeros(10, dtype=int))
        with pytest.raises(ValueError):
            split_kfold(tensor, single, k=5, seed=0)

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(4, 40),
        k=st.integers(2, 6),
        seed=st.integers(0, 2**32),
        pos=st.integers(1, 20),
        shuffle_seed=st.integers(0, 100),
    )
    def test_partition_and_stratification(self, n, k, seed, pos, shuffle_seed):
        if k > n or pos >= n:
            return
        y = np.zeros(n, dtype=int)
        y[:pos] = 1
        np.random.default_rng(shuffle_seed).shuffle(y)
        tensor = make_tensor(np.zeros((n, 2, 1)))
        folds = split_kfold(tensor, LabelVector(y), k=k, seed=seed)
        all_val = np.concatenate([v for _, v in folds])
        assert np.sort(all_val).tolist() == list(range(n))
        p_global = y.mean()
        for train, val in folds:
            assert np.array_equal(np.sort(np.concatenate([train, val])),
                                  np.arange(n))
            rate = y[val].mean()
            assert abs(rate - p_global) <= 1.0 / len(val) + 1e-12


class TestSummarize:
    def test_fully_observed_counts(self, small_tensor):
        s = summarize(small_tensor)
        assert s[0].observed_fraction == 1.0
        assert s[0].mean == 3.0
        assert s[0].min == 1.0 and s[0].max == 5.0

    def test_fully_missing_feature(self):
        t = make_tensor(np.zeros((1, 5, 1)), observed=np.zeros((1, 5, 1), bool))
        s = summarize(t)
        assert s[0].observed_fraction == 0.0
        assert s[0].min is None and s[0].max is None and s[0].mean is None

    def test_fraction_definition(self, rng):
        t = random_tensor(rng, 7, 9, 3, observed_frac=0.5)
        for j, s in enumerate(summarize(t)):
            assert s.observed_fraction == t.observed[:, :, j].sum() / (7 * 9)

    def test_against_double_loop_oracle(self, rng):
        t = random_tensor(rng, 10, 10, 5, observed_frac=0.6)
        summaries = summarize(t)
        for j in range(5):
            count, total, lo, hi = 0, 0.0, np.inf, -np.inf
            for i in range(10):
                for step in range(10):
                    if t.observed[i, step, j]:
                        x = t.values[i, step, j]
                        count += 1
                        total += x
                        lo, hi = min(lo, x), max(hi, x)
            if count == 0:
                assert summaries[j].mean is None
                continue
            assert summaries[j].observed_count == count
            assert abs(summaries[j].mean - total / count) <= 1e-12 * max(1, abs(total / count))
            assert summaries[j].min == lo and summaries[j].max == hi
