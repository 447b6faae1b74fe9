import numpy as np
import pytest

from rudp import data
from rudp.baselines import kmeans
from rudp.linalg import sym_eig
from rudp.metrics import hungarian_accuracy


def test_load_rows_layout(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("1,2\n3,4\n5,6\n")
    ds = data.load_csv(path, "samples_as_rows")
    assert ds.X.shape == (2, 3)
    np.testing.assert_array_equal(ds.X[:, 0], [1, 2])
    assert data.load_csv(path, "columns").X.shape == (3, 2)


def test_load_label_column(tmp_path):
    path = tmp_path / "b.csv"
    path.write_text("f1,f2,cls\n1,2,a\n3,4,b\n5,6,c\n")
    ds = data.load_csv(path, "rows", label_column="cls")
    assert ds.X.shape == (2, 3)
    assert list(ds.truth) == ["a", "b", "c"]
    assert ds.feature_names == ["f1", "f2"]
    ds = data.load_csv(path, "rows", label_column=2)
    assert ds.X.shape == (2, 3)


def test_load_errors(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty"):
        data.load_csv(empty)
    ragged = tmp_path / "r.csv"
    ragged.write_text("1,2\n3\n")
    with pytest.raises(ValueError, match="ragged row 2"):
        data.load_csv(ragged)
    bad = tmp_path / "n.csv"
    bad.write_text("x,y\n1,2\n3,oops\n")
    with pytest.raises(ValueError, match="row 3, column 2"):
        data.load_csv(bad)
    with pytest.raises(ValueError):
        data.load_csv(bad, layout="diagonal")


def test_round_trip_bitwise(tmp_path, rng):
    ds = data.Dataset(rng.standard_normal((4, 9)) * 1e3)
    path = tmp_path / "rt.csv"
    data.save_csv(ds, path)
    back = data.load_csv(path)
    np.testing.assert_array_equal(back.X, ds.X)


def test_labels_round_trip(tmp_path):
    path = tmp_path / "l.csv"
    data.save_labels([2, 0, 1], path)
    np.testing.assert_array_equal(data.load_labels(path), [2, 0, 1])


def test_standardize(rng):
    ds = data.standardize(data.Dataset(np.array([[1.0, 3.0]])))
    np.testing.assert_array_equal(ds.X, [[-1.0, 1.0]])
    X = rng.standard_normal((5, 50)) * 3 + 2
    z = data.standardize(data.Dataset(X)).X
    assert np.abs(z.mean(axis=1)).max() <= 1e-10
    assert np.abs(z.var(axis=1) - 1).max() <= 1e-10
    np.testing.assert_allclose(data.standardize(data.Dataset(z)).X, z, atol=1e-12)


def test_standardize_constant_feature():
    X = np.array([[1.0, 2.0, 3.0], [4.0, 4.0, 4.0]])
    with pytest.warns(UserWarning, match="constant"):
        ds = data.standardize(data.Dataset(X))
    assert not ds.X[1].any()
    assert ds.provenance["constant_features"] == [1]


def test_synth_examples():
    ds = data.synth_clusters(3, 5, 6, 3, 4.0, 0.0, seed=1)
    X = ds.X
    for k in range(3):
        members = X[:, ds.truth == k]
        assert np.abs(members - members[:, :1]).max() <= 1e-12
    assert np.linalg.norm(X[:, 0] - X[:, 5]) == pytest.approx(4.0)
    assert np.all(data.synth_clusters(1, 4, 3, 2, 1.0, 1.0).truth == 0)
    ds = data.synth_clusters(2, (3, 5), 4, 2, 1.0, 1.0)
    assert list(np.bincount(ds.truth)) == [3, 5]


def test_synth_rank_without_noise():
    ds = data.synth_clusters(5, 4, 10, 3, 2.0, 0.0, seed=3)
    Xc = ds.X - ds.X.mean(axis=1, keepdims=True)
    eig = sym_eig(Xc @ Xc.T / ds.n_samples).eigenvalues
    assert np.all(np.abs(eig[3:]) <= 1e-10)


def test_synth_deterministic():
    a = data.synth_clusters(3, 10, 5, 2, 3.0, 1.0, seed=8)
    b = data.synth_clusters(3, 10, 5, 2, 3.0, 1.0, seed=8)
    np.testing.assert_array_equal(a.X, b.X)


def test_synth_well_separated_kmeans():
    accs = []
    for seed in range(10):
        ds = data.synth_clusters(3, 30, 10, 3, 10.0, 1.0, seed=seed)
        accs.append(hungarian_accuracy(kmeans(ds.X.T, 3, seed=seed).labels, ds.truth))
    assert min(accs) >= 0.99


def test_outliers(rng):
    ds = data.Dataset(rng.standard_normal((3, 40)))
    same = data.inject_outliers(ds, data.CorruptionSpec("outlier", fraction=0.0))
    np.testing.assert_array_equal(same.X, ds.X)
    out = data.inject_outliers(ds, data.CorruptionSpec("outlier", fraction=0.1, seed=4))
    idx = out.provenance["outlier_indices"]
    assert len(idx) == 4
    changed = np.flatnonzero(np.any(out.X != ds.X, axis=0))
    np.testing.assert_array_equal(changed, idx)
    np.testing.assert_array_equal(out.X[:, idx], 1.5 * ds.X[:, idx])


def test_outlier_entry_and_count():
    ds = data.Dataset(np.array([[2.0]]))
    out = data.inject_outliers(ds, data.CorruptionSpec("outlier", fraction=1.0, scope="entries"))
    assert out.X[0, 0] == 3.0
    big = data.Dataset(np.ones((2, 1440)))
    out = data.inject_outliers(big, data.CorruptionSpec("outlier", fraction=0.05))
    assert len(out.provenance["outlier_indices"]) == 72


def test_corruption_spec_validation():
    with pytest.raises(ValueError):
        data.CorruptionSpec("outlier", fraction=1.5)
    with pytest.raises(ValueError):
        data.CorruptionSpec("outlier", fraction=0.1, snr_db=3.0)
    with pytest.raises(ValueError):
        data.CorruptionSpec("snr_noise")
    with pytest.raises(ValueError):
        data.CorruptionSpec("blur")
    with pytest.raises(ValueError):
        data.inject_outliers(data.Dataset(np.ones((1, 2))), data.CorruptionSpec("snr_noise", snr_db=1))


def test_snr_noise(rng):
    X = rng.standard_normal((100, 1000))
    ds = data.Dataset(X)
    noisy = data.inject_noise_snr(ds, 10.0, seed=1)
    noise = noisy.X - X
    measured = 10 * np.log10(data.signal_power(X) / data.signal_power(noise))
    assert abs(measured - 10.0) <= 0.5
    zero_db = data.inject_noise_snr(ds, 0.0, seed=2)
    ratio = data.signal_power(zero_db.X - X) / data.signal_power(X)
    assert abs(ratio - 1) <= 0.02
    quiet = data.inject_noise_snr(ds, 200.0, seed=3)
    assert np.abs(quiet.X - X).max() <= 1e-6 * np.abs(X).max()
    with pytest.raises(ValueError):
        data.inject_noise_snr(data.Dataset(np.zeros((2, 2))), 5.0)


def test_sliding_window():
    assert data.sliding_window(np.arange(1000.0), 1000).n_samples == 1
    ds = data.sliding_window(np.arange(10.0), 4, 2)
    assert ds.n_samples == 4
    assert ds.provenance["offsets"] == [0, 2, 4, 6]
    signal = np.arange(12.0)
    windows = data.sliding_window(signal, 3, 3).X
    np.testing.assert_array_equal(windows.T.ravel(), signal)
    with pytest.raises(ValueError):
        data.sliding_window(np.arange(3.0), 4)


def test_dataset_label_length_check():
    with pytest.raises(ValueError):
        data.Dataset(np.ones((2, 3)), truth=[0, 1])
