import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from semtraj.reduce import pca_fit, project, render_chart_svg, write_chart_csv, zscore_normalize


def test_zscore_population_std():
    z, mean, std = zscore_normalize([[1.0, 5.0], [3.0, 5.0]])
    assert mean.tolist() == [2.0, 5.0]
    assert std.tolist() == [1.0, 0.0]
    assert z.tolist() == [[-1.0, 0.0], [1.0, 0.0]]


def test_zscore_needs_two_rows():
    with pytest.raises(ValueError):
        zscore_normalize([[1.0, 2.0]])


def test_rank_one_data():
    t = np.linspace(-1, 1, 50)
    x = np.column_stack([t, 2 * t, -t, 0.5 * t])
    eig = pca_fit(x)
    assert eig.values[1] < 1e-10
    assert eig.explained_ratio()[0] == pytest.approx(1.0)


def test_sign_convention():
    rng = np.random.default_rng(0)
    eig = pca_fit(rng.normal(size=(40, 4)))
    for col in eig.vectors.T:
        assert col[np.argmax(np.abs(col))] > 0


def test_project_shape_and_k_validation():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 4))
    eig = pca_fit(x)
    assert project(x, eig, 2).shape == (20, 2)
    with pytest.raises(ValueError):
        project(x, eig, 0)
    with pytest.raises(ValueError):
        project(x, eig, 5)


@settings(max_examples=40)
@given(arrays(np.float64, st.tuples(st.integers(3, 30), st.integers(1, 5)), elements=st.floats(-1e3, 1e3)))
def test_pca_numerics(x):
    eig = pca_fit(x)
    v, vals = eig.vectors, eig.values
    cov = np.cov(x, rowvar=False, ddof=1).reshape(x.shape[1], x.shape[1])
    scale = max(1.0, float(np.abs(cov).max()))
    assert (np.diff(vals) <= 0).all() and (vals >= 0).all()
    assert np.abs(v.T @ v - np.eye(x.shape[1])).max() < 1e-9
    assert abs(vals.sum() - np.trace(cov)) < 1e-10 * scale * x.shape[1]
    assert np.abs(v @ np.diag(vals) @ v.T - cov).max() < 1e-9 * scale


def test_chart_outputs(tmp_path):
    coords = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]])
    write_chart_csv(tmp_path / "c.csv", ["a", "b", "c"], coords, [0, -1, 0])
    rows = list(csv.reader(open(tmp_path / "c.csv")))
    assert rows[0] == ["item_id", "pc1", "pc2", "cluster_id"]
    assert rows[2] == ["b", "1.0", "0.0", "-1"]
    svg = render_chart_svg(coords, [0, -1, 0])
    assert svg.startswith("<svg") and svg.count("<circle") == 3 and "#999999" in svg
