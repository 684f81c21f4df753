import numpy as np
import pytest

from dirfdr.errors import DegenerateInputError, DimensionError
from dirfdr.model import (Design, LinearModelSpec, Response, SplitData,
                          load_design_csv, load_response_csv, normalize_columns)


def test_design_from_matrix_basic():
    x = np.arange(12.0).reshape(4, 3)
    d = Design.from_matrix(x)
    assert d.n == 4 and d.p == 3
    assert not d.normalized
    np.testing.assert_allclose(d.column_norms, np.linalg.norm(x, axis=0))


def test_design_values_are_readonly():
    d = Design.from_matrix(np.ones((3, 2)))
    with pytest.raises(ValueError):
        d.values[0, 0] = 5.0


def test_normalize_columns_unit_norms():
    rng = np.random.default_rng(0)
    d = normalize_columns(Design.from_matrix(rng.standard_normal((20, 5))))
    assert d.normalized
    np.testing.assert_allclose(np.linalg.norm(d.values, axis=0), 1.0, atol=1e-12)


def test_normalize_zero_column_names_the_column():
    x = np.ones((4, 3))
    x[:, 1] = 0.0
    with pytest.raises(DegenerateInputError, match="1"):
        normalize_columns(Design.from_matrix(x))


def test_normalized_flag_is_checked():
    x = np.ones((4, 2))
    with pytest.raises(DegenerateInputError):
        Design(values=x, column_norms=np.linalg.norm(x, axis=0), normalized=True)


def test_linear_model_spec_support_and_signs():
    spec = LinearModelSpec(beta=np.array([0.0, 2.0, -1.0]), sigma=1.0)
    assert spec.support == frozenset({1, 2})
    np.testing.assert_array_equal(spec.true_signs(), [0, 1, -1])


def test_linear_model_spec_rejects_negative_sigma():
    with pytest.raises(DegenerateInputError):
        LinearModelSpec(beta=np.zeros(2), sigma=-1.0)


def test_split_data_row_count_consistency():
    x = np.random.default_rng(1).standard_normal((10, 3))
    d = Design.from_matrix(x)
    y = Response(values=np.zeros(10))
    part = lambda sl: (Design.from_matrix(x[sl]), Response(values=np.zeros(len(x[sl]))))
    sd = SplitData(part0=part(slice(0, 4)), part1=part(slice(4, 10)), n0=4, n1=6)
    assert sd.n0 + sd.n1 == d.n
    with pytest.raises(DimensionError):
        SplitData(part0=part(slice(0, 4)), part1=part(slice(4, 10)), n0=3, n1=6)


def test_csv_roundtrip(tmp_path):
    x = np.array([[1.5, 2.0], [-3.0, 0.25], [0.0, 1.0]])
    path = tmp_path / "x.csv"
    path.write_text("\n".join(",".join(str(v) for v in row) for row in x) + "\n")
    d = load_design_csv(path)
    np.testing.assert_allclose(d.values, x)
    ypath = tmp_path / "y.csv"
    ypath.write_text("1.0\n2.5\n-3.0\n")
    y = load_response_csv(ypath)
    np.testing.assert_allclose(y.values, [1.0, 2.5, -3.0])


def test_csv_bad_entry_reports_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(DegenerateInputError, match="row 2"):
        load_design_csv(path)
