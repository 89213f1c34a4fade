import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stl_lab.dataset import (
    Dataset,
    DesignSpace,
    generate_dataset,
    lhs_sample,
    load_dataset,
    plate_from_row,
    save_dataset,
    table1_space,
)
from stl_lab.errors import ParseError, ValidationError
from stl_lab.grids import default_bands, default_grid
from stl_lab.quadrature import QuadratureScheme


def test_table1_space_matches_repo_file():
    import pathlib

    repo = pathlib.Path(__file__).resolve().parents[1] / "spaces" / "table1.json"
    assert table1_space().to_dict() == json.loads(repo.read_text())


def test_lhs_single_point_inside_bounds():
    space = table1_space()
    x = lhs_sample(space, 1, seed=0)
    assert x.shape == (1, 7)
    assert np.all(x >= space.bounds[:, 0]) and np.all(x <= space.bounds[:, 1])


@given(st.integers(min_value=1, max_value=64), st.integers(min_value=0, max_value=2**31))
@settings(max_examples=40, deadline=None)
def test_lhs_stratification(n, seed):
    space = table1_space()
    x = lhs_sample(space, n, seed)
    for j, (lo, hi) in enumerate(space.bounds):
        strata = np.floor((x[:, j] - lo) / (hi - lo) * n).astype(int)
        strata = np.clip(strata, 0, n - 1)
        assert sorted(strata) == list(range(n))


def test_lhs_deterministic():
    space = table1_space()
    a = lhs_sample(space, 17, seed=99)
    b = lhs_sample(space, 17, seed=99)
    assert np.array_equal(a, b)
    c = lhs_sample(space, 17, seed=100)
    assert not np.array_equal(a, c)


def test_every_sample_is_a_valid_plate():
    x = lhs_sample(table1_space(), 200, seed=1)
    for row in x:
        plate_from_row(row)  # raises on violation


def test_design_space_validation():
    bad = table1_space().to_dict()
    bad["h_mm"] = [7, 5]
    with pytest.raises(ValidationError, match="h"):
        DesignSpace.from_dict(bad)


def test_generate_dataset_shapes_and_trend():
    ds = generate_dataset(
        "infinite", table1_space(), n=10, seed=4,
        grid=default_grid(32), quad=QuadratureScheme(16, 4),
    )
    assert ds.X.shape == (10, 7)
    assert ds.Y.shape == (10, 32)
    # mass-law rise through the spectrum: top of grid well above the bottom
    assert np.all(ds.Y[:, 0] < 25.0)
    assert np.all(ds.Y[:, 16] > ds.Y[:, 0])


def test_generate_dataset_banded_width():
    ds = generate_dataset(
        "infinite", table1_space(), n=4, seed=4,
        grid=default_grid(64), bands=default_bands(), quad=QuadratureScheme(16, 4),
    )
    assert ds.Y.shape == (4, 16)
    assert ds.meta["banded"] is True


def test_dataset_roundtrip_bitexact(tmp_path):
    ds = generate_dataset(
        "infinite", table1_space(), n=6, seed=7,
        grid=default_grid(16), quad=QuadratureScheme(8, 4),
    )
    p1 = tmp_path / "d.csv"
    save_dataset(ds, p1)
    loaded = load_dataset(p1)
    assert np.array_equal(loaded.X, ds.X)
    assert np.array_equal(loaded.Y, ds.Y)
    assert loaded.meta == json.loads(json.dumps(ds.meta))
    p2 = tmp_path / "d2.csv"
    save_dataset(loaded, p2)
    assert p2.read_bytes() == p1.read_bytes()
    assert (tmp_path / "d2.meta.json").read_bytes() == (tmp_path / "d.meta.json").read_bytes()


def test_generation_deterministic(tmp_path):
    kw = dict(grid=default_grid(8), quad=QuadratureScheme(8, 4))
    d1 = generate_dataset("infinite", table1_space(), n=5, seed=3, **kw)
    d2 = generate_dataset("infinite", table1_space(), n=5, seed=3, **kw)
    save_dataset(d1, tmp_path / "a.csv")
    save_dataset(d2, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_load_rejects_wrong_column_count(tmp_path):
    ds = generate_dataset("infinite", table1_space(), n=3, seed=1,
                          grid=default_grid(8), quad=QuadratureScheme(8, 4))
    p = tmp_path / "d.csv"
    save_dataset(ds, p)
    lines = p.read_text().splitlines()
    lines[2] = ",".join(lines[2].split(",")[:-1])
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match="row|column|:3"):
        load_dataset(p)


def test_load_rejects_nan_cell(tmp_path):
    ds = generate_dataset("infinite", table1_space(), n=3, seed=1,
                          grid=default_grid(8), quad=QuadratureScheme(8, 4))
    p = tmp_path / "d.csv"
    save_dataset(ds, p)
    lines = p.read_text().splitlines()
    parts = lines[1].split(",")
    parts[9] = "nan"
    lines[1] = ",".join(parts)
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValidationError, match="row 1"):
        load_dataset(p)


def test_dataset_invariants():
    with pytest.raises(ValidationError):
        Dataset(np.ones((3, 7)), np.ones((2, 4)))
    with pytest.raises(ValidationError):
        Dataset(np.ones((2, 7)), np.array([[1.0, np.inf], [0.0, 1.0]]))
