import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from roughsum.lattice_path import (
    IntervalZ,
    LatticePath,
    coarsen_at_knots,
    dyadic_knots,
    increment,
    load_path,
    restrict,
    save_path,
)

finite = st.floats(-100, 100, allow_nan=False)


def paths(min_len=2, max_len=30, dims=(1, 2)):
    return st.builds(
        lambda n, d, data: LatticePath(np.asarray(data[: n * d]).reshape(n, d)),
        st.integers(min_len, max_len),
        st.sampled_from(dims),
        st.lists(finite, min_size=2 * max_len, max_size=2 * max_len),
    )


def test_increment_examples():
    assert increment(LatticePath([0, 1, 0]), IntervalZ(0, 2))[0] == 0
    assert increment(LatticePath([0, 1, 0]), IntervalZ(0, 1))[0] == 1
    np.testing.assert_array_equal(increment(LatticePath([(0, 0), (1, 0), (1, 1)]), IntervalZ(0, 2)), [1, 1])


def test_increment_out_of_range():
    with pytest.raises(IndexError):
        increment(LatticePath([0, 1, 0]), IntervalZ(0, 3))


def test_coarsen_examples():
    assert coarsen_at_knots(LatticePath([0, 1, 0, 1, 0]), [0, 4]) == LatticePath([0, 0, 0, 0, 0])
    assert coarsen_at_knots(LatticePath([0, 1, 2, 3]), [0, 1, 2, 3]) == LatticePath([0, 1, 2, 3])
    assert coarsen_at_knots(LatticePath([0, 2, 0, 4]), [0, 1, 3]) == LatticePath([0, 2, 3, 4])


def test_coarsen_constant_outside_knots():
    out = coarsen_at_knots(LatticePath([5, 1, 7, 2, 9, 4]), [2, 4])
    np.testing.assert_array_equal(out.values[:, 0], [7, 7, 7, 8, 9, 9])


@pytest.mark.parametrize("knots", [[2, 1], [1, 1], [0, 9], [], [0.5, 2]])
def test_coarsen_rejects_bad_knots(knots):
    with pytest.raises(ValueError):
        coarsen_at_knots(LatticePath([0, 1, 2, 3]), knots)


def test_restrict_examples():
    assert restrict(LatticePath([0, 1, 2, 3]), IntervalZ(1, 3)) == LatticePath([1, 2, 3])
    p = LatticePath([(0, 0), (1, 1)])
    assert restrict(p, IntervalZ(0, 1)) == p
    with pytest.raises(ValueError):
        restrict(LatticePath([5]), IntervalZ(0, 0))


def test_invalid_paths():
    with pytest.raises(ValueError):
        LatticePath([])
    with pytest.raises(ValueError):
        LatticePath([0.0, np.nan])
    with pytest.raises(ValueError):
        IntervalZ(3, 3)


def test_path_is_immutable():
    p = LatticePath([0, 1, 2])
    with pytest.raises(ValueError):
        p.values[0, 0] = 5


def test_dyadic_knots():
    assert dyadic_knots(48) == [1, 2, 4, 8, 16, 32, 48]
    assert dyadic_knots(64) == [1, 2, 4, 8, 16, 32, 64]


def test_at_interpolates():
    p = LatticePath([0, 2, 0])
    assert p.at(0.5)[0] == 1.0
    assert p.at(1.75)[0] == 0.5


def test_csv_and_json_roundtrip(tmp_path):
    p = LatticePath([(0.0, 1.5), (2.25, -3.0), (1e-17, 4.0)])
    for name in ("p.csv", "p.json"):
        save_path(p, tmp_path / name)
        assert load_path(tmp_path / name) == p


def test_loaders_validate_rectangularity(tmp_path):
    (tmp_path / "bad.csv").write_text("0,1\n2\n")
    (tmp_path / "bad.json").write_text(json.dumps([[0, 1], [2]]))
    for name in ("bad.csv", "bad.json"):
        with pytest.raises(ValueError):
            load_path(tmp_path / name)


def test_csv_header_is_skipped(tmp_path):
    (tmp_path / "h.csv").write_text("x,y\n0,1\n2,3\n")
    assert load_path(tmp_path / "h.csv") == LatticePath([(0, 1), (2, 3)])


@given(paths(min_len=3), st.data())
def test_increment_additive(path, data):
    a = data.draw(st.integers(0, path.N - 2))
    u = data.draw(st.integers(a + 1, path.N - 1))
    b = data.draw(st.integers(u + 1, path.N))
    lhs = increment(path, IntervalZ(a, b))
    rhs = increment(path, IntervalZ(a, u)) + increment(path, IntervalZ(u, b))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@given(paths(), st.data())
def test_coarsen_idempotent(path, data):
    knots = sorted(data.draw(st.sets(st.integers(0, path.N), min_size=1)))
    once = coarsen_at_knots(path, knots)
    assert coarsen_at_knots(once, knots) == once


@given(paths(min_len=4), st.data())
def test_coarsen_restrict_commute(path, data):
    a = data.draw(st.integers(0, path.N - 1))
    b = data.draw(st.integers(a + 1, path.N))
    knots = sorted(data.draw(st.sets(st.integers(a, b))) | {a, b})
    J = IntervalZ(a, b)
    lhs = restrict(coarsen_at_knots(path, knots), J)
    rhs = coarsen_at_knots(restrict(path, J), [k - a for k in knots])
    np.testing.assert_allclose(lhs.values, rhs.values, atol=1e-12)
