import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughsum.lattice_path import IntervalZ, LatticePath, coarsen_at_knots, dyadic_knots
from roughsum.levy_area import (
    area_at_real,
    area_direct_oracle,
    area_partition_sum,
    build_area_table,
    chen_defect,
    pair_area_table,
    rough_norm_sq,
)
from roughsum.variation import p_var_exact, table_one_var


def random_path(rng, N, d):
    return LatticePath(rng.standard_normal((N + 1, d)).cumsum(axis=0))


seeds = st.integers(0, 2**32 - 1)


def test_one_dimensional_table_is_zero():
    t = build_area_table(LatticePath([0, 3, -1, 2]))
    for i in range(4):
        for j in range(i, 4):
            assert not np.any(t.entry(i, j))


def test_corner_and_triangle():
    t = build_area_table(LatticePath([(0, 0), (1, 0), (1, 1)]))
    assert t.entry(0, 2)[0, 1] == 0.5
    tri = build_area_table(LatticePath([(0, 0), (1, 0), (0, 1), (0, 0)]))
    assert tri.entry(0, 3)[0, 1] == pytest.approx(0.5, abs=1e-15)


def test_direct_oracle_examples(rng):
    corner = LatticePath([(0, 0), (1, 0), (1, 1)])
    assert area_direct_oracle(corner, IntervalZ(0, 2))[0, 1] == 0.5
    path = random_path(rng, 30, 2)
    rev = LatticePath(path.values[::-1])
    a = area_direct_oracle(path, IntervalZ(0, 30))
    b = area_direct_oracle(rev, IntervalZ(0, 30))
    assert b[0, 1] == pytest.approx(-a[0, 1], rel=1e-12)
    with pytest.raises(OverflowError):
        area_direct_oracle(random_path(rng, 600, 2), IntervalZ(0, 600))


@pytest.mark.parametrize("dense", [True, False])
def test_table_matches_direct_oracle(rng, dense):
    for _ in range(20):
        path = random_path(rng, 40, 3)
        t = build_area_table(path, dense=dense)
        for i, j in rng.integers(0, 41, size=(10, 2)):
            i, j = sorted((int(i), int(j)))
            if i == j:
                continue
            np.testing.assert_allclose(t.entry(i, j), area_direct_oracle(path, IntervalZ(i, j)), atol=1e-11)


def test_chen_defect_examples(rng):
    path = random_path(rng, 20, 2)
    t = build_area_table(path)
    assert chen_defect(path, t, 5, 5, 5) == 0
    with pytest.raises(ValueError):
        chen_defect(path, t, 5, 3, 8)


def test_chen_defect_detects_perturbation():
    path = LatticePath([(0, 0), (1, 0), (1, 1)])
    t = build_area_table(path)
    bump = np.array([[0.0, 1.0], [-1.0, 0.0]])
    # a unit antisymmetric pair has Frobenius norm sqrt(2)
    assert chen_defect(path, t.perturbed(0, 2, bump), 0, 1, 2) == pytest.approx(math.sqrt(2), rel=1e-15)


@given(st.integers(3, 60), st.sampled_from([2, 3]), seeds, st.data())
def test_chen_identity(N, d, seed, data):
    path = random_path(np.random.default_rng(seed), N, d)
    t = build_area_table(path, dense=data.draw(st.booleans()))
    s = data.draw(st.integers(0, N))
    u = data.draw(st.integers(s, N))
    v = data.draw(st.integers(u, N))
    assert chen_defect(path, t, s, u, v) < 1e-10


@given(st.integers(1, 40), seeds)
def test_antisymmetry_and_zero_diagonal(N, seed):
    t = build_area_table(random_path(np.random.default_rng(seed), N, 3))
    for i in range(0, N + 1, max(1, N // 5)):
        assert not np.any(t.entry(i, i))
        for j in range(i, N + 1):
            A = t.entry(i, j)
            assert np.max(np.abs(A + A.T)) <= 1e-12


@given(st.integers(2, 40), seeds)
def test_scaling(N, seed):
    path = random_path(np.random.default_rng(seed), N, 2)
    t1 = build_area_table(path)
    t3 = build_area_table(LatticePath(3 * path.values))
    np.testing.assert_allclose(t3.entry(0, N), 9 * t1.entry(0, N), rtol=1e-12, atol=1e-300)


@given(st.integers(3, 40), seeds)
def test_shoelace(N, seed):
    pts = np.random.default_rng(seed).standard_normal((N, 2))
    closed = np.vstack([pts, pts[:1]])
    x, y = closed[:, 0], closed[:, 1]
    shoelace = 0.5 * np.sum(x[:-1] * y[1:] - x[1:] * y[:-1])
    # translation by the start point does not change the area
    t = build_area_table(LatticePath(closed))
    assert t.entry(0, N)[0, 1] == pytest.approx(shoelace, abs=1e-11)


def test_pair_area_examples(rng):
    p = random_path(rng, 15, 2)
    pair = pair_area_table(p, p)
    t = build_area_table(p)
    for i in range(16):
        for j in range(i, 16):
            np.testing.assert_allclose(pair.entry(i, j), t.entry(i, j), atol=1e-12)
    const = pair_area_table(p, LatticePath(np.ones((16, 2))))
    assert not np.any(const.entries)
    with pytest.raises(ValueError):
        pair_area_table(p, random_path(rng, 10, 2))


@given(seeds)
def test_pair_area_recurring_path(seed):
    rng = np.random.default_rng(seed)
    p1 = random_path(rng, 24, 2)
    v2 = rng.standard_normal((25, 2))
    knots = [0, 3, 7, 8, 15, 24]
    v2[knots] = [1.5, -0.5]
    pair = pair_area_table(p1, LatticePath(v2))
    total = sum(pair.entry(a, b) for a, b in zip(knots[:-1], knots[1:]))
    np.testing.assert_allclose(pair.entry(0, 24), total, atol=1e-11)


def test_rough_norm_examples():
    const = LatticePath([(1, 1)] * 4)
    assert rough_norm_sq(const, build_area_table(const)) == 0
    p = LatticePath([0, 1, 0, 1])
    assert rough_norm_sq(p, build_area_table(p)) == 3
    corner = LatticePath([(0, 0), (1, 0), (1, 1)])
    assert rough_norm_sq(corner, build_area_table(corner)) == pytest.approx(2 + 1 / math.sqrt(2), rel=1e-15)


def test_area_at_real_matches_knots(rng):
    p = random_path(rng, 12, 3)
    t = build_area_table(p)
    comp = area_at_real(p, np.array([0.0, 2.0, 5.0]), np.array([12.0, 9.0, 5.0]))
    np.testing.assert_allclose(comp[0], t.components(0, 12), atol=1e-12)
    np.testing.assert_allclose(comp[1], t.components(2, 9), atol=1e-12)
    assert not np.any(comp[2])


def test_area_at_real_inside_segment_is_zero(rng):
    p = random_path(rng, 5, 2)
    assert np.allclose(area_at_real(p, 1.2, 1.9), 0, atol=1e-14)


@given(st.integers(2, 30), seeds, st.lists(st.floats(0, 1), min_size=1, max_size=15))
def test_real_partition_area_never_beats_dp(N, seed, raw):
    p = random_path(np.random.default_rng(seed), N, 2)
    times = np.unique(np.concatenate([[0.0], np.asarray(raw) * N, [N]]))
    assert area_partition_sum(p, times) <= table_one_var(build_area_table(p)).power_sum + 1e-9


@given(st.integers(3, 70), seeds)
def test_key_inequality_for_area(N, seed):
    p = random_path(np.random.default_rng(seed), N, 2)
    t = build_area_table(p)
    knots = dyadic_knots(N, 1)
    blocks = sum(table_one_var(t, IntervalZ(a, b)).power_sum for a, b in zip(knots[:-1], knots[1:]))
    knot_area = table_one_var(build_area_table(LatticePath(p.values[knots]))).power_sum
    coarse_area = table_one_var(build_area_table(coarsen_at_knots(p, knots))).power_sum
    head = table_one_var(t, IntervalZ(0, knots[0])).power_sum
    two_var = p_var_exact(p, 2).power_sum
    lhs = table_one_var(t).power_sum
    assert lhs <= (head + 2 * two_var + 2 * blocks + 2 * knot_area) * (1 + 1e-12)
    assert knot_area <= coarse_area * (1 + 1e-12)
