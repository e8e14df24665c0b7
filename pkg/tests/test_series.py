import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughsum.lattice_path import IntervalZ, increment
from roughsum.series import (
    BlockPlan,
    CoefficientSeq,
    FourierSystem,
    all_digit_strings,
    block_reparametrize,
    coeffs_area_blowup,
    coeffs_finite2var_example,
    coeffs_weyl_example,
    digits_of,
    discrete_paths,
    fourier_block_path,
    haar_ons,
    identity_ons,
    load_coeffs,
    partial_sum_path,
    random_digits,
    save_coeffs,
    walk_increments,
    walk_path,
    zeta_error,
    zeta_sample,
)


def test_partial_sum_examples():
    p = partial_sum_path(FourierSystem(), CoefficientSeq([1, 0, 0, 0]), 0.0)
    np.testing.assert_array_equal(p.values, [[1, 0]] * 4)
    p = partial_sum_path(identity_ons(3), CoefficientSeq([1, 1, 1]), 1)
    np.testing.assert_allclose(p.values[:, 0], [math.sqrt(3)] * 3)
    p = partial_sum_path(FourierSystem(), CoefficientSeq([0, 1]), math.pi / 2)
    np.testing.assert_allclose(p.values[1], [0, 1], atol=1e-15)


def test_partial_sum_domain_errors():
    with pytest.raises(ValueError):
        partial_sum_path(identity_ons(3), CoefficientSeq([1, 1, 1]), 4)
    with pytest.raises(ValueError):
        partial_sum_path(identity_ons(3), CoefficientSeq([1, 1, 1]), 1.5)
    with pytest.raises(ValueError):
        partial_sum_path(FourierSystem(), CoefficientSeq([1, 1]), 10.0)


def test_haar_ons():
    a, b = haar_ons(16, 7), haar_ons(16, 7)
    np.testing.assert_array_equal(a.Q, b.Q)
    assert a.orthonormality_defect() < 1e-9
    assert haar_ons(2, 3).orthonormality_defect() < 1e-12
    with pytest.raises(ValueError):
        haar_ons(1, 0)


def test_discrete_increment_energy_identity(rng):
    system = haar_ons(32, 1)
    c = CoefficientSeq(rng.standard_normal(20))
    paths = discrete_paths(system, c)
    for a, b in [(0, 19), (3, 7), (10, 11)]:
        mean = np.mean([np.sum(increment(p, IntervalZ(a, b)) ** 2) for p in paths])
        assert mean == pytest.approx(np.sum(np.abs(c.coeffs[a + 1: b + 1]) ** 2), rel=1e-10)


def test_block_reparametrize_examples():
    c = np.zeros(9)
    c[[3, 4]] = 1
    b, blocks = block_reparametrize(CoefficientSeq(c))
    assert b.coeffs[1] == pytest.approx(math.sqrt(2))
    assert blocks[:3] == [(2, 2), (3, 4), (5, 8)]
    assert not np.any(block_reparametrize(CoefficientSeq(np.zeros(9)))[0].coeffs)
    c = np.zeros(9)
    c[3] = 5
    assert block_reparametrize(CoefficientSeq(c))[0].coeffs[1] == 5


@given(st.integers(3, 200), st.integers(0, 2**32 - 1))
def test_block_reparametrize_preserves_energy(n, seed):
    c = CoefficientSeq(np.random.default_rng(seed).standard_normal(n))
    b, _ = block_reparametrize(c)
    assert b.energy() == pytest.approx(np.sum(np.abs(c.coeffs[2:]) ** 2), rel=1e-12)


def test_finite2var_example():
    c = coeffs_finite2var_example(20)
    assert c.coeffs[3] == c.coeffs[4] == pytest.approx(1 / math.sqrt(2))
    for n in range(1, 21):
        assert np.sum(np.abs(c.coeffs[(1 << n) + 1: (1 << (n + 1)) + 1]) ** 2) == pytest.approx(1 / n**2)
    k = np.arange(len(c))
    w = np.log2(k + 1) * np.abs(c.coeffs) ** 2
    partial = [w[: (1 << (n + 1)) + 1].sum() for n in range(1, 21)]
    harmonic = np.cumsum(1 / np.arange(1, 21))
    # block n contributes about 1/n, so the partial sums track the harmonic numbers
    assert np.all(np.diff(partial) > 0)
    assert partial[-1] > harmonic[-1]


def test_fourier_block_closed_form():
    direct = fourier_block_path(2, math.pi, closed_form=False)
    closed = fourier_block_path(2, math.pi, closed_form=True)
    np.testing.assert_allclose(closed.values, direct.values, atol=1e-12)
    np.testing.assert_array_equal(closed.values[0], [0, 0])


@given(st.floats(1e-3, 2 * math.pi - 1e-3), st.integers(1, 9))
def test_fourier_block_closed_form_sweep(theta, n):
    direct = fourier_block_path(n, theta, closed_form=False).values
    closed = fourier_block_path(n, theta, closed_form=True).values
    scale = max(1.0, np.max(np.abs(direct)))
    assert np.max(np.abs(closed - direct)) <= 1e-9 * scale


def test_fourier_block_matches_series():
    n, theta = 3, 1.1
    c = coeffs_finite2var_example(n)
    full = partial_sum_path(FourierSystem(), c, theta)
    block = fourier_block_path(n, theta)
    np.testing.assert_allclose(block.values, full.values[8:17] - full.values[8], atol=1e-13)


def test_fourier_block_at_zero_falls_back():
    p = fourier_block_path(3, 0.0)
    assert p.values[-1][0] == pytest.approx(8 / (3 * 2**1.5))


def test_weyl_example():
    ex = coeffs_weyl_example(lambda n: math.log2(n) ** 3, 2, 200)
    r = ex.r
    assert ex.convergent_sums()[-1] <= 2 / math.sqrt(r[0])
    assert ex.divergent_sums()[-1] >= math.sqrt(r[-2]) - math.sqrt(r[1])
    with pytest.raises(ValueError):
        coeffs_weyl_example(lambda n: 1.0, 2, 50)


def test_weyl_coefficients_materialise():
    ex = coeffs_weyl_example(lambda n: math.log2(n) ** 3, 2, 6)
    c = ex.coefficients()
    b, _ = block_reparametrize(c)
    np.testing.assert_allclose(b.coeffs[2:7] ** 2, ex.inv_a, rtol=1e-12)


def test_area_blowup_family():
    with pytest.raises(ValueError):
        coeffs_area_blowup(9)
    with pytest.raises(OverflowError):
        coeffs_area_blowup(3, M=100)
    f3, f4 = coeffs_area_blowup(3, M=8192), coeffs_area_blowup(4, M=8192)
    assert np.max(np.linalg.norm(f4.values - f3.values, axis=1)) <= 2 * 2.0**-4
    f1 = coeffs_area_blowup(1)
    # n = 1 traces a circle of radius 1/2 four times
    np.testing.assert_allclose(np.linalg.norm(f1.values, axis=1), 0.5, rtol=1e-12)


def test_coefficient_csv_roundtrip(tmp_path):
    c = CoefficientSeq([0, 1 + 2j, 0, -0.5])
    save_coeffs(c, tmp_path / "c.csv")
    np.testing.assert_array_equal(load_coeffs(tmp_path / "c.csv").coeffs, c.coeffs)
    (tmp_path / "bad.csv").write_text("1,abc,0\n")
    with pytest.raises(ValueError):
        load_coeffs(tmp_path / "bad.csv")


def test_zeta_examples():
    plan = BlockPlan((1,), (1,))
    assert zeta_sample(plan, 1, 1, [0]) == 1
    assert zeta_sample(plan, 1, 1, [1]) == -1
    with pytest.raises(ValueError):
        zeta_sample(BlockPlan((2,), (3,)), 1, 2, [0, 1, 0, 1])


@pytest.mark.parametrize("nk", [1, 2, 5, 10])
def test_zeta_moments_exhaustive(nk):
    z = zeta_sample(BlockPlan((1,), (nk,)), 1, 1, all_digit_strings(nk))
    assert abs(np.mean(z)) < 1e-12
    assert np.mean(z**2) == pytest.approx(0.5 if nk > 1 else 1.0)


def test_zeta_independence_exhaustive():
    plan = BlockPlan((2, 2), (2, 3))
    digits = all_digit_strings(plan.total_digits)
    vals = np.stack([zeta_sample(plan, k, i, digits) for k in (1, 2) for i in (1, 2)], axis=1)
    vals = np.round(vals, 12)
    joint = {}
    for row in map(tuple, vals):
        joint[row] = joint.get(row, 0) + 1
    marg = [dict(zip(*np.unique(vals[:, j], return_counts=True))) for j in range(4)]
    total = len(vals)
    for key in product(*[list(m) for m in marg]):
        expected = np.prod([marg[j][key[j]] / total for j in range(4)])
        assert joint.get(key, 0) / total == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("nk", [3, 6, 10])
def test_zeta_uniform_error(nk):
    plan = BlockPlan((3, 2), (4, nk))
    theta = np.random.default_rng(nk).random(1000)
    for i in (1, 2):
        err, bound = zeta_error(plan, 2, i, theta)
        assert np.all(err <= bound)


def test_digits_of():
    np.testing.assert_array_equal(digits_of(0.625, 4)[0], [1, 0, 1, 0])
    with pytest.raises(ValueError):
        digits_of(1.0, 4)


def test_walk_examples():
    p = walk_path(4, 3, np.zeros(12, dtype=np.int8))
    np.testing.assert_allclose(p.values[:, 0], np.arange(5) / 2)
    digits = random_digits(6, seed=3)
    np.testing.assert_allclose(walk_increments(6, 1, digits), (1 - 2 * digits) / math.sqrt(6))
    ends = walk_increments(4, 2, all_digit_strings(8)).sum(axis=1)
    assert abs(ends.mean()) < 1e-12
    with pytest.raises(ValueError):
        walk_path(4, 3, np.zeros(5))


def test_random_digits_deterministic():
    np.testing.assert_array_equal(random_digits(50, 9, size=3), random_digits(50, 9, size=3))
