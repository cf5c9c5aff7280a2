"""Block-Hankel constructors and the three moment criteria."""

import numpy as np
import pytest

from conftest import rand_measure
from matmoments import (MomentSequence, block_hankel, check_hamburger,
                        check_hausdorff, check_stieltjes, forward_moments,
                        momentsequence_from_json, momentsequence_to_json,
                        operator_check)

I2 = np.eye(2)


def plus_minus_one_moments(degree):
    # forward moments of (1/2) I delta_{-1} + (1/2) I delta_{+1}, by hand
    return MomentSequence([I2 if p % 2 == 0 else 0 * I2 for p in range(degree + 1)])


def test_block_hankel_identity_example():
    seq = MomentSequence([I2, 0 * I2, I2])
    h = block_hankel(seq, 1, 0)
    assert np.array_equal(h, np.eye(4))


def test_block_hankel_shift_one_zero_block():
    seq = MomentSequence([I2, 0 * I2, I2])
    assert np.array_equal(block_hankel(seq, 0, 1), 0 * I2)


def test_block_hankel_single_block():
    s0 = np.array([[2.0, 1.0], [1.0, 3.0]])
    seq = MomentSequence([s0, 0 * I2])
    assert np.array_equal(block_hankel(seq, 0, 0), s0)


def test_block_hankel_degree_overflow():
    seq = MomentSequence([I2, 0 * I2, I2])
    with pytest.raises(ValueError, match="degree overflow"):
        block_hankel(seq, 1, 1)


def test_block_hankel_exactly_symmetric():
    rng = np.random.default_rng(3)
    mats = rng.standard_normal((7, 3, 3))
    seq = MomentSequence(0.5 * (mats + np.transpose(mats, (0, 2, 1))))
    h = block_hankel(seq, 3, 0)
    assert np.array_equal(h, h.T)


def test_hamburger_passes_on_measure_moments():
    rep = check_hamburger(plus_minus_one_moments(4))
    assert rep.passed
    assert rep.tested_orders == [0, 1, 2]
    assert rep.failing_order is None


def test_hamburger_fails_with_golden_ratio_eigenvalue():
    rep = check_hamburger(MomentSequence([I2, I2, 0 * I2]))
    assert not rep.passed
    assert rep.failing_order == 1
    assert rep.min_eigenvalue == pytest.approx((1 - np.sqrt(5)) / 2)


def test_hamburger_all_zero_passes():
    rep = check_hamburger(MomentSequence([0 * I2] * 5))
    assert rep.passed and rep.min_eigenvalue == 0.0


def test_stieltjes_passes_point_mass_at_one():
    seq = MomentSequence([I2] * 5)   # I * delta_1: S_p = I
    assert check_stieltjes(seq).passed


def test_stieltjes_fails_on_signed_support():
    rep = check_stieltjes(plus_minus_one_moments(3))
    assert not rep.passed
    assert rep.min_eigenvalue == pytest.approx(-1.0)


def test_stieltjes_all_zero_passes():
    assert check_stieltjes(MomentSequence([0 * I2] * 4)).passed


def test_hausdorff_passes_point_mass_at_half():
    seq = MomentSequence([2.0 ** (-p) * I2 for p in range(5)])
    assert check_hausdorff(seq).passed


def test_hausdorff_fails_outside_unit_interval():
    seq = MomentSequence([I2, 2.0 * I2, 4.0 * I2])   # I * delta_2
    rep = check_hausdorff(seq)
    assert not rep.passed
    assert rep.min_eigenvalue <= -1.0


def test_hausdorff_boundary_atom_at_zero():
    seq = MomentSequence([I2, 0 * I2, 0 * I2])
    assert check_hausdorff(seq).passed


def test_hausdorff_needs_degree_two():
    with pytest.raises(ValueError, match="degree too small"):
        check_hausdorff(MomentSequence([I2, I2]))


def test_operator_check_rank_one_reduction():
    # n = 1 with A_i = [[1]] reduces to the scalar Hankel of the entries
    seq = MomentSequence([[[1.0]], [[0.5]], [[2.0]]])
    rep = operator_check(seq, [np.eye(1), np.eye(1)], "hamburger")
    scalar = np.array([[1.0, 0.5], [0.5, 2.0]])
    assert rep.passed == (np.linalg.eigvalsh(scalar)[0] >= 0)
    assert rep.min_eigenvalue == pytest.approx(np.linalg.eigvalsh(scalar)[0])


def test_operator_check_identity_tuple_passes_hamburger():
    rep = operator_check(plus_minus_one_moments(2), [I2, I2], "hamburger")
    assert rep.passed
    assert rep.min_eigenvalue == pytest.approx(2.0)


def test_operator_check_identity_tuple_fails_stieltjes():
    rep = operator_check(plus_minus_one_moments(3), [I2, I2], "stieltjes")
    assert not rep.passed
    assert rep.min_eigenvalue == pytest.approx(-2.0)


def test_operator_check_degree_overflow():
    with pytest.raises(ValueError, match="degree overflow"):
        operator_check(plus_minus_one_moments(2), [I2, I2], "stieltjes")


@pytest.mark.parametrize("checker,lo,hi", [
    (check_hamburger, -2.0, 2.0),
    (check_stieltjes, 0.0, 2.0),
    (check_hausdorff, 0.0, 1.0),
])
def test_criteria_soundness_on_random_measures(checker, lo, hi):
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        mu = rand_measure(rng, n, int(rng.integers(1, 4)), lo, hi)
        assert checker(forward_moments(mu, 8)).passed


def test_operator_check_congruence_property():
    # whenever the block-Hankel test passes, every tuple passes the
    # operator version: the scalar matrix is a congruence of a PSD matrix
    rng = np.random.default_rng(99)
    for _ in range(5):
        n = int(rng.integers(1, 4))
        mu = rand_measure(rng, n, int(rng.integers(1, 4)), -2.0, 2.0)
        seq = forward_moments(mu, 6)
        assert check_hamburger(seq).passed
        for _ in range(10):
            m = int(rng.integers(0, 4))
            ops = [rng.standard_normal((n, n)) for _ in range(m + 1)]
            assert operator_check(seq, ops, "hamburger").passed


def test_moment_sequence_rejects_asymmetric():
    with pytest.raises(ValueError, match="not symmetric"):
        MomentSequence([[[0.0, 1.0], [0.0, 0.0]]])


def test_json_round_trip_and_report_fields():
    seq = plus_minus_one_moments(3)
    back = momentsequence_from_json(momentsequence_to_json(seq))
    assert np.array_equal(back.S, seq.S)
    rep = check_stieltjes(seq).to_json()
    assert set(rep) == {"pass", "min_eigenvalue", "tested_orders", "failing_order"}
    with pytest.raises(ValueError, match="moments"):
        momentsequence_from_json({"n": 2, "moments": [[[1.0]]]})
