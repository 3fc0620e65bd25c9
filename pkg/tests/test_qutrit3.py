"""Septuple algebra against exact matrices, and the two-qutrit tuple survey."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierarchon.qutrit3 import (
    Septuple,
    TupleQuadruple,
    commutation_check,
    enumerate_tuples,
    kernel_semibasis_check,
    quadruple_relations,
    septuple_from_index,
    septuple_index,
    septuple_matrix,
    survey,
)

Z1 = Septuple(0, 0, 0, 1, 0, 0, 0)
X1 = Septuple(0, 0, 0, 0, 0, 1, 0)
Z2 = Septuple(0, 0, 0, 0, 1, 0, 0)
X2 = Septuple(0, 0, 0, 0, 0, 0, 1)
ZERO = Septuple(0, 0, 0, 0, 0, 0, 0)


def quad(d1, d2, d3):
    return Septuple(d1, d2, d3, 0, 0, 0, 0)


def test_zero_septuples_commute():
    assert commutation_check(ZERO, ZERO) == 0


def test_z_against_x_gives_the_weyl_phase():
    assert commutation_check(Z1, X1) == 1
    assert commutation_check(X1, Z1) == 2
    assert commutation_check(Z1, Z2) == 0
    assert commutation_check(Z1, X2) == 0


def test_failed_linear_equations_return_none():
    assert commutation_check(quad(1, 0, 0), X1) is None


@settings(max_examples=50, deadline=None)
@given(i=st.integers(0, 3 ** 7 - 1))
def test_septuple_index_round_trip(i):
    assert septuple_index(septuple_from_index(i)) == i


def _oracle_pairs(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        s1 = septuple_from_index(rng.randrange(3 ** 7))
        s2 = septuple_from_index(rng.randrange(3 ** 7))
        c = commutation_check(s1, s2)
        U, V = septuple_matrix(s1), septuple_matrix(s2)
        UV, VU = U @ V, V @ U
        matches = [e for e in range(3) if UV == VU.scale_zeta(e)]
        assert matches == ([] if c is None else [c]), (s1, s2, c, matches)


def test_commutation_matches_matrix_algebra():
    _oracle_pairs(300, seed=5)


@pytest.mark.extended
def test_commutation_matches_matrix_algebra_extended():
    _oracle_pairs(10 ** 4, seed=6)


def test_standard_tuple_is_conjugate_and_passes():
    std = TupleQuadruple(Z1, X1, Z2, X2)
    assert quadruple_relations(std) == (1, 1, 0, 0, 0, 0)
    ok, witness = kernel_semibasis_check(std)
    assert ok
    assert witness == ((1, 0, 0, 0), (0, 0, 1, 0))


def test_rank_three_quadratics_fail_the_kernel_check():
    q = TupleQuadruple(quad(1, 0, 0), quad(0, 1, 0), quad(0, 0, 1), ZERO)
    ok, witness = kernel_semibasis_check(q)
    assert not ok and witness is None


def test_two_dim_hyperbolic_kernel_fails():
    # kernel is the (p1, q1) plane, where the symplectic form is nonzero
    q = TupleQuadruple(ZERO, ZERO, quad(1, 0, 0), quad(0, 1, 0))
    ok, witness = kernel_semibasis_check(q)
    assert not ok and witness is None


@settings(max_examples=50, deadline=None)
@given(codes=st.lists(st.integers(0, 26), min_size=4, max_size=4))
def test_kernel_check_survives_pair_relabeling(codes):
    parts = [quad(c // 9, (c // 3) % 3, c % 3) for c in codes]
    q = TupleQuadruple(*parts)
    swapped = TupleQuadruple(parts[2], parts[3], parts[0], parts[1])
    assert kernel_semibasis_check(q)[0] == kernel_semibasis_check(swapped)[0]


def test_enumerate_rejects_bad_arguments():
    with pytest.raises(ValueError, match="qutrits"):
        next(enumerate_tuples(d=5))
    with pytest.raises(ValueError, match="stride"):
        next(enumerate_tuples(stride=0))
    with pytest.raises(ValueError, match="jobs"):
        survey(jobs=0)


def test_enumerated_sample_passes_everything():
    n = 0
    for q in enumerate_tuples(stride=5000):
        assert quadruple_relations(q) == (1, 1, 0, 0, 0, 0)
        assert kernel_semibasis_check(q)[0]
        n += 1
    assert n == survey(stride=5000)["total"] == 984


def test_quick_survey_tier():
    report = survey(stride=100)
    assert report["pairs"] == 174960
    assert report["total"] == 42192
    assert report["passed"] == 42192
    assert report["failed"] == 0
    assert report["failures"] == []
    assert "normal form" in report["scope"]
    assert sorted(report) == [
        "d", "failed", "failures", "pairs", "passed", "scope", "stride", "total",
    ]


def test_survey_is_deterministic_and_jobs_invariant():
    a = survey(stride=300)
    b = survey(stride=300)
    c = survey(stride=300, jobs=5)
    assert a == b == c


@pytest.mark.extended
def test_full_survey():
    report = survey()
    assert report["total"] == 4199040
    assert report["passed"] == 4199040
    assert report["failed"] == 0
    assert report["failures"] == []
