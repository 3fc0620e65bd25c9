import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hierarchon.cyclo import CycloScalar, conductor
from hierarchon.exactmat import (
    ExactMatrix,
    FingerprintContext,
    ScaledUnitary,
    conjugate_action,
    from_interchange,
    to_interchange,
)


def zmat(d):
    w = CycloScalar.omega(d)
    return ExactMatrix.diag(d, [w ** z for z in range(d)])


def xmat(d):
    grid = [[1 if i == (j + 1) % d else 0 for j in range(d)] for i in range(d)]
    return ExactMatrix.from_scalars(d, grid)


def fmat(d):
    """Unnormalised DFT, entries omega**(z*y); a ScaledUnitary with scale2 = d."""
    w = CycloScalar.omega(d)
    grid = [[w ** (z * y) for y in range(d)] for z in range(d)]
    return ScaledUnitary(ExactMatrix.from_scalars(d, grid), d)


def rand_mat(rng, d, m, dim, span=9):
    cond = conductor(d, m)
    return ExactMatrix(
        d, m, rng.integers(-span, span, size=(dim, dim, cond.phi)),
        int(rng.integers(1, 5)),
    )


rng = np.random.default_rng(7)


# ---------------------------------------------------------------------------
# arithmetic against the complex embedding

def test_matmul_matches_embedding():
    a = rand_mat(rng, 3, 2, 4)
    b = rand_mat(rng, 3, 2, 4)
    assert np.allclose((a @ b).to_complex(), a.to_complex() @ b.to_complex())
    assert np.allclose((a + b).to_complex(), a.to_complex() + b.to_complex())
    assert np.allclose((a - b).to_complex(), a.to_complex() - b.to_complex())


def test_mixed_conductor_product_promotes():
    a = rand_mat(rng, 3, 1, 3)
    b = rand_mat(rng, 3, 2, 3)
    prod = a @ b
    assert prod.m == 2
    assert np.allclose(prod.to_complex(), a.to_complex() @ b.to_complex())


def test_dagger_is_conjugate_transpose():
    a = rand_mat(rng, 5, 1, 4)
    assert np.allclose(a.dagger().to_complex(), a.to_complex().conj().T)


def test_scale_by_scalar():
    a = rand_mat(rng, 3, 2, 3)
    s = CycloScalar(3, 2, [1, -2, 0, 3, 0, 1], 5)
    got = a.scale(s)
    z = np.exp(2j * np.pi / 9)
    sval = sum(n * z ** e for e, n in enumerate(s.nums)) / s.den
    assert np.allclose(got.to_complex(), sval * a.to_complex())


def test_object_dtype_path_kicks_in():
    big = 2 ** 45
    nums = np.zeros((2, 2, 2), dtype=np.int64)
    nums[0, 0, 0] = big
    nums[1, 1, 1] = big
    a = ExactMatrix(3, 1, nums)
    prod = a @ a
    assert prod.nums.dtype == object
    assert prod.entry(0, 0) == CycloScalar(3, 1, [big * big, 0])
    # and back to int64 once values shrink
    shrunk = prod.scale_q(Fraction(1, big * big))
    assert shrunk.nums.dtype == np.int64


def test_pauli_relation_zx():
    d = 3
    Z, X = zmat(d), xmat(d)
    w = CycloScalar.omega(d)
    assert Z @ X == (X @ Z).scale(w)
    assert Z.pow_int(d).is_identity()
    assert X.pow_int(d).is_identity()


# ---------------------------------------------------------------------------
# canonical representatives

def test_canonical_strips_phase():
    Z = zmat(3)
    wZ = Z.scale(CycloScalar.omega(3))
    assert Z.canonical_rep() == wZ.canonical_rep()
    want = ExactMatrix.diag(3, [1, CycloScalar.omega(3), CycloScalar.omega(3) ** 2])
    assert Z.canonical_rep() == want


def test_canonical_of_dft_normalises_corner():
    F = fmat(3).mat
    c = F.canonical_rep()
    assert c.entry(0, 0) == 1
    assert c == F  # corner already 1
    assert F.scale_zeta(5).canonical_rep() == c


def test_canonical_idempotent_and_phase_invariant():
    for _ in range(6):
        a = rand_mat(rng, 3, 2, 3)
        if a.is_zero():
            continue
        c = a.canonical_rep()
        assert c.canonical_rep() == c
        e = int(rng.integers(0, 9))
        assert a.scale_zeta(e).canonical_rep() == c
        assert a.scale_q(Fraction(-7, 3)).canonical_rep() == c


def test_canonical_with_nonmonomial_leading_entry():
    w = CycloScalar.omega(3)
    a = ExactMatrix.from_scalars(3, [[1 + w, 2], [w, 1]])
    c = a.canonical_rep()
    assert c.entry(0, 0) == 1
    assert c.entry(1, 0) == w / (1 + w)
    assert c.canonical_rep() == c


def test_zero_matrix_has_no_canonical():
    with pytest.raises(ValueError):
        ExactMatrix.zeros(3, 1, 2).canonical_rep()


# ---------------------------------------------------------------------------
# scaled unitaries

def test_dft_is_scaled_unitary():
    for d in (3, 5, 7):
        F = fmat(d)
        assert F.verify()


def test_verify_rejects_nonunitary():
    bad = ScaledUnitary(ExactMatrix.from_scalars(3, [[1, 1], [0, 1]]), 1)
    with pytest.raises(ValueError):
        bad.verify()


def test_conjugation_of_z_by_dft():
    d = 3
    F = fmat(d)
    Z, X = zmat(d), xmat(d)
    assert conjugate_action(F, Z) == X.pow_int(d - 1)  # X^-1
    assert conjugate_action(F, X) == Z
    ident = ScaledUnitary.exact(ExactMatrix.identity(d, d))
    assert conjugate_action(ident, Z) == Z
    assert conjugate_action(F, ExactMatrix.identity(d, d)).is_identity()


def test_conjugation_preserves_products():
    d = 3
    F = fmat(d)
    a = rand_mat(rng, 3, 1, 3)
    b = rand_mat(rng, 3, 1, 3)
    lhs = conjugate_action(F, a @ b)
    rhs = conjugate_action(F, a) @ conjugate_action(F, b)
    assert lhs == rhs


def test_f_squared_is_flip():
    d = 3
    F = fmat(d)
    M = F.mat @ F.mat
    flip = ExactMatrix.from_scalars(
        3, [[d if (i + j) % d == 0 else 0 for j in range(d)] for i in range(d)]
    )
    assert M == flip


# ---------------------------------------------------------------------------
# interchange

def test_interchange_roundtrip_bit_exact():
    F = fmat(3)
    doc = to_interchange(F, 1)
    blob = json.dumps(doc)
    su, n = from_interchange(json.loads(blob))
    assert n == 1
    assert su.scale2 == F.scale2
    assert su.mat == F.mat
    assert su.mat.to_key() == F.mat.to_key()


def test_interchange_carries_fractions():
    w = CycloScalar.omega(3)
    mat = ExactMatrix.diag(3, [w / 3, (1 + w) / 5, 1])
    # not unitary; wrap loosely just to serialise
    su = ScaledUnitary(mat, Fraction(1))
    doc = to_interchange(su, 1)
    # hand-check one cell: (1+w)/5 -> [[1,5],[1,5]]
    assert doc["entries"][4] == [[1, 5], [1, 5]]
    back, _ = from_interchange(doc)
    assert back.mat == mat


def test_interchange_rejects_bad_conductor():
    doc = to_interchange(fmat(3), 1)
    doc["conductor"] = 6
    with pytest.raises(ValueError):
        from_interchange(doc)


# ---------------------------------------------------------------------------
# fingerprints

def test_fingerprint_matches_on_equal_values():
    ctx = FingerprintContext(3, 5)
    Z = zmat(3)
    assert ctx.key(Z) == ctx.key(Z.scale(CycloScalar.omega(3)))
    assert ctx.key(Z) == ctx.key(Z.scale_q(Fraction(3, 7)))
    # promoted copies key identically: the evaluation commutes with promotion
    assert ctx.key(Z) == ctx.key(Z.promote(3))


def test_fingerprint_separates_distinct_gates():
    ctx = FingerprintContext(3, 5)
    Z, X = zmat(3), xmat(3)
    seen = {ctx.key(Z), ctx.key(X), ctx.key(Z @ X), ctx.key(fmat(3).mat)}
    assert len(seen) == 4


def test_fingerprint_zero_slot_fallback():
    ctx = FingerprintContext(3, 2)
    p = ctx.primes[0]
    a = ExactMatrix.from_scalars(3, [[p, 1], [0, 1]])
    b = a.scale_q(2)
    assert ctx.key(a) == ctx.key(b)
    c = ExactMatrix.from_scalars(3, [[p, 2], [0, 1]])
    assert ctx.key(a) != ctx.key(c)


def test_fingerprint_primes_are_usable():
    for d, m in ((3, 5), (5, 3), (7, 2)):
        ctx = FingerprintContext(d, m)
        for p in ctx.primes:
            assert p < 2 ** 23 and (p - 1) % d ** m == 0
        assert ctx.primes[0] != ctx.primes[1]
        # generator tables really have multiplicative order d**m
        tab = ctx.powvec(0, m)
        assert tab[0] == 1
        if conductor(d, m).phi > 1:
            assert tab[1] != 1
