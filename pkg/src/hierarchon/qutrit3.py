"""Two-qutrit third-level survey over the diagonal-times-X normal form.

A Clifford of the form w^x D[w^phi] Z^a X^alpha, with phi a homogeneous
quadratic, is recorded as a septuple of Z_d values: the three quadratic
coefficients, the Z part and the X part (the phase x never matters).
Commutation of two such gates reduces to two linear congruences plus a phase
value c, so the conjugate tuples of third-level gates can be enumerated
combinatorially.  Each tuple is then tested for a Lagrangian semibasis in
the kernel of its 3x4 quadratic coefficient matrix; finding one certifies
the underlying gate semi-Clifford.

The survey covers tuples in the normal form only; the symplectic reduction
that carries an arbitrary third-level tuple into this form is taken as
given rather than recomputed, and the report says so.
"""

from collections import namedtuple
from fractions import Fraction

import numpy as np

from . import _kernels
from .cyclo import CycloScalar, conductor
from .exactmat import ExactMatrix

Septuple = namedtuple("Septuple", "d1 d2 d3 a1 a2 alpha1 alpha2")

TupleQuadruple = namedtuple("TupleQuadruple", "u v s t")

SCOPE = (
    "tuples in the diagonal-times-X normal form; reduction of arbitrary "
    "third-level tuples into this form is assumed, not recomputed"
)


def septuple_from_index(i, d=3):
    digits = []
    for pw in range(6, -1, -1):
        digits.append((i // d ** pw) % d)
    return Septuple(*digits)


def septuple_index(s, d=3):
    out = 0
    for comp in s:
        out = out * d + comp % d
    return out


def commutation_check(s1, s2, d=3):
    """c with U V = w^c V U, or None when no such phase exists.

    The two linear congruences come from pushing the X part of each gate
    through the other's quadratic; once they hold the leftover commutator
    is the plain phase c = psi(alpha) + a.beta - phi(beta) - b.alpha.
    """
    eq1 = (
        2 * s1.d1 * s2.alpha1 + s1.d3 * s2.alpha2
        - 2 * s2.d1 * s1.alpha1 - s2.d3 * s1.alpha2
    ) % d
    eq2 = (
        s1.d3 * s2.alpha1 + 2 * s1.d2 * s2.alpha2
        - s2.d3 * s1.alpha1 - 2 * s2.d2 * s1.alpha2
    ) % d
    if eq1 or eq2:
        return None
    psi_a = (
        s2.d1 * s1.alpha1 * s1.alpha1
        + s2.d2 * s1.alpha2 * s1.alpha2
        + s2.d3 * s1.alpha1 * s1.alpha2
    )
    phi_b = (
        s1.d1 * s2.alpha1 * s2.alpha1
        + s1.d2 * s2.alpha2 * s2.alpha2
        + s1.d3 * s2.alpha1 * s2.alpha2
    )
    a_dot = s1.a1 * s2.alpha1 + s1.a2 * s2.alpha2
    b_dot = s2.a1 * s1.alpha1 + s2.a2 * s1.alpha2
    return (psi_a + a_dot - phi_b - b_dot) % d


def quadruple_relations(q, d=3):
    """The six c-values for (UV, ST, US, UT, VS, VT).

    A conjugate tuple must come out (1, 1, 0, 0, 0, 0); None marks a pair
    that fails the linear congruences outright.
    """
    return (
        commutation_check(q.u, q.v, d),
        commutation_check(q.s, q.t, d),
        commutation_check(q.u, q.s, d),
        commutation_check(q.u, q.t, d),
        commutation_check(q.v, q.s, d),
        commutation_check(q.v, q.t, d),
    )


def septuple_matrix(s, d=3):
    """The gate D[w^phi] Z^a X^alpha as an exact matrix, wire 1 most significant."""
    w = CycloScalar.omega(d)
    zero = CycloScalar.from_rational(d, Fraction(0))
    grid = [[zero] * (d * d) for _ in range(d * d)]
    for z1 in range(d):
        for z2 in range(d):
            w1, w2 = (z1 + s.alpha1) % d, (z2 + s.alpha2) % d
            e = (
                s.d1 * w1 * w1 + s.d2 * w2 * w2 + s.d3 * w1 * w2
                + s.a1 * w1 + s.a2 * w2
            ) % d
            grid[w1 * d + w2][z1 * d + z2] = w ** e
    return ExactMatrix.from_scalars(d, grid)


def kernel_semibasis_check(q):
    """Search the kernel of the quadratic coefficient matrix for a semibasis.

    Returns (found, witness); the witness is a pair of independent kernel
    vectors with vanishing symplectic product, coordinates (p1, q1, p2, q2).
    """
    mat = [
        [q.u.d1, q.v.d1, q.s.d1, q.t.d1],
        [q.u.d2, q.v.d2, q.s.d2, q.t.d2],
        [q.u.d3, q.v.d3, q.s.d3, q.t.d3],
    ]
    witness = _kernels.isotropic_plane_witness(mat)
    return witness is not None, witness


def _tables(d=3):
    n = d ** 7
    idx = np.arange(n)
    rem = idx.copy()
    digs = []
    for pw in range(6, -1, -1):
        digs.append((rem // d ** pw).astype(np.int16))
        rem = rem % d ** pw
    d1, d2, d3, a1, a2, x1, x2 = digs
    o = np.multiply.outer
    eq1 = (2 * o(d1, x1) + o(d3, x2) - 2 * o(x1, d1) - o(x2, d3)) % d
    eq2 = (o(d3, x1) + 2 * o(d2, x2) - o(x1, d3) - 2 * o(x2, d2)) % d
    lin = (eq1 == 0) & (eq2 == 0)
    c = (
        o(x1 * x1, d1) + o(x2 * x2, d2) + o(x1 * x2, d3)
        + o(a1, x1) + o(a2, x2)
        - o(d1, x1 * x1) - o(d2, x2 * x2) - o(d3, x1 * x2)
        - o(x1, a1) - o(x2, a2)
    ) % d
    colcode = (d1 + 3 * d2 + 9 * d3).astype(np.int64)
    return lin, c, colcode


def _pair_list(d=3):
    lin, c, colcode = _tables(d)
    pairs = np.argwhere(lin & (c == 1))
    ok0 = (lin & (c == 0)).astype(np.uint8)
    return pairs, ok0, colcode


def enumerate_tuples(d=3, stride=1):
    """Yield conjugate tuples (U, V, S, T) in a fixed lexicographic order.

    stride keeps every stride-th leading pair, the same stratification the
    survey uses for its quick tier.
    """
    if d != 3:
        raise ValueError("the tuple survey is specific to qutrits")
    if stride < 1:
        raise ValueError("stride must be positive")
    pairs, ok0, _ = _pair_list(d)
    pu, pv = pairs[:, 0], pairs[:, 1]
    ok0 = ok0.astype(bool)
    for r in range(0, len(pairs), stride):
        valid = ok0[pu[r]] & ok0[pv[r]]
        good = np.nonzero(valid[pu] & valid[pv])[0]
        u = septuple_from_index(int(pu[r]))
        v = septuple_from_index(int(pv[r]))
        for q in good:
            yield TupleQuadruple(
                u, v,
                septuple_from_index(int(pu[q])),
                septuple_from_index(int(pv[q])),
            )


_LUT = {}


def _semibasis_table():
    if "lut" not in _LUT:
        _LUT["lut"] = _kernels.semibasis_lut()
    return _LUT["lut"]


def survey(jobs=1, stride=1):
    """Tally the kernel-semibasis check over every enumerated tuple.

    stride keeps every stride-th leading pair; jobs splits the row range
    into chunks whose histograms add, so any jobs value produces the same
    report.  Failures list up to twenty offending tuples.
    """
    if jobs < 1:
        raise ValueError("jobs must be positive")
    if stride < 1:
        raise ValueError("stride must be positive")
    pairs, ok0, colcode = _pair_list()
    pu = np.ascontiguousarray(pairs[:, 0])
    pv = np.ascontiguousarray(pairs[:, 1])
    stkey = colcode[pu] + 27 * colcode[pv]
    nrows = (len(pairs) + stride - 1) // stride
    hist = np.zeros((729, 729), dtype=np.int64)
    per = (nrows + jobs - 1) // jobs
    for chunk in range(jobs):
        i0, i1 = chunk * per, min((chunk + 1) * per, nrows)
        if i0 >= i1:
            continue
        hist += _kernels.survey_join(
            pu, pv, ok0, stkey, i0 * stride, (i1 - 1) * stride + 1, stride
        )
    lutm = _semibasis_table().reshape(729, 729)  # [suffix, prefix]
    total = int(hist.sum())
    passed = int((hist * lutm.T).sum())
    failures = []
    if passed != total:
        bad = {(int(p), int(sfx)) for p, sfx in np.argwhere(hist * (1 - lutm.T) > 0)}
        ok0b = ok0.astype(bool)
        for r in range(0, len(pairs), stride):
            valid = ok0b[pu[r]] & ok0b[pv[r]]
            good = np.nonzero(valid[pu] & valid[pv])[0]
            for q in good:
                if (int(stkey[r]), int(stkey[q])) in bad:
                    failures.append(
                        {
                            "u": list(septuple_from_index(int(pu[r]))),
                            "v": list(septuple_from_index(int(pv[r]))),
                            "s": list(septuple_from_index(int(pu[q]))),
                            "t": list(septuple_from_index(int(pv[q]))),
                        }
                    )
                    if len(failures) == 20:
                        break
            if len(failures) == 20:
                break
    return {
        "d": 3,
        "total": total,
        "passed": passed,
        "failed": total - passed,
        "failures": failures,
        "pairs": len(pairs),
        "stride": stride,
        "scope": SCOPE,
    }
