"""Symbolic Pauli group over Z_d^(2n), Weyl operators, symplectic machinery.

Conventions: Z|z> = omega^z |z>, X|z> = |z+1>, so Z X = omega X Z and
(Z^p X^q)[z+q, z] = omega^(p.(z+q)).  Wire 1 is the most significant digit of
the computational index.  A phase point is a pair of length-n tuples (p, q);
W(p,q) = omega^(-2^-1 p.q) Z^p X^q.
"""

import itertools

import numpy as np

from .cyclo import CycloScalar, conductor, root_of_unity_log
from .exactmat import ExactMatrix, ScaledUnitary, conjugate_action


class PauliElement:
    """omega^c Z^p X^q on n qudits."""

    __slots__ = ("d", "n", "c", "p", "q")

    def __init__(self, d, c, p, q):
        if d == 2:
            raise ValueError("odd prime only")
        p = tuple(int(x) % d for x in p)
        q = tuple(int(x) % d for x in q)
        if len(p) != len(q) or not p:
            raise ValueError("p and q must be equal nonempty length")
        self.d = d
        self.n = len(p)
        self.c = int(c) % d
        self.p = p
        self.q = q

    def __mul__(self, other):
        # X^q Z^p' = omega^(-q.p') Z^p' X^q
        d = self.d
        cross = sum(a * b for a, b in zip(self.q, other.p))
        return PauliElement(
            d,
            self.c + other.c - cross,
            [a + b for a, b in zip(self.p, other.p)],
            [a + b for a, b in zip(self.q, other.q)],
        )

    def inverse(self):
        d = self.d
        cross = sum(a * b for a, b in zip(self.q, self.p))
        return PauliElement(d, -self.c - cross, [-a for a in self.p],
                            [-a for a in self.q])

    def scale_omega(self, e):
        return PauliElement(self.d, self.c + e, self.p, self.q)

    def phase_point(self):
        return (self.p, self.q)

    def is_identity_point(self):
        return not any(self.p) and not any(self.q)

    def __eq__(self, other):
        return (
            isinstance(other, PauliElement)
            and (self.d, self.c, self.p, self.q)
            == (other.d, other.c, other.p, other.q)
        )

    def __hash__(self):
        return hash((self.d, self.c, self.p, self.q))

    def __repr__(self):
        return "PauliElement(d=%d, c=%d, p=%s, q=%s)" % (
            self.d, self.c, self.p, self.q,
        )


def pauli_z(d, n, i):
    """Z on wire i (1-based), identity elsewhere."""
    p = [0] * n
    p[i - 1] = 1
    return PauliElement(d, 0, p, [0] * n)


def pauli_x(d, n, i):
    q = [0] * n
    q[i - 1] = 1
    return PauliElement(d, 0, [0] * n, q)


def half(d):
    # 2^-1 mod d, d odd
    return (d + 1) // 2


def weyl(d, p, q, c=0):
    """W(p,q) times omega^c, as a PauliElement in Z^p X^q form."""
    p = tuple(p)
    q = tuple(q)
    pq = sum(a * b for a, b in zip(p, q))
    return PauliElement(d, c - half(d) * pq, p, q)


def weyl_mul(d, a, b):
    """Multiply two Weyl-labelled Paulis: phases add half the symplectic form.

    Arguments and result are (c, p, q) triples meaning omega^c W(p,q);
    W(p1,q1) W(p2,q2) = omega^(2^-1 [(p1,q1),(p2,q2)]) W(p1+p2, q1+q2).
    """
    if d == 2:
        raise ValueError("odd prime only")
    ca, pa, qa = a
    cb, pb, qb = b
    form = symplectic_form((pa, qa), (pb, qb), d)
    return (
        (ca + cb + half(d) * form) % d,
        tuple((x + y) % d for x, y in zip(pa, pb)),
        tuple((x + y) % d for x, y in zip(qa, qb)),
    )


def weyl_to_pauli(d, wtriple):
    c, p, q = wtriple
    return weyl(d, p, q, c)


def symplectic_form(u, v, d):
    pu, qu = u
    pv, qv = v
    return (
        sum(a * b for a, b in zip(pu, qv)) - sum(a * b for a, b in zip(pv, qu))
    ) % d


def to_matrix(P):
    """Exact dim x dim matrix of omega^c Z^p X^q, at conductor d."""
    d, n = P.d, P.n
    dim = d ** n
    cond = conductor(d, 1)
    nums = np.zeros((dim, dim, cond.phi), dtype=np.int64)
    for col in range(dim):
        z = _unindex(col, d, n)
        zq = [(a + b) % d for a, b in zip(z, P.q)]
        row = _index(zq, d)
        t = (P.c + sum(a * b for a, b in zip(P.p, zq))) % d
        nums[row, col] = cond.zeta_vec(t)
    return ExactMatrix(d, 1, nums, 1)


def _index(z, d):
    idx = 0
    for digit in z:
        idx = idx * d + digit
    return idx


def _unindex(idx, d, n):
    out = []
    for _ in range(n):
        out.append(idx % d)
        idx //= d
    return tuple(reversed(out))


def recognize_pauli(M, up_to_phase=False):
    """Invert to_matrix; None when M is not of Pauli shape.

    With up_to_phase, any nonzero scalar multiple is accepted and the
    returned phase is the c = 0 convention.
    """
    if up_to_phase:
        M = M.canonical_rep()
    d = M.d
    dim = M.dim
    n = 0
    t = dim
    while t > 1 and t % d == 0:
        t //= d
        n += 1
    if t != 1 or n == 0:
        return None
    cond = M.cond
    wstep = cond.c // d
    # column 0 fixes q
    q = None
    values = [None] * dim
    for col in range(dim):
        rows = [i for i in range(dim) if np.any(M.nums[i, col] != 0)]
        if len(rows) != 1:
            return None
        z = _unindex(col, d, n)
        if q is None:
            q = tuple((a - b) % d for a, b in zip(_unindex(rows[0], d, n), z))
        zq = [(a + b) % d for a, b in zip(z, q)]
        if rows[0] != _index(zq, d):
            return None
        values[col] = M.nums[rows[0], col]
    # ratios a(e_i)/a(0) give p through pure omega powers
    inv0 = _vec_inverse(values[0], cond)
    p = []
    for i in range(1, n + 1):
        col = _index([1 if j == i else 0 for j in range(1, n + 1)], d)
        t = _ratio_log(values[col], inv0, cond)
        if t is None or t % wstep:
            return None
        p.append((t // wstep) % d)
    p = tuple(p)
    # confirm every column, then extract the global phase
    for col in range(dim):
        z = _unindex(col, d, n)
        t = _ratio_log(values[col], inv0, cond)
        want = sum(a * b for a, b in zip(p, z)) % d
        if t is None or t % wstep or (t // wstep) % d != want:
            return None
    pq = sum(a * b for a, b in zip(p, q))
    lam = CycloScalar(
        d, M.m, np.asarray(values[0], dtype=object), M.den
    ) * CycloScalar.zeta(d, M.m, (-wstep * pq) % cond.c)
    tl = root_of_unity_log(
        np.array(lam.nums, dtype=object), lam.den, conductor(d, lam.m)
    )
    if tl is None:
        return None
    wstep_l = conductor(d, lam.m).c // d
    if tl % wstep_l:
        return None
    c = (tl // wstep_l) % d
    return PauliElement(d, c, p, q)


def _vec_inverse(vec, cond):
    from .exactmat import _entry_inverse

    return _entry_inverse(vec, cond)


def _ratio_log(vec, inv0, cond):
    """log_zeta of (vec * inv0vec / inv0den), or None if not a root of unity."""
    ivec, iden = inv0
    from .cyclo import conv_reduce_int, normalize

    prod = conv_reduce_int([int(x) for x in vec], [int(x) for x in ivec], cond)
    arr, den = normalize(np.array(prod, dtype=object), iden)
    return root_of_unity_log(arr, den, cond)


# ---------------------------------------------------------------------------
# symplectic machinery over Z_d^(2n)

def _point_vec(pt):
    p, q = pt
    return tuple(p) + tuple(q)


def _vec_point(v, n):
    return (tuple(v[:n]), tuple(v[n:]))


def _rref_mod(rows, d):
    """Reduced row echelon form over Z_d (d prime); returns rows, pivots."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        sel = None
        for r in range(rank, len(rows)):
            if rows[r][col] % d:
                sel = r
                break
        if sel is None:
            continue
        rows[rank], rows[sel] = rows[sel], rows[rank]
        inv = pow(rows[rank][col], -1, d)
        rows[rank] = [(x * inv) % d for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % d:
                f = rows[r][col]
                rows[r] = [(a - f * b) % d for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    return [tuple(r) for r in rows[:rank]], pivots


def _zfirst_key(basis):
    # order points by (q, p): the all-Z semibasis always enumerates first
    return [tuple(pt[1]) + tuple(pt[0]) for pt in basis]


def enumerate_semibases(d, n):
    """One normalized semibasis per Lagrangian subspace, Z semibasis first."""
    if n == 1:
        out = []
        for v in itertools.product(range(d), repeat=2):
            if not any(v):
                continue
            lead = next(x for x in v if x)
            if lead != 1:
                continue
            out.append((_vec_point(v, 1),))
        out.sort(key=_zfirst_key)
        return out
    if n != 2:
        raise ValueError("n capped at 2")
    lead1 = []
    for v in itertools.product(range(d), repeat=4):
        if not any(v):
            continue
        lead = next(x for x in v if x)
        if lead == 1:
            lead1.append(v)
    seen = set()
    out = []
    for i, v1 in enumerate(lead1):
        for v2 in lead1[i + 1:]:
            if symplectic_form(_vec_point(v1, 2), _vec_point(v2, 2), d):
                continue
            basis, piv = _rref_mod([v1, v2], d)
            if len(basis) != 2:
                continue
            key = tuple(basis)
            if key in seen:
                continue
            seen.add(key)
            pts = sorted((_vec_point(v, 2) for v in basis), key=lambda pt: _zfirst_key([pt]))
            out.append(tuple(pts))
    out.sort(key=_zfirst_key)
    return out


def _solve_mod(A, b, d):
    """One solution x of A x = b over Z_d (d prime), or None."""
    rows = [list(r) + [bb] for r, bb in zip(A, b)]
    red, piv = _rref_mod(rows, d)
    ncols = len(A[0])
    x = [0] * ncols
    for r, row in enumerate(red):
        lead = None
        for col in range(ncols):
            if row[col]:
                lead = col
                break
        if lead is None:
            if row[ncols]:
                return None
            continue
        x[lead] = row[ncols]
    # verify (A may be singular)
    for r, bb in zip(A, b):
        if sum(a * xx for a, xx in zip(r, x)) % d != bb % d:
            return None
    return x


def extend_to_symplectic_basis(points, d):
    """Complete v_1..v_n to (e, f) with [e_i, f_j] = delta_ij, isotropic e, f."""
    es = [(_point_vec(pt)) for pt in points]
    n = len(points)
    fs = []
    for i in range(n):
        # [e_j, w] = delta_ij for all j; [f_j, w] = 0 for existing f
        A = []
        b = []
        for j, e in enumerate(es):
            A.append(_form_row(e, n, d))
            b.append(1 if j == i else 0)
        for f in fs:
            A.append(_form_row(f, n, d))
            b.append(0)
        w = _solve_mod(A, b, d)
        if w is None:
            raise ValueError("not a semibasis")
        fs.append(tuple(w))
    return (
        [_vec_point(e, n) for e in es],
        [_vec_point(f, n) for f in fs],
    )


def _form_row(v, n, d):
    # [v, w] as a linear functional of w: (-v_q | v_p)
    return [(-x) % d for x in v[n:]] + [x % d for x in v[:n]]


# ---------------------------------------------------------------------------
# Clifford synthesis

def synthesize_clifford(targets):
    """Clifford C with conjugate_action(C, Z_i) = targets[i], exactly.

    Targets must be independent commuting Paulis; built by extending their
    phase points to a symplectic basis, reconstructing from the phaseless
    Weyl tuple, then fixing phases with right X powers.
    """
    from .svn import ConjugateTuple, reconstruct

    d = targets[0].d
    n = targets[0].n
    pts = [t.phase_point() for t in targets]
    for i, a in enumerate(targets):
        for b in targets[i + 1:]:
            if symplectic_form(a.phase_point(), b.phase_point(), d):
                raise ValueError("targets do not commute")
    vecs, piv = _rref_mod([_point_vec(pt) for pt in pts], d)
    if len(vecs) != n:
        raise ValueError("targets are not independent")
    es, fs = extend_to_symplectic_basis(pts, d)
    pairs = []
    for e, f in zip(es, fs):
        U = to_matrix(weyl(d, e[0], e[1]))
        V = to_matrix(weyl(d, f[0], f[1]))
        pairs.append((U, V))
    G0 = reconstruct(ConjugateTuple(d, n, pairs))
    # G0 Z_i G0* = W(e_i); the target is omega^(c_i + 2^-1 p_i.q_i) W(e_i).
    # Right X powers rotate the phase: (G X^x) Z_i (G X^x)* = omega^(-x_i) G Z_i G*.
    xs = []
    for t in targets:
        pq = sum(a * b for a, b in zip(t.p, t.q))
        xs.append((-(t.c + half(d) * pq)) % d)
    corr = to_matrix(PauliElement(d, 0, [0] * n, xs))
    return ScaledUnitary(G0.mat @ corr, G0.scale2)
