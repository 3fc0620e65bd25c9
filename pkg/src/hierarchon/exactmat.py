"""Exact matrices over Q(zeta_{d**m}), scaled unitaries, keys and interchange.

An ExactMatrix holds one integer coefficient tensor (rows, cols, phi) plus a
single positive denominator, all entries sharing the conductor d**m.  A
ScaledUnitary pairs a matrix M with a positive rational s such that
M M* = s I holds exactly; it stands in for the unitary M / sqrt(s) without
ever leaving the field.
"""

from fractions import Fraction
import math

import numpy as np

from . import _kernels as K
from .cyclo import (
    CycloScalar,
    as_int64_if_safe,
    conductor,
    max_abs,
    norm_inverse,
    normalize,
)

INT64_SAFE = 2 ** 61


class ExactMatrix:
    __slots__ = ("d", "m", "nums", "den")

    def __init__(self, d, m, nums, den=1):
        cond = conductor(d, m)
        arr = np.asarray(nums)
        if arr.ndim != 3 or arr.shape[2] != cond.phi:
            raise ValueError("coefficient tensor must be (rows, cols, phi)")
        arr, den = normalize(arr, int(den))
        self.d = d
        self.m = m
        self.nums = as_int64_if_safe(arr)
        self.den = den

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, d, m, rows, cols=None):
        cond = conductor(d, m)
        cols = rows if cols is None else cols
        return cls(d, m, np.zeros((rows, cols, cond.phi), dtype=np.int64), 1)

    @classmethod
    def identity(cls, d, dim, m=1):
        cond = conductor(d, m)
        nums = np.zeros((dim, dim, cond.phi), dtype=np.int64)
        nums[np.arange(dim), np.arange(dim), 0] = 1
        return cls(d, m, nums, 1)

    @classmethod
    def from_scalars(cls, d, grid):
        rows = [list(r) for r in grid]
        cells = [
            x if isinstance(x, CycloScalar) else CycloScalar.from_rational(d, x)
            for r in rows
            for x in r
        ]
        m = max(x.m for x in cells)
        cells = [x.promote(m) for x in cells]
        den = math.lcm(*[x.den for x in cells])
        phi = conductor(d, m).phi
        nums = np.zeros((len(rows), len(rows[0]), phi), dtype=object)
        it = iter(cells)
        for i in range(len(rows)):
            for j in range(len(rows[0])):
                x = next(it)
                f = den // x.den
                nums[i, j] = np.array([v * f for v in x.nums], dtype=object)
        return cls(d, m, nums, den)

    @classmethod
    def diag(cls, d, scalars):
        scalars = list(scalars)
        dim = len(scalars)
        grid = [
            [scalars[i] if i == j else 0 for j in range(dim)] for i in range(dim)
        ]
        return cls.from_scalars(d, grid)

    # -- structure --------------------------------------------------------

    @property
    def cond(self):
        return conductor(self.d, self.m)

    @property
    def shape(self):
        return self.nums.shape[:2]

    @property
    def dim(self):
        r, s = self.shape
        if r != s:
            raise ValueError("not square")
        return r

    def entry(self, i, j):
        return CycloScalar(
            self.d, self.m, np.asarray(self.nums[i, j], dtype=object), self.den
        )

    def promote(self, m_new):
        if m_new == self.m:
            return self
        vec = self.cond.promote_tensor(self.nums, m_new)
        return ExactMatrix(self.d, m_new, vec, self.den)

    def demote_min(self):
        m_new = self.cond.min_level(self.nums)
        if m_new == self.m:
            return self
        out = self.nums
        for step_m in range(self.m - 1, m_new - 1, -1):
            out = conductor(self.d, step_m + 1).demote_tensor(out, step_m)
        return ExactMatrix(self.d, m_new, out, self.den)

    def _common(self, other):
        if self.d != other.d:
            raise ValueError("mixed base primes")
        m = max(self.m, other.m)
        return self.promote(m), other.promote(m)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        a, b = self._common(other)
        if (
            a.nums.dtype == object
            or b.nums.dtype == object
            or max_abs(a.nums) * b.den + max_abs(b.nums) * a.den >= INT64_SAFE
        ):
            an = a.nums.astype(object) * b.den
            bn = b.nums.astype(object) * a.den
        else:
            an = a.nums * b.den
            bn = b.nums * a.den
        return ExactMatrix(a.d, a.m, an + bn, a.den * b.den)

    def __neg__(self):
        return ExactMatrix(self.d, self.m, -self.nums, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        a, b = self._common(other)
        if a.shape[1] != b.shape[0]:
            raise ValueError("dim mismatch")
        cond = a.cond
        bound = (
            max_abs(a.nums) * max_abs(b.nums) * a.shape[1] * cond.phi * cond.c
        )
        if a.nums.dtype == object or b.nums.dtype == object or bound >= INT64_SAFE:
            raw = _gr_matmul_obj(
                a.nums.astype(object), b.nums.astype(object), cond
            )
        else:
            raw = cond.reduce(K.gr_matmul(a.nums, b.nums, cond.c))
        return ExactMatrix(a.d, a.m, raw, a.den * b.den)

    def scale_q(self, q):
        q = Fraction(q)
        arr = self.nums
        if arr.dtype != object and (
            max_abs(arr) * abs(q.numerator) >= INT64_SAFE
        ):
            arr = arr.astype(object)
        return ExactMatrix(self.d, self.m, arr * q.numerator, self.den * q.denominator)

    def scale_vec(self, vec, vden=1):
        """Multiply every entry by the field element vec/vden (reduced coeffs)."""
        cond = self.cond
        vec = np.asarray(vec)
        bound = max_abs(self.nums) * max_abs(vec) * cond.phi * cond.c
        if self.nums.dtype == object or vec.dtype == object or bound >= INT64_SAFE:
            nums = self.nums.astype(object)
            raw = np.zeros(nums.shape[:2] + (cond.c,), dtype=object)
        else:
            nums = self.nums
            raw = np.zeros(nums.shape[:2] + (cond.c,), dtype=np.int64)
        for e in np.flatnonzero(vec):
            idx = (int(e) + np.arange(cond.phi)) % cond.c
            raw[..., idx] += nums * vec[e]
        return ExactMatrix(self.d, self.m, cond.reduce(raw), self.den * vden)

    def scale_zeta(self, e):
        cond = self.cond
        return self.scale_vec(cond.zeta_vec(e % cond.c))

    def scale(self, s):
        if isinstance(s, CycloScalar):
            if s.d != self.d:
                raise ValueError("mixed base primes")
            m = max(s.m, self.m)
            a = self.promote(m)
            sv = s.promote(m)
            return a.scale_vec(np.array(sv.nums, dtype=object), sv.den)
        return self.scale_q(s)

    def dagger(self):
        conj = self.cond.conj(self.nums)
        return ExactMatrix(self.d, self.m, conj.transpose(1, 0, 2), self.den)

    def pow_int(self, k):
        if k < 0:
            raise ValueError("negative matrix powers are not needed here")
        out = ExactMatrix.identity(self.d, self.dim, self.m)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    # -- predicates ---------------------------------------------------------

    def is_zero(self):
        return not np.any(self.nums != 0)

    def is_identity(self):
        return self == ExactMatrix.identity(self.d, self.dim, 1)

    def is_diagonal(self):
        r, s = self.shape
        off = ~np.eye(r, s, dtype=bool)
        return not np.any(self.nums[off] != 0)

    def scalar_if_scalar(self):
        """The scalar s with self == s*I, or None."""
        r, s = self.shape
        if r != s or not self.is_diagonal():
            return None
        first = self.nums[0, 0]
        for i in range(1, r):
            if not np.array_equal(self.nums[i, i], first):
                return None
        return CycloScalar(self.d, self.m, np.asarray(first, dtype=object), self.den)

    def first_nonzero(self):
        r, s = self.shape
        flat = self.nums.reshape(r * s, -1)
        for idx in range(r * s):
            if np.any(flat[idx] != 0):
                return divmod(idx, s)
        raise ValueError("zero matrix")

    # -- canonical form -------------------------------------------------------

    def canonical_rep(self):
        """Divide by the first nonzero entry, row-major.  Phase-invariant key."""
        i, j = self.first_nonzero()
        ivec, iden = _entry_inverse(self.nums[i, j], self.cond)
        # M / (entry/den) = nums / entry: the global denominator cancels
        return ExactMatrix(self.d, self.m, self.nums, 1).scale_vec(ivec, iden)

    def to_key(self):
        """Stable bytes key for the exact value (minimal conductor, reduced)."""
        small = self.demote_min()
        arr = as_int64_if_safe(small.nums)
        r, s = small.shape
        head = ("%d|%d|%d|%d|%d|" % (small.d, small.m, r, s, small.den)).encode()
        if arr.dtype == object:
            return head + b"O" + repr(arr.tolist()).encode()
        return head + b"I" + arr.tobytes()

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.d != other.d:
            return NotImplemented
        a, b = self._common(other)
        return a.den == b.den and np.array_equal(a.nums, b.nums)

    def __hash__(self):
        return hash(self.to_key())

    def to_complex(self):
        c = self.cond.c
        z = np.exp(2j * np.pi / c)
        pows = z ** np.arange(self.cond.phi)
        return (self.nums.astype(np.complex128) @ pows) / self.den

    def __repr__(self):
        r, s = self.shape
        return "ExactMatrix(%dx%d, conductor %d, den %d)" % (
            r, s, self.cond.c, self.den,
        )


def equal_up_to_phase(A, B):
    """A == z*B for some nonzero scalar z, decided by cross-multiplication.

    A/A[slot] == B/B[slot] is tested as A*B[slot] == B*A[slot]; the global
    denominators cancel, and no field inversion is ever needed.
    """
    if A.shape != B.shape:
        return False
    if A.is_zero() or B.is_zero():
        return A.is_zero() and B.is_zero()
    a, b = A._common(B)
    i, j = a.first_nonzero()
    if not np.any(np.asarray(b.nums[i, j]) != 0):
        return False
    lhs = ExactMatrix(a.d, a.m, a.nums, 1).scale_vec(b.nums[i, j])
    rhs = ExactMatrix(b.d, b.m, b.nums, 1).scale_vec(a.nums[i, j])
    return lhs == rhs


def kron(a, b):
    """Tensor product; wire order puts a's indices most significant."""
    if a.d != b.d:
        raise ValueError("mixed base primes")
    m = max(a.m, b.m)
    a = a.promote(m)
    b = b.promote(m)
    cond = a.cond
    r1, s1 = a.shape
    r2, s2 = b.shape
    bound = max_abs(a.nums) * max_abs(b.nums) * cond.phi * cond.c
    if a.nums.dtype == object or b.nums.dtype == object or bound >= INT64_SAFE:
        raw = np.zeros((r1, s1, r2, s2, cond.c), dtype=object)
        an = a.nums.astype(object)
        bn = b.nums.astype(object)
    else:
        raw = np.zeros((r1, s1, r2, s2, cond.c), dtype=np.int64)
        an = a.nums
        bn = b.nums
    for e in range(cond.phi):
        seg = an[:, :, e]
        if not np.any(seg != 0):
            continue
        idx = (e + np.arange(cond.phi)) % cond.c
        raw[:, :, :, :, idx] += seg[:, :, None, None, None] * bn[None, None, :, :, :]
    out = cond.reduce(raw)
    out = out.transpose(0, 2, 1, 3, 4).reshape(r1 * r2, s1 * s2, cond.phi)
    return ExactMatrix(a.d, m, out, a.den * b.den)


def _gr_matmul_obj(A, B, cond):
    r, mm, phi = A.shape
    s = B.shape[1]
    raw = np.zeros((r, s, cond.c), dtype=object)
    for i in range(r):
        for j in range(mm):
            a_ij = A[i, j]
            sup = [u for u in range(phi) if a_ij[u]]
            if not sup:
                continue
            for k in range(s):
                b_jk = B[j, k]
                acc = raw[i, k]
                for u in sup:
                    av = a_ij[u]
                    for v in range(phi):
                        bv = b_jk[v]
                        if bv:
                            acc[(u + v) % cond.c] += av * bv
    return cond.reduce(raw)


def _entry_inverse(vec, cond):
    """Inverse of a reduced integer coefficient vector, as (vec', den')."""
    vec = np.asarray(vec)
    sup = np.flatnonzero(vec)
    if sup.size == 1:
        # q * zeta**t
        t = int(sup[0])
        v = int(vec[t])
        return cond.zeta_vec(-t), v
    if sup.size == cond.d - 1:
        r = int(sup[0]) % cond.step
        want = r + cond.step * np.arange(cond.d - 1)
        vals = set(int(vec[e]) for e in want) if np.array_equal(sup, want) else set()
        if len(vals) == 1:
            # vec = -v * zeta**(phi+r)
            v = vals.pop()
            return -cond.zeta_vec(-(cond.phi + r)), v
    return norm_inverse(vec, 1, cond)


class ScaledUnitary:
    __slots__ = ("mat", "scale2")

    def __init__(self, mat, scale2):
        scale2 = Fraction(scale2)
        if scale2 <= 0:
            raise ValueError("scale2 must be positive")
        self.mat = mat
        self.scale2 = scale2

    @classmethod
    def exact(cls, mat):
        return cls(mat, Fraction(1))

    def verify(self):
        prod = self.mat @ self.mat.dagger()
        s = prod.scalar_if_scalar()
        if s is None or not s.is_rational() or s.as_fraction() != self.scale2:
            raise ValueError("mat*mat' is not scale2*I")
        return True

    @property
    def d(self):
        return self.mat.d

    @property
    def dim(self):
        return self.mat.dim

    def __matmul__(self, other):
        return ScaledUnitary(self.mat @ other.mat, self.scale2 * other.scale2)

    def dagger(self):
        return ScaledUnitary(self.mat.dagger(), self.scale2)

    def pow_int(self, k):
        return ScaledUnitary(self.mat.pow_int(k), self.scale2 ** k)

    def canonical_key(self):
        return self.mat.canonical_rep().to_key()

    def __repr__(self):
        return "ScaledUnitary(%r, scale2=%s)" % (self.mat, self.scale2)


def conjugate_action(G, M):
    """G M G* as an ExactMatrix, computed scale-free as (mat M mat*)/scale2."""
    if isinstance(M, ScaledUnitary):
        return conjugate_action(G, M.mat)
    prod = G.mat @ M @ G.mat.dagger()
    return prod.scale_q(Fraction(1, 1) / G.scale2)


# ---------------------------------------------------------------------------
# interchange documents

INTERCHANGE_VERSION = 1


def to_interchange(su, n):
    mat = su.mat
    cond = mat.cond
    entries = []
    for i in range(mat.shape[0]):
        for j in range(mat.shape[1]):
            cell = []
            for e in range(cond.phi):
                f = Fraction(int(mat.nums[i, j, e]), mat.den)
                cell.append([f.numerator, f.denominator])
            entries.append(cell)
    return {
        "version": INTERCHANGE_VERSION,
        "d": mat.d,
        "n": n,
        "conductor": cond.c,
        "scale2": "%d/%d" % (su.scale2.numerator, su.scale2.denominator),
        "entries": entries,
    }


def from_interchange(doc):
    if doc.get("version") != INTERCHANGE_VERSION:
        raise ValueError("unknown interchange version")
    d = doc["d"]
    n = doc["n"]
    c = doc["conductor"]
    m = 0
    cc = c
    while cc > 1 and cc % d == 0:
        cc //= d
        m += 1
    if cc != 1 or m < 1:
        raise ValueError("conductor is not a power of d")
    cond = conductor(d, m)
    dim = d ** n
    entries = doc["entries"]
    if len(entries) != dim * dim:
        raise ValueError("entry count does not match d^n")
    den = 1
    for cell in entries:
        for p, q in cell:
            den = den * q // math.gcd(den, q)
    nums = np.zeros((dim, dim, cond.phi), dtype=object)
    for idx, cell in enumerate(entries):
        i, j = divmod(idx, dim)
        for e, (p, q) in enumerate(cell):
            nums[i, j, e] = p * (den // q)
    num, dd = Fraction(doc["scale2"]).numerator, Fraction(doc["scale2"]).denominator
    mat = ExactMatrix(d, m, nums, den)
    return ScaledUnitary(mat, Fraction(num, dd)), n


# ---------------------------------------------------------------------------
# modular fingerprints: sound fast keys for canonical forms

def _is_prime(nn):
    if nn < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if nn % sp == 0:
            return nn == sp
    dd = nn - 1
    r = 0
    while dd % 2 == 0:
        dd //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, dd, nn)
        if x in (1, nn - 1):
            continue
        for _ in range(r - 1):
            x = x * x % nn
            if x == nn - 1:
                break
        else:
            return False
    return True


def _find_fp_primes(modulus, count=2, below=2 ** 23):
    out = []
    k = (below - 2) // modulus
    while k > 0 and len(out) < count:
        p = k * modulus + 1
        if _is_prime(p):
            out.append(p)
        k -= 1
    if len(out) < count:
        raise RuntimeError("prime search failed")
    return out


class FingerprintContext:
    """Canonical-form keys modulo two primes with p = 1 (mod d**m_max).

    Matching exact values always produce matching keys (the evaluation
    zeta -> g_c is a ring map and the normalising slot is located exactly),
    so distinct keys prove distinct gates.  Key collisions are resolved by
    the caller with exact comparison.
    """

    def __init__(self, d, m_max):
        self.d = d
        self.m_max = m_max
        order = d ** m_max
        self.primes = _find_fp_primes(order)
        self._tables = {}
        self._gens = []
        for p in self.primes:
            h = 2
            while True:
                g = pow(h, (p - 1) // order, p)
                if pow(g, order // d, p) != 1:
                    break
                h += 1
            self._gens.append(g)

    def powvec(self, pi, m):
        key = (pi, m)
        if key not in self._tables:
            p = self.primes[pi]
            cond = conductor(self.d, m)
            g = pow(self._gens[pi], self.d ** (self.m_max - m), p)
            tab = np.empty(cond.phi, dtype=np.int64)
            v = 1
            for e in range(cond.phi):
                tab[e] = v
                v = v * g % p
            self._tables[key] = tab
        return self._tables[key]

    def key(self, mat):
        """Fingerprint of canonical_rep(mat), computed without the division."""
        i, j = mat.first_nonzero()
        parts = [b"%d,%d,%d;" % (mat.shape[0], mat.shape[1], mat.d)]
        canon = None
        for pi, p in enumerate(self.primes):
            powvec = self.powvec(pi, mat.m)
            if mat.nums.dtype == object:
                ev = _fp_eval_obj(mat.nums, powvec, p)
            else:
                ev = K.fp_eval(mat.nums, powvec, p)
            slot = int(ev[i, j]) % p
            if slot:
                norm = ev * pow(slot, p - 2, p) % p
            else:
                if canon is None:
                    canon = mat.canonical_rep()
                cp = self.powvec(pi, canon.m)
                if canon.nums.dtype == object:
                    cev = _fp_eval_obj(canon.nums, cp, p)
                else:
                    cev = K.fp_eval(canon.nums, cp, p)
                norm = cev * pow(canon.den % p, p - 2, p) % p
            parts.append(norm.astype(np.int32).tobytes())
        return b"".join(parts)


def _fp_eval_obj(nums, powvec, p):
    shp = nums.shape
    flat = nums.reshape(-1, shp[-1])
    out = np.empty(flat.shape[0], dtype=np.int64)
    for idx in range(flat.shape[0]):
        acc = 0
        for e, v in enumerate(flat[idx]):
            if v:
                acc = (acc + int(v) * int(powvec[e])) % p
        out[idx] = acc
    return out.reshape(shp[:-1])
