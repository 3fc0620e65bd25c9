"""Hot integer kernels, with numba-jitted and pure-numpy lanes.

Every kernel exists twice: a ``_nb`` variant compiled with numba and a ``_np``
variant written against plain numpy.  The public names dispatch to the numba
lane unless it is unavailable or ``HIERARCHON_NO_NUMBA=1`` is set.  Both lanes
must agree bit-for-bit; tests/test_kernels.py asserts this and
benchmarks/bench_kernels.py measures the gap.
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - sandbox always has numba
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("HIERARCHON_NO_NUMBA", "") != "1"


# ---------------------------------------------------------------------------
# group-ring matrix product: entries are integer coefficient vectors over
# exponents [0, phi) of zeta_c; the product accumulates the cyclic convolution
# into a full length-c vector (reduction happens in cyclo.reduce_full).

def _gr_matmul_np(A, B, c):
    r, m, phi = A.shape
    s = B.shape[1]
    out = np.zeros((r, s, c), dtype=np.int64)
    Bf = B.reshape(m, s * phi)
    for u in range(phi):
        contrib = (A[:, :, u] @ Bf).reshape(r, s, phi)
        idx = u + np.arange(phi)
        idx[idx >= c] -= c
        out[:, :, idx] += contrib
    return out


if HAS_NUMBA:

    @njit(cache=True)
    def _gr_matmul_nb(A, B, c):  # pragma: no cover - exercised via dispatch
        r, m, phi = A.shape
        s = B.shape[1]
        out = np.zeros((r, s, c), dtype=np.int64)
        for i in range(r):
            for k in range(s):
                acc = out[i, k]
                for j in range(m):
                    a_ij = A[i, j]
                    b_jk = B[j, k]
                    for u in range(phi):
                        a = a_ij[u]
                        if a == 0:
                            continue
                        for v in range(phi):
                            b = b_jk[v]
                            if b != 0:
                                w = u + v
                                if w >= c:
                                    w -= c
                                acc[w] += a * b
        return out


def gr_matmul(A, B, c):
    """(r,m,phi) x (m,s,phi) -> unreduced (r,s,c) group-ring product."""
    if USE_NUMBA:
        return _gr_matmul_nb(A, B, c)
    return _gr_matmul_np(A, B, c)


# ---------------------------------------------------------------------------
# batched fingerprint evaluation: map coefficient tensors to GF(p) matrices.

def _fp_eval_np(nums, powvec, p):
    flat = nums % p
    out = flat @ (powvec % p)
    return out % p


if HAS_NUMBA:

    @njit(cache=True)
    def _fp_eval_nb(nums, powvec, p):  # pragma: no cover
        shp = nums.shape
        n = 1
        for i in range(len(shp) - 1):
            n *= shp[i]
        phi = shp[-1]
        flat = nums.reshape(n, phi)
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            acc = 0
            for e in range(phi):
                v = flat[i, e] % p
                if v:
                    acc = (acc + v * powvec[e]) % p
            out[i] = acc
        return out.reshape(shp[:-1])


def fp_eval(nums, powvec, p):
    """Evaluate zeta -> g mod p over the last axis.  Exact in int64."""
    if USE_NUMBA:
        return _fp_eval_nb(np.ascontiguousarray(nums), powvec, p)
    return _fp_eval_np(nums, powvec, p)


# ---------------------------------------------------------------------------
# vectorised modular exponentiation (for batched inverses mod p).

def modpow_vec(base, exp, p):
    base = np.asarray(base, dtype=np.int64) % p
    result = np.ones_like(base)
    e = exp
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# two-qutrit survey: decide whether the kernel of a 3x4 matrix over Z_3
# contains a Lagrangian semibasis (two independent vectors with vanishing
# symplectic product).  The LUT indexes all 3^12 matrices by packed trits.

def _kernel_basis_z3(mat):
    """Kernel basis of a 3x4 matrix over Z_3, rows of the returned array."""
    m = [list(row) for row in mat]
    ncols = 4
    pivots = []
    prow = 0
    for col in range(ncols):
        sel = -1
        for r in range(prow, 3):
            if m[r][col] % 3:
                sel = r
                break
        if sel < 0:
            continue
        m[prow], m[sel] = m[sel], m[prow]
        inv = 1 if m[prow][col] % 3 == 1 else 2
        m[prow] = [(x * inv) % 3 for x in m[prow]]
        for r in range(3):
            if r != prow and m[r][col] % 3:
                f = m[r][col] % 3
                m[r] = [(a - f * b) % 3 for a, b in zip(m[r], m[prow])]
        pivots.append(col)
        prow += 1
        if prow == 3:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-m[i][fc]) % 3
        basis.append(v)
    return basis


def _symp4(u, v):
    return (u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2]) % 3


def isotropic_plane_witness(mat):
    """Two independent kernel vectors with zero symplectic product, or None."""
    basis = _kernel_basis_z3(mat)
    r = len(basis)
    if r < 2:
        return None
    # Gram matrix of the symplectic form restricted to the kernel.
    gram = [[_symp4(u, v) for v in basis] for u in basis]
    rad = _radical(gram)
    if len(rad) >= 1:
        v0 = _comb(rad[0], basis)
        # any kernel vector independent of v0 pairs to zero with a radical vector
        for cand in basis:
            if not _dependent_z3(v0, cand):
                return (tuple(v0), tuple(cand))
        return None
    # nondegenerate restricted form: isotropic plane exists iff rank >= 4
    if r < 4:
        return None
    # split two hyperbolic planes: e1, and a vector orthogonal to span(e1, f1)
    e1 = basis[0]
    f1 = None
    for cand in basis[1:]:
        if _symp4(e1, cand) % 3:
            f1 = cand
            break
    a = _symp4(e1, f1)
    ainv = 1 if a % 3 == 1 else 2
    for cand in basis:
        s = _symp4(e1, cand)
        t = _symp4(f1, cand)
        # project cand off the hyperbolic plane (e1, f1)
        w = [(cand[i] - s * ainv * f1[i] + t * ainv * e1[i]) % 3 for i in range(4)]
        if any(w) and not _dependent_z3(e1, w):
            return (tuple(e1), tuple(w))
    return None


def _radical(gram):
    r = len(gram)
    padded = [list(row) + [0] * (4 - r) for row in gram]
    while len(padded) < 3:
        padded.append([0, 0, 0, 0])
    if r <= 3:
        basis = _kernel_basis_z3(padded[:3])
        return [v[:r] for v in basis if not any(v[r:])]
    # r == 4: eliminate with a 4-row pass
    m = [list(row) for row in gram]
    pivots = []
    prow = 0
    for col in range(4):
        sel = -1
        for rr in range(prow, 4):
            if m[rr][col] % 3:
                sel = rr
                break
        if sel < 0:
            continue
        m[prow], m[sel] = m[sel], m[prow]
        inv = 1 if m[prow][col] % 3 == 1 else 2
        m[prow] = [(x * inv) % 3 for x in m[prow]]
        for rr in range(4):
            if rr != prow and m[rr][col] % 3:
                f = m[rr][col] % 3
                m[rr] = [(a - f * b) % 3 for a, b in zip(m[rr], m[prow])]
        pivots.append(col)
        prow += 1
    free = [c for c in range(4) if c not in pivots]
    out = []
    for fc in free:
        v = [0] * 4
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-m[i][fc]) % 3
        out.append(v)
    return out


def _comb(coeffs, basis):
    n = len(basis[0])
    out = [0] * n
    for cf, vec in zip(coeffs, basis):
        for i in range(n):
            out[i] = (out[i] + cf * vec[i]) % 3
    return out


def _dependent_z3(u, v):
    for lam in range(3):
        if all((lam * a - b) % 3 == 0 for a, b in zip(u, v)):
            return True
    return False


# ---------------------------------------------------------------------------
# two-qutrit survey join: row r of the conjugate-pair list is matched against
# every candidate pair q; candidates commuting exactly with both members of
# row r land in a histogram bucketed by the packed quadratic codes of (r, q).

def _survey_join_np(pairu, pairv, ok0, stkey, start, stop, stride):
    hist = np.zeros((729, 729), dtype=np.int64)
    for r in range(start, stop, stride):
        valid = ok0[pairu[r]] & ok0[pairv[r]]
        good = (valid[pairu] & valid[pairv]).astype(bool)
        hist[stkey[r]] += np.bincount(stkey[good], minlength=729)
    return hist


if HAS_NUMBA:

    @njit(cache=True)
    def _survey_join_nb(pairu, pairv, ok0, stkey, start, stop, stride):  # pragma: no cover
        hist = np.zeros((729, 729), dtype=np.int64)
        npairs = len(pairu)
        nsep = ok0.shape[0]
        valid = np.empty(nsep, dtype=np.uint8)
        for r in range(start, stop, stride):
            rowu = ok0[pairu[r]]
            rowv = ok0[pairv[r]]
            for i in range(nsep):
                valid[i] = rowu[i] & rowv[i]
            row = hist[stkey[r]]
            for q in range(npairs):
                if valid[pairu[q]] and valid[pairv[q]]:
                    row[stkey[q]] += 1
        return hist


def survey_join(pairu, pairv, ok0, stkey, start, stop, stride):
    if USE_NUMBA:
        return _survey_join_nb(pairu, pairv, ok0, stkey, start, stop, stride)
    return _survey_join_np(pairu, pairv, ok0, stkey, start, stop, stride)


def _semibasis_lut_np():
    lut = np.zeros(3 ** 12, dtype=np.uint8)
    digits = np.empty(12, dtype=np.int64)
    for code in range(3 ** 12):
        x = code
        for i in range(12):
            digits[i] = x % 3
            x //= 3
        mat = [
            [digits[0], digits[3], digits[6], digits[9]],
            [digits[1], digits[4], digits[7], digits[10]],
            [digits[2], digits[5], digits[8], digits[11]],
        ]
        if isotropic_plane_witness(mat) is not None:
            lut[code] = 1
    return lut


if HAS_NUMBA:

    @njit(cache=True)
    def _semibasis_lut_nb():  # pragma: no cover
        lut = np.zeros(3 ** 12, dtype=np.uint8)
        mat = np.empty((3, 4), dtype=np.int64)
        basis = np.empty((4, 4), dtype=np.int64)
        gram = np.empty((4, 4), dtype=np.int64)
        gm = np.empty((4, 4), dtype=np.int64)
        for code in range(3 ** 12):
            x = code
            for col in range(4):
                for row in range(3):
                    mat[row, col] = x % 3
                    x //= 3
            # kernel of mat over Z_3
            m = mat.copy()
            pivots = np.full(4, -1, dtype=np.int64)
            npiv = 0
            for col in range(4):
                sel = -1
                for r in range(npiv, 3):
                    if m[r, col] % 3 != 0:
                        sel = r
                        break
                if sel < 0:
                    continue
                if sel != npiv:
                    for cc in range(4):
                        tmp = m[npiv, cc]
                        m[npiv, cc] = m[sel, cc]
                        m[sel, cc] = tmp
                inv = 1 if m[npiv, col] % 3 == 1 else 2
                for cc in range(4):
                    m[npiv, cc] = (m[npiv, cc] * inv) % 3
                for r in range(3):
                    if r != npiv and m[r, col] % 3 != 0:
                        f = m[r, col] % 3
                        for cc in range(4):
                            m[r, cc] = (m[r, cc] - f * m[npiv, cc]) % 3
                pivots[npiv] = col
                npiv += 1
                if npiv == 3:
                    break
            nb = 0
            for fc in range(4):
                ispiv = False
                for i in range(npiv):
                    if pivots[i] == fc:
                        ispiv = True
                        break
                if ispiv:
                    continue
                for i in range(4):
                    basis[nb, i] = 0
                basis[nb, fc] = 1
                for i in range(npiv):
                    basis[nb, pivots[i]] = (-m[i, fc]) % 3
                nb += 1
            if nb < 2:
                continue
            # restricted symplectic Gram matrix
            for i in range(nb):
                for j in range(nb):
                    u = basis[i]
                    v = basis[j]
                    gram[i, j] = (
                        u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2]
                    ) % 3
            # rank of gram (nb x nb)
            for i in range(nb):
                for j in range(nb):
                    gm[i, j] = gram[i, j]
            rank = 0
            for col in range(nb):
                sel = -1
                for r in range(rank, nb):
                    if gm[r, col] % 3 != 0:
                        sel = r
                        break
                if sel < 0:
                    continue
                if sel != rank:
                    for cc in range(nb):
                        tmp = gm[rank, cc]
                        gm[rank, cc] = gm[sel, cc]
                        gm[sel, cc] = tmp
                inv = 1 if gm[rank, col] % 3 == 1 else 2
                for cc in range(nb):
                    gm[rank, cc] = (gm[rank, cc] * inv) % 3
                for r in range(nb):
                    if r != rank and gm[r, col] % 3 != 0:
                        f = gm[r, col] % 3
                        for cc in range(nb):
                            gm[r, cc] = (gm[r, cc] - f * gm[rank, cc]) % 3
                rank += 1
            # max isotropic dim inside the kernel = nb - rank/2
            if 2 * nb - rank >= 4:
                lut[code] = 1
        return lut


def semibasis_lut():
    """uint8 truth table over packed 3x4 matrices (column-major trits)."""
    if USE_NUMBA:
        return _semibasis_lut_nb()
    return _semibasis_lut_np()
