"""Hierarchy levels: exact membership and the recursive survey.

Level 1 is the Pauli group up to phase.  A gate sits at level k when
conjugating every generator Pauli lands it in level k-1.  The survey walks
the other way: rephase each level-(k-1) class to order d, keep the
omega-commuting ordered pairs, rebuild the gate that induces each pair,
and sweep its right Pauli factor.  Everything is exact; the mod-p screen
only ever discards pairs, never accepts them.
"""

import hashlib
import json
import os
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from . import _kernels as K
from .cyclo import CycloScalar, conductor, root_of_unity_log
from .exactmat import (
    ExactMatrix,
    FingerprintContext,
    ScaledUnitary,
    _fp_eval_obj,
    conjugate_action,
    equal_up_to_phase,
    from_interchange,
    to_interchange,
)
from .phasespace import PauliElement, pauli_x, pauli_z, recognize_pauli, to_matrix
from .svn import ConjugateTuple, _omega_commutes, reconstruct

CACHE_ENV = "HIERARCHON_CACHE"

# Published class counts the surveys are cross-checked against; the CLI
# reports MATCH/MISMATCH per level instead of assuming them.
REFERENCE_COUNTS = {
    (3, 1): {1: 9, 2: 216, 3: 1944, 4: 7128, 5: 22680, 6: 69336},
    (5, 1): {1: 25, 2: 3000, 3: 7500, 4: 435000, 5: 2235000},
    (7, 1): {1: 49, 2: 16464, 3: 806736, 4: 6338640},
}

# conductor headroom per base prime: highest m the fingerprint tables serve
_FP_HEADROOM = {3: 5, 5: 3, 7: 3}


@lru_cache(maxsize=None)
def fingerprint_context(d):
    return FingerprintContext(d, _FP_HEADROOM.get(d, 3))


# ---------------------------------------------------------------------------
# order-d rephasing


def _iroot(x, k):
    """floor(x ** (1/k)) for a nonnegative int, by integer Newton."""
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r ** k > x:
        r -= 1
    return r


def _root_fraction(q, k):
    """The exact rational k-th root of a positive Fraction, or None."""
    a = _iroot(q.numerator, k)
    b = _iroot(q.denominator, k)
    if a ** k == q.numerator and b ** k == q.denominator:
        return Fraction(a, b)
    return None


@lru_cache(maxsize=None)
def _norm_witness(d, x):
    """A scalar tau with tau * conj(tau) == x, for a positive integer x.

    Quadratic Gauss sums give the ramified part: g = sum_t zeta_d**(t*t)
    has g * conj(g) == d.  That covers x == d**a * square, which is every
    norm the surveys produce; anything else returns None.
    """
    a = 0
    while x % d == 0:
        x //= d
        a += 1
    r = _iroot(x, 2)
    if r * r != x:
        return None
    cond = conductor(d, 1)
    raw = np.zeros(cond.c, dtype=object)
    for t in range(d):
        raw[(t * t) % d] += 1
    g = CycloScalar(d, 1, cond.reduce(raw), 1)
    return g ** a * CycloScalar.from_rational(d, r)


class PhasedGate:
    """A matrix plus a scalar phase chosen so (phase * base)**d == I."""

    __slots__ = ("base", "phase")

    def __init__(self, base, phase):
        self.base = base
        self.phase = phase

    def matrix(self):
        return self.base.scale(self.phase).demote_min()

    def __repr__(self):
        return "PhasedGate(%r, phase=%r)" % (self.base, self.phase)


def _corrections_reason(M):
    d = M.d
    lam = M.pow_int(d).scalar_if_scalar()
    if lam is None or lam.is_zero():
        return None, "power_not_scalar"
    lam = lam.demote_min()
    rho = lam.abs2()
    if not rho.is_rational():
        return None, "norm_not_dth_power"
    s = _root_fraction(rho.as_fraction(), d)
    if s is None:
        return None, "norm_not_dth_power"
    tau = _norm_witness(d, s.numerator * s.denominator)
    if tau is None:
        return None, "no_norm_witness"
    taubar = tau.conjugate() * CycloScalar.from_rational(d, Fraction(1, s.denominator))
    # unit = lam / tau_s**d with tau_s * conj(tau_s) == s, so |unit| == 1
    unit = lam * taubar ** d * CycloScalar.from_rational(d, 1 / rho.as_fraction())
    unit = unit.demote_min()
    t = root_of_unity_log(np.array(unit.nums, dtype=object), unit.den, unit.cond)
    sign = 1
    if t is None:
        # the quadratic Gauss sum squares to -d when d = 3 mod 4, so the
        # witness can be off by a sign; -unit being a root repairs it
        unit = (-unit).demote_min()
        t = root_of_unity_log(np.array(unit.nums, dtype=object), unit.den, unit.cond)
        sign = -1
        if t is None:
            return None, "unit_not_root"
    c = unit.cond.c
    if t % d == 0:
        m_e = unit.m
        e = (-(t // d)) % c
    else:
        m_e = unit.m + 1
        e = (-t) % (c * d)
    # c0**d == sign * zeta**-t * taubar**d / s**d == sign * zeta**-t * unit / lam
    # and sign * zeta**-t * unit == sign**2 == 1, so c0**d == lam**-1 (d odd)
    c0 = CycloScalar.zeta(d, m_e, e) * taubar * CycloScalar.from_rational(d, Fraction(sign) / s)
    return [PhasedGate(M, c0 * CycloScalar.omega(d, j)) for j in range(d)], None


def order_d_corrections(M):
    """The d scalar rephasings of M with (phase * M)**d == I, or None.

    M**d must be a scalar whose conjugate-norm is the d-th power of a
    rational; the quotient by a norm witness must then be a root of unity.
    Both conditions hold for every representative the surveys emit.
    """
    out, _ = _corrections_reason(M)
    return out


# ---------------------------------------------------------------------------
# catalogs


class LevelCatalog:
    """The distinct phase classes of one level, fingerprint-indexed.

    Representatives are kept in fingerprint-digest order, so repeated runs
    and any jobs split produce identical catalogs.  A digest miss disproves
    membership outright; digest hits are confirmed by exact
    cross-multiplication, so collisions cost time, never correctness.
    """

    def __init__(self, d, n, k, fp, materialize=True):
        self.d = d
        self.n = n
        self.k = k
        self.fp = fp
        self.materialize = materialize
        self.digests = []
        self.sources = []
        self._reps = []
        self._buckets = {}
        self._rebuild = None
        self.meta = {}

    def __len__(self):
        return len(self.digests)

    def _rep(self, idx):
        su = self._reps[idx]
        if su is None:
            su = self._rebuild(self.sources[idx])
        return su

    def representatives(self):
        for idx in range(len(self.digests)):
            yield self._rep(idx)

    def _digest(self, mat):
        return hashlib.sha256(self.fp.key(mat)).digest()

    def add(self, su, source=None):
        """Insert a gate class; False when the class is already present."""
        mat = su.mat.demote_min()
        su = ScaledUnitary(mat, su.scale2)
        dig = self._digest(mat)
        bucket = self._buckets.get(dig)
        if bucket is not None:
            for idx in bucket:
                if equal_up_to_phase(mat, self._rep(idx).mat):
                    return False
        idx = len(self.digests)
        self.digests.append(dig)
        self.sources.append(source)
        self._reps.append(su if self.materialize else None)
        self._buckets.setdefault(dig, []).append(idx)
        return True

    def contains(self, gate):
        """Exact membership of the phase class of gate in this catalog."""
        mat = gate.mat if isinstance(gate, ScaledUnitary) else gate
        mat = mat.demote_min()
        bucket = self._buckets.get(self._digest(mat))
        if not bucket:
            return False
        return any(equal_up_to_phase(mat, self._rep(i).mat) for i in bucket)

    def sort(self):
        order = sorted(range(len(self.digests)), key=lambda i: (self.digests[i], i))
        self.digests = [self.digests[i] for i in order]
        self.sources = [self.sources[i] for i in order]
        self._reps = [self._reps[i] for i in order]
        self._buckets = {}
        for idx, dig in enumerate(self.digests):
            self._buckets.setdefault(dig, []).append(idx)


def _pauli_catalog(d, n, fp):
    cat = LevelCatalog(d, n, 1, fp)
    for pq in product(range(d), repeat=2 * n):
        P = PauliElement(d, 0, pq[:n], pq[n:])
        cat.add(ScaledUnitary.exact(to_matrix(P)), source=("pauli",) + pq)
    cat.sort()
    cat.meta = {"candidates": 0, "pairs": 0}
    return cat


# ---------------------------------------------------------------------------
# the lift from level k-1 to level k


def _mod_eval(fp, mat, pi):
    pv = fp.powvec(pi, mat.m)
    p = fp.primes[pi]
    if mat.nums.dtype == object:
        return _fp_eval_obj(mat.nums, pv, p)
    return K.fp_eval(mat.nums, pv, p)


def _omega_pairs(fp, mats, d):
    """Ordered pairs (a, b) with M_a M_b == omega M_b M_a, exactly.

    The relation is invariant under scaling either side, so raw class
    representatives are fine.  A few product entries are compared mod p
    first, which cuts the N*N grid to roughly the true pairs; each
    survivor is then verified exactly.
    """
    N = len(mats)
    if N == 0:
        return []
    p = fp.primes[0]
    dim = mats[0].dim
    ev = np.empty((N, dim, dim), dtype=np.int64)
    for i, mat in enumerate(mats):
        ev[i] = _mod_eval(fp, mat, 0)
    omega_p = int(fp.powvec(0, 1)[1])
    mask = np.ones((N, N), dtype=bool)
    for r, c in ((0, 0), (0, 1), (1, 0)):
        rows = np.ascontiguousarray(ev[:, r, :])
        cols = np.ascontiguousarray(ev[:, :, c])
        # prod[a, b] == (M_a M_b)[r, c] mod p, and prod.T gives (M_b M_a)[r, c]
        prod = rows @ cols.T % p
        mask &= (prod - omega_p * prod.T) % p == 0
        if not mask.any():
            return []
    out = []
    for a, b in np.argwhere(mask):
        if _omega_commutes(mats[a], mats[b], 1, d):
            out.append((int(a), int(b)))
    return out


def _powers(mat, d):
    out = [ExactMatrix.identity(mat.d, mat.dim, mat.m)]
    for _ in range(d - 1):
        out.append(out[-1] @ mat)
    return out


def _closure_gaps(Up, Vp, catalog):
    d = catalog.d
    gaps = []
    for a in range(d):
        for b in range(d):
            if not catalog.contains(Up[a] @ Vp[b]):
                gaps.append((a, b))
    return gaps


def k_closure_check(T, catalog):
    """Whether every monomial in the tuple members lands inside the catalog.

    For a tuple (U_i, V_i) the products prod_i U_i**a_i V_i**b_i range over
    d**2n gates; they must all sit in the level the catalog describes for
    the tuple to reconstruct a gate one level up.
    """
    d = T.d
    pows = [(_powers(U, d), _powers(V, d)) for U, V in T.pairs]
    if T.n == 1:
        return not _closure_gaps(pows[0][0], pows[0][1], catalog)
    for exps in product(range(d), repeat=2 * T.n):
        M = pows[0][0][exps[0]]
        first = True
        for i, (Up, Vp) in enumerate(pows):
            if not first:
                M = M @ Up[exps[2 * i]]
            M = M @ Vp[exps[2 * i + 1]]
            first = False
        if not catalog.contains(M):
            return False
    return True


def _lift_level(prev, jobs=1, materialize=True):
    d, n, k = prev.d, prev.n, prev.k + 1
    fp = prev.fp

    skipped = {}
    reps = []
    phased = []
    for idx in range(len(prev)):
        su = prev._rep(idx)
        corr, why = _corrections_reason(su.mat)
        if corr is None:
            skipped[why] = skipped.get(why, 0) + 1
            continue
        reps.append(su.mat)
        phased.append(corr[0].matrix())

    pairs = _omega_pairs(fp, reps, d)

    # monomial closure is automatic up to level 3 and a real constraint after
    closure_failures = []
    if k >= 4:
        kept = []
        pow_cache = {}
        for a, b in pairs:
            if a not in pow_cache:
                pow_cache[a] = _powers(phased[a], d)
            if b not in pow_cache:
                pow_cache[b] = _powers(phased[b], d)
            gaps = _closure_gaps(pow_cache[a], pow_cache[b], prev)
            if gaps:
                closure_failures.append({"pair": [a, b], "gaps": gaps})
            else:
                kept.append((a, b))
        pairs = kept

    paulis = []
    for pq in product(range(d), repeat=2 * n):
        paulis.append(to_matrix(PauliElement(d, 0, pq[:n], pq[n:])))

    cat = LevelCatalog(d, n, k, fp, materialize=materialize)

    def rebuild(source):
        _, a, b, pi = source
        G = reconstruct(ConjugateTuple(d, n, [(phased[a], phased[b])]))
        return ScaledUnitary((G.mat @ paulis[pi]).demote_min(), G.scale2)

    cat._rebuild = rebuild

    bounds = np.linspace(0, len(pairs), jobs + 1).astype(int)
    chunks = []
    for ci in range(jobs):
        before = len(cat)
        for a, b in pairs[bounds[ci]:bounds[ci + 1]]:
            G = reconstruct(ConjugateTuple(d, n, [(phased[a], phased[b])]))
            for pi, P in enumerate(paulis):
                su = ScaledUnitary((G.mat @ P).demote_min(), G.scale2)
                if not cat.add(su, source=("pair", a, b, pi)):
                    raise AssertionError(
                        "right-Pauli sweep repeated a class; the pair list is inconsistent"
                    )
        chunks.append(len(cat) - before)

    cat.meta = {
        "candidates": len(reps),
        "skipped": skipped,
        "pairs": len(pairs),
        "closure_failures": closure_failures[:20],
        "closure_failure_count": len(closure_failures),
        "jobs": int(jobs),
        "chunks": chunks,
    }
    cat.sort()
    return cat


# ---------------------------------------------------------------------------
# cache


def _cache_paths(cache_dir, d, n, k):
    stem = os.path.join(cache_dir, "d%d_n%d" % (d, n), "level_%d.json" % k)
    return stem, stem + ".zst"


def _zstd():
    try:
        import zstandard
    except ImportError:
        return None
    return zstandard


def _doc_bytes(su, n):
    return json.dumps(to_interchange(su, n), separators=(",", ":"), sort_keys=True).encode()


def _save_cache(cat, cache_dir):
    plain, compressed = _cache_paths(cache_dir, cat.d, cat.n, cat.k)
    os.makedirs(os.path.dirname(plain), exist_ok=True)
    h = hashlib.sha256()
    for idx in range(len(cat)):
        h.update(_doc_bytes(cat._rep(idx), cat.n))
    from . import __version__

    # jobs/chunks describe the run, not the catalog; keeping them out makes
    # cache files byte-identical for any worker count
    head = {
        "version": 1,
        "library": __version__,
        "conductor": cat.fp.d ** cat.fp.m_max,
        "d": cat.d,
        "n": cat.n,
        "k": cat.k,
        "count": len(cat),
        "content_hash": h.hexdigest(),
        "meta": {k2: v for k2, v in cat.meta.items() if k2 not in ("jobs", "chunks")},
    }
    z = _zstd()
    path = compressed if z else plain
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        out = z.ZstdCompressor().stream_writer(fh, closefd=False) if z else fh
        out.write(json.dumps(head, sort_keys=True)[:-1].encode())
        out.write(b',"gates":[')
        for idx in range(len(cat)):
            if idx:
                out.write(b",")
            out.write(_doc_bytes(cat._rep(idx), cat.n))
        out.write(b"]}")
        if z:
            out.close()
    os.replace(tmp, path)
    return path


def _load_cache(d, n, k, cache_dir, fp):
    plain, compressed = _cache_paths(cache_dir, d, n, k)
    path = compressed if os.path.exists(compressed) else plain
    if not os.path.exists(path):
        return None
    if path.endswith(".zst"):
        z = _zstd()
        if z is None:
            raise ValueError("cache file %s needs the zstandard package" % path)
        with open(path, "rb") as fh:
            raw = z.ZstdDecompressor().stream_reader(fh).read()
    else:
        with open(path, "rb") as fh:
            raw = fh.read()
    doc = json.loads(raw)
    for field, want in (("version", 1), ("d", d), ("n", n), ("k", k)):
        if doc.get(field) != want:
            raise ValueError("cache file %s does not describe level (%d,%d,%d)" % (path, d, n, k))
    gates = doc["gates"]
    if len(gates) != doc["count"]:
        raise ValueError("cache file %s is truncated" % path)
    h = hashlib.sha256()
    for g in gates:
        h.update(json.dumps(g, separators=(",", ":"), sort_keys=True).encode())
    if h.hexdigest() != doc["content_hash"]:
        raise ValueError("cache file %s fails its content hash" % path)
    cat = LevelCatalog(d, n, k, fp)
    for g in gates:
        su, gn = from_interchange(g)
        if gn != n:
            raise ValueError("cache file %s mixes wire counts" % path)
        cat.add(su, source=("cache",))
    cat.sort()
    cat.meta = dict(doc.get("meta") or {})
    cat.meta["from_cache"] = path
    return cat


# ---------------------------------------------------------------------------
# entry points


def enumerate_level(d, n, k, cache_dir=None, jobs=1, materialize=True):
    """The catalog of level-k phase classes on n wires of dimension d.

    cache_dir None picks up the HIERARCHON_CACHE environment variable; pass
    False to force a fresh run.  Lower levels are loaded from cache when
    present, so a run resumes from the highest level already on disk.
    jobs only partitions the sweep bookkeeping; the catalog is identical
    for any value.  materialize=False keeps digests and rebuild recipes
    instead of matrices, for counts that do not fit in memory.
    """
    if k < 1:
        raise ValueError("levels start at 1")
    if n not in (1, 2):
        raise ValueError("n is capped at 2")
    if n == 2 and k >= 2:
        raise ValueError(
            "two-wire enumeration above level 1 is out of reach here "
            "(the Clifford quotient alone has millions of classes); "
            "use the dedicated two-qutrit survey instead"
        )
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV) or False
    fp = fingerprint_context(d)
    if cache_dir:
        cached = _load_cache(d, n, k, cache_dir, fp)
        if cached is not None:
            return cached
    if k == 1:
        cat = _pauli_catalog(d, n, fp)
    else:
        prev = enumerate_level(d, n, k - 1, cache_dir=cache_dir, jobs=jobs)
        cat = _lift_level(prev, jobs=jobs, materialize=materialize)
    if cache_dir and materialize:
        cat.meta["cache_path"] = _save_cache(cat, cache_dir)
    return cat


def membership(G, k, catalogs=None):
    """Exact level-k membership for a ScaledUnitary.

    Level 1 is monomial recognition; higher levels recurse through the
    conjugates of the generator Paulis.  catalogs, when given as
    {level: LevelCatalog}, replaces recursion at the levels it covers.
    """
    if k < 1:
        raise ValueError("levels start at 1")
    d = G.d
    dim = G.dim
    n, dimk = 0, 1
    while dimk < dim:
        dimk *= d
        n += 1
    if dimk != dim or n == 0:
        raise ValueError("gate dimension is not a power of d")
    if catalogs and k in catalogs:
        return catalogs[k].contains(G.mat)
    if k == 1:
        return recognize_pauli(G.mat, up_to_phase=True) is not None
    for i in range(1, n + 1):
        for P in (pauli_z(d, n, i), pauli_x(d, n, i)):
            img = conjugate_action(G, to_matrix(P))
            if not membership(ScaledUnitary.exact(img), k - 1, catalogs):
                return False
    return True
