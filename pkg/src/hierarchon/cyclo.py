"""Exact arithmetic in Q(zeta_c) for prime-power conductors c = d**m, d odd.

Elements are integer coefficient vectors over the power basis
1, zeta, ..., zeta**(phi-1) with phi = phi(d**m) = d**m - d**(m-1), together
with a positive denominator.  The only relation ever needed is the minimal
polynomial of zeta: sum_j zeta**(j * d**(m-1)) = 0 for j = 0..d-1, which turns
any exponent e >= phi into d-1 basis terms with coefficient -1.
"""

from fractions import Fraction
from functools import lru_cache, reduce
import math

import numpy as np


@lru_cache(maxsize=None)
def conductor(d, m):
    return Conductor(d, m)


class Conductor:
    """Reduction, conjugation and promotion tables for one c = d**m."""

    def __init__(self, d, m):
        if d < 3 or d % 2 == 0 or m < 1:
            raise ValueError("conductor must be a power of an odd prime")
        self.d = d
        self.m = m
        self.c = d ** m
        self.step = d ** (m - 1)
        self.phi = self.c - self.step
        # E[e] = coefficients of zeta**e on the power basis, for all e < c
        E = np.zeros((self.c, self.phi), dtype=np.int64)
        E[: self.phi] = np.eye(self.phi, dtype=np.int64)
        for e in range(self.phi, self.c):
            r = e - self.phi
            for j in range(d - 1):
                E[e, j * self.step + r] = -1
        self._E = E
        self._E_tail = np.ascontiguousarray(E[self.phi:])
        self._conj = np.ascontiguousarray(E[(-np.arange(self.phi)) % self.c])

    def reduce(self, arr):
        """(..., c) raw exponent tensor -> (..., phi) reduced tensor."""
        head = arr[..., : self.phi]
        tail = arr[..., self.phi:]
        if tail.shape[-1] == 0:
            return head.copy()
        return head + tail @ self._E_tail

    def zeta_vec(self, e, dtype=np.int64):
        return self._E[e % self.c].astype(dtype)

    def conj(self, arr):
        """Complex conjugation zeta -> zeta**-1 on a reduced (..., phi) tensor."""
        return arr @ self._conj

    @lru_cache(maxsize=None)
    def _galois_table(self, u):
        if math.gcd(u, self.d) != 1:
            raise ValueError("galois map needs gcd(u, c) = 1")
        return np.ascontiguousarray(self._E[(u * np.arange(self.phi)) % self.c])

    def galois(self, arr, u):
        return np.asarray(arr) @ self._galois_table(u % self.c)

    def units(self):
        return [u for u in range(1, self.c) if u % self.d != 0]

    def promote_tensor(self, arr, m_new):
        """Reindex a reduced tensor into the conductor d**m_new >= d**m."""
        if m_new < self.m:
            raise ValueError("promotion cannot shrink the conductor")
        if m_new == self.m:
            return np.array(arr)
        big = conductor(self.d, m_new)
        f = big.c // self.c
        out = np.zeros(arr.shape[:-1] + (big.phi,), dtype=arr.dtype)
        out[..., f * np.arange(self.phi)] = arr
        return out

    def demote_tensor(self, arr, m_new):
        """Drop to conductor d**m_new; None if the support does not allow it."""
        if m_new > self.m:
            raise ValueError("demotion cannot grow the conductor")
        if m_new == self.m:
            return np.array(arr)
        small = conductor(self.d, m_new)
        f = self.c // small.c
        keep = arr[..., f * np.arange(small.phi)]
        mask = np.ones(self.phi, dtype=bool)
        mask[f * np.arange(small.phi)] = False
        tensor_any = np.any(np.asarray(arr[..., mask]) != 0)
        if tensor_any:
            return None
        return keep.copy()

    def min_level(self, arr):
        """Smallest m_new such that demote_tensor(arr, m_new) is valid."""
        m_new = self.m
        probe = np.asarray(arr)
        while m_new > 1:
            smaller = conductor(self.d, m_new).demote_tensor(probe, m_new - 1)
            if smaller is None:
                break
            probe = smaller
            m_new -= 1
        return m_new


def normalize(nums, den):
    """Divide out gcd(content, den); den stays positive.  Works on any shape."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    arr = np.asarray(nums)
    if arr.dtype == object:
        g = reduce(math.gcd, (abs(int(x)) for x in arr.flat), 0)
    else:
        g = int(np.gcd.reduce(np.abs(arr), axis=None)) if arr.size else 0
    g = math.gcd(g, abs(den))
    if den < 0:
        g = -g
    if g != 1:
        arr = arr // g
        den = den // g
    return arr, den


def root_of_unity_log(nums, den, cond):
    """If nums/den == zeta_c**t exactly, return t; otherwise None.

    Reduced forms of roots of unity have exactly two shapes: a standard basis
    vector (t < phi), or d-1 coefficients -1 on the coset r + step*Z
    (t = phi + r).  Anything else, including unit-circle field elements that
    are not roots of unity, maps to None.
    """
    nums = np.asarray(nums)
    if den != 1:
        return None
    support = np.flatnonzero(nums)
    if support.size == 1:
        t = int(support[0])
        if nums[t] == 1:
            return t
        return None
    if support.size == cond.d - 1:
        r = int(support[0]) % cond.step
        want = r + cond.step * np.arange(cond.d - 1)
        if np.array_equal(support, want) and all(int(nums[e]) == -1 for e in want):
            return cond.phi + r
    return None


def conv_reduce_int(a, b, cond):
    """Exact product of two reduced coefficient vectors, via Python ints."""
    c = cond.c
    raw = [0] * c
    for u, av in enumerate(a):
        av = int(av)
        if av:
            for v, bv in enumerate(b):
                if bv:
                    raw[(u + v) % c] += av * int(bv)
    out = list(raw[: cond.phi])
    for e in range(cond.phi, c):
        coeff = raw[e]
        if coeff:
            r = e - cond.phi
            for j in range(cond.d - 1):
                out[j * cond.step + r] -= coeff
    return out


def norm_inverse(nums, den, cond):
    """(nums/den)**-1 as (nums', den'), via the product of Galois conjugates.

    1/a = den * prod_{u != 1} sigma_u(nums) / N, where N = prod_u sigma_u(nums)
    is a plain integer.  Runs on Python ints; the conjugate product can exceed
    int64 long before the inputs do.
    """
    vec = [int(x) for x in np.asarray(nums)]
    if not any(vec):
        raise ZeroDivisionError("zero divisor")
    prod = None
    for u in cond.units():
        if u == 1:
            continue
        gal = galois_int(vec, u, cond)
        prod = gal if prod is None else conv_reduce_int(prod, gal, cond)
    if prod is None:  # phi = 1 cannot happen for d >= 3, but keep it honest
        prod = [1] + [0] * (cond.phi - 1)
    full = conv_reduce_int(prod, vec, cond)
    if any(full[1:]):
        raise ArithmeticError("field norm is not rational; reduction is broken")
    N = full[0]
    out = np.array([den * x for x in prod], dtype=object)
    out, N = normalize(out, N)
    small = as_int64_if_safe(out)
    return small, N


def galois_int(vec, u, cond):
    out = [0] * cond.phi
    for e, x in enumerate(vec):
        if x:
            row = cond._E[(u * e) % cond.c]
            for i in np.flatnonzero(row):
                out[int(i)] += int(x) * int(row[i])
    return out


def as_int64_if_safe(arr):
    arr = np.asarray(arr)
    if arr.dtype != object:
        return arr
    lim = 2 ** 62
    if all(-lim < int(x) < lim for x in arr.flat):
        return arr.astype(np.int64)
    return arr


def max_abs(arr):
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(x)) for x in arr.flat)
    return int(np.max(np.abs(arr)))


class CycloScalar:
    """A single element of Q(zeta_{d**m}), immutable.

    Mostly a convenience wrapper for tests and entry-level inspection; the
    matrix layer works on whole coefficient tensors and never builds these in
    bulk.
    """

    __slots__ = ("d", "m", "nums", "den")

    def __init__(self, d, m, nums, den=1):
        cond = conductor(d, m)
        arr = np.asarray(nums, dtype=object).reshape(-1)
        if arr.shape != (cond.phi,):
            raise ValueError("expected %d coefficients" % cond.phi)
        arr, den = normalize(arr, int(den))
        self.d = d
        self.m = m
        self.nums = tuple(int(x) for x in arr)
        self.den = den

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, d, m=1):
        return cls.from_rational(d, Fraction(0), m)

    @classmethod
    def from_rational(cls, d, q, m=1):
        q = Fraction(q)
        cond = conductor(d, m)
        nums = [q.numerator] + [0] * (cond.phi - 1)
        return cls(d, m, nums, q.denominator)

    @classmethod
    def zeta(cls, d, m, e=1):
        cond = conductor(d, m)
        return cls(d, m, cond.zeta_vec(e, dtype=object), 1)

    @classmethod
    def omega(cls, d, e=1):
        return cls.zeta(d, 1, e)

    # -- structure ----------------------------------------------------

    @property
    def cond(self):
        return conductor(self.d, self.m)

    def promote(self, m_new):
        if m_new == self.m:
            return self
        vec = self.cond.promote_tensor(np.array(self.nums, dtype=object), m_new)
        return CycloScalar(self.d, m_new, vec, self.den)

    def demote_min(self):
        cond = self.cond
        arr = np.array(self.nums, dtype=object)
        m_new = cond.min_level(arr)
        if m_new == self.m:
            return self
        out = arr
        for step_m in range(self.m - 1, m_new - 1, -1):
            out = conductor(self.d, step_m + 1).demote_tensor(out, step_m)
        return CycloScalar(self.d, m_new, out, self.den)

    def _pair(self, other):
        if isinstance(other, CycloScalar):
            if other.d != self.d:
                raise ValueError("mixed base primes")
            m = max(self.m, other.m)
            return self.promote(m), other.promote(m)
        return self._pair(CycloScalar.from_rational(self.d, Fraction(other), 1))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        a, b = self._pair(other)
        nums = [x * b.den + y * a.den for x, y in zip(a.nums, b.nums)]
        return CycloScalar(a.d, a.m, nums, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.d, self.m, [-x for x in self.nums], self.den)

    def __sub__(self, other):
        return self + (-self._pair(other)[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        nums = conv_reduce_int(a.nums, b.nums, a.cond)
        return CycloScalar(a.d, a.m, nums, a.den * b.den)

    __rmul__ = __mul__

    def inverse(self):
        nums, den = norm_inverse(
            np.array(self.nums, dtype=object), self.den, self.cond
        )
        return CycloScalar(self.d, self.m, np.asarray(nums, dtype=object), den)

    def __truediv__(self, other):
        a, b = self._pair(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = CycloScalar.from_rational(self.d, 1, self.m)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        vec = self.cond.conj(np.array(self.nums, dtype=object))
        return CycloScalar(self.d, self.m, vec, self.den)

    def galois(self, u):
        vec = np.array(galois_int(list(self.nums), u, self.cond), dtype=object)
        return CycloScalar(self.d, self.m, vec, self.den)

    def abs2(self):
        return self * self.conjugate()

    # -- predicates -----------------------------------------------------

    def is_zero(self):
        return not any(self.nums)

    def is_rational(self):
        return not any(self.nums[1:])

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError("not rational: %r" % (self,))
        return Fraction(self.nums[0], self.den)

    def root_of_unity_log(self):
        """t with self == zeta_{d**m}**t at this conductor; raises otherwise."""
        t = root_of_unity_log(
            np.array(self.nums, dtype=object), self.den, self.cond
        )
        if t is None:
            raise ValueError("not a pure phase")
        return t

    # -- comparison ------------------------------------------------------

    def _canon(self):
        s = self.demote_min()
        return (s.d, s.m, s.nums, s.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloScalar.from_rational(self.d, Fraction(other), 1)
        if not isinstance(other, CycloScalar):
            return NotImplemented
        if self.d != other.d:
            return self.is_rational() and other.is_rational() \
                and self.as_fraction() == other.as_fraction()
        a, b = self._pair(other)
        return a.nums == b.nums and a.den == b.den

    def __hash__(self):
        return hash(self._canon())

    def __repr__(self):
        cst = "z%d" % self.cond.c
        terms = []
        for e, x in enumerate(self.nums):
            if x:
                terms.append("%d" % x if e == 0 else "%d*%s^%d" % (x, cst, e))
        body = " + ".join(terms) if terms else "0"
        if self.den != 1:
            return "(%s)/%d" % (body, self.den)
        return body
