"""Integer kernels for lattice orbits and finite-group enumeration.

Every kernel is plain Python over numpy arrays. When numba is importable and
``ADELIC_HEIGHTS_NUMBA`` is not set to ``0``, the same source is compiled with
``numba.njit`` and the interpreted version stays reachable as ``.py_func``.

The int64 versions require moduli below ``2**62``; callers switch to object
arrays (Python integers, interpreted path) beyond that.
"""

from __future__ import annotations

import os
import types

import numpy as np

INT64_MODULUS_LIMIT = 1 << 62

_flag = os.environ.get("ADELIC_HEIGHTS_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in ("0", "false", "no", "off")


def _identity_jit(*args, **kwargs):
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


njit = _identity_jit
if USE_NUMBA:
    try:
        import numba
        njit = numba.njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def interpreted(kernel):
    """The pure-Python version of a kernel, calling only pure-Python helpers.

    ``.py_func`` alone is not enough: its globals still point at the compiled
    helpers, which reject arbitrary-precision integers.
    """
    if not hasattr(kernel, "py_func"):
        return kernel
    return _pure_namespace()[kernel.py_func.__name__]


_PURE: dict | None = None


def _pure_namespace() -> dict:
    global _PURE
    if _PURE is None:
        ns = dict(globals())
        for name, obj in list(ns.items()):
            f = getattr(obj, "py_func", None)
            if f is not None:
                ns[name] = types.FunctionType(f.__code__, ns, f.__name__, f.__defaults__, f.__closure__)
        _PURE = ns
    return _PURE


@njit(cache=True)
def mulmod(a, b, m):
    a = a % m
    b = b % m
    if m < 3037000499:
        return (a * b) % m
    r = a - a  # zero of the operand type
    while b > 0:
        if b & 1:
            r = (r + a) % m
        a = (a + a) % m
        b >>= 1
    return r


@njit(cache=True)
def invmod(a, m):
    """Inverse of ``a`` modulo ``m`` (``gcd(a, m) = 1``)."""
    r0, r1 = m, a % m
    s0, s1 = r0 - r0, r0 - r0 + 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % m


@njit(cache=True)
def valuation_capped(x, p, cap):
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


@njit(cache=True)
def hnf_mod(cols, p, k, pk):
    """Canonical upper-triangular column HNF of a lattice containing ``p**k Z^d``.

    ``cols`` is ``d x m`` with ``m >= d`` and entries in ``[0, pk)``. The result
    has diagonal entries ``p**e_i`` (``e_i <= k``, stored as ``pk`` when
    ``e_i = k``) and entries right of the diagonal reduced into
    ``[0, p**e_i)``.
    """
    d = cols.shape[0]
    m = cols.shape[1]
    c = cols.copy()
    h = np.zeros_like(cols[:, :d])
    active = np.ones(m, dtype=np.bool_)
    for r in range(d - 1, -1, -1):
        best = -1
        bv = k
        for j in range(m):
            if active[j]:
                v = valuation_capped(c[r, j], p, k)
                if v < bv:
                    bv = v
                    best = j
        if best < 0:
            h[r, r] = pk
            continue
        pe = p ** bv
        u = c[r, best] // pe
        uinv = invmod(u, pk)
        for i in range(d):
            c[i, best] = mulmod(c[i, best], uinv, pk)
        active[best] = False
        for j in range(m):
            if active[j] and c[r, j] != 0:
                q = c[r, j] // pe
                for i in range(d):
                    c[i, j] = (c[i, j] - mulmod(q, c[i, best], pk)) % pk
        for i in range(d):
            h[i, r] = c[i, best]
    for j in range(d):
        for i in range(j - 1, -1, -1):
            q = h[i, j] // h[i, i]
            if q != 0:
                for t in range(i + 1):
                    h[t, j] = (h[t, j] - mulmod(q, h[t, i], pk)) % pk
    return h


@njit(cache=True)
def apply_generator(lattices, g, s, p, k, pk, index_exp, out, status):
    """Image of each scaled lattice under ``g = G / p**s``.

    ``lattices[n]`` is the HNF of ``p**B L``. ``G`` holds ``p**s g`` reduced
    modulo ``p**(k+s)``. ``status[n]`` is 0 on success, 1 when the image leaves
    ``p**-B Z_p^d`` and 2 when it no longer contains ``p**k Z_p^d`` (detected by
    the exponent sum of the HNF diagonal falling short of ``index_exp``).
    """
    n = lattices.shape[0]
    d = lattices.shape[1]
    ps = p ** s
    big = pk * ps
    cols = np.zeros_like(lattices[0])
    for idx in range(n):
        ok = True
        for j in range(d):
            for i in range(d):
                acc = cols[0, 0] - cols[0, 0]
                for t in range(d):
                    acc = (acc + mulmod(g[i, t], lattices[idx, t, j], big)) % big
                if acc % ps != 0:
                    ok = False
                cols[i, j] = (acc // ps) % pk
        if not ok:
            status[idx] = 1
            continue
        h = hnf_mod(cols, p, k, pk)
        e = 0
        for i in range(d):
            e += valuation_capped(h[i, i], p, k) if h[i, i] != pk else k
        if e != index_exp:
            status[idx] = 2
            continue
        for i in range(d):
            for j in range(d):
                out[idx, i, j] = h[i, j]
        status[idx] = 0


@njit(cache=True)
def det_mod_prime(a, q):
    n = a.shape[0]
    m = a.copy()
    det = 1
    for c in range(n):
        piv = -1
        for r in range(c, n):
            if m[r, c] % q != 0:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != c:
            for t in range(n):
                tmp = m[c, t]
                m[c, t] = m[piv, t]
                m[piv, t] = tmp
            det = -det
        det = (det * m[c, c]) % q
        inv = invmod(m[c, c] % q, q)
        for r in range(c + 1, n):
            f = (m[r, c] * inv) % q
            if f != 0:
                for t in range(n):
                    m[r, t] = (m[r, t] - f * m[c, t]) % q
    return det % q


@njit(cache=True)
def count_invertible_mod(n, q):
    """Number of invertible ``n x n`` matrices over ``Z/q`` (``q`` prime)."""
    total = q ** (n * n)
    a = np.zeros((n, n), dtype=np.int64)
    count = 0
    for code in range(total):
        x = code
        for i in range(n):
            for j in range(n):
                a[i, j] = x % q
                x //= q
        if det_mod_prime(a, q) != 0:
            count += 1
    return count


@njit(cache=True)
def _is_identity(a):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            if a[i, j] != (1 if i == j else 0):
                return False
    return True


@njit(cache=True)
def torsion_scan(n, bound, modulus, max_order, witness):
    """Scan integer ``n x n`` matrices with entries in ``[-bound, bound]``.

    Returns ``(finite, bad)``: how many have order in ``1..max_order`` and how
    many of those are nontrivial yet congruent to the identity modulo
    ``modulus``. The first such element is copied into ``witness``.
    """
    side = 2 * bound + 1
    total = side ** (n * n)
    a = np.zeros((n, n), dtype=np.int64)
    pw = np.zeros((n, n), dtype=np.int64)
    tmp = np.zeros((n, n), dtype=np.int64)
    finite = 0
    bad = 0
    for code in range(total):
        x = code
        for i in range(n):
            for j in range(n):
                a[i, j] = x % side - bound
                x //= side
        order = 0
        pw[:, :] = a
        for e in range(1, max_order + 1):
            if _is_identity(pw):
                order = e
                break
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for t in range(n):
                        acc += pw[i, t] * a[t, j]
                    tmp[i, j] = acc
            pw[:, :] = tmp
        if order == 0:
            continue
        finite += 1
        if order == 1:
            continue
        congruent = True
        for i in range(n):
            for j in range(n):
                target = 1 if i == j else 0
                if (a[i, j] - target) % modulus != 0:
                    congruent = False
        if congruent:
            if bad == 0:
                witness[:, :] = a
            bad += 1
    return finite, bad
