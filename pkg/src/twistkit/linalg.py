"""Exact integer linear algebra: Smith normal form, kernel/quotient
presentations for chain complexes, and GF(2) nullspaces.

Everything here is exact.  Matrices are numpy int64 arrays; if entries grow
past a safe working range mid-computation, the whole computation is redone
with Python-integer (object dtype) arrays.  Results never wrap around.

Pivoting is deterministic: the pivot is always the nonzero entry of minimal
absolute value with the lowest (row, column) index, so every basis produced
downstream is reproducible bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Redo with big ints once any tracked entry passes this magnitude.  One
# elimination step at most squares the working magnitude, so staying below
# 2**25 keeps every int64 intermediate far from 2**63.
_GUARD = 1 << 25


class _NeedsBigInts(Exception):
    pass


def intmat(data, shape=None):
    """Coerce ``data`` to a 2-d int64 array; ``shape`` disambiguates empties."""
    a = np.array(data, dtype=np.int64)
    if a.size == 0:
        if shape is None and a.ndim == 2:
            shape = a.shape
        a = a.reshape(shape if shape is not None else (0, 0))
    if a.ndim != 2:
        raise ValueError("expected a two-dimensional array")
    return a


def zeros(m, n):
    return np.zeros((m, n), dtype=np.int64)


def eye(n, dtype=np.int64):
    if dtype is object:
        a = np.zeros((n, n), dtype=object)
        for i in range(n):
            a[i, i] = 1
        return a
    return np.eye(n, dtype=np.int64)


def checked_matmul(a, b):
    """Exact matrix product, escalating to Python ints if int64 could wrap."""
    if a.dtype == object or b.dtype == object:
        return np.dot(a.astype(object), b.astype(object))
    inner = max(1, a.shape[1])
    ma = int(np.abs(a).max(initial=0))
    mb = int(np.abs(b).max(initial=0))
    if ma * mb * inner >= (1 << 62):
        return np.dot(a.astype(object), b.astype(object))
    return a @ b


@dataclass
class SmithForm:
    """S @ A @ T == D with S, T unimodular and D diagonal (divisibility chain).

    ``diag`` lists the min(m, n) diagonal entries, nonnegative, each dividing
    the next among the nonzero ones, zeros last.  Transform matrices are only
    populated when requested.
    """

    shape: tuple
    diag: tuple
    S: np.ndarray | None = None
    S_inv: np.ndarray | None = None
    T: np.ndarray | None = None
    T_inv: np.ndarray | None = None

    @property
    def rank(self):
        return sum(1 for d in self.diag if d != 0)

    def d(self, i):
        return self.diag[i] if i < len(self.diag) else 0


def smith_form(a, left=False, right=False):
    """Smith normal form of an integer matrix with optional transforms."""
    a = np.asarray(a)

    def as_big(x):
        big = np.empty(x.shape, dtype=object)
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                big[i, j] = int(x[i, j])
        return big

    if a.dtype == object:
        return _smith(as_big(a), left, right, object)
    try:
        return _smith(a.astype(np.int64, copy=True), left, right, np.int64)
    except _NeedsBigInts:
        return _smith(as_big(a), left, right, object)


def _smith(d, left, right, dtype):
    m, n = d.shape
    s = eye(m, dtype) if left else None
    si = eye(m, dtype) if left else None
    t = eye(n, dtype) if right else None
    ti = eye(n, dtype) if right else None

    def guard():
        if dtype is object:
            return
        hi = int(np.abs(d).max(initial=0))
        for x in (s, si, t, ti):
            if x is not None:
                hi = max(hi, int(np.abs(x).max(initial=0)))
        if hi >= _GUARD:
            raise _NeedsBigInts

    def swap_rows(i, j):
        if i == j:
            return
        d[[i, j], :] = d[[j, i], :]
        if s is not None:
            s[[i, j], :] = s[[j, i], :]
            si[:, [i, j]] = si[:, [j, i]]

    def swap_cols(i, j):
        if i == j:
            return
        d[:, [i, j]] = d[:, [j, i]]
        if t is not None:
            t[:, [i, j]] = t[:, [j, i]]
            ti[[i, j], :] = ti[[j, i], :]

    def negate_row(i):
        d[i, :] = -d[i, :]
        if s is not None:
            s[i, :] = -s[i, :]
            si[:, i] = -si[:, i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        d[dst, :] += q * d[src, :]
        if s is not None:
            s[dst, :] += q * s[src, :]
            si[:, src] -= q * si[:, dst]

    def add_col(dst, src, q):
        d[:, dst] += q * d[:, src]
        if t is not None:
            t[:, dst] += q * t[:, src]
            ti[src, :] -= q * ti[dst, :]

    k = 0
    limit = min(m, n)
    while k < limit:
        sub = d[k:, k:]
        nz = sub != 0
        if not nz.any():
            break
        absd = np.where(nz, abs(sub), 0)
        # Lowest (row, col) among minimal-|entry| pivots; argmin is row-major.
        flat = np.where(nz, absd, absd.max() + 1).argmin()
        r, c = divmod(int(flat), sub.shape[1])
        swap_rows(k, k + r)
        swap_cols(k, k + c)
        while True:
            if d[k, k] < 0:
                negate_row(k)
            piv = d[k, k]
            col = d[k + 1 :, k]
            if col.size and (col != 0).any():
                qs = col // piv
                rows = np.nonzero(qs != 0)[0]
                for i in rows:
                    add_row(k + 1 + int(i), k, -qs[int(i)])
            row = d[k, k + 1 :]
            if row.size and (row != 0).any():
                qs = row // piv
                cols = np.nonzero(qs != 0)[0]
                for j in cols:
                    add_col(k + 1 + int(j), k, -qs[int(j)])
            guard()
            colrest = d[k + 1 :, k]
            rowrest = d[k, k + 1 :]
            col_clean = not (colrest.size and (colrest != 0).any())
            row_clean = not (rowrest.size and (rowrest != 0).any())
            if col_clean and row_clean:
                break
            # Leftover remainders are smaller than the pivot; promote the
            # smallest one and keep reducing.
            best = None
            for i in range(k, m):
                v = int(d[i, k]) if i > k else int(d[k, k])
                if v != 0 and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, k)
            for j in range(k + 1, n):
                v = int(d[k, j])
                if v != 0 and (best is None or abs(v) < best[0]):
                    best = (abs(v), k, j)
            _, bi, bj = best
            swap_rows(k, bi)
            swap_cols(k, bj)
        k += 1

    # Enforce the divisibility chain d_i | d_{i+1} on the diagonal.
    def fix_pair(i, j):
        # diag(a, b) with a not dividing b  ->  diag(gcd, lcm)
        a = int(d[i, i])
        b = int(d[j, j])
        add_col(i, j, 1)  # puts b at (j, i)
        g, x, y = _xgcd(a, b)
        # unimodular row op [[x, y], [-b/g, a/g]] on rows (i, j)
        ri = x * d[i, :] + y * d[j, :]
        rj = (-b // g) * d[i, :] + (a // g) * d[j, :]
        d[i, :], d[j, :] = ri, rj
        if s is not None:
            si_i = x * s[i, :] + y * s[j, :]
            si_j = (-b // g) * s[i, :] + (a // g) * s[j, :]
            s[i, :], s[j, :] = si_i, si_j
            # inverse of [[x, y], [-b/g, a/g]] is [[a/g, -y], [b/g, x]]
            ci = (a // g) * si[:, i] + (b // g) * si[:, j]
            cj = (-y) * si[:, i] + x * si[:, j]
            si[:, i], si[:, j] = ci, cj
        q = int(d[i, j]) // int(d[i, i])
        if q:
            add_col(j, i, -q)

    while True:
        changed = False
        for i in range(limit - 1):
            a = int(d[i, i])
            b = int(d[i + 1, i + 1])
            if a == 0 and b != 0:
                swap_rows(i, i + 1)
                swap_cols(i, i + 1)
                changed = True
            elif a != 0 and b % a != 0:
                fix_pair(i, i + 1)
                changed = True
        guard()
        if not changed:
            break
    for i in range(limit):
        if d[i, i] < 0:
            negate_row(i)

    diag = tuple(int(d[i, i]) for i in range(limit))
    return SmithForm((m, n), diag, s, si, t, ti)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class QuotientPresentation:
    """ker(A) / im(B) for integer matrices with A @ B == 0.

    Produces a deterministic basis of the quotient: free generators first,
    then torsion generators whose orders form a divisibility chain.  Also
    converts arbitrary kernel vectors to coordinates in that basis.
    """

    def __init__(self, a_out, b_in):
        a_out = np.asarray(a_out)
        b_in = np.asarray(b_in)
        self.ambient = a_out.shape[1]
        if b_in.shape[0] != self.ambient:
            raise ValueError("shape mismatch between outgoing and incoming maps")
        sf = smith_form(a_out, right=True)
        ker_js = [j for j in range(self.ambient) if sf.d(j) == 0]
        self._ker_js = np.array(ker_js, dtype=np.intp)
        self._kbasis = sf.T[:, self._ker_js] if self.ambient else zeros(0, 0)
        self._t_inv = sf.T_inv
        k = len(ker_js)

        bk_full = checked_matmul(sf.T_inv, b_in) if self.ambient else zeros(0, b_in.shape[1])
        mask = np.ones(self.ambient, dtype=bool)
        mask[self._ker_js] = False
        if bk_full[mask, :].size and (bk_full[mask, :] != 0).any():
            raise ValueError("incoming map does not land in the kernel")
        bk = bk_full[self._ker_js, :]

        qf = smith_form(bk, left=True)
        self._s = qf.S
        self._s_inv = qf.S_inv
        dvals = [qf.d(i) for i in range(k)]
        self._orders = dvals
        self._free_idx = [i for i, v in enumerate(dvals) if v == 0]
        self._tor_idx = [i for i, v in enumerate(dvals) if v >= 2]
        self.rank = len(self._free_idx)
        self.torsion = tuple(dvals[i] for i in self._tor_idx)

        gens = []
        for i in self._free_idx + self._tor_idx:
            gens.append(checked_matmul(self._kbasis, self._s_inv[:, [i]])[:, 0])
        self.generators = [tuple(int(x) for x in g) for g in gens]

    @property
    def n_generators(self):
        return self.rank + len(self.torsion)

    def kernel_coords(self, vec):
        vec = np.asarray(vec).reshape(self.ambient, 1)
        y = checked_matmul(self._t_inv, vec)[:, 0]
        mask = np.ones(self.ambient, dtype=bool)
        mask[self._ker_js] = False
        if y[mask].size and (y[mask] != 0).any():
            raise ValueError("vector is not a cycle")
        return y[self._ker_js]

    def coords(self, vec):
        """Coordinates of a cycle in the (free..., torsion...) basis."""
        x = self.kernel_coords(vec)
        u = checked_matmul(self._s, x.reshape(-1, 1))[:, 0]
        out = [int(u[i]) for i in self._free_idx]
        out += [int(u[i]) % self._orders[i] for i in self._tor_idx]
        return tuple(out)

    def is_zero_class(self, vec):
        return all(c == 0 for c in self.coords(vec))


def gf2_nullspace(rows, nvars):
    """Basis (as bitmasks) of the solution space of homogeneous GF(2) rows."""
    pivots = {}
    for row in rows:
        r = row
        while r:
            p = r.bit_length() - 1
            if p in pivots:
                r ^= pivots[p]
            else:
                pivots[p] = r
                break
    basis = []
    for v in range(nvars):
        if v in pivots:
            continue
        vec = 1 << v
        # Solve pivot variables lowest-first: each pivot row only involves
        # bits at or below its pivot position.
        for p in sorted(pivots):
            if bin(pivots[p] & vec & ~(1 << p)).count("1") % 2:
                vec |= 1 << p
        basis.append(vec)
    return basis
