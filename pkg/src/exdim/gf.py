"""Dense linear algebra over a small prime field GF(p).

Matrices are numpy int64 arrays with entries reduced to ``0..p-1``.  Only
what the representation builder needs is here: row reduction, rank, kernels,
solving and inversion.
"""

import numpy as np


def reduce(a, p):
    return np.mod(np.asarray(a, dtype=np.int64), p)


def rref(a, p):
    """Return ``(R, pivots)``, the reduced row echelon form of ``a`` mod ``p``."""
    r = reduce(a, p).copy()
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), -1, p)
        r[row] = (r[row] * inv) % p
        others = np.nonzero(r[:, col])[0]
        others = others[others != row]
        if others.size:
            r[others] = (r[others] - np.outer(r[others, col], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a, p):
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a, p):
    """Columns of the returned ``(n, k)`` matrix form a basis of ``ker a``."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[1]
    if a.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=np.int64)
    r, pivots = rref(a, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-r[i, f]) % p
    return basis


def solve(a, b, p):
    """A solution ``x`` of ``a @ x = b`` (``b`` may be a matrix), or None."""
    a = reduce(a, p)
    b = reduce(b, p)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    n = a.shape[1]
    if a.shape[0] == 0 or n == 0:
        if b.size and np.any(b):
            return None
        return np.zeros((n,) if vec else (n, b.shape[1]), dtype=np.int64)
    aug = np.concatenate([a, b], axis=1)
    r, pivots = rref(aug, p)
    if any(pc >= n for pc in pivots):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, n:]
    return x[:, 0] if vec else x


def inverse(a, p):
    a = reduce(a, p)
    n = a.shape[0]
    if a.shape != (n, n):
        return None
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    r, pivots = rref(np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1), p)
    if pivots[:n] != list(range(n)):
        return None
    return r[:, n:]


def is_invertible(a, p):
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


def complement_basis(sub, ambient, p):
    """Pick rows of ``ambient`` extending the row space of ``sub`` to that of
    ``sub`` plus ``ambient``, greedily in order.  Returns the chosen rows."""
    ambient = np.asarray(ambient, dtype=np.int64)
    d = ambient.shape[1]
    if d == 0 or ambient.shape[0] == 0:
        return np.zeros((0, d), dtype=np.int64)
    sub = np.asarray(sub, dtype=np.int64).reshape(-1, d)
    stacked = np.concatenate([sub, ambient], axis=0)
    # pivot columns of the transpose mark the greedy independent rows
    _, pivots = rref(stacked.T, p)
    k = sub.shape[0]
    chosen = [c - k for c in pivots if c >= k]
    return ambient[chosen].copy() if chosen else np.zeros((0, d), dtype=np.int64)
