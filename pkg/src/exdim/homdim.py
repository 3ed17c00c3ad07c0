"""Projective objects, projective and global dimension.

pd of an indecomposable C is 0 when C is projective and otherwise
``1 + min max pd(K_i)`` over conflations ``K -> P -> C`` with P in
``add(projectives)`` (the max runs over the summands ``K_i`` of K).  The
fixpoint is computed level by level: ``L_0`` is the projectives and ``L_n``
adds every C with a syzygy supported in ``L_{n-1}``.  Indecomposables never
reached form a closed set which certifies infinite pd.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Conflation, Subcat
from .errors import CapacityOverflow, ModelInconsistency, NoEnoughProjectives

DEFAULT_BOUND = 32

FINITE = "finite"
INFINITE = "infinite"
ATLEAST = "atleast"


@dataclass(frozen=True)
class DimValue:
    kind: str
    n: int = 0
    cycle: tuple = ()

    @classmethod
    def finite(cls, n):
        return cls(FINITE, int(n))

    @classmethod
    def infinite(cls, cycle=()):
        return cls(INFINITE, 0, tuple(cycle))

    @classmethod
    def at_least(cls, b):
        return cls(ATLEAST, int(b))

    @property
    def is_finite(self):
        return self.kind == FINITE

    @property
    def is_infinite(self):
        return self.kind == INFINITE

    @property
    def resolved(self):
        return self.kind != ATLEAST

    def value(self):
        """An int, ``math.inf``, or None when only a lower bound is known."""
        if self.kind == FINITE:
            return self.n
        if self.kind == INFINITE:
            return math.inf
        return None

    def __str__(self):
        if self.kind == FINITE:
            return str(self.n)
        if self.kind == INFINITE:
            return "inf"
        return f">={self.n}"


def dim_max(values):
    """Supremum of DimValues; infinity beats a lower bound."""
    values = list(values)
    if not values:
        return DimValue.finite(0)
    for v in values:
        if v.is_infinite:
            return v
    top = max(v.n for v in values)
    if any(v.kind == ATLEAST for v in values):
        return DimValue.at_least(top)
    return DimValue.finite(top)


@dataclass
class PdCertificate:
    chain: list
    beyond_cap: list = field(default_factory=list)

    def __len__(self):
        return len(self.chain)


def _unit_rows(table, c):
    right = table.right
    return np.nonzero((table.right_mask == (1 << c)) & (right[:, c] == 1))[0]


def projectives(cat):
    """Indecomposables P such that every conflation ending in P splits."""
    t = cat.table
    nonsplit = t.nonsplit_indices()
    bad = {}
    for k in nonsplit:
        m = int(t.right_mask[k])
        if m and m & (m - 1) == 0:
            c = m.bit_length() - 1
            bad.setdefault(c, k)
    derived = Subcat(cat.universe, frozenset(i for i in range(len(cat.universe)) if i not in bad))
    if cat.declared_projectives is not None and cat.declared_projectives != derived:
        extra = cat.declared_projectives.support - derived.support
        if extra:
            c = min(extra)
            raise ModelInconsistency(
                f"{cat.name}: declared projective {cat.universe.labels[c]} is the end of the "
                f"non-split conflation {t.conflation(bad[c])}")
        missing = min(derived.support - cat.declared_projectives.support)
        raise ModelInconsistency(
            f"{cat.name}: {cat.universe.labels[missing]} is projective but not declared")
    return derived


def _proj_mask(cat):
    return projectives(cat).mask


def _syzygy_rows(cat, c, pmask=None):
    """Rows ``(K, P, C)`` of the table with C the indec ``c`` and P projective."""
    t = cat.table
    if pmask is None:
        pmask = _proj_mask(cat)
    rows = _unit_rows(t, c)
    return rows[(t.middle_mask[rows] & ~np.int64(pmask)) == 0]


def has_enough_projectives(cat):
    """Return ``(ok, witnesses)``; witnesses maps each indec to a row index or
    None when no deflation from a projective reaches it."""
    pmask = _proj_mask(cat)
    witnesses = {}
    ok = True
    for ind in cat.universe.indecs:
        rows = _syzygy_rows(cat, ind.index, pmask)
        if rows.size:
            witnesses[ind] = cat.table.conflation(int(rows[0]))
        else:
            witnesses[ind] = None
            ok = False
    return ok, witnesses


class _PdSolver:
    def __init__(self, cat, bound):
        self.cat = cat
        self.bound = bound
        t = cat.table
        n = len(cat.universe)
        self.pmask = _proj_mask(cat)
        ok, wit = has_enough_projectives(cat)
        if not ok:
            missing = [ind.label for ind, w in wit.items() if w is None]
            raise NoEnoughProjectives(
                f"{cat.name}: no conflation K -> P -> C with P projective within cap {t.cap} "
                f"for {', '.join(missing)}")
        self.syz = [_syzygy_rows(cat, c, self.pmask) for c in range(n)]
        self.syz_masks = [t.left_mask[r] for r in self.syz]
        level = [None] * n
        reached = 0
        for c in range(n):
            if self.pmask >> c & 1:
                level[c] = 0
                reached |= 1 << c
        step = 0
        exhausted = False
        while True:
            step += 1
            if step > bound:
                exhausted = True
                break
            new = []
            for c in range(n):
                if level[c] is None and np.any((self.syz_masks[c] & ~np.int64(reached)) == 0):
                    new.append(c)
            if not new:
                break
            for c in new:
                level[c] = step
                reached |= 1 << c
        self.level = level
        self.exhausted = exhausted
        self.unreached = 0 if exhausted else sum(1 << c for c in range(n) if level[c] is None)
        self.values = np.array([math.inf if v is None else v for v in level], dtype=float)

    def indec_value(self, c):
        v = self.level[c]
        if v is not None:
            return DimValue.finite(v)
        if self.exhausted:
            return DimValue.at_least(self.bound + 1)
        return DimValue.infinite(self._cycle(c))

    def _cycle(self, c):
        u = self.cat.universe
        bad = self.unreached
        seen = {c}
        todo = [c]
        while todo:
            d = todo.pop()
            for m in self.syz_masks[d]:
                hit = int(m) & bad
                for e in range(len(u)):
                    if hit >> e & 1 and e not in seen:
                        seen.add(e)
                        todo.append(e)
        return tuple(u.indecs[e] for e in sorted(seen))

    def obj_value(self, x):
        return dim_max(self.indec_value(i) for i in sorted(x.support))

    def certificate(self, x):
        """Chain of conflations ``K_{i+1} -> P_i -> K_i`` with ``K_0 = x``."""
        t = self.cat.table
        u = self.cat.universe
        target = self.obj_value(x)
        if not target.is_finite:
            return None
        chain = []
        beyond = []
        cur = x
        for i in range(target.n):
            need = target.n - i - 1
            step = self._table_step(cur, need)
            if step is None:
                step = self._summed_step(cur, need)
                if not t.contains(step):
                    beyond.append(i)
            chain.append(step)
            cur = step.left
        assert cur.support <= projectives(self.cat).support
        return PdCertificate(chain, beyond)

    def _table_step(self, cur, need):
        if cur.total > self.cat.table.cap:
            return None
        t = self.cat.table
        rows = t.select(right=cur)
        rows = rows[(t.middle_mask[rows] & ~np.int64(self.pmask)) == 0]
        best = None
        for k in rows:
            left = t.left[k]
            vals = self.values[left > 0]
            v = vals.max() if vals.size else 0
            if v <= need:
                key = (int(left.sum()), tuple(left))
                if best is None or key < best[0]:
                    best = (key, int(k))
        return None if best is None else t.conflation(best[1])

    def _summed_step(self, cur, need):
        t = self.cat.table
        u = self.cat.universe
        total = Conflation(u.zero(), u.zero(), u.zero())
        for ind in cur.summands():
            c = ind.index
            if self.pmask >> c & 1:
                p = u.indec(ind.label)
                total = total + Conflation(u.zero(), p, p)
                continue
            best = None
            for k in self.syz[c]:
                left = t.left[k]
                vals = self.values[left > 0]
                v = vals.max() if vals.size else 0
                if v <= need:
                    key = (int(left.sum()), tuple(left))
                    if best is None or key < best[0]:
                        best = (key, int(k))
            total = total + t.conflation(best[1])
        return total


def _solver(cat, bound):
    cache = cat.__dict__.setdefault("_pd_solvers", {})
    if bound not in cache:
        cache[bound] = _PdSolver(cat, bound)
    return cache[bound]


def pd(cat, x, bound=DEFAULT_BOUND, certificate=False):
    """Projective dimension of ``x`` (max over its indecomposable summands).

    With ``certificate=True`` returns ``(DimValue, PdCertificate or None)``.
    """
    if isinstance(x, str):
        x = cat.obj(x)
    s = _solver(cat, bound)
    v = s.obj_value(x)
    if certificate:
        return v, s.certificate(x)
    return v


def pd_values(cat, bound=DEFAULT_BOUND):
    """Per-indec pd as a float array (``inf`` for infinite), or None if some
    value is only a lower bound."""
    s = _solver(cat, bound)
    if s.exhausted and any(v is None for v in s.level):
        return None
    return s.values.copy()


def gl(cat, bound=DEFAULT_BOUND):
    s = _solver(cat, bound)
    return dim_max(s.indec_value(c) for c in range(len(cat.universe)))


def _encode(arr, base):
    weights = base ** np.arange(arr.shape[1], dtype=np.int64)
    return arr.astype(np.int64) @ weights


def pd_direct(cat, bound=DEFAULT_BOUND):
    """Object-level pd over every object that occurs in the table.

    Works on whole objects without splitting into summands: X has pd ``<= n``
    when some conflation ``K -> P -> X`` with P projective has pd K ``<= n-1``.
    Returns a dict from count tuples to ints; objects never reached are
    absent (infinite pd, or every useful syzygy lies beyond the cap).
    """
    t = cat.table
    pmask = np.int64(_proj_mask(cat))
    base = t.cap + 1
    rows = np.nonzero((t.middle_mask & ~pmask) == 0)[0]
    objs = np.concatenate([t.left[rows], t.right[rows]])
    masks = np.concatenate([t.left_mask[rows], t.right_mask[rows]])
    keys, first, inv = np.unique(_encode(objs, base), return_index=True, return_inverse=True)
    li, ri = inv[:rows.size], inv[rows.size:]
    level = np.full(keys.size, -1, dtype=np.int64)
    level[(masks[first] & ~pmask) == 0] = 0
    step = 0
    while step < bound:
        step += 1
        cand = np.unique(ri[level[li] >= 0])
        cand = cand[level[cand] < 0]
        if cand.size == 0:
            break
        level[cand] = step
    out = {}
    for idx in np.nonzero(level >= 0)[0]:
        out[tuple(int(v) for v in objs[first[idx]])] = int(level[idx])
    return out


def check_additivity(cat, bound=DEFAULT_BOUND):
    """Whole-object check of ``pd(x+y) = max(pd x, pd y)`` within the cap.

    Both sides come from :func:`pd_direct`.  Each object is also compared
    with the summand-max value used by :func:`pd`.  Pairs touching an object
    that the direct route cannot resolve are skipped when the summand-max
    value is finite (cap truncation) and counted as agreeing when it is
    infinite.
    """
    from .core import objects_up_to

    vals = pd_values(cat, bound)
    if vals is None:
        raise CapacityOverflow(f"{cat.name}: pd search bound exhausted")
    direct = pd_direct(cat, bound)
    cap = cat.table.cap
    groups = objects_up_to(len(cat.universe), cap)
    objs = [tuple(int(v) for v in row) for g in groups for row in g]

    def summax(o):
        vs = [vals[i] for i, c in enumerate(o) if c]
        return max(vs) if vs else 0

    def dval(o):
        d = direct.get(o)
        if d is not None:
            return d
        return math.inf if math.isinf(summax(o)) else None

    res = {"objects": 0, "pairs": 0, "skipped": 0, "violations": []}
    for o in objs:
        d = dval(o)
        if d is None:
            res["skipped"] += 1
        elif d != summax(o):
            res["violations"].append(("summand-max", o, d, summax(o)))
        else:
            res["objects"] += 1
    for i, x in enumerate(objs):
        tx = sum(x)
        for y in objs[i:]:
            if tx + sum(y) > cap:
                continue
            s = tuple(a + b for a, b in zip(x, y))
            dx, dy, ds = dval(x), dval(y), dval(s)
            if dx is None or dy is None or ds is None:
                res["skipped"] += 1
            elif ds != max(dx, dy):
                res["violations"].append(("pair", (x, y), ds, max(dx, dy)))
            else:
                res["pairs"] += 1
    return res


@dataclass
class TriangleVerdict:
    conflation: Conflation
    values: tuple
    verdicts: tuple

    @property
    def ok(self):
        return all(v is not False for v in self.verdicts)

    @property
    def inconclusive(self):
        return any(v is None for v in self.verdicts)


def _lemma34(a1, a2, a3):
    return (a2 <= max(a1, a3), a3 <= max(a1 + 1, a2), a1 <= max(a2, a3 - 1))


def check_triangle_pd_bounds(cat, c, bound=DEFAULT_BOUND):
    """The three pd inequalities for a conflation ``A1 -> A2 -> A3``."""
    vals = tuple(pd(cat, x, bound) for x in c.terms())
    nums = [v.value() for v in vals]
    if any(n is None for n in nums):
        return TriangleVerdict(c, vals, (None, None, None))
    return TriangleVerdict(c, vals, _lemma34(*nums))


def check_triangle_table(cat, bound=DEFAULT_BOUND):
    """Check the three inequalities on every row of the table at once.

    Returns ``(n_rows, violations)`` where violations is a list of
    ``(conflation, (i,))`` pairs naming the failing inequality indices.
    """
    vals = pd_values(cat, bound)
    if vals is None:
        raise CapacityOverflow(f"{cat.name}: pd search bound exhausted")
    t = cat.table

    def term(arr):
        w = np.where(arr > 0, vals[None, :], 0.0)
        return w.max(axis=1) if arr.shape[1] else np.zeros(arr.shape[0])

    a1, a2, a3 = term(t.left), term(t.middle), term(t.right)
    ok1 = a2 <= np.maximum(a1, a3)
    ok2 = a3 <= np.maximum(a1 + 1, a2)
    ok3 = a1 <= np.maximum(a2, a3 - 1)
    bad = np.nonzero(~(ok1 & ok2 & ok3))[0]
    violations = []
    for k in bad:
        which = tuple(i + 1 for i, ok in enumerate((ok1[k], ok2[k], ok3[k])) if not ok)
        violations.append((t.conflation(int(k)), which))
    return len(t), violations
