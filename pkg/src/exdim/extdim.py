"""The diamond operator, the tower ``<T>_n`` and extension dimension.

Everything is computed on supports: ``<U>_n`` is closed under sums and
summands, so a subcategory is the bitmask of the indecs it contains.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import Subcat, close_table, CategoryModel
from .errors import HypothesisNotMet
from .functors import classify_exactness, is_quasi_dense
from .homdim import DimValue


def _as_subcat(cat, u):
    if isinstance(u, Subcat):
        return u
    if hasattr(u, "counts"):
        return Subcat(cat.universe, u.support)
    return cat.subcat(u)


def diamond_mask(table, m1, m2):
    """Support mask of ``add(m1) <> add(m2)``."""
    sel = ((table.left_mask & ~np.int64(m1)) == 0) & ((table.right_mask & ~np.int64(m2)) == 0)
    mids = table.middle_mask[sel]
    return int(np.bitwise_or.reduce(mids)) if mids.size else 0


def diamond(cat, u1, u2):
    u1, u2 = _as_subcat(cat, u1), _as_subcat(cat, u2)
    return Subcat.from_mask(cat.universe, diamond_mask(cat.table, u1.mask, u2.mask))


def _tower(table, m1, n, right=False):
    cur = 0
    out = [0]
    for k in range(1, n + 1):
        if k == 1:
            cur = m1
        elif right:
            cur = diamond_mask(table, cur, m1)
        else:
            cur = diamond_mask(table, m1, cur)
        out.append(cur)
    return out


def bracket_n(cat, t, n, right=False):
    """``<T>_n``, nested as ``<T>_1 <> <T>_{n-1}`` (or the mirror with
    ``right=True``)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    m1 = _as_subcat(cat, t).mask
    return Subcat.from_mask(cat.universe, _tower(cat.table, m1, n, right)[n])


@dataclass
class LevelResult:
    generator: object
    level: DimValue
    growth: list = field(default_factory=list)

    def __str__(self):
        chain = " < ".join(str(s) for s in self.growth)
        return f"level {self.generator} = {self.level}  [{chain}]"


def level(cat, t, bound=None):
    """Least n with ``<T>_n`` the whole category."""
    u = cat.universe
    full = u.full().mask
    m1 = _as_subcat(cat, t).mask
    gen = t if hasattr(t, "counts") else Subcat.from_mask(u, m1).generator()
    growth = []
    if full == 0:
        return LevelResult(gen, DimValue.finite(0), growth)
    limit = bound if bound is not None else len(u) + 1
    prev = 0
    cur = m1
    n = 1
    while True:
        growth.append(Subcat.from_mask(u, cur))
        if cur == full:
            return LevelResult(gen, DimValue.finite(n), growth)
        if cur == prev:
            # the tower is monotone, so one repetition means it is stuck for good
            return LevelResult(gen, DimValue.infinite(tuple(Subcat.from_mask(u, cur).labels)), growth)
        if n >= limit:
            return LevelResult(gen, DimValue.at_least(n + 1), growth)
        prev, cur = cur, diamond_mask(cat.table, m1, cur)
        n += 1


@dataclass
class ExtDimResult:
    value: int
    witness: object
    level: LevelResult
    searched: int

    def __str__(self):
        return f"extdim = {self.value} witness {self.witness}"


def ext_dim(cat, max_support=None):
    """Minimum of ``level(T) - 1`` over multiplicity-one generators.

    Without a support limit the additive generator (all indecs) has level 1,
    which is the least possible, and every smaller support has level at least
    2, so that generator is the minimal witness.  ``max_support`` restricts
    the search to generators with at most that many indecs.
    """
    u = cat.universe
    n = len(u)
    if max_support is None or max_support >= n:
        lv = level(cat, u.full().generator())
        return ExtDimResult(max(0, lv.level.n - 1), lv.generator, lv, 1)
    best = None
    searched = 0
    for k in range(0, max_support + 1):
        for combo in combinations(range(n), k):
            s = Subcat(u, frozenset(combo))
            lv = level(cat, s.generator())
            searched += 1
            if not lv.level.is_finite:
                continue
            if best is None or lv.level.n < best.level.n:
                best = lv
    if best is None:
        return ExtDimResult(None, None, None, searched)
    return ExtDimResult(max(0, best.level.n - 1), best.generator, best, searched)


@dataclass
class InclusionVerdict:
    name: str
    lhs: Subcat
    rhs: Subcat
    counterexample: list = field(default_factory=list)
    rechecked_cap: int = None

    @property
    def ok(self):
        return not self.counterexample

    def __str__(self):
        s = f"{self.name}: {self.lhs} <= {self.rhs}"
        if self.ok:
            return s + " holds"
        return s + f" FAILS at {', '.join(self.counterexample)}"


def _with_cap(cat, cap):
    table = close_table(cat.table.basics, cap, cat.universe)
    return CategoryModel(cat.name, cat.universe, table, cat.declared_projectives, cat.notes, cat.dimvecs)


def check_oplus_lemma(cat, t1, t2, m, n, recheck=True):
    """``<T1>_m <> <T2>_n  <=  <T1 + T2>_{m+n}``.

    A failure at the model cap is recomputed at ``cap + 2`` before it is
    reported, since truncation can only shrink either side.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    s1, s2 = _as_subcat(cat, t1), _as_subcat(cat, t2)
    lhs = diamond(cat, bracket_n(cat, s1, m), bracket_n(cat, s2, n))
    rhs = bracket_n(cat, s1.union(s2), m + n)
    name = f"<{s1}>_{m} <> <{s2}>_{n} in <{s1.union(s2)}>_{m + n}"
    bad = sorted(lhs.support - rhs.support)
    if bad and recheck:
        big = _with_cap(cat, cat.cap + 2)
        v = check_oplus_lemma(big, Subcat(big.universe, s1.support), Subcat(big.universe, s2.support),
                              m, n, recheck=False)
        v.rechecked_cap = big.cap
        return v
    return InclusionVerdict(name, lhs, rhs, [cat.universe.labels[i] for i in bad])


def _image_mask(f, mask):
    rows = [i for i in range(len(f.source.universe)) if mask >> i & 1]
    out = 0
    for i in rows:
        for j, c in enumerate(f.images[i].counts):
            if c:
                out |= 1 << j
    return out


def check_functor_bracket(f, t, n, exactness=None):
    """``F(<T>_n)  <=  <F(T)>_n`` for an object-exact functor."""
    ex = exactness if exactness is not None else classify_exactness(f)
    if not ex.exact:
        raise HypothesisNotMet(f"{f.name} is not object-exact: {ex.witness}")
    src = _as_subcat(f.source, t)
    lhs_mask = _image_mask(f, bracket_n(f.source, src, n).mask)
    ft = _image_mask(f, src.mask)
    rhs_mask = _tower(f.target.table, ft, n)[n]
    u = f.target.universe
    lhs, rhs = Subcat.from_mask(u, lhs_mask), Subcat.from_mask(u, rhs_mask)
    bad = sorted(lhs.support - rhs.support)
    return InclusionVerdict(f"{f.name}(<{src}>_{n}) in <{f.name}({src})>_{n}", lhs, rhs,
                            [u.labels[i] for i in bad])


@dataclass
class DenseVerdict:
    functor: str
    source_extdim: int
    target_extdim: int

    @property
    def ok(self):
        return self.source_extdim >= self.target_extdim

    def __str__(self):
        return (f"{self.functor}: ext.dim source {self.source_extdim} >= "
                f"ext.dim target {self.target_extdim} {'holds' if self.ok else 'FAILS'}")


def check_dense_lemma(f, exactness=None):
    ex = exactness if exactness is not None else classify_exactness(f)
    if not ex.exact:
        raise HypothesisNotMet(f"{f.name} is not object-exact: {ex.witness}")
    if not is_quasi_dense(f):
        raise HypothesisNotMet(f"{f.name} is not quasi-dense")
    return DenseVerdict(f.name, ext_dim(f.source).value, ext_dim(f.target).value)


def check_associativity(cat, u1, u2, u3):
    """``(U1 <> U2) <> U3`` and ``U1 <> (U2 <> U3)`` have the same support.

    Returns ``(left, right)`` as Subcats.
    """
    t = cat.table
    m1, m2, m3 = (_as_subcat(cat, x).mask for x in (u1, u2, u3))
    left = diamond_mask(t, diamond_mask(t, m1, m2), m3)
    right = diamond_mask(t, m1, diamond_mask(t, m2, m3))
    u = cat.universe
    return Subcat.from_mask(u, left), Subcat.from_mask(u, right)
