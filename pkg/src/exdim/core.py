"""Finite Krull-Schmidt object model.

An object is a multiset of indecomposables; a subcategory ``add U`` is its
support set; a conflation table stores the terms ``(A, B, C)`` of conflations
``A -> B -> C`` up to a multiplicity cap, closed under direct sums and
containing every split conflation.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .errors import CapacityOverflow, MixedCategoryError, ModelInconsistency

DEFAULT_CAP = 6


@dataclass(frozen=True)
class IndecId:
    index: int
    label: str

    def __str__(self):
        return self.label


class Universe:
    """The ordered list of indecomposables of one category."""

    def __init__(self, labels):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ModelInconsistency(f"duplicate indecomposable labels in {labels}")
        for lab in labels:
            if not lab or any(ch.isspace() for ch in lab) or "+" in lab or lab == "0" or "->" in lab:
                raise ModelInconsistency(f"invalid indecomposable label {lab!r}")
        if len(labels) > 62:
            raise ModelInconsistency("at most 62 indecomposables are supported")
        self.labels = labels
        self.indecs = tuple(IndecId(i, lab) for i, lab in enumerate(labels))
        self._index = {lab: i for i, lab in enumerate(labels)}

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, Universe) and other.labels == self.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"Universe({list(self.labels)})"

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise ModelInconsistency(f"unknown indecomposable {label!r}") from None

    def zero(self):
        return Obj(self, (0,) * len(self.labels))

    def indec(self, label, mult=1):
        counts = [0] * len(self.labels)
        counts[self.index(label)] = mult
        return Obj(self, tuple(counts))

    def obj(self, spec):
        """Parse ``'0'`` or ``'lab1+lab2+...'`` (repetition = multiplicity)."""
        if isinstance(spec, Obj):
            _check_same(self, spec.universe)
            return spec
        spec = spec.strip()
        counts = [0] * len(self.labels)
        if spec != "0":
            for part in spec.split("+"):
                part = part.strip()
                if not part:
                    raise ModelInconsistency(f"empty summand in {spec!r}")
                counts[self.index(part)] += 1
        return Obj(self, tuple(counts))

    def from_counts(self, counts):
        return Obj(self, tuple(int(c) for c in counts))

    def full(self):
        return Subcat(self, frozenset(range(len(self.labels))))


def _check_same(u, v):
    if u is not v and u != v:
        raise MixedCategoryError("operands live in different categories")


@dataclass(frozen=True)
class Obj:
    universe: Universe = field(repr=False, compare=False)
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != len(self.universe):
            raise ModelInconsistency("multiplicity vector has the wrong length")
        if any(c < 0 for c in self.counts):
            raise ModelInconsistency("negative multiplicity")

    def __eq__(self, other):
        if not isinstance(other, Obj):
            return NotImplemented
        return self.counts == other.counts and self.universe == other.universe

    def __hash__(self):
        return hash(self.counts)

    @property
    def mult(self):
        return {self.universe.indecs[i]: c for i, c in enumerate(self.counts) if c}

    @property
    def total(self):
        return sum(self.counts)

    @property
    def support(self):
        return frozenset(i for i, c in enumerate(self.counts) if c)

    def is_zero(self):
        return not any(self.counts)

    def __add__(self, other):
        return obj_sum(self, other)

    def summands(self):
        """Indecomposable summands with multiplicity, in index order."""
        out = []
        for i, c in enumerate(self.counts):
            out.extend([self.universe.indecs[i]] * c)
        return out

    def sort_key(self):
        return self.counts

    def __repr__(self):
        return f"Obj({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        return "+".join(ind.label for ind in self.summands())


def obj_sum(x, y):
    _check_same(x.universe, y.universe)
    return Obj(x.universe, tuple(a + b for a, b in zip(x.counts, y.counts)))


def is_summand(x, y):
    _check_same(x.universe, y.universe)
    return all(a <= b for a, b in zip(x.counts, y.counts))


@dataclass(frozen=True)
class Subcat:
    """``add(support)``: the objects all of whose summands lie in ``support``."""

    universe: Universe = field(repr=False, compare=False)
    support: frozenset

    def __eq__(self, other):
        if not isinstance(other, Subcat):
            return NotImplemented
        return self.support == other.support and self.universe == other.universe

    def __hash__(self):
        return hash(self.support)

    @classmethod
    def of(cls, universe, labels):
        return cls(universe, frozenset(universe.index(lab) for lab in labels))

    @property
    def mask(self):
        m = 0
        for i in self.support:
            m |= 1 << i
        return m

    @classmethod
    def from_mask(cls, universe, mask):
        return cls(universe, frozenset(i for i in range(len(universe)) if mask >> i & 1))

    def contains(self, x):
        _check_same(self.universe, x.universe)
        return x.support <= self.support

    def __contains__(self, x):
        return self.contains(x)

    def issubset(self, other):
        _check_same(self.universe, other.universe)
        return self.support <= other.support

    def union(self, other):
        _check_same(self.universe, other.universe)
        return Subcat(self.universe, self.support | other.support)

    @property
    def labels(self):
        return [self.universe.labels[i] for i in sorted(self.support)]

    def generator(self):
        """The multiplicity-one object with this support."""
        return Obj(self.universe, tuple(1 if i in self.support else 0 for i in range(len(self.universe))))

    def __len__(self):
        return len(self.support)

    def __str__(self):
        return "{" + ", ".join(self.labels) + "}"


def add_closure(objs, universe=None):
    objs = list(objs)
    if not objs:
        if universe is None:
            raise ValueError("universe required for an empty object list")
        return Subcat(universe, frozenset())
    u = objs[0].universe
    support = set()
    for x in objs:
        _check_same(u, x.universe)
        support |= x.support
    return Subcat(u, frozenset(support))


@dataclass(frozen=True)
class Conflation:
    left: Obj
    middle: Obj
    right: Obj

    def __post_init__(self):
        _check_same(self.left.universe, self.middle.universe)
        _check_same(self.left.universe, self.right.universe)

    @property
    def universe(self):
        return self.left.universe

    def __add__(self, other):
        return Conflation(self.left + other.left, self.middle + other.middle, self.right + other.right)

    def is_split_shape(self):
        return self.middle == self.left + self.right

    def terms(self):
        return (self.left, self.middle, self.right)

    def sort_key(self):
        return (self.left.counts, self.middle.counts, self.right.counts)

    def __str__(self):
        return f"{self.left} -> {self.middle} -> {self.right}"

    def __repr__(self):
        return f"Conflation({self})"


def objects_up_to(n_indecs, cap):
    """All multiplicity vectors of total ``<= cap``, grouped by total."""
    groups = []
    for t in range(cap + 1):
        rows = []
        for combo in combinations_with_replacement(range(n_indecs), t):
            v = [0] * n_indecs
            for i in combo:
                v[i] += 1
            rows.append(v)
        groups.append(np.array(rows, dtype=np.int16).reshape(len(rows), n_indecs))
    return groups


def _masks(arr):
    if arr.shape[1] == 0:
        return np.zeros(arr.shape[0], dtype=np.int64)
    weights = np.left_shift(np.int64(1), np.arange(arr.shape[1], dtype=np.int64))
    return ((arr > 0).astype(np.int64) * weights).sum(axis=1)


class ConflationTable:
    """Materialised closure of a set of basic conflations within a cap.

    ``left``, ``middle`` and ``right`` are ``(N, n)`` multiplicity arrays whose
    rows are sorted lexicographically on ``(left, middle, right)``.
    """

    def __init__(self, universe, cap, basics, left, middle, right):
        self.universe = universe
        self.cap = cap
        self.basics = tuple(basics)
        self.left = left
        self.middle = middle
        self.right = right
        self.left_mask = _masks(left)
        self.middle_mask = _masks(middle)
        self.right_mask = _masks(right)
        self._rows = None

    def __len__(self):
        return self.left.shape[0]

    def _row_set(self):
        if self._rows is None:
            stacked = np.concatenate([self.left, self.middle, self.right], axis=1).astype(np.int16)
            self._rows = {row.tobytes() for row in stacked}
        return self._rows

    def contains(self, c):
        _check_same(self.universe, c.universe)
        if max(c.left.total, c.middle.total, c.right.total) > self.cap:
            return False
        key = np.array(c.left.counts + c.middle.counts + c.right.counts, dtype=np.int16).tobytes()
        return key in self._row_set()

    def __contains__(self, c):
        return self.contains(c)

    def contains_rows(self, left, middle, right):
        """Vectorised membership for ``(k, n)`` arrays of terms."""
        rows = self._row_set()
        stacked = np.concatenate([left, middle, right], axis=1).astype(np.int16)
        return np.array([row.tobytes() in rows for row in stacked], dtype=bool)

    def conflation(self, k):
        u = self.universe
        return Conflation(u.from_counts(self.left[k]), u.from_counts(self.middle[k]), u.from_counts(self.right[k]))

    def __iter__(self):
        for k in range(len(self)):
            yield self.conflation(k)

    def select(self, left=None, middle=None, right=None):
        """Row indices whose fixed slots match exactly."""
        sel = np.ones(len(self), dtype=bool)
        for term, arr in ((left, self.left), (middle, self.middle), (right, self.right)):
            if term is None:
                continue
            _check_same(self.universe, term.universe)
            if term.total > self.cap:
                raise CapacityOverflow(f"pattern term {term} exceeds cap {self.cap}")
            sel &= np.all(arr == np.array(term.counts, dtype=arr.dtype), axis=1)
        return np.nonzero(sel)[0]

    def nonsplit_indices(self):
        return np.nonzero(np.any(self.middle != self.left + self.right, axis=1))[0]


def _is_split_shape(v, n):
    left, mid, right = v[:n], v[n:2 * n], v[2 * n:]
    return all(m == l + r for l, m, r in zip(left, mid, right))


def _reachable(target, gens, n):
    """Is ``target`` a sum of ``gens`` plus a split conflation?"""
    gens = [g for g in gens if all(x <= y for x, y in zip(g, target))]
    seen = set()
    todo = [tuple(target)]
    while todo:
        rest = todo.pop()
        if _is_split_shape(rest, n):
            return True
        for g in gens:
            nxt = tuple(x - y for x, y in zip(rest, g))
            if min(nxt) >= 0 and nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return False


def irreducible_basics(basics, n):
    """Drop basics that are sums of smaller basics and a split conflation.

    The remaining set generates the same closure at every cap.
    """
    vecs = sorted({b.left.counts + b.middle.counts + b.right.counts for b in basics},
                  key=lambda v: (sum(v), v))
    kept = []
    for v in vecs:
        if not _reachable(v, kept, n):
            kept.append(v)
    return kept


def _enumerate_basic_sums(gens, cap, n):
    width = 3 * n
    zero = np.zeros((1, width), dtype=np.int16)
    if not gens:
        return zero
    g = np.array(gens, dtype=np.int16).reshape(-1, width)
    seen = {zero[0].tobytes()}
    out = [zero]
    frontier = zero
    chunk = max(1, 2_000_000 // (g.shape[0] * width))
    while frontier.shape[0]:
        found = []
        for s in range(0, frontier.shape[0], chunk):
            cand = (frontier[s:s + chunk, None, :] + g[None, :, :]).reshape(-1, width)
            ok = ((cand[:, :n].sum(1) <= cap) & (cand[:, n:2 * n].sum(1) <= cap)
                  & (cand[:, 2 * n:].sum(1) <= cap))
            cand = np.unique(cand[ok], axis=0)
            for row in cand:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    found.append(row)
        frontier = np.array(found, dtype=np.int16).reshape(-1, width)
        out.append(frontier)
    return np.concatenate(out, axis=0)


def close_table(basics, cap, universe):
    """Least set containing ``basics`` and every split conflation, closed under
    direct sum, with every term of total at most ``cap``."""
    basics = sorted(set(basics), key=Conflation.sort_key)
    for b in basics:
        _check_same(universe, b.universe)
        if max(b.left.total, b.middle.total, b.right.total) > cap:
            raise CapacityOverflow(f"basic conflation {b} exceeds cap {cap}")
    n = len(universe)
    if n == 0:
        # the zero category: its one conflation is 0 -> 0 -> 0
        empty = np.zeros((1, 0), dtype=np.int16)
        return ConflationTable(universe, cap, basics, empty, empty.copy(), empty.copy())
    groups = objects_up_to(n, cap)
    sums = _enumerate_basic_sums(irreducible_basics(basics, n), cap, n)
    ta, tb, tc = sums[:, :n].sum(1), sums[:, n:2 * n].sum(1), sums[:, 2 * n:].sum(1)
    shapes = {}
    for k, key in enumerate(zip(ta.tolist(), tb.tolist(), tc.tolist())):
        shapes.setdefault(key, []).append(k)
    blocks = []
    split_cache = {}
    for (xa0, xb0, xc0), idx in shapes.items():
        base = sums[idx]
        for xa in range(0, cap - max(xa0, xb0) + 1):
            for xc in range(0, min(cap - xc0, cap - xb0 - xa) + 1):
                sp = split_cache.get((xa, xc))
                if sp is None:
                    aa, cc = groups[xa], groups[xc]
                    ra = np.repeat(aa, cc.shape[0], axis=0)
                    rc = np.tile(cc, (aa.shape[0], 1))
                    sp = np.concatenate([ra, ra + rc, rc], axis=1)
                    split_cache[(xa, xc)] = sp
                blocks.append((base[:, None, :] + sp[None, :, :]).reshape(-1, 3 * n))
    allrows = np.unique(np.concatenate(blocks, axis=0), axis=0)
    return ConflationTable(universe, cap, basics, allrows[:, :n], allrows[:, n:2 * n], allrows[:, 2 * n:])


def query_conflations(table, left=None, middle=None, right=None):
    return [table.conflation(k) for k in table.select(left, middle, right)]


@dataclass
class CategoryModel:
    name: str
    universe: Universe
    table: ConflationTable
    declared_projectives: Subcat = None
    notes: str = ""
    dimvecs: dict = None

    def __post_init__(self):
        if self.table.universe != self.universe:
            raise ModelInconsistency("table and category disagree on indecomposables")
        if self.dimvecs is not None:
            for b in self.table.basics:
                if self.dimvec(b.middle) != tuple(x + y for x, y in zip(self.dimvec(b.left), self.dimvec(b.right))):
                    raise ModelInconsistency(f"conflation {b} is not dimension-additive")

    @property
    def indecs(self):
        return list(self.universe.indecs)

    @property
    def cap(self):
        return self.table.cap

    def obj(self, spec):
        return self.universe.obj(spec)

    def subcat(self, labels):
        return Subcat.of(self.universe, labels)

    def full(self):
        return self.universe.full()

    def dimvec(self, x):
        if self.dimvecs is None:
            raise ModelInconsistency(f"category {self.name} has no dimension vectors")
        width = len(next(iter(self.dimvecs.values())))
        total = [0] * width
        for i, c in enumerate(x.counts):
            if c:
                for k, d in enumerate(self.dimvecs[self.universe.labels[i]]):
                    total[k] += c * d
        return tuple(total)

    def __repr__(self):
        return f"CategoryModel({self.name!r}, {len(self.universe)} indecs, cap={self.cap}, {len(self.table)} conflations)"


def make_category(name, labels, conflations, cap=DEFAULT_CAP, projectives=None, notes="", dimvecs=None):
    """Build a model from labels and ``'L -> M -> R'`` strings or triples."""
    u = Universe(labels)
    basics = []
    for c in conflations:
        if isinstance(c, Conflation):
            basics.append(c)
            continue
        if isinstance(c, str):
            parts = [t.strip() for t in c.split("->")]
        else:
            parts = list(c)
        if len(parts) != 3:
            raise ModelInconsistency(f"conflation needs three terms: {c!r}")
        basics.append(Conflation(*(u.obj(t) for t in parts)))
    table = close_table(basics, cap, u)
    declared = Subcat.of(u, projectives) if projectives is not None else None
    return CategoryModel(name, u, table, declared, notes, dimvecs)
