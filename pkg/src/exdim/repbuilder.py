"""Category models from bound quivers over a prime field.

Representations are dicts of matrices; the matrix of an arrow ``a: v -> w``
has shape ``(dim w, dim v)``.  Paths are tuples of arrow labels in the order
they are traversed, so the composite written ``beta alpha`` is the tuple
``("alpha", "beta")``.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product

import numpy as np

from . import gf
from .core import CategoryModel, Conflation, Subcat, Universe, close_table
from .errors import (CapacityOverflow, IncompleteIndecList, NotExtensionClosed,
                     QuiverError)
from .functors import ADDITIVE, EXACT, AddFunctor


@dataclass(frozen=True)
class Arrow:
    label: str
    src: str
    tgt: str


@dataclass
class QuiverSpec:
    name: str
    vertices: tuple
    arrows: tuple
    relations: tuple = ()
    p: int = 2

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.arrows = tuple(self.arrows)
        self.relations = tuple(tuple((int(c) % self.p, tuple(path)) for c, path in rel) for rel in self.relations)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex")
        self._arrow = {}
        for a in self.arrows:
            if a.label in self._arrow or a.label in self.vertices:
                raise QuiverError(f"duplicate arrow label {a.label}")
            if a.src not in self.vertices or a.tgt not in self.vertices:
                raise QuiverError(f"arrow {a.label} uses an unknown vertex")
            self._arrow[a.label] = a
        if not _is_prime(self.p):
            raise QuiverError(f"field characteristic {self.p} is not prime")
        self._check_acyclic()
        for rel in self.relations:
            ends = set()
            for _, path in rel:
                if len(path) < 2:
                    raise QuiverError(f"relation term {'.'.join(path) or 'e'} has length < 2")
                ends.add(self.path_ends(path))
            if len(ends) > 1:
                raise QuiverError("relation terms do not share source and target")

    def arrow(self, label):
        try:
            return self._arrow[label]
        except KeyError:
            raise QuiverError(f"unknown arrow {label}") from None

    def path_ends(self, path):
        arrows = [self.arrow(a) for a in path]
        for x, y in zip(arrows, arrows[1:]):
            if x.tgt != y.src:
                raise QuiverError(f"arrows {x.label} and {y.label} do not compose")
        return arrows[0].src, arrows[-1].tgt

    def _check_acyclic(self):
        indeg = {v: 0 for v in self.vertices}
        for a in self.arrows:
            indeg[a.tgt] += 1
        order = [v for v in self.vertices if indeg[v] == 0]
        seen = 0
        while order:
            v = order.pop()
            seen += 1
            for a in self.arrows:
                if a.src == v:
                    indeg[a.tgt] -= 1
                    if indeg[a.tgt] == 0:
                        order.append(a.tgt)
        if seen != len(self.vertices):
            raise QuiverError(f"quiver {self.name} has an oriented cycle")

    def out_arrows(self, v):
        return [a for a in self.arrows if a.src == v]


def _is_prime(p):
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


class Representation:
    def __init__(self, quiver, dims, mats=None, label=None, check=True):
        self.quiver = quiver
        self.p = quiver.p
        self.dims = {v: int(dims.get(v, 0)) for v in quiver.vertices}
        mats = mats or {}
        self.mats = {}
        for a in quiver.arrows:
            shape = (self.dims[a.tgt], self.dims[a.src])
            m = mats.get(a.label)
            m = np.zeros(shape, dtype=np.int64) if m is None else gf.reduce(np.asarray(m, dtype=np.int64).reshape(shape), self.p)
            self.mats[a.label] = m
        unknown = set(mats) - set(self.mats)
        if unknown:
            raise QuiverError(f"matrix given for unknown arrow {sorted(unknown)[0]}")
        self.label = label
        if check:
            for rel in quiver.relations:
                v, w = quiver.path_ends(rel[0][1])
                acc = np.zeros((self.dims[w], self.dims[v]), dtype=np.int64)
                for c, path in rel:
                    acc = acc + c * self.path_matrix(path)
                if np.any(gf.reduce(acc, self.p)):
                    raise QuiverError(f"representation {label} violates a relation")

    def path_matrix(self, path, start=None):
        if not path:
            return np.eye(self.dims[start], dtype=np.int64)
        m = None
        for a in path:
            m = self.mats[a] if m is None else gf.reduce(self.mats[a] @ m, self.p)
        return m

    @property
    def dimvec(self):
        return tuple(self.dims[v] for v in self.quiver.vertices)

    @property
    def total_dim(self):
        return sum(self.dims.values())

    def key(self):
        return (self.dimvec, tuple(self.mats[a.label].tobytes() for a in self.quiver.arrows))

    def direct_sum(self, other, label=None):
        dims = {v: self.dims[v] + other.dims[v] for v in self.quiver.vertices}
        mats = {}
        for a in self.quiver.arrows:
            m = np.zeros((dims[a.tgt], dims[a.src]), dtype=np.int64)
            x, y = self.mats[a.label], other.mats[a.label]
            m[:x.shape[0], :x.shape[1]] = x
            m[x.shape[0]:, x.shape[1]:] = y
            mats[a.label] = m
        return Representation(self.quiver, dims, mats, label, check=False)

    def __repr__(self):
        return f"Representation({self.label or '?'}, dims={self.dimvec})"


def zero_rep(q):
    return Representation(q, {}, {}, "0", check=False)


def direct_sum(reps, q):
    out = zero_rep(q)
    for r in reps:
        out = out.direct_sum(r)
    return out


# -- path algebra -----------------------------------------------------------

def all_paths(q):
    """``paths[(v, w)]`` lists every path from v to w, the trivial one first."""
    paths = {(v, w): [] for v in q.vertices for w in q.vertices}

    def walk(start, at, path):
        paths[(start, at)].append(path)
        for a in q.out_arrows(at):
            walk(start, a.tgt, path + (a.label,))

    for v in q.vertices:
        walk(v, v, ())
    return paths


@dataclass
class Algebra:
    quiver: QuiverSpec
    paths: dict
    basis: dict
    coords: dict
    projectives: dict = field(default_factory=dict)

    @property
    def dim(self):
        return sum(len(b) for b in self.basis.values())


def build_algebra(q):
    """Path basis modulo relations and the projectives ``P(v)`` (paths out of v)."""
    p = q.p
    paths = all_paths(q)
    index = {k: {path: i for i, path in enumerate(ps)} for k, ps in paths.items()}
    basis, coords = {}, {}
    for (v, w), ps in paths.items():
        n = len(ps)
        if n == 0:
            basis[(v, w)] = []
            coords[(v, w)] = np.zeros((0, 0), dtype=np.int64)
            continue
        ideal = []
        for rel in q.relations:
            s, t = q.path_ends(rel[0][1])
            for pre in paths[(v, s)]:
                for post in paths[(t, w)]:
                    vec = np.zeros(n, dtype=np.int64)
                    for c, path in rel:
                        vec[index[(v, w)][pre + path + post]] += c
                    ideal.append(vec % p)
        ideal = np.array(ideal, dtype=np.int64).reshape(-1, n)
        chosen = gf.complement_basis(ideal, np.eye(n, dtype=np.int64), p)
        basis[(v, w)] = [ps[int(np.nonzero(row)[0][0])] for row in chosen]
        nb = len(basis[(v, w)])
        system = np.concatenate([chosen.reshape(nb, n), ideal], axis=0).T
        coords[(v, w)] = np.zeros((nb, n), dtype=np.int64)
        for i in range(n):
            e = np.zeros(n, dtype=np.int64)
            e[i] = 1
            x = gf.solve(system, e, p)
            coords[(v, w)][:, i] = x[:nb]
    alg = Algebra(q, paths, basis, coords)
    for v in q.vertices:
        dims = {w: len(basis[(v, w)]) for w in q.vertices}
        mats = {}
        for a in q.arrows:
            m = np.zeros((dims[a.tgt], dims[a.src]), dtype=np.int64)
            for j, b in enumerate(basis[(v, a.src)]):
                m[:, j] = coords[(v, a.tgt)][:, index[(v, a.tgt)][b + (a.label,)]]
            mats[a.label] = m
        alg.projectives[v] = Representation(q, dims, mats, f"P({v})")
    return alg


# -- homomorphisms ------------------------------------------------------------

def _kron_eye_right(a, k):
    """``kron(a, I_k)`` without the generic broadcasting machinery."""
    r, c = a.shape
    out = np.zeros((r, k, c, k), dtype=np.int64)
    idx = np.arange(k)
    out[:, idx, :, idx] = a
    return out.reshape(r * k, c * k)


def _kron_eye_left(k, a):
    """``kron(I_k, a)``."""
    r, c = a.shape
    out = np.zeros((k, r, k, c), dtype=np.int64)
    idx = np.arange(k)
    out[idx, :, idx, :] = a
    return out.reshape(k * r, k * c)


def _hom_system(m, n):
    q = m.quiver
    offs, off = {}, 0
    for v in q.vertices:
        offs[v] = off
        off += n.dims[v] * m.dims[v]
    blocks = []
    for a in q.arrows:
        v, w = a.src, a.tgt
        rows = n.dims[w] * m.dims[v]
        if rows == 0:
            continue
        blk = np.zeros((rows, off), dtype=np.int64)
        sv = n.dims[v] * m.dims[v]
        sw = n.dims[w] * m.dims[w]
        if sv:
            blk[:, offs[v]:offs[v] + sv] += _kron_eye_right(n.mats[a.label], m.dims[v])
        if sw:
            blk[:, offs[w]:offs[w] + sw] -= _kron_eye_left(n.dims[w], m.mats[a.label].T)
        blocks.append(blk)
    system = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, off), dtype=np.int64)
    return system, offs, off


def _unpack(vec, m, n, offs):
    out = {}
    for v in m.quiver.vertices:
        size = n.dims[v] * m.dims[v]
        out[v] = vec[offs[v]:offs[v] + size].reshape(n.dims[v], m.dims[v])
    return out


def _pack(f, m, n):
    return np.concatenate([f[v].reshape(-1) for v in m.quiver.vertices]) if m.quiver.vertices else np.zeros(0, np.int64)


def hom_space(m, n):
    """Basis of ``Hom(m, n)`` as a list of dicts ``vertex -> matrix``."""
    system, offs, size = _hom_system(m, n)
    if size == 0:
        return []
    ker = gf.nullspace(system % m.p, m.p)
    return [_unpack(ker[:, k], m, n, offs) for k in range(ker.shape[1])]


def compose_hom(g, f, p):
    return {v: gf.reduce(g[v] @ f[v], p) for v in f}


def is_iso(f, p):
    return all(gf.is_invertible(f[v], p) for v in f)


def subrep(r, basis, label=None):
    """The subrepresentation spanned at each vertex by the columns of ``basis[v]``
    (assumed stable); returns the rep and the inclusion."""
    q, p = r.quiver, r.p
    dims = {v: basis[v].shape[1] for v in q.vertices}
    mats = {}
    for a in q.arrows:
        src = basis[a.src]
        if dims[a.src] == 0 or dims[a.tgt] == 0:
            mats[a.label] = np.zeros((dims[a.tgt], dims[a.src]), dtype=np.int64)
            continue
        x = gf.solve(basis[a.tgt], gf.reduce(r.mats[a.label] @ src, p), p)
        if x is None:
            raise QuiverError("subspace is not a subrepresentation")
        mats[a.label] = x
    return Representation(q, dims, mats, label, check=False), basis


def kernel(f, m):
    basis = {v: gf.nullspace(f[v], m.p) if f[v].shape[0] else np.eye(m.dims[v], dtype=np.int64)
             for v in m.quiver.vertices}
    return subrep(m, basis)


def generated_subrep(r, gens):
    """Column bases of the smallest subrepresentation containing ``gens[v]``."""
    q, p = r.quiver, r.p
    span = {}
    for v in q.vertices:
        g = gens.get(v)
        g = np.zeros((r.dims[v], 0), dtype=np.int64) if g is None else gf.reduce(g, p)
        span[v] = _col_basis(g, p, r.dims[v])
    changed = True
    while changed:
        changed = False
        for a in q.arrows:
            img = gf.reduce(r.mats[a.label] @ span[a.src], p)
            both = np.concatenate([span[a.tgt], img], axis=1)
            nb = _col_basis(both, p, r.dims[a.tgt])
            if nb.shape[1] > span[a.tgt].shape[1]:
                span[a.tgt] = nb
                changed = True
    return span


def _col_basis(cols, p, dim):
    if cols.shape[1] == 0:
        return np.zeros((dim, 0), dtype=np.int64)
    rows = gf.complement_basis(np.zeros((0, dim), dtype=np.int64), cols.T, p)
    return rows.T


def quotient(r, sub, label=None):
    """``r / sub`` for stable column spaces ``sub[v]``; returns the rep and the
    projection matrices."""
    q, p = r.quiver, r.p
    comp, proj, dims = {}, {}, {}
    for v in q.vertices:
        d = r.dims[v]
        s = sub[v] if sub[v].size else np.zeros((d, 0), dtype=np.int64)
        rows = gf.complement_basis(s.T, np.eye(d, dtype=np.int64), p)
        c = rows.T
        comp[v] = c
        dims[v] = c.shape[1]
        if d == 0:
            proj[v] = np.zeros((0, 0), dtype=np.int64)
            continue
        sol = gf.solve(np.concatenate([c, s], axis=1), np.eye(d, dtype=np.int64), p)
        proj[v] = sol[:dims[v]]
    mats = {a.label: gf.reduce(proj[a.tgt] @ r.mats[a.label] @ comp[a.src], p) for a in q.arrows}
    return Representation(q, dims, mats, label, check=False), proj


# -- decomposition ------------------------------------------------------------

class IndecList:
    """The indecomposable representations of an algebra, with labels."""

    def __init__(self, quiver, reps):
        self.quiver = quiver
        self.reps = list(reps)
        self.labels = [r.label for r in self.reps]
        self.universe = Universe(self.labels)
        self._cache = {}

    def __len__(self):
        return len(self.reps)

    def __getitem__(self, label):
        return self.reps[self.labels.index(label)]

    def dimvecs(self):
        return {r.label: r.dimvec for r in self.reps}


def decompose(r, indecs):
    """Multiset of labels of the indecomposable summands of ``r``.

    A listed indec I is a summand of E iff ``g f`` is invertible for some
    basis pair ``f: I -> E``, ``g: E -> I`` (End(I) is local).  The summand is
    then split off as ``E = f(I) + ker g`` and the search repeats on ``ker g``.
    """
    key = r.key()
    hit = indecs._cache.get(key)
    if hit is not None:
        return hit
    p = r.p
    counts = [0] * len(indecs)
    cur = r
    while cur.total_dim:
        found = False
        dv = cur.dimvec
        for k, ind in enumerate(indecs.reps):
            if any(a > b for a, b in zip(ind.dimvec, dv)):
                continue
            fs = hom_space(ind, cur)
            if not fs:
                continue
            gs = hom_space(cur, ind)
            for f in fs:
                for g in gs:
                    if is_iso(compose_hom(g, f, p), p):
                        cur = kernel(g, cur)[0]
                        counts[k] += 1
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if not found:
            raise IncompleteIndecList(
                f"no listed indecomposable splits off a representation with dimension vector {dv}")
    obj = indecs.universe.from_counts(counts)
    indecs._cache[key] = obj
    return obj


def is_indecomposable(r, limit=4096):
    """Brute force: End(r) has no idempotents other than 0 and 1."""
    if r.total_dim == 0:
        return False
    basis = hom_space(r, r)
    p = r.p
    if p ** len(basis) > limit:
        raise CapacityOverflow("endomorphism ring too large to enumerate")
    ident = {v: np.eye(r.dims[v], dtype=np.int64) for v in r.quiver.vertices}
    for coeffs in product(range(p), repeat=len(basis)):
        e = {v: sum((c * b[v] for c, b in zip(coeffs, basis)), np.zeros_like(ident[v])) % p
             for v in r.quiver.vertices}
        if all(not e[v].any() for v in e) or all(np.array_equal(e[v], ident[v]) for v in e):
            continue
        if all(np.array_equal(gf.reduce(e[v] @ e[v], p), e[v]) for v in e):
            return False
    return True


# -- extensions ----------------------------------------------------------------

@dataclass
class ExtClassSet:
    c: Representation
    a: Representation
    dim: int
    classes: list

    def middles(self):
        return [m for _, _, m in self.classes]


def presentation(c, alg):
    """``P0 = sum_v P(v)^{dim c_v} -> c`` with kernel ``omega``.

    Returns ``(P0, pi, omega, iota)``.
    """
    q, p = c.quiver, c.p
    summands = []
    for v in q.vertices:
        summands.extend([(v, k) for k in range(c.dims[v])])
    p0 = direct_sum([alg.projectives[v] for v, _ in summands], q)
    pi = {}
    for w in q.vertices:
        cols = []
        for v, k in summands:
            e = np.zeros(c.dims[v], dtype=np.int64)
            e[k] = 1
            for b in alg.basis[(v, w)]:
                cols.append(gf.reduce(c.path_matrix(b, v) @ e, p))
        pi[w] = np.array(cols, dtype=np.int64).T.reshape(c.dims[w], p0.dims[w])
    omega, iota = kernel(pi, p0)
    return p0, pi, omega, iota


def ext_classes(c, a, alg, max_dim=3):
    """Representatives of a basis of ``Ext^1(c, a)`` as homs ``omega -> a``."""
    p = c.p
    p0, pi, omega, iota = presentation(c, alg)
    hom_oa = hom_space(omega, a)
    if not hom_oa:
        return 0, [], p0, omega, iota
    hom_pa = hom_space(p0, a)
    ambient = np.array([_pack(h, omega, a) for h in hom_oa], dtype=np.int64)
    image = [_pack(compose_hom(h, iota, p), omega, a) for h in hom_pa]
    image = np.array(image, dtype=np.int64).reshape(len(image), ambient.shape[1])
    reps = gf.complement_basis(image, ambient, p)
    d = reps.shape[0]
    if d > max_dim:
        raise CapacityOverflow(f"Ext^1 of dimension {d} exceeds the enumeration limit {max_dim}")
    _, offs, _ = _hom_system(omega, a)
    return d, [_unpack(row, omega, a, offs) for row in reps], p0, omega, iota


def pushout_middle(a, phi, p0, omega, iota):
    """Cokernel of ``omega -> a + p0``, ``x -> (phi x, -iota x)``."""
    p = a.p
    e0 = a.direct_sum(p0)
    sub = {v: gf.reduce(np.concatenate([phi[v], -iota[v]], axis=0), p) for v in a.quiver.vertices}
    return quotient(e0, sub)[0]


def ext_middle_terms(c, a, alg, indecs=None, max_dim=3):
    """Every class of ``Ext^1(c, a)`` with its middle term (and decomposition
    when an indec list is given)."""
    p = c.p
    d, basis, p0, omega, iota = ext_classes(c, a, alg, max_dim)
    classes = []
    for coeffs in product(range(p), repeat=d):
        phi = {v: np.zeros((a.dims[v], omega.dims[v]), dtype=np.int64) for v in c.quiver.vertices}
        for cf, b in zip(coeffs, basis):
            for v in phi:
                phi[v] = (phi[v] + cf * b[v]) % p
        mid = pushout_middle(a, phi, p0, omega, iota)
        obj = decompose(mid, indecs) if indecs is not None else None
        classes.append((coeffs, mid, obj))
    return ExtClassSet(c, a, d, classes)


def ext_dimension(c, a, alg):
    return ext_classes(c, a, alg, max_dim=10 ** 9)[0]


def projective_cover(c, alg):
    """Minimal projective cover ``omega -> P -> c``; returns ``(P, omega)``."""
    q, p = c.quiver, c.p
    rad_gens = {v: np.zeros((c.dims[v], 0), dtype=np.int64) for v in q.vertices}
    for a in q.arrows:
        rad_gens[a.tgt] = np.concatenate([rad_gens[a.tgt], c.mats[a.label]], axis=1)
    gens = []
    for v in q.vertices:
        rv = _col_basis(gf.reduce(rad_gens[v], p), p, c.dims[v])
        top = gf.complement_basis(rv.T, np.eye(c.dims[v], dtype=np.int64), p)
        gens.extend((v, row) for row in top)
    cover = direct_sum([alg.projectives[v] for v, _ in gens], q)
    pi = {}
    for w in q.vertices:
        cols = []
        for v, e in gens:
            for b in alg.basis[(v, w)]:
                cols.append(gf.reduce(c.path_matrix(b, v) @ e, p))
        pi[w] = np.array(cols, dtype=np.int64).T.reshape(c.dims[w], cover.dims[w])
    omega, _ = kernel(pi, cover)
    return cover, omega


# -- category models ------------------------------------------------------------

@dataclass
class BuildSettings:
    """How far the Ext enumeration goes.

    Conflations ``A -> E -> C`` are generated for every non-projective indec C
    with A of total multiplicity up to ``left_total``, and for every C of
    total 2 with A of total up to ``pair_left_total``.  Only summands with
    nonzero ``Ext^1(C, -)`` are used for A; other summands are split and come
    from the closure.  With ``essential_only`` off every class is enumerated
    on the undecomposed ends (slow, kept as a cross-check).
    """
    cap: int = 4
    left_total: int = 3
    pair_left_total: int = 2
    max_ext_dim: int = 4
    essential_only: bool = True


def _block_diag(blocks, rows, cols):
    out = np.zeros((sum(rows), sum(cols)), dtype=np.int64)
    r0 = 0
    c0 = 0
    for b, r, c in zip(blocks, rows, cols):
        out[r0:r0 + r, c0:c0 + c] = b
        r0 += r
        c0 += c
    return out


def _in_rref(rows, p):
    """True when ``rows`` is a full-rank matrix already in reduced echelon form."""
    r, piv = gf.rref(rows, p)
    return len(piv) == rows.shape[0] and np.array_equal(r, gf.reduce(rows, p))


class _ExtBlocks:
    """Caches presentations and ``Ext^1`` bases between listed indecs so that
    extensions of sums can be assembled blockwise."""

    def __init__(self, alg, indecs, max_dim):
        self.alg = alg
        self.indecs = indecs
        self.max_dim = max_dim
        self._pres = {}
        self._basis = {}

    def pres(self, c):
        if c.label not in self._pres:
            self._pres[c.label] = presentation(c, self.alg)
        return self._pres[c.label]

    def basis(self, c, a):
        key = (c.label, a.label)
        if key not in self._basis:
            p0, _, omega, iota = self.pres(c)
            p = c.p
            hom_oa = hom_space(omega, a)
            reps = []
            if hom_oa:
                hom_pa = hom_space(p0, a)
                ambient = np.array([_pack(h, omega, a) for h in hom_oa], dtype=np.int64)
                image = [_pack(compose_hom(h, iota, p), omega, a) for h in hom_pa]
                image = np.array(image, dtype=np.int64).reshape(len(image), ambient.shape[1])
                _, offs, _ = _hom_system(omega, a)
                reps = [_unpack(row, omega, a, offs) for row in gf.complement_basis(image, ambient, p)]
            self._basis[key] = reps
        return self._basis[key]

    def essential_middles(self, cs, as_):
        """Middle terms of the classes in ``Ext^1(sum cs, sum as_)`` that do
        not visibly split off a summand of either end.

        A class with a zero component on some summand of A (or of C) is the
        sum of a smaller extension and a split one, as is any class made so
        by a scalar change of basis on repeated summands.  Those are skipped.
        """
        q = self.alg.quiver
        p = q.p
        blocks = [[self.basis(c, a) for a in as_] for c in cs]
        dims = [[len(b) for b in row] for row in blocks]
        total = sum(map(sum, dims))
        if total > self.max_dim:
            raise CapacityOverflow(f"Ext^1 of dimension {total} exceeds the enumeration limit {self.max_dim}")
        if any(not any(row) for row in dims) or any(not any(col) for col in zip(*dims)):
            return []
        pres = [self.pres(c) for c in cs]
        p0 = direct_sum([x[0] for x in pres], q)
        omega = direct_sum([x[2] for x in pres], q)
        iota = {v: _block_diag([x[3][v] for x in pres], [x[0].dims[v] for x in pres],
                               [x[2].dims[v] for x in pres]) for v in q.vertices}
        a = direct_sum(as_, q)
        offs = []
        k = 0
        for row in dims:
            offs.append([])
            for d in row:
                offs[-1].append(k)
                k += d
        a_groups = {}
        for i, x in enumerate(as_):
            a_groups.setdefault(x.label, []).append(i)
        c_groups = {}
        for j, x in enumerate(cs):
            c_groups.setdefault(x.label, []).append(j)
        out = []
        for coeffs in product(range(p), repeat=total):
            comp = [[coeffs[offs[j][i]:offs[j][i] + dims[j][i]] for i in range(len(as_))]
                    for j in range(len(cs))]
            ok = True
            for idx in a_groups.values():
                mat = np.array([[x for j in range(len(cs)) for x in comp[j][i]] for i in idx], dtype=np.int64)
                if not _in_rref(mat, p):
                    ok = False
                    break
            if ok:
                for idx in c_groups.values():
                    mat = np.array([[x for i in range(len(as_)) for x in comp[j][i]] for j in idx],
                                   dtype=np.int64)
                    if gf.rank(mat, p) < len(idx):
                        ok = False
                        break
            if not ok:
                continue
            phi = {}
            for v in q.vertices:
                m = np.zeros((a.dims[v], omega.dims[v]), dtype=np.int64)
                r0 = 0
                for i, ai in enumerate(as_):
                    c0 = 0
                    for j, pj in enumerate(pres):
                        w = pj[2].dims[v]
                        for cf, b in zip(comp[j][i], blocks[j][i]):
                            if cf:
                                m[r0:r0 + ai.dims[v], c0:c0 + w] += cf * b[v]
                        c0 += w
                    r0 += ai.dims[v]
                phi[v] = m % p
            out.append(decompose(pushout_middle(a, phi, p0, omega, iota), self.indecs))
        return out


def generate_basics(alg, indecs, settings):
    q = alg.quiver
    u = indecs.universe
    proj = {decompose(alg.projectives[v], indecs) for v in q.vertices}
    proj_labels = set()
    for o in proj:
        if o.total != 1:
            raise IncompleteIndecList("a projective P(v) is not in the indec list")
        proj_labels.add(str(o))
    nonproj = [r for r in indecs.reps if r.label not in proj_labels]
    eb = _ExtBlocks(alg, indecs, settings.max_ext_dim)
    basics = set()

    def add(cs, as_):
        a_obj = u.from_counts(np.bincount([u.index(x.label) for x in as_], minlength=len(u)))
        c_obj = u.from_counts(np.bincount([u.index(x.label) for x in cs], minlength=len(u)))
        if settings.essential_only:
            mids = eb.essential_middles(cs, as_)
        else:
            ecs = ext_middle_terms(direct_sum(cs, q), direct_sum(as_, q), alg, indecs, settings.max_ext_dim)
            mids = [mid for coeffs, _, mid in ecs.classes if any(coeffs)]
        for mid in mids:
            basics.add(Conflation(a_obj, mid, c_obj))

    for c in nonproj:
        cover, omega = projective_cover(c, alg)
        basics.add(Conflation(decompose(omega, indecs), decompose(cover, indecs), u.indec(c.label)))
        rel = [r for r in indecs.reps if eb.basis(c, r)]
        for t in range(1, settings.left_total + 1):
            for combo in combinations_with_replacement(rel, t):
                add((c,), combo)
    for c1, c2 in combinations_with_replacement(nonproj, 2):
        rel = [r for r in indecs.reps if eb.basis(c1, r) or eb.basis(c2, r)]
        for t in range(1, settings.pair_left_total + 1):
            for combo in combinations_with_replacement(rel, t):
                add((c1, c2), combo)
    return basics, sorted(proj_labels, key=u.labels.index)


def build_modcat(q, indecs, settings=None, name=None, alg=None):
    settings = settings or BuildSettings()
    alg = alg or build_algebra(q)
    basics, proj = generate_basics(alg, indecs, settings)
    u = indecs.universe
    keep = [b for b in basics if max(b.left.total, b.middle.total, b.right.total) <= settings.cap]
    table = close_table(keep, settings.cap, u)
    notes = (f"built from quiver {q.name} over GF({q.p}); {len(basics)} generated conflations, "
             f"{len(keep)} within cap {settings.cap}")
    return CategoryModel(name or f"mod_{q.name}", u, table, Subcat.of(u, proj), notes, indecs.dimvecs())


def restrict_extension_closed(cat, s, name=None):
    """The full subcategory ``add s`` with the conflations whose terms all lie in it."""
    if not isinstance(s, Subcat):
        s = cat.subcat(s)
    t = cat.table
    m = np.int64(s.mask)
    ends = ((t.left_mask & ~m) == 0) & ((t.right_mask & ~m) == 0)
    bad = np.nonzero(ends & ((t.middle_mask & ~m) != 0))[0]
    if bad.size:
        w = t.conflation(int(bad[0]))
        raise NotExtensionClosed(f"{s} is not extension-closed: {w}", witness=w)
    keep = sorted(s.support)
    u = Universe([cat.universe.labels[i] for i in keep])

    def cut(x):
        return u.from_counts([x.counts[i] for i in keep])

    basics = [Conflation(cut(b.left), cut(b.middle), cut(b.right)) for b in t.basics
              if all(term.support <= s.support for term in b.terms())]
    table = close_table(basics, t.cap, u)
    dimvecs = {lab: cat.dimvecs[lab] for lab in u.labels} if cat.dimvecs else None
    notes = f"extension-closed subcategory {s} of {cat.name}"
    return CategoryModel(name or f"{cat.name}|{len(keep)}", u, table, None, notes, dimvecs)


# -- triangular matrix algebras ---------------------------------------------------

@dataclass
class BimoduleRule:
    """An algebra surjection from the second algebra onto the first.

    ``vertex_map[v]`` is ``(image vertex, connecting arrow label)`` or None;
    ``arrow_map[a]`` is an arrow label of the first quiver or None.
    """
    vertex_map: dict
    arrow_map: dict


def triangular_quiver(q1, q2, rule, name="T"):
    """Quiver of the triangular algebra ``[[L1, M], [0, L2]]`` with ``M``
    induced by the surjection; connecting arrows run from L2 to L1."""
    if q1.p != q2.p:
        raise QuiverError("both algebras must be over the same field")
    vertices = q1.vertices + q2.vertices
    arrows = list(q1.arrows) + list(q2.arrows)
    for v, img in rule.vertex_map.items():
        if img is not None:
            arrows.append(Arrow(img[1], v, img[0]))
    relations = list(q1.relations) + list(q2.relations)
    for a in q2.arrows:
        tgt = rule.vertex_map.get(a.tgt)
        if tgt is None:
            continue
        src = rule.vertex_map.get(a.src)
        b = rule.arrow_map.get(a.label)
        if src is not None and b is not None:
            relations.append(((1, (a.label, tgt[1])), (-1, (src[1], b))))
        else:
            relations.append(((1, (a.label, tgt[1])),))
    return QuiverSpec(name, vertices, arrows, relations, q1.p)


def _restrict(r, q, label=None):
    mats = {a.label: r.mats[a.label] for a in q.arrows}
    return Representation(q, {v: r.dims[v] for v in q.vertices}, mats, label, check=False)


def tensor_m(y, q1, rule):
    """``M (x) Y = Y / N`` relabelled onto the first quiver, with the
    projections ``Y_v -> (M (x) Y)_{image v}``."""
    q2, p = y.quiver, y.p
    gens = {}
    for v in q2.vertices:
        if rule.vertex_map.get(v) is None:
            gens[v] = np.eye(y.dims[v], dtype=np.int64)
    for a in q2.arrows:
        if rule.arrow_map.get(a.label) is None:
            gens[a.tgt] = np.concatenate([gens.get(a.tgt, np.zeros((y.dims[a.tgt], 0), dtype=np.int64)),
                                          y.mats[a.label]], axis=1)
    n = generated_subrep(y, gens)
    quo, proj = quotient(y, n)
    dims = {w: 0 for w in q1.vertices}
    back = {}
    for v, img in rule.vertex_map.items():
        if img is not None:
            dims[img[0]] = quo.dims[v]
            back[img[0]] = v
    mats = {}
    for b in q1.arrows:
        pre = [a for a, im in rule.arrow_map.items() if im == b.label]
        if pre:
            mats[b.label] = quo.mats[pre[0]]
    out = Representation(q1, dims, mats, None, check=True)
    return out, {v: proj[v] for v in back.values()}


@dataclass
class TriangularData:
    q1: QuiverSpec
    q2: QuiverSpec
    qb: QuiverSpec
    rule: BimoduleRule
    alg1: Algebra
    alg2: Algebra
    algb: Algebra


def functor_images(data, ind1, ind2, indb):
    """The six functors of the triangular recollement on indec representations,
    as dicts ``label -> Obj``."""
    q1, q2, qb, rule = data.q1, data.q2, data.qb, data.rule
    p = qb.p
    conn = {v: img for v, img in rule.vertex_map.items() if img is not None}
    out = {k: {} for k in FUNCTOR_CLASS}
    for r in ind1.reps:
        x = Representation(qb, {v: r.dims.get(v, 0) for v in qb.vertices},
                           {a.label: r.mats[a.label] for a in q1.arrows}, check=True)
        out["i_star"][r.label] = decompose(x, indb)
    for r in ind2.reps:
        y = Representation(qb, {v: r.dims.get(v, 0) for v in qb.vertices},
                           {a.label: r.mats[a.label] for a in q2.arrows}, check=True)
        out["j_star"][r.label] = decompose(y, indb)
        mt, proj = tensor_m(r, q1, rule)
        dims = {v: 0 for v in qb.vertices}
        dims.update({v: mt.dims[v] for v in q1.vertices})
        dims.update({v: r.dims[v] for v in q2.vertices})
        mats = {a.label: mt.mats[a.label] for a in q1.arrows}
        mats.update({a.label: r.mats[a.label] for a in q2.arrows})
        for v, (w, lab) in conn.items():
            mats[lab] = proj[v]
        out["j_shriek"][r.label] = decompose(Representation(qb, dims, mats, check=True), indb)
    for r in indb.reps:
        x = _restrict(r, q1)
        y = _restrict(r, q2)
        out["i_shriek"][r.label] = decompose(x, ind1)
        out["j_upper_star"][r.label] = decompose(y, ind2)
        gens = {}
        for v, (w, lab) in conn.items():
            gens[w] = np.concatenate([gens.get(w, np.zeros((x.dims[w], 0), dtype=np.int64)), r.mats[lab]], axis=1)
        coker = quotient(x, generated_subrep(x, gens))[0]
        out["i_upper_star"][r.label] = decompose(coker, ind1)
    return out


FUNCTOR_CLASS = {
    "i_star": EXACT, "j_upper_star": EXACT, "i_shriek": EXACT, "j_star": EXACT,
    "i_upper_star": ADDITIVE, "j_shriek": ADDITIVE,
}


def build_triangular_recollement(q1, q2, rule, ind1, ind2, indb, settings=None, names=None, qb=None):
    """The recollement ``mod L1 -> mod T -> mod L2`` of the triangular algebra."""
    from .recollement import FUNCTOR_ENDS, FUNCTOR_KEYS, RecollementModel

    settings = settings or {}
    names = names or {}
    qb = qb or triangular_quiver(q1, q2, rule)
    data = TriangularData(q1, q2, qb, rule, build_algebra(q1), build_algebra(q2), build_algebra(qb))
    cats = {
        "a": build_modcat(q1, ind1, settings.get("a"), names.get("a"), data.alg1),
        "b": build_modcat(qb, indb, settings.get("b"), names.get("b"), data.algb),
        "c": build_modcat(q2, ind2, settings.get("c"), names.get("c"), data.alg2),
    }
    images = functor_images(data, ind1, ind2, indb)
    functors = {}
    for k in FUNCTOR_KEYS:
        s, t = FUNCTOR_ENDS[k]
        functors[k] = AddFunctor.from_labels(k, cats[s], cats[t], images[k], FUNCTOR_CLASS[k])
    return RecollementModel(names.get("rec", f"rec_{qb.name}"), cats["a"], cats["b"], cats["c"], functors,
                            i_shriek_exact=True, i_star_exact=False)


def restrict_recollement(r, s_tilde, name=None):
    """Keep the middle indecs B with ``j^* B`` in ``add s_tilde``."""
    from .recollement import FUNCTOR_ENDS, FUNCTOR_KEYS, RecollementModel

    c = r.c
    if not isinstance(s_tilde, Subcat):
        s_tilde = c.subcat(s_tilde)
    js = r.functors["j_upper_star"]
    keep = [lab for lab in r.b.universe.labels if js.image_of(lab).support <= s_tilde.support]
    b2 = restrict_extension_closed(r.b, keep, name=f"{name or r.name}.B")
    c2 = restrict_extension_closed(c, s_tilde, name=f"{name or r.name}.C")
    cats = {"a": r.a, "b": b2, "c": c2}
    functors = {}
    for k in FUNCTOR_KEYS:
        f = r.functors[k]
        s, t = FUNCTOR_ENDS[k]
        src, tgt = cats[s], cats[t]
        mapping = {}
        for lab in src.universe.labels:
            img = f.image_of(lab)
            if not img.support <= {f.target.universe.index(l) for l in tgt.universe.labels}:
                raise NotExtensionClosed(f"{k}({lab}) = {img} leaves the restricted category")
            mapping[lab] = "+".join(ind.label for ind in img.summands()) or "0"
        functors[k] = AddFunctor.from_labels(k, src, tgt, mapping, f.declared_class)
    return RecollementModel(name or f"{r.name}|{s_tilde}", r.a, b2, c2, functors,
                            r.i_shriek_exact, r.i_star_exact)
