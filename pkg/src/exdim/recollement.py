"""Recollement models: six functors between three category models.

Functor keys follow the diagram ``A -> B -> C``::

    i_star        i_*  : A -> B        j_shriek      j_!  : C -> B
    i_upper_star  i^*  : B -> A        j_upper_star  j^*  : B -> C
    i_shriek      i^!  : B -> A        j_star        j_*  : C -> B

Flags record the hypotheses "i^! is exact" (``i_shriek_exact``) and
"i^* is exact" (``i_star_exact``).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Subcat
from .errors import ModelInconsistency
from .extdim import ext_dim
from .functors import apply, classify_exactness, compose
from .homdim import DEFAULT_BOUND, DimValue, dim_max, gl, pd, projectives

FUNCTOR_KEYS = ("i_star", "i_upper_star", "i_shriek", "j_shriek", "j_upper_star", "j_star")
FUNCTOR_ENDS = {
    "i_star": ("a", "b"), "i_upper_star": ("b", "a"), "i_shriek": ("b", "a"),
    "j_shriek": ("c", "b"), "j_upper_star": ("b", "c"), "j_star": ("c", "b"),
}
SYMBOL = {
    "i_star": "i_*", "i_upper_star": "i^*", "i_shriek": "i^!",
    "j_shriek": "j_!", "j_upper_star": "j^*", "j_star": "j_*",
}


class RecollementModel:
    def __init__(self, name, a, b, c, functors, i_shriek_exact=False, i_star_exact=False):
        self.name = name
        self.a, self.b, self.c = a, b, c
        missing = [k for k in FUNCTOR_KEYS if k not in functors]
        if missing:
            raise ModelInconsistency(f"recollement {name}: missing functor {missing[0]}")
        cats = {"a": a, "b": b, "c": c}
        for k in FUNCTOR_KEYS:
            f = functors[k]
            s, t = FUNCTOR_ENDS[k]
            if f.source.universe != cats[s].universe or f.target.universe != cats[t].universe:
                raise ModelInconsistency(
                    f"recollement {name}: {SYMBOL[k]} must run from {cats[s].name} to {cats[t].name}")
        self.functors = dict(functors)
        self.i_shriek_exact = bool(i_shriek_exact)
        self.i_star_exact = bool(i_star_exact)

    def __getitem__(self, key):
        return self.functors[key]

    def __repr__(self):
        return f"RecollementModel({self.name!r}: {self.a.name} -> {self.b.name} -> {self.c.name})"


@dataclass
class Check:
    name: str
    ok: object
    detail: str = ""
    values: dict = field(default_factory=dict)

    @property
    def status(self):
        return "pass" if self.ok is True else ("inconclusive" if self.ok is None else "FAIL")


@dataclass
class AuditReport:
    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, ok, detail="", **values):
        self.checks.append(Check(name, ok, detail, values))
        return ok

    @property
    def ok(self):
        return all(c.ok is not False for c in self.checks)

    @property
    def conclusive(self):
        return all(c.ok is not None for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.ok is False]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _objs_eq(x, y):
    return x.counts == y.counts


def _image_support(f):
    out = set()
    for y in f.images:
        out |= y.support
    return out


def _first_bad(items):
    for item in items:
        return item
    return None


def _two_step(bt, first_left, middle, second_middle, right_support, rights_hint=None):
    """Search ``first_left -> middle -> K`` and ``K -> second_middle -> R`` with
    R supported in ``right_support``, returning ``(K, R)`` or None."""
    if max(first_left.total, middle.total, second_middle.total) > bt.cap:
        return None
    mask = 0
    for i in right_support:
        mask |= 1 << i
    rows = bt.select(left=first_left, middle=middle)
    for k in rows:
        kk = bt.conflation(int(k)).right
        rows2 = bt.select(left=kk, middle=second_middle)
        good = rows2[(bt.right_mask[rows2] & ~np.int64(mask)) == 0]
        if good.size:
            return kk, bt.conflation(int(good[0])).right
    return None


def _two_step_r5(bt, left_support, middle, b, right):
    """Search ``A' -> middle -> K`` (A' supported in ``left_support``) and
    ``K -> b -> right``."""
    if max(middle.total, b.total, right.total) > bt.cap:
        return None
    mask = 0
    for i in left_support:
        mask |= 1 << i
    rows2 = bt.select(middle=b, right=right)
    for k in rows2:
        kk = bt.conflation(int(k)).left
        rows = bt.select(middle=middle, right=kk)
        good = rows[(bt.left_mask[rows] & ~np.int64(mask)) == 0]
        if good.size:
            return bt.conflation(int(good[0])).left, kk
    return None


def audit_recollement(r):
    """Object-level checks of the recollement axioms and their consequences."""
    rep = AuditReport(f"audit {r.name}")
    F = r.functors
    a, b, c = r.a, r.b, r.c
    bu = b.universe
    ker_js = {i for i in range(len(bu)) if apply(F["j_upper_star"], bu.indec(bu.labels[i])).is_zero()}
    im_is = _image_support(F["i_star"])
    rep.add("Im i_* = Ker j^*", ker_js == im_is,
            f"Ker j^* = {Subcat(bu, frozenset(ker_js))}, Im i_* = {Subcat(bu, frozenset(im_is))}")

    def identity_check(name, outer, inner, cat):
        comp = compose(F[outer], F[inner])
        bad = [lab for lab in cat.universe.labels
               if not _objs_eq(apply(comp, cat.universe.indec(lab)), cat.universe.indec(lab))]
        rep.add(name, not bad, f"differs on {', '.join(bad)}" if bad else "identity on indecs")

    identity_check("i^* i_* = Id", "i_upper_star", "i_star", a)
    identity_check("i^! i_* = Id", "i_shriek", "i_star", a)
    identity_check("j^* j_! = Id", "j_upper_star", "j_shriek", c)
    identity_check("j^* j_* = Id", "j_upper_star", "j_star", c)

    for outer, inner in (("i_upper_star", "j_shriek"), ("i_shriek", "j_star")):
        comp = compose(F[outer], F[inner])
        bad = [lab for lab in c.universe.labels if not apply(comp, c.universe.indec(lab)).is_zero()]
        rep.add(f"{SYMBOL[outer]} {SYMBOL[inner]} = 0", not bad, f"nonzero on {', '.join(bad)}" if bad else "")

    for key in ("i_shriek", "i_upper_star", "j_upper_star"):
        f = F[key]
        hit = {}
        for lab in f.source.universe.labels:
            y = f.image_of(lab)
            if y.total == 1:
                hit.setdefault(next(iter(y.support)), lab)
        missing = [f.target.universe.labels[i] for i in range(len(f.target.universe)) if i not in hit]
        rep.add(f"{SYMBOL[key]} dense", not missing, f"not hit: {', '.join(missing)}" if missing else "")

    exact = {k: classify_exactness(F[k]) for k in FUNCTOR_KEYS}
    for k in ("i_star", "j_upper_star"):
        rep.add(f"{SYMBOL[k]} exact", exact[k].exact, str(exact[k]))
    rep.add("flag i_shriek_exact matches", exact["i_shriek"].exact == r.i_shriek_exact, str(exact["i_shriek"]))
    rep.add("flag i_star_exact matches", exact["i_upper_star"].exact == r.i_star_exact, str(exact["i_upper_star"]))

    def preserves(key, why, required=True):
        f = F[key]
        ps, pt = projectives(f.source), projectives(f.target)
        bad = [lab for lab in ps.labels if not f.image_of(lab).support <= pt.support]
        rep.add(f"{SYMBOL[key]} preserves projectives ({why})", not bad if required else None,
                f"image of {bad[0]} is {f.image_of(bad[0])}" if bad else "")

    preserves("i_upper_star", "always")
    preserves("j_shriek", "always")
    if r.i_shriek_exact:
        preserves("i_star", "i^! exact")
        rep.add("j_* exact (i^! exact)", exact["j_star"].exact, str(exact["j_star"]))
    if exact["j_star"].exact:
        preserves("j_upper_star", "j_* exact")
    if r.i_star_exact:
        rep.add("j_! exact (i^* exact)", exact["j_shriek"].exact, str(exact["j_shriek"]))

    bt = b.table
    r4_bad, r5_bad, r4_open, r5_open = [], [], [], []
    six_bad, six_p_bad = [], []
    for lab in bu.labels:
        x = bu.indec(lab)
        ii = apply(F["i_star"], apply(F["i_shriek"], x))
        jj = apply(F["j_star"], apply(F["j_upper_star"], x))
        jl = apply(F["j_shriek"], apply(F["j_upper_star"], x))
        iu = apply(F["i_star"], apply(F["i_upper_star"], x))
        if max(ii.total, jj.total) > bt.cap:
            r4_open.append(lab)
        elif _two_step(bt, ii, x, jj, im_is) is None:
            r4_bad.append(lab)
        if max(jl.total, iu.total) > bt.cap:
            r5_open.append(lab)
        elif _two_step_r5(bt, im_is, jl, x, iu) is None:
            r5_bad.append(lab)
        if r.i_shriek_exact and not bt.select(left=ii, middle=x, right=jj).size:
            six_bad.append(lab)
        if r.i_star_exact and not bt.select(left=jl, middle=x, right=iu).size:
            six_p_bad.append(lab)
    rep.add("unit pattern i_*i^!B -> B -> K, K -> j_*j^*B -> i_*A", False if r4_bad else (None if r4_open else True),
            f"no pattern for {', '.join(r4_bad or r4_open)}" if (r4_bad or r4_open) else "")
    rep.add("counit pattern i_*A' -> j_!j^*B -> K, K -> B -> i_*i^*B", False if r5_bad else (None if r5_open else True),
            f"no pattern for {', '.join(r5_bad or r5_open)}" if (r5_bad or r5_open) else "")
    if r.i_shriek_exact:
        rep.add("conflation i_*i^!B -> B -> j_*j^*B (i^! exact)", not six_bad,
                f"missing for {', '.join(six_bad)}" if six_bad else "")
    if r.i_star_exact:
        rep.add("conflation j_!j^*B -> B -> i_*i^*B (i^* exact)", not six_p_bad,
                f"missing for {', '.join(six_p_bad)}" if six_p_bad else "")
    return rep


def relative_gl(r, bound=DEFAULT_BOUND):
    """``gl_A B``: the supremum of ``pd_B i_*(A)`` over A-indecs."""
    f = r.functors["i_star"]
    return dim_max(pd(r.b, y, bound) for y in f.images)


def _num(v):
    return v.value() if isinstance(v, DimValue) else v


def _leq(lhs, rhs):
    """``lhs <= rhs`` in the extended naturals; None if either is unknown."""
    if lhs is None or rhs is None:
        return None
    return lhs <= rhs


def _fmt(x):
    if x is None:
        return "?"
    if x == math.inf:
        return "inf"
    return str(int(x))


def _add(*xs):
    if any(x is None for x in xs):
        return None
    return sum(xs)


def gl_terms(r, bound=DEFAULT_BOUND):
    F = r.functors
    pa, pb = projectives(r.a), projectives(r.b)
    return {
        "gl A": gl(r.a, bound),
        "gl B": gl(r.b, bound),
        "gl C": gl(r.c, bound),
        "gl_A B": relative_gl(r, bound),
        "sup pd_B i_*(P(A))": dim_max(pd(r.b, F["i_star"].image_of(l), bound) for l in pa.labels),
        "sup pd_C j^*(P(B))": dim_max(pd(r.c, F["j_upper_star"].image_of(l), bound) for l in pb.labels),
    }


def verify_gl_bounds(r, bound=DEFAULT_BOUND):
    """Global-dimension inequalities for a recollement, evaluated exactly."""
    rep = AuditReport(f"bounds {r.name}")
    t = gl_terms(r, bound)
    n = {k: _num(v) for k, v in t.items()}
    glA, glB, glC, glAB = n["gl A"], n["gl B"], n["gl C"], n["gl_A B"]
    sI, sJ = n["sup pd_B i_*(P(A))"], n["sup pd_C j^*(P(B))"]
    rep.notes.append("gl_A B is read as the supremum of pd_B i_*(A) over A")
    for k, v in t.items():
        rep.notes.append(f"{k} = {v}")

    def ineq(name, lhs, rhs, expr):
        ok = _leq(lhs, rhs)
        rep.add(name, ok, f"{_fmt(lhs)} <= {expr} = {_fmt(rhs)}", lhs=lhs, rhs=rhs, tight=(ok and lhs == rhs))

    ineq("gl B <= gl_A B + gl C + 1", glB, _add(glAB, glC, 1), f"{_fmt(glAB)}+{_fmt(glC)}+1")
    ineq("gl_A B <= gl A + sup pd_B i_*(P)", glAB, _add(glA, sI), f"{_fmt(glA)}+{_fmt(sI)}")
    ineq("gl B <= gl A + gl C + sup pd_B i_*(P) + 1", glB, _add(glA, glC, sI, 1),
         f"{_fmt(glA)}+{_fmt(glC)}+{_fmt(sI)}+1")
    ineq("gl C <= gl B + sup pd_C j^*(P)", glC, _add(glB, sJ), f"{_fmt(glB)}+{_fmt(sJ)}")
    if r.i_shriek_exact:
        ineq("gl B <= gl A + gl C + 1", glB, _add(glA, glC, 1), f"{_fmt(glA)}+{_fmt(glC)}+1")
        ineq("gl C <= gl B", glC, glB, _fmt(glB))

    F = r.functors
    bad, open_ = [], []
    for lab in r.c.universe.labels:
        lhs = _num(pd(r.b, F["j_shriek"].image_of(lab), bound))
        rhs = _add(_num(pd(r.c, lab, bound)), glAB, 1)
        ok = _leq(lhs, rhs)
        if ok is False:
            bad.append(f"{lab}: {_fmt(lhs)} > {_fmt(rhs)}")
        elif ok is None:
            open_.append(lab)
    rep.add("pd_B j_!(C) <= pd_C C + gl_A B + 1 for every C", False if bad else (None if open_ else True),
            "; ".join(bad) if bad else f"{len(r.c.universe)} indecs checked")

    def fin(x):
        return None if x is None else x < math.inf

    def equiv(name, hyp, p, q):
        if hyp is None or p is None or q is None:
            rep.add(name, None, "unresolved term")
        elif not hyp:
            rep.add(name, True, "hypothesis not met; nothing to check")
        else:
            rep.add(name, p == q, f"{p} <-> {q}")

    equiv("gl C < inf => (gl_A B < inf <-> gl B < inf)", fin(glC), fin(glAB), fin(glB))
    equiv("gl A < inf => (gl_A B < inf <-> sup pd_B i_*(P) < inf)", fin(glA), fin(glAB), fin(sI))
    equiv("gl B < inf => (gl C < inf <-> sup pd_C j^*(P) < inf)", fin(glB), fin(glC), fin(sJ))
    return rep


def verify_extdim_bounds(r):
    """``max(ext.dim A, ext.dim C) <= ext.dim B <= ext.dim A + ext.dim C + 1``."""
    rep = AuditReport(f"extdim bounds {r.name}")
    if not (r.i_shriek_exact or r.i_star_exact):
        rep.add("hypothesis i^! or i^* exact", None, "hypothesis-not-met: neither flag is set")
        return rep
    ea, eb, ec = ext_dim(r.a), ext_dim(r.b), ext_dim(r.c)
    for label, e in (("A", ea), ("B", eb), ("C", ec)):
        rep.notes.append(f"ext.dim {label} = {e.value} witness {e.witness}")
    lo = max(ea.value, ec.value)
    hi = ea.value + ec.value + 1
    rep.add("max(ext.dim A, ext.dim C) <= ext.dim B", lo <= eb.value, f"{lo} <= {eb.value}",
            lhs=lo, rhs=eb.value)
    rep.add("ext.dim B <= ext.dim A + ext.dim C + 1", eb.value <= hi,
            f"{eb.value} <= {ea.value}+{ec.value}+1 = {hi}", lhs=eb.value, rhs=hi)
    rep.witnesses = {"A": ea, "B": eb, "C": ec}
    return rep
