"""Additive functors between category models, tabulated on indecomposables."""

from dataclasses import dataclass

import numpy as np

from .core import Obj, _check_same
from .errors import CapacityOverflow, ModelInconsistency

EXACT = "exact"
LEFT_EXACT = "left-exact"
RIGHT_EXACT = "right-exact"
ADDITIVE = "additive-only"
CLASSES = (EXACT, LEFT_EXACT, RIGHT_EXACT, ADDITIVE)


class AddFunctor:
    """``images[i]`` is the image of source indec ``i``; extended additively."""

    def __init__(self, name, source, target, images, declared_class=ADDITIVE):
        if declared_class not in CLASSES:
            raise ModelInconsistency(f"unknown functor class {declared_class!r}")
        images = tuple(images)
        if len(images) != len(source.universe):
            raise ModelInconsistency(f"functor {name}: map must cover every source indec")
        for y in images:
            _check_same(target.universe, y.universe)
        self.name = name
        self.source = source
        self.target = target
        self.images = images
        self.declared_class = declared_class
        self.matrix = np.array([y.counts for y in images], dtype=np.int64).reshape(
            len(source.universe), len(target.universe))

    @classmethod
    def from_labels(cls, name, source, target, mapping, declared_class=ADDITIVE):
        missing = [lab for lab in source.universe.labels if lab not in mapping]
        if missing:
            raise ModelInconsistency(f"functor {name}: no image for {', '.join(missing)}")
        extra = [lab for lab in mapping if lab not in source.universe.labels]
        if extra:
            raise ModelInconsistency(f"functor {name}: unknown source indec {extra[0]}")
        images = [target.obj(mapping[lab]) for lab in source.universe.labels]
        return cls(name, source, target, images, declared_class)

    def __call__(self, x):
        return apply(self, x)

    def image_of(self, label):
        return self.images[self.source.universe.index(label)]

    def __repr__(self):
        return f"AddFunctor({self.name!r}: {self.source.name} -> {self.target.name})"


def apply(f, x):
    if isinstance(x, str):
        x = f.source.obj(x)
    _check_same(f.source.universe, x.universe)
    counts = np.array(x.counts, dtype=np.int64) @ f.matrix
    return Obj(f.target.universe, tuple(int(c) for c in counts))


def compose(g, f, name=None):
    """``g . f``."""
    if f.target.universe != g.source.universe:
        raise ModelInconsistency(f"cannot compose {g.name} after {f.name}")
    images = [apply(g, y) for y in f.images]
    return AddFunctor(name or f"{g.name}{f.name}", f.source, g.target, images)


def identity_functor(cat, name="id"):
    return AddFunctor(name, cat, cat, [cat.universe.indec(l) for l in cat.universe.labels], EXACT)


def apply_rows(f, arr):
    return arr.astype(np.int64) @ f.matrix


@dataclass
class ExactnessVerdict:
    functor: str
    exact: bool
    checked: int
    skipped: int
    witness: object = None

    def __str__(self):
        if self.exact:
            s = f"{self.functor}: object-exact ({self.checked} conflations"
            if self.skipped:
                s += f", {self.skipped} beyond target cap"
            return s + ")"
        return f"{self.functor}: not object-exact, witness {self.witness}"


def classify_exactness(f, strict=False):
    """A functor is object-exact when it sends every source conflation to a
    target conflation.  Rows whose image leaves the target cap are skipped
    (or raise with ``strict=True``)."""
    s = f.source.table
    t = f.target.table
    L, M, R = apply_rows(f, s.left), apply_rows(f, s.middle), apply_rows(f, s.right)
    fits = (L.sum(1) <= t.cap) & (M.sum(1) <= t.cap) & (R.sum(1) <= t.cap)
    skipped = int((~fits).sum())
    if skipped and strict:
        k = int(np.nonzero(~fits)[0][0])
        raise CapacityOverflow(f"{f.name}: image of {s.conflation(k)} exceeds cap {t.cap}")
    idx = np.nonzero(fits)[0]
    ok = t.contains_rows(L[idx], M[idx], R[idx])
    if ok.all():
        return ExactnessVerdict(f.name, True, int(idx.size), skipped)
    k = int(idx[np.nonzero(~ok)[0][0]])
    c = s.conflation(k)
    u = f.target.universe
    img = (u.from_counts(L[k]), u.from_counts(M[k]), u.from_counts(R[k]))
    return ExactnessVerdict(f.name, False, int(idx.size), skipped,
                            witness=f"{c} maps to {img[0]} -> {img[1]} -> {img[2]}")


def is_quasi_dense(f):
    """Every target indec is a summand of the image of some source indec."""
    hit = (f.matrix > 0).any(axis=0) if f.matrix.size else np.zeros(len(f.target.universe), bool)
    return bool(hit.all())


def missing_from_image(f):
    hit = (f.matrix > 0).any(axis=0) if f.matrix.size else np.zeros(len(f.target.universe), bool)
    return [f.target.universe.labels[i] for i in np.nonzero(~hit)[0]]
