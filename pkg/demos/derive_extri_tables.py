"""Derive the conflation tables of the categories built from modules and
shifted modules of the linear A3 quiver inside its bounded derived category.

Writes extri_b1, extri_b2, extri_c1 and extri_c2 into the package data
directory.  The path algebra is hereditary, so every triangle
``A -> B -> C -> A[1]`` with both ends in ``mod u mod[1]`` is one of

* a short exact sequence of modules,
* the shift of one,
* ``M -> coker f + (ker f)[1] -> N[1]`` for a module map ``f: N -> M``.

Run:  python demos/derive_extri_tables.py
"""

import os
from itertools import combinations_with_replacement, product

import numpy as np

from exdim import formats
from exdim.core import CategoryModel, Conflation, Subcat, Universe, close_table
from exdim.homdim import gl, projectives
from exdim.repbuilder import (BuildSettings, IndecList, Representation, build_modcat, decompose,
                              direct_sum, hom_space, kernel, quotient, restrict_extension_closed)

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "exdim", "data")
CAP = 3

# %% the algebra: 3 -> 2 -> 1, so 2/1 has top 2 and socle 1
q = formats.parse_quiver("""
quiver A3
vertex 1
vertex 2
vertex 3
arrow b: 2 -> 1
arrow c: 3 -> 2
""")


def thin(dims, label):
    mats = {a.label: [[1]] for a in q.arrows if dims.get(a.src) and dims.get(a.tgt)}
    return Representation(q, dims, mats, label)


mods = IndecList(q, [
    thin({"1": 1}, "1"), thin({"1": 1, "2": 1}, "2/1"), thin({"1": 1, "2": 1, "3": 1}, "3/2/1"),
    thin({"2": 1}, "2"), thin({"2": 1, "3": 1}, "3/2"), thin({"3": 1}, "3"),
])
modcat = build_modcat(q, mods, BuildSettings(cap=CAP), "mod_A3")
print(modcat, "gl", gl(modcat))

# %% the ambient universe: modules then their shifts
shift = {lab: lab + "[1]" for lab in mods.labels}
u = Universe(list(mods.labels) + [shift[lab] for lab in mods.labels])
n0 = len(mods.labels)


def lift(obj, shifted=False):
    counts = [0] * len(u)
    for i, c in enumerate(obj.counts):
        counts[i + (n0 if shifted else 0)] += c
    return u.from_counts(counts)


basics = set()
# modules and their shifts
for b in modcat.table.basics:
    basics.add(Conflation(lift(b.left), lift(b.middle), lift(b.right)))
    basics.add(Conflation(lift(b.left, True), lift(b.middle, True), lift(b.right, True)))

# cones of module maps N -> M with N indecomposable
p = q.p
for nrep in mods.reps:
    for t in range(1, CAP):
        for combo in combinations_with_replacement(mods.reps, t):
            m = direct_sum(combo, q)
            hs = hom_space(nrep, m)
            for coeffs in product(range(p), repeat=len(hs)):
                if not any(coeffs):
                    continue
                f = {v: sum((c * h[v] for c, h in zip(coeffs, hs)), np.zeros((m.dims[v], nrep.dims[v]), dtype=np.int64)) % p
                     for v in q.vertices}
                coker = quotient(m, f)[0]
                ker = kernel(f, nrep)[0]
                mid = lift(decompose(coker, mods)) + lift(decompose(ker, mods), True)
                c = Conflation(lift(decompose(m, mods)), mid, u.indec(shift[nrep.label]))
                if max(c.left.total, c.middle.total, c.right.total) <= CAP:
                    basics.add(c)

print(len(basics), "generated conflations")


def model(name, basics, universe, projs, notes):
    table = close_table(basics, CAP, universe)
    return CategoryModel(name, universe, table, Subcat.of(universe, projs), notes)


def save(cat):
    path = os.path.join(DATA, cat.name + ".cat")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(formats.dump_category(cat))
    print(f"{cat.name}: {len(cat.universe)} indecs, {len(cat.table)} rows, gl {gl(cat)}, "
          f"projectives {projectives(cat)} -> {path}")


# %% (b.1): the whole thing
b1 = model("extri_b1", basics, u, ["1", "2/1", "3/2/1"],
           "modules and shifted modules of linear A3 inside D^b(A3), E = Hom(-, -[1])")
save(b1)

# %% (b.2): an extension-closed piece
b2 = restrict_extension_closed(b1, ["2/1", "3/2/1", "2", "3/2", "1[1]"], "extri_b2")
b2 = CategoryModel(b2.name, b2.universe, b2.table, Subcat.of(b2.universe, ["2/1", "3/2/1", "2"]),
                   "extension-closed subcategory add(2/1 + 3/2/1 + 2 + 3/2 + 1[1]) of extri_b1")
save(b2)

# %% (c.1): the substructure in which 3/2/1[1] is projective
top = u.index("3/2/1[1]")
c1_basics = [b for b in basics if b.right.counts[top] == 0]
c1 = model("extri_c1", c1_basics, u, ["1", "2/1", "3/2/1", "3/2/1[1]"],
           "extri_b1 without the conflations ending in 3/2/1[1]")
save(c1)

# %% (c.2): the ideal quotient by the projective-injective 3/2/1[1]
keep = [lab for lab in u.labels if lab != "3/2/1[1]"]
uq = Universe(keep)


def drop(x):
    return uq.from_counts([c for i, c in enumerate(x.counts) if i != top])


c2_basics = {Conflation(drop(b.left), drop(b.middle), drop(b.right)) for b in c1_basics}
c2 = model("extri_c2", c2_basics, uq, ["1", "2/1", "3/2/1"],
           "extri_c1 modulo the ideal of maps factoring through 3/2/1[1]")
save(c2)

# %% for comparison: the relative structure killing every class that is
# nonzero after precomposing with a map out of 3/2/1[1]
# (only cones of maps out of a module with top 3 are affected)
topped = {u.indec(x) for x in ("3[1]", "3/2[1]")}


def killed(b):
    cone = b.right in topped and not any(b.left.counts[n0:])
    return cone and b.middle != b.left + b.right


strict = [b for b in c1_basics if not killed(b)]
alt = model("extri_c1_relative", strict, u, ["1", "2/1", "3/2/1", "3/2/1[1]"], "")
print("relative structure: gl", gl(alt))
