"""The twelve acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (shown with
``pytest -s`` or in the summary at the end of the run) before asserting.
"""

import os
from itertools import product

import pytest

from conftest import ALL_RECS, EXTRI_CATS, MODULE_CATS, X_RECS
from exdim import formats
from exdim.core import Conflation, make_category
from exdim.extdim import check_associativity, check_functor_bracket, check_oplus_lemma, ext_dim
from exdim.functors import AddFunctor, classify_exactness
from exdim.homdim import (DimValue, check_additivity, check_triangle_table, gl, pd, pd_direct, projectives,
                          _syzygy_rows)
from exdim.recollement import RecollementModel, relative_gl, verify_extdim_bounds, verify_gl_bounds
from exdim.repbuilder import BuildSettings, build_algebra, build_modcat, decompose, restrict_recollement
from exdim.suite import DATA_DIR, evaluate, load_expected, run_suite

RESULTS = []


@pytest.fixture
def criterion(capsys):
    def record(n, title, ok, detail=""):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        RESULTS.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, detail
    return record


def test_c01_builder_ground_truth(criterion, quivers):
    got, problems = {}, []
    for name, want, resolution in (
        ("a2", 1, [("S1", ["S2 -> P1 -> S1"])]),
        ("a3r", 2, [("S4", ["P5 -> P4 -> S4"]), ("S3", ["S4 -> P3 -> S3", "P5 -> P4 -> S4"])]),
    ):
        q = quivers[name]
        ind = formats.load_reps(os.path.join(DATA_DIR, f"{name}.reps"), quivers)
        cat = build_modcat(q, ind, BuildSettings(cap=4))
        # oracle: the projectives are the summands of the P(v), and the listed
        # finite resolutions exist in the model
        alg = build_algebra(q)
        from_alg = sorted({x.label for v in q.vertices for x in decompose(alg.projectives[v], ind).summands()})
        if sorted(projectives(cat).labels) != from_alg:
            problems.append(f"{name}: projectives {projectives(cat)} vs {from_alg}")
        for lab, steps in resolution:
            for s in steps:
                l, m, r = (cat.obj(t.strip()) for t in s.split("->"))
                if Conflation(l, m, r) not in cat.table:
                    problems.append(f"{name}: missing {s}")
            v, cert = pd(cat, lab, certificate=True)
            if [str(c) for c in cert.chain] != steps:
                problems.append(f"{name}: pd {lab} certificate {[str(c) for c in cert.chain]}")
        got[name] = gl(cat)
        if got[name] != DimValue.finite(want):
            problems.append(f"gl mod {name} = {got[name]}, expected {want}")
    criterion(1, "gl(mod L') = 1, gl(mod L'') = 2 from quiver specs", not problems,
              "; ".join(problems) or f"gl = {got['a2']}, {got['a3r']}")


def test_c02_restricted_examples(criterion, shipped):
    want = {"rec_x1": ((0, 2), ["P3", "S3"]), "rec_x2": ((1, 1), ["P5", "P4", "S4"]),
            "rec_x3": ((1, 2), ["S4", "P3", "S3"]), "rec_x4": ((0, 2), ["S3"])}
    tri = shipped.rec("rec_tri")
    got, bad = [], []
    for name, ((gc, gb), s_tilde) in want.items():
        fresh = restrict_recollement(tri, s_tilde, name)
        for r in (fresh, shipped.rec(name)):
            vals = (gl(r.c), gl(r.b))
            if vals != (DimValue.finite(gc), DimValue.finite(gb)):
                bad.append(f"{name}: gl C, gl B = {vals[0]}, {vals[1]}")
        got.append(f"{gl(fresh.c)}/{gl(fresh.b)}")
    criterion(2, "gl X~ = 0,1,1,0 and gl X = 2,1,2,2", not bad, "; ".join(bad) or "gl X~/gl X = " + ", ".join(got))


def test_c03_gl_inequalities(criterion, shipped):
    bad, tight = [], []
    for name in ALL_RECS:
        rep = verify_gl_bounds(shipped.rec(name))
        bad += [f"{name}: {c.name} {c.status}" for c in rep.checks if c.ok is not True]
        if name in X_RECS and rep.get("gl B <= gl A + gl C + 1").values["tight"]:
            tight.append(name)
    if sorted(tight) != ["rec_x1", "rec_x4"]:
        bad.append(f"equality in gl B <= gl A + gl C + 1 on {tight}")
    criterion(3, "gl inequalities on 5 recollements, equality for examples (1) and (4)", not bad,
              "; ".join(bad) or "tight on " + ", ".join(tight))


def test_c04_pd_of_j_shriek(criterion, shipped):
    bad, n = [], 0
    for name in ALL_RECS:
        r = shipped.rec(name)
        glab = relative_gl(r).value()
        for lab in r.c.universe.labels:
            lhs = pd(r.b, r["j_shriek"].image_of(lab)).value()
            rhs = pd(r.c, lab).value() + glab + 1
            n += 1
            if not lhs <= rhs:
                bad.append(f"{name}/{lab}: {lhs} > {rhs}")
        if verify_gl_bounds(r).get("pd_B j_!(C) <= pd_C C + gl_A B + 1 for every C").ok is not True:
            bad.append(f"{name}: verifier disagrees")
    criterion(4, "pd_B j_!(C) <= pd_C C + gl_A B + 1 per C-indec", not bad, "; ".join(bad) or f"{n} indecs")


def _three(a1, a2, a3):
    return a2 <= max(a1, a3) and a3 <= max(a1 + 1, a2) and a1 <= max(a2, a3 - 1)


def test_c05_pd_inequalities_on_every_conflation(criterion, shipped):
    bad, rows, direct_rows = [], 0, 0
    for name in MODULE_CATS + EXTRI_CATS:
        cat = shipped.cat(name)
        n, violations = check_triangle_table(cat)
        rows += n
        bad += [f"{name}: {c} fails {w}" for c, w in violations[:3]]
        # second route: whole-object pd values where the object-level search resolves all three terms
        d = pd_direct(cat)
        t = cat.table
        for k in range(len(t)):
            terms = [tuple(int(x) for x in arr[k]) for arr in (t.left, t.middle, t.right)]
            if all(x in d for x in terms):
                direct_rows += 1
                if not _three(*(d[x] for x in terms)):
                    bad.append(f"{name}: object-level {t.conflation(k)}")
    criterion(5, "three pd inequalities on every conflation of 13 shipped tables", not bad,
              "; ".join(bad[:5]) or f"{rows} rows, {direct_rows} rechecked object-level")


def _cycle_is_closed(cat, cycle):
    """Each member is non-projective and every syzygy K -> P -> c meets the cycle."""
    members = {i.index for i in cycle}
    mask = sum(1 << i for i in members)
    if mask & projectives(cat).mask:
        return False
    for c in members:
        for k in _syzygy_rows(cat, c):
            if not int(cat.table.left_mask[k]) & mask:
                return False
    return bool(members)


def test_c06_example_tables(criterion, shipped):
    want = dict(zip(EXTRI_CATS, ["inf", "inf", "2", "1", "2", "2"]))
    got, bad = [], []
    for name, w in want.items():
        cat = shipped.cat(name)
        v = gl(cat)
        got.append(str(v))
        if str(v) != w:
            bad.append(f"{name}: gl {v}, expected {w}")
        if v.is_infinite and not _cycle_is_closed(cat, v.cycle):
            bad.append(f"{name}: cycle {[i.label for i in v.cycle]} does not certify")
    criterion(6, "gl = inf, inf, 2, 1, 2, 2 with cycle certificates", not bad, "; ".join(bad) or ", ".join(got))


def test_c07_extdim_bounds(criterion, shipped):
    bad, seen = [], 0
    for name in ALL_RECS:
        r = shipped.rec(name)
        if not (r.i_shriek_exact or r.i_star_exact):
            continue
        seen += 1
        rep = verify_extdim_bounds(r)
        bad += [f"{name}: {c.name}" for c in rep.checks if c.ok is not True]
        for side, cat in (("A", r.a), ("B", r.b), ("C", r.c)):
            e = rep.witnesses[side]
            if e.value != 0 or e.witness != cat.full().generator():
                bad.append(f"{name}: ext.dim {side} = {e.value} witness {e.witness}")
    criterion(7, "max(ext.dim A, ext.dim C) <= ext.dim B <= ext.dim A + ext.dim C + 1", not bad and seen,
              "; ".join(bad) or f"{seen} recollements, all values 0 with generator witnesses")


def test_c08_oplus_lemma(criterion, shipped):
    bad, n = [], 0
    for name in ("mod_a2", "mod_a3r", "rec_x1.B"):
        cat = shipped.cat(name)
        for x, y in product(cat.universe.labels, repeat=2):
            for m, k in product((1, 2), repeat=2):
                n += 1
                v = check_oplus_lemma(cat, [x], [y], m, k)
                if not v.ok:
                    bad.append(f"{name}: {v}")
    criterion(8, "<T1>_m <> <T2>_n in <T1+T2>_(m+n)", not bad, "; ".join(bad[:3]) or f"{n} cases")


def test_c09_functor_bracket(criterion, shipped):
    bad, n = [], 0
    for name in ALL_RECS:
        r = shipped.rec(name)
        for key in ("i_star", "j_star"):
            f = r[key]
            ex = classify_exactness(f)
            if not ex.exact:
                bad.append(f"{name}: {key} not object-exact")
                continue
            for lab in f.source.universe.labels:
                for k in (1, 2, 3):
                    n += 1
                    v = check_functor_bracket(f, [lab], k, ex)
                    if not v.ok:
                        bad.append(f"{name}: {v}")
    criterion(9, "F(<T>_n) in <F(T)>_n for F = i_*, j_*", not bad, "; ".join(bad[:3]) or f"{n} cases")


def test_c10_pd_additivity(criterion, shipped):
    names = MODULE_CATS + EXTRI_CATS + [f"{r}.C" for r in X_RECS]
    bad, pairs, skipped = [], 0, 0
    for name in names:
        res = check_additivity(shipped.cat(name))
        pairs += res["pairs"]
        skipped += res["skipped"]
        bad += [f"{name}: {v}" for v in res["violations"][:2]]
    criterion(10, "pd(x+y) = max(pd x, pd y) on every shipped category", not bad,
              "; ".join(bad) or f"{len(names)} categories, {pairs} pairs, {skipped} cut off by the cap")


def test_c11_associativity(criterion, shipped):
    bad, n = [], 0
    for name in ("mod_a2", "mod_a3r"):
        cat = shipped.cat(name)
        for t in product(cat.universe.labels, repeat=3):
            n += 1
            left, right = check_associativity(cat, *([x] for x in t))
            if left != right:
                bad.append(f"{name}: {t}")
    criterion(11, "(U1 <> U2) <> U3 = U1 <> (U2 <> U3)", not bad, "; ".join(bad[:3]) or f"{n} triples")


def test_c12_flagged_triangular_value(criterion, shipped, a2, a3r):
    rep = run_suite()
    entry = next(e for e in load_expected()["values"] if e["provenance"] == "flagged")
    verdict = next(v for v in rep.verdicts if v["name"].startswith(entry["id"]))
    computed = gl(shipped.rec("rec_tri").b)
    problems = []
    if not rep.ok:
        problems.append(f"suite failed at {rep.first_failure()['name']}")
    if verdict["status"] != "pass" or "flagged" not in verdict["detail"]:
        problems.append(f"verdict {verdict}")
    if not any("gl mod = 1" in n for n in rep.notes):
        problems.append("no note on the published reading")
    # the same entry must fail once the bound is broken: gl B = 2 > 0 + 0 + 1
    z = make_category("zero", [], [], cap=2)

    def zero(n, s, t):
        return AddFunctor(n, s, t, [t.universe.zero()] * len(s.universe))

    funs = {"i_star": zero("i_star", z, a3r), "i_upper_star": zero("i_upper_star", a3r, z),
            "i_shriek": zero("i_shriek", a3r, z), "j_shriek": zero("j_shriek", z, a3r),
            "j_upper_star": zero("j_upper_star", a3r, z), "j_star": zero("j_star", z, a3r)}
    broken = RecollementModel("broken", z, a3r, z, funs, i_shriek_exact=True)
    if evaluate(entry, broken)[1]:
        problems.append("a violated bound still passes")
    criterion(12, "triangular gl reported and flagged, only its bound asserted", not problems,
              "; ".join(problems) or f"computed gl = {computed}, bound {verdict['detail'].split('bound ')[-1]}")


def test_summary():
    print("\n".join(RESULTS))
    assert len(RESULTS) == 12
