import pytest

from conftest import ALL_RECS, X_RECS
from exdim.core import make_category
from exdim.functors import AddFunctor, identity_functor
from exdim.homdim import DimValue
from exdim.recollement import (RecollementModel, audit_recollement, relative_gl, verify_extdim_bounds,
                               verify_gl_bounds)


def with_functor(r, key, images, name="broken", **flags):
    f = r[key]
    funs = dict(r.functors)
    funs[key] = AddFunctor(f.name, f.source, f.target, images, f.declared_class)
    fl = {"i_shriek_exact": r.i_shriek_exact, "i_star_exact": r.i_star_exact}
    fl.update(flags)
    return RecollementModel(name, r.a, r.b, r.c, funs, **fl)


@pytest.mark.parametrize("name", ALL_RECS)
def test_shipped_recollements_pass_the_audit(shipped, name):
    a = audit_recollement(shipped.rec(name))
    assert a.ok and a.conclusive, [c.name for c in a.failures()]


def test_tri_flags(shipped):
    r = shipped.rec("rec_tri")
    assert r.i_shriek_exact and not r.i_star_exact


def test_dropping_an_image_breaks_the_kernel_image_axiom(shipped):
    r = shipped.rec("rec_x1")
    images = list(r["i_star"].images)
    images[r.a.universe.index("S1")] = r.b.universe.zero()
    a = audit_recollement(with_functor(r, "i_star", images))
    r2 = a.get("Im i_* = Ker j^*")
    assert r2.ok is False
    assert "Ker j^* = {S1:0, S2:0, P1:0}" in r2.detail
    assert "Im i_* = {S2:0, P1:0}" in r2.detail
    # everything else that fails goes through i_*
    assert {c.name for c in a.failures()} == {
        "Im i_* = Ker j^*", "i^* i_* = Id", "i^! i_* = Id", "i_* exact",
        "unit pattern i_*i^!B -> B -> K, K -> j_*j^*B -> i_*A",
        "counit pattern i_*A' -> j_!j^*B -> K, K -> B -> i_*i^*B",
        "conflation i_*i^!B -> B -> j_*j^*B (i^! exact)",
    }


def test_a_false_flag_is_caught(shipped):
    r = shipped.rec("rec_x1")
    bad = RecollementModel("flagged", r.a, r.b, r.c, r.functors, r.i_shriek_exact, True)
    fails = {c.name for c in audit_recollement(bad).failures()}
    assert fails == {"flag i_star_exact matches", "conflation j_!j^*B -> B -> i_*i^*B (i^* exact)"}


def degenerate(a2, **flags):
    z = make_category("zero", [], [], cap=2)

    def zero_functor(n, s, t):
        return AddFunctor(n, s, t, [t.universe.zero()] * len(s.universe), "exact")

    funs = {"i_star": zero_functor("i_star", z, a2), "i_upper_star": zero_functor("i_upper_star", a2, z),
            "i_shriek": zero_functor("i_shriek", a2, z)}
    for k in ("j_shriek", "j_upper_star", "j_star"):
        funs[k] = identity_functor(a2, k)
    return RecollementModel("degenerate", z, a2, a2, funs, **flags)


def test_degenerate_recollement(a2):
    r = degenerate(a2, i_shriek_exact=True, i_star_exact=True)
    assert relative_gl(r) == DimValue.finite(0)
    assert audit_recollement(r).ok
    assert verify_gl_bounds(r).ok
    assert verify_extdim_bounds(r).ok


def test_extdim_bounds_need_a_flag(a2):
    rep = verify_extdim_bounds(degenerate(a2))
    assert [c.ok for c in rep.checks] == [None]
    assert "hypothesis-not-met" in rep.checks[0].detail


# computed by hand from the resolutions in mod Lambda'' and the restricted tables
GL = {"rec_x1": (1, 2, 0), "rec_x2": (1, 1, 1), "rec_x3": (1, 2, 1), "rec_x4": (1, 2, 0)}


@pytest.mark.parametrize("name", X_RECS)
def test_gl_terms(shipped, name):
    rep = verify_gl_bounds(shipped.rec(name))
    assert rep.ok and rep.conclusive
    ga, gb, gc = GL[name]
    chk = rep.get("gl B <= gl A + gl C + 1")
    assert (chk.values["lhs"], chk.values["rhs"]) == (gb, ga + gc + 1)
    assert rep.get("gl C <= gl B").values["lhs"] == gc


def test_relative_gl_is_one(shipped):
    # i_*(S1) = S1:0 keeps the non-split S2:0 -> P1:0 -> S1:0 with projective ends
    for name in ALL_RECS:
        assert relative_gl(shipped.rec(name)) == DimValue.finite(1)


@pytest.mark.parametrize("name", ALL_RECS)
def test_finiteness_equivalences(shipped, name):
    rep = verify_gl_bounds(shipped.rec(name))
    for c in rep.checks:
        if "<->" in c.name:
            assert c.ok is True
