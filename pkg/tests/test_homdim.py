import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import EXTRI_CATS, MODULE_CATS
from exdim.core import make_category
from exdim.errors import ModelInconsistency, NoEnoughProjectives
from exdim.homdim import (DimValue, check_additivity, check_triangle_pd_bounds, dim_max, gl, has_enough_projectives,
                          pd, pd_direct, pd_values, projectives)


def chain_category():
    # c3 is projective (nothing ends there), so pd c2 = 1 and pd c1 = 2
    return make_category("chain", ["p", "c1", "c2", "c3"], ["c2 -> p -> c1", "c3 -> p -> c2"], cap=2,
                         projectives=["p", "c3"])


def test_dimvalue_order_and_text():
    assert str(DimValue.finite(2)) == "2"
    assert str(DimValue.infinite()) == "inf"
    assert str(DimValue.at_least(5)) == ">=5"
    assert dim_max([DimValue.finite(1), DimValue.at_least(3)]).kind == "atleast"
    assert dim_max([DimValue.at_least(3), DimValue.infinite()]).is_infinite
    assert dim_max([]) == DimValue.finite(0)
    assert DimValue.infinite().value() == math.inf


def test_a2_by_hand(a2):
    # 0 -> S2 -> P1 -> S1 -> 0 is the projective resolution of S1
    assert projectives(a2).labels == ["S2", "P1"]
    v, cert = pd(a2, "S1", certificate=True)
    assert v == DimValue.finite(1)
    assert [str(c) for c in cert.chain] == ["S2 -> P1 -> S1"]
    assert gl(a2) == DimValue.finite(1)


def test_a3r_by_hand(a3r):
    # 0 -> P5 -> P4 -> S4 -> 0 and 0 -> S4 -> P3 -> S3 -> 0
    assert set(projectives(a3r).labels) == {"P3", "P4", "P5"}
    assert pd(a3r, "S4") == DimValue.finite(1)
    v, cert = pd(a3r, "S3", certificate=True)
    assert v == DimValue.finite(2)
    assert [str(c) for c in cert.chain] == ["S4 -> P3 -> S3", "P5 -> P4 -> S4"]
    assert gl(a3r) == DimValue.finite(2)


def test_zero_and_projectives_have_pd_zero(shipped):
    for name in MODULE_CATS:
        cat = shipped.cat(name)
        assert pd(cat, cat.universe.zero()) == DimValue.finite(0)
        for lab in projectives(cat).labels:
            assert pd(cat, lab) == DimValue.finite(0)


def test_chain_and_bound():
    cat = chain_category()
    assert pd(cat, "c1") == DimValue.finite(2)
    assert pd(cat, "c1", bound=1) == DimValue.at_least(2)
    assert gl(cat, bound=1).kind == "atleast"
    assert pd_values(cat, bound=1) is None


def test_infinite_pd_has_a_closed_cycle(shipped):
    cat = shipped.cat("extri_a1")
    v = gl(cat)
    assert v.is_infinite
    assert [i.label for i in v.cycle] == ["1", "2"]
    assert pd(cat, "2/1") == DimValue.finite(0)


def test_no_enough_projectives():
    # b is not projective, and no conflation K -> a^k -> b exists
    cat = make_category("thin", ["a", "b"], ["a -> b -> b"], cap=2)
    ok, wit = has_enough_projectives(cat)
    assert not ok
    assert [i.label for i, w in wit.items() if w is None] == ["b"]
    with pytest.raises(NoEnoughProjectives):
        pd(cat, "b")


def test_zero_middle_counts_as_projective_cover():
    cat = make_category("loop", ["x", "y"], ["x -> 0 -> y", "y -> 0 -> x"], cap=2)
    assert projectives(cat).labels == []
    v = gl(cat)
    assert v.is_infinite and [i.label for i in v.cycle] == ["x", "y"]


def test_wrong_declared_projective_is_reported():
    cat = make_category("bad", ["s", "p", "q"], ["s -> p -> q"], cap=2, projectives=["p", "q"])
    with pytest.raises(ModelInconsistency, match="declared projective q"):
        projectives(cat)


@pytest.mark.parametrize("name", MODULE_CATS + EXTRI_CATS)
def test_certificates_replay(shipped, name):
    cat = shipped.cat(name)
    proj = projectives(cat).support
    for lab in cat.universe.labels:
        v, cert = pd(cat, lab, certificate=True)
        if not v.is_finite:
            assert cert is None
            continue
        assert len(cert) == v.n
        cur = cat.obj(lab)
        for i, step in enumerate(cert.chain):
            assert step.right == cur
            assert step.middle.support <= proj
            if i not in cert.beyond_cap:
                assert step in cat.table
            cur = step.left
        assert cur.support <= proj


@pytest.mark.parametrize("name", ["mod_a2", "mod_a3r", "rec_x1.B", "extri_b2"])
def test_gl_matches_object_level_route(shipped, name):
    cat = shipped.cat(name)
    direct = pd_direct(cat)
    best = max(direct.values())
    assert gl(cat) == DimValue.finite(best)
    res = check_additivity(cat)
    assert res["violations"] == []


def test_triangle_bounds_single(a3r):
    c = next(iter(cat for cat in a3r.table if str(cat) == "S4 -> P3 -> S3"))
    tv = check_triangle_pd_bounds(a3r, c)
    assert tv.ok and not tv.inconclusive
    assert [str(v) for v in tv.values] == ["1", "0", "2"]


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_pd_of_sum_is_max(shipped, data):
    cat = shipped.cat("mod_tri")
    labels = cat.universe.labels
    xs = data.draw(st.lists(st.sampled_from(labels), max_size=3))
    ys = data.draw(st.lists(st.sampled_from(labels), max_size=3))
    x, y = cat.obj("+".join(xs) or "0"), cat.obj("+".join(ys) or "0")
    assert pd(cat, x + y) == dim_max([pd(cat, x), pd(cat, y)])
