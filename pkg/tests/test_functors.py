import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_RECS
from exdim.errors import MixedCategoryError, ModelInconsistency
from exdim.functors import AddFunctor, apply, classify_exactness, compose, identity_functor, is_quasi_dense


def test_images_on_the_triangular_model(shipped):
    r = shipped.rec("rec_x1")
    assert str(r["i_star"](r.a.obj("S1"))) == "S1:0"
    assert str(r["j_upper_star"](r.b.obj("P1:P3"))) == "P3"
    assert r["i_star"](r.a.universe.zero()).is_zero()


def test_apply_rejects_foreign_objects(shipped):
    r = shipped.rec("rec_x1")
    with pytest.raises(MixedCategoryError):
        apply(r["i_star"], r.c.obj("P3"))


def test_from_labels_needs_every_indec(a2):
    with pytest.raises(ModelInconsistency):
        AddFunctor.from_labels("f", a2, a2, {"S2": "S2"})
    f = AddFunctor.from_labels("f", a2, a2, {"S2": "S2", "P1": "P1+P1", "S1": "0"})
    assert str(f(a2.obj("P1+S1"))) == "P1+P1"


@pytest.mark.parametrize("name", ALL_RECS)
def test_exactness_of_the_exact_pair(shipped, name):
    r = shipped.rec(name)
    assert classify_exactness(r["i_star"]).exact
    assert classify_exactness(r["j_upper_star"]).exact
    assert classify_exactness(r["i_shriek"]).exact


def test_i_upper_star_is_not_exact(shipped):
    # cokernels lose the kernel of the structure map
    v = classify_exactness(shipped.rec("rec_tri")["i_upper_star"])
    assert not v.exact
    assert "maps to" in v.witness


def test_identity_and_composition(a2):
    idf = identity_functor(a2)
    assert classify_exactness(idf).exact
    assert is_quasi_dense(idf)
    twice = compose(idf, idf)
    assert twice.images == idf.images


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_apply_is_additive(shipped, data):
    r = shipped.rec(data.draw(st.sampled_from(ALL_RECS)))
    key = data.draw(st.sampled_from(sorted(r.functors)))
    f = r[key]
    labels = f.source.universe.labels
    xs = data.draw(st.lists(st.sampled_from(labels), max_size=3))
    ys = data.draw(st.lists(st.sampled_from(labels), max_size=3))
    x, y = f.source.obj("+".join(xs) or "0"), f.source.obj("+".join(ys) or "0")
    assert f(x + y) == f(x) + f(y)
