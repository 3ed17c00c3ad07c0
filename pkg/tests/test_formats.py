import os
import shutil

import numpy as np
import pytest

from conftest import EXTRI_CATS, MODULE_CATS
from exdim import formats
from exdim.build import run_recipe
from exdim.errors import ParseError
from exdim.recollement import FUNCTOR_KEYS
from exdim.suite import DATA_DIR


def same_table(c1, c2):
    t1, t2 = c1.table, c2.table
    return (c1.universe == c2.universe and t1.cap == t2.cap
            and np.array_equal(np.concatenate([t1.left, t1.middle, t1.right], 1),
                               np.concatenate([t2.left, t2.middle, t2.right], 1)))


@pytest.mark.parametrize("name", ["mod_a2", "mod_a3r", "rec_x4.B"] + EXTRI_CATS[:2])
def test_category_round_trip(shipped, name):
    cat = shipped.cat(name)
    again = formats.parse_category(formats.dump_category(cat))
    assert same_table(cat, again)
    assert again.declared_projectives == cat.declared_projectives
    assert formats.dump_category(again) == formats.dump_category(cat)


def test_full_dump_matches_minimal(a2):
    full = formats.parse_category(formats.dump_category(a2, minimal=False))
    assert same_table(full, a2)


def test_functor_round_trip(shipped):
    r = shipped.rec("rec_x2")
    cats = {c.name: c for c in (r.a, r.b, r.c)}
    for key in FUNCTOR_KEYS:
        f = r[key]
        g = formats.parse_functor(formats.dump_functor(f), cats)
        assert g.images == f.images and g.declared_class == f.declared_class


def test_quiver_reps_bimodule_round_trip(quivers):
    for q in quivers.values():
        q2 = formats.parse_quiver(formats.dump_quiver(q))
        assert q2.vertices == q.vertices and q2.arrows == q.arrows and q2.relations == q.relations and q2.p == q.p
        ind = formats.load_reps(os.path.join(DATA_DIR, f"{q.name}.reps"), quivers)
        ind2 = formats.parse_reps(formats.dump_reps(ind), quivers)
        assert ind2.labels == ind.labels
        for r1, r2 in zip(ind.reps, ind2.reps):
            assert r1.dims == r2.dims
            assert all(np.array_equal(r1.mats[a], r2.mats[a]) for a in r1.mats)
    rule = formats.load_bimodule(os.path.join(DATA_DIR, "phi.bim"))
    rule2 = formats.parse_bimodule(formats.dump_bimodule(rule))
    assert vars(rule2) == vars(rule)


def test_detect_kind():
    kinds = {"mod_a2.cat": "category", "rec_tri.rec": "recollement", "rec_tri.j_star.fun": "functor",
             "a2.quiver": "quiver", "phi.bim": "bimodule"}
    for f, kind in kinds.items():
        assert formats.detect_kind(os.path.join(DATA_DIR, f)) == kind


@pytest.mark.parametrize("text, line, match", [
    ("category c\ncap 2\nindec X\nconflation X ->\n", 4, "L -> M -> R"),
    ("category c\ncap two\n", 2, "positive integer"),
    ("category c\ncap 2\nindec X\nconflation X -> Y -> X\n", 4, "unknown"),
    ("category c\ncap 2\nindec X\nbogus line\n", 4, "unknown directive"),
    ("category c\ncap 1\nindec X\n# comment\nconflation X+X -> X -> X\n", 5, "cap"),
])
def test_category_parse_errors_carry_line_numbers(text, line, match):
    with pytest.raises(ParseError, match=match) as err:
        formats.parse_category(text, "bad.cat")
    assert err.value.line == line
    assert str(err.value).startswith(f"bad.cat:{line}:")


def test_reps_parse_errors(quivers):
    with pytest.raises(ParseError) as err:
        formats.parse_reps("quiver a2\nrep X\ndim 1 = -1\n", quivers, "x.reps")
    assert err.value.line == 3
    with pytest.raises(ParseError):
        formats.parse_reps("quiver a2\nrep X\ndim 1 = 1\ndim 2 = 1\nmat delta = [[1, 1]]\n", quivers)


def test_bad_quiver_relation():
    with pytest.raises(ParseError) as err:
        formats.parse_quiver("quiver q\nvertex 1\nvertex 2\narrow a: 1 -> 2\nrelation a = 0\n", "q.quiver")
    assert err.value.line == 5


def test_recollement_refs_resolve_relative_to_the_file(tmp_path):
    for f in os.listdir(DATA_DIR):
        if f.startswith(("rec_x4", "mod_a2")):
            shutil.copy(os.path.join(DATA_DIR, f), tmp_path / f)
    r = formats.load_recollement(str(tmp_path / "rec_x4.rec"))
    assert len(r.b.universe) == 5
    os.remove(tmp_path / "rec_x4.j_star.fun")
    with pytest.raises(Exception):
        formats.load_recollement(str(tmp_path / "rec_x4.rec"))


def test_recipe_rebuilds_the_shipped_files(tmp_path):
    written = run_recipe(os.path.join(DATA_DIR, "models.recipe"), str(tmp_path))
    assert len(written) == 46
    for path in written:
        with open(path, encoding="utf-8") as a, open(os.path.join(DATA_DIR, os.path.basename(path)),
                                                     encoding="utf-8") as b:
            assert a.read() == b.read(), path


def test_recipe_errors(tmp_path):
    bad = tmp_path / "bad.recipe"
    bad.write_text("quiver nothere.quiver\n")
    with pytest.raises(Exception):
        run_recipe(str(bad), str(tmp_path))
    bad.write_text(f"quiver {os.path.join(DATA_DIR, 'a2.quiver')}\ncategory m a2 cap=x\n")
    with pytest.raises(ParseError) as err:
        run_recipe(str(bad), str(tmp_path))
    assert err.value.line == 2
