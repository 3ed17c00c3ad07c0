"""Build recipes: quiver data in, category/functor/recollement files out.

A recipe is line oriented like the other formats::

    quiver a2.quiver
    quiver a3r.quiver
    bimodule phi.bim
    glue tri a2 a3r phi
    indecs a2.reps
    category mod_a2 a2 cap=6
    recollement rec_tri a2 a3r phi tri cap_a=6 cap_b=3 cap_c=4
    restrict rec_x1 rec_tri P3 S3

Paths are relative to the recipe file; outputs go to ``out`` (default: the
recipe's directory).
"""

import os

from . import formats
from .errors import ParseError
from .recollement import FUNCTOR_KEYS
from .repbuilder import (BuildSettings, build_modcat, build_triangular_recollement,
                         restrict_recollement, triangular_quiver)

_SETTING_KEYS = {"cap": "cap", "left": "left_total", "pair": "pair_left_total", "extdim": "max_ext_dim"}


def _options(tokens, path, n, allowed):
    opts = {}
    rest = []
    for t in tokens:
        if "=" in t:
            k, v = t.split("=", 1)
            if k not in allowed or not v.isdigit():
                raise ParseError(f"bad option {t!r}", path, n)
            opts[k] = int(v)
        else:
            rest.append(t)
    return rest, opts


def _settings(opts, suffix=""):
    kw = {}
    for k, field in _SETTING_KEYS.items():
        if k + suffix in opts:
            kw[field] = opts[k + suffix]
    return BuildSettings(**kw)


class _Run:
    def __init__(self, base, out, log):
        self.base, self.out, self.log = base, out, log
        self.quivers, self.rules, self.indecs, self.recs = {}, {}, {}, {}
        self.written = []
        self.cat_files = {}

    def write(self, name, text):
        p = os.path.join(self.out, name)
        with open(p, "w", encoding="utf-8") as fh:
            fh.write(text)
        self.written.append(p)
        if self.log:
            self.log(f"wrote {p}")

    def write_cat(self, cat):
        fname = cat.name + ".cat"
        if self.cat_files.get(cat.name) is not cat:
            self.write(fname, formats.dump_category(cat))
            self.cat_files[cat.name] = cat
        return fname

    def write_rec(self, r):
        cats = [self.write_cat(c) for c in (r.a, r.b, r.c)]
        funs = {}
        for k in FUNCTOR_KEYS:
            funs[k] = f"{r.name}.{k}.fun"
            self.write(funs[k], formats.dump_functor(r.functors[k]))
        self.write(r.name + ".rec", formats.dump_recollement(r, cats, funs))


def _need(table, key, what, path, n):
    if key not in table:
        raise ParseError(f"unknown {what} {key!r}", path, n)
    return table[key]


def run_recipe(path, out=None, log=None):
    """Execute a recipe; returns the list of written files."""
    base = os.path.dirname(path)
    out = out or base
    os.makedirs(out, exist_ok=True)
    run = _Run(base, out, log)
    for n, key, args in formats._lines(formats._read(path), path):
        tok = args.split()
        src = lambda name: os.path.join(base, name)
        if key == "quiver":
            q = formats.load_quiver(src(formats._one(args, key, path, n)))
            run.quivers[q.name] = q
        elif key == "bimodule":
            rule = formats.load_bimodule(src(formats._one(args, key, path, n)))
            run.rules[rule.name] = rule
        elif key == "glue":
            if len(tok) != 4:
                raise ParseError("glue expects '<name> <q1> <q2> <bimodule>'", path, n)
            name, a, c, b = tok
            run.quivers[name] = triangular_quiver(_need(run.quivers, a, "quiver", path, n),
                                                  _need(run.quivers, c, "quiver", path, n),
                                                  _need(run.rules, b, "bimodule", path, n), name)
        elif key == "indecs":
            ind = formats.load_reps(src(formats._one(args, key, path, n)), run.quivers)
            run.indecs[ind.quiver.name] = ind
        elif key == "category":
            rest, opts = _options(tok, path, n, set(_SETTING_KEYS))
            if len(rest) != 2:
                raise ParseError("category expects '<name> <quiver> [options]'", path, n)
            name, qn = rest
            q = _need(run.quivers, qn, "quiver", path, n)
            cat = build_modcat(q, _need(run.indecs, qn, "indec list", path, n), _settings(opts), name)
            run.write_cat(cat)
        elif key == "recollement":
            allowed = {k + s for k in _SETTING_KEYS for s in ("_a", "_b", "_c")}
            rest, opts = _options(tok, path, n, allowed)
            if len(rest) != 5:
                raise ParseError("recollement expects '<name> <q1> <q2> <bimodule> <glued>'", path, n)
            name, a, c, b, g = rest
            qa, qc = _need(run.quivers, a, "quiver", path, n), _need(run.quivers, c, "quiver", path, n)
            qb = _need(run.quivers, g, "quiver", path, n)
            r = build_triangular_recollement(
                qa, qc, _need(run.rules, b, "bimodule", path, n),
                _need(run.indecs, a, "indec list", path, n), _need(run.indecs, c, "indec list", path, n),
                _need(run.indecs, g, "indec list", path, n),
                settings={s: _settings(opts, "_" + s) for s in "abc"},
                names={"a": f"mod_{a}", "b": f"mod_{g}", "c": f"mod_{c}", "rec": name}, qb=qb)
            run.recs[name] = r
            run.write_rec(r)
        elif key == "restrict":
            if len(tok) < 3:
                raise ParseError("restrict expects '<name> <recollement> <C-labels...>'", path, n)
            name, frm, labels = tok[0], tok[1], tok[2:]
            r = _need(run.recs, frm, "recollement", path, n)
            try:
                r2 = restrict_recollement(r, labels, name)
            except ParseError:
                raise
            except Exception as e:
                raise ParseError(str(e), path, n) from e
            run.recs[name] = r2
            run.write_rec(r2)
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    return run.written
