"""Command line entry point: ``exdim <command> [files] [options]``.

Exit status is 0 when every verdict passes, 1 on a failing verdict and 2 on
unreadable or inconsistent input.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from itertools import product

from . import formats
from .core import CategoryModel, close_table
from .errors import ExdimError
from .extdim import (check_associativity, check_dense_lemma, check_functor_bracket, check_oplus_lemma,
                     ext_dim, level)
from .functors import AddFunctor, classify_exactness
from .homdim import DEFAULT_BOUND, gl, has_enough_projectives, pd, projectives
from .recollement import (FUNCTOR_ENDS, FUNCTOR_KEYS, SYMBOL, RecollementModel, audit_recollement,
                          verify_extdim_bounds, verify_gl_bounds)
from .report import Report, dim_data, dim_lines, fmt_set

COMMANDS = ("dims", "extdim", "audit", "bounds", "build", "paper-suite")


@dataclass
class RunConfig:
    command: str
    paths: list = field(default_factory=list)
    cap: int = None
    bound: int = DEFAULT_BOUND
    fmt: str = "text"
    audit: bool = True
    out: str = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.cap is not None and self.cap < 1:
            raise ValueError("--cap must be positive")
        if self.bound < 1:
            raise ValueError("--bound must be positive")
        if self.fmt not in ("text", "json"):
            raise ValueError("--format must be text or json")


class InputError(ExdimError):
    pass


# -- loading ----------------------------------------------------------------------

def _recap(cat, cap):
    table = close_table(cat.table.basics, cap, cat.universe)
    return CategoryModel(cat.name, cat.universe, table, cat.declared_projectives, cat.notes, cat.dimvecs)


def _recap_rec(r, cap):
    cats = {"a": _recap(r.a, cap), "b": _recap(r.b, cap), "c": _recap(r.c, cap)}
    funs = {}
    for k in FUNCTOR_KEYS:
        f = r.functors[k]
        s, t = FUNCTOR_ENDS[k]
        funs[k] = AddFunctor(f.name, cats[s], cats[t], f.images, f.declared_class)
    return RecollementModel(r.name, cats["a"], cats["b"], cats["c"], funs, r.i_shriek_exact, r.i_star_exact)


def load_model(path, cap=None):
    """A CategoryModel or RecollementModel, chosen by the file's first line."""
    if not os.path.exists(path):
        raise InputError(f"{path}: no such file")
    kind = formats.detect_kind(path)
    if kind == "category":
        cat = formats.load_category(path)
        return _recap(cat, cap) if cap else cat
    if kind == "recollement":
        r = formats.load_recollement(path)
        return _recap_rec(r, cap) if cap else r
    raise InputError(f"{path}: expected a category or recollement file, found '{kind}'")


# -- commands ---------------------------------------------------------------------

def _dims_section(rep, cat, bound, inputs):
    s = rep.section(f"category {cat.name}")
    s["lines"].append(f"{len(cat.universe)} indecs, cap {cat.cap}, {len(cat.table)} conflations")
    try:
        p = projectives(cat)
    except ExdimError as e:
        rep.verdict(f"{cat.name}: projectives agree with the declaration", False, str(e), inputs)
        return
    if cat.declared_projectives is not None:
        rep.verdict(f"{cat.name}: projectives agree with the declaration", True, str(p), inputs)
    s["lines"].append(f"projectives {p}")
    ok, wit = has_enough_projectives(cat)
    rep.verdict(f"{cat.name}: enough projectives", ok,
                "" if ok else "missing for " + ", ".join(i.label for i, w in wit.items() if w is None), inputs)
    if not ok:
        return
    data = {"projectives": list(p.labels), "pd": {}}
    for lab in cat.universe.labels:
        v, cert = pd(cat, lab, bound, certificate=True)
        s["lines"].extend(dim_lines(f"pd {lab}", v, cert))
        data["pd"][lab] = dim_data(v, cert)
    g = gl(cat, bound)
    s["lines"].extend(dim_lines("gl", g))
    data["gl"] = dim_data(g)
    s["data"] = data
    rep.verdict(f"{cat.name}: gl resolved within bound {bound}", True if g.resolved else None, str(g), inputs)


def cmd_dims(model, rep, cfg):
    cats = [model] if isinstance(model, CategoryModel) else [model.a, model.b, model.c]
    for cat in cats:
        _dims_section(rep, cat, cfg.bound, cfg.paths)


def _extdim_category(rep, cat, inputs, suites=True):
    s = rep.section(f"extension dimension of {cat.name}")
    e = ext_dim(cat)
    s["lines"].append(f"ext.dim {cat.name} = {e.value}  witness {e.witness} (level {e.level.level})")
    s["data"]["ext_dim"] = e.value
    s["data"]["witness"] = str(e.witness)
    s["data"]["levels"] = {}
    for lab in cat.universe.labels:
        lv = level(cat, [lab])
        s["lines"].append(f"level {lab} = {lv.level}")
        s["data"]["levels"][lab] = str(lv.level)
    if not suites:
        return
    labels = cat.universe.labels
    bad = []
    n = 0
    for x, y in product(labels, repeat=2):
        for m, k in product((1, 2), repeat=2):
            n += 1
            v = check_oplus_lemma(cat, [x], [y], m, k)
            if not v.ok:
                bad.append(str(v))
    rep.verdict(f"{cat.name}: <T1>_m <> <T2>_n in <T1+T2>_(m+n), single indecs, m, n <= 2", not bad,
                bad[0] if bad else f"{n} cases", inputs)
    bad = []
    n = 0
    for x, y, z in product(labels, repeat=3):
        n += 1
        left, right = check_associativity(cat, [x], [y], [z])
        if left != right:
            bad.append(f"({x} <> {y}) <> {z} = {left} but {x} <> ({y} <> {z}) = {right}")
    rep.verdict(f"{cat.name}: <> is associative on single indecs", not bad, bad[0] if bad else f"{n} triples",
                inputs)


def cmd_extdim(model, rep, cfg):
    if isinstance(model, CategoryModel):
        _extdim_category(rep, model, cfg.paths)
        return
    for cat in (model.a, model.b, model.c):
        _extdim_category(rep, cat, cfg.paths, suites=False)
    ext = verify_extdim_bounds(model)
    rep.absorb(ext, cfg.paths)
    for key in ("i_star", "j_star"):
        f = model.functors[key]
        ex = classify_exactness(f)
        if not ex.exact:
            rep.verdict(f"{SYMBOL[key]}(<T>_n) in <{SYMBOL[key]} T>_n", None, "functor not object-exact", cfg.paths)
            continue
        bad = []
        for lab in f.source.universe.labels:
            for n in (1, 2, 3):
                v = check_functor_bracket(f, [lab], n, ex)
                if not v.ok:
                    bad.append(str(v))
        rep.verdict(f"{SYMBOL[key]}(<T>_n) in <{SYMBOL[key]}(T)>_n, n <= 3", not bad,
                    bad[0] if bad else f"{len(f.source.universe)} generators", cfg.paths)
    f = model.functors["j_upper_star"]
    try:
        d = check_dense_lemma(f)
        rep.verdict("ext.dim B >= ext.dim C via j^*", d.ok, str(d), cfg.paths)
    except ExdimError as e:
        rep.verdict("ext.dim B >= ext.dim C via j^*", None, str(e), cfg.paths)


def _need_rec(model, cmd):
    if not isinstance(model, RecollementModel):
        raise InputError(f"{cmd} needs a recollement file")
    return model


def cmd_audit(model, rep, cfg):
    r = _need_rec(model, "audit")
    a = audit_recollement(r)
    s = rep.section(f"recollement {r.name}")
    s["lines"].append(f"{r.a.name} -> {r.b.name} -> {r.c.name}")
    for k in FUNCTOR_KEYS:
        f = r.functors[k]
        s["lines"].append(f"{SYMBOL[k]}: " + ", ".join(f"{l} -> {y}" for l, y in
                                                       zip(f.source.universe.labels, f.images)))
    rep.absorb(a, cfg.paths)


def cmd_bounds(model, rep, cfg):
    r = _need_rec(model, "bounds")
    b = verify_gl_bounds(r, cfg.bound)
    s = rep.section(f"bounds for {r.name}")
    for c in b.checks:
        tight = "  (equality)" if c.values.get("tight") else ""
        s["lines"].append(f"{c.name}: {c.detail}{tight}")
    s["data"]["tight"] = [c.name for c in b.checks if c.values.get("tight")]
    rep.absorb(b, cfg.paths)
    rep.absorb(verify_extdim_bounds(r), cfg.paths)


def cmd_build(cfg, rep):
    from .build import run_recipe

    if len(cfg.paths) == 1:
        written = run_recipe(cfg.paths[0], cfg.out)
    elif len(cfg.paths) == 2:
        from .repbuilder import BuildSettings, build_modcat

        q = formats.load_quiver(cfg.paths[0])
        ind = formats.load_reps(cfg.paths[1], {q.name: q})
        cat = build_modcat(q, ind, BuildSettings(cap=cfg.cap or BuildSettings.cap))
        out = cfg.out or os.path.dirname(cfg.paths[0])
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, cat.name + ".cat")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(formats.dump_category(cat))
        written = [path]
    else:
        raise InputError("build takes a recipe, or a quiver file and a reps file")
    s = rep.section("written")
    s["lines"].extend(written)
    s["data"]["files"] = written
    rep.verdict("build", True, f"{len(written)} files")


# -- driver -----------------------------------------------------------------------

def run(cfg):
    """Returns ``(report, exit_code)``."""
    rep = Report(cfg.command, cfg.paths)
    if cfg.command == "paper-suite":
        from .suite import DATA_DIR, run_suite

        rep = run_suite(cfg.paths[0] if cfg.paths else DATA_DIR, bound=cfg.bound, audit=cfg.audit)
    elif cfg.command == "build":
        cmd_build(cfg, rep)
    else:
        if len(cfg.paths) != 1:
            raise InputError(f"{cfg.command} takes exactly one input file")
        model = load_model(cfg.paths[0], cfg.cap)
        if isinstance(model, RecollementModel) and cfg.audit and cfg.command != "audit":
            a = audit_recollement(model)
            bad = a.failures()
            rep.verdict(f"audit on load: {model.name}", not bad,
                        bad[0].name if bad else f"{len(a.checks)} checks", cfg.paths)
        {"dims": cmd_dims, "extdim": cmd_extdim, "audit": cmd_audit, "bounds": cmd_bounds}[cfg.command](
            model, rep, cfg)
    return rep, (0 if rep.ok else 1)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None, help="re-close every table at this cap")
    common.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="pd search bound")
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    common.add_argument("--no-audit", dest="audit", action="store_false", help="skip the recollement audit on load")
    common.add_argument("--out", default=None, help="write the report (or, for build, the files) here")
    p = argparse.ArgumentParser(prog="exdim", description="dimensions of finite extriangulated category models")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "dims": "projectives, pd with certificates, gl",
        "extdim": "levels, extension dimension, lemma suites",
        "audit": "object-level recollement checks",
        "bounds": "global and extension dimension inequalities for a recollement",
        "build": "quiver data to category/recollement files",
        "paper-suite": "run the shipped examples against their expected values",
    }
    for c in COMMANDS:
        sp = sub.add_parser(c, parents=[common], help=helps[c])
        sp.add_argument("paths", nargs="*")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.paths, args.cap, args.bound, args.fmt, args.audit, args.out)
        rep, code = run(cfg)
    except (ExdimError, ValueError, OSError) as e:
        print(f"exdim: error: {e}", file=sys.stderr)
        return 2
    text = rep.render(cfg.fmt)
    if cfg.out and cfg.command != "build":
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code:
        bad = rep.first_failure()
        print(f"exdim: failed: {bad['name']}: {bad['detail']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
