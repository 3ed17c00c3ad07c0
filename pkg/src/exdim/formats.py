"""Line-oriented text formats.

Every format is UTF-8, one directive per line, ``#`` starts a comment.

``.cat``   category models::

    category mod_L2
    cap 4
    indec P5
    projective P5
    dimvec P5 = 0 0 1
    conflation S4 -> P3 -> S3
    note free text

``.fun``   functors: ``functor``, ``source``, ``target``, ``class`` and one
``map <label> -> <obj|0>`` per source indec.

``.rec``   recollements: ``recollement``, ``cats <A> <B> <C>`` (category
files, relative to the ``.rec`` file), six ``functor <key> = <file>`` lines
and the two ``flag`` lines.

``.quiver`` ``quiver``, ``field``, ``vertex``, ``arrow a: v -> w`` and
``relation c1*path1 + c2*path2 = 0``.  Paths are written in composition
order, so ``beta.alpha`` is alpha followed by beta.

``.reps``  ``quiver <name>`` then blocks of ``rep``, ``dim v = n`` and
``mat a = [[...]]``.

``.bim``   ``bimodule``, ``vertex v -> w via a`` or ``vertex v -> 0`` and
``arrow a -> b`` or ``arrow a -> 0``.
"""

import json
import os
import re

import numpy as np

from .core import CategoryModel, Conflation, Subcat, Universe, close_table, irreducible_basics
from .errors import ExdimError, ParseError
from .functors import CLASSES, AddFunctor

_WORD = re.compile(r"^(\S+)\s*(.*)$")


def _lines(text, path):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _WORD.match(line)
        yield n, m.group(1), m.group(2).strip()


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", path) from None


class _Guard:
    """Re-raise library errors from one line as a ParseError at that line."""

    def __init__(self, path, line):
        self.path, self.line = path, line

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        if exc is None or isinstance(exc, ParseError):
            return False
        if isinstance(exc, (ExdimError, ValueError, KeyError)):
            raise ParseError(str(exc), self.path, self.line) from exc
        return False


def _one(args, what, path, n):
    if not args or len(args.split()) != 1:
        raise ParseError(f"{what} expects exactly one argument", path, n)
    return args


# -- categories -----------------------------------------------------------------

def parse_category(text, path=None):
    name = None
    cap = None
    labels = []
    projs = []
    confs = []
    dimvecs = {}
    notes = []
    for n, key, args in _lines(text, path):
        if key == "category":
            name = _one(args, "category", path, n)
        elif key == "cap":
            if not args.isdigit() or int(args) < 1:
                raise ParseError("cap must be a positive integer", path, n)
            cap = int(args)
        elif key == "indec":
            labels.append((n, _one(args, "indec", path, n)))
        elif key == "projective":
            projs.append((n, _one(args, "projective", path, n)))
        elif key == "conflation":
            parts = [t.strip() for t in args.split("->")]
            if len(parts) != 3 or not all(parts):
                raise ParseError("conflation expects 'L -> M -> R'", path, n)
            confs.append((n, parts))
        elif key == "dimvec":
            lab, eq, vec = args.partition("=")
            try:
                dimvecs[lab.strip()] = (n, tuple(int(x) for x in vec.split()))
            except ValueError:
                raise ParseError("dimvec expects '<label> = n n ...'", path, n) from None
            if not eq or not vec.split():
                raise ParseError("dimvec expects '<label> = n n ...'", path, n)
        elif key == "note":
            notes.append(args)
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    if name is None:
        raise ParseError("missing 'category' line", path)
    if cap is None:
        raise ParseError("missing 'cap' line", path)
    with _Guard(path, labels[0][0] if labels else None):
        u = Universe([lab for _, lab in labels])
    basics = []
    for n, parts in confs:
        with _Guard(path, n):
            c = Conflation(*(u.obj(t) for t in parts))
        if max(t.total for t in c.terms()) > cap:
            raise ParseError(f"conflation {c} has a term beyond cap {cap}", path, n)
        basics.append(c)
    for n, lab in projs:
        with _Guard(path, n):
            u.index(lab)
    dv = None
    if dimvecs:
        widths = {len(v) for _, v in dimvecs.values()}
        for lab, (n, _) in dimvecs.items():
            with _Guard(path, n):
                u.index(lab)
        if len(widths) != 1:
            raise ParseError("dimvecs have different lengths", path)
        missing = [lab for lab in u.labels if lab not in dimvecs]
        if missing:
            raise ParseError(f"no dimvec for {missing[0]}", path)
        dv = {lab: v for lab, (_, v) in dimvecs.items()}
    with _Guard(path, None):
        table = close_table(basics, cap, u)
    declared = Subcat.of(u, [lab for _, lab in projs]) if projs else None
    return CategoryModel(name, u, table, declared, "\n".join(notes), dv)


def load_category(path):
    return parse_category(_read(path), path)


def dump_category(cat, minimal=True):
    u = cat.universe
    out = [f"category {cat.name}", f"cap {cat.cap}"]
    for line in (cat.notes or "").splitlines():
        out.append(f"note {line}".rstrip())
    out += [f"indec {lab}" for lab in u.labels]
    if cat.declared_projectives is not None:
        out += [f"projective {lab}" for lab in cat.declared_projectives.labels]
    if cat.dimvecs is not None:
        out += [f"dimvec {lab} = {' '.join(map(str, cat.dimvecs[lab]))}" for lab in u.labels]
    n = len(u)
    if minimal:
        vecs = irreducible_basics(cat.table.basics, n)
        basics = [Conflation(u.from_counts(v[:n]), u.from_counts(v[n:2 * n]), u.from_counts(v[2 * n:]))
                  for v in vecs]
    else:
        basics = cat.table.basics
    out += [f"conflation {c}" for c in sorted(basics, key=Conflation.sort_key)]
    return "\n".join(out) + "\n"


# -- functors --------------------------------------------------------------------

def parse_functor(text, cats, path=None):
    """``cats`` maps category names to models."""
    head = {}
    maps = {}
    for n, key, args in _lines(text, path):
        if key in ("functor", "source", "target", "class"):
            head[key] = (n, _one(args, key, path, n))
        elif key == "map":
            lab, arrow, img = args.partition("->")
            if not arrow or not lab.strip() or not img.strip():
                raise ParseError("map expects '<label> -> <obj|0>'", path, n)
            if lab.strip() in maps:
                raise ParseError(f"second map for {lab.strip()}", path, n)
            maps[lab.strip()] = (n, img.strip())
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    for k in ("functor", "source", "target"):
        if k not in head:
            raise ParseError(f"missing '{k}' line", path)
    ends = []
    for k in ("source", "target"):
        n, cname = head[k]
        if cname not in cats:
            raise ParseError(f"unknown category {cname!r}", path, n)
        ends.append(cats[cname])
    src, tgt = ends
    cls = head.get("class", (None, "additive-only"))
    if cls[1] not in CLASSES:
        raise ParseError(f"unknown functor class {cls[1]!r}", path, cls[0])
    images = []
    for lab in src.universe.labels:
        if lab not in maps:
            raise ParseError(f"no map line for {lab}", path)
        n, img = maps[lab]
        with _Guard(path, n):
            images.append(tgt.obj(img))
    for lab, (n, _) in maps.items():
        if lab not in src.universe.labels:
            raise ParseError(f"{lab} is not an indec of {src.name}", path, n)
    return AddFunctor(head["functor"][1], src, tgt, images, cls[1])


def load_functor(path, cats):
    return parse_functor(_read(path), cats, path)


def dump_functor(f):
    out = [f"functor {f.name}", f"source {f.source.name}", f"target {f.target.name}",
           f"class {f.declared_class}"]
    out += [f"map {lab} -> {img}" for lab, img in zip(f.source.universe.labels, f.images)]
    return "\n".join(out) + "\n"


# -- recollements ----------------------------------------------------------------

def _ref(base, ref, ext):
    p = ref if os.path.splitext(ref)[1] else ref + ext
    return os.path.join(base, p)


def load_recollement(path, cache=None):
    from .recollement import FUNCTOR_KEYS, RecollementModel

    text = _read(path)
    base = os.path.dirname(path)
    cache = {} if cache is None else cache
    name = None
    cat_refs = None
    fun = {}
    flags = {}
    for n, key, args in _lines(text, path):
        if key == "recollement":
            name = _one(args, "recollement", path, n)
        elif key == "cats":
            parts = args.split()
            if len(parts) != 3:
                raise ParseError("cats expects three category files", path, n)
            cat_refs = (n, parts)
        elif key in ("functor", "flag"):
            k, eq, v = args.partition("=")
            k, v = k.strip(), v.strip()
            if not eq or not k or not v:
                raise ParseError(f"{key} expects '<key> = <value>'", path, n)
            if key == "functor":
                if k not in FUNCTOR_KEYS:
                    raise ParseError(f"unknown functor key {k!r}", path, n)
                fun[k] = (n, v)
            else:
                if k not in ("i_shriek_exact", "i_star_exact"):
                    raise ParseError(f"unknown flag {k!r}", path, n)
                if v not in ("true", "false"):
                    raise ParseError("flag value must be true or false", path, n)
                flags[k] = v == "true"
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    if name is None:
        raise ParseError("missing 'recollement' line", path)
    if cat_refs is None:
        raise ParseError("missing 'cats' line", path)
    missing = [k for k in FUNCTOR_KEYS if k not in fun]
    if missing:
        raise ParseError(f"missing functor line for {missing[0]}", path)
    cats = []
    for ref in cat_refs[1]:
        p = os.path.normpath(_ref(base, ref, ".cat"))
        if p not in cache:
            cache[p] = load_category(p)
        cats.append(cache[p])
    by_name = {c.name: c for c in cats}
    functors = {}
    for k in FUNCTOR_KEYS:
        n, ref = fun[k]
        functors[k] = load_functor(_ref(base, ref, ".fun"), by_name)
    with _Guard(path, cat_refs[0]):
        return RecollementModel(name, *cats, functors, flags.get("i_shriek_exact", False),
                                flags.get("i_star_exact", False))


def dump_recollement(r, cat_files, fun_files):
    """``cat_files`` are the three category file names, ``fun_files`` maps
    functor keys to file names."""
    from .recollement import FUNCTOR_KEYS

    out = [f"recollement {r.name}", "cats " + " ".join(cat_files)]
    out += [f"functor {k} = {fun_files[k]}" for k in FUNCTOR_KEYS]
    out += [f"flag i_shriek_exact = {str(r.i_shriek_exact).lower()}",
            f"flag i_star_exact = {str(r.i_star_exact).lower()}"]
    return "\n".join(out) + "\n"


# -- quivers, representations, bimodule rules --------------------------------------

_TERM = re.compile(r"^([+-]?\s*\d*)\s*\*?\s*([A-Za-z_][\w.]*)$")


def _parse_relation(args, path, n):
    lhs, eq, rhs = args.partition("=")
    if not eq or rhs.strip() != "0":
        raise ParseError("relation expects '... = 0'", path, n)
    terms = []
    for chunk in re.split(r"(?=[+-])", lhs.replace(" ", "")):
        if chunk in ("", "+"):
            continue
        m = _TERM.match(chunk)
        if not m:
            raise ParseError(f"cannot read relation term {chunk!r}", path, n)
        c = m.group(1).replace(" ", "")
        coef = 1 if c in ("", "+") else (-1 if c == "-" else int(c))
        path_labels = tuple(reversed(m.group(2).split(".")))
        if len(path_labels) < 2:
            raise ParseError(f"relation term {m.group(2)} has length < 2", path, n)
        terms.append((coef, path_labels))
    if not terms:
        raise ParseError("empty relation", path, n)
    return tuple(terms)


def parse_quiver(text, path=None):
    from .repbuilder import Arrow, QuiverSpec

    name, p = None, 2
    vertices, arrows, rels = [], [], []
    for n, key, args in _lines(text, path):
        if key == "quiver":
            name = _one(args, "quiver", path, n)
        elif key == "field":
            if not args.isdigit():
                raise ParseError("field expects a prime", path, n)
            p = int(args)
        elif key == "vertex":
            vertices.append(_one(args, "vertex", path, n))
        elif key == "arrow":
            m = re.match(r"^(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$", args)
            if not m:
                raise ParseError("arrow expects '<label>: <v> -> <w>'", path, n)
            arrows.append(Arrow(*m.groups()))
        elif key == "relation":
            rels.append(_parse_relation(args, path, n))
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    if name is None:
        raise ParseError("missing 'quiver' line", path)
    with _Guard(path, None):
        return QuiverSpec(name, vertices, arrows, rels, p)


def load_quiver(path):
    return parse_quiver(_read(path), path)


def _path_str(path):
    return ".".join(reversed(path))


def dump_quiver(q):
    out = [f"quiver {q.name}", f"field {q.p}"]
    out += [f"vertex {v}" for v in q.vertices]
    out += [f"arrow {a.label}: {a.src} -> {a.tgt}" for a in q.arrows]
    for rel in q.relations:
        terms = [f"{c}*{_path_str(path)}" for c, path in rel]
        out.append("relation " + " + ".join(terms) + " = 0")
    return "\n".join(out) + "\n"


def parse_reps(text, quivers, path=None):
    """``quivers`` maps names to QuiverSpec.  Returns an IndecList."""
    from .repbuilder import IndecList, Representation

    q = None
    reps = []
    cur = None

    def flush():
        if cur is not None:
            n, label, dims, mats = cur
            with _Guard(path, n):
                reps.append(Representation(q, dims, mats, label))

    for n, key, args in _lines(text, path):
        if key == "quiver":
            qname = _one(args, "quiver", path, n)
            if qname not in quivers:
                raise ParseError(f"unknown quiver {qname!r}", path, n)
            q = quivers[qname]
        elif key == "rep":
            if q is None:
                raise ParseError("'quiver' must come before the first rep", path, n)
            flush()
            cur = (n, _one(args, "rep", path, n), {}, {})
        elif key in ("dim", "mat"):
            if cur is None:
                raise ParseError(f"{key} outside a rep block", path, n)
            k, eq, v = args.partition("=")
            k, v = k.strip(), v.strip()
            if not eq or not k or not v:
                raise ParseError(f"{key} expects '<name> = <value>'", path, n)
            if key == "dim":
                if k not in q.vertices:
                    raise ParseError(f"unknown vertex {k!r}", path, n)
                if not v.isdigit():
                    raise ParseError("dim must be a non-negative integer", path, n)
                cur[2][k] = int(v)
            else:
                try:
                    cur[3][k] = np.array(json.loads(v), dtype=np.int64)
                except (ValueError, TypeError):
                    raise ParseError(f"cannot read matrix {v!r}", path, n) from None
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    flush()
    if q is None:
        raise ParseError("missing 'quiver' line", path)
    with _Guard(path, None):
        return IndecList(q, reps)


def load_reps(path, quivers):
    return parse_reps(_read(path), quivers, path)


def dump_reps(indecs):
    q = indecs.quiver
    out = [f"quiver {q.name}"]
    for r in indecs.reps:
        out.append(f"rep {r.label}")
        out += [f"dim {v} = {r.dims[v]}" for v in q.vertices if r.dims[v]]
        for a in q.arrows:
            m = r.mats[a.label]
            if m.size and m.any():
                out.append(f"mat {a.label} = {json.dumps(m.tolist())}")
    return "\n".join(out) + "\n"


def parse_bimodule(text, path=None):
    from .repbuilder import BimoduleRule

    name = None
    vmap, amap = {}, {}
    for n, key, args in _lines(text, path):
        if key == "bimodule":
            name = _one(args, "bimodule", path, n)
        elif key == "vertex":
            m = re.match(r"^(\S+)\s*->\s*(?:0|(\S+)\s+via\s+(\S+))$", args)
            if not m:
                raise ParseError("vertex expects '<v> -> <w> via <arrow>' or '<v> -> 0'", path, n)
            v, w, a = m.groups()
            vmap[v] = (w, a) if w else None
        elif key == "arrow":
            m = re.match(r"^(\S+)\s*->\s*(\S+)$", args)
            if not m:
                raise ParseError("arrow expects '<a> -> <b|0>'", path, n)
            amap[m.group(1)] = None if m.group(2) == "0" else m.group(2)
        else:
            raise ParseError(f"unknown directive {key!r}", path, n)
    if name is None:
        raise ParseError("missing 'bimodule' line", path)
    rule = BimoduleRule(vmap, amap)
    rule.name = name
    return rule


def load_bimodule(path):
    return parse_bimodule(_read(path), path)


def dump_bimodule(rule, name=None):
    out = [f"bimodule {name or getattr(rule, 'name', 'M')}"]
    for v, img in rule.vertex_map.items():
        out.append(f"vertex {v} -> 0" if img is None else f"vertex {v} -> {img[0]} via {img[1]}")
    for a, b in rule.arrow_map.items():
        out.append(f"arrow {a} -> {b or 0}")
    return "\n".join(out) + "\n"


def detect_kind(path):
    """The first directive of a file names its kind."""
    for _, key, _ in _lines(_read(path), path):
        return key
    raise ParseError("empty file", path)
