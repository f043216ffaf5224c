"""Parse and render the line-oriented .cat description format.

A file is a sequence of stanzas.  Block stanzas end with a bare `end`;
`job` lines stand alone.  `#` starts a comment anywhere.

    category C poset          category M monoid        category G graph
      objects a b               elements e g             objects a b
      le a b                    unit e                   edge e0 : a -> b
    end                         mul g g = e            end
                              end

    category T table                      category P product C D
      objects a b                         end
      mor id_a : a -> a
      mor f : a -> b
      ident a = id_a
      comp g f = h
    end

    functor F on C sig 1 1 table          functor H on C sig 1 1 hom
      fiber a a = x0 x1                   end
      act id_a f = x1 x1
    end

Functor kinds: table, hom (sig 1 1), hompi, const (an `elements` line),
repr X (sig 1 0), corepr X (sig 0 1), point.  Table action lines name one
morphism per slot and list images in source-fiber order.

    monoidal M on C unit t                job end F method twisted
      tensor a b = c                      job coend F
      tensormor f g = h                   job dinat F G
    end                                   job check-all F G
                                          job fubini F G
                                          job day M D0 D1
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .apps import MonoidalFinCat, validate_strict_monoidal
from .ends import COEND_METHODS, END_METHODS
from .errors import HaceError, ParseError
from .fincat import (
    FinCat,
    SetFunctorPQ,
    const_functor_pq,
    corepresentable,
    free_category,
    functor_from_rule,
    hom_functor,
    monoid_category,
    point_functor,
    poset_category,
    power_pq,
    product_category,
    representable,
    validate_category,
    validate_functor_pq,
)
from .setops import FinSet, finset
from .twisted import hom_pi

JOB_KINDS = ("end", "coend", "dinat", "kusarigama", "fubini", "day", "check-all")


@dataclass
class Job:
    kind: str
    args: tuple
    method: str | None = None


@dataclass
class CatSpec:
    categories: dict = field(default_factory=dict)
    functors: dict = field(default_factory=dict)
    functor_base: dict = field(default_factory=dict)
    monoidals: dict = field(default_factory=dict)
    monoidal_base: dict = field(default_factory=dict)
    jobs: list = field(default_factory=list)


class _Cursor:
    """Tokens of one line, with 1-based column tracking."""

    def __init__(self, line_no: int, raw: str):
        self.line_no = line_no
        body = raw.split("#", 1)[0]
        self.tokens, self.cols = [], []
        idx = 0
        for tok in body.split():
            at = body.index(tok, idx)
            self.tokens.append(tok)
            self.cols.append(at + 1)
            idx = at + len(tok)
        self.end_col = len(body.rstrip()) + 1
        self.k = 0

    def __bool__(self):
        return self.k < len(self.tokens)

    def fail(self, expected: str, got: str = ""):
        col = self.cols[self.k] if self else self.end_col
        raise ParseError(self.line_no, col, expected, got)

    def next(self, expected: str) -> str:
        if not self:
            self.fail(expected)
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, literal: str):
        tok = self.next(literal)
        if tok != literal:
            self.k -= 1
            self.fail(literal, tok)

    def rest(self) -> list:
        out = self.tokens[self.k:]
        self.k = len(self.tokens)
        return out

    def done(self):
        if self:
            self.fail("end of line", self.tokens[self.k])

    def next_int(self, expected: str) -> int:
        tok = self.next(expected)
        try:
            return int(tok)
        except ValueError:
            self.k -= 1
            self.fail(expected, tok)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        cur = _Cursor(no, raw)
        if cur:
            yield cur


def parse_text(text: str, assoc_check: bool = True) -> CatSpec:
    spec = CatSpec()
    stream = list(_lines(text))
    i = 0
    while i < len(stream):
        cur = stream[i]
        head = cur.next("category, functor, monoidal, or job")
        if head == "category":
            i = _parse_category(spec, stream, i, assoc_check)
        elif head == "functor":
            i = _parse_functor(spec, stream, i)
        elif head == "monoidal":
            i = _parse_monoidal(spec, stream, i)
        elif head == "job":
            _parse_job(spec, cur)
            i += 1
        else:
            cur.k -= 1
            cur.fail("category, functor, monoidal, or job", head)
    return spec


def _block(stream, i):
    """Body cursors of the stanza opened at stream[i], and the next index."""
    body = []
    j = i + 1
    while True:
        if j >= len(stream):
            raise ParseError(stream[i].line_no, 1, "matching 'end' for stanza")
        cur = stream[j]
        if cur.tokens == ["end"]:
            return body, j + 1
        body.append(cur)
        j += 1


def _fresh_name(spec: CatSpec, cur: _Cursor, kind: str) -> str:
    name = cur.next(f"{kind} name")
    if name in spec.categories or name in spec.functors or name in spec.monoidals:
        cur.k -= 1
        cur.fail(f"unused {kind} name", name)
    return name


def _lookup(spec: CatSpec, cur: _Cursor, table: dict, what: str):
    name = cur.next(what)
    if name not in table:
        cur.k -= 1
        cur.fail(f"a declared {what}", name)
    return name


# ---------------------------------------------------------------------------
# categories
# ---------------------------------------------------------------------------

def _parse_category(spec: CatSpec, stream, i, assoc_check: bool = True) -> int:
    cur = stream[i]
    name = _fresh_name(spec, cur, "category")
    kind = cur.next("table, poset, monoid, graph, or product")
    if kind == "product":
        a = _lookup(spec, cur, spec.categories, "category")
        b = _lookup(spec, cur, spec.categories, "category")
        cur.done()
        body, j = _block(stream, i)
        if body:
            body[0].fail("end")
        spec.categories[name] = product_category(
            spec.categories[a], spec.categories[b], name=name)
        return j
    if kind not in ("table", "poset", "monoid", "graph"):
        cur.k -= 1
        cur.fail("table, poset, monoid, graph, or product", kind)
    cur.done()
    body, j = _block(stream, i)
    builder = {"table": _category_table, "poset": _category_poset,
               "monoid": _category_monoid, "graph": _category_graph}[kind]
    try:
        if kind == "table":
            C = _category_table(name, body, assoc_check)
        else:
            C = builder(name, body)
    except ParseError:
        raise
    except HaceError as err:
        raise ParseError(cur.line_no, 1, f"a valid {kind} category ({err})")
    spec.categories[name] = C
    return j


def _category_poset(name, body) -> FinCat:
    objects, rel = [], []
    for cur in body:
        key = cur.next("objects or le")
        if key == "objects":
            objects.extend(cur.rest())
        elif key == "le":
            a, b = cur.next("object"), cur.next("object")
            cur.done()
            rel.append((a, b))
        else:
            cur.k -= 1
            cur.fail("objects or le", key)
    return poset_category(name, objects, rel)


def _category_monoid(name, body) -> FinCat:
    elements, unit, mul = [], None, {}
    for cur in body:
        key = cur.next("elements, unit, or mul")
        if key == "elements":
            elements.extend(cur.rest())
        elif key == "unit":
            unit = cur.next("element")
            cur.done()
        elif key == "mul":
            a, b = cur.next("element"), cur.next("element")
            cur.expect("=")
            c = cur.next("element")
            cur.done()
            mul[(a, b)] = c
        else:
            cur.k -= 1
            cur.fail("elements, unit, or mul", key)
    if unit is None:
        raise ParseError(body[-1].line_no if body else 1, 1, "a unit line")
    for a in elements:
        for b in elements:
            if a == unit:
                mul.setdefault((a, b), b)
            if b == unit:
                mul.setdefault((a, b), a)
    return monoid_category(name, elements, unit, mul)


def _category_graph(name, body) -> FinCat:
    objects, edges = [], []
    for cur in body:
        key = cur.next("objects or edge")
        if key == "objects":
            objects.extend(cur.rest())
        elif key == "edge":
            e = cur.next("edge id")
            cur.expect(":")
            a = cur.next("object")
            cur.expect("->")
            b = cur.next("object")
            cur.done()
            edges.append((e, a, b))
        else:
            cur.k -= 1
            cur.fail("objects or edge", key)
    return free_category(name, objects, edges)


def _category_table(name, body, assoc_check: bool = True) -> FinCat:
    objects, morphisms = [], []
    src, tgt, ident, compose = {}, {}, {}, {}
    for cur in body:
        key = cur.next("objects, mor, ident, or comp")
        if key == "objects":
            objects.extend(cur.rest())
        elif key == "mor":
            u = cur.next("morphism id")
            cur.expect(":")
            a = cur.next("object")
            cur.expect("->")
            b = cur.next("object")
            cur.done()
            morphisms.append(u)
            src[u], tgt[u] = a, b
        elif key == "ident":
            a = cur.next("object")
            cur.expect("=")
            ident[a] = cur.next("morphism")
            cur.done()
        elif key == "comp":
            g, f = cur.next("morphism"), cur.next("morphism")
            cur.expect("=")
            compose[(g, f)] = cur.next("morphism")
            cur.done()
        else:
            cur.k -= 1
            cur.fail("objects, mor, ident, or comp", key)
    C = FinCat(name, objects, morphisms, src, tgt, ident, compose)
    validate_category(C, assoc=assoc_check)
    return C


# ---------------------------------------------------------------------------
# functors
# ---------------------------------------------------------------------------

_SIMPLE_KINDS = ("hom", "hompi", "point", "table", "const", "repr", "corepr")


def _parse_functor(spec: CatSpec, stream, i) -> int:
    cur = stream[i]
    name = _fresh_name(spec, cur, "functor")
    cur.expect("on")
    cname = _lookup(spec, cur, spec.categories, "category")
    C = spec.categories[cname]
    cur.expect("sig")
    p = cur.next_int("contravariant arity")
    q = cur.next_int("covariant arity")
    if p < 0 or q < 0:
        cur.fail("nonnegative arities")
    kind = cur.next("functor kind")
    if kind not in _SIMPLE_KINDS:
        cur.k -= 1
        cur.fail("one of " + ", ".join(_SIMPLE_KINDS), kind)
    arg = None
    if kind in ("repr", "corepr"):
        arg = cur.next("an object")
        if arg not in C.objects:
            cur.k -= 1
            cur.fail("an object of " + cname, arg)
    cur.done()
    body, j = _block(stream, i)
    try:
        F = _build_functor(name, C, (p, q), kind, arg, body, cur)
    except ParseError:
        raise
    except HaceError as err:
        raise ParseError(cur.line_no, 1, f"a valid functor ({err})")
    spec.functors[name] = F
    spec.functor_base[name] = cname
    return j


def _build_functor(name, C, sig, kind, arg, body, head: _Cursor) -> SetFunctorPQ:
    p, q = sig
    if kind == "hom":
        if sig != (1, 1):
            head.fail("sig 1 1 for the hom functor")
        _no_body(body)
        return hom_functor(C, name)
    if kind == "hompi":
        _no_body(body)
        return hom_pi(C, sig, name)
    if kind == "point":
        _no_body(body)
        return point_functor(C, sig)
    if kind == "repr":
        if sig != (1, 0):
            head.fail("sig 1 0 for a representable")
        _no_body(body)
        return representable(C, arg, name)
    if kind == "corepr":
        if sig != (0, 1):
            head.fail("sig 0 1 for a corepresentable")
        _no_body(body)
        return corepresentable(C, arg, name)
    if kind == "const":
        elements = []
        for cur in body:
            cur.expect("elements")
            elements.extend(cur.rest())
        if len(set(elements)) != len(elements):
            head.fail("distinct constant elements")
        return const_functor_pq(C, sig, finset(elements), name)
    return _functor_table(name, C, sig, body, head)


def _no_body(body):
    if body:
        body[0].fail("end")


def _functor_table(name, C, sig, body, head: _Cursor) -> SetFunctorPQ:
    p, q = sig
    n = p + q
    fibers: dict[tuple, FinSet] = {}
    actions: dict[tuple, tuple] = {}
    for cur in body:
        key = cur.next("fiber or act")
        if key == "fiber":
            T = tuple(cur.next("an object") for _ in range(n))
            for A in T:
                if A not in C.objects:
                    cur.fail("an object of " + C.name, A)
            cur.expect("=")
            elems = cur.rest()
            if T in fibers:
                cur.fail("an unseen fiber key", " ".join(map(str, T)))
            if len(set(elems)) != len(elems):
                cur.fail("distinct fiber elements")
            fibers[T] = finset(elems)
        elif key == "act":
            us = tuple(cur.next("a morphism") for _ in range(n))
            for u in us:
                if u not in C.src:
                    cur.fail("a morphism of " + C.name, u)
            cur.expect("=")
            if us in actions:
                cur.fail("an unseen action key", " ".join(map(str, us)))
            actions[us] = tuple(cur.rest())
        else:
            cur.k -= 1
            cur.fail("fiber or act", key)
    P = power_pq(C, sig)
    for T in P.objects:
        if T not in fibers:
            head.fail(f"a fiber line for key {' '.join(map(str, T))}")
    for us in P.morphisms:
        if us not in actions:
            head.fail(f"an act line for key {' '.join(map(str, us))}")

    def act_rule(us):
        images = actions[us]
        srcfib = fibers[P.src[us]]
        if len(images) != len(srcfib):
            head.fail(f"{len(srcfib)} images on act {' '.join(map(str, us))}")
        table = dict(zip(srcfib.elements, images))
        return lambda x: table[x]

    F = functor_from_rule(C, sig, lambda T: fibers[T], act_rule, name)
    validate_functor_pq(F)
    return F


# ---------------------------------------------------------------------------
# monoidal structure
# ---------------------------------------------------------------------------

def _parse_monoidal(spec: CatSpec, stream, i) -> int:
    cur = stream[i]
    name = _fresh_name(spec, cur, "monoidal")
    cur.expect("on")
    cname = _lookup(spec, cur, spec.categories, "category")
    C = spec.categories[cname]
    cur.expect("unit")
    unit = cur.next("an object")
    if unit not in C.objects:
        cur.k -= 1
        cur.fail("an object of " + cname, unit)
    cur.done()
    body, j = _block(stream, i)
    tensor_obj, tensor_mor = {}, {}
    for line in body:
        key = line.next("tensor or tensormor")
        if key == "tensor":
            a, b = line.next("object"), line.next("object")
            line.expect("=")
            tensor_obj[(a, b)] = line.next("object")
            line.done()
        elif key == "tensormor":
            u, v = line.next("morphism"), line.next("morphism")
            line.expect("=")
            tensor_mor[(u, v)] = line.next("morphism")
            line.done()
        else:
            line.k -= 1
            line.fail("tensor or tensormor", key)
    M = MonoidalFinCat(C, unit, tensor_obj, tensor_mor)
    try:
        validate_strict_monoidal(M)
    except KeyError as err:
        raise ParseError(cur.line_no, 1, f"a complete tensor table (missing {err})")
    except HaceError as err:
        raise ParseError(cur.line_no, 1, f"a strict monoidal structure ({err})")
    spec.monoidals[name] = M
    spec.monoidal_base[name] = cname
    return j


# ---------------------------------------------------------------------------
# jobs
# ---------------------------------------------------------------------------

def _flip_ok(F: SetFunctorPQ, G: SetFunctorPQ) -> bool:
    return F.base is G.base and (G.sig.p, G.sig.q) == (F.sig.q, F.sig.p)


def _parse_job(spec: CatSpec, cur: _Cursor):
    kind = cur.next("a job kind")
    if kind not in JOB_KINDS:
        cur.k -= 1
        cur.fail("one of " + ", ".join(JOB_KINDS), kind)
    if kind in ("end", "coend"):
        fname = _lookup(spec, cur, spec.functors, "functor")
        method = None
        if cur:
            cur.expect("method")
            method = cur.next("a method name")
            table = END_METHODS if kind == "end" else COEND_METHODS
            if method not in table + ("all",):
                cur.k -= 1
                cur.fail("one of " + ", ".join(table + ("all",)), method)
        cur.done()
        spec.jobs.append(Job(kind, (fname,), method))
        return
    if kind in ("dinat", "kusarigama", "check-all"):
        fname = _lookup(spec, cur, spec.functors, "functor")
        gname = _lookup(spec, cur, spec.functors, "functor")
        cur.done()
        if not _flip_ok(spec.functors[fname], spec.functors[gname]):
            cur.fail(f"functors with flipped signatures on one base for {kind}")
        spec.jobs.append(Job(kind, (fname, gname)))
        return
    if kind == "fubini":
        fname = _lookup(spec, cur, spec.functors, "functor")
        gname = _lookup(spec, cur, spec.functors, "functor")
        cur.done()
        spec.jobs.append(Job(kind, (fname, gname)))
        return
    mname = _lookup(spec, cur, spec.monoidals, "monoidal")
    M = spec.monoidals[mname]
    names = []
    while cur:
        dname = _lookup(spec, cur, spec.functors, "functor")
        D = spec.functors[dname]
        if D.base is not M.cat or (D.sig.p, D.sig.q) != (1, 0):
            cur.fail("sig 1 0 functors on the monoidal base", dname)
        names.append(dname)
    if not names:
        cur.fail("at least one functor")
    spec.jobs.append(Job("day", (mname,) + tuple(names)))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _tok(x) -> str:
    s = str(x)
    if not s or any(ch.isspace() for ch in s) or s == "#":
        raise HaceError(f"label {x!r} is not renderable as a token")
    return s


def render_category(name: str, C: FinCat) -> list:
    out = [f"category {_tok(name)} table",
           "  objects " + " ".join(_tok(A) for A in C.objects)]
    for u in C.morphisms:
        out.append(f"  mor {_tok(u)} : {_tok(C.src[u])} -> {_tok(C.tgt[u])}")
    for A in C.objects:
        out.append(f"  ident {_tok(A)} = {_tok(C.ident[A])}")
    for g in C.morphisms:
        for f in C.morphisms:
            if C.tgt[f] != C.src[g]:
                continue
            if C.is_identity(g) or C.is_identity(f):
                continue
            out.append(f"  comp {_tok(g)} {_tok(f)} = {_tok(C.compose(g, f))}")
    out.append("end")
    return out


def render_functor(name: str, cname: str, F: SetFunctorPQ) -> list:
    """Dump a functor as a table stanza with canonical element names."""
    P = F.power_cat
    rename = {T: {x: f"x{i}" for i, x in enumerate(F.fiber(T))} for T in P.objects}
    out = [f"functor {_tok(name)} on {_tok(cname)} sig {F.sig.p} {F.sig.q} table"]
    for T in P.objects:
        names = " ".join(rename[T][x] for x in F.fiber(T))
        key = " ".join(_tok(A) for A in T)
        out.append(f"  fiber {key} = {names}".rstrip())
    for us in P.morphisms:
        fn = F.act(us)
        images = " ".join(rename[P.tgt[us]][fn(x)] for x in F.fiber(P.src[us]))
        key = " ".join(_tok(u) for u in us)
        out.append(f"  act {key} = {images}".rstrip())
    out.append("end")
    return out


def render_monoidal(name: str, cname: str, M: MonoidalFinCat) -> list:
    C = M.cat
    out = [f"monoidal {_tok(name)} on {_tok(cname)} unit {_tok(M.unit)}"]
    for a in C.objects:
        for b in C.objects:
            out.append(f"  tensor {_tok(a)} {_tok(b)} = {_tok(M.tobj(a, b))}")
    for u in C.morphisms:
        for v in C.morphisms:
            out.append(f"  tensormor {_tok(u)} {_tok(v)} = {_tok(M.tmor(u, v))}")
    out.append("end")
    return out


def render_spec(spec: CatSpec) -> str:
    out = []
    for name, C in spec.categories.items():
        out.extend(render_category(name, C))
        out.append("")
    for name, F in spec.functors.items():
        out.extend(render_functor(name, spec.functor_base[name], F))
        out.append("")
    for name, M in spec.monoidals.items():
        out.extend(render_monoidal(name, spec.monoidal_base[name], M))
        out.append("")
    for job in spec.jobs:
        line = f"job {job.kind} " + " ".join(_tok(a) for a in job.args)
        if job.method:
            line += f" method {job.method}"
        out.append(line)
    return "\n".join(out).rstrip() + "\n"


def render_instance(inst) -> str:
    """Render a generated instance as a runnable .cat text."""
    spec = CatSpec()
    spec.categories["C"] = inst.base
    if inst.profile == "day":
        spec.monoidals["M"] = inst.monoidal
        spec.monoidal_base["M"] = "C"
        names = []
        for k, D in enumerate(inst.factors):
            spec.functors[f"D{k}"] = D
            spec.functor_base[f"D{k}"] = "C"
            names.append(f"D{k}")
        spec.jobs.append(Job("day", ("M",) + tuple(names)))
        return render_spec(spec)
    if inst.profile == "fubini":
        spec.categories["D"] = inst.partner.base
        spec.functors["F"] = inst.functor
        spec.functor_base["F"] = "C"
        spec.functors["G"] = inst.partner
        spec.functor_base["G"] = "D"
        spec.jobs.append(Job("fubini", ("F", "G")))
        return render_spec(spec)
    spec.functors["F"] = inst.functor
    spec.functor_base["F"] = "C"
    spec.functors["G"] = inst.partner
    spec.functor_base["G"] = "C"
    spec.jobs.append(Job("check-all", ("F", "G")))
    return render_spec(spec)
