"""Abstract and concrete syntax for the call-by-value functional language.

Terms are numerals built from z/s, a case split on numerals, recursive
functions (the self binder is in scope in the body), application, an effect
marker `eff[label] e`, and - for the monadic-normal-form dialect only - a
`let x = e in e` form.  `_` is a legal binder that binds nothing.

Values are z, s applied to a value, and functions.  Variables are never
values here; the MNF *grammar* additionally counts variables as values,
which is what `is_mnf_value` captures.
"""

from dataclasses import dataclass

### abstract syntax

BLANK = "_"


class Expr:
    pass


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Zero(Expr):
    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True)
class Succ(Expr):
    body: Expr


@dataclass(frozen=True)
class Case(Expr):
    zero_branch: Expr
    succ_var: str
    succ_branch: Expr
    scrutinee: Expr


@dataclass(frozen=True)
class Lam(Expr):
    self_var: str
    param: str
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Eff(Expr):
    label: str
    body: Expr


@dataclass(frozen=True)
class Let(Expr):
    var: str
    bound: Expr
    body: Expr


def is_value(e: Expr) -> bool:
    match e:
        case Zero() | Lam():
            return True
        case Succ(body):
            return is_value(body)
        case _:
            return False


def numeral(n: int) -> Expr:
    e: Expr = Zero()
    for _ in range(n):
        e = Succ(e)
    return e


def numeral_value(e: Expr):
    """The int a numeral value denotes, or None for non-numerals."""
    n = 0
    while isinstance(e, Succ):
        e = e.body
        n += 1
    return n if isinstance(e, Zero) else None


def expr_size(e: Expr) -> int:
    match e:
        case Var() | Zero():
            return 1
        case Succ(b) | Eff(_, b) | Lam(_, _, b):
            return 1 + expr_size(b)
        case App(f, a):
            return 1 + expr_size(f) + expr_size(a)
        case Case(zb, _, sb, sc):
            return 1 + expr_size(zb) + expr_size(sb) + expr_size(sc)
        case Let(_, e1, b):
            return 1 + expr_size(e1) + expr_size(b)
    raise TypeError(f"not an expression: {e!r}")


def expr_depth(e: Expr) -> int:
    match e:
        case Var() | Zero():
            return 1
        case Succ(b) | Eff(_, b) | Lam(_, _, b):
            return 1 + expr_depth(b)
        case App(f, a):
            return 1 + max(expr_depth(f), expr_depth(a))
        case Case(zb, _, sb, sc):
            return 1 + max(expr_depth(zb), expr_depth(sb), expr_depth(sc))
        case Let(_, e1, b):
            return 1 + max(expr_depth(e1), expr_depth(b))
    raise TypeError(f"not an expression: {e!r}")


def free_vars(e: Expr) -> frozenset:
    match e:
        case Var(x):
            return frozenset() if x == BLANK else frozenset({x})
        case Zero():
            return frozenset()
        case Succ(b) | Eff(_, b):
            return free_vars(b)
        case Lam(f, x, b):
            return free_vars(b) - {n for n in (f, x) if n != BLANK}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Case(zb, xv, sb, sc):
            sb_free = free_vars(sb) - ({xv} if xv != BLANK else set())
            return free_vars(zb) | sb_free | free_vars(sc)
        case Let(x, e1, b):
            b_free = free_vars(b) - ({x} if x != BLANK else set())
            return free_vars(e1) | b_free
    raise TypeError(f"not an expression: {e!r}")


class SubstOpenValue(Exception):
    """Raised when substitution is asked to push a non-value or open term."""


def subst(e: Expr, mapping: dict) -> Expr:
    """Capture-free substitution of closed values for variables.

    Only closed values may be substituted (that is all evaluation ever
    needs), which makes capture impossible.  Entries for the wildcard
    binder are ignored: `_` never stands for anything.
    """
    mapping = {x: v for x, v in mapping.items() if x != BLANK}
    for x, v in mapping.items():
        if not is_value(v) or free_vars(v):
            raise SubstOpenValue(f"substituting non-closed-value for {x}: {v!r}")
    return _subst(e, mapping)


def _subst(e: Expr, m: dict) -> Expr:
    if not m:
        return e
    match e:
        case Var(x):
            return m.get(x, e)
        case Zero():
            return e
        case Succ(b):
            return Succ(_subst(b, m))
        case Eff(l, b):
            return Eff(l, _subst(b, m))
        case Lam(f, x, b):
            inner = {k: v for k, v in m.items() if k != f and k != x}
            return Lam(f, x, _subst(b, inner))
        case App(f, a):
            return App(_subst(f, m), _subst(a, m))
        case Case(zb, xv, sb, sc):
            inner = {k: v for k, v in m.items() if k != xv}
            return Case(_subst(zb, m), xv, _subst(sb, inner), _subst(sc, m))
        case Let(x, e1, b):
            inner = {k: v for k, v in m.items() if k != x}
            return Let(x, _subst(e1, m), _subst(b, inner))
    raise TypeError(f"not an expression: {e!r}")


def all_names(e: Expr) -> set:
    """Every variable or binder name occurring anywhere in e."""
    out: set = set()

    def walk(e: Expr) -> None:
        match e:
            case Var(x):
                out.add(x)
            case Zero():
                pass
            case Succ(b) | Eff(_, b):
                walk(b)
            case Lam(f, x, b):
                out.update((f, x))
                walk(b)
            case App(f, a):
                walk(f)
                walk(a)
            case Case(zb, xv, sb, sc):
                out.add(xv)
                walk(zb)
                walk(sb)
                walk(sc)
            case Let(x, e1, b):
                out.add(x)
                walk(e1)
                walk(b)

    walk(e)
    out.discard(BLANK)
    return out


def alpha_eq(a: Expr, b: Expr) -> bool:
    """Equality up to consistent renaming of bound variables.

    A `_` binder binds nothing, so it never participates in the renaming;
    a term that actually references the other side's binder cannot be
    alpha-equal to one whose binder is `_`.
    """

    def go(a, b, env_a, env_b, depth):
        match a, b:
            case Var(x), Var(y):
                return env_a.get(x, ("free", x)) == env_b.get(y, ("free", y))
            case Zero(), Zero():
                return True
            case Succ(ba), Succ(bb):
                return go(ba, bb, env_a, env_b, depth)
            case Eff(la, ba), Eff(lb, bb):
                return la == lb and go(ba, bb, env_a, env_b, depth)
            case Lam(fa, xa, ba), Lam(fb, xb, bb):
                ea, eb, depth = _bind2(env_a, env_b, (fa, fb), (xa, xb), depth)
                return go(ba, bb, ea, eb, depth)
            case App(fa, aa), App(fb, ab):
                return go(fa, fb, env_a, env_b, depth) and go(aa, ab, env_a, env_b, depth)
            case Case(za, xa, sa, ca), Case(zb, xb, sb, cb):
                if not go(za, zb, env_a, env_b, depth):
                    return False
                if not go(ca, cb, env_a, env_b, depth):
                    return False
                ea, eb, depth = _bind2(env_a, env_b, (xa, xb), None, depth)
                return go(sa, sb, ea, eb, depth)
            case Let(xa, ea1, ba), Let(xb, eb1, bb):
                if not go(ea1, eb1, env_a, env_b, depth):
                    return False
                ea, eb, depth = _bind2(env_a, env_b, (xa, xb), None, depth)
                return go(ba, bb, ea, eb, depth)
        return False

    return go(a, b, {}, {}, 0)


def _bind2(env_a, env_b, pair1, pair2, depth):
    env_a, env_b = dict(env_a), dict(env_b)
    for pair in (pair1, pair2):
        if pair is None:
            continue
        na, nb = pair
        if na != BLANK:
            env_a[na] = ("bound", depth)
        if nb != BLANK:
            env_b[nb] = ("bound", depth)
        # a blank on one side leaves that name resolving as free, which is
        # exactly what makes Lam(f,..) vs Lam(_,..) differ when f is used
        depth += 1
    return env_a, env_b, depth


### monadic normal form grammar

def is_mnf_value(e: Expr) -> bool:
    """Value according to the MNF grammar (variables count as values)."""
    match e:
        case Var() | Zero():
            return True
        case Succ(b):
            return is_mnf_value(b)
        case Lam(_, _, b):
            return check_mnf(b)
        case _:
            return False


def check_mnf(e: Expr) -> bool:
    """True iff e is in monadic normal form: every evaluation position that
    the small-step rules would have to descend into is already a value."""
    match e:
        case Var() | Zero() | Succ() | Lam():
            return is_mnf_value(e)
        case Case(zb, _, sb, sc):
            return is_mnf_value(sc) and check_mnf(zb) and check_mnf(sb)
        case App(f, a):
            return is_mnf_value(f) and is_mnf_value(a)
        case Eff(_, b):
            return check_mnf(b)
        case Let(_, e1, b):
            return check_mnf(e1) and check_mnf(b)
    return False


### concrete syntax

KEYWORDS = {"z", "s", "case", "fun", "eff", "let", "in"}

_PUNCT = ("=>", "(", ")", "{", "}", "[", "]", "|", "=")


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'punct' | 'ident' | 'eof'
    text: str
    line: int
    col: int


def _tokenize(src: str):
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(_Tok("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            if c.isalnum() or c == "_" or c == "'":
                j = i
                while j < n and (src[j].isalnum() or src[j] in "_'"):
                    j += 1
                toks.append(_Tok("ident", src[i:j], line, col))
                col += j - i
                i = j
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def err(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.text != text or (t.kind == "eof"):
            self.err(f"expected {text!r}, found {t.text!r}" if t.kind != "eof" else f"expected {text!r}, found end of input")
        return self.next()

    def binder(self) -> str:
        t = self.peek()
        if t.kind != "ident" or (t.text in KEYWORDS and t.text != "_"):
            self.err(f"expected a binder, found {t.text!r}")
        return self.next().text

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            self.err(f"expected an identifier, found {t.text!r}")
        if t.text == BLANK:
            self.err("the wildcard _ cannot be referenced")
        return self.next().text

    def expr(self) -> Expr:
        t = self.peek()
        if t.text == "fun":
            self.next()
            f = self.binder()
            self.expect("(")
            x = self.binder()
            self.expect(")")
            self.expect("=>")
            return Lam(f, x, self.expr())
        if t.text == "let":
            self.next()
            x = self.binder()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return Let(x, bound, self.expr())
        if t.text == "eff":
            self.next()
            self.expect("[")
            lab = self.peek()
            if lab.kind != "ident":
                self.err("expected an effect label")
            self.next()
            self.expect("]")
            return Eff(lab.text, self.expr())
        return self.app()

    def app(self) -> Expr:
        e = self.atom()
        while self.starts_atom():
            e = App(e, self.atom())
        return e

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind == "punct":
            return t.text == "("
        if t.kind == "eof":
            return False
        return t.text not in {"fun", "eff", "let", "in"}

    def atom(self) -> Expr:
        t = self.peek()
        if t.text == "z":
            self.next()
            return Zero()
        if t.text == "s":
            self.next()
            self.expect("(")
            b = self.expr()
            self.expect(")")
            return Succ(b)
        if t.text == "case":
            self.next()
            sc = self.expr()
            self.expect("{")
            self.expect("z")
            self.expect("=>")
            zb = self.expr()
            self.expect("|")
            self.expect("s")
            self.expect("(")
            xv = self.binder()
            self.expect(")")
            self.expect("=>")
            sb = self.expr()
            self.expect("}")
            return Case(zb, xv, sb, sc)
        if t.text == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            return Var(self.ident())
        self.err(f"expected an expression, found {t.text!r}")


def parse_expr(src: str) -> Expr:
    p = _Parser(src)
    e = p.expr()
    t = p.peek()
    if t.kind != "eof":
        p.err(f"trailing input starting at {t.text!r}")
    return e


def print_expr(e: Expr) -> str:
    match e:
        case Var(x):
            return x
        case Zero():
            return "z"
        case Succ(b):
            return f"s({print_expr(b)})"
        case Lam(f, x, b):
            return f"fun {f}({x}) => {print_expr(b)}"
        case Eff(l, b):
            return f"eff[{l}] {print_expr(b)}"
        case Let(x, e1, b):
            return f"let {x} = {print_expr(e1)} in {print_expr(b)}"
        case Case(zb, xv, sb, sc):
            return (
                f"case {_wrap(sc, head=True)} "
                f"{{ z => {print_expr(zb)} | s({xv}) => {print_expr(sb)} }}"
            )
        case App(f, a):
            return f"{_wrap(f, head=True)} {_wrap(a, head=False)}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Expr, head: bool) -> str:
    # prefix forms always need parentheses in application/scrutinee position;
    # an application argument additionally needs them to keep left associativity
    needs = isinstance(e, (Lam, Eff, Let)) or (not head and isinstance(e, App))
    s = print_expr(e)
    return f"({s})" if needs else s
