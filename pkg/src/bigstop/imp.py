"""A small imperative while-language over integer stores.

Arithmetic is total (unbound variables read as 0) so a configuration can
only ever finish or keep going - there is no stuck state.  The budgeted
engine stops mid-statement and returns exactly the configuration the
small-step engine would be sitting at; the freeze variant instead commits
to the store it had when the budget died and ignores the rest of the
program, reporting that it froze.
"""

import enum
from dataclasses import dataclass

from .budget import Budget

### syntax


class AExpr:
    pass


@dataclass(frozen=True)
class Lit(AExpr):
    value: int


@dataclass(frozen=True)
class Ref(AExpr):
    name: str


@dataclass(frozen=True)
class Add(AExpr):
    left: AExpr
    right: AExpr


@dataclass(frozen=True)
class Sub(AExpr):
    left: AExpr
    right: AExpr


@dataclass(frozen=True)
class Mul(AExpr):
    left: AExpr
    right: AExpr


class Stmt:
    pass


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    name: str
    expr: AExpr


@dataclass(frozen=True)
class SeqS(Stmt):
    first: Stmt
    second: Stmt


@dataclass(frozen=True)
class If(Stmt):
    guard: AExpr
    body: Stmt


@dataclass(frozen=True)
class While(Stmt):
    guard: AExpr
    body: Stmt


State = dict  # variable name -> int


@dataclass(frozen=True)
class ImpConfig:
    stmt: Stmt
    state: tuple  # sorted (name, value) pairs


def make_state(bindings=()) -> tuple:
    if isinstance(bindings, dict):
        bindings = bindings.items()
    return tuple(sorted(dict(bindings).items()))


def state_get(state: tuple, name: str) -> int:
    for n, v in state:
        if n == name:
            return v
    return 0


def state_set(state: tuple, name: str, value: int) -> tuple:
    d = dict(state)
    d[name] = value
    return tuple(sorted(d.items()))


def config(stmt: Stmt, bindings=()) -> ImpConfig:
    return ImpConfig(stmt, make_state(bindings))


def aeval(state: tuple, a: AExpr) -> int:
    match a:
        case Lit(v):
            return v
        case Ref(x):
            return state_get(state, x)
        case Add(l, r):
            return aeval(state, l) + aeval(state, r)
        case Sub(l, r):
            return aeval(state, l) - aeval(state, r)
        case Mul(l, r):
            return aeval(state, l) * aeval(state, r)
    raise TypeError(f"not an arithmetic expression: {a!r}")


### small-step


def imp_small_step(cfg: ImpConfig):
    """One step, or None when the statement is skip."""
    s, st = cfg.stmt, cfg.state
    match s:
        case Skip():
            return None
        case Assign(x, a):
            return ImpConfig(Skip(), state_set(st, x, aeval(st, a)))
        case SeqS(s1, s2):
            if isinstance(s1, Skip):
                return ImpConfig(s2, st)
            sub = imp_small_step(ImpConfig(s1, st))
            return ImpConfig(SeqS(sub.stmt, s2), sub.state)
        case If(a, body):
            return ImpConfig(body if aeval(st, a) != 0 else Skip(), st)
        case While(a, body):
            if aeval(st, a) != 0:
                return ImpConfig(SeqS(body, s), st)
            return ImpConfig(Skip(), st)
    raise TypeError(f"not a statement: {s!r}")


class ImpStatus(enum.Enum):
    REACHED_SKIP = "ReachedSkip"
    OUT_OF_BUDGET = "OutOfBudget"


@dataclass(frozen=True)
class ImpMultiResult:
    config: ImpConfig
    steps: int
    status: ImpStatus


def imp_multi_step(cfg: ImpConfig, budget: int) -> ImpMultiResult:
    steps = 0
    while True:
        if isinstance(cfg.stmt, Skip):
            return ImpMultiResult(cfg, steps, ImpStatus.REACHED_SKIP)
        if steps == budget:
            return ImpMultiResult(cfg, steps, ImpStatus.OUT_OF_BUDGET)
        cfg = imp_small_step(cfg)
        steps += 1


### big-step with fuel


@dataclass(frozen=True)
class ImpDone:
    state: tuple


@dataclass(frozen=True)
class ImpFuelExhausted:
    pass


class _OutOfFuel(Exception):
    pass


def imp_bigstep(cfg: ImpConfig, fuel: int):
    b = Budget(fuel)
    try:
        return ImpDone(_beval(cfg.stmt, cfg.state, b))
    except _OutOfFuel:
        return ImpFuelExhausted()


def _spend(b: Budget) -> None:
    if b.remaining == 0:
        raise _OutOfFuel()
    b.spend()


def _beval(s: Stmt, st: tuple, b: Budget) -> tuple:
    match s:
        case Skip():
            return st
        case Assign(x, a):
            _spend(b)
            return state_set(st, x, aeval(st, a))
        case SeqS(s1, s2):
            st1 = _beval(s1, st, b)
            _spend(b)  # the skip ; s2 -> s2 step
            return _beval(s2, st1, b)
        case If(a, body):
            _spend(b)
            return _beval(body, st, b) if aeval(st, a) != 0 else st
        case While(a, body):
            _spend(b)  # unrolling or finishing the loop
            if aeval(st, a) == 0:
                return st
            st1 = _beval(body, st, b)
            _spend(b)  # the skip ; while step after the unrolled body
            return _beval(s, st1, b)
    raise TypeError(f"not a statement: {s!r}")


### big-stop


def imp_bigstop(cfg: ImpConfig, budget: int) -> ImpConfig:
    """The configuration after at most `budget` counted steps; matches
    imp_multi_step(cfg, budget) exactly."""
    b = Budget(budget)
    return ImpConfig(*_bstop(cfg.stmt, cfg.state, b))


def _bstop(s: Stmt, st: tuple, b: Budget):
    if isinstance(s, Skip):
        return s, st
    if b.remaining == 0:
        return s, st
    match s:
        case Assign(x, a):
            b.spend()
            return Skip(), state_set(st, x, aeval(st, a))
        case SeqS(s1, s2):
            s1p, st1 = _bstop(s1, st, b)
            if not isinstance(s1p, Skip) or b.remaining == 0:
                return SeqS(s1p, s2), st1
            b.spend()
            return _bstop(s2, st1, b)
        case If(a, body):
            b.spend()
            if aeval(st, a) != 0:
                return _bstop(body, st, b)
            return Skip(), st
        case While(a, body):
            b.spend()
            if aeval(st, a) == 0:
                return Skip(), st
            # one unrolling: now behaves exactly like body ; while
            s1p, st1 = _bstop(body, st, b)
            if not isinstance(s1p, Skip) or b.remaining == 0:
                return SeqS(s1p, s), st1
            b.spend()
            return _bstop(s, st1, b)
    raise TypeError(f"not a statement: {s!r}")


### freeze variant


@dataclass(frozen=True)
class FreezeResult:
    state: tuple
    frozen: bool


def imp_bigstop_freeze(cfg: ImpConfig, budget: int) -> FreezeResult:
    """Run with a budget; when it dies, freeze the store and skip the rest.

    The bindings always equal the store of imp_multi_step at the same
    budget - a frozen store absorbs every later assignment, so skipping
    the remainder of the program changes nothing.
    """
    b = Budget(budget)
    st, frozen = _fstop(cfg.stmt, cfg.state, b)
    return FreezeResult(st, frozen)


def _fstop(s: Stmt, st: tuple, b: Budget):
    if isinstance(s, Skip):
        return st, False
    if b.remaining == 0:
        return st, True
    match s:
        case Assign(x, a):
            b.spend()
            return state_set(st, x, aeval(st, a)), False
        case SeqS(s1, s2):
            st1, frozen = _fstop(s1, st, b)
            if frozen or b.remaining == 0:
                return st1, True
            b.spend()
            return _fstop(s2, st1, b)
        case If(a, body):
            b.spend()
            if aeval(st, a) != 0:
                return _fstop(body, st, b)
            return st, False
        case While(a, body):
            b.spend()
            if aeval(st, a) == 0:
                return st, False
            st1, frozen = _fstop(body, st, b)
            if frozen or b.remaining == 0:
                return st1, True
            b.spend()
            return _fstop(s, st1, b)
    raise TypeError(f"not a statement: {s!r}")


### concrete syntax


class ImpParseError(Exception):
    pass


def _imp_tokens(src: str):
    import re

    toks = []
    spec = r"(:=|[();{}+\-*]|\d+|[A-Za-z_][A-Za-z0-9_]*|\S)"
    line = 1
    for raw in src.split("\n"):
        body = raw.split("--", 1)[0]
        for m in re.finditer(spec, body):
            toks.append((m.group(0), line, m.start() + 1))
        line += 1
    return toks


class _ImpParser:
    def __init__(self, src: str):
        self.toks = _imp_tokens(src)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ImpParseError("unexpected end of input")
        self.pos += 1
        return t

    def expect(self, text):
        t = self.next()
        if t != text:
            raise ImpParseError(f"expected {text!r}, found {t!r}")

    def stmt(self) -> Stmt:
        s = self.simple()
        while self.peek() == ";":
            self.next()
            s = SeqS(s, self.simple())
        return s

    def simple(self) -> Stmt:
        t = self.peek()
        if t == "skip":
            self.next()
            return Skip()
        if t == "if":
            self.next()
            guard = self.aexpr()
            self.expect("then")
            self.expect("{")
            body = self.stmt()
            self.expect("}")
            return If(guard, body)
        if t == "while":
            self.next()
            guard = self.aexpr()
            self.expect("do")
            self.expect("{")
            body = self.stmt()
            self.expect("}")
            return While(guard, body)
        if t is not None and (t[0].isalpha() or t[0] == "_"):
            name = self.next()
            self.expect(":=")
            return Assign(name, self.aexpr())
        raise ImpParseError(f"expected a statement, found {t!r}")

    def aexpr(self) -> AExpr:
        e = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> AExpr:
        e = self.factor()
        while self.peek() == "*":
            self.next()
            e = Mul(e, self.factor())
        return e

    def factor(self) -> AExpr:
        t = self.peek()
        if t == "(":
            self.next()
            e = self.aexpr()
            self.expect(")")
            return e
        if t is not None and t.isdigit():
            return Lit(int(self.next()))
        if t is not None and (t[0].isalpha() or t[0] == "_"):
            if t in ("then", "do"):
                raise ImpParseError(f"expected an expression, found {t!r}")
            return Ref(self.next())
        raise ImpParseError(f"expected an expression, found {t!r}")


def parse_stmt(src: str) -> Stmt:
    p = _ImpParser(src)
    s = p.stmt()
    if p.peek() is not None:
        raise ImpParseError(f"trailing input starting at {p.peek()!r}")
    return s


def parse_init(text: str) -> tuple:
    """Parse an initial store given as x=2,y=0."""
    bindings = {}
    text = text.strip()
    if text:
        for part in text.split(","):
            if "=" not in part:
                raise ImpParseError(f"bad binding {part!r}, want name=value")
            name, value = part.split("=", 1)
            bindings[name.strip()] = int(value.strip())
    return make_state(bindings)


def print_aexpr(a: AExpr) -> str:
    match a:
        case Lit(v):
            return str(v)
        case Ref(x):
            return x
        case Add(l, r):
            return f"{print_aexpr(l)} + {_fac(r)}"
        case Sub(l, r):
            return f"{print_aexpr(l)} - {_fac(r)}"
        case Mul(l, r):
            return f"{_fac(l)} * {_fac(r, in_mul=True)}"
    raise TypeError(f"not an arithmetic expression: {a!r}")


def _fac(a: AExpr, in_mul: bool = False) -> str:
    # both operators parse left-associative, so right operands at the same
    # precedence level keep their brackets; +/- always bracket under *
    s = print_aexpr(a)
    needs = (Add, Sub, Mul) if in_mul else (Add, Sub)
    return f"({s})" if isinstance(a, needs) else s


def print_stmt(s: Stmt) -> str:
    match s:
        case Skip():
            return "skip"
        case Assign(x, a):
            return f"{x} := {print_aexpr(a)}"
        case SeqS(s1, s2):
            return f"{print_stmt(s1)} ; {print_stmt(s2)}"
        case If(a, body):
            return f"if {print_aexpr(a)} then {{ {print_stmt(body)} }}"
        case While(a, body):
            return f"while {print_aexpr(a)} do {{ {print_stmt(body)} }}"
    raise TypeError(f"not a statement: {s!r}")


def print_state(state: tuple) -> str:
    inner = ", ".join(f"{n}={v}" for n, v in state)
    return "{" + inner + "}"


def print_config(cfg: ImpConfig) -> str:
    return f"{print_stmt(cfg.stmt)} | {print_state(cfg.state)}"
