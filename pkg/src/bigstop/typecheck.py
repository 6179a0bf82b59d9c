"""Simple types (nat and arrows) with inference by unification.

Inference produces a principal type containing metavariables; the public
infer_type defaults every unconstrained metavariable to nat, so e.g. the
identity function comes out at nat -> nat.  Preservation-style checks want
the pre-defaulting types (stepping can make a term more general), which is
what principal_type/types_unifiable expose.
"""

import itertools
from dataclasses import dataclass

from .syntax import (
    App, BLANK, Case, Eff, Expr, Lam, Let, Succ, Var, Zero,
)


class Type:
    pass


@dataclass(frozen=True)
class NatT(Type):
    def __repr__(self):
        return "NatT()"


@dataclass(frozen=True)
class ArrowT(Type):
    domain: Type
    codomain: Type


@dataclass(frozen=True)
class MetaT(Type):
    ident: int


_fresh_meta = itertools.count()


class TypeFailure(Exception):
    """Type inference failed; .at is the offending subterm."""

    def __init__(self, msg: str, at: Expr):
        super().__init__(msg)
        self.at = at


def print_type(t: Type) -> str:
    match t:
        case NatT():
            return "nat"
        case ArrowT(d, c):
            left = print_type(d)
            if isinstance(d, ArrowT):
                left = f"({left})"
            return f"{left} -> {print_type(c)}"
        case MetaT(i):
            return f"?{i}"
    raise TypeError(f"not a type: {t!r}")


def _resolve(t: Type, sub: dict) -> Type:
    while isinstance(t, MetaT) and t.ident in sub:
        t = sub[t.ident]
    return t


def _occurs(i: int, t: Type, sub: dict) -> bool:
    t = _resolve(t, sub)
    match t:
        case MetaT(j):
            return i == j
        case ArrowT(d, c):
            return _occurs(i, d, sub) or _occurs(i, c, sub)
        case _:
            return False


def _unify(a: Type, b: Type, sub: dict) -> bool:
    a, b = _resolve(a, sub), _resolve(b, sub)
    if a == b:
        return True
    if isinstance(a, MetaT):
        if _occurs(a.ident, b, sub):
            return False
        sub[a.ident] = b
        return True
    if isinstance(b, MetaT):
        return _unify(b, a, sub)
    if isinstance(a, ArrowT) and isinstance(b, ArrowT):
        return _unify(a.domain, b.domain, sub) and _unify(a.codomain, b.codomain, sub)
    return False


def _zonk(t: Type, sub: dict) -> Type:
    t = _resolve(t, sub)
    if isinstance(t, ArrowT):
        return ArrowT(_zonk(t.domain, sub), _zonk(t.codomain, sub))
    return t


def _default(t: Type) -> Type:
    match t:
        case MetaT():
            return NatT()
        case ArrowT(d, c):
            return ArrowT(_default(d), _default(c))
        case _:
            return t


def _infer(e: Expr, env: tuple, sub: dict) -> Type:
    match e:
        case Var(x):
            for name, t in reversed(env):
                if name == x:
                    return t
            raise TypeFailure(f"unbound variable {x}", e)
        case Zero():
            return NatT()
        case Succ(b):
            t = _infer(b, env, sub)
            if not _unify(t, NatT(), sub):
                raise TypeFailure("successor of a non-number", e)
            return NatT()
        case Lam(f, x, b):
            dom: Type = MetaT(next(_fresh_meta))
            cod: Type = MetaT(next(_fresh_meta))
            inner = env
            if f != BLANK:
                inner = inner + ((f, ArrowT(dom, cod)),)
            if x != BLANK:
                inner = inner + ((x, dom),)
            t = _infer(b, inner, sub)
            if not _unify(t, cod, sub):
                raise TypeFailure("function body disagrees with its own uses", e)
            return ArrowT(dom, cod)
        case App(fn, arg):
            tf = _infer(fn, env, sub)
            ta = _infer(arg, env, sub)
            res: Type = MetaT(next(_fresh_meta))
            if not _unify(tf, ArrowT(ta, res), sub):
                raise TypeFailure("applying a non-function or wrong argument type", e)
            return res
        case Case(zb, xv, sb, sc):
            if not _unify(_infer(sc, env, sub), NatT(), sub):
                raise TypeFailure("case scrutinee is not a number", e)
            t1 = _infer(zb, env, sub)
            inner = env if xv == BLANK else env + ((xv, NatT()),)
            t2 = _infer(sb, inner, sub)
            if not _unify(t1, t2, sub):
                raise TypeFailure("case branches have different types", e)
            return t1
        case Eff(_, b):
            return _infer(b, env, sub)
        case Let(x, e1, b):
            t1 = _infer(e1, env, sub)
            inner = env if x == BLANK else env + ((x, t1),)
            return _infer(b, inner, sub)
    raise TypeFailure(f"not an expression: {e!r}", e)


def _as_env(env) -> tuple:
    if isinstance(env, dict):
        return tuple(env.items())
    return tuple(env)


def principal_type(e: Expr, env=()) -> Type:
    """Most general type, metavariables left in place."""
    sub: dict = {}
    t = _infer(e, _as_env(env), sub)
    return _zonk(t, sub)


def infer_type(e: Expr, env=()) -> Type:
    """Infer the type of e, defaulting leftover metavariables to nat."""
    return _default(principal_type(e, env))


def types_unifiable(a: Type, b: Type) -> bool:
    return _unify(a, b, {})


def well_typed(e: Expr, env=()) -> bool:
    try:
        infer_type(e, env)
        return True
    except TypeFailure:
        return False
