"""Conventional big-step evaluation with fuel.

Fuel is spent exactly where the small-step engine would spend a step, so
big_step(e, n) converges exactly when multi_step(e, n) reaches a value,
with the same value and trace.  Premisses are evaluated left to right,
which is what sequences the effects.
"""

from dataclasses import dataclass

from .budget import Budget
from .syntax import App, Case, Eff, Expr, Lam, Let, Succ, Var, Zero, is_value, subst
from .traces import Trace


@dataclass(frozen=True)
class Value:
    value: Expr
    trace: Trace


@dataclass(frozen=True)
class FuelExhausted:
    pass


@dataclass(frozen=True)
class Stuck:
    at: Expr


BigStepOutcome = Value | FuelExhausted | Stuck


class _OutOfFuel(Exception):
    pass


class _StuckEval(Exception):
    def __init__(self, at: Expr):
        self.at = at


def big_step(e: Expr, fuel: int) -> BigStepOutcome:
    b = Budget(fuel)
    try:
        v, tr = _eval(e, b)
    except _OutOfFuel:
        return FuelExhausted()
    except _StuckEval as s:
        return Stuck(s.at)
    return Value(v, tr)


def _spend(b: Budget) -> None:
    if b.remaining == 0:
        raise _OutOfFuel()
    b.spend()


def _eval(e: Expr, b: Budget):
    if is_value(e):
        return e, ()
    match e:
        case Succ(body):
            v, tr = _eval(body, b)
            return Succ(v), tr
        case Case(zb, xv, sb, sc):
            v, a = _eval(sc, b)
            _spend(b)
            if isinstance(v, Zero):
                r, c = _eval(zb, b)
            elif isinstance(v, Succ):
                r, c = _eval(subst(sb, {xv: v.body}), b)
            else:
                raise _StuckEval(Case(zb, xv, sb, v))
            return r, a + c
        case App(fn, arg):
            f, a = _eval(fn, b)
            v, c = _eval(arg, b)
            _spend(b)
            if not isinstance(f, Lam):
                raise _StuckEval(App(f, v))
            r, d = _eval(subst(f.body, {f.self_var: f, f.param: v}), b)
            return r, a + c + d
        case Eff(l, body):
            _spend(b)
            v, tr = _eval(body, b)
            return v, (l,) + tr
        case Var() | Let():
            raise _StuckEval(e)
    raise _StuckEval(e)
