"""Imperative sibling language: arithmetic, the four engines, and freezing."""

import pytest

from bigstop import (
    Add,
    Assign,
    ImpDone,
    ImpFuelExhausted,
    ImpParseError,
    ImpStatus,
    Lit,
    Mul,
    Ref,
    SeqS,
    Skip,
    Sub,
    aeval,
    config,
    imp_bigstep,
    imp_bigstop,
    imp_bigstop_freeze,
    imp_multi_step,
    imp_small_step,
    make_state,
    parse_init,
    parse_stmt,
    print_config,
    print_state,
    print_stmt,
    state_get,
    state_set,
)


def countdown():
    return config(parse_stmt("while x do { x := x - 1 }"), parse_init("x=2"))


### stores

def test_states_are_canonically_sorted():
    st = make_state({"b": 1, "a": 2})
    assert st == (("a", 2), ("b", 1))
    assert print_state(st) == "{a=2, b=1}"


def test_unbound_variables_read_as_zero():
    assert state_get(make_state({}), "q") == 0
    assert aeval(make_state({}), Ref("q")) == 0


def test_updates_are_functional():
    st = make_state({"x": 3})
    st2 = state_set(st, "x", 9)
    assert state_get(st, "x") == 3
    assert state_get(st2, "x") == 9


### arithmetic

def test_aeval_mixes_operators_with_usual_precedence():
    st = make_state({"x": 3})
    got = parse_stmt("y := x * x + 1")
    assert got == Assign("y", Add(Mul(Ref("x"), Ref("x")), Lit(1)))
    assert aeval(st, got.expr) == 10


def test_subtraction_is_not_truncated():
    assert aeval(make_state({}), Sub(Lit(0), Lit(1))) == -1


### parsing and printing

ROUND_TRIPS = [
    "skip",
    "x := 0",
    "x := x - 1 ; y := y + x",
    "if x then { x := 0 ; y := y + 1 }",
    "while x do { x := x - 1 }",
    "while x do { if y then { y := 0 } ; x := x - 1 }",
]


@pytest.mark.parametrize("src", ROUND_TRIPS)
def test_print_parse_round_trip(src):
    assert print_stmt(parse_stmt(src)) == src


def test_sequencing_associates_left():
    assert parse_stmt("skip ; skip ; skip") == SeqS(SeqS(Skip(), Skip()), Skip())


def test_loop_bodies_require_braces():
    with pytest.raises(ImpParseError):
        parse_stmt("while x do skip")


def test_initial_store_syntax():
    assert parse_init("x=2,y=0") == (("x", 2), ("y", 0))
    assert parse_init("") == ()


### small step

def test_only_skip_is_terminal():
    assert imp_small_step(config(Skip(), ())) is None
    assert imp_small_step(config(parse_stmt("x := 1"), ())) is not None


def test_countdown_trajectory():
    # the canonical two-iteration loop, one counted step at a time
    want = [
        "x := x - 1 ; while x do { x := x - 1 } | {x=2}",
        "skip ; while x do { x := x - 1 } | {x=1}",
        "while x do { x := x - 1 } | {x=1}",
        "x := x - 1 ; while x do { x := x - 1 } | {x=1}",
        "skip ; while x do { x := x - 1 } | {x=0}",
        "while x do { x := x - 1 } | {x=0}",
        "skip | {x=0}",
    ]
    cur = countdown()
    got = []
    while (nxt := imp_small_step(cur)) is not None:
        cur = nxt
        got.append(print_config(cur))
    assert got == want


def test_multi_statuses_and_step_counts():
    c = countdown()
    r = imp_multi_step(c, 3)
    assert r.status is ImpStatus.OUT_OF_BUDGET
    assert r.steps == 3
    assert print_config(r.config) == "while x do { x := x - 1 } | {x=1}"
    r = imp_multi_step(c, 7)
    assert r.status is ImpStatus.REACHED_SKIP
    assert r.steps == 7
    r = imp_multi_step(c, 50)
    assert r.steps == 7


def test_branching_steps():
    taken = config(parse_stmt("if x then { y := 1 }"), parse_init("x=2,y=5"))
    r = imp_multi_step(taken, 10)
    assert r.steps == 2                     # pick the branch, then assign
    assert print_config(r.config) == "skip | {x=2, y=1}"
    skipped = config(parse_stmt("if x then { y := 1 }"), parse_init("x=0,y=5"))
    r = imp_multi_step(skipped, 10)
    assert r.steps == 1
    assert print_config(r.config) == "skip | {x=0, y=5}"


### fuelled big step

def test_bigstep_fuel_boundary_matches_the_step_count():
    c = countdown()
    assert imp_bigstep(c, 7) == ImpDone((("x", 0),))
    assert imp_bigstep(c, 6) == ImpFuelExhausted()


def test_bigstep_on_divergence():
    spin = config(parse_stmt("while x do { y := 0 }"), parse_init("x=1"))
    assert imp_bigstep(spin, 1000) == ImpFuelExhausted()


### budgeted big step mirrors the step relation

def test_bigstop_is_the_multi_prefix_everywhere():
    c = countdown()
    for budget in range(10):
        assert imp_bigstop(c, budget) == imp_multi_step(c, budget).config


def test_bigstop_goldens():
    c = countdown()
    assert print_config(imp_bigstop(c, 3)) == "while x do { x := x - 1 } | {x=1}"
    assert print_config(imp_bigstop(c, 9)) == "skip | {x=0}"


### freezing

def test_freeze_reports_whether_the_run_was_cut():
    c = countdown()
    f = imp_bigstop_freeze(c, 3)
    assert f.frozen
    assert print_state(f.state) == "{x=1}"
    f = imp_bigstop_freeze(c, 7)
    assert not f.frozen
    assert print_state(f.state) == "{x=0}"


def test_frozen_stores_never_see_later_writes():
    c = config(parse_stmt("x := 1 ; y := 2"), parse_init(""))
    expect = [("{}", True), ("{x=1}", True), ("{x=1}", True), ("{x=1, y=2}", False)]
    for budget, (state, frozen) in enumerate(expect):
        f = imp_bigstop_freeze(c, budget)
        assert (print_state(f.state), f.frozen) == (state, frozen)


def test_freeze_state_always_matches_multi():
    c = config(
        parse_stmt("while x do { y := y + x ; x := x - 1 }"),
        parse_init("x=3,y=0"),
    )
    for budget in range(20):
        f = imp_bigstop_freeze(c, budget)
        m = imp_multi_step(c, budget)
        assert f.state == m.config.state
        assert f.frozen == (m.status is ImpStatus.OUT_OF_BUDGET)
