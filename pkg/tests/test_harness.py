"""Term enumeration, random generation, shrinking, and the property suites."""

import dataclasses
import random

import pytest

from bigstop import (
    App,
    ArrowT,
    Eff,
    GenConfig,
    GenerationExhausted,
    ImpConfig,
    Lam,
    NatT,
    Var,
    While,
    Zero,
    corpus,
    corpus_term,
    enumerate_exprs,
    enumerate_stmts,
    expr_size,
    gen_typed_expr,
    parse_expr,
    parse_stmt,
    print_expr,
    print_stmt,
    run_property_suite,
    suite_names,
    well_typed,
)
from bigstop.harness import gen_imp_config, gen_stmt, shrink_expr, shrink_stmt


def walk(x):
    yield x
    for f in dataclasses.fields(x):
        v = getattr(x, f.name)
        if dataclasses.is_dataclass(v):
            yield from walk(v)


### enumeration

def test_size_one_is_just_zero():
    assert list(enumerate_exprs(1)) == [Zero()]


def test_enumeration_count_is_stable():
    # regression pin: the well-typed fragment up to four nodes
    assert len(list(enumerate_exprs(4))) == 117


def test_everything_enumerated_is_well_typed_and_small():
    for e in enumerate_exprs(4):
        assert well_typed(e)
        assert expr_size(e) <= 4


def test_enumeration_is_duplicate_free():
    seen = list(enumerate_exprs(5))
    assert len(seen) == len(set(seen))


def test_known_members():
    assert parse_expr("s(s(z))") in set(enumerate_exprs(3))
    # an application of the identity needs four nodes
    ident_app = App(Lam("a", "b", Var("b")), Zero())
    assert ident_app not in set(enumerate_exprs(3))
    assert ident_app in set(enumerate_exprs(4))


def test_enumeration_has_a_hard_ceiling():
    with pytest.raises(ValueError):
        list(enumerate_exprs(9))


def test_statement_enumeration_reaches_loops():
    stmts = list(enumerate_stmts(4))
    assert any(isinstance(s, While) for s in stmts)
    assert len(stmts) == len(set(stmts))


### random generation

def test_generation_is_deterministic_in_the_seed():
    assert gen_typed_expr(GenConfig(seed=7)) == gen_typed_expr(GenConfig(seed=7))
    assert gen_typed_expr(GenConfig(seed=7)) != gen_typed_expr(GenConfig(seed=8))


def test_generated_terms_are_well_typed():
    for seed in range(40):
        assert well_typed(gen_typed_expr(GenConfig(seed=seed)))


def test_target_type_is_respected():
    e = gen_typed_expr(GenConfig(seed=0, max_size=1, target_type=NatT()))
    assert e == Zero()


def test_no_labels_means_no_effects():
    for seed in range(20):
        e = gen_typed_expr(GenConfig(seed=seed, effect_labels=()))
        assert not any(isinstance(n, Eff) for n in walk(e))


def test_impossible_requests_raise():
    with pytest.raises(GenerationExhausted):
        gen_typed_expr(
            GenConfig(seed=0, max_size=1, target_type=ArrowT(NatT(), NatT()))
        )


def test_config_validates_its_size():
    with pytest.raises(ValueError):
        GenConfig(max_size=0)


def test_statement_generator_produces_runnable_configs():
    rng = random.Random(5)
    for _ in range(20):
        c = gen_imp_config(rng)
        assert isinstance(c, ImpConfig)
        # printable and re-parseable
        assert parse_stmt(print_stmt(c.stmt)) == c.stmt
    assert print_stmt(gen_stmt(random.Random(5), 6))  # non-empty rendering


### the reference programs

def test_corpus_names():
    assert [n for n, _ in corpus()] == [
        "leroy-grall",
        "filinski",
        "omega",
        "alloc-unbounded",
        "alloc-bounded",
        "imp-countdown",
        "imp-loop",
    ]


def test_corpus_terms_are_closed_or_configs():
    for name, entry in corpus():
        if isinstance(entry, ImpConfig):
            assert name.startswith("imp-")
        else:
            assert well_typed(entry)


def test_corpus_lookup_by_name():
    assert print_expr(corpus_term("omega")) == "(fun f(x) => f x) z"
    with pytest.raises(KeyError):
        corpus_term("nope")


### shrinking

def test_shrinking_replaces_irrelevant_subterms():
    e = parse_expr("s(s(eff[a] (fun f(x) => x) z))")
    fails = lambda t: any(isinstance(n, Eff) for n in walk(t))  # noqa: E731
    small = shrink_expr(e, fails)
    assert small == parse_expr("s(s(eff[a] z))")
    assert fails(small)


def test_shrinking_never_returns_a_passing_term():
    e = parse_expr("case s(z) { z => z | s(n) => eff[boom] n }")
    fails = lambda t: any(isinstance(n, Eff) for n in walk(t))  # noqa: E731
    assert fails(shrink_expr(e, fails))


def test_statement_shrinking_keeps_the_fault():
    s = parse_stmt("x := 1 ; while y do { y := y - 1 } ; z := 2")
    fails = lambda st: any(isinstance(n, While) for n in walk(st))  # noqa: E731
    small = shrink_stmt(s, fails)
    assert print_stmt(small) == "skip ; while y do { skip } ; skip"


### property suites

def test_suite_names_are_stable():
    assert suite_names() == (
        "annihilator",
        "derivation-integrity",
        "ec",
        "imp-freeze",
        "imp-stop-multi",
        "kmachine-convergent",
        "kmachine-divergent",
        "mnf",
        "progress-preservation",
        "stop-multi",
        "stop-step-big",
    )


def test_unknown_suites_are_rejected_by_name():
    with pytest.raises(KeyError):
        run_property_suite("nope")


def test_enumeration_suite_scales_with_the_config():
    rep = run_property_suite("stop-multi", cfg=GenConfig(max_size=4), max_budget=3)
    assert rep.trials == 117 * 4
    assert rep.ok
    assert rep.failures == ()


def test_generation_suite_scales_with_trials():
    rep = run_property_suite("stop-step-big", trials=40)
    assert rep.trials == 40
    assert rep.ok


def test_imp_suites_run_small():
    rep = run_property_suite("imp-freeze", cfg=GenConfig(max_size=3), trials=30, max_budget=3)
    assert rep.ok


def test_report_renders_both_ways():
    rep = run_property_suite("stop-multi", cfg=GenConfig(max_size=3), max_budget=2)
    text = rep.to_text()
    assert "property: stop-multi" in text
    assert "result:   PASS" in text
    obj = rep.to_json()
    assert sorted(obj.keys()) == ["failures", "property", "seed", "trials"]
    assert obj["failures"] == []
