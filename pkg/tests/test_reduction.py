"""Reduction driver: fast iteration, scripted paths, operator semantics."""

from fractions import Fraction as F

import pytest

from qualred.engine import Operator, full_pairing, restrict
from qualred.intervals import IntervalSet
from qualred.reduction import (
    InvalidRemoval,
    PathScriptError,
    TraceStatus,
    is_maximal,
    parse_path_script,
    run_path,
    star_reduce,
)

from conftest import fixture_text

I = IntervalSet.interval
P = IntervalSet.point


def script(name: str, game):
    return parse_path_script(fixture_text(name), game)


def test_fast_reduce_fx1_two_stages(load_game):
    g = load_game("fx1.qg")
    t = star_reduce(g, Operator.DOUBLE)
    assert t.status is TraceStatus.CONVERGED
    assert len(t.stages) == 2
    assert t.final == (P(1), P(1))
    assert t.eliminated[0] == (I(0, 1, True, False), I(0, 1, True, False))
    # simultaneous removal: each survivor ruled out by the surviving 1
    assert t.fast_condition_audit == (True,)


def test_fast_reduce_all_operators_agree_on_fx1(load_game):
    g = load_game("fx1.qg")
    finals = {op: star_reduce(g, op).final for op in Operator}
    assert set(finals.values()) == {(P(1), P(1))}


def test_fast_reduce_finite(load_game):
    g = load_game("fxf1.qg")
    t = star_reduce(g, Operator.DOUBLE)
    assert t.status is TraceStatus.CONVERGED
    assert t.final == (frozenset({"a"}), frozenset({"c"}))
    assert t.kind == "fast"


def test_max_iters_caps(load_game):
    g = load_game("fx5-derived.qg")
    t = star_reduce(g, Operator.DOUBLE, max_iters=1)
    # the fast double step leaves {1}x{1} immediately here, so force arrow
    assert t.status in (TraceStatus.CONVERGED, TraceStatus.CAPPED)
    assert len(t.stages) <= 2


def test_scripted_paths_reach_distinct_limits(load_game):
    g = load_game("fx5-derived.qg")
    finals = set()
    for name in (
        "restrict-to-1-and-quarter.path",
        "restrict-to-1-and-half.path",
        "restrict-to-1-and-nine-tenths.path",
    ):
        t = run_path(g, Operator.DOUBLE, script(name, g))
        assert t.status is TraceStatus.CONVERGED
        assert t.path_valid == (True,)
        assert is_maximal(g, t.final, Operator.DOUBLE)
        finals.add(t.final)
    assert len(finals) == 3
    fast = star_reduce(g, Operator.DOUBLE).final
    assert fast == (P(1), P(1))
    assert fast not in finals


def test_path_operator_semantics_differ(load_game):
    g = load_game("fx5-derived.qg")
    # removing [0,1/2) for player 1 only: dominators of x < 1/2 must
    # survive the step for tail, but only pre-step presence matters for arrow
    steps = [{0: I(0, F(1, 2), True, False)}]
    for op in (Operator.ARROW, Operator.TAIL, Operator.DOUBLE):
        t = run_path(g, op, steps)
        assert t.path_valid == (True,), op


def test_invalid_removal_raises_with_witness(load_game):
    g = load_game("fx1.qg")
    steps = [{0: P(1)}]  # 1 is never dominated
    with pytest.raises(InvalidRemoval) as info:
        run_path(g, Operator.DOUBLE, steps)
    assert info.value.player == 1
    assert info.value.witness == F(1)


def test_validate_off_records_invalid_steps(load_game):
    g = load_game("fx1.qg")
    t = run_path(g, Operator.DOUBLE, script("singletons.path", g), validate=False)
    assert t.path_valid == (False,)
    assert t.final == (P(F(1, 2)), P(F(1, 2)))
    assert t.status is TraceStatus.CONVERGED  # nothing eliminable remains


def test_removal_outside_current_set_always_rejected(load_game):
    g = load_game("fx1.qg")
    steps = [{0: I(2, 3)}]
    with pytest.raises(InvalidRemoval):
        run_path(g, Operator.DOUBLE, steps, validate=False)


def test_vacuous_when_everything_removed(load_game):
    g = load_game("fxf1.qg")
    steps = [{0: frozenset({"a", "b"})}]
    t = run_path(g, Operator.DOUBLE, steps, validate=False)
    assert t.status is TraceStatus.VACUOUS


def test_path_script_parse_errors(load_game):
    g = load_game("fx1.qg")
    with pytest.raises(PathScriptError) as info:
        parse_path_script("step: player=1 remove=[0,oops)\n", g)
    assert info.value.line == 1
    with pytest.raises(PathScriptError):
        parse_path_script("step: player=9 remove=[0,1/2)\n", g)
    with pytest.raises(PathScriptError):
        parse_path_script("wat\n", g)
    gf = load_game("fxf1.qg")
    with pytest.raises(PathScriptError):
        # finite removals need label-set syntax
        parse_path_script("step: player=1 remove=[0,1/2)\n", gf)
    steps = parse_path_script("# comment\n\nstep: player=1 remove={a}\n", gf)
    assert steps == [{0: frozenset({"a"})}]


def test_audit_flags_mutually_supporting_removals(load_game):
    g = load_game("fxf1.qg")
    gm = restrict(g, full_pairing(g))  # identity restrict keeps tables
    t = star_reduce(gm, Operator.DOUBLE)
    assert all(t.fast_condition_audit)


def test_grid_traces(load_game):
    g = load_game("fx1-grid-half.qg")
    t = star_reduce(g, Operator.DOUBLE)
    assert t.final == (frozenset({"1"}), frozenset({"1"}))
    g5 = load_game("fx5-derived-grid-half.qg")
    t5 = star_reduce(g5, Operator.DOUBLE)
    assert t5.final == (frozenset({"1/2", "1"}), frozenset({"1/2", "1"}))
    assert is_maximal(g5, t5.final, Operator.DOUBLE)
