import warnings

import pytest

from irmia import (
    InputEnablednessWarning, MUST, Edge, Modality, build, impossible_states, input_enabledness,
    irioco, isomorphic, parallel_compose, parse, pseudo_quotient, quotient, quotient_pair_check,
    validate,
)
from irmia.quotient import QuotientPreconditionError


@pytest.fixture(autouse=True)
def quiet_enabledness():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InputEnablednessWarning)
        yield


def test_fig10_pair_is_a_quotient_pair(fig):
    assert quotient_pair_check(fig("fig10a_p"), fig("fig10b_d")) == []


def test_precondition_report_names_each_problem():
    p = build("P", ["i"], ["o"], [("must", "p0", "o", "p0")])
    nondet = build("D", [], ["o"], [("may", "d0", "o", "d0"), ("may", "d0", "o", "d1")])
    assert any("deterministic" in r for r in quotient_pair_check(p, nondet))
    foreign = build("D", ["z"], [], [("must", "d0", "z", "d0")])
    assert any("outside P" in r for r in quotient_pair_check(p, foreign))
    tau = build("D", [], ["o"], [("must", "d0", "tau", "d1"), ("must", "d1", "o", "d1")])
    assert any("tau" in r for r in quotient_pair_check(p, tau))
    with pytest.raises(QuotientPreconditionError):
        pseudo_quotient(p, nondet)
    result = quotient(p, nondet)
    assert not result.defined and result.precondition_report


def test_fig10_quotient(fig):
    p, d = fig("fig10a_p"), fig("fig10b_d")
    assert impossible_states(pseudo_quotient(p, d), p, d) == {}
    result = quotient(p, d)
    assert result.defined
    assert isomorphic(result.automaton, fig("fig10c_q"))
    assert validate(result.automaton) == []


def test_fig10_quotient_composes_back(fig):
    p, d = fig("fig10a_p"), fig("fig10b_d")
    back = parallel_compose(quotient(p, d).automaton, d)
    assert back.compatible
    assert isomorphic(back.automaton, p)


def test_pseudo_quotient_alphabet(fig):
    p, d = fig("fig10a_p"), fig("fig10b_d")
    pq = pseudo_quotient(p, d)
    assert pq.input_set == p.input_set | d.output_set
    assert pq.output_set == p.output_set - d.output_set
    assert pq.initial == f"({p.initial},{d.initial})"


def test_common_must_input_stays_mandatory():
    p = build("P", ["i"], [], [("must", "p0", "i", "p0")])
    d = build("D", ["i"], [], [("must", "d0", "i", "d0")])
    assert pseudo_quotient(p, d).enables("(p0,d0)", "i", MUST)


def test_output_of_divisor_becomes_input():
    p = build("P", [], ["a"], [("must", "p0", "a", "p1")])
    d = build("D", [], ["a"], [("may", "d0", "a", "d1")])
    pq = pseudo_quotient(p, d)
    assert "a" in pq.input_set
    assert pq.succ("(p0,d0)", "a", MUST) == ("(p1,d1)",)


def test_missing_divisor_action_is_impossible():
    p = build("P", ["i"], ["a", "b"], [("must", "p0", "b", "p1"), ("must", "p1", "a", "p2")])
    d = build("D", ["i"], ["a"], [("must", "d0", "i", "d0")])
    bad = impossible_states(pseudo_quotient(p, d), p, d)
    assert bad["(p1,d0)"] == "G1"
    assert bad["(p0,d0)"] == "G3"
    assert not quotient(p, d).defined


def test_fig6_quotient_keeps_the_dead_pair(fig):
    result = quotient(fig("fig6c_p"), fig("fig6a_d"))
    assert result.defined and result.impossible == {}
    assert len(result.automaton.states) == len(fig("fig1c_q").states) + 1


def test_fig7_needs_mandatory_outputs(fig):
    i, ci, s, cs = fig("fig7_i"), fig("fig7_ci"), fig("fig7_s"), fig("fig7_cs")
    qi, qs = quotient(i, ci), quotient(s, cs)
    assert isomorphic(qi.automaton, fig("fig7_i_quot_ci"))
    assert isomorphic(qs.automaton, fig("fig7_s_quot_cs"))
    assert irioco(qi.automaton, qs.automaton).holds
    assert irioco(ci, cs).holds
    assert irioco(i, s).summary() == "FAIL cond=2 trace= missing=!a"
    forced = i.replace(edges=tuple(Edge(e.source, e.label, e.target, Modality.MUST)
                                   for e in i.edges))
    assert irioco(forced, s).holds


def test_self_division_is_defined(fig):
    p = fig("fig10a_p")
    assert quotient(p, p).defined


CI = """irmia CI
inputs i0
outputs o0
states s0*
must s0 ?i0 s0
must s0 !o0 s0
"""

I = """irmia I
inputs i0
outputs o0, o1
states s0*, s1, s2
must s0 ?i0 s2
must s0 !o0 s1
must s1 ?i0 _PHI
must s1 !o0 s0
must s2 ?i0 _PHI
must s2 !o0 s0
"""

S = """irmia S
inputs i0
outputs o0, o1
states s0*, s1
may s0 ?i0 s1
may s0 !o0 s1
may s1 ?i0 s1
"""


def test_decompositionality_premises_do_not_force_the_conclusion():
    # o0 is a context output, so the quotient sees it as an unconstrained input
    i, s, c = parse(I), parse(S), parse(CI)
    qi, qs = quotient(i, c), quotient(s, c)
    assert qi.defined and qs.defined
    assert input_enabledness(i).weak_must and input_enabledness(c).weak_must
    assert all(e.must for e in i.edges if e.label in i.output_set)
    assert input_enabledness(qi.automaton).weak_may
    assert irioco(qi.automaton, qs.automaton).holds
    assert irioco(c, c).holds
    assert irioco(i, s).summary() == "FAIL cond=2 trace=i0 missing=delta"
    assert not parallel_compose(qs.automaton, c).compatible or \
        not isomorphic(parallel_compose(qs.automaton, c).automaton, s)
