import warnings

import pytest

from irmia import (
    AlphabetMismatch, InputEnablednessWarning, build, demonic_completion, input_enabledness,
    ioco_may, irioco, refines, suspension_automaton,
)
from irmia.conformance import NotInputEnabled, build_unifying_spec
from irmia.oracle import GeneratorConfig, random_irmia, random_refinement
from irmia.semantics import after_set, out_set_raw
from irmia.model import MAY, MUST


@pytest.fixture(autouse=True)
def quiet_enabledness():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InputEnablednessWarning)
        yield


def test_fig1b_misses_the_mandatory_output(fig):
    verdict = irioco(fig("fig1b_q1"), fig("fig1c_q"))
    assert verdict.summary() == "FAIL cond=2 trace=a·c·d·e missing=!e"
    assert verdict.counterexample == ("a", "c", "d", "e")
    assert verdict.offending_observation == "e"


def test_fig1a_conforms(fig):
    assert irioco(fig("fig1a_q2"), fig("fig1c_q")).holds


def test_fig2_refusal_specification(fig):
    assert irioco(fig("fig2a_i"), fig("fig2c_sphi")).holds


def test_fig3_conformance_side(fig):
    assert irioco(fig("fig3_i1"), fig("fig3_s1")).holds
    verdict = irioco(fig("fig3_i2"), fig("fig3_s2"))
    assert verdict.summary() == "FAIL cond=1 trace=o·i excess=!o'"


def test_fig4_ioco_holds_but_modal_conformance_fails(fig):
    i, s = fig("fig4a_i"), fig("fig4b_s")
    assert ioco_may(i, s).holds
    verdict = irioco(i, s)
    assert (verdict.violated_condition, verdict.counterexample, verdict.offending_observation) \
        == (2, (), "b")


def test_fig8_case_study(fig):
    assert irioco(fig("fig8b_i"), fig("fig8c_s")).holds


def test_ioco_may_on_fig1b_is_decided_literally(fig):
    # the may-tau in Q1 makes q6 may-quiescent while the spec's q4 is not
    verdict = ioco_may(fig("fig1b_q1"), fig("fig1c_q"))
    assert verdict.summary() == "FAIL cond=1 trace=a·c·d·e excess=delta"


def test_reflexive_on_figures(fig):
    for name in ("fig1a_q2", "fig2a_i", "fig8b_i", "fig4a_i"):
        a = fig(name)
        assert irioco(a, a).holds and ioco_may(a, a).holds


def test_counterexample_replays(fig):
    for impl, spec in (("fig1b_q1", "fig1c_q"), ("fig3_i2", "fig3_s2"), ("fig4a_i", "fig4b_s")):
        i, s = fig(impl), fig(spec)
        v = irioco(i, s)
        ai = after_set(i, [i.initial], v.counterexample)
        as_ = after_set(s, [s.initial], v.counterexample)
        if v.violated_condition == 1:
            assert v.offending_observation in out_set_raw(i, ai, MAY) - out_set_raw(s, as_, MAY)
        else:
            assert v.offending_observation in out_set_raw(s, as_, MUST) - out_set_raw(i, ai, MUST)


def test_enabledness_policy(fig):
    i, s = fig("fig1b_q1"), fig("fig1c_q")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        verdict = irioco(i, s)
        irioco(i, s, assume_enabled=True)
    assert [type(w.message) for w in caught] == [InputEnablednessWarning]
    assert not verdict.impl_input_enabled
    with pytest.raises(NotInputEnabled):
        irioco(i, s, strict=True)


def test_alphabets_must_match(fig):
    with pytest.raises(AlphabetMismatch):
        irioco(fig("fig1c_q"), fig("fig9a_p"))


def test_suspension_automaton_of_fig4a(fig):
    sa = suspension_automaton(fig("fig4a_i"))
    assert [sorted(m) for m in sa.macros] == [["q0"], ["q1"], ["q2"]]
    assert sorted(sym for m, sym in sa.edges if m == sa.initial) == ["a", "b"]


def test_suspension_automaton_small_cases():
    lone = build("A", ["i"], ["o"], [], initial="q0")
    sa = suspension_automaton(lone)
    assert sa.macros == (frozenset({"q0"}),)
    assert sa.successor(sa.initial, "delta") == sa.initial
    refusing = build("R", ["i"], [], [("must", "q0", "i", "_PHI")])
    sa = suspension_automaton(refusing)
    phi_macro = sa.successor(sa.initial, "i")
    assert phi_macro == frozenset({"_PHI"})
    assert sa.successor(phi_macro, "phi") == phi_macro
    assert sa.accepts(["i", "phi", "phi"])


def test_irioco_implies_ioco_may():
    cfg = GeneratorConfig(max_states=4, n_inputs=1, n_outputs=2, enabled="weak_may")
    for seed in range(150):
        spec = random_irmia(cfg.with_seed(seed))
        impl = random_refinement(spec, seed) if seed % 2 else random_irmia(cfg.with_seed(seed + 999))
        if irioco(impl, spec).holds:
            assert ioco_may(impl, spec).holds


def test_demonic_completion_keeps_conformance():
    cfg = GeneratorConfig(max_states=4, n_inputs=1, n_outputs=2, tau_prob=0.0)
    impl_cfg = GeneratorConfig(max_states=4, n_inputs=1, n_outputs=2, enabled="weak_must")
    kept = 0
    for seed in range(150):
        spec = random_irmia(cfg.with_seed(seed))
        impl = random_irmia(impl_cfg.with_seed(seed + 7))
        if irioco(impl, spec).holds:
            kept += 1
            assert irioco(impl, demonic_completion(spec)).holds
    assert kept > 0


def test_unifying_spec_refines_its_source():
    cfg = GeneratorConfig(max_states=5, n_inputs=1, n_outputs=2, enabled="weak_may")
    changed = 0
    for seed in range(150):
        s = random_irmia(cfg.with_seed(seed))
        su = build_unifying_spec(s)
        changed += su.states != s.states
        assert refines(su, s).holds
    assert changed > 20


def test_unifying_spec_adds_mandatory_quiescence():
    # the fresh must-quiescent successor makes delta mandatory after i0
    cfg = GeneratorConfig(min_states=1, max_states=5, n_inputs=1, n_outputs=2, enabled="weak_may")
    s = random_irmia(cfg.with_seed(1), "S")
    i = random_refinement(s, 1)
    i2 = random_refinement(i, 1000)
    assert input_enabledness(i).weak_may
    assert irioco(i, s).holds and refines(i2, i).holds
    assert irioco(i2, s).holds
    assert irioco(i2, build_unifying_spec(s)).summary() == "FAIL cond=2 trace=i0 missing=delta"


def test_unifying_spec_leaves_states_with_mandatory_outputs_alone(fig):
    q = fig("fig1c_q")
    su = build_unifying_spec(q)
    assert set(su.states) - set(q.states) == {"q3_quiet"}
    assert su.succ("q3_quiet", "e") == ()
