import pytest

from irmia import Edge, Modality, input_enabledness, irioco, parse, refines, validate
from irmia.oracle import (
    FLAVOURS, GeneratorConfig, SizeBoundExceeded, enum_straces, fuzz_one, fuzz_pair,
    irioco_bounded, random_irmia, random_refinement, refines_bruteforce,
)

SMALL = """irmia A
inputs a
outputs x
states s0*, s1
must s0 ?a s1
may s1 !x s0
"""


def test_depth_zero_is_the_empty_trace(fig):
    assert enum_straces(fig("fig4b_s"), 0) == {()}


def test_two_mandatory_outputs_from_the_start(fig):
    assert enum_straces(fig("fig4b_s"), 1) == {(), ("a",), ("b",)}


def test_output_self_loop_without_quiescence(fig):
    assert enum_straces(fig("fig2c_sphi"), 2) == {(), ("b",), ("b", "b")}


def test_negative_depth_is_rejected():
    with pytest.raises(ValueError):
        enum_straces(parse(SMALL), -1)


def test_bounded_conformance_finds_the_missing_output(fig):
    verdict = irioco_bounded(fig("fig1b_q1"), fig("fig1c_q"), 4)
    assert not verdict.holds
    assert verdict.counterexample == ("a", "c", "d", "e")
    assert verdict.violated_condition == 2


def test_bounded_conformance_passes_when_the_output_is_unreachable(fig):
    assert irioco_bounded(fig("fig1a_q2"), fig("fig1c_q"), 8).holds


def test_bounded_conformance_agrees_with_the_fixpoint(fig):
    for impl, spec in [("fig1b_q1", "fig1c_q"), ("fig1a_q2", "fig1c_q"), ("fig8b_i", "fig8c_s")]:
        fast = irioco(fig(impl), fig(spec), assume_enabled=True)
        slow = irioco_bounded(fig(impl), fig(spec), 8)
        assert fast.holds == slow.holds
        assert fast.counterexample == slow.counterexample


def test_self_conformance_and_refinement():
    a = parse(SMALL)
    assert irioco_bounded(a, a, 6).holds
    assert refines_bruteforce(a, a).holds


def test_bruteforce_refinement_on_figures(fig):
    assert refines_bruteforce(fig("fig1a_q2"), fig("fig1c_q"), bound=60).holds
    assert not refines_bruteforce(fig("fig1b_q1"), fig("fig1c_q"), bound=60).holds
    assert refines_bruteforce(fig("fig8a_iprime"), fig("fig8b_i"), bound=60).holds


def test_bruteforce_size_bound(fig):
    with pytest.raises(SizeBoundExceeded):
        refines_bruteforce(fig("fig1a_q2"), fig("fig1c_q"))


def test_generator_is_deterministic():
    cfg = GeneratorConfig(seed=1)
    assert random_irmia(cfg) == random_irmia(cfg)


@pytest.mark.parametrize("flavour", FLAVOURS)
def test_generator_meets_the_enabledness_flavour(flavour):
    for seed in range(25):
        aut = random_irmia(GeneratorConfig(enabled=flavour, seed=seed))
        assert validate(aut) == []
        assert getattr(input_enabledness(aut), flavour)


def test_no_refusals_without_refusal_probability():
    for seed in range(25):
        aut = random_irmia(GeneratorConfig(refusal_prob=0.0, seed=seed))
        assert all(e.target != aut.failure for e in aut.edges)


def test_generator_alphabet_override():
    aut = random_irmia(GeneratorConfig(n_inputs=2, n_outputs=1, seed=3), "B", ["p", "q"], ["r"])
    assert aut.name == "B"
    assert set(aut.input_set) == {"p", "q"} and set(aut.output_set) == {"r"}


def test_invalid_generator_config():
    with pytest.raises(ValueError):
        GeneratorConfig(tau_prob=1.5)
    with pytest.raises(ValueError):
        GeneratorConfig(min_states=4, max_states=2)
    with pytest.raises(ValueError):
        GeneratorConfig(enabled="sometimes")


def test_zero_mutations_return_the_automaton(fig):
    q = fig("fig1c_q")
    assert random_refinement(q, 0, steps=0) == q


def test_random_refinements_refine(fig):
    q = fig("fig1c_q")
    for seed in range(20):
        assert refines(random_refinement(q, seed, steps=5), q).holds


def test_promoting_every_may_edge_refines(fig):
    q = fig("fig1c_q")
    promoted = q.replace(edges=tuple(Edge(e.source, e.label, e.target, Modality.MUST) for e in q.edges))
    assert refines(promoted, q).holds


def test_refusing_an_optional_input_refines(fig):
    q = fig("fig1c_q")
    edges = tuple(e for e in q.edges if not (e.source == "q1" and e.label == "f"))
    refused = q.replace(edges=edges + (Edge("q1", "f", q.failure, Modality.MUST),))
    assert refines(refused, q).holds


def test_fuzz_pair_is_reproducible():
    assert fuzz_pair(7) == fuzz_pair(7)


@pytest.mark.parametrize("check", ["irioco", "refines"])
def test_fuzz_checks_agree(check):
    outcomes = [fuzz_one(seed, check) for seed in range(30)]
    assert all(o.agree for o in outcomes)
    assert sum(not o.skipped for o in outcomes) >= 25


def test_fuzz_rejects_unknown_check():
    with pytest.raises(ValueError):
        fuzz_one(0, "bisim")
