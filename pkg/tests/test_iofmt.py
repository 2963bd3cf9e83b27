import pytest

from irmia import ParseError, build, isomorphic, parallel_compose, parse, serialize, to_dot
from irmia.oracle import GeneratorConfig, random_irmia

from conftest import FIGURES


def test_fig1c_parses_to_seven_states(fig):
    q = fig("fig1c_q")
    assert len(q.edges) == 10
    assert len(q.states) == 7
    assert q.failure == "_PHI"


def test_implicit_failure_state_is_added():
    aut = parse("irmia A\ninputs a\noutputs\nstates q0*\nmust q0 ?a q0\n")
    assert aut.failure == "_PHI"
    assert aut.states == ("q0", "_PHI")


def test_explicit_failure_marker_is_used():
    aut = parse("irmia A\ninputs a\noutputs\nstates q0*, PHI!\nmust q0 ?a PHI\n")
    assert aut.failure == "PHI"


def test_comments_and_blank_lines_are_ignored():
    text = "# header\nirmia A   # name\n\ninputs a\noutputs b\nstates q0*\nmust q0 !b q0  # loop\n"
    aut = parse(text)
    assert aut.outputs == ("b",)
    assert len(aut.edges) == 1


def test_empty_transition_section_is_valid():
    aut = parse("irmia A\ninputs a\noutputs b\nstates q0*, q1\n")
    assert aut.states == ("q0", "q1", "_PHI")
    assert aut.edges == ()


def test_validation_failure_names_the_clause():
    text = "irmia A\ninputs f\noutputs\nstates q0*, q1, PHI!\nmust q1 ?f PHI\nmay q1 ?f q0\n"
    with pytest.raises(ParseError) as info:
        parse(text)
    assert "clause 5" in str(info.value)
    assert info.value.violation.rule == "5"
    assert info.value.line in (5, 6)


def test_sigil_must_agree_with_alphabet():
    with pytest.raises(ParseError) as info:
        parse("irmia A\ninputs a\noutputs b\nstates q0*\nmust q0 !a q0\n")
    assert info.value.line == 5
    assert info.value.violation is None


@pytest.mark.parametrize("text", [
    "inputs a\n",
    "irmia A\ninputs a\noutputs\nstates q0*\nmaybe q0 ?a q0\n",
    "irmia A\ninputs a\noutputs\nstates q0*\nmust q0 ?a\n",
    "irmia A\ninputs a\noutputs\nstates q0*\nmust q0 ?a q7\n",
    "irmia A\ninputs a\noutputs\nstates q0*, q1*\n",
])
def test_syntax_errors_carry_positions(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line >= 1 and info.value.col >= 1


def test_every_golden_file_is_byte_stable():
    files = sorted(FIGURES.glob("*.irmia"))
    assert len(files) >= 20
    for path in files:
        text = path.read_text(encoding="utf-8")
        assert serialize(parse(text)) == text, path.name


def test_round_trip_of_empty_alphabet_automaton():
    aut = build("E", [], [], [("must", "q0", "tau", "q1")])
    again = parse(serialize(aut))
    assert again == aut


def test_round_trip_of_composition_with_pair_names(fig):
    out = parallel_compose(fig("fig9a_p"), fig("fig9b_q")).automaton
    text = serialize(out)
    assert '"(a,p)"*' in text
    again = parse(text)
    assert again.states == out.states
    assert isomorphic(again, out)
    assert serialize(again) == text


def test_round_trip_of_generated_automata():
    for seed in range(50):
        aut = random_irmia(GeneratorConfig(max_states=6, n_inputs=2, tau_prob=0.3, seed=seed))
        assert parse(serialize(aut)) == aut


def test_dot_export_conventions(fig):
    dot = to_dot(fig("fig1c_q"))
    assert dot.count(" -> ") == 11  # ten edges plus the entry arrow
    assert dot.count("style=dashed") == 3
    assert '"_PHI" [shape=doublecircle]' in dot
    assert '__start -> "q0"' in dot
    assert to_dot(fig("fig1c_q")) == dot


def test_dot_renders_tau_and_must_edges():
    aut = build("A", ["a"], [], [("must", "q0", "tau", "q1"), ("must", "q1", "a", "q1")])
    dot = to_dot(aut)
    assert 'label="τ", style=solid' in dot
    assert 'label="?a", style=solid' in dot


def test_dot_of_failure_only_automaton():
    aut = parse("irmia F\ninputs\noutputs\nstates PHI*!\n")
    assert to_dot(aut).count("doublecircle") == 1


def test_load_reads_utf8(fig):
    assert "1€" in fig("fig9a_p").outputs
