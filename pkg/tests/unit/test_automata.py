import pytest

from app.domain.entities.automaton import AtomicPropositionSet, mode_sort_key
from app.domain.exceptions import DfaError, DfaParseError, DfaValidationError, UnsatisfiableTaskError
from app.domain.services.automata_service import DEAD_MODE, coaccessible_trim, run_word, step
from app.domain.services.guard_expressions import evaluate_guard, parse_guard
from app.infrastructure.io.dfa_loader import load_dfa, parse_dfa


def _sym(*props):
    return AtomicPropositionSet.of(props)


def test_case_study_dfa_is_total_over_its_alphabet(case_dfa):
    assert case_dfa.states == ('q1', 'q2', 'q3', 'q4', 'q5')
    assert case_dfa.alphabet_props.props == ('a', 'b', 'c', 'd', 'goal')
    assert len(case_dfa.transitions) == 5 * 2**5
    assert case_dfa.accepting == frozenset({'q5'})


def test_case_study_steps_follow_guards(case_dfa):
    assert step(case_dfa, 'q1', _sym('a')) == 'q2'
    assert step(case_dfa, 'q1', _sym('a', 'b')) == 'q2'
    assert step(case_dfa, 'q1', _sym('b')) == 'q3'
    assert step(case_dfa, 'q1', _sym()) == 'q1'
    assert step(case_dfa, 'q2', _sym('b')) == 'q3'
    assert step(case_dfa, 'q3', _sym('a')) == 'q2'
    assert step(case_dfa, 'q3', _sym('a', 'd')) == 'q4'
    assert step(case_dfa, 'q4', _sym('goal')) == 'q5'
    assert step(case_dfa, 'q5', _sym('a')) == 'q5'


def test_run_word_reports_acceptance(case_dfa):
    mode, accepted = run_word(case_dfa, [_sym(), _sym('a'), _sym('c'), _sym('goal')])
    assert mode == 'q5'
    assert accepted is True

    mode, accepted = run_word(case_dfa, [_sym('b'), _sym('a')])
    assert mode == 'q2'
    assert accepted is False


def test_step_rejects_unknown_mode_and_props(case_dfa):
    with pytest.raises(DfaError):
        step(case_dfa, 'q9', _sym())
    with pytest.raises(DfaError):
        step(case_dfa, 'q1', _sym('zz'))


def test_overlapping_guards_are_rejected():
    text = 'props: a, b\nstates: q1, q2, q3\ninitial: q1\naccepting: q2\ndefault: self-loop\nq1 --[a]--> q2\nq1 --[b]--> q3\n'
    with pytest.raises(DfaValidationError) as exc:
        parse_dfa(text)
    assert 'linhas=6,7' in str(exc.value)


def test_missing_transitions_without_default_are_rejected():
    text = 'props: a\nstates: q1, q2\ninitial: q1\naccepting: q2\ndefault: none\nq1 --[a]--> q2\n'
    with pytest.raises(DfaValidationError):
        parse_dfa(text)


def test_parse_error_carries_line_number():
    text = 'props: a\nstates: q1, q2\ninitial: q1\naccepting: q2\nq1 --[a &]--> q2\n'
    with pytest.raises(DfaParseError) as exc:
        parse_dfa(text)
    assert exc.value.line == 5


def test_unknown_header_key_is_a_parse_error():
    with pytest.raises(DfaParseError) as exc:
        parse_dfa('props: a\nstatez: q1\n')
    assert exc.value.line == 2


def test_undecodable_dfa_file_is_a_parse_error(tmp_path):
    path = tmp_path / 'task.dfa'
    path.write_bytes(b'props: a\nstates: q1\xff\ninitial: q1\n')
    with pytest.raises(DfaParseError):
        load_dfa(path)


def test_guard_expressions_support_aliases_and_precedence():
    guard = parse_guard('a ∧ ¬b || c')
    assert evaluate_guard(guard, _sym('a')) is True
    assert evaluate_guard(guard, _sym('a', 'b')) is False
    assert evaluate_guard(guard, _sym('b', 'c')) is True
    assert evaluate_guard(parse_guard('true'), _sym()) is True
    assert evaluate_guard(parse_guard('!(a | b)'), _sym()) is True


DEAD_END_DFA = """
props: a, b
states: q1, q2, q3
initial: q1
accepting: q2
default: self-loop
q1 --[a]--> q2
q1 --[b & !a]--> q3
"""


def test_coaccessible_trim_reports_dangling_transitions():
    dfa = parse_dfa(DEAD_END_DFA)
    trimmed = coaccessible_trim(dfa)

    assert trimmed.removed == frozenset({'q3'})
    assert trimmed.dfa.states == ('q1', 'q2')
    assert trimmed.dfa.partial is True
    assert ('q1', _sym('b'), 'q3') in trimmed.dangling


def test_coaccessible_trim_can_preserve_totality():
    dfa = parse_dfa(DEAD_END_DFA)
    trimmed = coaccessible_trim(dfa, preserve_totality=True)

    assert DEAD_MODE in trimmed.dfa.states
    assert trimmed.dfa.partial is False
    assert step(trimmed.dfa, 'q1', _sym('b')) == DEAD_MODE
    assert step(trimmed.dfa, DEAD_MODE, _sym('a')) == DEAD_MODE


@pytest.mark.parametrize('preserve_totality', [False, True])
def test_coaccessible_trim_is_idempotent(preserve_totality):
    once = coaccessible_trim(parse_dfa(DEAD_END_DFA), preserve_totality=preserve_totality)
    twice = coaccessible_trim(once.dfa, preserve_totality=preserve_totality)

    assert twice.dfa is once.dfa
    assert twice.removed == frozenset()


def test_trim_without_dead_modes_returns_same_automaton(case_dfa):
    trimmed = coaccessible_trim(case_dfa)
    assert trimmed.dfa is case_dfa
    assert trimmed.removed == frozenset()


def test_unsatisfiable_task_is_reported():
    text = 'props: a\nstates: q1, q2\ninitial: q1\naccepting: q2\ndefault: self-loop\nq2 --[a]--> q1\n'
    with pytest.raises(UnsatisfiableTaskError):
        coaccessible_trim(parse_dfa(text))


def test_modes_sort_numerically():
    assert sorted(['q10', 'q2', 'q1'], key=mode_sort_key) == ['q1', 'q2', 'q10']


def test_run_word_extends_one_symbol_at_a_time(case_dfa):
    symbols = [_sym(), _sym('a'), _sym('b'), _sym('c'), _sym('d'), _sym('goal'), _sym('a', 'c')]
    words = [[symbols[(3 * i + j) % len(symbols)] for j in range(i % 6)] for i in range(40)]
    for word in words:
        mode, _ = run_word(case_dfa, word)
        for symbol in symbols:
            extended, accepted = run_word(case_dfa, [*word, symbol])
            assert extended == step(case_dfa, mode, symbol)
            assert accepted == (extended in case_dfa.accepting)
            assert run_word(case_dfa, [symbol], start=mode)[0] == extended
