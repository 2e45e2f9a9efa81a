"""Tokenization strategies and script-structure classification."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from verselex.errors import ClassificationError
from verselex.tokenizer import (ScriptStructure, TokenizationMethod, classify_counts,
                                detect_script_structure, tokenize_verse)

U = TokenizationMethod.unigram
UT = TokenizationMethod.unitoken
Q = TokenizationMethod.quadtoken

JHN_19_41 = ("Now in the place where he was crucified there was a garden. "
             "In the garden was a new tomb in which no man had ever yet been laid.")
JHN_19_42 = ("Then because of the Jews' Preparation Day "
             "(for the tomb was near at hand) they laid Jesus there.")


@pytest.mark.parametrize("method", list(TokenizationMethod))
def test_empty_text_yields_nothing(method):
    assert tokenize_verse("", method) == []


def test_unigram_detaches_boundary_punctuation():
    assert tokenize_verse("the tomb.", U) == ["the", "tomb", "."]
    assert tokenize_verse('"Quoted words!"', U) == ['"', "Quoted", "words", "!", '"']
    assert tokenize_verse("don't stop mid-word", U) == ["don't", "stop", "mid-word"]
    assert tokenize_verse("--", U) == ["-", "-"]


def test_unigram_counts_match_published_verse_pair():
    tokens = tokenize_verse(JHN_19_41, U) + tokenize_verse(JHN_19_42, U)
    assert len(tokens) == 52
    assert len(set(tokens)) == 38


def test_unitoken_splits_code_points_and_drops_whitespace():
    assert tokenize_verse("ab c", UT) == ["a", "b", "c"]
    assert tokenize_verse("神爱世人", UT) == ["神", "爱", "世", "人"]


def test_quadtoken_windows():
    assert tokenize_verse("abcdef", Q) == ["abcd", "bcde", "cdef"]
    assert tokenize_verse("a bc def", Q) == ["abcd", "bcde", "cdef"]  # crosses word gaps
    assert tokenize_verse("abc", Q) == ["abc"]  # shorter than a window: whole remainder
    assert tokenize_verse("ab", Q) == ["ab"]


@given(st.text(max_size=80))
def test_unitoken_concatenation_recovers_non_whitespace(text):
    tokens = tokenize_verse(text, UT)
    assert "".join(tokens) == "".join(ch for ch in text if not ch.isspace())
    assert all(len(t) == 1 for t in tokens)


@given(st.text(max_size=80))
def test_quadtoken_lengths_and_count(text):
    stripped = "".join(ch for ch in text if not ch.isspace())
    tokens = tokenize_verse(text, Q)
    if not stripped:
        assert tokens == []
    else:
        assert len(tokens) == max(1, len(stripped) - 3)
        if len(stripped) >= 4:
            assert all(len(t) == 4 for t in tokens)


@given(st.text(max_size=80))
def test_unigram_tokens_never_contain_whitespace(text):
    assert not any(any(ch.isspace() for ch in tok) for tok in tokenize_verse(text, U))


def test_classification_thresholds():
    # A unigram vocabulary at the empirical bar means word markers; the
    # bar itself is what a Gospels-sized lemma list can maximally yield.
    assert classify_counts(u=161, v=0, w=0) is ScriptStructure.alphabet_word_markers
    assert classify_counts(u=160, v=0, w=0) is ScriptStructure.alphabet_word_markers
    assert classify_counts(u=0, v=150, w=160) is ScriptStructure.non_alphabetic
    assert classify_counts(u=10, v=20, w=160) is ScriptStructure.alphabet_no_word_markers


def test_structure_method_binding():
    assert ScriptStructure.alphabet_word_markers.chosen_method is U
    assert ScriptStructure.non_alphabetic.chosen_method is UT
    assert ScriptStructure.alphabet_no_word_markers.chosen_method is Q


def test_detect_takes_counts_from_best_translations():
    # u from the best unigram translation; v/w from the translation with
    # the most distinct unitoken extractions (here t2: v=2, w=3).
    extractions = {
        "t1": {U: ["a", "b", "c"], UT: ["x", "x"]},
        "t2": {U: ["a"], UT: ["x", "y", "x"]},
    }
    report = detect_script_structure(extractions, unigram_threshold=3)
    assert report.structure is ScriptStructure.alphabet_word_markers
    assert (report.u, report.v, report.w) == (3, 2, 3)

    report = detect_script_structure(extractions, unigram_threshold=4)
    assert report.structure is ScriptStructure.non_alphabetic  # 2 >= 3/2
    report = detect_script_structure(extractions, unigram_threshold=4, distinctness_ratio=0.9)
    assert report.structure is ScriptStructure.alphabet_no_word_markers


def test_detect_without_extractions_raises():
    with pytest.raises(ClassificationError):
        detect_script_structure({})
    with pytest.raises(ClassificationError):
        detect_script_structure({"t1": {U: [], UT: []}})


@given(st.integers(0, 400), st.integers(0, 400), st.integers(0, 400))
def test_classification_is_deterministic_in_counts(u, v, w):
    assert classify_counts(u, v, w) is classify_counts(u, v, w)
