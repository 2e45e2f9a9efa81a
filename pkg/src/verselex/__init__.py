"""Noun-vocabulary extraction from verse-aligned parallel corpora."""

__version__ = "0.1.0"

from .corpus import (AnnotatedToken, Case, Gender, LemmaForm, LemmaOccurrenceIndex,
                     Number, Translation, VerseRef, load_annotations, load_corpus,
                     select_lemma_forms)
from .extraction import (UNBOUNDED, CandidateScore, ContingencyTable, ExtractionRecord,
                         binom_sf_log10, build_verse_sets, extract, score_candidates)
from .tokenizer import ScriptStructure, TokenizationMethod, detect_script_structure, tokenize_verse

__all__ = [
    "__version__",
    "AnnotatedToken", "Case", "Gender", "LemmaForm", "LemmaOccurrenceIndex",
    "Number", "Translation", "VerseRef", "load_annotations", "load_corpus",
    "select_lemma_forms",
    "UNBOUNDED", "CandidateScore", "ContingencyTable", "ExtractionRecord",
    "binom_sf_log10", "build_verse_sets", "extract", "score_candidates",
    "ScriptStructure", "TokenizationMethod", "detect_script_structure", "tokenize_verse",
]
