"""Tokenization strategies and written-structure classification.

Three interchangeable tokenizers cover the three kinds of writing system
the pipeline can meet: whitespace-delimited words (unigram), single code
points for logographic scripts (unitoken), and sliding 4-code-point
windows for alphabetic scripts without word markers (quadtoken). The
classifier picks between them from per-language extraction summaries.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .errors import ClassificationError

__all__ = [
    "TokenizationMethod",
    "ScriptStructure",
    "ScriptReport",
    "tokenize_verse",
    "classify_counts",
    "detect_script_structure",
    "UNIGRAM_THRESHOLD",
    "DISTINCTNESS_RATIO",
]

# Empirical decision constants; overridable per call and via the CLI.
UNIGRAM_THRESHOLD = 160
DISTINCTNESS_RATIO = 0.5


class TokenizationMethod(str, Enum):
    unigram = "unigram"
    unitoken = "unitoken"
    quadtoken = "quadtoken"


class ScriptStructure(str, Enum):
    """Written structure of a language, bound one-to-one to a tokenizer."""

    alphabet_word_markers = "alphabet_word_markers"
    non_alphabetic = "non_alphabetic"
    alphabet_no_word_markers = "alphabet_no_word_markers"

    @property
    def chosen_method(self) -> TokenizationMethod:
        return _STRUCTURE_METHOD[self]


_STRUCTURE_METHOD = {
    ScriptStructure.alphabet_word_markers: TokenizationMethod.unigram,
    ScriptStructure.non_alphabetic: TokenizationMethod.unitoken,
    ScriptStructure.alphabet_no_word_markers: TokenizationMethod.quadtoken,
}


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _unigrams(text: str) -> list[str]:
    # Split on Unicode whitespace, then detach leading/trailing punctuation
    # code points as standalone tokens. Internal punctuation (don't,
    # mid-word hyphens) stays attached.
    out: list[str] = []
    for chunk in text.split():
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            out.append(chunk[start])
            start += 1
        trailing: list[str] = []
        while end > start and _is_punct(chunk[end - 1]):
            trailing.append(chunk[end - 1])
            end -= 1
        if start < end:
            out.append(chunk[start:end])
        out.extend(reversed(trailing))
    return out


def tokenize_verse(text: str, method: TokenizationMethod) -> list[str]:
    """Tokenize one verse; empty text yields no tokens for any method."""
    method = TokenizationMethod(method)
    if method is TokenizationMethod.unigram:
        return _unigrams(text)
    stripped = "".join(ch for ch in text if not ch.isspace())
    if method is TokenizationMethod.unitoken:
        return list(stripped)
    if not stripped:
        return []
    if len(stripped) < 4:
        return [stripped]
    return [stripped[i:i + 4] for i in range(len(stripped) - 3)]


def classify_counts(u: int, v: int, w: int,
                    unigram_threshold: int = UNIGRAM_THRESHOLD,
                    distinctness_ratio: float = DISTINCTNESS_RATIO) -> ScriptStructure:
    """Decide the written structure from the three summary counts.

    u: best distinct-unigram-extraction count over translations.
    v, w: distinct and total unitoken extraction counts for the
    translation maximizing v. A wide unigram vocabulary means word
    markers; a mostly-distinct unitoken vocabulary means logograms;
    anything else is treated as an unmarked alphabet.
    """
    if u >= unigram_threshold:
        return ScriptStructure.alphabet_word_markers
    if v >= w * distinctness_ratio:
        return ScriptStructure.non_alphabetic
    return ScriptStructure.alphabet_no_word_markers


@dataclass(frozen=True)
class ScriptReport:
    structure: ScriptStructure
    u: int
    v: int
    w: int

    @property
    def chosen_method(self) -> TokenizationMethod:
        return self.structure.chosen_method


def detect_script_structure(
    extractions: Mapping[str, Mapping[TokenizationMethod, Sequence[str]]],
    unigram_threshold: int = UNIGRAM_THRESHOLD,
    distinctness_ratio: float = DISTINCTNESS_RATIO,
) -> ScriptReport:
    """Classify one language from its per-translation extraction summaries.

    `extractions` maps translation_id -> method -> extracted tokens (one
    entry per lemma form that produced a winner; duplicates meaningful).
    v and w are both taken from the translation with the most distinct
    unitoken extractions, ties broken by translation_id for determinism.
    Raises ClassificationError when there is nothing to classify.
    """
    if not extractions:
        raise ClassificationError("no extractions available for script detection")
    total = sum(len(tokens) for methods in extractions.values() for tokens in methods.values())
    if total == 0:
        raise ClassificationError("no extractions available for script detection")

    u = max(len(set(methods.get(TokenizationMethod.unigram, ()) or ()))
            for methods in extractions.values())

    def distinct_unitokens(item):
        tid, methods = item
        return len(set(methods.get(TokenizationMethod.unitoken, ()) or ()))

    best_tid, best_methods = min(extractions.items(),
                                 key=lambda item: (-distinct_unitokens(item), item[0]))
    uni = best_methods.get(TokenizationMethod.unitoken, ()) or ()
    v = len(set(uni))
    w = len(uni)
    structure = classify_counts(u, v, w, unigram_threshold, distinctness_ratio)
    return ScriptReport(structure=structure, u=u, v=v, w=w)
