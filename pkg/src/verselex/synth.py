"""Synthetic verse-aligned corpora with known ground truth.

The generator plants a chosen lexicon into pseudo-verses, pads them with
Zipf-distributed filler words (so high-frequency function-word analogues
stress the baseline machinery), and emits the matching source-language
annotations. Output is deterministic per seed, which makes it usable both
as a test oracle for the aligner and as a demo corpus for the CLI.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .corpus import AnnotatedToken, Case, Gender, LemmaForm, Number, Translation, VerseRef
from .errors import SynthSpecError
from .extraction import ExtractionRecord
from .tokenizer import ScriptStructure

__all__ = [
    "NoiseSpec",
    "SynthSpec",
    "generate",
    "paired_lexicon",
    "recovery_rate",
    "write_truth",
    "read_truth",
]

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
# 'q' marks target words in the no-word-marker script and 'x' prefixes
# synonym alternates; neither occurs in regular generated words.
_QUAD_MARKER = "q"
_ALT_PREFIX = "x"

_TARGET_CP = 0x4E00     # logographic target words, one code point each
_ALT_CP = 0x5600        # their synonym alternates
_FILLER_CP = 0x6E00     # logographic filler words


def _syllable(k: int) -> str:
    return _CONSONANTS[k % len(_CONSONANTS)] + _VOWELS[(k // len(_CONSONANTS)) % len(_VOWELS)]


def _word_stream():
    """Endless distinct pronounceable words: all 2-syllable, then 3-syllable."""
    base = len(_CONSONANTS) * len(_VOWELS)
    for i in range(base * base):
        yield _syllable(i % base) + _syllable(i // base)
    i = 0
    while True:
        yield _syllable(i % base) + _syllable((i // base) % base) + _syllable(i // (base * base))
        i += 1


def _target_word(i: int, script: ScriptStructure) -> str:
    if script is ScriptStructure.non_alphabetic:
        return chr(_TARGET_CP + i)
    if script is ScriptStructure.alphabet_no_word_markers:
        # Exactly four code points so the word itself is one of its own
        # quadgrams; the shared marker letter also gives the unitoken pass
        # one dominant (heavily duplicated) answer, the real signature of
        # an alphabet read without word boundaries.
        letters = _CONSONANTS + _VOWELS
        a, rest = divmod(i, len(letters) ** 2)
        b, c = divmod(rest, len(letters))
        return letters[a % len(letters)] + letters[b] + letters[c] + _QUAD_MARKER
    stream = _word_stream()
    word = next(stream)
    for _ in range(i):
        word = next(stream)
    return word


def _alternate(word: str, script: ScriptStructure) -> str:
    if script is ScriptStructure.non_alphabetic:
        return chr(ord(word) - _TARGET_CP + _ALT_CP)
    return _ALT_PREFIX + word


def _filler_words(count: int, script: ScriptStructure, forbidden: set[str]) -> list[str]:
    if script is ScriptStructure.non_alphabetic:
        return [chr(_FILLER_CP + i) for i in range(count)]
    out = []
    for word in _word_stream():
        if word not in forbidden:
            out.append(word)
        if len(out) == count:
            return out
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class NoiseSpec:
    paraphrase_rate: float = 0.0  # chance a lemma verse drops its target word
    synonym_rate: float = 0.0     # chance the target word is swapped for an alternate

    def validate(self):
        for name, rate in (("paraphrase_rate", self.paraphrase_rate),
                           ("synonym_rate", self.synonym_rate)):
            if not 0.0 <= rate <= 1.0:
                raise SynthSpecError(f"{name} must be in [0, 1], got {rate}")


@dataclass
class SynthSpec:
    seed: int
    num_verses: int
    lexicon: dict[LemmaForm, str]
    script: ScriptStructure
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    filler_vocab_size: int = 50
    occurrences_per_form: int = 4
    zipf_exponent: float = 1.0
    fillers_per_verse: tuple[int, int] = (6, 10)

    def validate(self):
        self.noise.validate()
        if self.num_verses < 1:
            raise SynthSpecError(f"num_verses must be >= 1, got {self.num_verses}")
        if not self.lexicon:
            raise SynthSpecError("lexicon must be non-empty")
        if self.occurrences_per_form < 2:
            raise SynthSpecError(
                f"forms need at least 2 assigned verses, got {self.occurrences_per_form}")
        if self.occurrences_per_form > self.num_verses:
            raise SynthSpecError("occurrences_per_form exceeds num_verses")
        if self.filler_vocab_size < 1:
            raise SynthSpecError("filler_vocab_size must be >= 1")
        if self.noise.synonym_rate == 0.0 and len(set(self.lexicon.values())) != len(self.lexicon):
            raise SynthSpecError("lexicon must be injective when synonym_rate is 0")


def paired_lexicon(n_lemmas: int, script: ScriptStructure) -> dict[LemmaForm, str]:
    """A lexicon of `n_lemmas` nouns, each with a singular and a plural form."""
    genders = list(Gender)
    lexicon: dict[LemmaForm, str] = {}
    for i in range(n_lemmas):
        lemma = f"lem{i:03d}"
        gender = genders[i % 3]
        for j, number in enumerate((Number.singular, Number.plural)):
            form = LemmaForm(lemma, gender, number, Case.nominative)
            lexicon[form] = _target_word(2 * i + j, script)
    return lexicon


def _verse_ref(i: int) -> VerseRef:
    return VerseRef("MAT", i // 25 + 1, i % 25 + 1)


def generate(spec: SynthSpec) -> tuple[Translation, list[AnnotatedToken], dict[LemmaForm, str]]:
    """Emit one synthetic translation, its annotations, and the truth lexicon.

    Byte-identical output for equal specs: every random draw comes from a
    single seeded generator walked in a fixed order.
    """
    spec.validate()
    rng = random.Random(spec.seed)
    forms = sorted(spec.lexicon, key=LemmaForm.sort_key)

    assignments: dict[int, list[LemmaForm]] = {}
    for form in forms:
        for idx in rng.sample(range(spec.num_verses), spec.occurrences_per_form):
            assignments.setdefault(idx, []).append(form)

    forbidden = set(spec.lexicon.values())
    fillers = _filler_words(spec.filler_vocab_size, spec.script, forbidden)
    weights = [1.0 / (r + 1) ** spec.zipf_exponent for r in range(len(fillers))]
    lo, hi = spec.fillers_per_verse

    verses: dict[VerseRef, str] = {}
    annotations: list[AnnotatedToken] = []
    separator = " " if spec.script is ScriptStructure.alphabet_word_markers else ""
    for idx in range(spec.num_verses):
        ref = _verse_ref(idx)
        tokens: list[str] = []
        position = 0
        for form in sorted(assignments.get(idx, ()), key=LemmaForm.sort_key):
            annotations.append(AnnotatedToken(
                verse=ref, position=position, surface=f"{form.lemma}.{form.number.value[:2]}",
                lemma=form.lemma, pos="noun",
                gender=form.gender, number=form.number, case=form.case,
            ))
            position += 1
            word = spec.lexicon[form]
            if rng.random() < spec.noise.paraphrase_rate:
                continue
            if rng.random() < spec.noise.synonym_rate:
                word = _alternate(word, spec.script)
            tokens.append(word)
        tokens.extend(rng.choices(fillers, weights=weights, k=rng.randint(lo, hi)))
        rng.shuffle(tokens)
        verses[ref] = separator.join(tokens)

    translation = Translation(
        translation_id=f"synth-{spec.seed}",
        language_code="syn",
        verses=verses,
    )
    annotations.sort(key=lambda t: (t.verse.sort_key, t.position))
    return translation, annotations, dict(spec.lexicon)


def recovery_rate(records: Iterable[ExtractionRecord], truth: Mapping[LemmaForm, str]) -> float:
    """Fraction of truth forms whose extracted token matches the planted word."""
    extracted = {rec.lemma_form: rec.token for rec in records}
    hits = sum(1 for form, word in truth.items() if extracted.get(form) == word)
    return hits / len(truth)


def write_truth(truth: Mapping[LemmaForm, str], path) -> None:
    ordered = sorted(truth.items(), key=lambda kv: kv[0].sort_key())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for form, word in ordered:
            fh.write("\t".join([form.lemma, form.gender.value, form.number.value,
                                form.case.value, word]) + "\n")


def read_truth(path) -> dict[LemmaForm, str]:
    truth: dict[LemmaForm, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            lemma, gender, number, case, word = line.split("\t")
            truth[LemmaForm(lemma, Gender(gender), Number(number), Case(case))] = word
    return truth
