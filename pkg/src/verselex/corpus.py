"""Verse-keyed data model and file ingestion.

A corpus is a set of translations, each mapping (book, chapter, verse)
references to UTF-8 text. The source-language side is a flat list of
annotated tokens (surface, lemma, part of speech, and noun morphology).
Both sides load from TSV or JSONL; see `load_corpus` / `load_annotations`
for the exact column contracts.

Text is normalized on load: line endings become ``\\n`` and the string is
NFC-normalized. Nothing else is touched — no case folding, no whitespace
collapsing. Empty verse text is legal and preserved (disputed passages
arrive as empty strings and must stay distinguishable from absent verses).
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from functools import total_ordering
from pathlib import Path
from typing import Iterable, Optional

from .errors import DuplicateKeyError, ParseError, ValidationError

__all__ = [
    "VerseRef",
    "Translation",
    "Gender",
    "Number",
    "Case",
    "AnnotatedToken",
    "LemmaForm",
    "LemmaOccurrenceIndex",
    "FunnelStats",
    "SelectionResult",
    "load_corpus",
    "write_corpus",
    "load_annotations",
    "write_annotations",
    "select_lemma_forms",
    "register_book",
]

# Canonical New Testament book order (USFM codes). Books not listed here
# still sort deterministically: after all known books, alphabetically.
_NT_BOOKS = (
    "MAT MRK LUK JHN ACT ROM 1CO 2CO GAL EPH PHP COL 1TH 2TH 1TI 2TI "
    "TIT PHM HEB JAS 1PE 2PE 1JN 2JN 3JN JUD REV"
).split()

_BOOK_ORDER: dict[str, int] = {code: i for i, code in enumerate(_NT_BOOKS)}


def register_book(code: str) -> None:
    """Append a book code to the canonical ordering table."""
    if not (len(code) == 3 and all(c.isascii() and (c.isupper() or c.isdigit()) for c in code)):
        raise ValidationError(f"book code must match [A-Z0-9]{{3}}: {code!r}")
    _BOOK_ORDER.setdefault(code, len(_BOOK_ORDER))


@total_ordering
@dataclass(frozen=True)
class VerseRef:
    """A (book, chapter, verse) reference; orders by canonical book order."""

    book: str
    chapter: int
    verse: int

    def __post_init__(self):
        b = self.book
        if not (len(b) == 3 and all(c.isascii() and (c.isupper() or c.isdigit()) for c in b)):
            raise ValidationError(f"book code must match [A-Z0-9]{{3}}: {b!r}")
        if self.chapter < 1 or self.verse < 1:
            raise ValidationError(f"chapter and verse must be >= 1: {b} {self.chapter}:{self.verse}")

    @property
    def sort_key(self) -> tuple:
        return (_BOOK_ORDER.get(self.book, len(_BOOK_ORDER)), self.book, self.chapter, self.verse)

    def __lt__(self, other: "VerseRef") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"{self.book} {self.chapter}:{self.verse}"


@dataclass
class Translation:
    """One translation of the corpus: verse-keyed text plus identity.

    `language_code` is an ISO639-3 base code; `variant` is an optional
    geography/orthography suffix. A variant is a distinct language for
    every downstream purpose, so the storage key joins both.
    """

    translation_id: str
    language_code: str
    variant: Optional[str] = None
    verses: dict[VerseRef, str] = field(default_factory=dict)

    @property
    def language_key(self) -> str:
        return f"{self.language_code}_{self.variant}" if self.variant else self.language_code


class Gender(str, Enum):
    masculine = "masculine"
    feminine = "feminine"
    neuter = "neuter"


class Number(str, Enum):
    singular = "singular"
    plural = "plural"


class Case(str, Enum):
    nominative = "nominative"
    accusative = "accusative"
    dative = "dative"
    genitive = "genitive"


@dataclass(frozen=True)
class AnnotatedToken:
    """A source-language token occurrence with lemma and noun morphology."""

    verse: VerseRef
    position: int
    surface: str
    lemma: str
    pos: str
    gender: Optional[Gender] = None
    number: Optional[Number] = None
    case: Optional[Case] = None

    def __post_init__(self):
        if self.position < 0:
            raise ValidationError(f"token position must be >= 0: {self.position}")
        if self.pos == "noun" and not (self.gender and self.number and self.case):
            raise ValidationError(
                f"noun {self.lemma!r} at {self.verse} lacks gender/number/case"
            )


@dataclass(frozen=True)
class LemmaForm:
    """A lemma fixed to one gender, number, and case; identity is the 4-tuple."""

    lemma: str
    gender: Gender
    number: Number
    case: Case

    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.lemma, self.number.value, self.case.value, self.gender.value)


@dataclass
class LemmaOccurrenceIndex:
    """Verse sets per lemma form and per lemma string.

    `form_to_verses` covers tokens carrying full noun morphology;
    `lemma_to_verses` unions the verses of every occurrence of the lemma
    string regardless of form or part of speech, because downstream
    baseline-verse selection must exclude a verse whenever the lemma
    appears there in *any* guise.
    """

    form_to_verses: dict[LemmaForm, set[VerseRef]]
    lemma_to_verses: dict[str, set[VerseRef]]

    @classmethod
    def from_tokens(cls, tokens: Iterable[AnnotatedToken]) -> "LemmaOccurrenceIndex":
        form_to_verses: dict[LemmaForm, set[VerseRef]] = {}
        lemma_to_verses: dict[str, set[VerseRef]] = {}
        for tok in tokens:
            lemma_to_verses.setdefault(tok.lemma, set()).add(tok.verse)
            if tok.gender and tok.number and tok.case:
                form = LemmaForm(tok.lemma, tok.gender, tok.number, tok.case)
                form_to_verses.setdefault(form, set()).add(tok.verse)
        return cls(form_to_verses, lemma_to_verses)


def _normalize_text(text: str) -> str:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return unicodedata.normalize("NFC", text)


def _parse_verse_ref(book: str, chapter: str, verse: str, path, line: int) -> VerseRef:
    try:
        return VerseRef(book, int(chapter), int(verse))
    except (ValueError, ValidationError) as exc:
        raise ParseError(path, line, f"bad verse reference {book!r} {chapter!r}:{verse!r} ({exc})") from None


_CORPUS_KEYS = ("translation_id", "language_code", "variant", "book", "chapter", "verse", "text")


def load_corpus(path, format: str = "tsv") -> list[Translation]:
    """Load translations from a corpus file.

    TSV rows carry seven tab-separated columns (no header):
    translation_id, language_code, variant (may be empty), book, chapter,
    verse, text. JSONL is one object per line with the same seven keys.
    Duplicate (translation_id, verse) rows and malformed rows raise with
    the offending line number. An empty file yields an empty list.
    """
    path = Path(path)
    translations: dict[str, Translation] = {}
    for lineno, row in _iter_rows(path, format, _CORPUS_KEYS):
        tid, lang, variant = row["translation_id"], row["language_code"], row["variant"]
        if not tid or not lang:
            raise ParseError(path, lineno, "translation_id and language_code must be non-empty")
        ref = _parse_verse_ref(row["book"], row["chapter"], row["verse"], path, lineno)
        tr = translations.get(tid)
        if tr is None:
            tr = Translation(tid, lang, variant or None)
            translations[tid] = tr
        elif (tr.language_code, tr.variant) != (lang, variant or None):
            raise ParseError(path, lineno, f"translation {tid!r} redeclared with a different language")
        if ref in tr.verses:
            raise DuplicateKeyError(path, lineno, f"duplicate verse {ref} for translation {tid!r}")
        tr.verses[ref] = _normalize_text(row["text"])
    return list(translations.values())


def write_corpus(translations: Iterable[Translation], path, format: str = "tsv") -> None:
    """Write translations in the format `load_corpus` reads, sorted for stable bytes."""
    path = Path(path)
    rows = []
    for tr in translations:
        for ref in sorted(tr.verses):
            rows.append((tr.translation_id, tr.language_code, tr.variant or "", ref, tr.verses[ref]))
    rows.sort(key=lambda r: (r[0], r[3].sort_key))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tid, lang, variant, ref, text in rows:
            if format == "tsv":
                fh.write(f"{tid}\t{lang}\t{variant}\t{ref.book}\t{ref.chapter}\t{ref.verse}\t{text}\n")
            elif format == "jsonl":
                fh.write(json.dumps({
                    "translation_id": tid, "language_code": lang, "variant": variant or None,
                    "book": ref.book, "chapter": ref.chapter, "verse": ref.verse, "text": text,
                }, ensure_ascii=False) + "\n")
            else:
                raise ValueError(f"unknown corpus format: {format!r}")


_ANNOTATION_KEYS = ("book", "chapter", "verse", "position", "surface", "lemma",
                    "pos", "gender", "number", "case")


def load_annotations(path, format: str = "tsv") -> list[AnnotatedToken]:
    """Load annotated tokens, returned in (verse, position) order.

    TSV columns: book, chapter, verse, position, surface, lemma, pos,
    gender, number, case — the last three empty when not applicable.
    JSONL uses the same keys with null for missing morphology.
    """
    path = Path(path)
    tokens: list[AnnotatedToken] = []
    seen: set[tuple[VerseRef, int]] = set()
    for lineno, row in _iter_rows(path, format, _ANNOTATION_KEYS):
        ref = _parse_verse_ref(row["book"], row["chapter"], row["verse"], path, lineno)
        try:
            position = int(row["position"])
        except ValueError:
            raise ParseError(path, lineno, f"bad token position {row['position']!r}") from None
        gender = _parse_enum(Gender, row["gender"], path, lineno)
        number = _parse_enum(Number, row["number"], path, lineno)
        case = _parse_enum(Case, row["case"], path, lineno)
        if (ref, position) in seen:
            raise DuplicateKeyError(path, lineno, f"duplicate token position {position} in {ref}")
        seen.add((ref, position))
        try:
            tokens.append(AnnotatedToken(
                verse=ref, position=position,
                surface=_normalize_text(row["surface"]),
                lemma=_normalize_text(row["lemma"]),
                pos=row["pos"], gender=gender, number=number, case=case,
            ))
        except ValidationError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    tokens.sort(key=lambda t: (t.verse.sort_key, t.position))
    return tokens


def write_annotations(tokens: Iterable[AnnotatedToken], path, format: str = "tsv") -> None:
    path = Path(path)
    ordered = sorted(tokens, key=lambda t: (t.verse.sort_key, t.position))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in ordered:
            g = t.gender.value if t.gender else ""
            n = t.number.value if t.number else ""
            c = t.case.value if t.case else ""
            if format == "tsv":
                fh.write("\t".join([t.verse.book, str(t.verse.chapter), str(t.verse.verse),
                                    str(t.position), t.surface, t.lemma, t.pos, g, n, c]) + "\n")
            elif format == "jsonl":
                fh.write(json.dumps({
                    "book": t.verse.book, "chapter": t.verse.chapter, "verse": t.verse.verse,
                    "position": t.position, "surface": t.surface, "lemma": t.lemma, "pos": t.pos,
                    "gender": g or None, "number": n or None, "case": c or None,
                }, ensure_ascii=False) + "\n")
            else:
                raise ValueError(f"unknown annotation format: {format!r}")


def _parse_enum(enum_cls, raw: str, path, lineno: int):
    if raw in ("", None):
        return None
    try:
        return enum_cls(raw)
    except ValueError:
        raise ParseError(path, lineno, f"invalid {enum_cls.__name__.lower()} value {raw!r}") from None


def _iter_rows(path: Path, format: str, keys: tuple[str, ...]):
    """Yield (lineno, row-dict) pairs; all values are strings ('' for null)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        raw = fh.read()
    raw = raw.replace("\r\n", "\n").replace("\r", "\n")
    for lineno, line in enumerate(raw.split("\n"), start=1):
        if line == "":
            continue
        if format == "tsv":
            cols = line.split("\t")
            if len(cols) != len(keys):
                raise ParseError(path, lineno, f"expected {len(keys)} columns, got {len(cols)}")
            yield lineno, dict(zip(keys, cols))
        elif format == "jsonl":
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, lineno, f"invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise ParseError(path, lineno, "expected a JSON object")
            missing = [k for k in keys if k not in obj]
            if missing:
                raise ParseError(path, lineno, f"missing keys: {', '.join(missing)}")
            yield lineno, {k: ("" if obj[k] is None else str(obj[k])) for k in keys}
        else:
            raise ValueError(f"unknown format: {format!r}")


@dataclass(frozen=True)
class FunnelStats:
    """Lemma/form counts surviving each stage of the selection funnel."""

    noun_lemmas: int          # distinct lowercase-initial noun lemmas
    min_verses_lemmas: int    # lemmas left after the two-verse form filter
    min_verses_forms: int     # forms left after the two-verse form filter
    paired_lemmas: int        # lemmas with both singular and plural forms
    paired_forms: int         # their surviving forms


@dataclass
class SelectionResult:
    forms: list[LemmaForm]
    index: LemmaOccurrenceIndex
    stats: FunnelStats


def select_lemma_forms(tokens: list[AnnotatedToken]) -> SelectionResult:
    """Run the lemma-selection funnel and build the occurrence index.

    Filters, in order: keep nouns; drop lemmas whose first code point is
    uppercase (proper nouns); drop forms seen in fewer than two distinct
    verses; keep only lemmas that retain at least one singular and at
    least one plural form. The occurrence index is built over the
    *unfiltered* token list so that later verse-set construction can
    exclude every occurrence of a lemma, including forms the funnel
    dropped.
    """
    index = LemmaOccurrenceIndex.from_tokens(tokens)

    nouns = [t for t in tokens if t.pos == "noun"]
    common = [t for t in nouns if not t.lemma[:1].isupper()]
    noun_lemmas = {t.lemma for t in common}

    form_verses: dict[LemmaForm, set[VerseRef]] = {}
    for t in common:
        form = LemmaForm(t.lemma, t.gender, t.number, t.case)
        form_verses.setdefault(form, set()).add(t.verse)

    frequent = {f for f, verses in form_verses.items() if len(verses) >= 2}
    frequent_lemmas = {f.lemma for f in frequent}

    numbers_by_lemma: dict[str, set[Number]] = {}
    for f in frequent:
        numbers_by_lemma.setdefault(f.lemma, set()).add(f.number)
    paired_lemmas = {lemma for lemma, nums in numbers_by_lemma.items()
                     if Number.singular in nums and Number.plural in nums}
    surviving = sorted((f for f in frequent if f.lemma in paired_lemmas),
                       key=LemmaForm.sort_key)

    stats = FunnelStats(
        noun_lemmas=len(noun_lemmas),
        min_verses_lemmas=len(frequent_lemmas),
        min_verses_forms=len(frequent),
        paired_lemmas=len(paired_lemmas),
        paired_forms=len(surviving),
    )
    return SelectionResult(forms=surviving, index=index, stats=stats)
