"""Small builders shared across the test modules."""

from verselex.corpus import (AnnotatedToken, Case, Gender, LemmaForm, Number,
                             Translation, VerseRef)


def ref(book="MAT", chapter=1, verse=1):
    return VerseRef(book, chapter, verse)


def translation(verses, tid="t1", lang="eng", variant=None):
    """Build a Translation from {(book, chapter, verse): text} or {VerseRef: text}."""
    mapped = {}
    for key, text in verses.items():
        mapped[key if isinstance(key, VerseRef) else VerseRef(*key)] = text
    return Translation(tid, lang, variant, mapped)


def noun(lemma, verse, position=0, gender=Gender.masculine,
         number=Number.singular, case=Case.nominative, surface=None):
    return AnnotatedToken(verse=verse, position=position, surface=surface or lemma,
                          lemma=lemma, pos="noun", gender=gender, number=number, case=case)


def form(lemma, gender=Gender.masculine, number=Number.singular, case=Case.nominative):
    return LemmaForm(lemma, gender, number, case)
