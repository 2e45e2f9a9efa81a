#!/usr/bin/env python3
"""Regenerate the worked-example fixture under tests/data/worked_example/.

One English translation ("web") with 2,862 captured verses. The lemma
under test occurs in 35 annotated verses: 2 nominative-singular verses
(the real public-domain World English Bible text of John 19:41-42),
31 captured verses in other case/number forms, and 2 verses absent from
the corpus, as if the scrape had missed them. The 2,829 remaining verses
carry synthetic text with pinned per-verse token counts, so the baseline
probabilities of "tomb", "garden", "laid" and "the" come out exactly at
the documented values (6, 4, 29 and 1,916 of 2,831 eligible verses).

The output is committed; rerun only if the layout needs to change.
"""

import itertools
import random
import unicodedata
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data" / "worked_example"

LEMMA = unicodedata.normalize("NFC", "μνημεῖον")

JHN_19_41 = ("Now in the place where he was crucified there was a garden. "
             "In the garden was a new tomb in which no man had ever yet been laid.")
JHN_19_42 = ("Then because of the Jews' Preparation Day "
             "(for the tomb was near at hand) they laid Jesus there.")

# Verse-presence targets over the 2,831 eligible verses (the two lemma
# verses plus the 2,829 baseline verses). The four starred counts are
# load-bearing; the rest just shape a plausible frequency profile.
TOKEN_TOTALS = {
    "the": 1916,        # *
    "tomb": 6,          # *
    "laid": 29,         # *
    "garden": 4,        # *
    ".": 2400,
    "was": 700,
    "there": 280,
    "in": 1200,
    "a": 1100,
    "of": 980,
    "he": 900,
    "they": 610,
    "Jesus": 590,
    "for": 420,
    "had": 330,
    "at": 260,
    "which": 240,
    "been": 190,
    "man": 160,
    "'": 150,
    "where": 130,
    "Then": 120,
    "no": 110,
    "because": 95,
    "(": 90,
    ")": 90,
    "Now": 85,
    "Jews": 70,
    "In": 60,
    "Day": 55,
    "hand": 50,
    "place": 45,
    "yet": 40,
    "new": 35,
    "near": 30,
    "ever": 25,
    "crucified": 15,
    "Preparation": 5,
}

# Other-form occurrences: (case, number, count). Two of these verses are
# withheld from the corpus below.
OTHER_FORMS = [
    ("accusative", "singular", 8),
    ("genitive", "singular", 6),
    ("dative", "singular", 4),
    ("nominative", "plural", 5),
    ("accusative", "plural", 6),
    ("genitive", "plural", 2),
    ("dative", "plural", 2),
]


def unigram_presence(text):
    import sys
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
    from verselex.tokenizer import TokenizationMethod, tokenize_verse
    return set(tokenize_verse(text, TokenizationMethod.unigram))


def all_refs():
    for book, chapters in [("MAT", 28), ("MRK", 16), ("LUK", 24), ("JHN", 21)]:
        for chapter in range(1, chapters + 1):
            for verse in range(1, 41):
                yield (book, chapter, verse)


def main():
    rng = random.Random(20220519)
    refs = list(itertools.islice(all_refs(), 2862))
    missing_refs = refs[-2:]           # annotated but never scraped
    pool = refs[:2860]

    other_form_refs = sorted(rng.sample(range(len(pool)), 31))
    other_set = set(other_form_refs)
    baseline_idx = [i for i in range(len(pool)) if i not in other_set]
    assert len(baseline_idx) == 2829

    v41 = unigram_presence(JHN_19_41)
    v42 = unigram_presence(JHN_19_42)
    x_counts = {tok: (tok in v41) + (tok in v42) for tok in TOKEN_TOTALS}
    for tok, total in TOKEN_TOTALS.items():
        assert x_counts[tok] >= 1, f"{tok!r} is not a candidate token"
        assert total >= x_counts[tok], f"{tok!r} total below its V count"

    verse_tokens = {i: [] for i in baseline_idx}
    for tok, total in sorted(TOKEN_TOTALS.items()):
        for i in rng.sample(baseline_idx, total - x_counts[tok]):
            verse_tokens[i].append(tok)

    rows = []
    for i in baseline_idx:
        book, chapter, verse = pool[i]
        tokens = list(verse_tokens[i])
        rng.shuffle(tokens)
        tokens.append(f"loc{i:04d}")   # unique filler keeps every verse non-empty
        rows.append((book, chapter, verse, " ".join(tokens)))
    for i in other_form_refs:
        book, chapter, verse = pool[i]
        rows.append((book, chapter, verse, f"and they came unto the tombs site{i:04d}"))
    rows.append(("JHN", 19, 41, JHN_19_41))
    rows.append(("JHN", 19, 42, JHN_19_42))

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    order = {"MAT": 0, "MRK": 1, "LUK": 2, "JHN": 3}
    rows.sort(key=lambda r: (order[r[0]], r[1], r[2]))
    with open(OUT_DIR / "corpus.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for book, chapter, verse, text in rows:
            fh.write(f"web\teng\t\t{book}\t{chapter}\t{verse}\t{text}\n")

    ann_rows = [
        ("JHN", 19, 41, "nominative", "singular"),
        ("JHN", 19, 42, "nominative", "singular"),
    ]
    captured_iter = iter(other_form_refs)
    withheld = [("accusative", "singular"), ("nominative", "plural")]
    for case, number, count in OTHER_FORMS:
        take = count - sum(1 for c, n in withheld if (c, n) == (case, number))
        for _ in range(take):
            book, chapter, verse = pool[next(captured_iter)]
            ann_rows.append((book, chapter, verse, case, number))
    for (case, number), (book, chapter, verse) in zip(withheld, missing_refs):
        ann_rows.append((book, chapter, verse, case, number))
    assert len(ann_rows) == 35

    ann_rows.sort(key=lambda r: (order[r[0]], r[1], r[2]))
    with open(OUT_DIR / "annotations.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for book, chapter, verse, case, number in ann_rows:
            fh.write("\t".join([book, str(chapter), str(verse), "0", LEMMA, LEMMA,
                                "noun", "neuter", number, case]) + "\n")

    print(f"wrote {len(rows)} corpus rows and {len(ann_rows)} annotation rows to {OUT_DIR}")


if __name__ == "__main__":
    main()
