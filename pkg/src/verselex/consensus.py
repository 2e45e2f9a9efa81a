"""Language-level merging of extraction records across translations.

Each translation of a language votes for the token it extracted per lemma
form; the most-voted token wins, vote ties fall back to the larger product
of supporter confidences, and anything still tied is abstained from. The
same per-translation summaries also feed a literal-vs-paraphrase check:
a translation whose extraction count and median confidence both fall well
below its language's best is flagged as a likely paraphrase.
"""

from __future__ import annotations

import json
import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import Case, Gender, LemmaForm, Number
from .errors import ParseError
from .extraction import UNBOUNDED, ExtractionRecord, _confidence_to_json

__all__ = [
    "ConsensusEntry",
    "TranslationProfile",
    "consensus",
    "translation_profiles",
    "paraphrase_report",
    "write_consensus",
    "read_consensus",
    "write_paraphrase_report",
]

COUNT_RATIO = 0.75
CONFIDENCE_RATIO = 0.75


@dataclass(frozen=True)
class ConsensusEntry:
    language_key: str
    lemma_form: LemmaForm
    token: str
    cumulative_confidence: float  # product of supporter confidences; inf if any unbounded
    supporting_translations: int


@dataclass(frozen=True)
class TranslationProfile:
    translation_id: str
    lemma_count: int
    median_confidence: float  # unbounded records enter the order statistic as +inf


def consensus(language_key: str, records: Iterable[ExtractionRecord]) -> list[ConsensusEntry]:
    """Merge one language's records into per-form consensus entries.

    Callers pass records already restricted to the language (and to one
    tokenization method). A single translation yields the pseudo-consensus
    passthrough of its own answers.
    """
    by_form: dict[LemmaForm, list[ExtractionRecord]] = {}
    for rec in records:
        by_form.setdefault(rec.lemma_form, []).append(rec)

    entries = []
    for form in sorted(by_form, key=LemmaForm.sort_key):
        votes = by_form[form]
        tally = Counter(rec.token for rec in votes)
        best_count = max(tally.values())
        leaders = sorted(t for t, c in tally.items() if c == best_count)
        if len(leaders) > 1:
            # Vote tie: prefer the token whose supporters are jointly more
            # confident; abstain only if that is tied too.
            weights = {t: _product(r.confidence for r in votes if r.token == t) for t in leaders}
            top = max(weights.values())
            leaders = [t for t in leaders if weights[t] == top]
            if len(leaders) > 1:
                continue
        token = leaders[0]
        supporters = [r for r in votes if r.token == token]
        entries.append(ConsensusEntry(
            language_key=language_key,
            lemma_form=form,
            token=token,
            cumulative_confidence=_product(r.confidence for r in supporters),
            supporting_translations=len(supporters),
        ))
    return entries


def _product(values: Iterable[float]) -> float:
    out = 1.0
    for v in values:
        out *= v
    return out


def translation_profiles(records: Iterable[ExtractionRecord]) -> list[TranslationProfile]:
    """Summarize each translation's extraction yield and typical confidence."""
    by_tid: dict[str, list[float]] = {}
    for rec in records:
        by_tid.setdefault(rec.translation_id, []).append(rec.confidence)
    return [TranslationProfile(tid, len(confs), statistics.median(confs))
            for tid, confs in sorted(by_tid.items())]


def paraphrase_report(
    profiles: Sequence[TranslationProfile],
    count_ratio: float = COUNT_RATIO,
    confidence_ratio: float = CONFIDENCE_RATIO,
) -> list[tuple[TranslationProfile, str]]:
    """Label each translation of one language literal or paraphrase-suspect.

    A translation is suspect only when both its lemma count and its median
    confidence fall below the configured fractions of the language's
    maxima (the finite maximum, for confidence). With fewer than two
    profiles there is no comparator and everything is literal.
    """
    if len(profiles) < 2:
        return [(p, "literal") for p in profiles]
    max_count = max(p.lemma_count for p in profiles)
    finite_medians = [p.median_confidence for p in profiles if math.isfinite(p.median_confidence)]
    max_median = max(finite_medians) if finite_medians else None
    labelled = []
    for p in profiles:
        suspect = (
            p.lemma_count < count_ratio * max_count
            and max_median is not None
            and p.median_confidence < confidence_ratio * max_median
        )
        labelled.append((p, "paraphrase-suspect" if suspect else "literal"))
    return labelled


def entry_to_dict(entry: ConsensusEntry) -> dict:
    form = entry.lemma_form
    return {
        "language": entry.language_key,
        "lemma": form.lemma,
        "gender": form.gender.value,
        "number": form.number.value,
        "case": form.case.value,
        "token": entry.token,
        "cumulative_confidence": _confidence_to_json(entry.cumulative_confidence),
        "supporters": entry.supporting_translations,
    }


def write_consensus(entries: Iterable[ConsensusEntry], path) -> None:
    ordered = sorted(entries, key=lambda e: (e.language_key,) + e.lemma_form.sort_key())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in ordered:
            fh.write(json.dumps(entry_to_dict(entry), ensure_ascii=False) + "\n")


def read_consensus(path) -> list[ConsensusEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                conf = obj["cumulative_confidence"]
                entries.append(ConsensusEntry(
                    language_key=obj["language"],
                    lemma_form=LemmaForm(obj["lemma"], Gender(obj["gender"]),
                                         Number(obj["number"]), Case(obj["case"])),
                    token=obj["token"],
                    cumulative_confidence=math.inf if conf == "unbounded" else float(conf),
                    supporting_translations=int(obj["supporters"]),
                ))
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ParseError(path, lineno, f"bad consensus entry ({exc})") from None
    return entries


def write_paraphrase_report(labelled: Iterable[tuple[TranslationProfile, str]], path) -> None:
    """CSV of the raw scatter (lemma_count, median_confidence) plus labels."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("translation_id,lemma_count,median_confidence,label\n")
        for profile, label in labelled:
            med = ("unbounded" if math.isinf(profile.median_confidence)
                   else repr(profile.median_confidence))
            fh.write(f"{profile.translation_id},{profile.lemma_count},{med},{label}\n")
