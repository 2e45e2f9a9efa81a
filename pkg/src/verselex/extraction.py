"""Per-form token alignment via exact one-sided binomial tests.

For each (translation, lemma form) pair the engine partitions captured
verses into V (form present) and U (lemma absent in every form), scores
every token of V's verses by how improbably often it lands in V under a
pooled per-verse baseline, and keeps the unique least-likely-by-chance
token. All p-value work happens on -log10 scale so that scores far below
the double-precision underflow limit stay finite and ordered.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus import Case, Gender, LemmaForm, LemmaOccurrenceIndex, Number, Translation, VerseRef
from .errors import ParseError
from .tokenizer import TokenizationMethod, tokenize_verse

__all__ = [
    "UNBOUNDED",
    "ContingencyTable",
    "CandidateScore",
    "ExtractionRecord",
    "binom_sf_log10",
    "build_verse_sets",
    "score_candidates",
    "extract",
    "write_records",
    "read_records",
    "group_extractions_by_method",
]

# Confidence when there is no second candidate to compare against. +inf
# sorts above every finite ratio and is absorbing under multiplication,
# which is exactly the behaviour language-level consensus needs.
UNBOUNDED = math.inf

_LN10 = math.log(10.0)
_LN_HALF = math.log(0.5)

# lgamma(k+1) memo; the binomial loop reads it millions of times.
_LGAMMA: list[float] = [0.0, 0.0]


def _lgamma_table(n: int) -> list[float]:
    while len(_LGAMMA) <= n:
        _LGAMMA.append(math.lgamma(len(_LGAMMA) + 1))
    return _LGAMMA


def _log_sum_exp(terms: list[float]) -> float:
    m = max(terms)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(t - m) for t in terms))


def binom_sf_log10(x: int, n: int, p0: float) -> float:
    """Return -log10 P(Binomial(n, p0) >= x).

    The tail is summed in log space from log-gamma binomial coefficients,
    so tiny p-values never underflow. When the p-value exceeds 1/2 the
    complement tail is summed instead and folded through log1p, keeping
    relative accuracy on the log value even for p-values barely below 1.
    """
    if n < 1 or not (0 <= x <= n):
        raise ValueError(f"require 1 <= n and 0 <= x <= n, got x={x}, n={n}")
    if not (0.0 <= p0 <= 1.0):
        raise ValueError(f"baseline probability out of [0, 1]: {p0}")
    if x == 0:
        return 0.0
    if p0 == 0.0:
        return math.inf
    if p0 == 1.0:
        return 0.0

    log_p = math.log(p0)
    log_q = math.log1p(-p0)
    lg = _lgamma_table(n + 1)
    lg_n1 = lg[n]

    def log_pmf(k: int) -> float:
        return lg_n1 - lg[k] - lg[n - k] + k * log_p + (n - k) * log_q

    log_upper = _log_sum_exp([log_pmf(k) for k in range(x, n + 1)])
    if log_upper >= _LN_HALF:
        # p > 1/2: -log(p) is small, so compute it from the lower tail.
        log_lower = _log_sum_exp([log_pmf(k) for k in range(0, x)])
        return -math.log1p(-math.exp(log_lower)) / _LN10
    return -log_upper / _LN10


def _binom_sf_exact(x: int, n: int, p0: Fraction) -> Fraction:
    """Exact rational upper tail; used only to adjudicate float-score collisions."""
    if x == 0 or p0 == 1:
        return Fraction(1)
    if p0 == 0:
        return Fraction(0)
    q = 1 - p0
    pmf = q ** n  # k = 0
    tail = Fraction(0)
    for k in range(0, n + 1):
        if k >= x:
            tail += pmf
        if k < n:
            pmf = pmf * (n - k) * p0 / ((k + 1) * q)
    return tail


@dataclass(frozen=True)
class ContingencyTable:
    """Per-verse presence counts of one token, split by lemma-verse membership."""

    x: int  # V verses containing the token
    y: int  # V verses lacking it
    z: int  # U verses containing it
    w: int  # U verses lacking it

    def __post_init__(self):
        if min(self.x, self.y, self.z, self.w) < 0:
            raise ValueError(f"negative contingency count: {self}")

    @property
    def n_lemma_verses(self) -> int:
        return self.x + self.y

    @property
    def n_baseline_verses(self) -> int:
        return self.z + self.w

    @property
    def baseline_probability(self) -> float:
        return (self.x + self.z) / (self.n_lemma_verses + self.n_baseline_verses)


@dataclass(frozen=True)
class CandidateScore:
    token: str
    neg_log10_p: float
    table: ContingencyTable


@dataclass(frozen=True)
class ExtractionRecord:
    """Winning token for one (translation, lemma form, method) cell."""

    translation_id: str
    lemma_form: LemmaForm
    method: TokenizationMethod
    token: str
    best_neg_log10_p: float
    second_neg_log10_p: float  # 0 when there was no second candidate
    confidence: float  # best/second, or UNBOUNDED when second is 0

    def __post_init__(self):
        if self.second_neg_log10_p > self.best_neg_log10_p:
            raise ValueError("second-best score exceeds best score")

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.confidence)


def build_verse_sets(
    translation: Translation,
    form: LemmaForm,
    index: LemmaOccurrenceIndex,
    count_empty_verses: bool = False,
) -> tuple[set[VerseRef], set[VerseRef]]:
    """Split the translation's captured verses into (V, U) for one form.

    V holds captured verses where the form itself occurs; U holds captured
    verses where the lemma occurs in no form at all. Verses where the
    lemma appears only in other forms belong to neither. Empty-text verses
    are excluded from consideration unless `count_empty_verses` is set.
    """
    if count_empty_verses:
        captured = set(translation.verses)
    else:
        captured = {ref for ref, text in translation.verses.items() if text}
    v = captured & index.form_to_verses.get(form, set())
    u = captured - index.lemma_to_verses.get(form.lemma, set())
    return v, u


def _score_from_presence(
    candidates: Iterable[str],
    x_counts: Counter,
    z_counts,
    n_v: int,
    n_u: int,
) -> list[CandidateScore]:
    n_total = n_v + n_u
    scores = []
    for token in candidates:
        x = x_counts[token]
        z = z_counts[token]
        table = ContingencyTable(x=x, y=n_v - x, z=z, w=n_u - z)
        p0 = (x + z) / n_total
        scores.append(CandidateScore(token, binom_sf_log10(x, n_v, p0), table))
    scores.sort(key=lambda s: (-s.neg_log10_p, s.token))
    return scores


def score_candidates(
    translation: Translation,
    form: LemmaForm,
    method: TokenizationMethod,
    v_set: set[VerseRef],
    u_set: set[VerseRef],
) -> list[CandidateScore]:
    """Score every token appearing in V against the pooled verse-presence baseline.

    Presence is per verse: a token occurring five times in one verse counts
    once. Baseline p0 = (X+Z)/(|V|+|U|). Result is sorted by descending
    score with lexicographic token order breaking listing ties; equal
    scores still mean "no winner" to the caller.
    """
    if not v_set:
        return []
    v_tokens = {ref: frozenset(tokenize_verse(translation.verses[ref], method)) for ref in v_set}
    x_counts: Counter = Counter()
    for toks in v_tokens.values():
        x_counts.update(toks)
    z_counts: Counter = Counter()
    for ref in u_set:
        toks = frozenset(tokenize_verse(translation.verses[ref], method))
        for t in toks:
            if t in x_counts:
                z_counts[t] += 1
    return _score_from_presence(sorted(x_counts), x_counts, z_counts, len(v_set), len(u_set))


class _PreparedTranslation:
    """Tokenized verse sets and corpus-wide presence counts, built once per method."""

    def __init__(self, translation: Translation, method: TokenizationMethod,
                 count_empty_verses: bool):
        if count_empty_verses:
            refs = list(translation.verses)
        else:
            refs = [ref for ref, text in translation.verses.items() if text]
        self.captured = frozenset(refs)
        self.verse_tokens = {ref: frozenset(tokenize_verse(translation.verses[ref], method))
                             for ref in refs}
        self.presence: Counter = Counter()
        for toks in self.verse_tokens.values():
            self.presence.update(toks)


def _extract_form(
    translation: Translation,
    prepared: _PreparedTranslation,
    form: LemmaForm,
    index: LemmaOccurrenceIndex,
    method: TokenizationMethod,
) -> Optional[ExtractionRecord]:
    v_set = prepared.captured & index.form_to_verses.get(form, set())
    if not v_set:
        return None
    lemma_captured = prepared.captured & index.lemma_to_verses.get(form.lemma, set())
    n_v = len(v_set)
    n_u = len(prepared.captured) - len(lemma_captured)

    x_counts: Counter = Counter()
    for ref in v_set:
        x_counts.update(prepared.verse_tokens[ref])
    # Z = corpus-wide presence minus presence in any lemma-bearing verse;
    # equivalent to counting over U without materializing it.
    z_counts = {}
    for token in x_counts:
        in_lemma = sum(1 for ref in lemma_captured if token in prepared.verse_tokens[ref])
        z_counts[token] = prepared.presence[token] - in_lemma
    scores = _score_from_presence(sorted(x_counts), x_counts, z_counts, n_v, n_u)
    if not scores:
        return None

    winner = _pick_winner(scores, n_v, n_u)
    if winner is None:
        return None
    second = max((s.neg_log10_p for s in scores if s is not winner), default=0.0)
    confidence = winner.neg_log10_p / second if second > 0.0 else UNBOUNDED
    return ExtractionRecord(
        translation_id=translation.translation_id,
        lemma_form=form,
        method=method,
        token=winner.token,
        best_neg_log10_p=winner.neg_log10_p,
        second_neg_log10_p=second,
        confidence=confidence,
    )


def _pick_winner(scores: list[CandidateScore], n_v: int, n_u: int) -> Optional[CandidateScore]:
    """Unique best candidate, or None on a tie.

    Candidates tie iff their contingency tables are identical. Distinct
    tables that collide on the float log score are ranked by exact
    rational tail probabilities, so a spurious float tie never suppresses
    a real winner.
    """
    top = scores[0].neg_log10_p
    group = [s for s in scores if s.neg_log10_p == top]
    if len(group) == 1:
        return group[0]
    if len({s.table for s in group}) == 1:
        return None
    n_total = n_v + n_u
    exacts = [(_binom_sf_exact(s.table.x, n_v, Fraction(s.table.x + s.table.z, n_total)), s)
              for s in group]
    best = min(p for p, _ in exacts)
    winners = [s for p, s in exacts if p == best]
    return winners[0] if len(winners) == 1 else None


def _record_sort_key(rec: ExtractionRecord):
    return (rec.translation_id,) + rec.lemma_form.sort_key() + (rec.method.value,)


def extract(
    translation: Translation,
    forms: Sequence[LemmaForm],
    index: LemmaOccurrenceIndex,
    method: TokenizationMethod,
    count_empty_verses: bool = False,
    workers: int = 1,
) -> list[ExtractionRecord]:
    """Align every lemma form against one translation with one tokenizer.

    Scoring is pure over immutable inputs, so forms fan out across a
    bounded thread pool; the output is sorted by a deterministic key and
    is identical for any worker count. Forms with no captured verses, or
    whose best score is tied, contribute no record.
    """
    prepared = _PreparedTranslation(translation, method, count_empty_verses)

    def task(form: LemmaForm) -> Optional[ExtractionRecord]:
        return _extract_form(translation, prepared, form, index, method)

    if workers <= 1:
        results = [task(f) for f in forms]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, forms))
    records = [r for r in results if r is not None]
    records.sort(key=_record_sort_key)
    return records


def _confidence_to_json(value: float):
    return "unbounded" if math.isinf(value) else value


def record_to_dict(rec: ExtractionRecord) -> dict:
    form = rec.lemma_form
    return {
        "translation_id": rec.translation_id,
        "lemma": form.lemma,
        "gender": form.gender.value,
        "number": form.number.value,
        "case": form.case.value,
        "method": rec.method.value,
        "token": rec.token,
        "best_nlp": rec.best_neg_log10_p,
        "second_nlp": rec.second_neg_log10_p,
        "confidence": _confidence_to_json(rec.confidence),
    }


def write_records(records: Iterable[ExtractionRecord], path) -> None:
    """Write extraction records as JSONL, one record per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), ensure_ascii=False) + "\n")


def read_records(path) -> list[ExtractionRecord]:
    path = Path(path)
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                form = LemmaForm(obj["lemma"], Gender(obj["gender"]),
                                 Number(obj["number"]), Case(obj["case"]))
                conf = obj["confidence"]
                records.append(ExtractionRecord(
                    translation_id=obj["translation_id"],
                    lemma_form=form,
                    method=TokenizationMethod(obj["method"]),
                    token=obj["token"],
                    best_neg_log10_p=float(obj["best_nlp"]),
                    second_neg_log10_p=float(obj["second_nlp"]),
                    confidence=math.inf if conf == "unbounded" else float(conf),
                ))
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ParseError(path, lineno, f"bad extraction record ({exc})") from None
    return records


def group_extractions_by_method(
    records: Iterable[ExtractionRecord],
) -> dict[str, dict[TokenizationMethod, list[str]]]:
    """Arrange records as translation_id -> method -> extracted tokens.

    This is the summary shape script-structure detection consumes.
    """
    grouped: dict[str, dict[TokenizationMethod, list[str]]] = {}
    for rec in sorted(records, key=_record_sort_key):
        grouped.setdefault(rec.translation_id, {}).setdefault(rec.method, []).append(rec.token)
    return grouped
