"""Accuracy filters, evaluation scoring, and the language-similarity graph.

Everything here runs downstream of consensus: confidence-threshold
trade-offs, singular/plural shape checks, accuracy bookkeeping against
human verdicts, and Spearman correlation of per-form confidences between
language pairs (the data behind the interactive explorer).
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import stdtr

from .consensus import ConsensusEntry
from .corpus import Case, Gender, LemmaForm, Number
from .errors import ParseError, ReportError

__all__ = [
    "SimilarityEdge",
    "EvaluationVerdict",
    "TradeoffPoint",
    "RegressionFit",
    "EvaluationReport",
    "spearman_rho",
    "similarity_graph",
    "threshold_sweep",
    "levenshtein",
    "plural_consistency",
    "evaluation_report",
    "load_verdicts",
    "export_explorer_graph",
    "write_explorer_json",
]


@dataclass(frozen=True)
class SimilarityEdge:
    """Spearman correlation of shared-form confidences for one language pair."""

    language_a: str
    language_b: str
    rho: float
    n: int  # shared lemma forms entering the correlation


@dataclass(frozen=True)
class EvaluationVerdict:
    language_key: str
    lemma_form: LemmaForm
    extracted_token: str
    verdict: str  # "correct" | "incorrect", preserved as given even when wrong


@dataclass(frozen=True)
class TradeoffPoint:
    threshold: float
    vocab_size: int
    accuracy: Optional[float]  # None when no evaluated entries survive


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with tied values sharing their average rank."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="mergesort")
    ranks = np.empty(len(arr))
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman correlation with average-rank tie handling.

    Returns nan when either vector is constant (no ordering to correlate).
    """
    if len(xs) != len(ys):
        raise ValueError("vectors must have equal length")
    if len(xs) < 2:
        return math.nan
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    sx = rx - rx.mean()
    sy = ry - ry.mean()
    denom = math.sqrt(float(sx @ sx) * float(sy @ sy))
    if denom == 0.0:
        return math.nan
    return float(sx @ sy) / denom


def _confidence_vector(confidences: Sequence[float]) -> Optional[list[float]]:
    """Map unbounded confidences to one step above the vector's finite maximum."""
    finite = [c for c in confidences if math.isfinite(c)]
    if not finite:
        return None
    ceiling = max(finite) + 1.0
    return [c if math.isfinite(c) else ceiling for c in confidences]


def similarity_graph(entries: Iterable[ConsensusEntry], min_shared: int = 3) -> list[SimilarityEdge]:
    """All-pairs Spearman correlation over shared lemma-form confidences.

    Unbounded confidences take the top rank rather than being dropped.
    Pairs with fewer than `min_shared` shared forms, or with a degenerate
    (constant or all-unbounded) vector, yield no edge. Each pair appears
    once, with language_a < language_b.
    """
    by_language: dict[str, dict[LemmaForm, float]] = {}
    for entry in entries:
        by_language.setdefault(entry.language_key, {})[entry.lemma_form] = entry.cumulative_confidence

    languages = sorted(by_language)
    edges = []
    for i, lang_a in enumerate(languages):
        for lang_b in languages[i + 1:]:
            forms_a, forms_b = by_language[lang_a], by_language[lang_b]
            shared = sorted(forms_a.keys() & forms_b.keys(), key=LemmaForm.sort_key)
            if len(shared) < min_shared:
                continue
            xs = _confidence_vector([forms_a[f] for f in shared])
            ys = _confidence_vector([forms_b[f] for f in shared])
            if xs is None or ys is None:
                continue
            rho = spearman_rho(xs, ys)
            if math.isnan(rho):
                continue
            edges.append(SimilarityEdge(lang_a, lang_b, rho, len(shared)))
    return edges


def threshold_sweep(
    entries: Sequence[ConsensusEntry],
    verdicts: Sequence[EvaluationVerdict] = (),
) -> list[TradeoffPoint]:
    """Vocabulary size and accuracy at every distinct confidence cut-off.

    Thresholds start at 0 (everything retained) and step through the
    sorted distinct confidence values; entries with unbounded confidence
    survive every cut. Accuracy counts verdict rows whose (language, form,
    token) matches a retained entry.
    """
    verdict_rows: dict[tuple[str, LemmaForm, str], list[bool]] = {}
    for v in verdicts:
        key = (v.language_key, v.lemma_form, v.extracted_token)
        verdict_rows.setdefault(key, []).append(v.verdict == "correct")

    thresholds = [0.0] + sorted({e.cumulative_confidence for e in entries})
    points = []
    for threshold in thresholds:
        retained = [e for e in entries if e.cumulative_confidence >= threshold]
        outcomes: list[bool] = []
        for e in retained:
            outcomes.extend(verdict_rows.get((e.language_key, e.lemma_form, e.token), ()))
        accuracy = sum(outcomes) / len(outcomes) if outcomes else None
        points.append(TradeoffPoint(threshold, len(retained), accuracy))
    return points


def levenshtein(a: str, b: str) -> int:
    """Edit distance in code points (insert/delete/substitute, unit costs)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def plural_consistency(singular_token: str, plural_token: str,
                       max_distance_ratio: float = 0.5) -> str:
    """Flag singular/plural pairs that differ too much to be inflections.

    Returns "suspect" when the edit distance over the longer length
    exceeds `max_distance_ratio`, else "consistent".
    """
    if not singular_token or not plural_token:
        raise ValueError("both tokens must be non-empty")
    ratio = levenshtein(singular_token, plural_token) / max(len(singular_token), len(plural_token))
    return "suspect" if ratio > max_distance_ratio else "consistent"


@dataclass(frozen=True)
class RegressionFit:
    """Zero-intercept least squares of proportion-correct on ln(median confidence)."""

    coefficient: float
    r_squared: float
    p_value: Optional[float]
    n: int


@dataclass(frozen=True)
class GroupAccuracy:
    key: str
    evaluated: int
    proportion_correct: float
    rank: Optional[int] = None  # per-lemma only: 1 = least likely correct


@dataclass
class EvaluationReport:
    per_language: list[GroupAccuracy]
    per_lemma: list[GroupAccuracy]
    fit: RegressionFit
    group_by: str


def _proportions(verdicts: Sequence[EvaluationVerdict], key_fn) -> dict[str, tuple[int, float]]:
    totals: dict[str, list[int]] = {}
    for v in verdicts:
        bucket = totals.setdefault(key_fn(v), [0, 0])
        bucket[0] += 1
        bucket[1] += v.verdict == "correct"
    return {k: (t, c / t) for k, (t, c) in totals.items()}


def _competition_ranks(rows: list[tuple[str, int, float]]) -> dict[str, int]:
    # Ascending competition ranking: rank 1 is the lowest proportion,
    # ties share the first position of their group.
    ordered = sorted(rows, key=lambda r: (r[2], r[0]))
    ranks: dict[str, int] = {}
    for idx, (key, _, proportion) in enumerate(ordered):
        if idx > 0 and proportion == ordered[idx - 1][2]:
            ranks[key] = ranks[ordered[idx - 1][0]]
        else:
            ranks[key] = idx + 1
    return ranks


def _fit_through_origin(xs: Sequence[float], ys: Sequence[float]) -> RegressionFit:
    x = np.asarray(xs)
    y = np.asarray(ys)
    sxx = float(x @ x)
    if sxx == 0.0:
        raise ReportError("regression undefined: all predictors are zero")
    coefficient = float(x @ y) / sxx
    residuals = y - coefficient * x
    rss = float(residuals @ residuals)
    tss = float(y @ y)
    r_squared = 1.0 - rss / tss if tss > 0 else math.nan
    n = len(xs)
    if n < 2:
        p_value = None
    elif rss == 0.0:
        p_value = 0.0
    else:
        se = math.sqrt(rss / (n - 1) / sxx)
        t = coefficient / se
        p_value = 2.0 * float(stdtr(n - 1, -abs(t)))
    return RegressionFit(coefficient=coefficient, r_squared=r_squared, p_value=p_value, n=n)


def evaluation_report(
    verdicts: Sequence[EvaluationVerdict],
    entries: Sequence[ConsensusEntry],
    group_by: str = "language",
) -> EvaluationReport:
    """Accuracy tables plus the confidence-explains-correctness regression.

    Per-language and per-lemma proportion-correct tables are always built;
    the regression runs over the grouping selected by `group_by`, with the
    predictor ln(median cumulative confidence) taken over that group's
    consensus entries (groups whose median is unbounded are excluded from
    the fit, since their predictor is infinite).
    """
    if not verdicts:
        raise ReportError("no verdicts to evaluate")
    if group_by not in ("language", "lemma"):
        raise ValueError(f"group_by must be 'language' or 'lemma', got {group_by!r}")

    lang_props = _proportions(verdicts, lambda v: v.language_key)
    lemma_props = _proportions(verdicts, lambda v: v.lemma_form.lemma)

    per_language = [GroupAccuracy(k, n, p) for k, (n, p) in sorted(lang_props.items())]
    lemma_rows = [(k, n, p) for k, (n, p) in lemma_props.items()]
    ranks = _competition_ranks(lemma_rows)
    per_lemma = [GroupAccuracy(k, n, p, rank=ranks[k]) for k, (n, p) in sorted(lemma_props.items())]

    confidences: dict[str, list[float]] = {}
    for e in entries:
        key = e.language_key if group_by == "language" else e.lemma_form.lemma
        confidences.setdefault(key, []).append(e.cumulative_confidence)
    props = lang_props if group_by == "language" else lemma_props
    xs, ys = [], []
    for key, (_, proportion) in sorted(props.items()):
        if key not in confidences:
            continue
        median = statistics.median(confidences[key])
        if not math.isfinite(median) or median <= 0:
            continue
        xs.append(math.log(median))
        ys.append(proportion)
    if not xs:
        raise ReportError("no groups with finite median confidence to regress on")
    fit = _fit_through_origin(xs, ys)
    return EvaluationReport(per_language=per_language, per_lemma=per_lemma,
                            fit=fit, group_by=group_by)


_VERDICT_KEYS = ("language", "lemma", "gender", "number", "case", "token", "verdict")


def load_verdicts(path) -> list[EvaluationVerdict]:
    """Load evaluator verdicts from TSV: language, lemma, gender, number, case, token, verdict."""
    verdicts = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != len(_VERDICT_KEYS):
                raise ParseError(path, lineno, f"expected {len(_VERDICT_KEYS)} columns, got {len(cols)}")
            language, lemma, gender, number, case, token, verdict = cols
            if verdict not in ("correct", "incorrect"):
                raise ParseError(path, lineno, f"verdict must be correct/incorrect, got {verdict!r}")
            try:
                form = LemmaForm(lemma, Gender(gender), Number(number), Case(case))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            verdicts.append(EvaluationVerdict(language, form, token, verdict))
    return verdicts


def export_explorer_graph(
    entries: Sequence[ConsensusEntry],
    min_shared: int = 3,
    top_k: int = 5,
) -> dict:
    """Build the explorer's node/link JSON document.

    A link survives truncation when it ranks among the `top_k` strongest
    (largest rho) links of either endpoint, mirroring the display rule of
    showing each language only its closest neighbours.
    """
    lemma_counts: dict[str, int] = {}
    for e in entries:
        lemma_counts[e.language_key] = lemma_counts.get(e.language_key, 0) + 1
    edges = similarity_graph(entries, min_shared=min_shared)

    incident: dict[str, list[SimilarityEdge]] = {}
    for edge in edges:
        incident.setdefault(edge.language_a, []).append(edge)
        incident.setdefault(edge.language_b, []).append(edge)
    kept: set[tuple[str, str]] = set()
    for lang, lang_edges in incident.items():
        lang_edges.sort(key=lambda e: (-e.rho, e.language_a, e.language_b))
        for edge in lang_edges[:top_k]:
            kept.add((edge.language_a, edge.language_b))

    nodes = [{"id": lang, "label": lang, "lemma_count": lemma_counts[lang]}
             for lang in sorted(lemma_counts)]
    links = [{"source": e.language_a, "target": e.language_b, "rho": e.rho, "n": e.n}
             for e in edges if (e.language_a, e.language_b) in kept]
    return {"nodes": nodes, "links": links}


def write_explorer_json(graph: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(graph, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
