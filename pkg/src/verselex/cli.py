"""Command-line pipeline driver.

Every stage of the pipeline is a subcommand reading declared input files
and writing declared outputs, so a full run is a short shell script and
any intermediate artifact can be inspected or regenerated in isolation.
A flat key-value config file can hold any long option (flags override
config). Exit status: 0 success, 1 parse/validation failure (diagnostic
names file and line), 2 configuration problems.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .analysis import (evaluation_report, export_explorer_graph, load_verdicts,
                       similarity_graph, threshold_sweep, write_explorer_json)
from .consensus import (consensus, paraphrase_report, translation_profiles,
                        write_consensus, write_paraphrase_report, read_consensus)
from .corpus import (load_annotations, load_corpus, select_lemma_forms,
                     write_annotations, write_corpus)
from .errors import ConfigError, VerselexError
from .extraction import extract, group_extractions_by_method, read_records, write_records
from .synth import NoiseSpec, SynthSpec, generate, paired_lexicon, write_truth
from .tokenizer import (DISTINCTNESS_RATIO, UNIGRAM_THRESHOLD, ScriptStructure,
                        TokenizationMethod, detect_script_structure)

log = logging.getLogger("verselex")

FORMAT_VERSION = 1

_SCRIPT_NAMES = {
    "word-markers": ScriptStructure.alphabet_word_markers,
    "logographic": ScriptStructure.non_alphabetic,
    "no-markers": ScriptStructure.alphabet_no_word_markers,
}

_STRUCTURE_LABELS = {
    ScriptStructure.alphabet_word_markers: "alphabet, word markers",
    ScriptStructure.non_alphabetic: "non-alphabetic",
    ScriptStructure.alphabet_no_word_markers: "alphabetic, no word markers",
}


def load_config_file(path) -> dict[str, str]:
    """Parse the flat `key = value` config format (# starts a comment)."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


@dataclass
class ProjectConfig:
    """Resolved settings for one invocation: CLI flags over config-file values."""

    args: argparse.Namespace
    file_values: dict[str, str] = field(default_factory=dict)

    def get(self, key: str, default=None, convert=str):
        attr = key.replace("-", "_")
        cli_value = getattr(self.args, attr, None)
        if cli_value is not None:
            return cli_value
        if key in self.file_values:
            try:
                return convert(self.file_values[key])
            except ValueError as exc:
                raise ConfigError(f"config value {key} = {self.file_values[key]!r}: {exc}") from None
        return default

    def get_path(self, key: str, required: bool = True) -> Optional[Path]:
        value = self.get(key)
        if value is None:
            if required:
                raise ConfigError(f"missing required option --{key} (or config key '{key}')")
            return None
        path = Path(value)
        return path

    def require_input(self, key: str) -> Path:
        path = self.get_path(key)
        if not path.exists():
            raise ConfigError(f"--{key}: no such file: {path}")
        return path

    def get_ratio(self, key: str, default: float) -> float:
        value = self.get(key, default, float)
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"--{key} must be in [0, 1], got {value}")
        return value

    def get_positive_int(self, key: str, default: int) -> int:
        value = self.get(key, default, int)
        if value < 1:
            raise ConfigError(f"--{key} must be >= 1, got {value}")
        return value


def _add_common_corpus_args(p: argparse.ArgumentParser):
    p.add_argument("--corpus", help="corpus file (TSV or JSONL)")
    p.add_argument("--corpus-format", choices=["tsv", "jsonl"], dest="corpus_format")
    p.add_argument("--annotations", help="annotation file (TSV or JSONL)")
    p.add_argument("--annotations-format", choices=["tsv", "jsonl"], dest="annotations_format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verselex",
        description="Noun-vocabulary extraction from verse-aligned parallel corpora.",
    )
    parser.add_argument("--version", action="version",
                        version=f"verselex {__version__} (format {FORMAT_VERSION})")
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate inputs and write normalized TSV copies")
    _add_common_corpus_args(p)
    p.add_argument("--out-dir", dest="out_dir")

    p = sub.add_parser("extract", help="align lemma forms against every translation")
    _add_common_corpus_args(p)
    p.add_argument("--method", choices=[m.value for m in TokenizationMethod])
    p.add_argument("--all-methods", action="store_true", default=None,
                   help="compute every tokenization method (the expensive, discard-later mode)")
    p.add_argument("--workers", type=int)
    p.add_argument("--count-empty-verses", action="store_true", default=None,
                   dest="count_empty_verses",
                   help="keep empty-text verses in the baseline denominator")
    p.add_argument("--out")

    p = sub.add_parser("detect-script", help="classify each language's written structure")
    p.add_argument("--extractions", help="extraction JSONL (needs all three methods)")
    p.add_argument("--corpus", help="corpus file, for translation-to-language mapping")
    p.add_argument("--corpus-format", choices=["tsv", "jsonl"], dest="corpus_format")
    p.add_argument("--unigram-threshold", type=int, dest="unigram_threshold")
    p.add_argument("--distinctness-ratio", type=float, dest="distinctness_ratio")
    p.add_argument("--out")

    p = sub.add_parser("consensus", help="merge per-translation records per language")
    p.add_argument("--extractions")
    p.add_argument("--corpus", help="corpus file, for translation-to-language mapping")
    p.add_argument("--corpus-format", choices=["tsv", "jsonl"], dest="corpus_format")
    p.add_argument("--method", choices=[m.value for m in TokenizationMethod],
                   help="use this method for every language")
    p.add_argument("--structures", help="detect-script output; picks each language's method")
    p.add_argument("--paraphrase-report", dest="paraphrase_report",
                   help="also write the literal-vs-paraphrase CSV here")
    p.add_argument("--count-ratio", type=float, dest="count_ratio")
    p.add_argument("--confidence-ratio", type=float, dest="confidence_ratio")
    p.add_argument("--out")

    p = sub.add_parser("similarity", help="Spearman similarity edges between languages")
    p.add_argument("--consensus")
    p.add_argument("--min-shared", type=int, dest="min_shared")
    p.add_argument("--out")

    p = sub.add_parser("export-explorer", help="write the explorer's nodes/links JSON")
    p.add_argument("--consensus")
    p.add_argument("--min-shared", type=int, dest="min_shared")
    p.add_argument("--top-k", type=int, dest="top_k")
    p.add_argument("--out")

    p = sub.add_parser("evaluate", help="score extractions against human verdicts")
    p.add_argument("--verdicts")
    p.add_argument("--consensus")
    p.add_argument("--group-by", choices=["language", "lemma"], dest="group_by")
    p.add_argument("--out-dir", dest="out_dir", help="write per-language/per-lemma CSVs here")

    p = sub.add_parser("tradeoff", help="vocabulary-size vs accuracy threshold sweep")
    p.add_argument("--consensus")
    p.add_argument("--verdicts")
    p.add_argument("--out")

    p = sub.add_parser("synth", help="generate a synthetic corpus with known truth")
    p.add_argument("--seed", type=int)
    p.add_argument("--verses", type=int)
    p.add_argument("--lemmas", type=int, help="noun count; each yields singular+plural forms")
    p.add_argument("--script", choices=sorted(_SCRIPT_NAMES))
    p.add_argument("--paraphrase-rate", type=float, dest="paraphrase_rate")
    p.add_argument("--synonym-rate", type=float, dest="synonym_rate")
    p.add_argument("--filler-vocab", type=int, dest="filler_vocab")
    p.add_argument("--occurrences", type=int)
    p.add_argument("--out-dir", dest="out_dir")

    return parser


def _load_inputs(cfg: ProjectConfig):
    corpus_path = cfg.require_input("corpus")
    corpus_format = cfg.get("corpus-format", "tsv")
    translations = load_corpus(corpus_path, corpus_format)
    ann_path = cfg.require_input("annotations")
    ann_format = cfg.get("annotations-format", "tsv")
    tokens = load_annotations(ann_path, ann_format)
    return translations, tokens


def _language_map(cfg: ProjectConfig) -> dict[str, str]:
    corpus_path = cfg.require_input("corpus")
    translations = load_corpus(corpus_path, cfg.get("corpus-format", "tsv"))
    return {t.translation_id: t.language_key for t in translations}


def cmd_ingest(cfg: ProjectConfig) -> int:
    translations, tokens = _load_inputs(cfg)
    out_dir = cfg.get_path("out-dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_corpus(translations, out_dir / "corpus.tsv")
    write_annotations(tokens, out_dir / "annotations.tsv")
    n_verses = sum(len(t.verses) for t in translations)
    log.info("ingested %d translations, %d verses, %d annotated tokens",
             len(translations), n_verses, len(tokens))
    return 0


def cmd_extract(cfg: ProjectConfig) -> int:
    translations, tokens = _load_inputs(cfg)
    selection = select_lemma_forms(tokens)
    stats = selection.stats
    log.info("funnel: %d noun lemmas -> %d lemmas / %d forms (min verses) "
             "-> %d lemmas / %d forms (singular+plural)",
             stats.noun_lemmas, stats.min_verses_lemmas, stats.min_verses_forms,
             stats.paired_lemmas, stats.paired_forms)

    if cfg.get("all-methods", False, _parse_bool):
        methods = list(TokenizationMethod)
    else:
        methods = [TokenizationMethod(cfg.get("method", "unigram"))]
    workers = cfg.get_positive_int("workers", os.cpu_count() or 1)
    count_empty = cfg.get("count-empty-verses", False, _parse_bool)

    records = []
    for translation in translations:
        for method in methods:
            found = extract(translation, selection.forms, selection.index, method,
                            count_empty_verses=count_empty, workers=workers)
            log.info("%s: %d of %d forms extracted (%s)",
                     translation.translation_id, len(found), len(selection.forms), method.value)
            records.extend(found)
    out = cfg.get_path("out")
    write_records(records, out)
    log.info("wrote %d records to %s", len(records), out)
    return 0


def cmd_detect_script(cfg: ProjectConfig) -> int:
    records = read_records(cfg.require_input("extractions"))
    languages = _language_map(cfg)
    unigram_threshold = cfg.get_positive_int("unigram-threshold", UNIGRAM_THRESHOLD)
    distinctness = cfg.get_ratio("distinctness-ratio", DISTINCTNESS_RATIO)

    by_language: dict[str, list] = {}
    for rec in records:
        try:
            by_language.setdefault(languages[rec.translation_id], []).append(rec)
        except KeyError:
            raise ConfigError(f"translation {rec.translation_id!r} not found in corpus") from None

    out = cfg.get_path("out")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("language\tstructure\tmethod\tu\tv\tw\n")
        for language in sorted(by_language):
            summaries = group_extractions_by_method(by_language[language])
            report = detect_script_structure(summaries, unigram_threshold, distinctness)
            fh.write(f"{language}\t{report.structure.value}\t{report.chosen_method.value}"
                     f"\t{report.u}\t{report.v}\t{report.w}\n")
            log.info("%s: %s -> %s (u=%d v=%d w=%d)", language,
                     _STRUCTURE_LABELS[report.structure], report.chosen_method.value,
                     report.u, report.v, report.w)
    return 0


def _read_structures(path) -> dict[str, TokenizationMethod]:
    methods: dict[str, TokenizationMethod] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("language\t"):
                continue
            cols = line.split("\t")
            methods[cols[0]] = TokenizationMethod(cols[2])
    return methods


def cmd_consensus(cfg: ProjectConfig) -> int:
    records = read_records(cfg.require_input("extractions"))
    languages = _language_map(cfg)
    method_override = cfg.get("method")
    structures_path = cfg.get_path("structures", required=False)
    if method_override and structures_path:
        raise ConfigError("--method and --structures are mutually exclusive")
    per_language_method = _read_structures(structures_path) if structures_path else {}

    by_language: dict[str, list] = {}
    for rec in records:
        try:
            by_language.setdefault(languages[rec.translation_id], []).append(rec)
        except KeyError:
            raise ConfigError(f"translation {rec.translation_id!r} not found in corpus") from None

    entries = []
    labelled_profiles = []
    count_ratio = cfg.get_ratio("count-ratio", 0.75)
    confidence_ratio = cfg.get_ratio("confidence-ratio", 0.75)
    for language in sorted(by_language):
        group = by_language[language]
        present = {rec.method for rec in group}
        if method_override:
            method = TokenizationMethod(method_override)
        elif language in per_language_method:
            method = per_language_method[language]
        elif len(present) == 1:
            method = next(iter(present))
        else:
            raise ConfigError(
                f"language {language!r} has records for several methods; "
                "pass --method or --structures")
        chosen = [rec for rec in group if rec.method == method]
        entries.extend(consensus(language, chosen))
        labelled_profiles.extend(paraphrase_report(
            translation_profiles(chosen), count_ratio, confidence_ratio))

    out = cfg.get_path("out")
    write_consensus(entries, out)
    log.info("wrote %d consensus entries to %s", len(entries), out)
    report_path = cfg.get_path("paraphrase-report", required=False)
    if report_path:
        write_paraphrase_report(labelled_profiles, report_path)
        log.info("wrote paraphrase report to %s", report_path)
    return 0


def cmd_similarity(cfg: ProjectConfig) -> int:
    entries = read_consensus(cfg.require_input("consensus"))
    edges = similarity_graph(entries, min_shared=cfg.get_positive_int("min-shared", 3))
    out = cfg.get_path("out")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("language_a,language_b,rho,n\n")
        for e in edges:
            fh.write(f"{e.language_a},{e.language_b},{e.rho!r},{e.n}\n")
    log.info("wrote %d similarity edges to %s", len(edges), out)
    return 0


def cmd_export_explorer(cfg: ProjectConfig) -> int:
    entries = read_consensus(cfg.require_input("consensus"))
    graph = export_explorer_graph(
        entries,
        min_shared=cfg.get_positive_int("min-shared", 3),
        top_k=cfg.get_positive_int("top-k", 5),
    )
    out = cfg.get_path("out")
    write_explorer_json(graph, out)
    log.info("wrote explorer graph (%d nodes, %d links) to %s",
             len(graph["nodes"]), len(graph["links"]), out)
    return 0


def cmd_evaluate(cfg: ProjectConfig) -> int:
    verdicts = load_verdicts(cfg.require_input("verdicts"))
    entries = read_consensus(cfg.require_input("consensus"))
    report = evaluation_report(verdicts, entries, group_by=cfg.get("group-by", "language"))

    print("per-language accuracy:")
    for row in report.per_language:
        print(f"  {row.key}\t{row.evaluated}\t{100 * row.proportion_correct:.1f}%")
    fit = report.fit
    p_text = "n/a" if fit.p_value is None else f"{fit.p_value:.2g}"
    print(f"fit ({report.group_by} groups, n={fit.n}): "
          f"proportion_correct = {fit.coefficient:.3f} * ln(median_confidence), "
          f"R^2 = {fit.r_squared:.3f}, p = {p_text}")

    out_dir = cfg.get_path("out-dir", required=False)
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "per_language.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("language,evaluated,proportion_correct\n")
            for row in report.per_language:
                fh.write(f"{row.key},{row.evaluated},{row.proportion_correct!r}\n")
        with open(out_dir / "per_lemma.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("lemma,evaluated,proportion_correct,rank\n")
            for row in report.per_lemma:
                fh.write(f"{row.key},{row.evaluated},{row.proportion_correct!r},{row.rank}\n")
    return 0


def cmd_tradeoff(cfg: ProjectConfig) -> int:
    entries = read_consensus(cfg.require_input("consensus"))
    verdicts_path = cfg.get_path("verdicts", required=False)
    verdicts = load_verdicts(verdicts_path) if verdicts_path else []
    points = threshold_sweep(entries, verdicts)
    out = cfg.get_path("out")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("threshold,vocab_size,accuracy\n")
        for pt in points:
            acc = "" if pt.accuracy is None else repr(pt.accuracy)
            threshold = "unbounded" if math.isinf(pt.threshold) else repr(pt.threshold)
            fh.write(f"{threshold},{pt.vocab_size},{acc}\n")
    log.info("wrote %d trade-off points to %s", len(points), out)
    return 0


def cmd_synth(cfg: ProjectConfig) -> int:
    script = _SCRIPT_NAMES[cfg.get("script", "word-markers")]
    lexicon = paired_lexicon(cfg.get_positive_int("lemmas", 50), script)
    spec = SynthSpec(
        seed=cfg.get("seed", 0, int),
        num_verses=cfg.get_positive_int("verses", 500),
        lexicon=lexicon,
        script=script,
        noise=NoiseSpec(
            paraphrase_rate=cfg.get_ratio("paraphrase-rate", 0.0),
            synonym_rate=cfg.get_ratio("synonym-rate", 0.0),
        ),
        filler_vocab_size=cfg.get_positive_int("filler-vocab", 50),
        occurrences_per_form=cfg.get_positive_int("occurrences", 4),
    )
    translation, annotations, truth = generate(spec)
    out_dir = cfg.get_path("out-dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_corpus([translation], out_dir / "corpus.tsv")
    write_annotations(annotations, out_dir / "annotations.tsv")
    write_truth(truth, out_dir / "truth.tsv")
    log.info("wrote synthetic corpus (%d verses, %d forms) to %s",
             spec.num_verses, len(lexicon), out_dir)
    return 0


def _parse_bool(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    if raw.lower() in ("1", "true", "yes", "on"):
        return True
    if raw.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


_COMMANDS = {
    "ingest": cmd_ingest,
    "extract": cmd_extract,
    "detect-script": cmd_detect_script,
    "consensus": cmd_consensus,
    "similarity": cmd_similarity,
    "export-explorer": cmd_export_explorer,
    "evaluate": cmd_evaluate,
    "tradeoff": cmd_tradeoff,
    "synth": cmd_synth,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = ProjectConfig(args=args, file_values=file_values)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except VerselexError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
