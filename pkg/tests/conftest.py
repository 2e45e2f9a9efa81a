import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from verselex.corpus import load_annotations, load_corpus, select_lemma_forms

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def worked_example():
    """The committed 2,862-verse fixture mirroring the tomb/garden/laid example."""
    translations = load_corpus(DATA_DIR / "worked_example" / "corpus.tsv")
    tokens = load_annotations(DATA_DIR / "worked_example" / "annotations.tsv")
    selection = select_lemma_forms(tokens)
    return translations[0], tokens, selection


@pytest.fixture(scope="session")
def worked_example_paths():
    return (DATA_DIR / "worked_example" / "corpus.tsv",
            DATA_DIR / "worked_example" / "annotations.tsv")
