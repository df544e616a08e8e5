import sys
from pathlib import Path

import pytest

from bilingo.concept_linker import link
from bilingo.corpus_ingest import IngestConfig, parse_conllu_dir
from bilingo.lexicon_ingest import LexiconConfig, parse_lexicon_file

FIXTURES = Path(__file__).parent / "fixtures"
SYNTHETIC_TREEBANK = FIXTURES / "treebank_synthetic"
TABLE1_TREEBANK = FIXTURES / "treebank_table1"
LEXICON = FIXTURES / "lexicon.tsv"
COURSE_CONFIG = FIXTURES / "course_config.json"
GOLDEN_PACK = FIXTURES / "golden_pack.json"


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        sys.stderr.write(f"ACCEPTANCE {name}: {status}\n")


@pytest.fixture(scope="session")
def synthetic_sentences():
    return parse_conllu_dir(SYNTHETIC_TREEBANK, IngestConfig())


@pytest.fixture(scope="session")
def table1_sentences():
    return parse_conllu_dir(TABLE1_TREEBANK, IngestConfig())


@pytest.fixture(scope="session")
def lexicon_entries():
    return parse_lexicon_file(LEXICON, LexiconConfig())


@pytest.fixture(scope="session")
def synthetic_corpus(synthetic_sentences, lexicon_entries):
    return link(synthetic_sentences, lexicon_entries)


@pytest.fixture(scope="session")
def table1_corpus(table1_sentences, lexicon_entries):
    return link(table1_sentences, lexicon_entries)
