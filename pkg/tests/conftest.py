import pathlib

import pytest

from qir import corpus as corpus_mod

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus30():
    """The bundled 30-document two-topic corpus, ingested once."""
    raw = corpus_mod.read_jsonl(str(FIXTURES / "corpus_30.jsonl"))
    return corpus_mod.ingest(raw)
