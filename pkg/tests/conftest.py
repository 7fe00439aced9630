from pathlib import Path

import pytest

import capweight as cw

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def tiny_corpus():
    return cw.load_corpus(FIXTURES / "tiny.jsonl")


@pytest.fixture(scope="session")
def hyp_corpus():
    return cw.load_corpus(FIXTURES / "hyp.jsonl")


@pytest.fixture(scope="session")
def dense_store():
    return cw.read_store(FIXTURES / "tiny.wemb")


@pytest.fixture(scope="session")
def sparse_store():
    return cw.read_store(FIXTURES / "sparse.wemb")


@pytest.fixture(scope="session")
def hyp_store():
    return cw.read_store(FIXTURES / "hyp.wemb")
