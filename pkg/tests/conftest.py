import os

import pytest

from wikistrata import (
    Analyzer,
    build_graph,
    build_index,
    build_vocabulary,
    leaf_sets,
    parse_corpus,
)

FIXTURE_PATH = os.path.join(os.path.dirname(__file__), "fixtures", "fixture_corpus.jsonl")


@pytest.fixture(scope="session")
def fixture_text():
    with open(FIXTURE_PATH, encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def fixture_store(fixture_text):
    return parse_corpus(fixture_text)


@pytest.fixture(scope="session")
def analyzer():
    return Analyzer()


@pytest.fixture(scope="session")
def fixture_vocab(fixture_store, analyzer):
    return build_vocabulary(fixture_store, analyzer, min_df=1)


@pytest.fixture(scope="session")
def fixture_index(fixture_store, analyzer, fixture_vocab):
    return build_index(fixture_store, analyzer, fixture_vocab)


@pytest.fixture(scope="session")
def fixture_graph(fixture_store):
    return build_graph(fixture_store)


@pytest.fixture(scope="session")
def fixture_leaf_sets(fixture_graph):
    return leaf_sets(fixture_graph)
