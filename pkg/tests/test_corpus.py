import json

import pytest

from wikistrata.corpus import (
    CorpusError,
    FilterConfig,
    filter_pages,
    gen_synthetic_wiki,
    parse_corpus,
    serialize_corpus,
)
from wikistrata.textproc import Analyzer


def test_minimal_valid_corpus():
    store = parse_corpus(
        '{"kind":"meta","root":0,"version":1}\n'
        '{"kind":"category","id":0,"title":"Root","parents":[]}\n'
    )
    assert store.n_pages == 0
    assert len(store.categories) == 1


def test_dangling_category_reference_names_the_id():
    text = (
        '{"kind":"meta","root":0,"version":1}\n'
        '{"kind":"category","id":0,"title":"Root","parents":[]}\n'
        '{"kind":"page","id":1,"title":"P","text":"x","categories":[99],"links":[]}\n'
    )
    with pytest.raises(CorpusError, match="99"):
        parse_corpus(text)


def test_malformed_line_reports_line_number():
    text = '{"kind":"meta","root":0,"version":1}\nnot json\n'
    with pytest.raises(CorpusError, match="line 2"):
        parse_corpus(text)


def test_duplicate_page_id_rejected():
    text = (
        '{"kind":"meta","root":0,"version":1}\n'
        '{"kind":"category","id":0,"title":"Root","parents":[]}\n'
        '{"kind":"page","id":1,"title":"A","text":"x","categories":[],"links":[]}\n'
        '{"kind":"page","id":1,"title":"B","text":"y","categories":[],"links":[]}\n'
    )
    with pytest.raises(CorpusError, match="duplicate page id 1"):
        parse_corpus(text)


def test_missing_root_rejected():
    text = '{"kind":"meta","root":7,"version":1}\n{"kind":"category","id":0,"title":"R","parents":[]}\n'
    with pytest.raises(CorpusError, match="root"):
        parse_corpus(text)


def test_fixture_counts_match_raw_line_scan(fixture_text, fixture_store):
    # Independent oracle: count records straight off the file lines.
    n_pages = n_cats = n_memberships = 0
    for line in fixture_text.splitlines():
        rec = json.loads(line)
        if rec["kind"] == "page":
            n_pages += 1
            n_memberships += len(set(rec["categories"]))
        elif rec["kind"] == "category":
            n_cats += 1
    assert fixture_store.n_pages == n_pages == 8
    assert len(fixture_store.categories) == n_cats == 5
    assert sum(len(p.category_ids) for p in fixture_store.pages) == n_memberships == 13


def test_roundtrip_is_identity(fixture_store):
    text = serialize_corpus(fixture_store)
    assert serialize_corpus(parse_corpus(text)) == text


def test_filter_all_zero_thresholds_is_identity(fixture_store, analyzer):
    out = filter_pages(fixture_store, FilterConfig(0, 0, 0), analyzer)
    assert [p.page_id for p in out.pages] == [p.page_id for p in fixture_store.pages]


def test_filter_fixture_against_predicate_oracle(fixture_store, analyzer):
    cfg = FilterConfig(min_distinct_terms=3, min_in_links=1, min_out_links=1)
    # Oracle: apply the three predicates independently of filter_pages.
    in_deg = {p.page_id: 0 for p in fixture_store.pages}
    for p in fixture_store.pages:
        for t in p.out_links:
            in_deg[t] += 1
    expect = {
        p.page_id
        for p in fixture_store.pages
        if len(set(analyzer.analyze(p.text))) >= 3
        and in_deg[p.page_id] >= 1
        and len(p.out_links) >= 1
    }
    out = filter_pages(fixture_store, cfg, analyzer)
    assert {p.page_id for p in out.pages} == expect
    # The fixture is built so exactly the two short pages fall out.
    assert {p.page_id for p in fixture_store.pages} - expect == {6, 7}


def test_filter_idempotent(fixture_store, analyzer):
    cfg = FilterConfig(3, 1, 1)
    once = filter_pages(fixture_store, cfg, analyzer)
    twice = filter_pages(once, cfg, analyzer)
    assert serialize_corpus(once) == serialize_corpus(twice)


@pytest.mark.parametrize("bump", ["terms", "in", "out"])
def test_filter_monotone_in_thresholds(fixture_store, analyzer, bump):
    base = FilterConfig(2, 1, 1)
    raised = FilterConfig(
        base.min_distinct_terms + (2 if bump == "terms" else 0),
        base.min_in_links + (1 if bump == "in" else 0),
        base.min_out_links + (1 if bump == "out" else 0),
    )
    small = {p.page_id for p in filter_pages(fixture_store, raised, analyzer).pages}
    large = {p.page_id for p in filter_pages(fixture_store, base, analyzer).pages}
    assert small <= large


def test_synthetic_minimal_structure():
    store, labels = gen_synthetic_wiki(1, 2, 1, 5, 1)
    assert store.n_pages == 2
    assert len(store.categories) == 3  # root + one per topic
    assert set(labels.values()) == {"topic0", "topic1"}


def test_synthetic_same_seed_byte_identical():
    a, _ = gen_synthetic_wiki(5, 3, 4, 10, 2)
    b, _ = gen_synthetic_wiki(5, 3, 4, 10, 2)
    assert serialize_corpus(a) == serialize_corpus(b)


def test_synthetic_different_seed_differs():
    a, _ = gen_synthetic_wiki(5, 3, 4, 10, 2)
    b, _ = gen_synthetic_wiki(6, 3, 4, 10, 2)
    assert serialize_corpus(a) != serialize_corpus(b)


def test_synthetic_dominant_vocabulary_matches_label():
    store, labels = gen_synthetic_wiki(7, 4, 50, 40, 2)
    a = Analyzer(stemmer=lambda w: w)
    for page in store.pages:
        counts = {}
        for tok in a.analyze(page.text):
            if tok.startswith("t") and "w" in tok:
                topic = tok.split("w")[0][1:]
                if topic.isdigit():
                    counts[int(topic)] = counts.get(int(topic), 0) + 1
        dominant = max(counts, key=lambda t: counts[t])
        assert labels[page.page_id] == f"topic{dominant}"


def test_synthetic_rejects_bad_params():
    with pytest.raises(ValueError):
        gen_synthetic_wiki(1, 0, 1, 1, 1)
