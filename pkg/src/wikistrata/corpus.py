"""Corpus handling: parsing, validation, filtering, synthesis.

The corpus format is UTF-8 line-delimited JSON. The first line is a
header ``{"kind":"meta","root":N,"version":1}``; every following line is
either a page record or a category record:

    {"kind":"page","id":N,"title":S,"text":S,"categories":[N...],"links":[N...]}
    {"kind":"category","id":N,"title":S,"parents":[N...]}

Page ids and category ids live in separate integer spaces; graph modules
distinguish them with a node-kind tag.
"""

from __future__ import annotations

import json

import random
from dataclasses import dataclass, field

__all__ = [
    "CorpusError",
    "PageRecord",
    "CategoryRecord",
    "CorpusStore",
    "FilterConfig",
    "parse_corpus",
    "serialize_corpus",
    "filter_pages",
    "gen_synthetic_wiki",
]

FORMAT_VERSION = 1


class CorpusError(ValueError):
    """Raised for malformed corpus input or broken referential integrity."""


@dataclass(frozen=True)
class PageRecord:
    page_id: int
    title: str
    text: str
    category_ids: tuple[int, ...]
    out_links: tuple[int, ...]


@dataclass(frozen=True)
class CategoryRecord:
    category_id: int
    title: str
    parent_ids: tuple[int, ...]


@dataclass(frozen=True)
class CorpusStore:
    """Immutable validated corpus: pages, categories, and the hierarchy root."""

    pages: tuple[PageRecord, ...]
    categories: tuple[CategoryRecord, ...]
    root_category_id: int
    _page_by_id: dict[int, PageRecord] = field(repr=False, compare=False, default_factory=dict)
    _cat_by_id: dict[int, CategoryRecord] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_page_by_id", {p.page_id: p for p in self.pages})
        object.__setattr__(self, "_cat_by_id", {c.category_id: c for c in self.categories})

    @property
    def n_pages(self) -> int:
        return len(self.pages)

    def page(self, page_id: int) -> PageRecord:
        return self._page_by_id[page_id]

    def category(self, category_id: int) -> CategoryRecord:
        return self._cat_by_id[category_id]

    def has_page(self, page_id: int) -> bool:
        return page_id in self._page_by_id


@dataclass(frozen=True)
class FilterConfig:
    """Thresholds a page must meet to survive corpus filtering."""

    min_distinct_terms: int = 125
    min_in_links: int = 15
    min_out_links: int = 15
    excluded_title_prefixes: tuple[str, ...] = ()

    def __post_init__(self):
        if min(self.min_distinct_terms, self.min_in_links, self.min_out_links) < 0:
            raise ValueError("filter thresholds must be >= 0")


def _canonical_ids(values, self_id=None) -> tuple[int, ...]:
    # Canonical form: sorted, deduplicated, self-references dropped.
    return tuple(sorted({v for v in values if v != self_id}))


def parse_corpus(lines) -> CorpusStore:
    """Parse an iterable of corpus lines (or a whole string) into a CorpusStore.

    Raises CorpusError with a line number for malformed records, duplicate
    ids, dangling references, or a missing root category.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    pages: dict[int, PageRecord] = {}
    categories: dict[int, CategoryRecord] = {}
    root_id = None
    saw_meta = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(rec, dict) or "kind" not in rec:
            raise CorpusError(f"line {lineno}: record has no 'kind' field")
        kind = rec["kind"]
        try:
            if kind == "meta":
                if saw_meta:
                    raise CorpusError(f"line {lineno}: duplicate meta header")
                if lineno != 1 and (pages or categories):
                    raise CorpusError(f"line {lineno}: meta header must be the first record")
                if rec.get("version") != FORMAT_VERSION:
                    raise CorpusError(f"line {lineno}: unsupported corpus version {rec.get('version')!r}")
                root_id = int(rec["root"])
                saw_meta = True
            elif kind == "page":
                if not saw_meta:
                    raise CorpusError(f"line {lineno}: record before meta header")
                pid = int(rec["id"])
                if pid < 0:
                    raise CorpusError(f"line {lineno}: negative page id {pid}")
                if pid in pages:
                    raise CorpusError(f"line {lineno}: duplicate page id {pid}")
                title = rec["title"]
                if not isinstance(title, str) or not title:
                    raise CorpusError(f"line {lineno}: page {pid} has an empty title")
                pages[pid] = PageRecord(
                    page_id=pid,
                    title=title,
                    text=str(rec["text"]),
                    category_ids=_canonical_ids(int(c) for c in rec["categories"]),
                    out_links=_canonical_ids((int(t) for t in rec["links"]), self_id=pid),
                )
            elif kind == "category":
                if not saw_meta:
                    raise CorpusError(f"line {lineno}: record before meta header")
                cid = int(rec["id"])
                if cid < 0:
                    raise CorpusError(f"line {lineno}: negative category id {cid}")
                if cid in categories:
                    raise CorpusError(f"line {lineno}: duplicate category id {cid}")
                title = rec["title"]
                if not isinstance(title, str) or not title:
                    raise CorpusError(f"line {lineno}: category {cid} has an empty title")
                categories[cid] = CategoryRecord(
                    category_id=cid,
                    title=title,
                    parent_ids=_canonical_ids((int(p) for p in rec["parents"]), self_id=cid),
                )
            else:
                raise CorpusError(f"line {lineno}: unknown record kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CorpusError):
                raise
            raise CorpusError(f"line {lineno}: malformed {kind} record: {exc}") from exc
    if not saw_meta:
        raise CorpusError("missing meta header line")
    store = CorpusStore(
        pages=tuple(pages[k] for k in sorted(pages)),
        categories=tuple(categories[k] for k in sorted(categories)),
        root_category_id=root_id,
    )
    _validate_references(store)
    return store


def parse_corpus_file(path) -> CorpusStore:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh)


def _validate_references(store: CorpusStore) -> None:
    # Category references must resolve. Page out-links are soft: they may
    # point into the wider unfiltered universe, so a filtered store keeps
    # its link lists (and hence its degrees) intact.
    cat_ids = {c.category_id for c in store.categories}
    if store.root_category_id not in cat_ids:
        raise CorpusError(f"root category {store.root_category_id} does not exist")
    for p in store.pages:
        for cid in p.category_ids:
            if cid not in cat_ids:
                raise CorpusError(f"page {p.page_id} references unknown category {cid}")
    for c in store.categories:
        for pid in c.parent_ids:
            if pid not in cat_ids:
                raise CorpusError(f"category {c.category_id} references unknown parent {pid}")


def serialize_corpus(store: CorpusStore) -> str:
    """Serialize a store to the line-delimited format, canonically ordered by id."""
    out = [json.dumps({"kind": "meta", "root": store.root_category_id, "version": FORMAT_VERSION})]
    for c in sorted(store.categories, key=lambda c: c.category_id):
        out.append(json.dumps({
            "kind": "category",
            "id": c.category_id,
            "title": c.title,
            "parents": list(c.parent_ids),
        }, ensure_ascii=False))
    for p in sorted(store.pages, key=lambda p: p.page_id):
        out.append(json.dumps({
            "kind": "page",
            "id": p.page_id,
            "title": p.title,
            "text": p.text,
            "categories": list(p.category_ids),
            "links": list(p.out_links),
        }, ensure_ascii=False))
    return "\n".join(out) + "\n"


def in_link_degrees(store: CorpusStore) -> dict[int, int]:
    """In-link degree per page, derived from the union of all out_links.

    Links to pages absent from the store do not count anywhere; pages
    never linked have degree 0.
    """
    degrees = {p.page_id: 0 for p in store.pages}
    for p in store.pages:
        for tid in p.out_links:
            if tid in degrees:
                degrees[tid] += 1
    return degrees


def filter_pages(store: CorpusStore, cfg: FilterConfig, analyzer) -> CorpusStore:
    """Keep pages meeting all thresholds; single pass against pre-filter degrees.

    Categories are always retained (pruning empties is the graph layer's
    concern), and surviving pages keep their full out_links even when a
    target was filtered away: link lists describe the original universe,
    which keeps out-degrees stable under repeated filtering.
    """
    in_deg = in_link_degrees(store)
    excluded = {
        c.category_id
        for c in store.categories
        if any(c.title.startswith(pfx) for pfx in cfg.excluded_title_prefixes)
    }
    survivors = []
    for p in store.pages:
        n_terms = len(set(analyzer.analyze(p.text)))
        if n_terms < cfg.min_distinct_terms:
            continue
        if in_deg[p.page_id] < cfg.min_in_links:
            continue
        if len(p.out_links) < cfg.min_out_links:
            continue
        survivors.append(p)
    pages = tuple(
        PageRecord(
            page_id=p.page_id,
            title=p.title,
            text=p.text,
            category_ids=tuple(c for c in p.category_ids if c not in excluded),
            out_links=p.out_links,
        )
        for p in survivors
    )
    return CorpusStore(pages=pages, categories=store.categories,
                       root_category_id=store.root_category_id)


def gen_synthetic_wiki(
    seed: int,
    n_topics: int,
    pages_per_topic: int,
    vocab_per_topic: int,
    depth: int,
    *,
    tokens_per_page: int = 60,
    shared_vocab: int = 10,
    crosstalk: float = 0.1,
    junk_words_per_page: int = 1,
    junk_repeats: int = 3,
):
    """Deterministically generate a labelled corpus with a topic category tree.

    Leaf categories correspond to topics; for depth > 1, topics are grouped
    pairwise into intermediate categories up to the root. Page text mixes
    topic vocabulary, globally shared vocabulary, cross-topic noise
    (`crosstalk` is the probability a token is drawn from a foreign topic),
    and a few page-unique junk words repeated enough to earn a high tf.

    Returns (CorpusStore, labels) with labels mapping page_id -> topic name.
    """
    if min(n_topics, pages_per_topic, vocab_per_topic, depth) < 1:
        raise ValueError("all generator parameters must be >= 1")
    rng = random.Random(seed)
    topic_names = [f"topic{t}" for t in range(n_topics)]
    topic_vocab = [[f"t{t}w{j}" for j in range(vocab_per_topic)] for t in range(n_topics)]
    shared = [f"shared{j}" for j in range(shared_vocab)]

    # Category tree: leaves are topics; each extra level groups children in pairs.
    categories: dict[int, CategoryRecord] = {}
    root_id = 0
    next_cid = 1
    leaf_cids = []
    for t in range(n_topics):
        leaf_cids.append(next_cid)
        next_cid += 1
    level = list(leaf_cids)
    level_titles = {cid: topic_names[i] for i, cid in enumerate(leaf_cids)}
    parent_of: dict[int, int] = {}
    for _ in range(depth - 1):
        if len(level) == 1:
            break
        groups = [level[i:i + 2] for i in range(0, len(level), 2)]
        new_level = []
        for g in groups:
            gid = next_cid
            next_cid += 1
            level_titles[gid] = "group_" + "_".join(level_titles[c] for c in g)
            for child in g:
                parent_of[child] = gid
            new_level.append(gid)
        level = new_level
    for cid in level:
        parent_of[cid] = root_id
    categories[root_id] = CategoryRecord(root_id, "Root", ())
    for cid in sorted(level_titles):
        categories[cid] = CategoryRecord(cid, level_titles[cid], (parent_of[cid],))

    n_pages = n_topics * pages_per_topic
    pages = []
    labels: dict[int, str] = {}
    for pid in range(n_pages):
        topic = pid % n_topics
        labels[pid] = topic_names[topic]
        tokens = []
        for _ in range(tokens_per_page):
            r = rng.random()
            if r < crosstalk and n_topics > 1:
                other = rng.randrange(n_topics - 1)
                if other >= topic:
                    other += 1
                tokens.append(rng.choice(topic_vocab[other]))
            elif r < crosstalk + 0.2 and shared:
                tokens.append(rng.choice(shared))
            else:
                tokens.append(rng.choice(topic_vocab[topic]))
        for j in range(junk_words_per_page):
            tokens.extend([f"junk{pid}x{j}"] * junk_repeats)
        rng.shuffle(tokens)
        # Ring links keep every page above trivial in/out-degree thresholds.
        out_links = tuple(sorted({(pid + 1) % n_pages, (pid + 2) % n_pages} - {pid}))
        pages.append(PageRecord(
            page_id=pid,
            title=f"page{pid}",
            text=" ".join(tokens),
            category_ids=(leaf_cids[topic],),
            out_links=out_links,
        ))
    store = CorpusStore(
        pages=tuple(pages),
        categories=tuple(categories[k] for k in sorted(categories)),
        root_category_id=root_id,
    )
    return store, labels
