"""Text analysis: tokenization, stopword removal, stemming, vocabulary.

Every tfidf computation downstream consumes the term stream produced
here, so the pipeline is deliberately small and deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

__all__ = ["Analyzer", "Vocabulary", "analyze", "build_vocabulary", "default_stem"]

# Unicode alphanumeric runs; underscores split, digits kept.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def default_stem(word: str) -> str:
    """Strip a plural 'es'/'s' suffix.

    The rules never emit a form that the rules would strip again, so the
    stemmer is idempotent (a requirement also imposed on plugged-in
    stemmers).
    """
    if len(word) > 4 and word.endswith("es") and word[-3] != "s":
        stripped = word[:-2]
        if not stripped.endswith("s"):
            return stripped
    if len(word) > 3 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


@dataclass(frozen=True)
class Analyzer:
    """Tokenize, lowercase, drop stopwords, stem. Pure and reusable."""

    stopword_set: frozenset[str] = frozenset()
    stemmer: Callable[[str], str] = default_stem
    lowercase_fold: bool = True

    def analyze(self, text: str) -> list[str]:
        tokens = _TOKEN_RE.findall(text)
        if self.lowercase_fold:
            tokens = [t.lower() for t in tokens]
        return [self.stemmer(t) for t in tokens if t not in self.stopword_set]


def analyze(text: str, analyzer: Analyzer) -> list[str]:
    """Functional form of Analyzer.analyze."""
    return analyzer.analyze(text)


def load_stopwords(path) -> frozenset[str]:
    """Read a one-term-per-line stopword file."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


@dataclass(frozen=True)
class Vocabulary:
    """Term <-> id bijection with document frequencies.

    Ids are dense 0..T-1, assigned in lexicographic term order so they are
    stable across runs.
    """

    term_to_id: dict[str, int]
    doc_freq: tuple[int, ...]
    min_df: int = 3
    id_to_term: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        terms = sorted(self.term_to_id, key=self.term_to_id.get)
        object.__setattr__(self, "id_to_term", tuple(terms))

    def __len__(self) -> int:
        return len(self.term_to_id)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_id

    def df(self, term_id: int) -> int:
        return self.doc_freq[term_id]


def build_vocabulary(store, analyzer: Analyzer, min_df: int = 1) -> Vocabulary:
    """Count per-page document frequencies and keep terms with df >= min_df."""
    if not store.pages:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    df: dict[str, int] = {}
    for page in store.pages:
        for term in set(analyzer.analyze(page.text)):
            df[term] = df.get(term, 0) + 1
    kept = sorted(t for t, n in df.items() if n >= min_df)
    term_to_id = {t: i for i, t in enumerate(kept)}
    return Vocabulary(
        term_to_id=term_to_id,
        doc_freq=tuple(df[t] for t in kept),
        min_df=min_df,
    )
