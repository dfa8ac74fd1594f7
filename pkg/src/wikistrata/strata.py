"""Stratified tfidf: page tfidf consolidated by ancestor categories.

A term's stratified weight in page d is its classical tfidf plus
lambda-discounted categorical tfidfs taken in d's ancestor categories
along the arborescence. Terms that "survive" the climb toward the root
get boosted; page-local accidents (rare junk with a high tf) do not.
"""

from __future__ import annotations

from dataclasses import dataclass

from wikistrata.arbor import Arborescence, ancestors
from wikistrata.catgraph import (
    CATEGORY,
    LeafSetIndex,
    Node,
    categorical_tfidf,
    category_term_weights,
)
from wikistrata.esa import EsaIndex, SparseVector, document_vector, tfidf

__all__ = ["StrataConfig", "StrataVectorizer", "stratified_tfidf", "stratified_document_vector"]

PRESETS = {
    "half": (0.5, 0.25, 0.125),
    "tenth": (0.1, 0.05, 0.025),
    "flat": (1.0, 1.0, 1.0),
}


@dataclass(frozen=True)
class StrataConfig:
    lambdas: tuple[float, ...] = (0.5, 0.25, 0.125)
    requires_decreasing: bool = True
    use_truncated_support: bool = True
    max_nnz: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        if any(x < 0 for x in self.lambdas):
            raise ValueError("lambdas must be non-negative")
        if self.requires_decreasing and any(
            a < b for a, b in zip(self.lambdas, self.lambdas[1:])
        ):
            raise ValueError("lambdas must form a decreasing sequence")

    @classmethod
    def preset(cls, name: str, **kwargs) -> "StrataConfig":
        return cls(lambdas=PRESETS[name], **kwargs)


class StrataVectorizer:
    """Caches per-category truncated tfidf supports for stratified weighting."""

    def __init__(self, index: EsaIndex, ls: LeafSetIndex, arb: Arborescence, cfg: StrataConfig):
        self.index = index
        self.ls = ls
        self.arb = arb
        self.cfg = cfg
        self._cat_weights: dict[int, dict[int, float]] = {}

    def _weights_of(self, category_id: int) -> dict[int, float]:
        if category_id not in self._cat_weights:
            self._cat_weights[category_id] = category_term_weights(
                category_id, self.index, self.ls, self.cfg.max_nnz
            )
        return self._cat_weights[category_id]

    def _ancestor_categories(self, page_id: int) -> list[int]:
        chain = ancestors(self.arb, Node.page(page_id), len(self.cfg.lambdas))
        return [n.id for n in chain if n.kind == CATEGORY]

    def stratum_weight(self, term_id: int, category_id: int) -> float:
        if self.cfg.use_truncated_support:
            return self._weights_of(category_id).get(term_id, 0.0)
        try:
            return categorical_tfidf(term_id, category_id, self.index, self.ls)
        except ValueError:
            return 0.0

    def stratified_tfidf(self, term_id: int, page_id: int) -> float:
        freqs = self.index.page_term_freqs.get(page_id)
        if freqs is None:
            raise KeyError(f"unknown page {page_id}")
        f = freqs.get(term_id, 0)
        base = tfidf(f, self.index.vocabulary.df(term_id), self.index.n_pages) if f >= 1 else 0.0
        total = base
        for lam, cid in zip(self.cfg.lambdas, self._ancestor_categories(page_id)):
            if lam == 0.0:
                continue
            total += lam * self.stratum_weight(term_id, cid)
        return total

    def document_vector(self, page_id: int) -> SparseVector:
        """Stratified concept vector of a corpus page; unit-norm or zero.

        The sum runs over the page's own terms only: ancestor categories
        reweight them but never contribute terms of their own.
        """
        freqs = self.index.page_term_freqs.get(page_id)
        if freqs is None:
            raise KeyError(f"unknown page {page_id}")
        voc = self.index.vocabulary
        terms = [voc.id_to_term[tid] for tid, f in sorted(freqs.items()) for _ in range(f)]
        return document_vector(
            self.index, terms, weight_fn=lambda tid: self.stratified_tfidf(tid, page_id)
        )


def stratified_tfidf(
    term_id: int,
    page_id: int,
    arb: Arborescence,
    index: EsaIndex,
    ls: LeafSetIndex,
    cfg: StrataConfig,
) -> float:
    return StrataVectorizer(index, ls, arb, cfg).stratified_tfidf(term_id, page_id)


def stratified_document_vector(
    page_id: int,
    arb: Arborescence,
    index: EsaIndex,
    ls: LeafSetIndex,
    cfg: StrataConfig,
) -> SparseVector:
    return StrataVectorizer(index, ls, arb, cfg).document_vector(page_id)
