"""Classical explicit semantic analysis.

Pages are concepts; a page's vector holds unit-normalized tfidf weights
over terms, and transposing that matrix yields word vectors in concept
space. Relatedness of two words is the cosine of their concept vectors.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from wikistrata.textproc import Analyzer, Vocabulary

__all__ = [
    "SparseVector",
    "EsaIndex",
    "tfidf",
    "build_index",
    "index_from_freqs",
    "word_vector",
    "relatedness",
    "document_vector",
    "save_vector",
    "load_vector",
    "vector_to_tsv",
    "save_vector_set",
    "load_vector_set",
]

TERM_SPACE = "term"
CONCEPT_SPACE = "concept"
_SPACE_TAGS = {TERM_SPACE: 0, CONCEPT_SPACE: 1}
_TAG_SPACES = {v: k for k, v in _SPACE_TAGS.items()}

_MAGIC = b"ESAV"
_VERSION = 1


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse vector with non-negative finite weights."""

    dims: tuple[int, ...]
    weights: tuple[float, ...]
    space: str = CONCEPT_SPACE

    def __post_init__(self):
        if len(self.dims) != len(self.weights):
            raise ValueError("dims and weights differ in length")
        if any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise ValueError("dimensions must be strictly increasing")
        for w in self.weights:
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"weight {w!r} is not finite and non-negative")
        if self.space not in _SPACE_TAGS:
            raise ValueError(f"unknown space tag {self.space!r}")

    @classmethod
    def from_dict(cls, entries: dict[int, float], space: str = CONCEPT_SPACE) -> "SparseVector":
        items = sorted((d, w) for d, w in entries.items() if w != 0.0)
        return cls(tuple(d for d, _ in items), tuple(w for _, w in items), space)

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.dims, self.weights))

    @property
    def nnz(self) -> int:
        return len(self.dims)

    def is_zero(self) -> bool:
        return not self.dims

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def dot(self, other: "SparseVector") -> float:
        if self.space != other.space:
            raise ValueError("cannot dot vectors from different spaces")
        a, b = self, other
        if a.nnz > b.nnz:
            a, b = b, a
        bmap = b.to_dict()
        return sum(w * bmap[d] for d, w in zip(a.dims, a.weights) if d in bmap)

    def cosine(self, other: "SparseVector") -> float:
        na, nb = self.norm(), other.norm()
        if na == 0.0 or nb == 0.0:
            return 0.0
        return self.dot(other) / (na * nb)

    def unit(self) -> "SparseVector":
        n = self.norm()
        if n == 0.0:
            return self
        return SparseVector(self.dims, tuple(w / n for w in self.weights), self.space)

    @classmethod
    def zero(cls, space: str = CONCEPT_SPACE) -> "SparseVector":
        return cls((), (), space)


def tfidf(f: int, df: int, n_docs: int) -> float:
    """(1 + ln f) * ln(n_docs / df); natural logarithm throughout."""
    if f < 1:
        raise ValueError(f"raw frequency must be >= 1, got {f}")
    if not 1 <= df <= n_docs:
        raise ValueError(f"need 1 <= df <= n_docs, got df={df}, n_docs={n_docs}")
    return (1.0 + math.log(f)) * math.log(n_docs / df)


@dataclass(frozen=True)
class EsaIndex:
    """Term/concept index: page tfidf vectors, postings, concept dimensions.

    ``page_term_freqs`` keeps the raw analyzed frequencies so categorical
    aggregates can be recomputed without re-reading text.
    """

    vocabulary: Vocabulary
    page_ids: tuple[int, ...]
    concept_of_page: dict[int, int]
    page_vectors: dict[int, SparseVector]
    page_term_freqs: dict[int, dict[int, int]]
    postings: dict[int, tuple[tuple[int, int], ...]]
    n_pages: int
    zero_pages: tuple[int, ...]

    def page_of_concept(self, dim: int) -> int:
        return self.page_ids[dim]


def build_index(store, analyzer: Analyzer, vocabulary: Vocabulary) -> EsaIndex:
    """Build per-page unit tfidf vectors and the term postings table.

    Pages with no in-vocabulary term (or all-zero weights, e.g. a corpus
    of one page where every idf vanishes) get the zero vector and are
    listed in ``zero_pages``.
    """
    page_ids = tuple(p.page_id for p in sorted(store.pages, key=lambda p: p.page_id))
    page_term_freqs = {}
    for pid in page_ids:
        counts = Counter(analyzer.analyze(store.page(pid).text))
        page_term_freqs[pid] = dict(sorted(
            (vocabulary.term_to_id[t], f) for t, f in counts.items() if t in vocabulary
        ))
    return index_from_freqs(page_term_freqs, vocabulary)


def index_from_freqs(
    page_term_freqs: dict[int, dict[int, int]], vocabulary: Vocabulary
) -> EsaIndex:
    """Assemble an index from precomputed per-page raw term frequencies."""
    page_ids = tuple(sorted(page_term_freqs))
    n_pages = len(page_ids)
    concept_of_page = {pid: i for i, pid in enumerate(page_ids)}
    page_vectors: dict[int, SparseVector] = {}
    postings: dict[int, list[tuple[int, int]]] = {}
    zero_pages = []
    for pid in page_ids:
        freqs = page_term_freqs[pid]
        weights = {
            tid: tfidf(f, vocabulary.df(tid), n_pages)
            for tid, f in freqs.items()
        }
        vec = SparseVector.from_dict(weights, TERM_SPACE).unit()
        if vec.is_zero():
            zero_pages.append(pid)
        page_vectors[pid] = vec
        for tid, f in sorted(freqs.items()):
            postings.setdefault(tid, []).append((pid, f))
    return EsaIndex(
        vocabulary=vocabulary,
        page_ids=page_ids,
        concept_of_page=concept_of_page,
        page_vectors=page_vectors,
        page_term_freqs={pid: dict(page_term_freqs[pid]) for pid in page_ids},
        postings={tid: tuple(plist) for tid, plist in sorted(postings.items())},
        n_pages=n_pages,
        zero_pages=tuple(zero_pages),
    )


def word_vector(index: EsaIndex, term_id: int) -> SparseVector:
    """The term's column of the transposed tfidf matrix, in concept space."""
    if not 0 <= term_id < len(index.vocabulary):
        raise KeyError(f"unknown term id {term_id}")
    entries = {}
    for pid, _f in index.postings.get(term_id, ()):
        w = index.page_vectors[pid].to_dict().get(term_id, 0.0)
        if w != 0.0:
            entries[index.concept_of_page[pid]] = w
    return SparseVector.from_dict(entries, CONCEPT_SPACE)


def relatedness(index: EsaIndex, term_a: int, term_b: int) -> float:
    """Cosine of the two word vectors; 0 when either vector is zero."""
    va = word_vector(index, term_a)
    vb = word_vector(index, term_b)
    c = va.cosine(vb)
    return min(1.0, max(0.0, c))


def document_vector(
    index: EsaIndex,
    doc_terms: Iterable[str],
    weight_fn: Optional[Callable[[int], float]] = None,
) -> SparseVector:
    """Weighted combination of word vectors, normalized to unit length.

    The sum over distinct in-vocabulary terms w of weight(w) * word_vector(w)
    is divided by sqrt(sum of squared weights) and then explicitly
    renormalized to unit norm (word vectors are not orthonormal, so the
    first division alone does not yield a unit vector).

    ``weight_fn`` maps term_id -> weight; the default is the tfidf of the
    term within the document, with df taken from the index.
    """
    counts = Counter(doc_terms)
    freqs = {
        index.vocabulary.term_to_id[t]: f
        for t, f in counts.items()
        if t in index.vocabulary
    }
    if weight_fn is None:
        n = index.n_pages
        voc = index.vocabulary
        weight_fn = lambda tid, _freqs=freqs: tfidf(_freqs[tid], voc.df(tid), n)
    acc: dict[int, float] = {}
    sq = 0.0
    for tid in sorted(freqs):
        t = weight_fn(tid)
        if t == 0.0:
            continue
        sq += t * t
        for dim, w in zip(*_word_entries(index, tid)):
            acc[dim] = acc.get(dim, 0.0) + t * w
    if not acc or sq == 0.0:
        return SparseVector.zero(CONCEPT_SPACE)
    denom = math.sqrt(sq)
    vec = SparseVector.from_dict({d: v / denom for d, v in acc.items()}, CONCEPT_SPACE)
    return vec.unit()


def _word_entries(index: EsaIndex, term_id: int):
    dims, weights = [], []
    for pid, _f in index.postings.get(term_id, ()):
        w = index.page_vectors[pid].to_dict().get(term_id, 0.0)
        if w != 0.0:
            dims.append(index.concept_of_page[pid])
            weights.append(w)
    return dims, weights


# ---------------------------------------------------------------------------
# Serialization: binary "ESAV" single-vector format, TSV mirror, and a
# multi-vector container used by the pipeline ("ESVS": count, then per
# entry a u64 key followed by an embedded ESAV record).

def _pack_vector(vec: SparseVector) -> bytes:
    parts = [_MAGIC, struct.pack("<HBQ", _VERSION, _SPACE_TAGS[vec.space], vec.nnz)]
    for d, w in zip(vec.dims, vec.weights):
        parts.append(struct.pack("<Id", d, w))
    return b"".join(parts)


def _unpack_vector(buf: bytes, offset: int = 0) -> tuple[SparseVector, int]:
    if buf[offset:offset + 4] != _MAGIC:
        raise ValueError("bad magic; not an ESAV vector")
    version, tag, count = struct.unpack_from("<HBQ", buf, offset + 4)
    if version != _VERSION:
        raise ValueError(f"unsupported ESAV version {version}")
    offset += 4 + 11
    dims, weights = [], []
    for _ in range(count):
        d, w = struct.unpack_from("<Id", buf, offset)
        dims.append(d)
        weights.append(w)
        offset += 12
    return SparseVector(tuple(dims), tuple(weights), _TAG_SPACES[tag]), offset


def save_vector(path, vec: SparseVector) -> None:
    with open(path, "wb") as fh:
        fh.write(_pack_vector(vec))


def load_vector(path) -> SparseVector:
    with open(path, "rb") as fh:
        vec, _ = _unpack_vector(fh.read())
    return vec


def vector_to_tsv(vec: SparseVector) -> str:
    return "".join(f"{d}\t{w!r}\n" for d, w in zip(vec.dims, vec.weights))


def save_vector_set(path, vectors: dict[int, SparseVector]) -> None:
    with open(path, "wb") as fh:
        fh.write(b"ESVS" + struct.pack("<Q", len(vectors)))
        for key in sorted(vectors):
            fh.write(struct.pack("<Q", key))
            fh.write(_pack_vector(vectors[key]))


def load_vector_set(path) -> dict[int, SparseVector]:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != b"ESVS":
        raise ValueError("bad magic; not an ESVS vector set")
    (count,) = struct.unpack_from("<Q", buf, 4)
    offset = 12
    out: dict[int, SparseVector] = {}
    for _ in range(count):
        (key,) = struct.unpack_from("<Q", buf, offset)
        vec, offset = _unpack_vector(buf, offset + 8)
        out[key] = vec
    return out
