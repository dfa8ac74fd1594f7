"""Category digraph: leaf sets, categorical tfidf, category vectors,
edge weighting, and structural diagnostics (cycles, degree power laws).

Category graphs may contain cycles, so leaf sets are computed on the
strongly-connected-component condensation of the inclusion subgraph.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from wikistrata.esa import CONCEPT_SPACE, EsaIndex, SparseVector, _word_entries

__all__ = [
    "Node",
    "CategoryGraph",
    "LeafSetIndex",
    "WeightedEdge",
    "build_graph",
    "leaf_sets",
    "categorical_tfidf",
    "category_term_weights",
    "category_vector",
    "weight_edges",
    "cycle_census",
    "CycleReport",
    "degree_stats",
    "DegreeStats",
    "PowerLawFit",
    "fit_power_law",
    "sample_power_law_degrees",
    "strongly_connected_components",
]

PAGE = "p"
CATEGORY = "c"


class Node(NamedTuple):
    """One shared node-id space over pages and categories via a kind tag."""

    kind: str
    id: int

    def __str__(self) -> str:
        return f"{self.kind}:{self.id}"

    @classmethod
    def parse(cls, text: str) -> "Node":
        kind, _, raw = text.partition(":")
        if kind not in (PAGE, CATEGORY):
            raise ValueError(f"bad node literal {text!r}")
        return cls(kind, int(raw))

    @classmethod
    def page(cls, page_id: int) -> "Node":
        return cls(PAGE, page_id)

    @classmethod
    def category(cls, category_id: int) -> "Node":
        return cls(CATEGORY, category_id)


@dataclass(frozen=True)
class CategoryGraph:
    """Membership edges (page -> category) and inclusion edges (category -> category)."""

    page_ids: frozenset[int]
    category_ids: frozenset[int]
    membership: frozenset[tuple[int, int]]
    inclusion: frozenset[tuple[int, int]]
    root_id: int

    @property
    def nodes(self) -> list[Node]:
        return sorted(
            [Node.page(p) for p in self.page_ids] + [Node.category(c) for c in self.category_ids]
        )

    def edges(self) -> list[tuple[Node, Node, str]]:
        out = [(Node.page(a), Node.category(b), "membership") for a, b in sorted(self.membership)]
        out += [(Node.category(a), Node.category(b), "inclusion") for a, b in sorted(self.inclusion)]
        return out


def build_graph(store) -> CategoryGraph:
    """Lift a corpus store into the page/category digraph (duplicates collapse)."""
    membership = {
        (p.page_id, cid) for p in store.pages for cid in p.category_ids
    }
    inclusion = {
        (c.category_id, pid) for c in store.categories for pid in c.parent_ids
    }
    return CategoryGraph(
        page_ids=frozenset(p.page_id for p in store.pages),
        category_ids=frozenset(c.category_id for c in store.categories),
        membership=frozenset(membership),
        inclusion=frozenset(inclusion),
        root_id=store.root_category_id,
    )


def strongly_connected_components(nodes, successors) -> list[list]:
    """Iterative Tarjan; components come out in reverse topological order
    (every edge goes from a later-emitted component to an earlier one)."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    components = []
    counter = 0
    for start in nodes:
        if start in index:
            continue
        work = [(start, iter(successors(start)))]
        index[start] = lowlink[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                elif w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


@dataclass(frozen=True)
class LeafSetIndex:
    """F(c) per category: pages reaching c via one membership edge plus a
    chain of inclusions. Sets are shared per SCC of the inclusion subgraph."""

    comp_of: dict[int, int]
    comp_pages: tuple[tuple[int, ...], ...]

    def pages_of(self, category_id: int) -> tuple[int, ...]:
        return self.comp_pages[self.comp_of[category_id]]


def leaf_sets(g: CategoryGraph) -> LeafSetIndex:
    cats = sorted(g.category_ids)
    succ_map: dict[int, list[int]] = {c: [] for c in cats}
    for child, parent in sorted(g.inclusion):
        succ_map[child].append(parent)
    comps = strongly_connected_components(cats, lambda c: succ_map[c])
    comp_of = {}
    for i, comp in enumerate(comps):
        for c in comp:
            comp_of[c] = i
    direct: list[set[int]] = [set() for _ in comps]
    for pid, cid in g.membership:
        direct[comp_of[cid]].add(pid)
    # Tarjan emits components in reverse topological order: for any edge
    # child-comp -> parent-comp, the parent comp has the smaller index.
    # Sweeping indices downward therefore folds each component's pages
    # into its parents only after its own children contributed.
    comp_succ: list[set[int]] = [set() for _ in comps]
    for child, parent in g.inclusion:
        a, b = comp_of[child], comp_of[parent]
        if a != b:
            comp_succ[a].add(b)
    sets: list[set[int]] = [set(s) for s in direct]
    for i in range(len(comps) - 1, -1, -1):
        for j in comp_succ[i]:
            sets[j] |= sets[i]
    return LeafSetIndex(
        comp_of=comp_of,
        comp_pages=tuple(tuple(sorted(s)) for s in sets),
    )


def categorical_tfidf(
    term_id: int,
    category_id: int,
    index: EsaIndex,
    ls: LeafSetIndex,
    literal_denominator: bool = False,
) -> float:
    """tfidf generalized to a category.

    tf aggregates the term's raw frequency over the category's leaf pages
    F(c); the idf denominator is 1 + the number of documents containing
    the term outside F(c), so the value is high when the term is common in
    the category and rare elsewhere. With ``literal_denominator`` the
    denominator counts all documents outside F(c) regardless of the term
    (kept for comparison; it does not reduce to classical tfidf on
    singleton categories).
    """
    leaves = set(ls.pages_of(category_id))
    sum_f = 0
    n_out = 0
    for pid, f in index.postings.get(term_id, ()):
        if pid in leaves:
            sum_f += f
        else:
            n_out += 1
    if sum_f < 1:
        raise ValueError(
            f"term {term_id} does not occur in any leaf of category {category_id}"
        )
    if literal_denominator:
        denom = 1 + (index.n_pages - len(leaves))
    else:
        denom = 1 + n_out
    return (1.0 + math.log(sum_f)) * math.log(index.n_pages / denom)


def category_term_weights(
    category_id: int,
    index: EsaIndex,
    ls: LeafSetIndex,
    max_nnz: int = 1000,
    literal_denominator: bool = False,
) -> dict[int, float]:
    """Categorical tfidf of the category's max_nnz most frequent terms.

    Ranking is by aggregate raw frequency over F(c), ties broken toward
    the smaller term id. Empty leaf set gives an empty map.
    """
    agg: Counter[int] = Counter()
    for pid in ls.pages_of(category_id):
        for tid, f in index.page_term_freqs[pid].items():
            agg[tid] += f
    ranked = sorted(agg.items(), key=lambda kv: (-kv[1], kv[0]))[:max_nnz]
    return {
        tid: categorical_tfidf(tid, category_id, index, ls, literal_denominator)
        for tid, _ in sorted(ranked)
    }


def category_vector(
    category_id: int,
    index: EsaIndex,
    ls: LeafSetIndex,
    max_nnz: int = 1000,
    literal_denominator: bool = False,
) -> SparseVector:
    """Concept-space category vector from truncated categorical tfidfs.

    Same normalization policy as document vectors: divide by the norm of
    the tfidf coefficient list, then renormalize the result to unit
    length. Categories with an empty leaf set get the zero vector.
    """
    weights = category_term_weights(category_id, index, ls, max_nnz, literal_denominator)
    acc: dict[int, float] = {}
    sq = 0.0
    for tid in sorted(weights):
        t = weights[tid]
        if t == 0.0:
            continue
        sq += t * t
        for dim, w in zip(*_word_entries(index, tid)):
            acc[dim] = acc.get(dim, 0.0) + t * w
    if not acc or sq == 0.0:
        return SparseVector.zero(CONCEPT_SPACE)
    denom = math.sqrt(sq)
    return SparseVector.from_dict({d: v / denom for d, v in acc.items()}, CONCEPT_SPACE).unit()


class WeightedEdge(NamedTuple):
    src: Node
    dst: Node
    kind: str
    p: float
    cost: float


def weight_edges(g: CategoryGraph, vectors: dict[Node, SparseVector]) -> list[WeightedEdge]:
    """Weight every membership/inclusion edge by the dot product of its
    endpoint vectors (unit or zero, so p lies in [0,1]); cost = 1 - p."""
    out = []
    for src, dst, kind in g.edges():
        p = vectors[src].dot(vectors[dst])
        p = min(1.0, max(0.0, p))
        out.append(WeightedEdge(src, dst, kind, p, 1.0 - p))
    return out


def weighted_edges_to_tsv(edges: list[WeightedEdge]) -> str:
    lines = ["from\tto\tkind\tp\tcost\n"]
    for e in edges:
        lines.append(f"{e.src}\t{e.dst}\t{e.kind}\t{e.p:.17g}\t{e.cost:.17g}\n")
    return "".join(lines)


@dataclass(frozen=True)
class CycleReport:
    """Distinct directed cycles among inclusion edges, with walk statistics
    when produced by walk mode."""

    mode: str
    cycles: tuple[tuple[int, ...], ...]
    cycle_hits: dict[tuple[int, ...], int]
    n_walks: int = 0
    n_cycle_walks: int = 0
    n_root_walks: int = 0
    n_dead_end_walks: int = 0

    def lengths(self) -> Counter:
        return Counter(len(c) for c in self.cycles)

    def to_tsv(self) -> str:
        lines = ["length\tcycle\thits\n"]
        for cyc in self.cycles:
            hits = self.cycle_hits.get(cyc, 0)
            lines.append(f"{len(cyc)}\t{'->'.join(map(str, cyc))}\t{hits}\n")
        return "".join(lines)


def _canonical_cycle(nodes: tuple[int, ...]) -> tuple[int, ...]:
    # Rotate so the smallest id comes first; direction preserved.
    k = nodes.index(min(nodes))
    return nodes[k:] + nodes[:k]


def _seeded_pick(options: list[int], node: Node, seed: int) -> int:
    # Fixed pseudo-random choice per (node, seed): stable across runs and
    # platforms, mirroring a "random but fixed during the experiment" pick.
    digest = hashlib.sha256(f"{seed}:{node}".encode()).digest()
    return sorted(options)[int.from_bytes(digest[:8], "little") % len(options)]


def cycle_census(g: CategoryGraph, mode: str = "exact", seed: int = 0) -> CycleReport:
    """Cycle diagnostics on the inclusion subgraph.

    exact mode enumerates every directed 2-cycle and 3-cycle. walk mode
    starts one walk per page, following category links with a per-node
    seeded fixed choice, and records whether each walk terminates in a
    cycle (counted per distinct cycle), at the root, or at a dead end.
    """
    succ: dict[int, list[int]] = {c: [] for c in g.category_ids}
    for child, parent in sorted(g.inclusion):
        succ[child].append(parent)
    if mode == "exact":
        found = set()
        for a in g.category_ids:
            for b in succ[a]:
                if a in succ[b] and a < b:
                    found.add(_canonical_cycle((a, b)))
                for c in succ[b]:
                    if c != a and a in succ[c]:
                        found.add(_canonical_cycle((a, b, c)))
        cycles = tuple(sorted(found, key=lambda c: (len(c), c)))
        return CycleReport(mode="exact", cycles=cycles, cycle_hits={})
    if mode != "walk":
        raise ValueError(f"unknown cycle census mode {mode!r}")
    hits: Counter[tuple[int, ...]] = Counter()
    n_root = n_dead = n_cycle = 0
    member_map: dict[int, list[int]] = {}
    for pid, cid in sorted(g.membership):
        member_map.setdefault(pid, []).append(cid)
    for pid in sorted(g.page_ids):
        cats = member_map.get(pid)
        if not cats:
            n_dead += 1
            continue
        current = _seeded_pick(cats, Node.page(pid), seed)
        path = []
        pos: dict[int, int] = {}
        while True:
            if current in pos:
                cyc = _canonical_cycle(tuple(path[pos[current]:]))
                hits[cyc] += 1
                n_cycle += 1
                break
            pos[current] = len(path)
            path.append(current)
            parents = succ[current]
            if not parents:
                if current == g.root_id:
                    n_root += 1
                else:
                    n_dead += 1
                break
            current = _seeded_pick(parents, Node.category(current), seed)
    cycles = tuple(sorted(hits, key=lambda c: (len(c), c)))
    return CycleReport(
        mode="walk",
        cycles=cycles,
        cycle_hits=dict(hits),
        n_walks=len(g.page_ids),
        n_cycle_walks=n_cycle,
        n_root_walks=n_root,
        n_dead_end_walks=n_dead,
    )


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of log(count) vs log(degree) over nonzero bins."""

    alpha: float
    degenerate: bool

    def to_tsv_field(self) -> str:
        return "nan" if self.degenerate else f"{self.alpha:.6g}"


def fit_power_law(degrees) -> PowerLawFit:
    """Estimate the exponent of a degree distribution ~ d^-alpha.

    Uses the slope of log(count) against log(degree) over bins with
    degree >= 1 and count >= 1. Fewer than two distinct such bins is a
    degenerate fit, reported as NaN with a flag.
    """
    hist = Counter(d for d in degrees if d >= 1)
    if len(hist) < 2:
        return PowerLawFit(alpha=float("nan"), degenerate=True)
    xs = np.log(np.array(sorted(hist), dtype=float))
    ys = np.log(np.array([hist[d] for d in sorted(hist)], dtype=float))
    slope, _intercept = np.polyfit(xs, ys, 1)
    return PowerLawFit(alpha=float(-slope), degenerate=False)


def sample_power_law_degrees(alpha: float, n: int, seed: int, d_max: int = 30) -> list[int]:
    """Draw n degrees from the discrete distribution P(d) ~ d^-alpha on 1..d_max."""
    import random as _random

    rng = _random.Random(seed)
    support = list(range(1, d_max + 1))
    weights = [d ** -alpha for d in support]
    return rng.choices(support, weights=weights, k=n)


@dataclass(frozen=True)
class DegreeStats:
    """Degree histograms over category nodes, with power-law fits.

    In-degree counts all incoming edges of a category (memberships and
    inclusions); out-degree counts its outgoing inclusion edges.
    """

    in_hist: dict[int, int]
    out_hist: dict[int, int]
    in_fit: PowerLawFit
    out_fit: PowerLawFit

    def to_tsv(self) -> str:
        lines = [f"# alpha_in\t{self.in_fit.to_tsv_field()}\n",
                 f"# alpha_out\t{self.out_fit.to_tsv_field()}\n",
                 "direction\tdegree\tcount\n"]
        for d in sorted(self.in_hist):
            lines.append(f"in\t{d}\t{self.in_hist[d]}\n")
        for d in sorted(self.out_hist):
            lines.append(f"out\t{d}\t{self.out_hist[d]}\n")
        return "".join(lines)


def degree_stats(g: CategoryGraph) -> DegreeStats:
    in_deg = {c: 0 for c in g.category_ids}
    out_deg = {c: 0 for c in g.category_ids}
    for _pid, cid in g.membership:
        in_deg[cid] += 1
    for child, parent in g.inclusion:
        out_deg[child] += 1
        in_deg[parent] += 1
    return DegreeStats(
        in_hist=dict(Counter(in_deg.values())),
        out_hist=dict(Counter(out_deg.values())),
        in_fit=fit_power_law(in_deg.values()),
        out_fit=fit_power_law(out_deg.values()),
    )
