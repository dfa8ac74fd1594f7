"""From category digraph to minimum-cost spanning arborescence.

Builds the category graph of a synthetic wiki, weights each edge by the
ESA relatedness of its endpoints (cost = 1 - relatedness), reverses the
graph so edges point away from the root, and extracts the minimum
arborescence with Chu-Liu/Edmonds. Prints the tree and a few ancestor
chains.

Run:  python3 demos/arborescence_tour.py
"""

from wikistrata import (
    Analyzer,
    Node,
    ancestors,
    build_graph,
    build_index,
    build_vocabulary,
    category_vector,
    chu_liu_edmonds,
    degree_stats,
    document_vector,
    gen_synthetic_wiki,
    leaf_sets,
    reverse_and_cost,
    weight_edges,
)


def main():
    store, _labels = gen_synthetic_wiki(
        seed=1, n_topics=4, pages_per_topic=10, vocab_per_topic=20, depth=2
    )
    graph = build_graph(store)
    stats = degree_stats(graph)
    print(f"category graph: {len(graph.category_ids)} categories, "
          f"{len(graph.inclusion)} inclusion edges, "
          f"{len(graph.membership)} memberships")
    print(stats.to_tsv())

    analyzer = Analyzer()
    vocab = build_vocabulary(store, analyzer, min_df=1)
    index = build_index(store, analyzer, vocab)
    ls = leaf_sets(graph)

    # Node vectors: concept vectors for pages, aggregated vectors for
    # categories (over their leaf pages, truncated to the top 1000 terms).
    vectors = {
        Node.category(c): category_vector(c, index, ls, 1000)
        for c in graph.category_ids
    }
    for pid in index.page_ids:
        voc = index.vocabulary
        terms = [
            voc.id_to_term[t]
            for t, f in sorted(index.page_term_freqs[pid].items())
            for _ in range(f)
        ]
        vectors[Node.page(pid)] = document_vector(index, terms)

    edges = weight_edges(graph, vectors)
    strongest = max(edges, key=lambda e: e.p)
    print(f"strongest edge: {strongest.src} -> {strongest.dst} "
          f"(relatedness {strongest.p:.4f}, cost {strongest.cost:.4f})")

    digraph = reverse_and_cost(graph, edges, graph.root_id)
    tree = chu_liu_edmonds(digraph)
    print(f"\narborescence: {len(tree.parent)} non-root nodes, "
          f"total cost {tree.total_cost:.4f}")

    cat_rows = sorted(
        (node, parent, cost)
        for node, (parent, cost) in tree.parent.items()
        if node.kind == "c"
    )
    print("\ncategory skeleton (node <- parent, cost):")
    for node, parent, cost in cat_rows:
        print(f"  {node} <- {parent}   {cost:.4f}")

    print("\nancestor chains of the first three pages:")
    for pid in sorted(index.page_ids)[:3]:
        chain = ancestors(tree, Node.page(pid), 3)
        print(f"  p:{pid} -> " + " -> ".join(str(n) for n in chain))


if __name__ == "__main__":
    main()
