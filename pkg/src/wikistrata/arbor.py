"""Minimum-cost spanning arborescence via Chu-Liu/Edmonds.

Edges point from the root downward (the reversed membership/inclusion
relations), so every node must be reachable from the root. The solver is
the recursive contract-cycles formulation; a brute-force enumerator over
parent functions serves as an independent oracle on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from wikistrata.catgraph import CategoryGraph, Node, WeightedEdge

__all__ = [
    "ArborError",
    "RootedCostDigraph",
    "Arborescence",
    "reverse_and_cost",
    "chu_liu_edmonds",
    "brute_force_min_arborescence",
    "ancestors",
    "arborescence_to_tsv",
    "parse_arborescence_tsv",
]


class ArborError(ValueError):
    """Raised when no spanning arborescence exists (unreachable nodes)."""

    def __init__(self, unreachable):
        self.unreachable = sorted(unreachable)
        super().__init__(
            "no spanning arborescence: unreachable nodes "
            + ", ".join(str(n) for n in self.unreachable)
        )


@dataclass(frozen=True)
class RootedCostDigraph:
    """Digraph with non-negative finite edge costs and a designated root.

    No self-loops; parallel edges on the same ordered pair collapse to the
    cheapest one at construction.
    """

    nodes: tuple
    edges: dict
    root: object

    @classmethod
    def from_edges(cls, nodes, edge_costs, root) -> "RootedCostDigraph":
        edges = {}
        for (u, v), cost in edge_costs.items() if isinstance(edge_costs, dict) else (
            ((u, v), c) for u, v, c in edge_costs
        ):
            if u == v:
                continue
            if (u, v) not in edges or cost < edges[(u, v)]:
                edges[(u, v)] = cost
        return cls(nodes=tuple(sorted(nodes)), edges=edges, root=root)


@dataclass(frozen=True)
class Arborescence:
    """Parent function over non-root nodes, with per-edge and total costs."""

    parent: dict
    root: object
    total_cost: float

    def nodes(self):
        return [self.root] + sorted(self.parent)


def reverse_and_cost(g: CategoryGraph, weights: list[WeightedEdge], root_id: int) -> RootedCostDigraph:
    """Reverse each membership/inclusion edge and attach cost 1 - p."""
    nodes = g.nodes
    edge_costs = {}
    for e in weights:
        key = (e.dst, e.src)
        if key not in edge_costs or e.cost < edge_costs[key]:
            edge_costs[key] = e.cost
    return RootedCostDigraph.from_edges(nodes, edge_costs, Node.category(root_id))


def _check_reachable(g: RootedCostDigraph) -> None:
    succ = {}
    for (u, v) in g.edges:
        succ.setdefault(u, []).append(v)
    seen = {g.root}
    frontier = [g.root]
    while frontier:
        u = frontier.pop()
        for v in succ.get(u, ()):
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    unreachable = [n for n in g.nodes if n not in seen]
    if unreachable:
        raise ArborError(unreachable)


def _find_cycle(best_parent: dict) -> list | None:
    # best_parent maps node -> chosen source; returns one cycle's nodes.
    color = {}
    for start in best_parent:
        if color.get(start):
            continue
        path = []
        v = start
        while v in best_parent and color.get(v) is None:
            color[v] = "open"
            path.append(v)
            v = best_parent[v]
        if color.get(v) == "open":
            return path[path.index(v):]
        for w in path:
            color[w] = "done"
        color[v] = color.get(v, "done")
    return None


def chu_liu_edmonds(g: RootedCostDigraph) -> Arborescence:
    """Minimum-cost spanning arborescence rooted at g.root.

    Deterministic: among equal-cost incoming edges the one with the
    smallest source id wins; nodes are relabeled to dense integers in
    sorted order, so any sortable node labels work.
    """
    _check_reachable(g)
    labels = sorted(g.nodes)
    idx = {n: i for i, n in enumerate(labels)}
    root = idx[g.root]
    # Edge payloads carry the original (u, v) pair so contraction levels
    # can always report back in terms of the input graph.
    edges = {
        (idx[u], idx[v]): (cost, (u, v))
        for (u, v), cost in g.edges.items()
    }
    next_label = len(labels)

    def solve(nodes: set, edges: dict, root: int, next_label: int) -> set:
        in_edges: dict[int, list] = {v: [] for v in nodes if v != root}
        for (u, v), (cost, orig) in edges.items():
            if v != root and u in nodes and v in nodes:
                in_edges[v].append((cost, u, orig))
        best = {}
        for v, cands in in_edges.items():
            best[v] = min(cands)  # (cost, source, orig): cost then smallest source
        cycle = _find_cycle({v: u for v, (_c, u, _o) in best.items()})
        if cycle is None:
            return {orig for (_c, _u, orig) in best.values()}
        cyc = set(cycle)
        super_node = next_label
        entry_targets = {}  # orig edge -> the cycle node it pointed at
        new_edges = {}
        for (u, v), (cost, orig) in edges.items():
            if u not in nodes or v not in nodes:
                continue
            if u in cyc and v in cyc:
                continue
            if v in cyc:
                reduced = cost - best[v][0]
                key = (u, super_node)
                if key not in new_edges or (reduced, v) < (new_edges[key][0], entry_targets[new_edges[key][1]]):
                    new_edges[key] = (reduced, orig)
                    entry_targets[orig] = v
            elif u in cyc:
                key = (super_node, v)
                if key not in new_edges or cost < new_edges[key][0]:
                    new_edges[key] = (cost, orig)
            else:
                new_edges[(u, v)] = (cost, orig)
        sub_nodes = (nodes - cyc) | {super_node}
        chosen = solve(sub_nodes, new_edges, root, next_label + 1)
        entering = [o for o in chosen if o in entry_targets]
        assert len(entering) == 1
        broken = entry_targets[entering[0]]
        for v in cycle:
            if v != broken:
                chosen.add(best[v][2])
        return chosen

    chosen = solve(set(range(len(labels))), edges, root, next_label)
    parent = {}
    total = 0.0
    for (u, v) in chosen:
        cost = g.edges[(u, v)]
        parent[v] = (u, cost)
        total += cost
    return Arborescence(parent=parent, root=g.root, total_cost=total)


def brute_force_min_arborescence(g: RootedCostDigraph) -> Arborescence:
    """Enumerate every parent function and keep the cheapest arborescence.

    Only feasible for small instances (<= 8 non-root nodes). Ties on total
    cost break toward the lexicographically smallest parent assignment.
    """
    non_root = [n for n in g.nodes if n != g.root]
    if len(non_root) > 8:
        raise ValueError("brute force limited to 8 non-root nodes")
    _check_reachable(g)
    in_edges = {v: sorted(
        ((cost, u) for (u, v2), cost in g.edges.items() if v2 == v)
    ) for v in non_root}
    best = None
    for combo in product(*(in_edges[v] for v in non_root)):
        parent = {v: u for v, (_c, u) in zip(non_root, combo)}
        if not _is_arborescence(parent, g.root):
            continue
        total = sum(c for c, _u in combo)
        key = (total, tuple(sorted((v, parent[v]) for v in non_root)))
        if best is None or key < best[0]:
            best = (key, parent, total)
    if best is None:
        raise ArborError(non_root)
    _key, parent, total = best
    return Arborescence(
        parent={v: (u, g.edges[(u, v)]) for v, u in parent.items()},
        root=g.root,
        total_cost=total,
    )


def _is_arborescence(parent: dict, root) -> bool:
    for start in parent:
        seen = set()
        v = start
        while v != root:
            if v in seen or v not in parent:
                return False
            seen.add(v)
            v = parent[v]
    return True


def ancestors(a: Arborescence, node, k: int) -> list:
    """Up to k successive parents of a node, truncated at the root."""
    if node != a.root and node not in a.parent:
        raise KeyError(f"unknown node {node}")
    out = []
    v = node
    for _ in range(k):
        if v == a.root:
            break
        v = a.parent[v][0]
        out.append(v)
    return out


def arborescence_to_tsv(a: Arborescence) -> str:
    lines = ["node\tparent\tcost\n", f"{a.root}\t-\t0\n"]
    for v in sorted(a.parent):
        u, cost = a.parent[v]
        lines.append(f"{v}\t{u}\t{cost:.17g}\n")
    return "".join(lines)


def parse_arborescence_tsv(text: str) -> Arborescence:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    root = None
    parent = {}
    total = 0.0
    for ln in lines[1:]:
        node_s, parent_s, cost_s = ln.split("\t")
        if parent_s == "-":
            root = Node.parse(node_s)
        else:
            cost = float(cost_s)
            parent[Node.parse(node_s)] = (Node.parse(parent_s), cost)
            total += cost
    if root is None:
        raise ValueError("arborescence file has no root row")
    return Arborescence(parent=parent, root=root, total_cost=total)
