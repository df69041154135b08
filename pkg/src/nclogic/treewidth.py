"""Tree decompositions, nice normalization, and the DP solvers over them.

Three dynamic programs:

- ``dp_cgs_degree``: satisfiability table over orientations of all edges
  incident to the bag (2^(bag-incident edges) states per node);
- ``dp_cgs_unary``: satisfiability table over saturated inflow vectors of
  the bag vertices, with each edge charged at its topmost co-occurrence
  node and demand checks deferred to the forget node;
- ``dp_bounded_ncl``: bounded reconfiguration over reversal orderings of
  bag-incident edges.

All three are exercised against the exhaustive solvers in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    Configuration,
    ConstraintGraph,
    LimitExceeded,
    inflows,
    is_legal,
)

NodeKind = tuple[str, Optional[int]]  # ("leaf"|"introduce"|"forget"|"join", vertex)


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags on an (unrooted) tree; tree edges as sorted id pairs."""

    bags: dict[int, frozenset[int]]
    tree_edges: frozenset[tuple[int, int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def neighbors(self, node: int) -> list[int]:
        out = []
        for a, b in self.tree_edges:
            if a == node:
                out.append(b)
            elif b == node:
                out.append(a)
        return sorted(out)


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Rooted decomposition with leaf/introduce/forget/join nodes only."""

    bags: dict[int, frozenset[int]]
    children: dict[int, tuple[int, ...]]
    kinds: dict[int, NodeKind]
    root: int

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    @property
    def tree_edges(self) -> frozenset[tuple[int, int]]:
        out = set()
        for parent, kids in self.children.items():
            for child in kids:
                out.add((min(parent, child), max(parent, child)))
        return frozenset(out)

    def postorder(self) -> list[int]:
        order: list[int] = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
            else:
                stack.append((node, True))
                for child in reversed(self.children.get(node, ())):
                    stack.append((child, False))
        return order

    @staticmethod
    def from_parts(
        td: TreeDecomposition, kinds: dict[int, NodeKind]
    ) -> "NiceTreeDecomposition":
        """Rebuild the rooted form; the root is the unique non-child node.

        Serialized nice decompositions list tree edges as (parent, child).
        """
        child_nodes = {b for _, b in td.tree_edges}
        roots = [n for n in td.bags if n not in child_nodes]
        if len(roots) != 1:
            raise ValueError("nice decomposition must have exactly one root")
        children: dict[int, tuple[int, ...]] = {n: () for n in td.bags}
        for a, b in sorted(td.tree_edges):
            children[a] = children[a] + (b,)
        return NiceTreeDecomposition(
            bags=dict(td.bags), children=children, kinds=dict(kinds), root=roots[0]
        )


def validate_decomposition(g: ConstraintGraph, td) -> list[str]:
    """Empty report iff td is a tree and satisfies the three bag conditions."""
    report: list[str] = []
    nodes = sorted(td.bags)
    if not nodes:
        report.append("decomposition has no nodes")
        return report
    edges = list(td.tree_edges)
    for a, b in edges:
        if a not in td.bags or b not in td.bags:
            report.append(f"tree edge ({a},{b}) references unknown node")
            return report
    if len(edges) != len(nodes) - 1:
        report.append(
            f"tree has {len(edges)} edges over {len(nodes)} nodes, expected {len(nodes) - 1}"
        )
    adj: dict[int, list[int]] = {n: [] for n in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(nodes):
        report.append("decomposition tree is disconnected")

    covered = set().union(*td.bags.values()) if td.bags else set()
    for v in range(g.num_vertices):
        if v not in covered:
            report.append(f"vertex {v} appears in no bag")
    for e, (u, v, _) in enumerate(g.edges):
        if not any(u in bag and v in bag for bag in td.bags.values()):
            report.append(f"edge {e} ({u},{v}) is covered by no bag")
    for v in covered:
        occ = [n for n in nodes if v in td.bags[n]]
        occ_set = set(occ)
        comp = {occ[0]}
        stack = [occ[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in occ_set and y not in comp:
                    comp.add(y)
                    stack.append(y)
        if comp != occ_set:
            report.append(f"occurrence subtree of vertex {v} is disconnected")
    return report


def validate_nice(g: ConstraintGraph, ntd: NiceTreeDecomposition) -> list[str]:
    report = validate_decomposition(g, ntd)
    for node in sorted(ntd.bags):
        kind, v = ntd.kinds[node]
        kids = ntd.children.get(node, ())
        bag = ntd.bags[node]
        if kind == "leaf":
            if kids:
                report.append(f"leaf node {node} has children")
            if len(bag) != 1:
                report.append(f"leaf node {node} bag has {len(bag)} vertices")
        elif kind == "introduce":
            if len(kids) != 1:
                report.append(f"introduce node {node} needs exactly one child")
            elif ntd.bags[kids[0]] | {v} != bag or v in ntd.bags[kids[0]]:
                report.append(f"introduce node {node} does not add exactly {v}")
        elif kind == "forget":
            if len(kids) != 1:
                report.append(f"forget node {node} needs exactly one child")
            elif bag | {v} != ntd.bags[kids[0]] or v in bag:
                report.append(f"forget node {node} does not drop exactly {v}")
        elif kind == "join":
            if len(kids) != 2:
                report.append(f"join node {node} needs exactly two children")
            elif any(ntd.bags[c] != bag for c in kids):
                report.append(f"join node {node} children bags differ from its own")
        else:
            report.append(f"node {node} has unknown kind {kind!r}")
    return report


def to_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    """Normalize a valid decomposition: same width, O(width * nodes) nodes.

    The produced root carries an empty bag (a forget chain), which the DP
    solvers rely on: every vertex is eventually forgotten.
    """
    if not td.bags:
        raise ValueError("cannot normalize an empty decomposition")
    bags: list[frozenset[int]] = []
    children: list[tuple[int, ...]] = []
    kinds: list[NodeKind] = []

    def new_node(bag: frozenset[int], kind: NodeKind, kids: tuple[int, ...]) -> int:
        bags.append(bag)
        kinds.append(kind)
        children.append(kids)
        return len(bags) - 1

    def leaf_chain(bag: frozenset[int]) -> int:
        vs = sorted(bag)
        node = new_node(frozenset({vs[0]}), ("leaf", None), ())
        have = {vs[0]}
        for v in vs[1:]:
            have.add(v)
            node = new_node(frozenset(have), ("introduce", v), (node,))
        return node

    def adapt(node: int, from_bag: frozenset[int], to_bag: frozenset[int]) -> int:
        cur = set(from_bag)
        for v in sorted(from_bag - to_bag):
            cur.discard(v)
            node = new_node(frozenset(cur), ("forget", v), (node,))
        for v in sorted(to_bag - from_bag):
            cur.add(v)
            node = new_node(frozenset(cur), ("introduce", v), (node,))
        return node

    # Root the input tree deterministically at its smallest node id.
    nodes = sorted(td.bags)
    adj: dict[int, list[int]] = {n: [] for n in nodes}
    for a, b in td.tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    root_in = nodes[0]
    order: list[tuple[int, Optional[int]]] = []
    stack: list[tuple[int, Optional[int]]] = [(root_in, None)]
    seen = {root_in}
    while stack:
        node, parent = stack.pop()
        order.append((node, parent))
        for nb in sorted(adj[node]):
            if nb not in seen:
                seen.add(nb)
                stack.append((nb, node))

    built: dict[int, int] = {}
    for node, parent in reversed(order):
        bag = td.bags[node]
        kid_nodes = [nb for nb in sorted(adj[node]) if nb != parent]
        if not bag and not kid_nodes:
            raise ValueError("decomposition node with empty bag and no children")
        if not kid_nodes:
            built[node] = leaf_chain(bag)
            continue
        adapted = [adapt(built[k], td.bags[k], bag) for k in kid_nodes]
        if not bag:
            # A bag can only be empty at the top of the input tree; join
            # nodes need identical nonempty bags, so splice children by
            # forgetting down each side and chaining.  Rare; handled by
            # rebuilding from a nonempty neighbour instead.
            raise ValueError("internal empty bags are not supported; prune them first")
        cur = adapted[0]
        for other in adapted[1:]:
            cur = new_node(bag, ("join", None), (cur, other))
        built[node] = cur

    top = built[root_in]
    cur_bag = set(td.bags[root_in])
    for v in sorted(cur_bag):
        cur_bag.discard(v)
        top = new_node(frozenset(cur_bag), ("forget", v), (top,))

    return NiceTreeDecomposition(
        bags={i: b for i, b in enumerate(bags)},
        children={i: k for i, k in enumerate(children)},
        kinds={i: k for i, k in enumerate(kinds)},
        root=top,
    )


def heuristic_decomposition(g: ConstraintGraph) -> TreeDecomposition:
    """Min-fill greedy elimination; deterministic with ties by vertex id."""
    n = g.num_vertices
    if n == 0:
        return TreeDecomposition(bags={0: frozenset()}, tree_edges=frozenset())
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u, v, _ in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    remaining = set(range(n))
    bags: dict[int, frozenset[int]] = {}
    elim_index: dict[int, int] = {}
    bag_neighbors: dict[int, set[int]] = {}
    order: list[int] = []
    while remaining:
        best, best_key = None, None
        for v in sorted(remaining):
            nb = adj[v] & remaining
            fill = sum(
                1
                for a, b in itertools.combinations(sorted(nb), 2)
                if b not in adj[a]
            )
            key = (fill, len(nb), v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        v = best
        nb = adj[v] & remaining
        for a, b in itertools.combinations(sorted(nb), 2):
            adj[a].add(b)
            adj[b].add(a)
        idx = len(order)
        bags[idx] = frozenset({v} | nb)
        bag_neighbors[idx] = set(nb)
        elim_index[v] = idx
        order.append(v)
        remaining.discard(v)
    tree_edges = set()
    for idx in range(len(order)):
        nb = bag_neighbors[idx]
        later = [elim_index[u] for u in nb if elim_index[u] > idx]
        if later:
            parent = min(later)
        elif idx + 1 < len(order):
            parent = idx + 1  # disconnected component: chain the bags
        else:
            continue
        tree_edges.add((min(idx, parent), max(idx, parent)))
    return TreeDecomposition(bags=bags, tree_edges=frozenset(tree_edges))


def _bag_domains(g: ConstraintGraph, ntd: NiceTreeDecomposition) -> dict[int, list[int]]:
    """Sorted edge ids incident to each node's bag."""
    out: dict[int, list[int]] = {}
    for node, bag in ntd.bags.items():
        dom = set()
        for v in bag:
            dom.update(g.incident[v])
        out[node] = sorted(dom)
    return out


def _check_inputs(g: ConstraintGraph, ntd: NiceTreeDecomposition) -> None:
    report = validate_nice(g, ntd)
    if report:
        raise ValueError("invalid nice decomposition: " + "; ".join(report[:3]))


def dp_cgs_degree(
    g: ConstraintGraph,
    ntd: NiceTreeDecomposition,
    max_states: int = 1 << 22,
) -> Optional[Configuration]:
    """Satisfiability DP over orientations of bag-incident edges.

    Returns a witness configuration (when satisfiable and requested) or
    None when unsatisfiable.  Matches ``solve_cgs_bruteforce`` decisions.
    """
    if g.num_edges == 0:
        if all(need == 0 for need in g.min_inflow):
            return Configuration(0, 0)
        return None
    _check_inputs(g, ntd)
    domains = _bag_domains(g, ntd)
    tables: dict[int, set[tuple[int, ...]]] = {}

    def restrict(state, from_dom, to_dom):
        idx = {e: i for i, e in enumerate(from_dom)}
        return tuple(state[idx[e]] for e in to_dom)

    def vertex_ok(v: int, dom: list[int], state: tuple[int, ...]) -> bool:
        total = 0
        for e in g.incident[v]:
            i = dom.index(e)
            u, w, wt = g.edges[e]
            head = w if state[i] else u
            if head == v:
                total += wt
        return total >= g.min_inflow[v]

    for node in ntd.postorder():
        kind, v = ntd.kinds[node]
        dom = domains[node]
        if kind == "leaf":
            table = set()
            for bits in itertools.product((0, 1), repeat=len(dom)):
                if vertex_ok(next(iter(ntd.bags[node])), dom, bits):
                    table.add(bits)
        elif kind == "introduce":
            child = ntd.children[node][0]
            cdom = domains[child]
            new_edges = [e for e in dom if e not in set(cdom)]
            cpos = {e: i for i, e in enumerate(cdom)}
            table = set()
            for cstate in tables[child]:
                for extra in itertools.product((0, 1), repeat=len(new_edges)):
                    epos = dict(zip(new_edges, extra))
                    state = tuple(
                        cstate[cpos[e]] if e in cpos else epos[e] for e in dom
                    )
                    if vertex_ok(v, dom, state):
                        table.add(state)
        elif kind == "forget":
            child = ntd.children[node][0]
            cdom = domains[child]
            table = {restrict(cs, cdom, dom) for cs in tables[child]}
        else:  # join
            c1, c2 = ntd.children[node]
            table = tables[c1] & tables[c2]
        if len(table) > max_states:
            raise LimitExceeded("degree DP table exceeded max_states")
        tables[node] = table

    if () not in tables[ntd.root]:
        return None

    assignment: dict[int, int] = {}

    def walk(node: int, state: tuple[int, ...]) -> None:
        kind, v = ntd.kinds[node]
        dom = domains[node]
        for e, bit in zip(dom, state):
            assignment[e] = bit
        if kind == "leaf":
            return
        if kind == "introduce":
            child = ntd.children[node][0]
            walk(child, restrict(state, dom, domains[child]))
        elif kind == "forget":
            child = ntd.children[node][0]
            cdom = domains[child]
            for cs in sorted(tables[child]):
                if restrict(cs, cdom, dom) == state:
                    walk(child, cs)
                    return
            raise AssertionError("no matching child state during reconstruction")
        else:
            c1, c2 = ntd.children[node]
            walk(c1, state)
            walk(c2, state)

    walk(ntd.root, ())
    bits = 0
    for e, bit in assignment.items():
        if bit:
            bits |= 1 << e
    witness = Configuration(bits, g.num_edges)
    if not is_legal(g, witness):
        raise AssertionError("degree DP produced an illegal witness")
    return witness


def _assigned_edges(g: ConstraintGraph, ntd: NiceTreeDecomposition) -> dict[int, list[int]]:
    """Charge every edge to its topmost node where both endpoints co-occur."""
    parent: dict[int, Optional[int]] = {ntd.root: None}
    for node, kids in ntd.children.items():
        for child in kids:
            parent[child] = node
    out: dict[int, list[int]] = {node: [] for node in ntd.bags}
    for e, (u, v, _) in enumerate(g.edges):
        charged = []
        for node, bag in ntd.bags.items():
            if u in bag and v in bag:
                p = parent[node]
                if p is None or u not in ntd.bags[p] or v not in ntd.bags[p]:
                    charged.append(node)
        if len(charged) != 1:
            raise AssertionError(
                f"edge {e} charged to {len(charged)} nodes; decomposition invalid"
            )
        out[charged[0]].append(e)
    return out


def dp_cgs_unary(
    g: ConstraintGraph,
    ntd: NiceTreeDecomposition,
    want_witness: bool = True,
    max_states: int = 1 << 22,
) -> tuple[bool, Optional[Configuration]]:
    """Satisfiability DP over saturated bag inflow vectors.

    Inflows are capped at each vertex's demand, the demand check happens
    when the vertex is forgotten, and each edge is decided at its topmost
    co-occurrence node.  Table size is O((1 + max inflow)^bag).
    """
    if g.num_edges == 0:
        ok = all(need == 0 for need in g.min_inflow)
        return ok, (Configuration(0, 0) if ok else None)
    _check_inputs(g, ntd)
    charged = _assigned_edges(g, ntd)
    order: dict[int, list[int]] = {node: sorted(ntd.bags[node]) for node in ntd.bags}
    # tables[node]: state -> (base_record, ((edge, toward_v), ...))
    # base_record is ("leaf",) | ("intro", child_state) | ("forget", child_state)
    # | ("join", state1, state2); the edge choices cover charged[node].
    tables: dict[int, dict[tuple[int, ...], tuple]] = {}

    def saturate(x: int, value: int) -> int:
        return min(value, g.min_inflow[x])

    for node in ntd.postorder():
        kind, v = ntd.kinds[node]
        vs = order[node]
        pos = {x: i for i, x in enumerate(vs)}
        base: dict[tuple[int, ...], tuple] = {}
        if kind == "leaf":
            base[(0,)] = ("leaf",)
        elif kind == "introduce":
            child = ntd.children[node][0]
            insert_at = vs.index(v)
            for cstate in sorted(tables[child]):
                lst = list(cstate)
                lst.insert(insert_at, 0)
                base.setdefault(tuple(lst), ("intro", cstate))
        elif kind == "forget":
            child = ntd.children[node][0]
            drop = order[child].index(v)
            for cstate in sorted(tables[child]):
                if cstate[drop] < g.min_inflow[v]:
                    continue  # the deferred demand check
                base.setdefault(cstate[:drop] + cstate[drop + 1:], ("forget", cstate))
        else:
            c1, c2 = ntd.children[node]
            for s1 in sorted(tables[c1]):
                for s2 in sorted(tables[c2]):
                    merged = tuple(
                        saturate(x, a + b) for x, a, b in zip(vs, s1, s2)
                    )
                    base.setdefault(merged, ("join", s1, s2))

        table = {state: (rec, ()) for state, rec in base.items()}
        for e in charged[node]:
            u, w_, wt = g.edges[e]
            nxt: dict[tuple[int, ...], tuple] = {}
            for state in sorted(table):
                rec, choices = table[state]
                for toward_v in (False, True):
                    gain = w_ if toward_v else u
                    lst = list(state)
                    lst[pos[gain]] = saturate(gain, lst[pos[gain]] + wt)
                    nxt.setdefault(tuple(lst), (rec, choices + ((e, toward_v),)))
            table = nxt
        if len(table) > max_states:
            raise LimitExceeded("unary DP table exceeded max_states")
        tables[node] = table

    root_table = tables[ntd.root]
    if not root_table:
        return False, None
    if not want_witness:
        return True, None

    assignment: dict[int, bool] = {}

    def unwind(node: int, state: tuple[int, ...]) -> None:
        rec, choices = tables[node][state]
        for e, toward_v in choices:
            assignment[e] = toward_v
        if rec[0] == "leaf":
            return
        if rec[0] in ("intro", "forget"):
            unwind(ntd.children[node][0], rec[1])
        else:
            c1, c2 = ntd.children[node]
            unwind(c1, rec[1])
            unwind(c2, rec[2])

    unwind(ntd.root, sorted(root_table)[0])
    bits = 0
    for e, toward_v in assignment.items():
        if toward_v:
            bits |= 1 << e
    witness = Configuration(bits, g.num_edges)
    if not is_legal(g, witness):
        raise AssertionError("unary DP produced an illegal witness")
    return True, witness


def _merge_sequences(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Shuffle two sequences that agree on the order of shared elements."""
    sa, sb = set(a), set(b)
    out: list[int] = []
    i = j = 0
    while i < len(a) or j < len(b):
        if i < len(a) and a[i] not in sb:
            out.append(a[i])
            i += 1
        elif j < len(b) and b[j] not in sa:
            out.append(b[j])
            j += 1
        else:
            if a[i] != b[j]:
                raise AssertionError("sequences disagree on shared element order")
            out.append(a[i])
            i += 1
            j += 1
    return tuple(out)


def _orderings(items: list[int]) -> Iterable[tuple[int, ...]]:
    return itertools.permutations(items)


def _insertions(base: tuple[int, ...], items: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    """All interleavings of ``base`` with the ordered sequence ``items``."""
    if not items:
        yield base
        return
    head, rest = items[0], items[1:]
    for pos in range(len(base) + 1):
        yield from _insertions(base[:pos] + (head,) + base[pos:], rest)


def dp_bounded_ncl(
    g: ConstraintGraph,
    ntd: NiceTreeDecomposition,
    variant: str,
    start: Configuration,
    goal: Optional[Configuration] = None,
    target: Optional[int] = None,
    want_witness: bool = True,
    max_states: int = 1 << 20,
) -> tuple[bool, Optional[list[int]]]:
    """Bounded reconfiguration DP over reversal orderings of bag edges.

    A state at a node is the solution's reversal order restricted to the
    edges incident to the bag.  A vertex's prefix legality is checked the
    moment it enters a bag (all its edges are then in the domain, and
    their relative order never changes afterwards).  Join children share a
    domain, so compatible interleavings are exactly the equal ones; the
    witness is rebuilt by shuffling subtree orders that agree on shared
    edges.
    """
    if variant not in ("c2e", "c2c"):
        raise ValueError(f"unknown variant {variant!r}")
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    if variant == "c2c":
        if goal is None:
            raise ValueError("c2c variant needs a goal configuration")
        if not is_legal(g, goal):
            raise ValueError("goal configuration is illegal")
        diff = set(start.differing_edges(goal))
    else:
        if target is None or not (0 <= target < g.num_edges):
            raise ValueError("c2e variant needs a valid target edge")
        diff = set()
    if g.num_edges == 0:
        return (variant == "c2c"), ([] if variant == "c2c" else None)
    _check_inputs(g, ntd)
    domains = _bag_domains(g, ntd)

    def prefix_legal(v: int, seq: tuple[int, ...]) -> bool:
        inc = set(g.incident[v])
        flow = 0
        heads = {}
        for e in g.incident[v]:
            heads[e] = start.head(g, e)
            if heads[e] == v:
                flow += g.weight(e)
        if flow < g.min_inflow[v]:
            return False
        for e in seq:
            if e not in inc:
                continue
            w = g.weight(e)
            if heads[e] == v:
                flow -= w
                heads[e] = g.other_endpoint(e, v)
            else:
                flow += w
                heads[e] = v
            if flow < g.min_inflow[v]:
                return False
        return True

    def allowed_subsets(edges: list[int]) -> Iterable[tuple[int, ...]]:
        """Subsets (as ordered tuples to insert) respecting the variant."""
        if variant == "c2c":
            must = tuple(sorted(e for e in edges if e in diff))
            yield from _orderings(list(must))
        else:
            required = [e for e in edges if e == target]
            optional = [e for e in edges if e != target]
            for r in range(len(optional) + 1):
                for combo in itertools.combinations(optional, r):
                    chosen = list(combo) + required
                    yield from _orderings(chosen)

    tables: dict[int, set[tuple[int, ...]]] = {}
    for node in ntd.postorder():
        kind, v = ntd.kinds[node]
        dom = domains[node]
        if kind == "leaf":
            vtx = next(iter(ntd.bags[node]))
            table = {seq for seq in allowed_subsets(dom) if prefix_legal(vtx, seq)}
        elif kind == "introduce":
            child = ntd.children[node][0]
            cdom = set(domains[child])
            new_edges = [e for e in dom if e not in cdom]
            table = set()
            for cstate in tables[child]:
                for extra in allowed_subsets(new_edges):
                    for seq in _insertions(cstate, extra):
                        if prefix_legal(v, seq):
                            table.add(seq)
        elif kind == "forget":
            child = ntd.children[node][0]
            keep = set(dom)
            table = set()
            for cstate in tables[child]:
                table.add(tuple(e for e in cstate if e in keep))
        else:
            c1, c2 = ntd.children[node]
            table = tables[c1] & tables[c2]
        if len(table) > max_states:
            raise LimitExceeded("bounded DP table exceeded max_states")
        tables[node] = table

    if not tables[ntd.root]:
        return False, None
    if not want_witness:
        return True, None

    def wit(node: int, state: tuple[int, ...]) -> tuple[int, ...]:
        kind, v = ntd.kinds[node]
        dom = domains[node]
        if kind == "leaf":
            return state
        if kind == "introduce":
            child = ntd.children[node][0]
            cdom = set(domains[child])
            cstate = tuple(e for e in state if e in cdom)
            return _merge_sequences(wit(child, cstate), state)
        if kind == "forget":
            child = ntd.children[node][0]
            keep = set(dom)
            for cs in sorted(tables[child]):
                if tuple(e for e in cs if e in keep) == state:
                    return wit(child, cs)
            raise AssertionError("no matching child state during reconstruction")
        c1, c2 = ntd.children[node]
        return _merge_sequences(wit(c1, state), wit(c2, state))

    seq = list(wit(ntd.root, ()))
    if variant == "c2e":
        cut = seq.index(target)
        seq = seq[: cut + 1]
    return True, seq
