"""Reduction compilers and layout machinery.

Every compiler emits a ``ReductionOutput``: the constraint graph, start
(and goal or target), a provenance back-map, optional layered bags, and a
drawing.  Desk-scale tests check each compiled instance against both the
source-problem brute force and the constraint-graph oracles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    Configuration,
    ConstraintGraph,
    GraphBuilder,
    LimitExceeded,
    is_legal,
)
from .treewidth import TreeDecomposition


@dataclass
class Drawing:
    """Polyline drawing: vertex points plus a route per edge."""

    coords: dict[int, tuple[int, int]]
    routes: dict[int, list[tuple[int, int]]]
    layer: dict[int, tuple[int, int]] = field(default_factory=dict)

    def segments(self) -> list[tuple[int, tuple[int, int], tuple[int, int]]]:
        segs = []
        for e, route in self.routes.items():
            for a, b in zip(route, route[1:]):
                if a != b:
                    segs.append((e, a, b))
        return segs


def _orient(p, q, r) -> int:
    val = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return 0 if val == 0 else (1 if val > 0 else -1)


def _on_segment(p, q, r) -> bool:
    return (
        min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
        and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
    )


def _segments_cross(a1, a2, b1, b2) -> bool:
    """Proper or improper intersection, excluding shared endpoints."""
    shared = {a1, a2} & {b1, b2}
    o1 = _orient(a1, a2, b1)
    o2 = _orient(a1, a2, b2)
    o3 = _orient(b1, b2, a1)
    o4 = _orient(b1, b2, a2)
    if o1 != o2 and o3 != o4:
        if shared:
            return False
        return True
    for p, q, r in ((a1, a2, b1), (a1, a2, b2), (b1, b2, a1), (b1, b2, a2)):
        if _orient(p, q, r) == 0 and _on_segment(p, q, r) and r not in (p, q):
            if r in shared:
                continue
            return True
    return False


def count_crossings(drawing: Drawing) -> list[tuple[int, int]]:
    """Edge pairs whose routes intersect anywhere except shared vertices."""
    segs = drawing.segments()
    segs.sort(key=lambda s: min(s[1][0], s[2][0]))
    out = set()
    for i, (e1, a1, a2) in enumerate(segs):
        x_hi = max(a1[0], a2[0])
        y_lo, y_hi = min(a1[1], a2[1]), max(a1[1], a2[1])
        for e2, b1, b2 in segs[i + 1:]:
            if min(b1[0], b2[0]) > x_hi:
                break
            if e1 == e2:
                continue
            if max(b1[1], b2[1]) < y_lo or min(b1[1], b2[1]) > y_hi:
                continue
            if _segments_cross(a1, a2, b1, b2):
                out.add((min(e1, e2), max(e1, e2)))
    return sorted(out)


@dataclass
class ReductionOutput:
    graph: ConstraintGraph
    start: Configuration
    goal: Optional[Configuration] = None
    target: Optional[int] = None
    drawing: Optional[Drawing] = None
    back_map_v: dict[int, str] = field(default_factory=dict)
    back_map_e: dict[int, str] = field(default_factory=dict)
    bags: list[list[int]] = field(default_factory=list)
    decomposition: Optional[TreeDecomposition] = None
    length_certificate: Optional[int] = None
    annotations: dict = field(default_factory=dict)

    def check(self) -> None:
        if not is_legal(self.graph, self.start):
            raise AssertionError("reduction start configuration is illegal")
        if self.goal is not None and not is_legal(self.graph, self.goal):
            raise AssertionError("reduction goal configuration is illegal")
        for v in range(self.graph.num_vertices):
            if v not in self.back_map_v:
                raise AssertionError(f"vertex {v} missing from back map")
        for e in range(self.graph.num_edges):
            if e not in self.back_map_e:
                raise AssertionError(f"edge {e} missing from back map")


@dataclass(frozen=True)
class PartitionInstance:
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("partition instance needs at least one value")
        if any(x < 1 for x in self.values):
            raise ValueError("partition values must be positive")
        if sum(self.values) % 2:
            raise ValueError("partition instance must have an even sum")

    @property
    def half_sum(self) -> int:
        return sum(self.values) // 2


def partition_solvable(p: PartitionInstance) -> bool:
    """Independent subset-sum oracle for desk-scale instances."""
    target = p.half_sum
    sums = {0}
    for x in p.values:
        sums |= {s + x for s in sums}
    return target in sums


def _simple_layer_drawing(
    g: ConstraintGraph, layers: dict[int, tuple[int, int]]
) -> Drawing:
    coords = {v: (lay * 16, row * 16) for v, (lay, row) in layers.items()}
    routes = {
        e: [coords[u], coords[v]] for e, (u, v, _) in enumerate(g.edges)
    }
    return Drawing(coords=coords, routes=routes, layer=dict(layers))


def partition_to_cgs(p: PartitionInstance) -> ReductionOutput:
    """Two demand-N collectors joined through one vertex per value.

    Each value vertex demands its own value and taps both collectors with
    value-weight edges; a legal configuration splits the values evenly.
    Carries a constructive width-2 decomposition.
    """
    n = len(p.values)
    N = p.half_sum
    b = GraphBuilder()
    U = b.add_vertex(N)
    W = b.add_vertex(N)
    back_v = {U: "U", W: "W"}
    back_e = {}
    vs = []
    for i, x in enumerate(p.values):
        v = b.add_vertex(x)
        vs.append(v)
        back_v[v] = f"v[{i}]"
        e1 = b.add_edge(U, v, x)
        e2 = b.add_edge(W, v, x)
        back_e[e1] = f"side[U,{i}]"
        back_e[e2] = f"side[W,{i}]"
    g = b.build()
    start = None
    bags = {i: frozenset({U, W, vs[i]}) for i in range(n)}
    tree_edges = frozenset((i, i + 1) for i in range(n - 1))
    layers = {U: (0, 0), W: (2, 0)}
    for i, v in enumerate(vs):
        layers[v] = (1, i)
    out = ReductionOutput(
        graph=g,
        start=Configuration(0, g.num_edges),  # placeholder; CGS has no start
        back_map_v=back_v,
        back_map_e=back_e,
        decomposition=TreeDecomposition(bags=bags, tree_edges=tree_edges),
        drawing=_simple_layer_drawing(g, layers),
        annotations={"kind": "partition-cgs", "values": p.values},
    )
    # CGS instances have no distinguished configuration; keep the all-U
    # placeholder out of legality checks.
    return out


def partition_to_bounded_ncl(p: PartitionInstance, variant: str) -> ReductionOutput:
    """Partition graph plus a weight-N bridge (U, W); start as in the proof.

    C2E asks to reverse the bridge; C2C asks for the all-edges-reversed
    configuration.
    """
    if variant not in ("c2e", "c2c"):
        raise ValueError(f"unknown variant {variant!r}")
    base = partition_to_cgs(p)
    n = len(p.values)
    N = p.half_sum
    b = GraphBuilder()
    for v in range(base.graph.num_vertices):
        b.add_vertex(base.graph.min_inflow[v])
    for u, v, w in base.graph.edges:
        b.add_edge(u, v, w)
    bridge = b.add_edge(0, 1, N)  # (U, W)
    g = b.build()
    back_e = dict(base.back_map_e)
    back_e[bridge] = "bridge[U,W]"
    bits = 0
    bits |= 1 << bridge  # toward W (v endpoint)
    for e, (u, v, w) in enumerate(base.graph.edges):
        # (U, v_i) edges toward U (u endpoint, bit 0); (W, v_i) toward v_i.
        if base.back_map_e[e].startswith("side[W"):
            bits |= 1 << e
    start = Configuration(bits, g.num_edges)
    goal = None
    target = None
    if variant == "c2e":
        target = bridge
    else:
        goal = Configuration(bits ^ ((1 << g.num_edges) - 1), g.num_edges)
    bags = {
        i: frozenset(bag) for i, bag in enumerate(
            base.decomposition.bags[i] for i in sorted(base.decomposition.bags)
        )
    }
    out = ReductionOutput(
        graph=g,
        start=start,
        goal=goal,
        target=target,
        back_map_v=dict(base.back_map_v),
        back_map_e=back_e,
        decomposition=TreeDecomposition(
            bags=bags, tree_edges=base.decomposition.tree_edges
        ),
        drawing=base.drawing,
        annotations={"kind": f"partition-{variant}", "values": p.values},
    )
    out.check()
    return out


@dataclass(frozen=True)
class CliqueInstance:
    """Simple undirected graph plus the clique size k."""

    num_vertices: int
    edges: frozenset[tuple[int, int]]
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.k > self.num_vertices:
            raise ValueError("k exceeds the vertex count")
        for u, v in self.edges:
            if u == v:
                raise ValueError("clique instances must be simple graphs")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError("edge endpoint out of range")
            if (v, u) in self.edges and u > v:
                raise ValueError("edges must be stored with u < v")

    def degree(self, v: int) -> int:
        return sum(1 for u, w in self.edges if v in (u, w))

    @property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.num_vertices)), default=0)


def clique_exists(inst: CliqueInstance) -> bool:
    """Independent brute-force clique oracle."""
    if inst.k == 1:
        return inst.num_vertices >= 1
    for combo in itertools.combinations(range(inst.num_vertices), inst.k):
        if all(
            (min(a, b), max(a, b)) in inst.edges
            for a, b in itertools.combinations(combo, 2)
        ):
            return True
    return False


def _clique_base(inst: CliqueInstance):
    """Common construction; returns builder state shared by both variants.

    Vertices: one per original vertex (demand = its degree), one per
    original edge (demand 2), a budget vertex U (demand n' - Delta*k), a
    collector V (demand k(k-1)).  Instances with n - Delta*k < 0 are
    padded with isolated vertices, which leaves cliques unchanged.
    """
    k = inst.k
    delta = inst.max_degree
    n = inst.num_vertices
    pad = max(0, delta * k - n)
    n_total = n + pad

    b = GraphBuilder()
    back_v: dict[int, str] = {}
    back_e: dict[int, str] = {}
    vmap = {}
    for i in range(n_total):
        deg = inst.degree(i) if i < n else 0
        v = b.add_vertex(deg)
        vmap[i] = v
        back_v[v] = f"vert[{i}]" if i < n else f"pad[{i}]"
    # Degenerate shapes: with no edges there is no budget mechanism, and a
    # 1-clique always exists, so the collector demand drops to zero.
    U = b.add_vertex(n_total - delta * k if delta > 0 else 0)
    back_v[U] = "U"
    target_weight = k * (k - 1) if k > 1 else 1
    V = b.add_vertex(target_weight if k > 1 else 0)
    back_v[V] = "V"

    bits = 0
    split_edges = {}
    for (i, j) in sorted(inst.edges):
        mid = b.add_vertex(2)
        back_v[mid] = f"pair[{i},{j}]"
        e1 = b.add_edge(mid, vmap[i], 1)  # toward v_i initially (v endpoint)
        e2 = b.add_edge(mid, vmap[j], 1)
        back_e[e1] = f"split[{i},{j},{i}]"
        back_e[e2] = f"split[{i},{j},{j}]"
        bits |= (1 << e1) | (1 << e2)
        ev = b.add_edge(mid, V, 2)  # toward the pair vertex initially
        back_e[ev] = f"collect[{i},{j}]"
        split_edges[(i, j)] = (e1, e2, ev)
    if delta > 0:
        for i in range(n_total):
            e = b.add_edge(vmap[i], U, delta)  # toward U initially
            back_e[e] = f"budget[{i}]"
            bits |= 1 << e
    return b, back_v, back_e, bits, U, V, target_weight, n_total, delta


def clique_to_c2e(inst: CliqueInstance) -> ReductionOutput:
    """Reverse-the-collector instance: solvable iff a k-clique exists."""
    b, back_v, back_e, bits, U, V, target_weight, n_total, delta = _clique_base(inst)
    W = b.add_vertex(0)
    back_v[W] = "W"
    target = b.add_edge(V, W, target_weight)
    back_e[target] = "goal[V,W]"
    g = b.build()
    start = Configuration(bits, g.num_edges)  # target toward V (u endpoint)
    k = inst.k
    cert = k + 3 * (k * (k - 1) // 2) + 1
    out = ReductionOutput(
        graph=g,
        start=start,
        target=target,
        back_map_v=back_v,
        back_map_e=back_e,
        length_certificate=cert,
        drawing=_simple_layer_drawing(g, _clique_layers(back_v)),
        annotations={"kind": "clique-c2e", "k": inst.k},
    )
    out.check()
    return out


def clique_to_c2c(inst: CliqueInstance) -> ReductionOutput:
    """Collector feeds a latch; the goal flips only the latch state.

    The latch hub takes the collector edge in place of its lock edge; its
    two loose weight-1 edges end in free stubs.  The goal configuration
    mirrors the latch (state edge and its feeders swapped), everything
    else as started.
    """
    b, back_v, back_e, bits, U, V, target_weight, n_total, delta = _clique_base(inst)
    hub = b.add_vertex(2)
    T = b.add_vertex(2)
    B = b.add_vertex(2)
    st1 = b.add_vertex(0)
    st2 = b.add_vertex(0)
    back_v.update({hub: "latch:hub", T: "latch:T", B: "latch:B",
                   st1: "latch:stub1", st2: "latch:stub2"})
    lock = b.add_edge(V, hub, target_weight)
    e_ht = b.add_edge(hub, T, 2)
    e_hb = b.add_edge(hub, B, 2)
    e_a = b.add_edge(T, B, 1)
    e_te = b.add_edge(T, st1, 1)
    e_be = b.add_edge(B, st2, 1)
    back_e.update({lock: "latch:lock", e_ht: "latch:hub-T", e_hb: "latch:hub-B",
                   e_a: "latch:state", e_te: "latch:T-stub", e_be: "latch:B-stub"})
    # Locked start: lock toward V (u endpoint), hub fed by B.
    bits |= (1 << e_ht)  # hub -> T
    bits |= (1 << e_a)   # T -> B
    # e_hb toward hub (u endpoint): bit 0; e_te toward stub: bit 1; e_be toward B: bit 0.
    bits |= (1 << e_te)
    g = b.build()
    start = Configuration(bits, g.num_edges)
    # Goal: latch mirrored (state edge reversed, feeders swapped), rest equal.
    goal = start.flip_all([e_a, e_ht, e_hb, e_te, e_be])
    k = inst.k
    cert = 2 * (k + 3 * (k * (k - 1) // 2) + 1) + 5
    out = ReductionOutput(
        graph=g,
        start=start,
        goal=goal,
        back_map_v=back_v,
        back_map_e=back_e,
        length_certificate=cert,
        drawing=_simple_layer_drawing(g, _clique_layers(back_v)),
        annotations={"kind": "clique-c2c", "k": inst.k},
    )
    out.check()
    return out


def _clique_layers(back_v: dict[int, str]) -> dict[int, tuple[int, int]]:
    group = {"U": 0, "vert": 1, "pad": 1, "pair": 2, "V": 3}
    layers: dict[int, tuple[int, int]] = {}
    rows = [0] * 6
    for v in sorted(back_v):
        token = back_v[v].split("[")[0].split(":")[0]
        lay = group.get(token, 4)
        layers[v] = (lay, rows[lay])
        rows[lay] += 1
    return layers


def layout_from_bags(r: ReductionOutput) -> tuple[list[int], int]:
    """Order vertices by first containing bag; report max edge stretch."""
    if not r.bags:
        raise ValueError("reduction output carries no bag list")
    first_bag: dict[int, int] = {}
    for i, bag in enumerate(r.bags):
        for v in bag:
            first_bag.setdefault(v, i)
    for v in range(r.graph.num_vertices):
        if v not in first_bag:
            raise ValueError(f"vertex {v} appears in no bag")
    order = sorted(range(r.graph.num_vertices), key=lambda v: (first_bag[v], v))
    pos = {v: i for i, v in enumerate(order)}
    stretch = max(
        (abs(pos[u] - pos[v]) for u, v, _ in r.graph.edges), default=0
    )
    return order, stretch


def check_bag_locality(r: ReductionOutput) -> list[str]:
    """Report edges joining vertices more than one bag apart."""
    first_bag: dict[int, int] = {}
    for i, bag in enumerate(r.bags):
        for v in bag:
            first_bag.setdefault(v, i)
    report = []
    for e, (u, v, _) in enumerate(r.graph.edges):
        if abs(first_bag[u] - first_bag[v]) > 1:
            report.append(
                f"edge {e} spans bags {first_bag[u]} and {first_bag[v]}"
            )
    return report


def _as_simple_adjacency(g: ConstraintGraph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(g.num_vertices)]
    for u, v, _ in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def bandwidth_exact(
    g: ConstraintGraph, limit: int = 12
) -> tuple[list[int], int]:
    """Optimal linear arrangement minimizing max edge stretch (B&B)."""
    n = g.num_vertices
    if n > limit:
        raise LimitExceeded(f"{n} vertices exceed the bandwidth search limit {limit}")
    if n == 0:
        return [], 0
    adj = _as_simple_adjacency(g)
    best_order: list[int] = list(range(n))
    best = n  # upper bound: any layout has bandwidth < n

    order: list[int] = []
    pos: dict[int, int] = {}

    def extend(cur_max: int) -> None:
        nonlocal best, best_order
        if cur_max >= best:
            return
        depth = len(order)
        if depth == n:
            best = cur_max
            best_order = list(order)
            return
        for v in range(n):
            if v in pos:
                continue
            new_max = cur_max
            ok = True
            for u in adj[v]:
                if u in pos:
                    d = depth - pos[u]
                    if d >= best:
                        ok = False
                        break
                    new_max = max(new_max, d)
            if not ok:
                continue
            # Placed neighbours too far back can never be fixed later.
            pos[v] = depth
            order.append(v)
            extend(new_max)
            order.pop()
            del pos[v]

    extend(0)
    return best_order, best


def cutwidth_exact(
    g: ConstraintGraph, limit: int = 18
) -> tuple[list[int], int]:
    """Optimal linear arrangement minimizing the max cut (subset DP)."""
    n = g.num_vertices
    if n > limit:
        raise LimitExceeded(f"{n} vertices exceed the cutwidth DP limit {limit}")
    if n == 0:
        return [], 0
    adj_count: list[dict[int, int]] = [dict() for _ in range(n)]
    for u, v, _ in g.edges:
        adj_count[u][v] = adj_count[u].get(v, 0) + 1
        adj_count[v][u] = adj_count[v].get(u, 0) + 1

    cut_cache = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        prev = mask ^ (1 << low)
        delta = 0
        for u, cnt in adj_count[low].items():
            delta += -cnt if (prev >> u) & 1 else cnt
        cut_cache[mask] = cut_cache[prev] + delta

    dp = [n * n + len(g.edges) + 1] * (1 << n)
    parent = [-1] * (1 << n)
    dp[0] = 0
    for mask in range(1, 1 << n):
        c = cut_cache[mask]
        m = mask
        while m:
            bit = m & -m
            prev = mask ^ bit
            val = max(dp[prev], c)
            if val < dp[mask]:
                dp[mask] = val
                parent[mask] = bit.bit_length() - 1
            m ^= bit
    order_rev = []
    mask = (1 << n) - 1
    while mask:
        v = parent[mask]
        order_rev.append(v)
        mask ^= 1 << v
    order_rev.reverse()
    return order_rev, dp[(1 << n) - 1]


def bandwidth_bruteforce(g: ConstraintGraph) -> int:
    """Permutation-search oracle for tests."""
    n = g.num_vertices
    if n == 0:
        return 0
    best = n
    for perm in itertools.permutations(range(n)):
        pos = {v: i for i, v in enumerate(perm)}
        val = max((abs(pos[u] - pos[v]) for u, v, _ in g.edges), default=0)
        best = min(best, val)
    return best


def cutwidth_bruteforce(g: ConstraintGraph) -> int:
    """Permutation-search oracle for tests."""
    n = g.num_vertices
    if n == 0:
        return 0
    best = len(g.edges) + 1
    for perm in itertools.permutations(range(n)):
        pos = {v: i for i, v in enumerate(perm)}
        worst = 0
        for cut in range(n - 1):
            count = sum(
                1
                for u, v, _ in g.edges
                if min(pos[u], pos[v]) <= cut < max(pos[u], pos[v])
            )
            worst = max(worst, count)
        best = min(best, worst)
    return best
