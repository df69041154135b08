"""Solution-length-parameterized solvers: subset DP and distance kernels.

The subset DP solves bounded C2C in O*(2^l): only the differing edges may
move (anything else could never be flipped back), so a solution is an
order on the differing set, found Held-Karp style over subsets.

The kernelizations keep only edges within a hop radius of the target (or
of the differing edges) in the line-graph metric, freeze everything else
at its start orientation, and credit the frozen inflow to vertex demands.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import Configuration, ConstraintGraph, LimitExceeded, inflows, is_legal
from .search import (
    MoveSequence,
    SolverLimits,
    solve_bounded_c2c,
    solve_bounded_c2e,
    solve_c2c,
    solve_c2e,
)

DEFAULT_SUBSET_LIMIT = 24


def solve_bounded_c2c_subsetdp(
    g: ConstraintGraph,
    start: Configuration,
    goal: Configuration,
    limit: int = DEFAULT_SUBSET_LIMIT,
) -> Optional[MoveSequence]:
    """Order the differing edges so every prefix stays legal, or None.

    A subset S of the differing edges is reachable iff some e in S can be
    the last reversal: S - {e} reachable and start^S legal.  Raises
    LimitExceeded when more than ``limit`` edges differ.
    """
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    if goal.num_edges != g.num_edges:
        raise ValueError("goal configuration covers a different edge set")
    if not is_legal(g, goal):
        raise ValueError("goal configuration is illegal")
    diff = start.differing_edges(goal)
    l = len(diff)
    if l == 0:
        return []
    if l > limit:
        raise LimitExceeded(f"{l} differing edges exceed the subset DP limit {limit}")

    # Inflow bookkeeping restricted to endpoints of differing edges.
    base = inflows(g, start)
    affected = sorted({v for e in diff for v in g.endpoints(e)})

    def legal_mask(mask: int) -> bool:
        delta = {v: 0 for v in affected}
        for i, e in enumerate(diff):
            if (mask >> i) & 1:
                w = g.weight(e)
                old = start.head(g, e)
                new = g.other_endpoint(e, old)
                delta[old] -= w
                delta[new] += w
        return all(base[v] + delta[v] >= g.min_inflow[v] for v in affected)

    reachable = [False] * (1 << l)
    parent_edge = [-1] * (1 << l)
    reachable[0] = True
    for mask in range(1, 1 << l):
        if not legal_mask(mask):
            continue
        m = mask
        while m:
            bit = m & -m
            if reachable[mask ^ bit]:
                reachable[mask] = True
                parent_edge[mask] = bit.bit_length() - 1
                break
            m ^= bit
    full = (1 << l) - 1
    if not reachable[full]:
        return None
    order: MoveSequence = []
    mask = full
    while mask:
        i = parent_edge[mask]
        order.append(diff[i])
        mask ^= 1 << i
    order.reverse()
    return order


@dataclass(frozen=True)
class Kernel:
    """Radius-limited subinstance with frozen-edge inflow credited away.

    ``graph``/``start`` live in kernel coordinates; ``retained`` lists the
    surviving original edge ids; ``inflow_credit`` records, per original
    vertex, the inflow granted by removed edges frozen at their start
    orientation.  ``edge_map``/``vertex_map`` translate original ids to
    kernel ids.
    """

    graph: ConstraintGraph
    start: Configuration
    retained: frozenset[int]
    inflow_credit: dict[int, int]
    edge_map: dict[int, int]
    vertex_map: dict[int, int]

    def to_kernel_edge(self, e: int) -> int:
        return self.edge_map[e]

    def to_original_moves(self, moves: Optional[MoveSequence]) -> Optional[MoveSequence]:
        if moves is None:
            return None
        back = {ke: e for e, ke in self.edge_map.items()}
        return [back[ke] for ke in moves]


def edge_distances(g: ConstraintGraph, sources: list[int]) -> list[Optional[int]]:
    """Hop distances in the line graph (edges sharing an endpoint: 1)."""
    dist: list[Optional[int]] = [None] * g.num_edges
    q: deque[int] = deque()
    for e in sources:
        if dist[e] is None:
            dist[e] = 0
            q.append(e)
    while q:
        e = q.popleft()
        for v in g.endpoints(e):
            for e2 in g.incident[v]:
                if dist[e2] is None:
                    dist[e2] = dist[e] + 1
                    q.append(e2)
    return dist


def _ball_bound(g: ConstraintGraph, centers: int, radius: int) -> int:
    """Loose union-of-balls bound on retained edges (size check only)."""
    growth = max(1, 2 * (max((g.degree(v) for v in range(g.num_vertices)), default=1) - 1))
    total = sum(growth ** i for i in range(radius + 1))
    return max(1, centers) * total


def _build_kernel(
    g: ConstraintGraph, start: Configuration, retained_ids: list[int]
) -> Kernel:
    retained = sorted(retained_ids)
    keep = set(retained)
    vmap: dict[int, int] = {}
    credit: dict[int, int] = {}
    verts: list[int] = []
    for e in retained:
        for v in g.endpoints(e):
            if v not in vmap:
                vmap[v] = len(verts)
                verts.append(v)
    for e in range(g.num_edges):
        if e in keep:
            continue
        head = start.head(g, e)
        if head in vmap:
            credit[head] = credit.get(head, 0) + g.weight(e)
    min_inflow = tuple(
        max(0, g.min_inflow[v] - credit.get(v, 0)) for v in verts
    )
    edges = []
    emap: dict[int, int] = {}
    bits = 0
    for e in retained:
        u, v, w = g.edges[e]
        emap[e] = len(edges)
        if start.orientation(e).value == "V":
            bits |= 1 << emap[e]
        edges.append((vmap[u], vmap[v], w))
    kg = ConstraintGraph(min_inflow, tuple(edges))
    ks = Configuration(bits, kg.num_edges)
    if not is_legal(kg, ks):
        raise AssertionError("kernel start is illegal; crediting is broken")
    return Kernel(
        graph=kg,
        start=ks,
        retained=frozenset(retained),
        inflow_credit=credit,
        edge_map=emap,
        vertex_map=vmap,
    )


def kernelize_c2e(
    g: ConstraintGraph, start: Configuration, target: int, l: int
) -> Kernel:
    """Keep edges at line-graph distance <= l-1 from the target.

    Any length-<=l solution reverses only such edges: omitting a farther
    reversal still leaves a valid shorter solution.
    """
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    if not (0 <= target < g.num_edges):
        raise ValueError(f"unknown target edge {target}")
    if l < 1:
        raise ValueError("length bound must be at least 1")
    dist = edge_distances(g, [target])
    retained = [e for e in range(g.num_edges) if dist[e] is not None and dist[e] <= l - 1]
    kernel = _build_kernel(g, start, retained)
    assert len(kernel.retained) <= _ball_bound(g, 1, l - 1)
    return kernel


def kernelize_c2c(
    g: ConstraintGraph, start: Configuration, goal: Configuration, l: int
) -> Optional[Kernel]:
    """Keep edges within distance l of any differing edge.

    Returns None when more than l edges differ: reversing all of them in
    at most l moves is impossible, so the answer is an immediate no.
    """
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    if goal.num_edges != g.num_edges:
        raise ValueError("goal configuration covers a different edge set")
    if not is_legal(g, goal):
        raise ValueError("goal configuration is illegal")
    if l < 0:
        raise ValueError("length bound must be non-negative")
    diff = start.differing_edges(goal)
    if len(diff) > l:
        return None
    dist = edge_distances(g, diff)
    retained = [e for e in range(g.num_edges) if dist[e] is not None and dist[e] <= l]
    kernel = _build_kernel(g, start, retained)
    assert len(kernel.retained) <= _ball_bound(g, len(diff), l)
    return kernel


def solve_length_bounded(
    kernel: Kernel,
    variant: str,
    l: int,
    target: Optional[int] = None,
    goal: Optional[Configuration] = None,
    bounded: bool = False,
    max_states: Optional[int] = None,
) -> Optional[MoveSequence]:
    """Depth-l search over the kernel; answers match the full-graph oracle.

    ``target`` is an original edge id; ``goal`` an original-coordinate
    configuration.  Returned moves are original edge ids.
    """
    limits = SolverLimits(
        max_states=max_states if max_states is not None else SolverLimits().max_states,
        max_len=l,
    )
    if variant == "c2e":
        if target is None:
            raise ValueError("c2e variant needs a target edge")
        kt = kernel.edge_map.get(target)
        if kt is None:
            raise ValueError("target edge was not retained by the kernel")
        solver = solve_bounded_c2e if bounded else solve_c2e
        moves = solver(kernel.graph, kernel.start, kt, limits)
    elif variant == "c2c":
        if goal is None:
            raise ValueError("c2c variant needs a goal configuration")
        bits = 0
        for e, ke in kernel.edge_map.items():
            if goal.orientation(e).value == "V":
                bits |= 1 << ke
        kgoal = Configuration(bits, kernel.graph.num_edges)
        solver = solve_bounded_c2c if bounded else solve_c2c
        moves = solver(kernel.graph, kernel.start, kgoal, limits)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return kernel.to_original_moves(moves)
