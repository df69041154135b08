"""Exhaustive exact solvers: the ground truth for every other solver.

All searches are deterministic: BFS frontiers expand flippable edges in
ascending edge-id order, so returned move sequences are test-stable.
``SolverLimits.max_states`` caps the visited set (exceeding it raises
``LimitExceeded``); ``max_len`` is a semantic length cap, so exhausting it
means "no solution within that many moves", not a resource error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import (
    Configuration,
    ConstraintGraph,
    LimitExceeded,
    is_legal,
    is_legal_bits,
    legal_moves_bits,
)

MoveSequence = list[int]

DEFAULT_MAX_STATES = 1 << 22


@dataclass(frozen=True)
class SolverLimits:
    max_states: Optional[int] = DEFAULT_MAX_STATES
    max_len: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_states is not None and self.max_states < 0:
            raise ValueError("max_states must be non-negative")
        if self.max_len is not None and self.max_len < 0:
            raise ValueError("max_len must be non-negative")


def _limits(limits: Optional[SolverLimits]) -> SolverLimits:
    return limits if limits is not None else SolverLimits()


def solve_cgs_bruteforce(
    g: ConstraintGraph, limits: Optional[SolverLimits] = None
) -> Optional[Configuration]:
    """First legal configuration in lexicographic orientation order, or None.

    Lexicographic over the orientation tuple (edge 0 most significant,
    TOWARD_U before TOWARD_V).
    """
    lim = _limits(limits)
    m = g.num_edges
    if lim.max_states is not None and (m >= 63 or (1 << m) > lim.max_states):
        raise LimitExceeded(f"2^{m} configurations exceed max_states={lim.max_states}")
    for k in range(1 << m):
        # Map bit (m-1-i) of the counter to edge i so the counter order is
        # lexicographic over (orientation(0), ..., orientation(m-1)).
        bits = 0
        for e in range(m):
            if (k >> (m - 1 - e)) & 1:
                bits |= 1 << e
        if is_legal_bits(g, bits):
            return Configuration(bits, m)
    return None


def enumerate_legal_bits(g: ConstraintGraph, limit: int = 1 << 24) -> list[int]:
    """All legal orientation bitmasks, ascending (numpy-vectorized).

    Raises LimitExceeded when 2^edges exceeds ``limit``.
    """
    m = g.num_edges
    if m >= 63 or (1 << m) > limit:
        raise LimitExceeded(f"2^{m} configurations exceed enumeration limit {limit}")
    total = 1 << m
    legal = np.ones(total, dtype=bool)
    all_bits = np.arange(total, dtype=np.int64)
    flows = np.zeros((g.num_vertices, total), dtype=np.int64)
    for e, (u, v, w) in enumerate(g.edges):
        toward_v = (all_bits >> e) & 1
        flows[v] += toward_v * w
        flows[u] += (1 - toward_v) * w
    for v, need in enumerate(g.min_inflow):
        if need:
            legal &= flows[v] >= need
    return [int(b) for b in all_bits[legal]]


def _reconstruct(parents: dict[int, tuple[int, int]], bits: int) -> MoveSequence:
    moves: MoveSequence = []
    while parents[bits][1] >= 0:
        prev, e = parents[bits]
        moves.append(e)
        bits = prev
    moves.reverse()
    return moves


def _bfs(
    g: ConstraintGraph,
    start: Configuration,
    is_goal,
    limits: SolverLimits,
) -> Optional[MoveSequence]:
    """BFS over configurations by single legal reversals."""
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    if is_goal(start.bits, start.bits):
        return []
    parents: dict[int, tuple[int, int]] = {start.bits: (-1, -1)}
    frontier = [start.bits]
    depth = 0
    while frontier:
        if limits.max_len is not None and depth >= limits.max_len:
            return None
        depth += 1
        next_frontier: list[int] = []
        for bits in frontier:
            for e in legal_moves_bits(g, bits):
                child = bits ^ (1 << e)
                if child in parents:
                    continue
                parents[child] = (bits, e)
                if limits.max_states is not None and len(parents) > limits.max_states:
                    raise LimitExceeded(
                        f"visited more than max_states={limits.max_states} configurations"
                    )
                if is_goal(child, start.bits):
                    return _reconstruct(parents, child)
                next_frontier.append(child)
        frontier = next_frontier
    return None


def solve_c2e(
    g: ConstraintGraph,
    start: Configuration,
    target: int,
    limits: Optional[SolverLimits] = None,
) -> Optional[MoveSequence]:
    """Shortest sequence after which the target edge has flipped, or None.

    The target counts as reversed at the first configuration whose target
    orientation differs from the start's, wherever in the sequence that
    happens.
    """
    if not (0 <= target < g.num_edges):
        raise ValueError(f"unknown target edge {target}")
    mask = 1 << target
    return _bfs(g, start, lambda bits, s: (bits ^ s) & mask != 0, _limits(limits))


def solve_c2c(
    g: ConstraintGraph,
    start: Configuration,
    goal: Configuration,
    limits: Optional[SolverLimits] = None,
) -> Optional[MoveSequence]:
    """Shortest reconfiguration from start to goal, or None."""
    if goal.num_edges != g.num_edges:
        raise ValueError("goal configuration covers a different edge set")
    if not is_legal(g, goal):
        raise ValueError("goal configuration is illegal")
    return _bfs(g, start, lambda bits, s: bits == goal.bits, _limits(limits))


def _bounded_bfs(
    g: ConstraintGraph,
    start: Configuration,
    allowed_mask: int,
    is_goal,
    limits: SolverLimits,
) -> Optional[MoveSequence]:
    """BFS over sets of already-reversed edges (each edge at most once).

    A state is the set of reversed edges; the configuration it denotes is
    start XOR that set, so prefix legality only depends on the set and the
    order we discovered it in.
    """
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    if is_goal(0):
        return []
    parents: dict[int, tuple[int, int]] = {0: (-1, -1)}
    frontier = [0]
    depth = 0
    while frontier:
        if limits.max_len is not None and depth >= limits.max_len:
            return None
        depth += 1
        next_frontier: list[int] = []
        for used in frontier:
            bits = start.bits ^ used
            for e in legal_moves_bits(g, bits):
                bit = 1 << e
                if used & bit or not (allowed_mask & bit):
                    continue
                child = used | bit
                if child in parents:
                    continue
                parents[child] = (used, e)
                if limits.max_states is not None and len(parents) > limits.max_states:
                    raise LimitExceeded(
                        f"visited more than max_states={limits.max_states} edge sets"
                    )
                if is_goal(child):
                    return _reconstruct(parents, child)
                next_frontier.append(child)
        frontier = next_frontier
    return None


def solve_bounded_c2e(
    g: ConstraintGraph,
    start: Configuration,
    target: int,
    limits: Optional[SolverLimits] = None,
) -> Optional[MoveSequence]:
    """Shortest pairwise-distinct reversal sequence containing the target."""
    if not (0 <= target < g.num_edges):
        raise ValueError(f"unknown target edge {target}")
    mask = 1 << target
    all_edges = (1 << g.num_edges) - 1
    return _bounded_bfs(g, start, all_edges, lambda used: used & mask != 0, _limits(limits))


def solve_bounded_c2c(
    g: ConstraintGraph,
    start: Configuration,
    goal: Configuration,
    limits: Optional[SolverLimits] = None,
) -> Optional[MoveSequence]:
    """Order of the differing edges, each reversed once, every prefix legal.

    Reversing any non-differing edge could never be undone, so the search
    is restricted to subsets of the differing set.
    """
    if goal.num_edges != g.num_edges:
        raise ValueError("goal configuration covers a different edge set")
    if not is_legal(g, goal):
        raise ValueError("goal configuration is illegal")
    diff = start.bits ^ goal.bits
    return _bounded_bfs(g, start, diff, lambda used: used == diff, _limits(limits))


def reachable_configs(
    g: ConstraintGraph,
    seeds: Iterable[Configuration],
    max_states: Optional[int] = DEFAULT_MAX_STATES,
) -> dict[int, int]:
    """Map every configuration reachable from the seeds to a component id.

    Components are connected classes under single legal reversals; since
    reversals are involutions the step relation is symmetric and these are
    plain connected components.
    """
    comp: dict[int, int] = {}
    next_id = 0
    for seed in seeds:
        if seed.num_edges != g.num_edges:
            raise ValueError("seed configuration covers a different edge set")
        if not is_legal(g, seed):
            raise ValueError("seed configuration is illegal")
        if seed.bits in comp:
            continue
        comp[seed.bits] = next_id
        frontier = [seed.bits]
        while frontier:
            next_frontier: list[int] = []
            for bits in frontier:
                for e in legal_moves_bits(g, bits):
                    child = bits ^ (1 << e)
                    if child in comp:
                        continue
                    comp[child] = next_id
                    if max_states is not None and len(comp) > max_states:
                        raise LimitExceeded(
                            f"visited more than max_states={max_states} configurations"
                        )
                    next_frontier.append(child)
            frontier = next_frontier
        next_id += 1
    return comp


def reachable_components_vectorized(
    g: ConstraintGraph,
    seeds: Iterable[Configuration],
    max_states: Optional[int] = DEFAULT_MAX_STATES,
) -> dict[bytes, int]:
    """Vectorized variant of ``reachable_configs`` for graphs of any width.

    States are byte strings (one byte per edge, 0 = toward u) so graphs
    with more than 63 edges work; frontier expansion is batched in numpy.
    Returns {state_bytes: component_id}.
    """
    m = g.num_edges
    n = g.num_vertices
    weight_to_u = np.zeros((m, n), dtype=np.int32)
    weight_to_v = np.zeros((m, n), dtype=np.int32)
    for e, (u, v, w) in enumerate(g.edges):
        weight_to_u[e, u] = w
        weight_to_v[e, v] = w
    need = np.array(g.min_inflow, dtype=np.int32)
    head_u = np.array([u for u, _, _ in g.edges], dtype=np.int64)
    head_v = np.array([v for _, v, _ in g.edges], dtype=np.int64)
    weights = np.array([w for _, _, w in g.edges], dtype=np.int32)

    comp: dict[bytes, int] = {}
    next_id = 0
    for seed in seeds:
        if seed.num_edges != m:
            raise ValueError("seed configuration covers a different edge set")
        if not is_legal(g, seed):
            raise ValueError("seed configuration is illegal")
        row = np.array(
            [[(seed.bits >> e) & 1 for e in range(m)]], dtype=np.int8
        )
        key = row.tobytes()
        if key in comp:
            continue
        comp[key] = next_id
        frontier = row
        while frontier.shape[0]:
            flows = frontier.astype(np.int32) @ weight_to_v
            flows += (1 - frontier).astype(np.int32) @ weight_to_u
            children_rows: list[np.ndarray] = []
            for e in range(m):
                toward_v = frontier[:, e].astype(bool)
                loser = np.where(toward_v, head_v[e], head_u[e])
                ok = flows[np.arange(frontier.shape[0]), loser] - weights[e] >= need[loser]
                if not ok.any():
                    continue
                flipped = frontier[ok].copy()
                flipped[:, e] ^= 1
                children_rows.append(flipped)
            if not children_rows:
                break
            children = np.concatenate(children_rows)
            fresh: list[np.ndarray] = []
            for i in range(children.shape[0]):
                key = children[i].tobytes()
                if key not in comp:
                    comp[key] = next_id
                    fresh.append(children[i])
            if max_states is not None and len(comp) > max_states:
                raise LimitExceeded(
                    f"visited more than max_states={max_states} configurations"
                )
            frontier = np.array(fresh, dtype=np.int8) if fresh else np.empty((0, m), dtype=np.int8)
        next_id += 1
    return comp


def config_to_bytes(c: Configuration) -> bytes:
    return bytes((c.bits >> e) & 1 for e in range(c.num_edges))


def replay(g: ConstraintGraph, start: Configuration, moves: Iterable[int]) -> Configuration:
    """Apply moves, asserting legality after every step."""
    if not is_legal(g, start):
        raise ValueError("start configuration is illegal")
    current = start
    for e in moves:
        current = current.flip(e)
        if not is_legal(g, current):
            raise ValueError(f"move sequence becomes illegal after flipping edge {e}")
    return current


def complete_config(
    g: ConstraintGraph,
    fixed: Optional[dict[int, bool]] = None,
    node_budget: Optional[int] = 2_000_000,
) -> Optional[Configuration]:
    """Find a legal configuration extending ``fixed``, or None if impossible.

    ``fixed`` maps edge id to True when the edge must point toward its v
    endpoint.  Backtracking with two propagation rules:

    - starvation: a vertex that cannot lose an undecided edge without
      dropping below its demand forces that edge inward;
    - free edges: an edge whose endpoints are both already satisfied is
      oriented arbitrarily without branching.

    After the initial propagation the undecided edges split into connected
    islands that are solved independently, which keeps slack-rich gadget
    compositions tractable.  Deterministic.
    """
    m = g.num_edges
    orient: list[Optional[bool]] = [None] * m
    guaranteed = [0] * g.num_vertices
    potential = [0] * g.num_vertices
    for u, v, w in g.edges:
        potential[u] += w
        potential[v] += w

    nodes_left = [node_budget if node_budget is not None else -1]

    def assign(e: int, toward_v: bool, trail: list[int]) -> bool:
        u, v, w = g.edges[e]
        orient[e] = toward_v
        trail.append(e)
        gain, lose = (v, u) if toward_v else (u, v)
        guaranteed[gain] += w
        potential[lose] -= w
        return potential[lose] >= g.min_inflow[lose]

    def undo(trail: list[int], mark: int) -> None:
        while len(trail) > mark:
            e = trail.pop()
            u, v, w = g.edges[e]
            toward_v = orient[e]
            gain, lose = (v, u) if toward_v else (u, v)
            guaranteed[gain] -= w
            potential[lose] += w
            orient[e] = None

    def propagate(trail: list[int], scope: Optional[set[int]] = None) -> bool:
        changed = True
        while changed:
            changed = False
            for e in range(m) if scope is None else sorted(scope):
                if orient[e] is not None:
                    continue
                u, v, w = g.edges[e]
                u_ok = guaranteed[u] >= g.min_inflow[u]
                v_ok = guaranteed[v] >= g.min_inflow[v]
                if u_ok and v_ok:
                    if not assign(e, False, trail):
                        return False
                    changed = True
                    continue
                u_forced = potential[u] - w < g.min_inflow[u]
                v_forced = potential[v] - w < g.min_inflow[v]
                if u_forced and v_forced:
                    return False
                if u_forced:
                    if not assign(e, False, trail):
                        return False
                    changed = True
                elif v_forced:
                    if not assign(e, True, trail):
                        return False
                    changed = True
        return True

    def component_edges(seed: int) -> set[int]:
        comp = {seed}
        stack = [seed]
        while stack:
            e = stack.pop()
            u, v, _ = g.edges[e]
            for x in (u, v):
                for e2 in g.incident[x]:
                    if orient[e2] is None and e2 not in comp:
                        comp.add(e2)
                        stack.append(e2)
        return comp

    def solve_component(scope: set[int]) -> bool:
        if nodes_left[0] == 0:
            raise LimitExceeded("configuration completion search budget exhausted")
        if nodes_left[0] > 0:
            nodes_left[0] -= 1
        pending = [e for e in sorted(scope) if orient[e] is None]
        if not pending:
            return True
        best, best_key = None, None
        for e in pending:
            u, v, w = g.edges[e]
            slack = min(
                potential[u] - g.min_inflow[u],
                potential[v] - g.min_inflow[v],
            )
            key = (slack, e)
            if best_key is None or key < best_key:
                best, best_key = e, key
        e = best
        u, v, _ = g.edges[e]
        first = g.min_inflow[v] - guaranteed[v] >= g.min_inflow[u] - guaranteed[u]
        for toward_v in (first, not first):
            trail: list[int] = []
            if (
                assign(e, toward_v, trail)
                and propagate(trail, scope)
                and solve_component(scope)
            ):
                return True
            undo(trail, 0)
        return False

    for v in range(g.num_vertices):
        if potential[v] < g.min_inflow[v]:
            return None
    trail: list[int] = []
    for e, toward_v in sorted((fixed or {}).items()):
        if orient[e] is not None:
            if orient[e] != toward_v:
                return None
            continue
        if not assign(e, toward_v, trail):
            return None
    if not propagate(trail):
        return None
    for e in range(m):
        if orient[e] is None:
            if not solve_component(component_edges(e)):
                return None
    bits = 0
    for e in range(m):
        if orient[e]:
            bits |= 1 << e
    c = Configuration(bits, m)
    if not is_legal(g, c):
        raise AssertionError("completion produced an illegal configuration")
    return c
