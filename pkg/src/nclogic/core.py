"""Constraint-graph data model and configuration semantics.

A constraint graph has integer-weighted undirected edges and a minimum
inflow per vertex.  A configuration orients every edge; it is legal when
each vertex receives total edge weight at least its minimum inflow.
Orientations are stored relative to the edge's (u, v) endpoint order so a
reversal is a single bit flip and configurations pack into plain ints.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence


class LimitExceeded(Exception):
    """A solver hit its state or size budget before reaching a decision."""


class Orientation(enum.Enum):
    TOWARD_U = "U"
    TOWARD_V = "V"

    def flipped(self) -> "Orientation":
        return Orientation.TOWARD_V if self is Orientation.TOWARD_U else Orientation.TOWARD_U


class VertexKind(enum.Enum):
    AND = "and"
    OR = "or"
    OTHER = "other"


@dataclass(frozen=True)
class ConstraintGraph:
    """Immutable constraint graph with dense integer vertex and edge ids.

    ``min_inflow[v]`` is the inflow demand of vertex ``v``; ``edges[e]`` is
    ``(u, v, weight)``.  Parallel edges are allowed, self-loops are not
    (orientation would be meaningless).
    """

    min_inflow: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        n = len(self.min_inflow)
        for v, need in enumerate(self.min_inflow):
            if need < 0:
                raise ValueError(f"vertex {v} has negative min_inflow {need}")
        for e, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {e} endpoint out of range: ({u}, {v})")
            if u == v:
                raise ValueError(f"edge {e} is a self-loop at vertex {u}")
            if w < 1:
                raise ValueError(f"edge {e} has non-positive weight {w}")

    @property
    def num_vertices(self) -> int:
        return len(self.min_inflow)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each vertex (parallel edges listed once each)."""
        inc: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for e, (u, v, _) in enumerate(self.edges):
            inc[u].append(e)
            inc[v].append(e)
        return tuple(tuple(lst) for lst in inc)

    def degree(self, v: int) -> int:
        return len(self.incident[v])

    def endpoints(self, e: int) -> tuple[int, int]:
        u, v, _ = self.edges[e]
        return u, v

    def weight(self, e: int) -> int:
        return self.edges[e][2]

    def other_endpoint(self, e: int, v: int) -> int:
        u, w, _ = self.edges[e]
        if v == u:
            return w
        if v == w:
            return u
        raise ValueError(f"vertex {v} is not an endpoint of edge {e}")

    def incident_weights(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self.weight(e) for e in self.incident[v]))


class GraphBuilder:
    """Single-owner mutable builder; ``build()`` freezes into a ConstraintGraph."""

    def __init__(self) -> None:
        self._min_inflow: list[int] = []
        self._edges: list[tuple[int, int, int]] = []

    def add_vertex(self, min_inflow: int = 0) -> int:
        self._min_inflow.append(min_inflow)
        return len(self._min_inflow) - 1

    def add_edge(self, u: int, v: int, weight: int) -> int:
        self._edges.append((u, v, weight))
        return len(self._edges) - 1

    def set_min_inflow(self, v: int, min_inflow: int) -> None:
        self._min_inflow[v] = min_inflow

    @property
    def num_vertices(self) -> int:
        return len(self._min_inflow)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def build(self) -> ConstraintGraph:
        return ConstraintGraph(tuple(self._min_inflow), tuple(self._edges))


@dataclass(frozen=True)
class Configuration:
    """Orientation assignment for every edge, packed into an int.

    Bit ``e`` is 0 when edge ``e`` points toward its stored ``u`` endpoint
    and 1 when it points toward ``v``.
    """

    bits: int
    num_edges: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.num_edges:
            raise ValueError("orientation bits outside edge range")

    @staticmethod
    def from_orientations(orients: Sequence[Orientation]) -> "Configuration":
        bits = 0
        for e, o in enumerate(orients):
            if o is Orientation.TOWARD_V:
                bits |= 1 << e
        return Configuration(bits, len(orients))

    @staticmethod
    def all_toward_u(num_edges: int) -> "Configuration":
        return Configuration(0, num_edges)

    def orientation(self, e: int) -> Orientation:
        self._check_edge(e)
        return Orientation.TOWARD_V if (self.bits >> e) & 1 else Orientation.TOWARD_U

    def orientations(self) -> tuple[Orientation, ...]:
        return tuple(self.orientation(e) for e in range(self.num_edges))

    def flip(self, e: int) -> "Configuration":
        self._check_edge(e)
        return Configuration(self.bits ^ (1 << e), self.num_edges)

    def flip_all(self, edges: Iterable[int]) -> "Configuration":
        bits = self.bits
        for e in edges:
            self._check_edge(e)
            bits ^= 1 << e
        return Configuration(bits, self.num_edges)

    def head(self, g: ConstraintGraph, e: int) -> int:
        """The vertex edge ``e`` currently points into."""
        u, v, _ = g.edges[e]
        return v if (self.bits >> e) & 1 else u

    def points_into(self, g: ConstraintGraph, e: int, vertex: int) -> bool:
        return self.head(g, e) == vertex

    def differing_edges(self, other: "Configuration") -> list[int]:
        if self.num_edges != other.num_edges:
            raise ValueError("configurations cover different edge sets")
        diff = self.bits ^ other.bits
        return [e for e in range(self.num_edges) if (diff >> e) & 1]

    def _check_edge(self, e: int) -> None:
        if not (0 <= e < self.num_edges):
            raise ValueError(f"edge {e} outside configuration domain")


def _check_domain(g: ConstraintGraph, c: Configuration) -> None:
    if c.num_edges != g.num_edges:
        raise ValueError(
            f"configuration covers {c.num_edges} edges, graph has {g.num_edges}"
        )


def inflow(g: ConstraintGraph, c: Configuration, v: int) -> int:
    """Total weight of edges currently pointing into ``v``."""
    if not (0 <= v < g.num_vertices):
        raise ValueError(f"unknown vertex {v}")
    _check_domain(g, c)
    total = 0
    for e in g.incident[v]:
        if c.head(g, e) == v:
            total += g.weight(e)
    return total


def inflows(g: ConstraintGraph, c: Configuration) -> list[int]:
    """Inflow of every vertex in one pass over the edges."""
    _check_domain(g, c)
    result = [0] * g.num_vertices
    bits = c.bits
    for e, (u, v, w) in enumerate(g.edges):
        result[v if (bits >> e) & 1 else u] += w
    return result


def is_legal(g: ConstraintGraph, c: Configuration) -> bool:
    """True iff every vertex receives at least its minimum inflow."""
    flows = inflows(g, c)
    return all(flows[v] >= need for v, need in enumerate(g.min_inflow))


def is_legal_bits(g: ConstraintGraph, bits: int) -> bool:
    """Legality check on a raw orientation bitmask (hot path for solvers)."""
    flows = [0] * g.num_vertices
    for e, (u, v, w) in enumerate(g.edges):
        flows[v if (bits >> e) & 1 else u] += w
    return all(flows[v] >= need for v, need in enumerate(g.min_inflow))


def classify_vertex(g: ConstraintGraph, v: int) -> VertexKind:
    """AND iff min-inflow 2 with incident weights {1,1,2}; OR iff {2,2,2}."""
    if not (0 <= v < g.num_vertices):
        raise ValueError(f"unknown vertex {v}")
    if g.min_inflow[v] != 2:
        return VertexKind.OTHER
    weights = g.incident_weights(v)
    if weights == (1, 1, 2):
        return VertexKind.AND
    if weights == (2, 2, 2):
        return VertexKind.OR
    return VertexKind.OTHER


def validate_restricted(
    g: ConstraintGraph, allow_other: Iterable[int] = ()
) -> list[str]:
    """Report violations of the degree-3 / weight-{1,2} / AND-OR discipline.

    ``allow_other`` lists vertex ids exempt from the degree and kind checks
    (used for the four degree-4 hubs of the non-pure crossover).  Violations
    are data, not errors: an empty report means the graph is restricted.
    """
    exempt = set(allow_other)
    report: list[str] = []
    for e in range(g.num_edges):
        if g.weight(e) not in (1, 2):
            report.append(f"edge {e} has weight {g.weight(e)} outside {{1,2}}")
    for v in range(g.num_vertices):
        if v in exempt:
            continue
        if g.degree(v) != 3:
            report.append(f"vertex {v} has degree {g.degree(v)}, expected 3")
        if classify_vertex(g, v) is VertexKind.OTHER:
            report.append(f"vertex {v} is neither an AND nor an OR vertex")
    return report


def flip_is_legal(g: ConstraintGraph, flows: Sequence[int], c: Configuration, e: int) -> bool:
    """Would reversing ``e`` keep legality, given precomputed inflows?

    Only the endpoint losing the edge can drop below its demand; the
    gaining endpoint's inflow only grows.
    """
    loser = c.head(g, e)
    return flows[loser] - g.weight(e) >= g.min_inflow[loser]


def legal_moves(g: ConstraintGraph, c: Configuration) -> set[int]:
    """Edges whose single reversal keeps the configuration legal."""
    flows = inflows(g, c)
    for v, need in enumerate(g.min_inflow):
        if flows[v] < need:
            raise ValueError("legal_moves requires a legal input configuration")
    return {e for e in range(g.num_edges) if flip_is_legal(g, flows, c, e)}


def legal_moves_bits(g: ConstraintGraph, bits: int) -> Iterator[int]:
    """Yield flippable edges of a legal raw bitmask in ascending edge order."""
    flows = [0] * g.num_vertices
    heads = [0] * g.num_edges
    for e, (u, v, w) in enumerate(g.edges):
        h = v if (bits >> e) & 1 else u
        heads[e] = h
        flows[h] += w
    for e, (u, v, w) in enumerate(g.edges):
        loser = heads[e]
        if flows[loser] - w >= g.min_inflow[loser]:
            yield e
