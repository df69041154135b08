"""Gadget library: constructors, composition, and behavior extraction.

A gadget is a constraint graph with named boundary ports.  Each port is an
edge whose far endpoint is a dedicated inflow-0 boundary vertex, so every
intermediate object is itself a valid constraint graph.  ``attach`` splices
two ports into a single internal edge.

Port-state convention: 1 means the port edge points INTO the gadget
(toward its internal endpoint), 0 means out toward the boundary.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .core import (
    Configuration,
    ConstraintGraph,
    GraphBuilder,
    LimitExceeded,
    VertexKind,
    classify_vertex,
    inflows,
    is_legal,
    legal_moves_bits,
    validate_restricted,
)
from .search import complete_config, enumerate_legal_bits

Coord = tuple[float, float]


@dataclass(frozen=True)
class Gadget:
    graph: ConstraintGraph
    ports: dict[str, int]
    port_weight: dict[str, int]
    boundary: dict[str, int]
    initial: Configuration
    named_edges: dict[str, int] = field(default_factory=dict)
    allow_other: frozenset[int] = frozenset()
    layout: dict[int, Coord] = field(default_factory=dict)

    def port_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.ports))

    def internal_port_endpoint(self, name: str) -> int:
        e = self.ports[name]
        u, v = self.graph.endpoints(e)
        return u if v == self.boundary[name] else v

    def port_points_in(self, c: Configuration, name: str) -> bool:
        return c.head(self.graph, self.ports[name]) == self.internal_port_endpoint(name)

    def port_state(self, c: Configuration) -> tuple[int, ...]:
        return tuple(int(self.port_points_in(c, p)) for p in self.port_names())

    def internal_vertices(self) -> list[int]:
        b = set(self.boundary.values())
        return [v for v in range(self.graph.num_vertices) if v not in b]

    def validate(self) -> list[str]:
        """Structural port sanity plus restrictedness of internal vertices."""
        report: list[str] = []
        for name, e in self.ports.items():
            u, v = self.graph.endpoints(e)
            bvert = self.boundary[name]
            if bvert not in (u, v):
                report.append(f"port {name}: boundary vertex is not an endpoint")
            if self.graph.min_inflow[bvert] != 0:
                report.append(f"port {name}: boundary vertex has nonzero demand")
            if self.graph.degree(bvert) != 1:
                report.append(f"port {name}: boundary vertex is not dangling")
            if self.graph.weight(e) != self.port_weight[name]:
                report.append(f"port {name}: recorded weight mismatch")
        exempt = set(self.allow_other) | set(self.boundary.values())
        report.extend(validate_restricted(self.graph, allow_other=exempt))
        return report


def _finish(
    b: GraphBuilder,
    ports: dict[str, int],
    port_weight: dict[str, int],
    boundary: dict[str, int],
    initial_bits: Optional[int] = None,
    named_edges: Optional[dict[str, int]] = None,
    allow_other: Iterable[int] = (),
    layout: Optional[dict[int, Coord]] = None,
) -> Gadget:
    g = b.build()
    if initial_bits is None:
        legal = enumerate_legal_bits(g) if g.num_edges <= 20 else None
        if legal is not None:
            if not legal:
                raise ValueError("gadget has no legal configuration")
            bits = legal[0]
        else:
            c = complete_config(g)
            if c is None:
                raise ValueError("gadget has no legal configuration")
            bits = c.bits
    else:
        bits = initial_bits
    init = Configuration(bits, g.num_edges)
    if not is_legal(g, init):
        raise ValueError("gadget initial configuration is illegal")
    return Gadget(
        graph=g,
        ports=ports,
        port_weight=port_weight,
        boundary=boundary,
        initial=init,
        named_edges=named_edges or {},
        allow_other=frozenset(allow_other),
        layout=layout or {},
    )


def _bit(toward: int, u: int) -> int:
    """1 when the edge should point toward its v endpoint; helper for wiring."""
    return int(toward != u)


@functools.cache
def build_and() -> Gadget:
    """Single AND vertex: two weight-1 ports, one weight-2 port."""
    b = GraphBuilder()
    mid = b.add_vertex(2)
    ports: dict[str, int] = {}
    weights: dict[str, int] = {}
    bound: dict[str, int] = {}
    for name, w in (("r1", 1), ("r2", 1), ("b", 2)):
        bv = b.add_vertex(0)
        ports[name] = b.add_edge(mid, bv, w)
        weights[name] = w
        bound[name] = bv
    # Both red ports inward satisfies the vertex; blue port outward.
    bits = 0  # every port edge is (mid, boundary); toward mid = bit 0
    bits |= 1 << ports["b"]
    return _finish(b, ports, weights, bound, initial_bits=bits,
                   layout={mid: (0.0, 0.0)})


@functools.cache
def build_or() -> Gadget:
    """Single OR vertex: three weight-2 ports."""
    b = GraphBuilder()
    mid = b.add_vertex(2)
    ports: dict[str, int] = {}
    weights: dict[str, int] = {}
    bound: dict[str, int] = {}
    for name in ("b1", "b2", "b3"):
        bv = b.add_vertex(0)
        ports[name] = b.add_edge(mid, bv, 2)
        weights[name] = 2
        bound[name] = bv
    # All ports inward (bit 0 = toward mid, the u endpoint) is legal.
    return _finish(b, ports, weights, bound, initial_bits=0,
                   layout={mid: (0.0, 0.0)})


@functools.cache
def build_blue_terminator() -> Gadget:
    """Closes a loose weight-2 edge; the port can only ever point inward.

    Five internal vertices: the attach vertex is an OR fed by the port; the
    four supporting vertices are ANDs wired so that neither support edge
    can ever replace the port's inflow.
    """
    b = GraphBuilder()
    A = b.add_vertex(2)
    L = b.add_vertex(2)
    R = b.add_vertex(2)
    M = b.add_vertex(2)
    D = b.add_vertex(2)
    bv = b.add_vertex(0)
    e_port = b.add_edge(A, bv, 2)
    e_la = b.add_edge(L, A, 2)
    e_ld = b.add_edge(L, D, 1)
    e_rd = b.add_edge(R, D, 1)
    e_ra = b.add_edge(R, A, 2)
    e_ml = b.add_edge(M, L, 1)
    e_mr = b.add_edge(M, R, 1)
    e_dm = b.add_edge(D, M, 2)
    bits = 0
    bits |= _bit(A, A) << e_port        # port into the gadget
    bits |= _bit(L, L) << e_la          # A -> L
    bits |= _bit(L, L) << e_ld          # D -> L
    bits |= _bit(R, R) << e_rd          # D -> R
    bits |= _bit(R, R) << e_ra          # A -> R
    bits |= _bit(M, M) << e_ml          # L -> M
    bits |= _bit(M, M) << e_mr          # R -> M
    bits |= _bit(D, D) << e_dm          # M -> D
    return _finish(
        b, {"A": e_port}, {"A": 2}, {"A": bv}, initial_bits=bits,
        layout={A: (0.0, 0.0), L: (-1.0, -1.0), R: (1.0, -1.0), M: (0.0, -2.0), D: (0.0, -3.0)},
    )


@functools.cache
def build_red_terminator() -> Gadget:
    """Closes a loose weight-1 edge; both port orientations stay reachable.

    The attach vertex has three weight-1 edges and zero demand, so the port
    is never constrained; the supporting lattice keeps every internal
    vertex an AND or OR and supplies the attach vertex's neighbors forever.
    """
    b = GraphBuilder()
    A = b.add_vertex(0)
    L = b.add_vertex(2)
    R = b.add_vertex(2)
    M = b.add_vertex(2)
    D = b.add_vertex(2)
    bv = b.add_vertex(0)
    e_port = b.add_edge(A, bv, 1)
    e_la = b.add_edge(L, A, 1)
    e_ld = b.add_edge(L, D, 2)
    e_rd = b.add_edge(R, D, 2)
    e_ra = b.add_edge(R, A, 1)
    e_ml = b.add_edge(M, L, 1)
    e_mr = b.add_edge(M, R, 1)
    e_dm = b.add_edge(D, M, 2)
    bits = 0
    bits |= _bit(bv, A) << e_port       # port out of the gadget
    bits |= _bit(A, L) << e_la          # L -> A
    bits |= _bit(L, L) << e_ld          # D -> L
    bits |= _bit(R, R) << e_rd          # D -> R
    bits |= _bit(A, R) << e_ra          # R -> A
    bits |= _bit(M, M) << e_ml          # L -> M
    bits |= _bit(M, M) << e_mr          # R -> M
    bits |= _bit(D, D) << e_dm          # M -> D
    return _finish(
        b, {"A": e_port}, {"A": 1}, {"A": bv}, initial_bits=bits,
        allow_other=[A],
        layout={A: (0.0, 0.0), L: (-1.0, -1.0), R: (1.0, -1.0), M: (0.0, -2.0), D: (0.0, -3.0)},
    )


@functools.cache
def build_free_red_pair() -> Gadget:
    """Two independently-free weight-1 ports from pure AND/OR internals.

    A single free red port cannot be closed purely: AND vertices carry two
    weight-1 slots each, so the number of weight-1 ports of any AND/OR-only
    gadget is even.  This is the pure pair variant used by the restricted
    reduction outputs.
    """
    b = GraphBuilder()
    L = b.add_vertex(2)
    R = b.add_vertex(2)
    M = b.add_vertex(2)
    D = b.add_vertex(2)
    bv1 = b.add_vertex(0)
    bv2 = b.add_vertex(0)
    e_p1 = b.add_edge(L, bv1, 1)
    e_p2 = b.add_edge(R, bv2, 1)
    e_ld = b.add_edge(L, D, 2)
    e_rd = b.add_edge(R, D, 2)
    e_ml = b.add_edge(M, L, 1)
    e_mr = b.add_edge(M, R, 1)
    e_dm = b.add_edge(D, M, 2)
    bits = 0
    bits |= _bit(bv1, L) << e_p1        # ports out
    bits |= _bit(bv2, R) << e_p2
    bits |= _bit(L, L) << e_ld          # D -> L
    bits |= _bit(R, R) << e_rd          # D -> R
    bits |= _bit(M, M) << e_ml          # L -> M
    bits |= _bit(M, M) << e_mr          # R -> M
    bits |= _bit(D, D) << e_dm          # M -> D
    return _finish(
        b, {"A": e_p1, "B": e_p2}, {"A": 1, "B": 1}, {"A": bv1, "B": bv2},
        initial_bits=bits,
        layout={L: (-1.0, 0.0), R: (1.0, 0.0), M: (0.0, -1.0), D: (0.0, -2.0)},
    )


@functools.cache
def build_red_blue_converter() -> Gadget:
    """AND vertex with one weight-1 slot freed: blue out forces red in."""
    base = build_and()
    composite = attach(base, "r2", build_red_terminator(), "A", prefix_left="", prefix_right="t:")
    ports = dict(composite.ports)
    rename = {"r1": "red", "b": "blue"}
    new_ports = {rename.get(k, k): v for k, v in ports.items()}
    new_weights = {rename.get(k, k): v for k, v in composite.port_weight.items()}
    new_bound = {rename.get(k, k): v for k, v in composite.boundary.items()}
    return Gadget(
        graph=composite.graph,
        ports=new_ports,
        port_weight=new_weights,
        boundary=new_bound,
        initial=composite.initial,
        named_edges=composite.named_edges,
        allow_other=composite.allow_other,
        layout=composite.layout,
    )


def _crossover_skeleton(b: GraphBuilder) -> tuple[dict[str, int], dict[str, int]]:
    """Shared outer vertices of both crossover variants: 4 port ANDs + 2 link ANDs."""
    verts = {name: b.add_vertex(2) for name in ("A", "B", "C", "D", "L", "R")}
    bounds = {}
    for p in ("A", "B", "C", "D"):
        bounds[p] = b.add_vertex(0)
    return verts, bounds


@functools.cache
def build_crossover_raw() -> Gadget:
    """Crossover with four degree-4 weight-1 hub vertices (non-pure variant).

    Ports A/B and C/D behave as the two crossing weight-2 edges: in every
    legal configuration at most one end of each pair points outward.
    """
    b = GraphBuilder()
    v, bounds = _crossover_skeleton(b)
    hubs = {name: b.add_vertex(2) for name in ("AC", "AD", "BC", "BD")}
    ports = {}
    for p in ("A", "B", "C", "D"):
        ports[p] = b.add_edge(v[p], bounds[p], 2)
    ring = [
        ("A", "AD"), ("AD", "D"), ("D", "BD"), ("BD", "B"),
        ("B", "BC"), ("BC", "C"), ("C", "AC"), ("AC", "A"),
    ]
    tri = [("AC", "L"), ("L", "BC"), ("BC", "AC"), ("AD", "R"), ("R", "BD"), ("BD", "AD")]
    def vertex(name: str) -> int:
        return hubs[name] if name in hubs else v[name]
    named: dict[str, int] = {}
    for x, y in ring + tri:
        named["-".join(sorted((x, y)))] = b.add_edge(vertex(x), vertex(y), 1)
    named["L-R"] = b.add_edge(v["L"], v["R"], 2)
    layout = {
        v["A"]: (0.0, 3.0), v["B"]: (0.0, -3.0), v["C"]: (-4.0, 1.0), v["D"]: (4.0, 1.0),
        v["L"]: (-1.0, 0.0), v["R"]: (1.0, 0.0),
        hubs["AC"]: (-2.0, 1.0), hubs["AD"]: (2.0, 1.0),
        hubs["BC"]: (-2.0, -1.0), hubs["BD"]: (2.0, -1.0),
    }
    return _finish(
        b, ports, {p: 2 for p in ports}, bounds,
        allow_other=list(hubs.values()), layout=layout, named_edges=named,
    )


# Hub edge order must match the half-crossover's planar port rotation
# (A, D, B, C counter-clockwise) so the pure replacement stays planar.
_HUB_EDGES: dict[str, tuple[tuple[str, str], ...]] = {
    "AC": (("C", "A"), ("A", "D"), ("L", "B"), ("BC", "C")),
    "AD": (("A", "A"), ("D", "D"), ("BD", "B"), ("R", "C")),
    "BC": (("B", "A"), ("AC", "D"), ("L", "B"), ("C", "C")),
    "BD": (("D", "A"), ("AD", "D"), ("B", "B"), ("R", "C")),
}


@functools.cache
def build_half_crossover() -> Gadget:
    """Half-crossover: the pure AND/OR stand-in for a degree-4 hub vertex."""
    b = GraphBuilder()
    names = ("A", "B", "C", "D", "AC", "AD", "BC", "BD")
    v = {name: b.add_vertex(2) for name in names}
    bounds = {p: b.add_vertex(0) for p in ("A", "B", "C", "D")}
    ports = {p: b.add_edge(v[p], bounds[p], 2) for p in ("A", "B", "C", "D")}
    blue = [("A", "AD"), ("BD", "B"), ("B", "BC"), ("AC", "A")]
    red = [("AD", "D"), ("D", "BD"), ("BC", "C"), ("C", "AC"), ("BC", "AC"), ("BD", "AD")]
    for x, y in blue:
        b.add_edge(v[x], v[y], 2)
    for x, y in red:
        b.add_edge(v[x], v[y], 1)
    layout = {
        v["A"]: (0.0, 2.0), v["B"]: (0.0, -2.0), v["C"]: (-2.0, 1.0), v["D"]: (2.0, 1.0),
        v["AC"]: (-1.0, 1.0), v["AD"]: (1.0, 1.0), v["BC"]: (-1.0, -1.0), v["BD"]: (1.0, -1.0),
    }
    return _finish(b, ports, {p: 2 for p in ports}, bounds, layout=layout)


@functools.cache
def build_crossover_pure() -> Gadget:
    """Crossover with every degree-4 hub replaced by a half-crossover.

    Each weight-1 hub edge passes through a conversion AND whose spare
    weight-1 slot is closed pairwise through pure free-pair gadgets, so
    every internal vertex is an AND or OR.
    """
    b = GraphBuilder()
    v, bounds = _crossover_skeleton(b)
    ports = {p: b.add_edge(v[p], bounds[p], 2) for p in ("A", "B", "C", "D")}
    lr_edge = b.add_edge(v["L"], v["R"], 2)

    half = build_half_crossover()
    layout: dict[int, Coord] = {
        v["A"]: (0.0, 24.0), v["B"]: (0.0, -24.0), v["C"]: (-32.0, 8.0), v["D"]: (32.0, 8.0),
        v["L"]: (-4.0, 0.0), v["R"]: (4.0, 0.0),
    }
    hub_pos = {"AC": (-16.0, 8.0), "AD": (16.0, 8.0), "BC": (-16.0, -8.0), "BD": (16.0, -8.0)}

    # Instantiate one half-crossover per hub; record its port attach vertices.
    hub_attach: dict[str, dict[str, int]] = {}
    for hub, (hx, hy) in hub_pos.items():
        vmap: dict[int, int] = {}
        hg = half.graph
        boundary_verts = set(half.boundary.values())
        for hv in range(hg.num_vertices):
            if hv in boundary_verts:
                continue
            nv = b.add_vertex(hg.min_inflow[hv])
            vmap[hv] = nv
            px, py = half.layout.get(hv, (0.0, 0.0))
            layout[nv] = (hx + px * 2.0, hy + py * 2.0)
        for e in range(hg.num_edges):
            eu, ev = hg.endpoints(e)
            if eu in boundary_verts or ev in boundary_verts:
                continue
            b.add_edge(vmap[eu], vmap[ev], hg.weight(e))
        hub_attach[hub] = {
            p: vmap[half.internal_port_endpoint(p)] for p in ("A", "B", "C", "D")
        }

    # Conversion AND per hub slot; hub-hub edges get a converter at each end.
    spare_slots: dict[str, list[tuple[int, Coord]]] = {h: [] for h in hub_pos}
    seen_pairs: dict[tuple[str, str], int] = {}

    def conv_for(hub: str, half_port: str) -> int:
        """Add a conversion AND on one hub slot; return the vertex carrying its red edges."""
        hx, hy = hub_pos[hub]
        attach = hub_attach[hub][half_port]
        ax, ay = layout[attach]
        # Place the converter just beyond the half-crossover port vertex,
        # on the ray from the hub center through that port.
        cx, cy = (hx + (ax - hx) * 1.6, hy + (ay - hy) * 1.6)
        conv = b.add_vertex(2)
        layout[conv] = (cx, cy)
        b.add_edge(conv, attach, 2)
        spare_slots[hub].append((conv, (cx, cy)))
        return conv

    hub_names = ("AC", "AD", "BC", "BD")
    hub_set = set(hub_names)
    named: dict[str, int] = {"L-R": lr_edge}
    for hub in hub_names:
        for neighbor, half_port in _HUB_EDGES[hub]:
            conv = conv_for(hub, half_port)
            if neighbor in hub_set:
                key = tuple(sorted((hub, neighbor)))
                if key in seen_pairs:
                    # Edge (later hub's conv, earlier hub's conv).
                    named["-".join(key)] = b.add_edge(conv, seen_pairs[key], 1)
                else:
                    seen_pairs[key] = conv
            else:
                named["-".join(sorted((hub, neighbor)))] = b.add_edge(conv, v[neighbor], 1)

    # Close converter spare slots pairwise with pure free-pair gadgets.
    pair = build_free_red_pair()
    for hub in hub_names:
        slots = spare_slots[hub]
        assert len(slots) % 2 == 0
        for i in range(0, len(slots), 2):
            (c1, p1), (c2, p2) = slots[i], slots[i + 1]
            midx, midy = (p1[0] + p2[0]) / 2.0, (p1[1] + p2[1]) / 2.0
            pg = pair.graph
            pb = set(pair.boundary.values())
            vmap = {}
            for pv in range(pg.num_vertices):
                if pv in pb:
                    continue
                nv = b.add_vertex(pg.min_inflow[pv])
                vmap[pv] = nv
                lx, ly = pair.layout.get(pv, (0.0, 0.0))
                layout[nv] = (midx + lx, midy + ly - 2.0)
            for e in range(pg.num_edges):
                eu, ev = pg.endpoints(e)
                if eu in pb or ev in pb:
                    continue
                b.add_edge(vmap[eu], vmap[ev], pg.weight(e))
            b.add_edge(c1, vmap[pair.internal_port_endpoint("A")], 1)
            b.add_edge(c2, vmap[pair.internal_port_endpoint("B")], 1)

    return _finish(b, ports, {p: 2 for p in ports}, bounds, layout=layout,
                   named_edges=named)


def build_crossover(pure_and_or: bool = False) -> Gadget:
    return build_crossover_pure() if pure_and_or else build_crossover_raw()


@functools.cache
def build_latch() -> Gadget:
    """Latch: blue port L locks/unlocks the internal state edge A.

    While L points out of the gadget the hub OR depends on one of its two
    internal blue edges, pinning the AND pair (T, B) and freezing A; after
    reversing L the state edge can flip and L can re-lock.
    """
    b = GraphBuilder()
    hub = b.add_vertex(2)
    T = b.add_vertex(2)
    B = b.add_vertex(2)
    bv_l = b.add_vertex(0)
    bv_t = b.add_vertex(0)
    bv_b = b.add_vertex(0)
    e_l = b.add_edge(hub, bv_l, 2)
    e_te = b.add_edge(T, bv_t, 1)
    e_a = b.add_edge(T, B, 1)
    e_be = b.add_edge(B, bv_b, 1)
    e_ht = b.add_edge(hub, T, 2)
    e_hb = b.add_edge(hub, B, 2)
    bits = 0
    bits |= _bit(bv_l, hub) << e_l      # L points out: locked
    bits |= _bit(bv_t, T) << e_te       # T -> Te
    bits |= _bit(B, T) << e_a           # A: T -> B
    bits |= _bit(B, B) << e_be          # Be -> B
    bits |= _bit(T, hub) << e_ht        # hub -> T
    bits |= _bit(hub, hub) << e_hb      # B -> hub
    return _finish(
        b,
        {"L": e_l, "T": e_te, "B": e_be},
        {"L": 2, "T": 1, "B": 1},
        {"L": bv_l, "T": bv_t, "B": bv_b},
        initial_bits=bits,
        named_edges={"A": e_a},
        layout={hub: (0.0, 0.0), T: (1.0, 1.0), B: (1.0, -1.0)},
    )


@functools.cache
def build_or_tree(n: int) -> Gadget:
    """Chain of n+1 OR vertices exposing n+3 weight-2 ports.

    In every legal configuration at least one port points inward; any
    single-inward port state is reachable from any other.
    """
    if n < 0:
        raise ValueError("or_tree size must be non-negative")
    b = GraphBuilder()
    ors = [b.add_vertex(2) for _ in range(n + 1)]
    internal = [b.add_edge(ors[i], ors[i + 1], 2) for i in range(n)]
    ports: dict[str, int] = {}
    bounds: dict[str, int] = {}
    slots: list[int] = [ors[0], ors[0]] + ors[1:-1] + [ors[-1], ors[-1]] if n else [ors[0]] * 3
    for k, owner in enumerate(slots):
        name = f"p{k}"
        bv = b.add_vertex(0)
        ports[name] = b.add_edge(owner, bv, 2)
        bounds[name] = bv
    # Initial: port p0 feeds the chain head, internal edges cascade deeper,
    # remaining ports point out.
    bits = 0
    for e in internal:
        bits |= 1 << e  # (ors[i], ors[i+1]) oriented toward the deeper vertex
    for name, e in ports.items():
        if name != "p0":
            bits |= 1 << e  # toward the boundary vertex (v endpoint)
    return _finish(
        b, ports, {p: 2 for p in ports}, bounds, initial_bits=bits,
        layout={o: (float(i), 0.0) for i, o in enumerate(ors)},
    )


def attach(
    g1: Gadget,
    p1: str,
    g2: Gadget,
    p2: str,
    prefix_left: str = "",
    prefix_right: str = "",
) -> Gadget:
    """Splice port p1 of g1 with port p2 of g2 into one internal edge.

    Port weights must match.  Remaining port names collide only if the
    caller passes no prefixes; collisions are resolved by prefixing the
    right gadget's ports with "2:".
    """
    if g1.port_weight[p1] != g2.port_weight[p2]:
        raise ValueError(
            f"port weight mismatch: {p1} is {g1.port_weight[p1]}, {p2} is {g2.port_weight[p2]}"
        )
    b = GraphBuilder()
    drop1 = g1.boundary[p1]
    drop2 = g2.boundary[p2]
    map1: dict[int, int] = {}
    map2: dict[int, int] = {}
    for v in range(g1.graph.num_vertices):
        if v != drop1:
            map1[v] = b.add_vertex(g1.graph.min_inflow[v])
    for v in range(g2.graph.num_vertices):
        if v != drop2:
            map2[v] = b.add_vertex(g2.graph.min_inflow[v])

    emap1: dict[int, int] = {}
    emap2: dict[int, int] = {}
    orient: dict[int, bool] = {}
    for e in range(g1.graph.num_edges):
        if e == g1.ports[p1]:
            continue
        u, v = g1.graph.endpoints(e)
        emap1[e] = b.add_edge(map1[u], map1[v], g1.graph.weight(e))
        orient[emap1[e]] = g1.initial.orientation(e).value == "V"
    for e in range(g2.graph.num_edges):
        if e == g2.ports[p2]:
            continue
        u, v = g2.graph.endpoints(e)
        emap2[e] = b.add_edge(map2[u], map2[v], g2.graph.weight(e))
        orient[emap2[e]] = g2.initial.orientation(e).value == "V"

    in1 = map1[g1.internal_port_endpoint(p1)]
    in2 = map2[g2.internal_port_endpoint(p2)]
    spliced = b.add_edge(in1, in2, g1.port_weight[p1])

    graph = b.build()

    def initial_with(toward_in1: bool) -> Optional[Configuration]:
        bits = 0
        for e, toward_v in orient.items():
            if toward_v:
                bits |= 1 << e
        if not toward_in1:
            bits |= 1 << spliced
        c = Configuration(bits, graph.num_edges)
        return c if is_legal(graph, c) else None

    # Prefer g1's drawn port orientation for the spliced edge.
    toward_in1 = g1.port_points_in(g1.initial, p1)
    init = initial_with(toward_in1) or initial_with(not toward_in1)
    if init is None:
        found = complete_config(graph, {e: tv for e, tv in orient.items()})
        if found is None:
            found = complete_config(graph)
        if found is None:
            raise ValueError("attached gadget has no legal configuration")
        init = found

    ports: dict[str, int] = {}
    weights: dict[str, int] = {}
    bounds: dict[str, int] = {}
    named: dict[str, int] = {}
    collide = (
        set(g1.ports) - {p1}
    ) & (set(g2.ports) - {p2}) if not (prefix_left or prefix_right) else set()
    pl = prefix_left or ("1:" if collide else "")
    pr = prefix_right or ("2:" if collide else "")
    for name, e in g1.ports.items():
        if name == p1:
            continue
        ports[pl + name] = emap1[e]
        weights[pl + name] = g1.port_weight[name]
        bounds[pl + name] = map1[g1.boundary[name]]
    for name, e in g2.ports.items():
        if name == p2:
            continue
        ports[pr + name] = emap2[e]
        weights[pr + name] = g2.port_weight[name]
        bounds[pr + name] = map2[g2.boundary[name]]
    for name, e in g1.named_edges.items():
        named[pl + name if (pl and name in g2.named_edges) else name] = emap1[e]
    for name, e in g2.named_edges.items():
        key = pr + name if name in g1.named_edges else name
        named[key] = emap2[e]
    allow = frozenset(
        [map1[v] for v in g1.allow_other] + [map2[v] for v in g2.allow_other]
    )
    layout: dict[int, Coord] = {}
    for v, xy in g1.layout.items():
        if v != drop1:
            layout[map1[v]] = xy
    for v, xy in g2.layout.items():
        if v != drop2:
            layout[map2[v]] = xy
    return Gadget(graph, ports, weights, bounds, init, named, allow, layout)


@dataclass
class BehaviorRelation:
    """Exhaustive port-level semantics of a gadget.

    ``classes`` are connected components of legal configurations under
    internal moves only; ``steps`` are single-port flips between classes.
    """

    port_names: tuple[str, ...]
    legal_states: list[tuple[int, ...]]
    class_states: list[tuple[int, ...]]          # class id -> port state
    steps: set[tuple[int, int]]                  # class-level transitions
    initial_class: int
    config_count: int

    def state_reachable_classes(self, start: int) -> set[int]:
        seen = {start}
        stack = [start]
        adj: dict[int, list[int]] = {}
        for a, bb in self.steps:
            adj.setdefault(a, []).append(bb)
        while stack:
            x = stack.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def reachable_port_states(self, from_class: Optional[int] = None) -> set[tuple[int, ...]]:
        start = self.initial_class if from_class is None else from_class
        return {self.class_states[c] for c in self.state_reachable_classes(start)}

    def port_reach(self, a: tuple[int, ...], b: tuple[int, ...]) -> bool:
        """Some configuration with ports ``a`` reaches some with ports ``b``."""
        for c, st in enumerate(self.class_states):
            if st == a and b in self.reachable_port_states(c):
                return True
        return False

    def dump(self) -> str:
        lines = ["ports " + " ".join(self.port_names)]
        for st in sorted(set(self.legal_states)):
            lines.append("legal " + "".join(map(str, st)))
        arrows = sorted(
            {(self.class_states[a], self.class_states[b]) for a, b in self.steps}
        )
        for a, b in arrows:
            lines.append("step " + "".join(map(str, a)) + " -> " + "".join(map(str, b)))
        return "\n".join(lines) + "\n"


def gadget_behavior(g: Gadget, limit: int = 1 << 22) -> BehaviorRelation:
    """Enumerate all legal configurations and project to port states."""
    graph = g.graph
    if graph.num_edges >= 22:
        raise LimitExceeded("gadget too large for exhaustive behavior extraction")
    legal = enumerate_legal_bits(graph, limit=limit)
    legal_set = set(legal)
    port_edges = {g.ports[p] for p in g.ports}
    index = {bits: i for i, bits in enumerate(legal)}

    # Union-find over internal moves.
    parent = list(range(len(legal)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    port_flips: list[tuple[int, int]] = []
    for bits in legal:
        for e in legal_moves_bits(graph, bits):
            child = bits ^ (1 << e)
            if child not in legal_set:
                continue
            if e in port_edges:
                port_flips.append((index[bits], index[child]))
            else:
                union(index[bits], index[child])

    roots: dict[int, int] = {}
    class_of: list[int] = [0] * len(legal)
    class_states: list[tuple[int, ...]] = []
    for i, bits in enumerate(legal):
        r = find(i)
        if r not in roots:
            roots[r] = len(class_states)
            class_states.append(g.port_state(Configuration(bits, graph.num_edges)))
        class_of[i] = roots[r]

    steps = {(class_of[a], class_of[b]) for a, b in port_flips}
    legal_states = sorted(
        {g.port_state(Configuration(bits, graph.num_edges)) for bits in legal}
    )
    if g.initial.bits not in index:
        raise ValueError("gadget initial configuration is not legal")
    return BehaviorRelation(
        port_names=g.port_names(),
        legal_states=legal_states,
        class_states=class_states,
        steps=steps,
        initial_class=class_of[index[g.initial.bits]],
        config_count=len(legal),
    )


Check = Callable[[Gadget, BehaviorRelation], Optional[str]]


@dataclass
class BehaviorSpec:
    """Named checks over a gadget's exhaustive behavior relation."""

    name: str
    checks: list[tuple[str, Check]]


def verify_behavior(g: Gadget, spec: BehaviorSpec) -> list[str]:
    """Empty report iff every check of the spec holds."""
    behavior = gadget_behavior(g)
    report = []
    for label, check in spec.checks:
        msg = check(g, behavior)
        if msg is not None:
            report.append(f"{spec.name}/{label}: {msg}")
    return report


def _state(beh: BehaviorRelation, assignment: dict[str, int]) -> tuple[int, ...]:
    return tuple(assignment[p] for p in beh.port_names)


def check_implies(port_a: str, val_a: int, port_b: str, val_b: int) -> Check:
    """In every legal port state, port_a == val_a implies port_b == val_b."""

    def run(g: Gadget, beh: BehaviorRelation) -> Optional[str]:
        ia = beh.port_names.index(port_a)
        ib = beh.port_names.index(port_b)
        for st in beh.legal_states:
            if st[ia] == val_a and st[ib] != val_b:
                return f"legal state {st} has {port_a}={val_a} but {port_b}={st[ib]}"
        return None

    return run


def check_state_illegal(assignment: dict[str, int]) -> Check:
    def run(g: Gadget, beh: BehaviorRelation) -> Optional[str]:
        st = _state(beh, assignment)
        if st in beh.legal_states:
            return f"state {assignment} unexpectedly legal"
        return None

    return run


def check_state_legal(assignment: dict[str, int]) -> Check:
    def run(g: Gadget, beh: BehaviorRelation) -> Optional[str]:
        st = _state(beh, assignment)
        if st not in beh.legal_states:
            return f"state {assignment} unexpectedly illegal"
        return None

    return run


def check_legal_count(expected: int) -> Check:
    def run(g: Gadget, beh: BehaviorRelation) -> Optional[str]:
        if len(beh.legal_states) != expected:
            return f"{len(beh.legal_states)} legal port states, expected {expected}"
        return None

    return run


def check_reachable_from_initial(assignment: dict[str, int]) -> Check:
    def run(g: Gadget, beh: BehaviorRelation) -> Optional[str]:
        st = _state(beh, assignment)
        if st not in beh.reachable_port_states():
            return f"state {assignment} not reachable from the initial configuration"
        return None

    return run


def check_mutually_reachable(predicate: Callable[[tuple[int, ...]], bool]) -> Check:
    """Every pair of port states satisfying the predicate is inter-reachable."""

    def run(g: Gadget, beh: BehaviorRelation) -> Optional[str]:
        wanted = [st for st in beh.legal_states if predicate(st)]
        for a in wanted:
            for bb in wanted:
                if a != bb and not beh.port_reach(a, bb):
                    return f"{a} cannot reach {bb}"
        return None

    return run
