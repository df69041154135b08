"""Text formats: one record per line, '#' comments, unknown tags rejected.

Graph files:
    v <id> <min_inflow>
    e <id> <u> <v> <weight>
    config <name>            introduces a configuration block
    o <edge_id> <U|V>        orientation record inside a block
    port <name> <edge_id> <weight>
    credit <vertex> <amount>
    target <edge_id>
    bag <index> <v1> <v2> ...
    layer <vertex> <x> <y>
    backmap <v|e> <id> <token>

Decomposition files:
    bag <node_id> <v1> <v2> ...
    edge <node_a> <node_b>
    kind <node_id> <leaf|intro:V|forget:V|join>

H-word instance files:
    alphabet a b c
    pair a b
    start <word>
    goal <word>         (exclusive with target)
    target <pos> <sym>

Partition instance files:   x 1 1 2
Clique instance files:      n <count>, edge <u> <v>, k <k>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import Configuration, ConstraintGraph, Orientation


class FormatError(ValueError):
    """Malformed input file."""


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


@dataclass
class GraphDocument:
    """A parsed graph file: graph, named configurations, and annotations."""

    graph: ConstraintGraph
    configs: dict[str, Configuration] = field(default_factory=dict)
    ports: dict[str, tuple[int, int]] = field(default_factory=dict)  # name -> (edge, weight)
    credits: dict[int, int] = field(default_factory=dict)
    target: Optional[int] = None
    bags: list[list[int]] = field(default_factory=list)
    layers: dict[int, tuple[int, int]] = field(default_factory=dict)
    backmap_v: dict[int, str] = field(default_factory=dict)
    backmap_e: dict[int, str] = field(default_factory=dict)


def parse_graph(text: str) -> GraphDocument:
    vertices: dict[int, int] = {}
    edges: dict[int, tuple[int, int, int]] = {}
    configs: dict[str, dict[int, Orientation]] = {}
    current_config: Optional[str] = None
    doc_ports: dict[str, tuple[int, int]] = {}
    credits: dict[int, int] = {}
    target: Optional[int] = None
    bags: dict[int, list[int]] = {}
    layers: dict[int, tuple[int, int]] = {}
    backmap_v: dict[int, str] = {}
    backmap_e: dict[int, str] = {}

    def fail(lineno: int, msg: str) -> None:
        raise FormatError(f"line {lineno}: {msg}")

    for lineno, tok in _lines(text):
        tag = tok[0]
        try:
            if tag == "v":
                if len(tok) != 3:
                    fail(lineno, "expected: v <id> <min_inflow>")
                vid, need = int(tok[1]), int(tok[2])
                if vid in vertices:
                    fail(lineno, f"duplicate vertex id {vid}")
                vertices[vid] = need
            elif tag == "e":
                if len(tok) != 5:
                    fail(lineno, "expected: e <id> <u> <v> <weight>")
                eid, u, v, w = map(int, tok[1:])
                if eid in edges:
                    fail(lineno, f"duplicate edge id {eid}")
                edges[eid] = (u, v, w)
            elif tag == "config":
                if len(tok) != 2:
                    fail(lineno, "expected: config <name>")
                current_config = tok[1]
                if current_config in configs:
                    fail(lineno, f"duplicate configuration {current_config}")
                configs[current_config] = {}
            elif tag == "o":
                if len(tok) != 3 or tok[2] not in ("U", "V"):
                    fail(lineno, "expected: o <edge_id> <U|V>")
                if current_config is None:
                    fail(lineno, "orientation record outside a config block")
                configs[current_config][int(tok[1])] = Orientation(tok[2])
            elif tag == "port":
                if len(tok) != 4:
                    fail(lineno, "expected: port <name> <edge_id> <weight>")
                doc_ports[tok[1]] = (int(tok[2]), int(tok[3]))
            elif tag == "credit":
                if len(tok) != 3:
                    fail(lineno, "expected: credit <vertex> <amount>")
                credits[int(tok[1])] = int(tok[2])
            elif tag == "target":
                if len(tok) != 2:
                    fail(lineno, "expected: target <edge_id>")
                target = int(tok[1])
            elif tag == "bag":
                if len(tok) < 2:
                    fail(lineno, "expected: bag <index> <v...>")
                bags[int(tok[1])] = [int(x) for x in tok[2:]]
            elif tag == "layer":
                if len(tok) != 4:
                    fail(lineno, "expected: layer <vertex> <x> <y>")
                layers[int(tok[1])] = (int(tok[2]), int(tok[3]))
            elif tag == "backmap":
                if len(tok) != 4 or tok[1] not in ("v", "e"):
                    fail(lineno, "expected: backmap <v|e> <id> <token>")
                (backmap_v if tok[1] == "v" else backmap_e)[int(tok[2])] = tok[3]
            else:
                fail(lineno, f"unknown record tag {tag!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            fail(lineno, f"bad integer field: {exc}")

    n = len(vertices)
    if sorted(vertices) != list(range(n)):
        raise FormatError("vertex ids must be dense 0..n-1")
    m = len(edges)
    if sorted(edges) != list(range(m)):
        raise FormatError("edge ids must be dense 0..m-1")
    graph = ConstraintGraph(
        tuple(vertices[i] for i in range(n)),
        tuple(edges[i] for i in range(m)),
    )
    built_configs: dict[str, Configuration] = {}
    for name, omap in configs.items():
        if sorted(omap) != list(range(m)):
            raise FormatError(
                f"configuration {name!r} must orient exactly the graph's edges"
            )
        built_configs[name] = Configuration.from_orientations(
            [omap[e] for e in range(m)]
        )
    if target is not None and not (0 <= target < m):
        raise FormatError(f"target edge {target} not in graph")
    bag_list = [bags[i] for i in sorted(bags)]
    return GraphDocument(
        graph=graph,
        configs=built_configs,
        ports=doc_ports,
        credits=credits,
        target=target,
        bags=bag_list,
        layers=layers,
        backmap_v=backmap_v,
        backmap_e=backmap_e,
    )


def serialize_graph(doc: GraphDocument) -> str:
    g = doc.graph
    out: list[str] = []
    for v in range(g.num_vertices):
        out.append(f"v {v} {g.min_inflow[v]}")
    for e, (u, v, w) in enumerate(g.edges):
        out.append(f"e {e} {u} {v} {w}")
    for name in sorted(doc.ports):
        e, w = doc.ports[name]
        out.append(f"port {name} {e} {w}")
    for v in sorted(doc.credits):
        out.append(f"credit {v} {doc.credits[v]}")
    if doc.target is not None:
        out.append(f"target {doc.target}")
    for i, bag in enumerate(doc.bags):
        out.append("bag " + " ".join(str(x) for x in [i] + list(bag)))
    for v in sorted(doc.layers):
        x, y = doc.layers[v]
        out.append(f"layer {v} {x} {y}")
    for v in sorted(doc.backmap_v):
        out.append(f"backmap v {v} {doc.backmap_v[v]}")
    for e in sorted(doc.backmap_e):
        out.append(f"backmap e {e} {doc.backmap_e[e]}")
    for name in doc.configs:
        out.append(f"config {name}")
        c = doc.configs[name]
        for e in range(g.num_edges):
            out.append(f"o {e} {c.orientation(e).value}")
    return "\n".join(out) + "\n"


def serialize_move_sequence(moves: list[int]) -> str:
    return " ".join(str(e) for e in moves)


def parse_move_sequence(text: str) -> list[int]:
    return [int(tok) for tok in text.split()]


def parse_decomposition(text: str):
    from .treewidth import NiceTreeDecomposition, TreeDecomposition

    bags: dict[int, frozenset[int]] = {}
    tree_edges: set[tuple[int, int]] = set()
    kinds: dict[int, tuple[str, Optional[int]]] = {}
    for lineno, tok in _lines(text):
        tag = tok[0]
        if tag == "bag":
            if len(tok) < 2:
                raise FormatError(f"line {lineno}: expected: bag <node_id> <v...>")
            bags[int(tok[1])] = frozenset(int(x) for x in tok[2:])
        elif tag == "edge":
            if len(tok) != 3:
                raise FormatError(f"line {lineno}: expected: edge <a> <b>")
            a, b = int(tok[1]), int(tok[2])
            tree_edges.add((min(a, b), max(a, b)))
        elif tag == "kind":
            if len(tok) != 3:
                raise FormatError(f"line {lineno}: expected: kind <node_id> <kind>")
            node = int(tok[1])
            spec = tok[2]
            if spec == "leaf":
                kinds[node] = ("leaf", None)
            elif spec == "join":
                kinds[node] = ("join", None)
            elif spec.startswith("intro:"):
                kinds[node] = ("introduce", int(spec[6:]))
            elif spec.startswith("forget:"):
                kinds[node] = ("forget", int(spec[7:]))
            else:
                raise FormatError(f"line {lineno}: unknown node kind {spec!r}")
        else:
            raise FormatError(f"line {lineno}: unknown record tag {tag!r}")
    td = TreeDecomposition(bags=bags, tree_edges=frozenset(tree_edges))
    if kinds:
        return NiceTreeDecomposition.from_parts(td, kinds)
    return td


def serialize_decomposition(td) -> str:
    out = []
    for node in sorted(td.bags):
        out.append("bag " + " ".join(str(x) for x in [node] + sorted(td.bags[node])))
    for a, b in sorted(td.tree_edges):
        out.append(f"edge {a} {b}")
    kinds = getattr(td, "kinds", None)
    if kinds:
        for node in sorted(kinds):
            kind, v = kinds[node]
            if kind == "leaf":
                out.append(f"kind {node} leaf")
            elif kind == "join":
                out.append(f"kind {node} join")
            elif kind == "introduce":
                out.append(f"kind {node} intro:{v}")
            else:
                out.append(f"kind {node} forget:{v}")
    return "\n".join(out) + "\n"


def parse_hword_instance(text: str):
    from .hword import HRelation, HWordInstance

    alphabet: Optional[list[str]] = None
    pairs: set[tuple[str, str]] = set()
    start: Optional[str] = None
    goal: Optional[str] = None
    target: Optional[tuple[int, str]] = None
    for lineno, tok in _lines(text):
        tag = tok[0]
        if tag == "alphabet":
            if alphabet is not None:
                raise FormatError(f"line {lineno}: duplicate alphabet record")
            if any(len(s) != 1 for s in tok[1:]):
                raise FormatError(f"line {lineno}: symbols must be single characters")
            alphabet = tok[1:]
        elif tag == "pair":
            if len(tok) != 3:
                raise FormatError(f"line {lineno}: expected: pair <a> <b>")
            pairs.add((tok[1], tok[2]))
        elif tag == "start":
            if len(tok) != 2:
                raise FormatError(f"line {lineno}: expected: start <word>")
            start = tok[1]
        elif tag == "goal":
            if len(tok) != 2:
                raise FormatError(f"line {lineno}: expected: goal <word>")
            goal = tok[1]
        elif tag == "target":
            if len(tok) != 3:
                raise FormatError(f"line {lineno}: expected: target <pos> <sym>")
            target = (int(tok[1]), tok[2])
        else:
            raise FormatError(f"line {lineno}: unknown record tag {tag!r}")
    if alphabet is None or start is None:
        raise FormatError("hword instance needs alphabet and start records")
    if (goal is None) == (target is None):
        raise FormatError("hword instance needs exactly one of goal/target")
    h = HRelation(tuple(alphabet), frozenset(pairs))
    return HWordInstance(h=h, start=start, goal=goal, target=target)


def serialize_hword_instance(inst) -> str:
    out = ["alphabet " + " ".join(inst.h.symbols)]
    for a, b in sorted(inst.h.allowed):
        out.append(f"pair {a} {b}")
    out.append(f"start {inst.start}")
    if inst.goal is not None:
        out.append(f"goal {inst.goal}")
    else:
        pos, sym = inst.target
        out.append(f"target {pos} {sym}")
    return "\n".join(out) + "\n"


def parse_partition_instance(text: str) -> list[int]:
    values: Optional[list[int]] = None
    for lineno, tok in _lines(text):
        if tok[0] != "x":
            raise FormatError(f"line {lineno}: unknown record tag {tok[0]!r}")
        if values is not None:
            raise FormatError(f"line {lineno}: duplicate x record")
        values = [int(t) for t in tok[1:]]
    if not values:
        raise FormatError("partition instance needs an x record")
    return values


def serialize_partition_instance(values: list[int]) -> str:
    return "x " + " ".join(str(v) for v in values) + "\n"


def parse_clique_instance(text: str) -> tuple[int, list[tuple[int, int]], int]:
    n: Optional[int] = None
    edges: list[tuple[int, int]] = []
    k: Optional[int] = None
    for lineno, tok in _lines(text):
        tag = tok[0]
        if tag == "n":
            n = int(tok[1])
        elif tag == "edge":
            if len(tok) != 3:
                raise FormatError(f"line {lineno}: expected: edge <u> <v>")
            edges.append((int(tok[1]), int(tok[2])))
        elif tag == "k":
            k = int(tok[1])
        else:
            raise FormatError(f"line {lineno}: unknown record tag {tag!r}")
    if n is None or k is None:
        raise FormatError("clique instance needs n and k records")
    return n, edges, k


def serialize_clique_instance(n: int, edges: list[tuple[int, int]], k: int) -> str:
    out = [f"n {n}"] + [f"edge {u} {v}" for u, v in edges] + [f"k {k}"]
    return "\n".join(out) + "\n"
