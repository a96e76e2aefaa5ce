"""Graph ingestion and emission.

Two formats, both exact round-trip:

* DIMACS-like edge list: ``c`` comment lines, one ``p edge n m`` line, then
  ``e u v`` lines with 1-based labels.
* JSON: ``{"n": int, "edges": [[u, v], ...]}`` with 0-based labels.

Labels are re-mapped to 0-based contiguous integers on ingest.
"""

from __future__ import annotations

import hashlib
import json

from chizeta.graph import Graph


class GraphFormatError(ValueError):
    pass


def to_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.edge_count()}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Graph:
    n = m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if len(tok) != 4 or n is not None:
                raise GraphFormatError(f"line {lineno}: bad problem line {raw!r}")
            n, m = int(tok[2]), int(tok[3])
        elif tok[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before problem line")
            if len(tok) != 3:
                raise GraphFormatError(f"line {lineno}: bad edge line {raw!r}")
            u, v = int(tok[1]) - 1, int(tok[2]) - 1
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise GraphFormatError(f"line {lineno}: invalid edge {raw!r}")
            edges.append((u, v))
        else:
            raise GraphFormatError(f"line {lineno}: unknown record {tok[0]!r}")
    if n is None:
        raise GraphFormatError("missing 'p edge n m' line")
    g = Graph.from_edges(n, edges)
    if g.edge_count() != m:
        raise GraphFormatError(f"header declares {m} edges, found {g.edge_count()} distinct")
    return g


def to_json(g: Graph) -> str:
    return json.dumps({"n": g.n, "edges": [list(e) for e in g.edges()]}, separators=(",", ":"))


def from_json(text: str) -> Graph:
    try:
        d = json.loads(text)
        n = int(d["n"])
        edges = [(int(u), int(v)) for u, v in d["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad JSON graph: {exc}") from exc
    try:
        return Graph.from_edges(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def load_graph(path: str) -> Graph:
    with open(path) as f:
        text = f.read()
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_dimacs(text)


def graph_hash(g: Graph) -> str:
    """Stable short hash of the labelled graph."""
    return hashlib.sha256(to_dimacs(g).encode()).hexdigest()[:16]
