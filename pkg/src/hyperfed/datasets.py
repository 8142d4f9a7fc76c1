"""Reading and writing the sectioned hypergraph text format.

A file is a sequence of ``[section]`` blocks; blank lines and lines that
start with ``#`` are ignored::

    [header]
    num_nodes = 4
    num_classes = 2
    feature_dim = 3
    feature_encoding = dense      # or: sparse
    name = toy

    [features]                    # one row per node
    0.5 0 1                       # dense: feature_dim numbers
    0:0.5 2:1                     # sparse: index:value pairs, "-" for an all-zero row

    [labels]                      # optional; one integer per node, -1 = unlabeled
    0
    1

    [hyperedges]                  # one edge per line, optional "w=<weight>" prefix
    w=2.0 0 1 2
    2 3

A simple-graph file has an ``[edges]`` section of ``u v`` pairs instead of
``[hyperedges]``; it is turned into a 1-hop neighborhood hypergraph.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .hypergraph import Hypergraph, check, dedup_hyperedges, from_simple_graph

log = logging.getLogger(__name__)

_SECTIONS = {"header", "features", "labels", "hyperedges", "edges"}


def _sections(text: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in _SECTIONS:
                raise ParseError(f"unknown section [{current}]", lineno)
            if current in sections:
                raise ParseError(f"section [{current}] repeated", lineno)
            sections[current] = []
            continue
        if current is None:
            raise ParseError("content before the first [section]", lineno)
        sections[current].append((lineno, line))
    return sections


def _header(lines) -> dict[str, str]:
    out = {}
    for lineno, line in lines:
        if "=" in line:
            key, value = line.split("=", 1)
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError(f"header line {line!r} is not 'key = value'", lineno)
            key, value = parts
        out[key.strip()] = value.strip()
    return out


def _int(value: str, what: str, lineno=None) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{what}: expected an integer, got {value!r}", lineno) from None


def _float(value: str, what: str, lineno=None) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"{what}: expected a number, got {value!r}", lineno) from None


def _parse_common(text: str, *, edge_section: str):
    sections = _sections(text)
    for required in ("header", "features", edge_section):
        if required not in sections:
            raise ParseError(f"missing [{required}] section")
    header = _header(sections["header"])
    for key in ("num_nodes", "feature_dim"):
        if key not in header:
            raise ParseError(f"header is missing {key}")
    n = _int(header["num_nodes"], "num_nodes")
    p = _int(header["feature_dim"], "feature_dim")
    num_classes = _int(header.get("num_classes", "0"), "num_classes")
    encoding = header.get("feature_encoding", "dense")
    if encoding not in ("dense", "sparse"):
        raise ParseError(f"feature_encoding must be dense or sparse, got {encoding!r}")

    rows = sections["features"]
    if len(rows) != n:
        raise ParseError(f"[features] has {len(rows)} rows, header says num_nodes = {n}")
    x = np.zeros((n, p))
    for i, (lineno, line) in enumerate(rows):
        tokens = line.split()
        if encoding == "dense":
            if len(tokens) != p:
                raise ParseError(f"feature row {i} has {len(tokens)} values, expected {p}", lineno)
            x[i] = [_float(t, f"feature row {i}", lineno) for t in tokens]
        elif tokens != ["-"]:
            for token in tokens:
                idx, sep, value = token.partition(":")
                if not sep:
                    raise ParseError(f"sparse feature {token!r} is not index:value", lineno)
                j = _int(idx, f"feature row {i}", lineno)
                if not 0 <= j < p:
                    raise ParseError(f"feature index {j} out of range [0, {p})", lineno)
                x[i, j] = _float(value, f"feature row {i}", lineno)

    labels = None
    if "labels" in sections:
        label_rows = sections["labels"]
        if len(label_rows) != n:
            raise ParseError(f"[labels] has {len(label_rows)} rows, expected {n}")
        labels = np.array([_int(line, "label", lineno) for lineno, line in label_rows])
        if num_classes == 0 and labels.size:
            num_classes = int(labels.max()) + 1
    return header, x, labels, num_classes, sections[edge_section]


def parse_hypergraph(text: str) -> Hypergraph:
    header, x, labels, num_classes, edge_lines = _parse_common(text, edge_section="hyperedges")
    edges, weights = [], []
    for lineno, line in edge_lines:
        tokens = line.split()
        weight = 1.0
        if tokens and tokens[0].startswith("w="):
            weight = _float(tokens[0][2:], "edge weight", lineno)
            tokens = tokens[1:]
        if not tokens:
            raise ParseError("hyperedge has no members", lineno)
        edges.append([_int(t, "hyperedge member", lineno) for t in tokens])
        weights.append(weight)
    raw = len(edges)
    edges, weights = dedup_hyperedges(edges, weights, sum_weights=True)
    if len(edges) != raw:
        log.info("merged %d duplicate hyperedges", raw - len(edges))
    hg = Hypergraph.create(
        x, edges, labels=labels, edge_weights=weights, num_classes=num_classes,
        name=header.get("name", ""),
    )
    return check(hg)


def parse_simple_graph(text: str) -> Hypergraph:
    header, x, labels, num_classes, edge_lines = _parse_common(text, edge_section="edges")
    n = x.shape[0]
    pairs = []
    for lineno, line in edge_lines:
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"edge line needs exactly two node ids, got {len(tokens)}", lineno)
        u, v = (_int(t, "edge endpoint", lineno) for t in tokens)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge ({u}, {v}) references a node outside [0, {n})", lineno)
        pairs.append((u, v))
    hg = from_simple_graph(pairs, x, labels, num_classes=num_classes, name=header.get("name", ""))
    log.info("%s: %d simple edges -> %d hyperedges", hg.name or "graph", len(pairs), hg.num_edges)
    return check(hg)


def load_dataset(path) -> Hypergraph:
    return parse_hypergraph(Path(path).read_text(encoding="utf-8"))


def load_simple_graph(path) -> Hypergraph:
    return parse_simple_graph(Path(path).read_text(encoding="utf-8"))


def load_any(path) -> Hypergraph:
    """Dispatch on whether the file carries [hyperedges] or [edges]."""
    text = Path(path).read_text(encoding="utf-8")
    sections = _sections(text)
    if "edges" in sections and "hyperedges" not in sections:
        return parse_simple_graph(text)
    return parse_hypergraph(text)


def format_hypergraph(hg: Hypergraph, encoding: str = "dense", simple_edges=None) -> str:
    """Serialize ``hg``; pass ``simple_edges`` to write an ``[edges]`` file instead."""
    if encoding not in ("dense", "sparse"):
        raise ValueError(f"unknown feature encoding {encoding!r}")
    out = [
        "[header]",
        f"num_nodes = {hg.num_nodes}",
        f"num_classes = {hg.num_classes}",
        f"feature_dim = {hg.feature_dim}",
        f"feature_encoding = {encoding}",
    ]
    if hg.name:
        out.append(f"name = {hg.name}")
    out.append("[features]")
    for row in hg.features:
        if encoding == "dense":
            out.append(" ".join(repr(float(v)) for v in row))
        else:
            nz = np.flatnonzero(row)
            out.append(" ".join(f"{j}:{float(row[j])!r}" for j in nz) if nz.size else "-")
    if hg.labels is not None:
        out.append("[labels]")
        out.extend(str(int(y)) for y in hg.labels)
    if simple_edges is not None:
        out.append("[edges]")
        out.extend(f"{int(u)} {int(v)}" for u, v in simple_edges)
    else:
        out.append("[hyperedges]")
        for members, w in zip(hg.hyperedges, hg.edge_weights):
            prefix = "" if w == 1.0 else f"w={float(w)!r} "
            out.append(prefix + " ".join(str(v) for v in members))
    return "\n".join(out) + "\n"


def write_dataset(hg: Hypergraph, path, encoding: str = "dense", simple_edges=None) -> None:
    Path(path).write_text(format_hypergraph(hg, encoding, simple_edges), encoding="utf-8")


__all__ = [
    "ParseError",
    "ValidationError",
    "format_hypergraph",
    "load_any",
    "load_dataset",
    "load_simple_graph",
    "parse_hypergraph",
    "parse_simple_graph",
    "write_dataset",
]
