"""Text formats: edge lists, score files, GMT gene sets and TSV outputs."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from graphtest import __version__
from graphtest.errors import DataError
from graphtest.graph import Graph, build_graph


@dataclass(frozen=True)
class GeneSet:
    name: str
    description: str
    members: tuple[str, ...]

    def __post_init__(self):
        if not self.name:
            raise DataError("gene set needs a name")
        if len(set(self.members)) != len(self.members):
            raise DataError(f"gene set {self.name!r} lists a member twice")


def _content_lines(path) -> Iterator[tuple[int, list[str]]]:
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def parse_edge_list(path) -> Graph:
    """Read ``u v`` lines; an ``n <count>`` header fixes the node count,
    otherwise it is ``max id + 1``."""
    n = None
    edges = []
    for lineno, tok in _content_lines(path):
        if tok[0] == "n":
            if len(tok) != 2 or n is not None:
                raise DataError(f"{path}:{lineno}: bad node-count header")
            n = _int(tok[1], path, lineno)
            continue
        if len(tok) != 2:
            raise DataError(f"{path}:{lineno}: expected 'u v', got {len(tok)} fields")
        edges.append((_int(tok[0], path, lineno), _int(tok[1], path, lineno)))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    try:
        return build_graph(n, edges)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _int(tok, path, lineno):
    try:
        return int(tok)
    except ValueError:
        raise DataError(f"{path}:{lineno}: not an integer: {tok!r}") from None


def _float(tok, path, lineno):
    try:
        val = float(tok)
    except ValueError:
        raise DataError(f"{path}:{lineno}: not a number: {tok!r}") from None
    if not math.isfinite(val):
        raise DataError(f"{path}:{lineno}: non-finite value {tok!r}")
    return val


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_scores(path, n: int | None = None) -> np.ndarray:
    """Scores as one value per line, or ``node_id value`` pairs (0-based ids)."""
    rows = list(_content_lines(path))
    if not rows:
        raise DataError(f"{path}: no scores")
    widths = {len(tok) for _, tok in rows}
    if widths == {1}:
        x = np.array([_float(tok[0], path, ln) for ln, tok in rows])
    elif widths == {2}:
        pairs = {}
        for ln, tok in rows:
            node = _int(tok[0], path, ln)
            if node < 0 or node in pairs:
                raise DataError(f"{path}:{ln}: bad or repeated node id {node}")
            pairs[node] = _float(tok[1], path, ln)
        size = max(pairs) + 1 if n is None else n
        missing = set(range(size)) - set(pairs)
        if missing or max(pairs) >= size:
            raise DataError(f"{path}: scores do not cover nodes 0..{size - 1} exactly")
        x = np.array([pairs[v] for v in range(size)])
    else:
        raise DataError(f"{path}: mix of 1- and 2-column lines")
    if n is not None and x.size != n:
        raise DataError(f"{path}: {x.size} scores for a graph with {n} nodes")
    return x


def parse_score_table(path) -> dict[str, float]:
    """Named scores: ``gene_id value`` per line."""
    table = {}
    for ln, tok in _content_lines(path):
        if len(tok) != 2:
            raise DataError(f"{path}:{ln}: expected 'id value'")
        if tok[0] in table:
            raise DataError(f"{path}:{ln}: duplicate id {tok[0]!r}")
        table[tok[0]] = _float(tok[1], path, ln)
    return table


def parse_gene_sets(path) -> list[GeneSet]:
    """GMT: ``name<TAB>description<TAB>member...`` one set per line."""
    sets = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 3:
                raise DataError(f"{path}:{ln}: GMT line needs name, description and members")
            members = tuple(m for m in (f.strip() for f in fields[2:]) if m)
            try:
                sets.append(GeneSet(fields[0].strip(), fields[1].strip(), members))
            except DataError as exc:
                raise DataError(f"{path}:{ln}: {exc}") from None
    return sets


def restrict_gene_set(gs: GeneSet, scores: dict[str, float]) -> tuple[GeneSet, list[str]]:
    """Drop members without a score; returns the reduced set and the dropped ids."""
    kept = tuple(m for m in gs.members if m in scores)
    dropped = [m for m in gs.members if m not in scores]
    return GeneSet(gs.name, gs.description, kept), dropped


def parse_set_edges(path) -> dict[str, list[tuple[str, str]]]:
    """Pathway edges as ``set gene_a gene_b`` lines."""
    out: dict[str, list[tuple[str, str]]] = {}
    for ln, tok in _content_lines(path):
        if len(tok) != 3:
            raise DataError(f"{path}:{ln}: expected 'set gene_a gene_b'")
        out.setdefault(tok[0], []).append((tok[1], tok[2]))
    return out


def parse_pvalue_table(path) -> list[tuple[str, float]]:
    """``id p_value`` rows; a header row starting with ``id`` is skipped."""
    rows = []
    for ln, tok in _content_lines(path):
        if len(tok) < 2:
            raise DataError(f"{path}:{ln}: expected 'id p_value'")
        if ln == 1 and tok[0] == "id":
            continue
        p = _float(tok[1], path, ln)
        if not 0.0 <= p <= 1.0:
            raise DataError(f"{path}:{ln}: p-value {p} outside [0, 1]")
        rows.append((tok[0], p))
    return rows


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def format_value(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "NA"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(float(v))
    return str(v)


def format_tsv(columns: Sequence[str], rows: Iterable[Sequence], meta: dict) -> str:
    """TSV with one ``#``-prefixed JSON metadata line before the column header."""
    meta = dict(meta)
    meta.setdefault("version", __version__)
    meta.setdefault("config_hash", config_hash({k: v for k, v in meta.items() if k != "version"}))
    out = ["# " + json.dumps(meta, sort_keys=True, default=str), "\t".join(columns)]
    out += ["\t".join(format_value(v) for v in row) for row in rows]
    return "\n".join(out) + "\n"


def read_tsv(path) -> tuple[dict, list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        meta = json.loads(lines[0][1:])
        lines = lines[1:]
    header = lines[0].split("\t")
    return meta, header, [ln.split("\t") for ln in lines[1:] if ln]
