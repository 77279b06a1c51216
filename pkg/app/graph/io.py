"""Text formats for graphs, labellings, batch traces and matrices.

Graph file: first line `n m`, then one `u v` line per edge.
Labelling file: `u v label` per edge (`inf` allowed for weights).
Batch trace: blocks of `u v new_label` lines separated by `---`.
Matrix batch trace: same blocks with `S i j v` / `T i j v` lines.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from app.core.errors import BadNodeId, GraphInputError
from app.graph.comm_graph import CommGraph, build_graph
from app.graph.labelling import BatchUpdate, Labelling
from app.graph.types import EdgeId, Label, LabelKind, NodeId, format_label, parse_label

PathLike = Union[str, Path]
BLOCK_SEPARATOR = "---"


@dataclass
class IdMap:
    """Dense ids 0..n-1 <-> external ids from the input file."""
    external: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._index = {x: i for i, x in enumerate(self.external)}

    @property
    def to_dense(self) -> Dict[int, NodeId]:
        return self._index

    def dense(self, x: int) -> NodeId:
        try:
            return self.to_dense[x]
        except KeyError:
            raise BadNodeId(f"unknown node id {x}") from None

    def ext(self, v: NodeId) -> int:
        return self.external[v]

    @property
    def is_identity(self) -> bool:
        return self.external == list(range(len(self.external)))


def _content_lines(text: str) -> List[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def parse_graph(text: str) -> Tuple[CommGraph, IdMap]:
    lines = _content_lines(text)
    if not lines:
        raise GraphInputError("empty graph file")
    header = lines[0].split()
    if len(header) != 2:
        raise GraphInputError(f"graph header must be `n m`, got {lines[0]!r}")
    n, m = int(header[0]), int(header[1])
    raw_edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise GraphInputError(f"edge line must be `u v`, got {line!r}")
        raw_edges.append((int(parts[0]), int(parts[1])))
    if len(raw_edges) != m:
        raise GraphInputError(f"header promises {m} edges, file has {len(raw_edges)}")

    ids = sorted({x for e in raw_edges for x in e})
    if ids and (ids[0] < 0 or ids[-1] >= n):
        # sparse external ids are remapped onto 0..n-1 in increasing order
        if len(ids) != n:
            raise BadNodeId(f"{len(ids)} distinct sparse ids but n={n}")
        id_map = IdMap(ids)
    else:
        id_map = IdMap(list(range(n)))
    dense = id_map.to_dense
    graph = build_graph(n, [(dense[a], dense[b]) for a, b in raw_edges])
    return graph, id_map


def read_graph(path: PathLike) -> Tuple[CommGraph, IdMap]:
    return parse_graph(Path(path).read_text())


def format_graph(graph: CommGraph, id_map: Optional[IdMap] = None) -> str:
    ext = id_map.ext if id_map else (lambda v: v)
    lines = [f"{graph.n} {graph.m}"]
    lines += [f"{ext(e.u)} {ext(e.v)}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def write_graph(path: PathLike, graph: CommGraph, id_map: Optional[IdMap] = None) -> None:
    Path(path).write_text(format_graph(graph, id_map))


def _parse_triple(line: str, id_map: Optional[IdMap]) -> Tuple[NodeId, NodeId, Label]:
    parts = line.split()
    if len(parts) != 3:
        raise GraphInputError(f"expected `u v label`, got {line!r}")
    a, b = int(parts[0]), int(parts[1])
    if id_map is not None:
        a, b = id_map.dense(a), id_map.dense(b)
    return a, b, parse_label(parts[2])


def parse_labelling(text: str, graph: CommGraph, kind: LabelKind, id_map: Optional[IdMap] = None) -> Labelling:
    labels: Dict[EdgeId, Label] = {}
    for line in _content_lines(text):
        a, b, label = _parse_triple(line, id_map)
        labels[EdgeId.of(a, b)] = label
    return Labelling(graph, kind, labels)


def read_labelling(path: PathLike, graph: CommGraph, kind: LabelKind, id_map: Optional[IdMap] = None) -> Labelling:
    return parse_labelling(Path(path).read_text(), graph, kind, id_map)


def format_labelling(labelling: Labelling, id_map: Optional[IdMap] = None) -> str:
    ext = id_map.ext if id_map else (lambda v: v)
    return "".join(f"{ext(e.u)} {ext(e.v)} {format_label(label)}\n" for e, label in sorted(labelling.items()))


def _blocks(text: str) -> List[List[str]]:
    blocks: List[List[str]] = [[]]
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line == BLOCK_SEPARATOR:
            blocks.append([])
        elif line:
            blocks[-1].append(line)
    if len(blocks) > 1 and not blocks[-1]:
        blocks.pop()
    return blocks


def parse_batches(text: str, id_map: Optional[IdMap] = None) -> List[BatchUpdate]:
    return [BatchUpdate.from_triples(_parse_triple(line, id_map) for line in block) for block in _blocks(text)]


def read_batches(path: PathLike, id_map: Optional[IdMap] = None) -> List[BatchUpdate]:
    return parse_batches(Path(path).read_text(), id_map)


def format_batches(batches: Iterable[BatchUpdate], id_map: Optional[IdMap] = None) -> str:
    ext = id_map.ext if id_map else (lambda v: v)
    blocks = []
    for batch in batches:
        blocks.append("".join(f"{ext(u)} {ext(v)} {format_label(label)}\n" for u, v, label in batch.triples()))
    return f"{BLOCK_SEPARATOR}\n".join(blocks)


def write_batches(path: PathLike, batches: Iterable[BatchUpdate], id_map: Optional[IdMap] = None) -> None:
    Path(path).write_text(format_batches(batches, id_map))


# Matrices

MatrixEntries = Dict[Tuple[int, int], int]


def parse_matrix(text: str, n: int) -> List[List[int]]:
    """Dense rows of n integers, or sparse `i j v` triples (missing entries are 0).

    A leading `sparse` line forces the sparse reading (needed when n == 3).
    """
    lines = _content_lines(text)
    sparse = bool(lines) and lines[0].lower() == "sparse"
    if sparse:
        lines = lines[1:]
    rows = [line.split() for line in lines]
    if not sparse and len(rows) == n and all(len(r) == n for r in rows):
        return [[int(x) for x in r] for r in rows]
    matrix = [[0] * n for _ in range(n)]
    for r in rows:
        if len(r) != 3:
            raise GraphInputError(f"sparse matrix line must be `i j v`, got {' '.join(r)!r}")
        i, j, value = int(r[0]), int(r[1]), int(r[2])
        if not (0 <= i < n and 0 <= j < n):
            raise BadNodeId(f"matrix index ({i}, {j}) outside {n}x{n}")
        matrix[i][j] = value
    return matrix


def format_matrix(matrix: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(str(x) for x in row) + "\n" for row in matrix)


def read_matrix(path: PathLike, n: int) -> List[List[int]]:
    return parse_matrix(Path(path).read_text(), n)


def parse_matrix_batches(text: str) -> List[Tuple[MatrixEntries, MatrixEntries]]:
    batches = []
    for block in _blocks(text):
        s_changes: MatrixEntries = {}
        t_changes: MatrixEntries = {}
        for line in block:
            parts = line.split()
            if len(parts) != 4 or parts[0].upper() not in ("S", "T"):
                raise GraphInputError(f"matrix batch line must be `S|T i j v`, got {line!r}")
            target = s_changes if parts[0].upper() == "S" else t_changes
            key = (int(parts[1]), int(parts[2]))
            if key in target:
                raise GraphInputError(f"entry {parts[0]}{key} changed twice in one batch")
            target[key] = int(parts[3])
        batches.append((s_changes, t_changes))
    return batches


def format_matrix_batches(batches: Iterable[Tuple[MatrixEntries, MatrixEntries]]) -> str:
    blocks = []
    for s_changes, t_changes in batches:
        lines = [f"S {i} {j} {v}\n" for (i, j), v in sorted(s_changes.items())]
        lines += [f"T {i} {j} {v}\n" for (i, j), v in sorted(t_changes.items())]
        blocks.append("".join(lines))
    return f"{BLOCK_SEPARATOR}\n".join(blocks)
