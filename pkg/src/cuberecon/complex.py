"""Finite cube complexes of dimension at most three.

A cell of dimension ``d`` is stored as its *chart*: a tuple of ``2**d``
vertex ids where the corner with binary coordinates ``(b_0, ..., b_{d-1})``
sits at index ``sum(b_i << (d - 1 - i))``.  Two charts related by a signed
permutation of the coordinates describe the same cell; every cell is kept in
the lexicographically smallest chart of its orbit so that complexes compare
equal cell-by-cell.

Vertices are dense integer ids ``0..V-1``, each carrying a string label.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadCoords,
    ChartMismatch,
    Disconnected,
    FormatError,
    InconsistentMatrix,
    RegularityViolation,
)

MAX_DIM = 3


def _symmetry_tables():
    tables = {}
    for d in range(MAX_DIM + 1):
        perms = []
        for perm in itertools.permutations(range(d)):
            for flips in itertools.product((0, 1), repeat=d):
                idx = []
                for k in range(2 ** d):
                    new_bits = [(k >> (d - 1 - j)) & 1 for j in range(d)]
                    old_bits = [0] * d
                    for j in range(d):
                        old_bits[perm[j]] = new_bits[j] ^ flips[j]
                    idx.append(sum(b << (d - 1 - i) for i, b in enumerate(old_bits)))
                sign = _perm_sign(perm) * (-1) ** sum(flips)
                perms.append((tuple(idx), sign))
        tables[d] = tuple(sorted(set(perms)))
    return tables


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


_SIGNED = _symmetry_tables()
_SYMMETRIES = {d: tuple(idx for idx, _ in t) for d, t in _SIGNED.items()}


def cell_dim(chart: Sequence[int]) -> int:
    n = len(chart)
    d = n.bit_length() - 1
    if n != 1 << d or d > MAX_DIM:
        raise FormatError(f"chart of length {n} is not a cube chart")
    return d


def canonical_chart(chart: Sequence[int]) -> tuple:
    """Smallest chart in the hyperoctahedral orbit of ``chart``."""
    d = cell_dim(chart)
    return min(tuple(chart[i] for i in idx) for idx in _SYMMETRIES[d])


def charts_equivalent(a: Sequence[int], b: Sequence[int]) -> bool:
    return len(a) == len(b) and canonical_chart(a) == canonical_chart(b)


def orientation_sign(chart: Sequence[int], reference: Sequence[int]) -> int:
    """+1 or -1: whether ``chart`` and ``reference`` orient the same cell alike."""
    d = cell_dim(chart)
    target = tuple(chart)
    for idx, sign in _SIGNED[d]:
        if tuple(reference[i] for i in idx) == target:
            return sign
    raise ChartMismatch(f"{chart} and {reference} are not charts of one cell")


def chart_faces(chart: Sequence[int]) -> list:
    """Codimension-one face charts, two per coordinate."""
    d = cell_dim(chart)
    out = []
    for i in range(d):
        for b in (0, 1):
            sub = [chart[k] for k in range(len(chart)) if (k >> (d - 1 - i)) & 1 == b]
            out.append(tuple(sub))
    return out


def all_face_sets(chart: Sequence[int]) -> set:
    """Corner sets of every face of ``chart`` (the cell itself included)."""
    seen = {frozenset(chart)}
    stack = [tuple(chart)]
    while stack:
        c = stack.pop()
        if len(c) == 1:
            continue
        for f in chart_faces(c):
            fs = frozenset(f)
            if fs not in seen:
                seen.add(fs)
                stack.append(f)
    return seen


def chart_neighbors(chart: Sequence[int], v: int) -> list:
    """Corners of ``chart`` adjacent to corner ``v`` along a cell edge."""
    d = cell_dim(chart)
    pos = chart.index(v)
    return [chart[pos ^ (1 << j)] for j in range(d)]


class CubeComplex:
    """Immutable cell catalog.

    Use :func:`build` to construct from raw charts with closure and
    validation; the constructor itself trusts its input.
    """

    def __init__(self, labels, cells, coords=None):
        self.labels = tuple(labels)
        self.cells = tuple(tuple(sorted(cs)) for cs in cells)
        self.coords = None if coords is None else tuple(tuple(int(t) for t in c) for c in coords)

    # -- basic views -----------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def edges(self):
        return self.cells[1]

    @property
    def squares(self):
        return self.cells[2]

    @property
    def cubes(self):
        return self.cells[3]

    @property
    def dimension(self) -> int:
        for d in range(MAX_DIM, 0, -1):
            if self.cells[d]:
                return d
        return 0

    def counts(self) -> tuple:
        return tuple(len(c) for c in self.cells)

    def __repr__(self):
        return "CubeComplex(V=%d, E=%d, F=%d, C=%d)" % self.counts()

    def __eq__(self, other):
        return (
            isinstance(other, CubeComplex)
            and self.labels == other.labels
            and self.cells == other.cells
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.labels, self.cells))

    @cached_property
    def label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def vertex(self, label: str) -> int:
        return self.label_index[label]

    @cached_property
    def cell_index(self):
        return [{frozenset(c): i for i, c in enumerate(cs)} for cs in self.cells]

    def find_cell(self, corners: Iterable[int]):
        """Index of the cell with this corner set, or ``None``."""
        fs = frozenset(corners)
        d = len(fs).bit_length() - 1
        if len(fs) != 1 << d or d > MAX_DIM:
            return None
        return self.cell_index[d].get(fs)

    @cached_property
    def vertex_cells(self):
        """``vertex_cells[v][d]`` lists indices of d-cells containing ``v``."""
        out = [[[] for _ in range(MAX_DIM + 1)] for _ in range(self.n_vertices)]
        for d, cs in enumerate(self.cells):
            for i, c in enumerate(cs):
                for v in c:
                    out[v][d].append(i)
        return out

    @cached_property
    def adjacency(self):
        adj = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def cofaces(self):
        """``cofaces[d][i]`` lists (d+1)-cells having cell (d, i) as a facet."""
        out = [[[] for _ in cs] for cs in self.cells]
        for d in range(1, MAX_DIM + 1):
            for j, c in enumerate(self.cells[d]):
                for f in chart_faces(c):
                    out[d - 1][self.cell_index[d - 1][frozenset(f)]].append(j)
        return out

    def facets(self, d: int, i: int) -> list:
        """Indices of the (d-1)-cells on the boundary of cell (d, i)."""
        return [self.cell_index[d - 1][frozenset(f)] for f in chart_faces(self.cells[d][i])]

    # -- derived complexes ------------------------------------------------
    def subcomplex(self, keep: Iterable[int]) -> "CubeComplex":
        """Full subcomplex on the vertex set ``keep``; ids are renumbered in order."""
        keep = sorted(set(keep))
        new_id = {v: i for i, v in enumerate(keep)}
        cells = []
        for cs in self.cells:
            cells.append([canonical_chart([new_id[v] for v in c]) for c in cs if all(v in new_id for v in c)])
        coords = None if self.coords is None else [self.coords[v] for v in keep]
        return CubeComplex([self.labels[v] for v in keep], cells, coords)

    def remove_vertices(self, drop: Iterable[int]) -> "CubeComplex":
        drop = set(drop)
        return self.subcomplex(v for v in range(self.n_vertices) if v not in drop)

    def relabel(self, mapping: dict) -> "CubeComplex":
        """Replace labels of the vertex ids in ``mapping``."""
        labels = [mapping.get(i, lab) for i, lab in enumerate(self.labels)]
        if len(set(labels)) != len(labels):
            raise FormatError("relabelling produces duplicate labels")
        return CubeComplex(labels, self.cells, self.coords)

    def canonical(self) -> "CubeComplex":
        """Same complex with vertex ids assigned in sorted label order."""
        order = sorted(range(self.n_vertices), key=lambda v: self.labels[v])
        new_id = {v: i for i, v in enumerate(order)}
        cells = [[canonical_chart([new_id[v] for v in c]) for c in cs] for cs in self.cells]
        coords = None if self.coords is None else [self.coords[v] for v in order]
        return CubeComplex([self.labels[v] for v in order], cells, coords)

    def cell_labels(self, d: int, i: int) -> tuple:
        return tuple(self.labels[v] for v in self.cells[d][i])

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        verts = []
        for i, lab in enumerate(self.labels):
            entry = {"id": i, "label": lab}
            if self.coords is not None:
                entry["coords"] = list(self.coords[i])
            verts.append(entry)
        return {
            "dimension": self.dimension,
            "vertices": verts,
            "edges": [list(e) for e in self.edges],
            "squares": [[s[0], s[1], s[3], s[2]] for s in self.squares],
            "cubes": [list(c) for c in self.cubes],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict, validate: bool = True) -> "CubeComplex":
        try:
            verts = sorted(data["vertices"], key=lambda e: e["id"])
            ids = [e["id"] for e in verts]
            if ids != list(range(len(ids))):
                raise FormatError("vertex ids must be dense 0..V-1")
            labels = [str(e.get("label", e["id"])) for e in verts]
            has_coords = [("coords" in e) for e in verts]
            coords = None
            if verts and all(has_coords):
                coords = [tuple(e["coords"]) for e in verts]
            elif any(has_coords):
                raise FormatError("coords must be given for all vertices or none")
            charts = [(i,) for i in ids]
            for k, e in enumerate(data.get("edges", [])):
                if len(e) != 2:
                    raise FormatError(f"edges[{k}]: expected 2 ids")
                charts.append(tuple(e))
            for k, s in enumerate(data.get("squares", [])):
                if len(s) != 4:
                    raise FormatError(f"squares[{k}]: expected 4 ids")
                charts.append((s[0], s[1], s[3], s[2]))
            for k, c in enumerate(data.get("cubes", [])):
                if len(c) != 8:
                    raise FormatError(f"cubes[{k}]: expected 8 ids")
                charts.append(tuple(c))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed complex document: {exc!r}") from exc
        if validate:
            return build(charts, labels=labels, coords=coords)
        return _assemble(charts, labels, coords)

    @classmethod
    def from_json(cls, text: str, validate: bool = True) -> "CubeComplex":
        return cls.from_dict(json.loads(text), validate=validate)


def _assemble(charts, labels, coords):
    """Close ``charts`` under faces; returns a complex without regularity checks."""
    by_dim = [dict() for _ in range(MAX_DIM + 1)]
    stack = [tuple(c) for c in charts]
    while stack:
        c = stack.pop()
        d = cell_dim(c)
        if len(set(c)) != len(c):
            raise RegularityViolation(f"cell {c} has repeated corners")
        key = frozenset(c)
        canon = canonical_chart(c)
        old = by_dim[d].get(key)
        if old is not None:
            if old != canon:
                raise ChartMismatch(f"cells {old} and {c} share corners but not structure")
            continue
        by_dim[d][key] = canon
        if d > 0:
            stack.extend(chart_faces(c))
    n = len(labels) if labels is not None else 0
    for cs in by_dim[0]:
        n = max(n, max(cs) + 1)
    if labels is None:
        labels = [str(i) for i in range(n)]
    if len(labels) < n:
        raise FormatError("fewer labels than vertices")
    n = len(labels)
    for v in range(n):
        by_dim[0].setdefault(frozenset((v,)), (v,))
    if len(set(labels)) != len(labels):
        raise FormatError("vertex labels must be pairwise distinct")
    if coords is not None and len(coords) != n:
        raise BadCoords("coords must cover every vertex")
    return CubeComplex(labels, [list(m.values()) for m in by_dim], coords)


def _check_regular(X: CubeComplex) -> None:
    flat = [(d, i, c) for d in range(1, MAX_DIM + 1) for i, c in enumerate(X.cells[d])]
    key_of = {}
    by_vertex = [[] for _ in range(X.n_vertices)]
    for n, (d, i, c) in enumerate(flat):
        key_of[n] = frozenset(c)
        for v in c:
            by_vertex[v].append(n)
    face_cache = {}
    for n, (_, _, c) in enumerate(flat):
        shared = Counter()
        for v in c:
            for m in by_vertex[v]:
                if m > n:
                    shared[m] += 1
        for m, k in shared.items():
            if k < 2:
                continue
            inter = key_of[n] & key_of[m]
            for a in (n, m):
                if a not in face_cache:
                    face_cache[a] = all_face_sets(flat[a][2])
                if inter not in face_cache[a]:
                    raise RegularityViolation(
                        f"cells {flat[n][2]} and {flat[m][2]} meet in {sorted(inter)}, not a common face"
                    )


def _check_coords(X: CubeComplex) -> None:
    for c in X.cubes:
        pts = [X.coords[v] for v in c]
        base = tuple(min(p[k] for p in pts) for k in range(3))
        want = {tuple(base[k] + ((m >> (2 - k)) & 1) for k in range(3)) for m in range(8)}
        if set(pts) != want:
            raise BadCoords(f"cube {c} is not a unit lattice cube")
        for v in c:
            for w in chart_neighbors(c, v):
                if sum(abs(a - b) for a, b in zip(X.coords[v], X.coords[w])) != 1:
                    raise BadCoords(f"cube {c}: chart edge {v}-{w} is not a unit step")


def build(cells: Iterable[Sequence[int]], labels=None, coords=None) -> CubeComplex:
    """Close ``cells`` under faces and validate.

    Raises RegularityViolation, ChartMismatch or BadCoords.
    """
    X = _assemble(list(cells), None if labels is None else list(labels), coords)
    _check_regular(X)
    if X.coords is not None:
        _check_coords(X)
    return X


# --------------------------------------------------------------------------
# boundary and metric


def combinatorial_boundary(X: CubeComplex, dim: int | None = None) -> set:
    """Cells of the combinatorial boundary as ``(d, index)`` pairs.

    ``dim`` fixes the dimension the boundary is taken relative to; by default
    it is the top dimension of ``X``.  With ``dim`` above the top dimension
    every cell lies in no ``dim``-cell and so the whole complex is boundary,
    which is the geometric boundary of a lower-dimensional piece embedded in
    ``R**dim``.  A complex of top dimension 0 is its own boundary.
    """
    k = X.dimension if dim is None else dim
    if k == 0:
        return {(0, v) for v in range(X.n_vertices)}
    top_count = [Counter() for _ in range(k)]
    if k <= MAX_DIM:
        for chart in X.cells[k]:
            for fs in all_face_sets(chart):
                d = len(fs).bit_length() - 1
                if d < k:
                    top_count[d][X.cell_index[d][fs]] += 1
    out = set()
    for d in range(min(k, MAX_DIM + 1)):
        for i, c in enumerate(X.cells[d]):
            if (d, i) in out:
                continue
            if top_count[d][i] <= 1:
                for fs in all_face_sets(c):
                    fd = len(fs).bit_length() - 1
                    out.add((fd, X.cell_index[fd][fs]))
    return out


def boundary_vertices(X: CubeComplex, dim: int | None = None) -> list:
    return sorted(i for d, i in combinatorial_boundary(X, dim) if d == 0)


def _bfs(adj, src: int) -> list:
    dist = [-1] * len(adj)
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def graph_distances(X: CubeComplex, src: int) -> list:
    """Breadth-first distances from ``src`` in the 1-skeleton (-1 if unreachable)."""
    return _bfs(X.adjacency, src)


def is_connected(X: CubeComplex) -> bool:
    if X.n_vertices == 0:
        return True
    return min(_bfs(X.adjacency, 0)) >= 0


def boundary_distance_matrix(X: CubeComplex, dim: int | None = None) -> "DistanceMatrix":
    """Graph distances between combinatorial boundary vertices."""
    if not is_connected(X):
        raise Disconnected("complex 1-skeleton is disconnected")
    bv = boundary_vertices(X, dim)
    d = np.zeros((len(bv), len(bv)), dtype=np.int64)
    for r, v in enumerate(bv):
        dist = _bfs(X.adjacency, v)
        d[r] = [dist[w] for w in bv]
    return DistanceMatrix([X.labels[v] for v in bv], d)


# --------------------------------------------------------------------------
# distance matrices


class DistanceMatrix:
    """Labelled symmetric integer matrix of boundary distances."""

    def __init__(self, labels, d):
        self.labels = tuple(str(x) for x in labels)
        self.d = np.asarray(d, dtype=np.int64).reshape(len(self.labels), len(self.labels))
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise FormatError("distance matrix labels must be distinct")

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"DistanceMatrix(n={len(self)})"

    def __eq__(self, other):
        return (
            isinstance(other, DistanceMatrix)
            and self.labels == other.labels
            and np.array_equal(self.d, other.d)
        )

    def same_as(self, other: "DistanceMatrix") -> bool:
        """Equality up to the order of labels."""
        if set(self.labels) != set(other.labels):
            return False
        return np.array_equal(self.d, other.reorder(self.labels).d)

    def dist(self, a: str, b: str) -> int:
        return int(self.d[self.index[a], self.index[b]])

    def row(self, a: str) -> np.ndarray:
        return self.d[self.index[a]]

    def reorder(self, labels: Sequence[str]) -> "DistanceMatrix":
        idx = [self.index[x] for x in labels]
        return DistanceMatrix(labels, self.d[np.ix_(idx, idx)])

    restrict = reorder

    def drop(self, labels: Iterable[str]) -> "DistanceMatrix":
        gone = set(labels)
        return self.reorder([x for x in self.labels if x not in gone])

    def sorted(self) -> "DistanceMatrix":
        return self.reorder(sorted(self.labels))

    def validate(self) -> None:
        """Raise InconsistentMatrix unless this is a finite graph metric."""
        d = self.d
        n = len(self.labels)
        if n == 0:
            return
        if np.any(np.diag(d) != 0):
            raise InconsistentMatrix("nonzero diagonal")
        if not np.array_equal(d, d.T):
            raise InconsistentMatrix("matrix is not symmetric")
        off = d[~np.eye(n, dtype=bool)]
        if off.size and off.min() < 1:
            raise InconsistentMatrix("off-diagonal entry below 1")
        for k in range(n):
            if np.any(d > d[:, k : k + 1] + d[k : k + 1, :]):
                raise InconsistentMatrix(f"triangle inequality fails through {self.labels[k]!r}")

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.labels)
        for r in self.d:
            w.writerow([int(x) for x in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        import csv
        import io

        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        if not rows:
            raise FormatError("empty matrix file")
        labels = rows[0]
        body = rows[1:]
        if len(body) != len(labels):
            raise FormatError(f"expected {len(labels)} matrix rows, found {len(body)}")
        vals = []
        for ln, r in enumerate(body, start=2):
            if len(r) != len(labels):
                raise FormatError(f"line {ln}: expected {len(labels)} fields, found {len(r)}")
            try:
                vals.append([int(x) for x in r])
            except ValueError as exc:
                raise FormatError(f"line {ln}: {exc}") from exc
        return cls(labels, vals)


# --------------------------------------------------------------------------
# links


@dataclass(frozen=True)
class LinkComplex:
    """Simplicial link at ``base``: link vertices are the neighbours of ``base``."""

    base: int
    vertices: tuple
    edges: frozenset
    triangles: frozenset

    @property
    def degree(self) -> int:
        return len(self.vertices)

    def graph(self) -> dict:
        g = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            g[a].add(b)
            g[b].add(a)
        return g


def link(X: CubeComplex, v: int) -> LinkComplex:
    edges = set()
    tris = set()
    for i in X.vertex_cells[v][2]:
        edges.add(frozenset(chart_neighbors(X.squares[i], v)))
    for i in X.vertex_cells[v][3]:
        tris.add(frozenset(chart_neighbors(X.cubes[i], v)))
    return LinkComplex(v, X.adjacency[v], frozenset(edges), frozenset(tris))
