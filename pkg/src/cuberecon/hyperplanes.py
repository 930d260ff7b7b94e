"""Hyperplanes as classes of parallel edges, with carriers and sides."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .complex import CubeComplex, DistanceMatrix
from .errors import InconsistentMatrix, NotTwoSided

WITH_X, WITH_Y = "with-x", "with-y"


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class Hyperplane:
    """An equivalence class of edges, given as sorted edge indices."""

    edges: tuple

    def midcubes(self, X: CubeComplex) -> list:
        """``(dim, cell index, axis)`` for every cell crossed by this class."""
        mine = set(self.edges)
        out = []
        for d in range(1, 4):
            for i, c in enumerate(X.cells[d]):
                for axis in range(d):
                    bit = 1 << (d - 1 - axis)
                    e = X.find_cell((c[0], c[bit]))
                    if e in mine:
                        out.append((d, i, axis))
        return out


@dataclass(frozen=True)
class SideSplit:
    A: frozenset
    B: frozenset

    def side(self, v: int) -> str:
        return "A" if v in self.A else "B"


def hyperplanes(X: CubeComplex) -> list:
    """Partition the edges by the relation of being opposite in a square."""
    uf = _UnionFind(len(X.edges))
    for s in X.squares:
        # chart corners 0,1,2,3 = 00,01,10,11
        uf.union(X.find_cell((s[0], s[1])), X.find_cell((s[2], s[3])))
        uf.union(X.find_cell((s[0], s[2])), X.find_cell((s[1], s[3])))
    groups: dict = {}
    for e in range(len(X.edges)):
        groups.setdefault(uf.find(e), []).append(e)
    return [Hyperplane(tuple(g)) for _, g in sorted(groups.items())]


def hyperplane_of_edge(X: CubeComplex, e: int, classes=None) -> Hyperplane:
    for H in classes if classes is not None else hyperplanes(X):
        if e in H.edges:
            return H
    raise KeyError(e)


def split_sides(X: CubeComplex, H: Hyperplane) -> SideSplit:
    """Components of the 1-skeleton with the edges of ``H`` deleted.

    ``A`` is the component of the first corner of the first edge of ``H``.
    """
    cut = {frozenset(X.edges[e]) for e in H.edges}
    n = X.n_vertices
    comp = [-1] * n
    ncomp = 0
    starts = [X.edges[H.edges[0]][0]] + list(range(n))
    for s in starts:
        if comp[s] >= 0:
            continue
        comp[s] = ncomp
        q = deque([s])
        while q:
            u = q.popleft()
            for w in X.adjacency[u]:
                if comp[w] < 0 and frozenset((u, w)) not in cut:
                    comp[w] = ncomp
                    q.append(w)
        ncomp += 1
    if ncomp != 2:
        raise NotTwoSided(f"deleting the class leaves {ncomp} component(s)")
    A = frozenset(v for v in range(n) if comp[v] == 0)
    B = frozenset(v for v in range(n) if comp[v] == 1)
    return SideSplit(A, B)


def carrier(X: CubeComplex, H: Hyperplane) -> set:
    """Cells containing an edge of ``H``, closed downward, as ``(dim, index)``."""
    from .complex import all_face_sets

    mine = {frozenset(X.edges[e]) for e in H.edges}
    out = set()
    for d in range(1, 4):
        for i, c in enumerate(X.cells[d]):
            if (d, i) in out:
                continue
            faces = all_face_sets(c)
            if faces & mine:
                for fs in faces:
                    fd = len(fs).bit_length() - 1
                    out.add((fd, X.cell_index[fd][fs]))
    return out


def carrier_vertices(X: CubeComplex, H: Hyperplane) -> set:
    return {i for d, i in carrier(X, H) if d == 0}


def side_of(D: DistanceMatrix, x: str, y: str, p: str) -> str:
    """Which side of the hyperplane dual to the edge ``xy`` the vertex ``p`` is on.

    Uses only the distance matrix: ``p`` is with ``x`` exactly when
    ``d(p, y) = d(p, x) + 1``.
    """
    if D.dist(x, y) != 1:
        raise InconsistentMatrix(f"{x!r} and {y!r} are not at distance 1")
    dx, dy = D.dist(p, x), D.dist(p, y)
    if dy == dx + 1:
        return WITH_X
    if dx == dy + 1:
        return WITH_Y
    raise InconsistentMatrix(f"{p!r} is at distances {dx}, {dy} from the edge {x!r}-{y!r}")


def geodesics(X: CubeComplex, u: int, v: int, cap: int = 10_000):
    """Enumerate shortest paths from ``u`` to ``v`` (at most ``cap`` of them)."""
    from .complex import graph_distances

    du = graph_distances(X, u)
    dv = graph_distances(X, v)
    total = du[v]
    if total < 0:
        return
    count = 0
    stack = [(u, [u])]
    while stack:
        w, path = stack.pop()
        if w == v:
            yield path
            count += 1
            if count >= cap:
                return
            continue
        for n in X.adjacency[w]:
            if du[n] == du[w] + 1 and du[n] + dv[n] == total:
                stack.append((n, path + [n]))


def carrier_is_convex(X: CubeComplex, H: Hyperplane, cap: int = 10_000) -> bool:
    """Every geodesic between carrier vertices stays in the carrier."""
    cv = carrier_vertices(X, H)
    verts = sorted(cv)
    for i, a in enumerate(verts):
        for b in verts[i + 1 :]:
            for path in geodesics(X, a, b, cap):
                if not cv.issuperset(path):
                    return False
    return True
