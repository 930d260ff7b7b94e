"""Combinatorial-type isomorphism anchored on boundary labels."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .complex import MAX_DIM, CubeComplex, boundary_vertices


@dataclass(frozen=True)
class IsoMapping:
    """Vertex bijection ``forward[x] = y`` inducing a cell bijection."""

    forward: dict

    def label_map(self, X: CubeComplex, Y: CubeComplex) -> dict:
        return {X.labels[x]: Y.labels[y] for x, y in self.forward.items()}


def _invariant(X: CubeComplex, v: int, bset) -> tuple:
    vc = X.vertex_cells[v]
    return (v in bset, len(vc[1]), len(vc[2]), len(vc[3]))


def isomorphic_labeled(X: CubeComplex, Y: CubeComplex, dim: int | None = None):
    """Find an isomorphism X -> Y fixing every boundary label the two share.

    Returns an :class:`IsoMapping`, or ``None`` when the complexes have
    different combinatorial types under that constraint.  The boundary is
    taken relative to ``dim`` (default: the larger top dimension).
    """
    if X.counts() != Y.counts():
        return None
    k = max(X.dimension, Y.dimension) if dim is None else dim
    bx = set(boundary_vertices(X, k))
    by = set(boundary_vertices(Y, k))
    if len(bx) != len(by):
        return None
    inv_x = [_invariant(X, v, bx) for v in range(X.n_vertices)]
    inv_y = [_invariant(Y, v, by) for v in range(Y.n_vertices)]
    if sorted(inv_x) != sorted(inv_y):
        return None

    fwd: dict = {}
    used: set = set()
    for v in sorted(bx):
        lab = X.labels[v]
        w = Y.label_index.get(lab)
        if w is None or w not in by:
            continue
        if inv_x[v] != inv_y[w]:
            return None
        fwd[v] = w
        used.add(w)
    if not _consistent_all(X, Y, fwd):
        return None

    order = _search_order(X, fwd)
    adj_y = [set(a) for a in Y.adjacency]
    adj_x = [set(a) for a in X.adjacency]

    def candidates(x):
        anchored = [n for n in X.adjacency[x] if n in fwd]
        if anchored:
            pool = adj_y[fwd[anchored[0]]]
        else:
            pool = range(Y.n_vertices)
        out = []
        for y in sorted(pool):
            if y in used or inv_y[y] != inv_x[x]:
                continue
            ok = True
            for n in anchored:
                if fwd[n] not in adj_y[y]:
                    ok = False
                    break
            if ok:
                out.append(y)
        return out

    def accept(x, y):
        # adjacency both ways against every assigned vertex
        for n, m in fwd.items():
            if (n in adj_x[x]) != (m in adj_y[y]):
                return False
        fwd[x] = y
        for d in range(2, MAX_DIM + 1):
            for i in X.vertex_cells[x][d]:
                c = X.cells[d][i]
                if all(v in fwd for v in c) and Y.find_cell(fwd[v] for v in c) is None:
                    del fwd[x]
                    return False
        del fwd[x]
        return True

    stack = []
    pos = 0
    if order:
        stack.append(iter(candidates(order[0])))
    while stack:
        x = order[pos]
        if x in fwd:
            used.discard(fwd.pop(x))
        advanced = False
        for y in stack[-1]:
            if accept(x, y):
                fwd[x] = y
                used.add(y)
                advanced = True
                break
        if not advanced:
            stack.pop()
            pos -= 1
            continue
        pos += 1
        if pos == len(order):
            return IsoMapping(dict(fwd))
        stack.append(iter(candidates(order[pos])))
    if not order and len(fwd) == X.n_vertices:
        return IsoMapping(dict(fwd))
    return None


def _consistent_all(X, Y, fwd) -> bool:
    for d in range(1, MAX_DIM + 1):
        for c in X.cells[d]:
            if all(v in fwd for v in c) and Y.find_cell(fwd[v] for v in c) is None:
                return False
    adj_y = [set(a) for a in Y.adjacency]
    items = list(fwd.items())
    for i, (a, fa) in enumerate(items):
        na = set(X.adjacency[a])
        for b, fb in items[i + 1 :]:
            if (b in na) != (fb in adj_y[fa]):
                return False
    return True


def _search_order(X: CubeComplex, fixed: dict) -> list:
    seen = set(fixed)
    order = []
    q = deque(sorted(fixed))
    remaining = [v for v in range(X.n_vertices) if v not in seen]
    ri = 0
    while len(seen) < X.n_vertices:
        if not q:
            while remaining[ri] in seen:
                ri += 1
            s = remaining[ri]
            seen.add(s)
            order.append(s)
            q.append(s)
        u = q.popleft()
        for w in X.adjacency[u]:
            if w not in seen:
                seen.add(w)
                order.append(w)
                q.append(w)
    return order
