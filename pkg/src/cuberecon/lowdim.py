"""Reconstruction in top dimension at most two.

Trees are rebuilt from leaf distances by inserting one leaf at a time.
Square complexes are peeled: leaves of the boundary graph first, then cut
vertices, then a corner of a face certified by a crossing test on the
hyperplanes of its two boundary edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import CubeComplex, DistanceMatrix, boundary_distance_matrix, build
from .errors import InconsistentMatrix, NoneFound, NotAdditive
from .hyperplanes import WITH_X, side_of
from .reconstruct3d import (
    MAX_STEPS,
    BoundaryGraph,
    FaceCorner,
    Reconstruction,
    Step,
    base_case,
    connected_graph,
    find_cut_vertices,
    reduce_cut_vertex,
    run_reductions,
)


# --------------------------------------------------------------------------
# trees


def reconstruct_tree(D: DistanceMatrix) -> CubeComplex:
    """The tree with unit edges whose leaf distances are ``D``.

    Leaves are inserted in label order.  A new leaf ``x`` hangs off the path
    from the first leaf ``l0`` towards the inserted leaf ``y`` maximising
    the Gromov product ``(x|y)_l0``, at that distance from ``l0``.
    """
    D.validate()
    labels = sorted(D.labels)
    if len(labels) == 1:
        return build([(0,)], labels=labels)
    l0 = labels[0]
    names = [l0]
    parent = [-1]
    depth = [0]
    leaf_id = {l0: 0}

    def new_vertex(par, name=None):
        names.append(name if name is not None else f"s{len(names)}")
        parent.append(par)
        depth.append(depth[par] + 1)
        return len(names) - 1

    def hang(at, length, name):
        cur = at
        for step in range(length):
            cur = new_vertex(cur, name if step == length - 1 else None)
        return cur

    first = labels[1]
    leaf_id[first] = hang(0, D.dist(l0, first), first)
    for x in labels[2:]:
        best_g, best_y = -1, None
        for y in leaf_id:
            if y == l0:
                continue
            twice = D.dist(x, l0) + D.dist(y, l0) - D.dist(x, y)
            if twice % 2:
                raise NotAdditive(f"half-integral branch point for {x!r} and {y!r}")
            g = twice // 2
            if g > best_g:
                best_g, best_y = g, y
        pend = D.dist(x, l0) - best_g
        if best_g < 1 or pend < 1:
            raise NotAdditive(f"leaf {x!r} would attach at an existing leaf")
        at = leaf_id[best_y]
        if best_g > depth[at]:
            raise NotAdditive(f"leaf {x!r} branches beyond leaf {best_y!r}")
        while depth[at] > best_g:
            at = parent[at]
        if at in leaf_id.values():
            raise NotAdditive(f"leaf {x!r} would attach at a leaf")
        leaf_id[x] = hang(at, pend, x)
    edges = [(v, parent[v]) for v in range(1, len(names))]
    X = build(edges, labels=names)
    got = boundary_distance_matrix(X, 1)
    if not got.same_as(D):
        raise NotAdditive("leaf distances are not those of a tree")
    return X


# --------------------------------------------------------------------------
# square complexes


@dataclass(frozen=True)
class Leaf:
    v: str
    w: str

    kind = "leaf"

    def cells(self):
        return [(self.v, self.w)]

    def attachments(self):
        return [(self.w,)]

    def to_dict(self):
        return {"kind": self.kind, "v": self.v, "w": self.w}


@dataclass(frozen=True)
class Corner2D(FaceCorner):
    fresh: bool = False

    kind = "face_corner_2d"

    def to_dict(self):
        return {**super().to_dict(), "kind": self.kind, "fresh": self.fresh}


def edge_sides(D: DistanceMatrix, x: str, y: str) -> frozenset:
    """Boundary labels on the ``x`` side of the hyperplane dual to ``xy``."""
    return frozenset(p for p in D.labels if side_of(D, x, y, p) == WITH_X)


def hyperplanes_cross(D: DistanceMatrix, v: str, w1: str, w2: str) -> bool:
    """Do the hyperplanes dual to ``v w1`` and ``v w2`` cross?

    Crossing hyperplanes cut the vertex set into four nonempty quadrants, and
    each quadrant then holds a boundary vertex.
    """
    A = edge_sides(D, v, w1)
    C = edge_sides(D, v, w2)
    everything = frozenset(D.labels)
    B, E = everything - A, everything - C
    return all(s & t for s in (A, B) for t in (C, E))


def find_2d_face_corner(D: DistanceMatrix, G: BoundaryGraph | None = None) -> Corner2D:
    """Smallest-label vertex of boundary degree 2 whose two edges cross."""
    G = G or BoundaryGraph(D)
    for v in G.labels:
        if G.degree(v) != 2:
            continue
        w1, w2 = G.neighbors(v)
        if not hyperplanes_cross(D, v, w1, w2):
            continue
        us = G.common(w1, w2, exclude=(v,))
        if len(us) > 1:
            raise InconsistentMatrix(f"{w1!r} and {w2!r} have several common neighbours besides {v!r}")
        u = us[0] if us else None
        return Corner2D(v, w1, w2, u, fresh=u is None)
    raise NoneFound("no boundary vertex of degree 2 lies in a single face")


def reduce_2d_corner(D: DistanceMatrix, rec: Corner2D, step: int = 0):
    """Remove the corner ``v``; add the opposite corner when it becomes visible."""
    keep = [x for x in D.labels if x != rec.v]
    kidx = [D.index[x] for x in keep]
    old = D.d[np.ix_(kidx, kidx)]
    if rec.u is not None:
        return DistanceMatrix(keep, old), rec
    dw1 = D.d[kidx, D.index[rec.w1]]
    dv = D.d[kidx, D.index[rec.v]]
    dw2 = D.d[kidx, D.index[rec.w2]]
    diff = dw1 - dv
    if np.any(np.abs(diff) != 1):
        raise InconsistentMatrix(f"a vertex is equidistant from the edge {rec.v!r}-{rec.w1!r}")
    row = dw2 + diff
    if np.any(row < 1):
        raise InconsistentMatrix("recovered distances to the exposed corner are not positive")
    lab = f"u@step{step}"
    n = 0
    while lab in D.index:
        n += 1
        lab = f"u@step{step}.{n}"
    size = len(keep) + 1
    d = np.zeros((size, size), dtype=np.int64)
    d[:-1, :-1] = old
    d[-1, :-1] = row
    d[:-1, -1] = row
    rec = Corner2D(rec.v, rec.w1, rec.w2, lab, fresh=True)
    return DistanceMatrix(keep + [lab], d), rec


def plan_step_2d(D: DistanceMatrix, step: int = 0) -> Step:
    base = base_case(D)
    if base is not None:
        return base
    G = connected_graph(D)
    for v in G.labels:
        if G.degree(v) == 1:
            (w,) = G.neighbors(v)
            return Step(Leaf(v, w), [D.drop([v])])
    cuts = find_cut_vertices(G)
    if cuts:
        children, rec = reduce_cut_vertex(D, cuts[0], G)
        return Step(rec, children)
    rec = find_2d_face_corner(D, G)
    Y, rec = reduce_2d_corner(D, rec, step)
    return Step(rec, [Y])


def reconstruct_2d_with_trace(D: DistanceMatrix, max_steps: int = MAX_STEPS, verify: bool = True) -> Reconstruction:
    return run_reductions(D, plan_step_2d, 2, max_steps, verify)


def reconstruct_2d(D: DistanceMatrix, max_steps: int = MAX_STEPS, verify: bool = True) -> CubeComplex:
    """Square complex whose dimension-2 boundary distances are ``D``."""
    return reconstruct_2d_with_trace(D, max_steps, verify).complex
