"""Reconstruction of a CAT(0) cube complex in R^3 from boundary distances.

The matrix is reduced one recognised structure at a time (cut vertex,
corner of a face, degree-3 vertex outside every cube, good row of cubes)
until only single vertices and single edges remain.  Each reduction leaves a
record describing the cells it removed; the complex is rebuilt by putting
those cells back.

All work happens on labels.  Searches iterate labels in sorted order, so a
given matrix always produces the same reductions and the same output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .complex import CubeComplex, DistanceMatrix, boundary_distance_matrix, build, chart_faces
from .errors import (
    DepthExceeded,
    HypothesisViolation,
    InconsistentMatrix,
    MissingAttachment,
    MissingOppositeVertex,
    NoGoodConfiguration,
    PatternMismatch,
)

AMBIENT_DIM = 3
MAX_STEPS = 10_000


# --------------------------------------------------------------------------
# boundary graph


class BoundaryGraph:
    """Graph on the boundary labels joining pairs at distance 1."""

    def __init__(self, D: DistanceMatrix):
        self.labels = tuple(sorted(D.labels))
        idx = [D.index[x] for x in self.labels]
        sub = D.d[np.ix_(idx, idx)]
        self.adj = {x: set() for x in self.labels}
        rs, cs = np.nonzero(sub == 1)
        for r, c in zip(rs.tolist(), cs.tolist()):
            self.adj[self.labels[r]].add(self.labels[c])

    def degree(self, v: str) -> int:
        return len(self.adj[v])

    def neighbors(self, v: str) -> list:
        return sorted(self.adj[v])

    def common(self, x: str, y: str, exclude=()) -> list:
        return sorted((self.adj[x] & self.adj[y]) - set(exclude))

    def link(self, v: str) -> tuple:
        """Link vertices (neighbours of ``v``) and link edges.

        Two neighbours are joined when they have a common neighbour other
        than ``v``, i.e. when they span a face with ``v``.
        """
        nb = self.neighbors(v)
        edges = []
        for i, x in enumerate(nb):
            for y in nb[i + 1 :]:
                if self.common(x, y, exclude=(v,)):
                    edges.append((x, y))
        return nb, edges

    def nx_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.labels)
        for x, ns in self.adj.items():
            g.add_edges_from((x, y) for y in ns if x < y)
        return g


def boundary_graph(D: DistanceMatrix) -> BoundaryGraph:
    return BoundaryGraph(D)


# --------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class CutVertex:
    v: str
    components: tuple

    kind = "cut_vertex"

    def cells(self):
        return []

    def attachments(self):
        return []

    def to_dict(self):
        return {"kind": self.kind, "v": self.v, "components": [list(c) for c in self.components]}


@dataclass(frozen=True)
class FaceCorner:
    v: str
    w1: str
    w2: str
    u: str

    kind = "face_corner"

    def cells(self):
        return [(self.v, self.w1, self.w2, self.u)]

    def attachments(self):
        return [(self.w1, self.u), (self.w2, self.u)]

    def to_dict(self):
        return {"kind": self.kind, "v": self.v, "w1": self.w1, "w2": self.w2, "u": self.u}


@dataclass(frozen=True)
class Degree3NoCube:
    v: str
    v1: str
    v2: str
    u: str
    u1: str
    u2: str

    kind = "degree3_no_cube"

    def cells(self):
        return [(self.v, self.v1, self.u, self.u1), (self.v, self.v2, self.u, self.u2)]

    def attachments(self):
        return [(self.v1, self.u1), (self.u1, self.u), (self.u, self.u2), (self.u2, self.v2)]

    def to_dict(self):
        return {"kind": self.kind, **{k: getattr(self, k) for k in ("v", "v1", "v2", "u", "u1", "u2")}}


@dataclass(frozen=True)
class RowConfiguration:
    """Spine ``p`` with flanks ``a`` and ``b``; ``a[0] < b[0]``."""

    p: tuple
    a: tuple
    b: tuple

    @property
    def k(self) -> int:
        return len(self.p) - 1

    def to_dict(self):
        return {"spine": list(self.p), "a": list(self.a), "b": list(self.b)}


@dataclass(frozen=True)
class RowRemoval:
    config: RowConfiguration
    c: tuple
    fresh: tuple

    kind = "row"

    def cells(self):
        p, a, b, c = self.config.p, self.config.a, self.config.b, self.c
        return [
            (p[i - 1], b[i - 1], a[i - 1], c[i - 1], p[i], b[i], a[i], c[i])
            for i in range(1, len(p))
        ]

    def attachments(self):
        a, b, c = self.config.a, self.config.b, self.c
        out = []
        for i in range(1, len(c)):
            out.append((a[i - 1], a[i], c[i - 1], c[i]))
            out.append((b[i - 1], b[i], c[i - 1], c[i]))
        return out

    def to_dict(self):
        return {"kind": self.kind, **self.config.to_dict(), "c": list(self.c), "fresh": list(self.fresh)}


# --------------------------------------------------------------------------
# recognition


def find_cut_vertices(G: BoundaryGraph) -> list:
    return sorted(nx.articulation_points(G.nx_graph()))


def find_face_corners(G: BoundaryGraph) -> list:
    out = []
    for v in G.labels:
        if G.degree(v) != 2:
            continue
        w1, w2 = G.neighbors(v)
        us = G.common(w1, w2, exclude=(v,))
        if not us:
            raise MissingOppositeVertex(f"{w1!r} and {w2!r} have no common neighbour besides {v!r}")
        if len(us) > 1:
            raise InconsistentMatrix(f"{w1!r} and {w2!r} have several common neighbours besides {v!r}")
        out.append(FaceCorner(v, w1, w2, us[0]))
    return out


def _unique_common(G, x, y, exclude):
    cs = G.common(x, y, exclude=exclude)
    if len(cs) != 1:
        raise PatternMismatch(f"{x!r} and {y!r} have {len(cs)} common neighbours besides {exclude}")
    return cs[0]


def find_degree3_no_cube(G: BoundaryGraph) -> list:
    out = []
    for v in G.labels:
        if G.degree(v) != 3:
            continue
        nb, edges = G.link(v)
        if len(edges) == 3:
            continue  # corner of a cube
        if len(edges) != 2:
            raise PatternMismatch(f"link of degree-3 vertex {v!r} has {len(edges)} edge(s)")
        count = {x: 0 for x in nb}
        for x, y in edges:
            count[x] += 1
            count[y] += 1
        u = next(x for x in nb if count[x] == 2)
        v1, v2 = (x for x in nb if x != u)
        u1 = _unique_common(G, v1, u, (v,))
        u2 = _unique_common(G, u, v2, (v,))
        out.append(Degree3NoCube(v, v1, v2, u, u1, u2))
    return out


def row_configurations(G: BoundaryGraph, start: str | None = None, good_only: bool = False):
    """Generate row configurations in label-sorted order.

    Each configuration is determined by its first spine edge; the flank
    sequences are swapped if needed so that ``a[0] < b[0]``.  Yields pairs
    ``(config, good)``.
    """
    starts = [start] if start is not None else G.labels
    for p0 in starts:
        if G.degree(p0) != 3:
            continue
        for p1 in G.neighbors(p0):
            a0, b0 = (x for x in G.neighbors(p0) if x != p1)
            cfg = _extend(G, p0, p1, a0, b0)
            if cfg is None:
                continue
            good = G.degree(cfg.p[-1]) == 3
            if good or not good_only:
                yield cfg, good


def _extend(G, p0, p1, a0, b0):
    p, a, b = [p0, p1], [a0], [b0]
    seen = {p0, p1}
    while True:
        i = len(p) - 1
        prev, cur = p[i - 1], p[i]
        an = G.common(a[i - 1], cur, exclude=(prev,))
        bn = G.common(b[i - 1], cur, exclude=(prev,))
        if len(an) != 1 or len(bn) != 1:
            return None
        a.append(an[0])
        b.append(bn[0])
        if a[i] not in G.adj[cur] or b[i] not in G.adj[cur]:
            return None
        if G.degree(cur) != 4:
            break
        rest = [x for x in G.neighbors(cur) if x not in (prev, a[i], b[i])]
        if len(rest) != 1 or rest[0] in seen:
            return None
        p.append(rest[0])
        seen.add(rest[0])
    if a == b:
        return None
    if a[0] > b[0]:
        a, b = b, a
    return RowConfiguration(tuple(p), tuple(a), tuple(b))


def find_good_row_configuration(G: BoundaryGraph) -> RowConfiguration:
    for cfg, _ in row_configurations(G, good_only=True):
        return cfg
    raise NoGoodConfiguration("no good row configuration in the boundary graph")


# --------------------------------------------------------------------------
# reductions


def reduce_cut_vertex(D: DistanceMatrix, v: str, G: BoundaryGraph | None = None):
    G = G or BoundaryGraph(D)
    g = G.nx_graph()
    g.remove_node(v)
    comps = sorted(sorted(c) for c in nx.connected_components(g))
    if len(comps) < 2:
        raise ValueError(f"{v!r} is not a cut vertex")
    children = [D.restrict(sorted(c + [v])) for c in comps]
    return children, CutVertex(v, tuple(tuple(c) for c in comps))


def reduce_face_corner(D: DistanceMatrix, rec: FaceCorner):
    return D.drop([rec.v]), rec


def reduce_degree3(D: DistanceMatrix, rec: Degree3NoCube):
    keep = [x for x in D.labels if x != rec.v]
    Y = D.restrict(keep)
    d = Y.d.copy()
    col = lambda lab: D.d[[D.index[x] for x in keep], D.index[lab]]
    du, dv = col(rec.u), col(rec.v)
    if np.any(np.abs(du - dv) != 1):
        bad = keep[int(np.argmax(np.abs(du - dv) != 1))]
        raise InconsistentMatrix(f"{bad!r} is equidistant from the edge {rec.v!r}-{rec.u!r}")
    v_side = dv < du
    d1, d2 = col(rec.v1), col(rec.v2)
    if np.any(v_side & (d1 == d2)):
        bad = keep[int(np.argmax(v_side & (d1 == d2)))]
        raise InconsistentMatrix(f"{bad!r} is equidistant from {rec.v1!r} and {rec.v2!r}")
    comp = d1 < d2
    sep = v_side[:, None] & v_side[None, :] & (comp[:, None] != comp[None, :])
    d[sep] += 2
    return DistanceMatrix(keep, d), rec


def reduce_row(D: DistanceMatrix, cfg: RowConfiguration, step: int = 0):
    p, a, b = cfg.p, cfg.a, cfg.b
    gone = set(p)
    keep = [x for x in D.labels if x not in gone]
    kidx = [D.index[x] for x in keep]
    rows = []
    c = []
    fresh = []
    taken = set(D.labels)
    for i in range(len(p)):
        da = D.d[kidx, D.index[a[i]]]
        db = D.d[kidx, D.index[b[i]]]
        dp = D.d[kidx, D.index[p[i]]]
        diff = db - dp
        if np.any(np.abs(diff) != 1):
            bad = keep[int(np.argmax(np.abs(diff) != 1))]
            raise InconsistentMatrix(f"{bad!r} is equidistant from the edge {p[i]!r}-{b[i]!r}")
        r = da + diff
        zeros = np.flatnonzero(r == 0)
        if np.any(r < 0) or len(zeros) > 1:
            raise InconsistentMatrix(f"impossible distances for the back-wall vertex at position {i}")
        if len(zeros) == 1:
            c.append(keep[int(zeros[0])])
        elif 0 < i < len(p) - 1:
            lab = f"c{i}@step{step}"
            n = 0
            while lab in taken:
                n += 1
                lab = f"c{i}@step{step}.{n}"
            taken.add(lab)
            c.append(lab)
            fresh.append(i)
            rows.append(r)
        else:
            raise InconsistentMatrix(f"end vertex c{i} of the row is not a boundary vertex")
    n_old = len(keep)
    n = n_old + len(fresh)
    d = np.zeros((n, n), dtype=np.int64)
    d[:n_old, :n_old] = D.d[np.ix_(kidx, kidx)]
    for j, (i, r) in enumerate(zip(fresh, rows)):
        d[n_old + j, :n_old] = r
        d[:n_old, n_old + j] = r
        for j2, i2 in enumerate(fresh):
            d[n_old + j, n_old + j2] = abs(i - i2)
    labels = keep + [c[i] for i in fresh]
    rec = RowRemoval(cfg, tuple(c), tuple(c[i] for i in fresh))
    return DistanceMatrix(labels, d), rec


# --------------------------------------------------------------------------
# one step and the driver


@dataclass
class Step:
    """Outcome of one recognition/reduction on a matrix."""

    record: object
    children: list
    base_cells: list = field(default_factory=list)


def base_case(D: DistanceMatrix):
    """A single vertex or a single edge, else ``None``."""
    n = len(D)
    if n == 0:
        raise HypothesisViolation("empty distance matrix")
    if n == 1:
        return Step(None, [], [(D.labels[0],)])
    if n == 2 and D.d[0, 1] == 1:
        return Step(None, [], [tuple(D.labels)])
    return None


def connected_graph(D: DistanceMatrix) -> BoundaryGraph:
    G = BoundaryGraph(D)
    if not nx.is_connected(G.nx_graph()):
        raise HypothesisViolation("boundary graph is disconnected")
    return G


def plan_step(D: DistanceMatrix, step: int = 0) -> Step:
    """Reduce ``D`` once, or recognise it as a base case."""
    base = base_case(D)
    if base is not None:
        return base
    G = connected_graph(D)
    cuts = find_cut_vertices(G)
    if cuts:
        children, rec = reduce_cut_vertex(D, cuts[0], G)
        return Step(rec, children)
    corners = find_face_corners(G)
    if corners:
        Y, rec = reduce_face_corner(D, corners[0])
        return Step(rec, [Y])
    deg3 = find_degree3_no_cube(G)
    if deg3:
        Y, rec = reduce_degree3(D, deg3[0])
        return Step(rec, [Y])
    cfg = find_good_row_configuration(G)
    Y, rec = reduce_row(D, cfg, step)
    return Step(rec, [Y])


class _Node:
    __slots__ = ("matrix", "parent", "step", "n_children")

    def __init__(self, matrix, parent):
        self.matrix = matrix
        self.parent = parent
        self.step = None
        self.n_children = 0


def _chart_key(chart):
    return frozenset(chart)


def _attach(rec, cells: dict):
    for need in rec.attachments():
        if _chart_key(need) not in cells:
            raise MissingAttachment(f"{rec.kind}: expected cell on {sorted(need)} in the reduced complex")


def _add_cells(bag: dict, charts):
    for ch in charts:
        stack = [tuple(ch)]
        while stack:
            c = stack.pop()
            key = frozenset(c)
            if key in bag:
                continue
            bag[key] = c
            if len(c) > 1:
                stack.extend(chart_faces(c))


@dataclass
class Reconstruction:
    complex: CubeComplex
    trace: list


def reconstruct_with_trace(D: DistanceMatrix, max_steps: int = MAX_STEPS, verify: bool = True) -> Reconstruction:
    """Reconstruct and return the complex together with the reduction trace."""
    return run_reductions(D, plan_step, AMBIENT_DIM, max_steps, verify)


def run_reductions(D: DistanceMatrix, planner, dim: int, max_steps: int = MAX_STEPS, verify: bool = True):
    """Drive ``planner`` over ``D`` and its reduced matrices, then rebuild.

    ``planner(D, step)`` returns a :class:`Step`.  The rebuilt complex is
    checked against ``D`` with the boundary taken relative to ``dim``.
    """
    D.validate()
    nodes = [_Node(D, None)]
    trace = []
    todo = [0]
    steps = 0
    while todo:
        i = todo.pop()
        node = nodes[i]
        if steps >= max_steps:
            raise DepthExceeded(f"more than {max_steps} reductions")
        st = planner(node.matrix, steps)
        node.step = st
        if st.record is not None:
            trace.append(
                {
                    "step": steps,
                    **st.record.to_dict(),
                    "boundary_before": len(node.matrix),
                    "boundary_after": [len(c) for c in st.children],
                }
            )
            steps += 1
        for ch in st.children:
            nodes.append(_Node(ch, i))
            node.n_children += 1
        # depth-first, first child first
        todo.extend(range(len(nodes) - 1, len(nodes) - 1 - len(st.children), -1))
        node.matrix = None
    # reassemble bottom-up: children always have larger indices
    bags = [None] * len(nodes)
    root = None
    for i in range(len(nodes) - 1, -1, -1):
        node = nodes[i]
        bag = bags[i] if bags[i] is not None else {}
        bags[i] = None
        if node.step.record is not None:
            _attach(node.step.record, bag)
            _add_cells(bag, node.step.record.cells())
        _add_cells(bag, node.step.base_cells)
        if node.parent is None:
            root = bag
            continue
        pb = bags[node.parent]
        if pb is None:
            bags[node.parent] = bag
        elif len(pb) < len(bag):
            bag.update(pb)
            bags[node.parent] = bag
        else:
            pb.update(bag)
    X = _bag_to_complex(root)
    if verify:
        got = boundary_distance_matrix(X, dim)
        if not got.same_as(D):
            raise HypothesisViolation("the rebuilt complex does not reproduce the input matrix")
    return Reconstruction(X, trace)


def _bag_to_complex(bag: dict) -> CubeComplex:
    labels = sorted({lab for key in bag for lab in key})
    vid = {lab: i for i, lab in enumerate(labels)}
    charts = [tuple(vid[x] for x in ch) for ch in bag.values()]
    return build(charts, labels=labels)


def reconstruct(D: DistanceMatrix, max_steps: int = MAX_STEPS, verify: bool = True) -> CubeComplex:
    """Combinatorial type of the complex whose boundary distances are ``D``."""
    return reconstruct_with_trace(D, max_steps, verify).complex


def reassemble(rec, children) -> CubeComplex:
    """Rebuild the complex before a reduction from its reduced pieces."""
    bag = {}
    for Y in children:
        for d, cs in enumerate(Y.cells):
            for i in range(len(cs)):
                ch = Y.cell_labels(d, i)
                bag[frozenset(ch)] = ch
    _attach(rec, bag)
    _add_cells(bag, rec.cells())
    return _bag_to_complex(bag)
