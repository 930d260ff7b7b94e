"""The shell around a clean voxel-embedded complex, and its counting audits.

Every boundary square gets one new cube per side facing an empty voxel, so a
free square gets two.  Around each boundary edge the sides are ordered by
angle in the lattice, and consecutive sides are glued along the faces of
their new cubes that contain the edge whenever only empty space lies between
them.

The outer surface is kept with cell-level identifications: its vertices and
edges are classes of ``(side, vertex)`` and ``(side, edge)`` slots.  That
surface can carry a double edge (two distinct edges with the same ends),
which a complex described by vertex sets cannot hold, so the shell is also
returned as a :class:`CubeComplex` only when that description is faithful.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .complex import CubeComplex, build, combinatorial_boundary
from .errors import BoundViolation, CubeError, EulerViolation, MissingCoords, NotClean
from .generators import voxels_of
from .hyperplanes import _UnionFind
from .reconstruct3d import BoundaryGraph, row_configurations
from .validate import is_clean

SQUARE_EDGES = ((0, 1), (2, 3), (0, 2), (1, 3))


@dataclass(frozen=True)
class Side:
    square: int  # index into X.squares
    normal: int  # axis of the square's normal
    sign: int  # +1 or -1: which way the side faces


class SurfaceGraph(BoundaryGraph):
    """Graph on labels with edge multiplicities; degree counts multiplicity."""

    def __init__(self, labels, edges):
        self.labels = tuple(sorted(labels))
        self.adj = {x: set() for x in self.labels}
        self.mult = Counter()
        for x, y in edges:
            self.adj[x].add(y)
            self.adj[y].add(x)
            self.mult[frozenset((x, y))] += 1

    def degree(self, v: str) -> int:
        return sum(self.mult[frozenset((v, w))] for w in self.adj[v])


@dataclass
class Surface:
    """Quadrangulated outer surface: faces indexed by side."""

    vertices: list  # class labels
    edges: list  # (label, label) per edge class
    faces: list  # per side, four vertex labels in chart order
    pi: dict  # surface vertex label -> base vertex label

    def graph(self) -> SurfaceGraph:
        return SurfaceGraph(self.vertices, self.edges)


@dataclass
class Thickening:
    base: CubeComplex
    sides: list
    surface: Surface
    shell: CubeComplex | None = None
    notes: list = field(default_factory=list)

    @property
    def pi(self) -> dict:
        return self.surface.pi


@dataclass
class ShellStats:
    n_k: dict
    V: int
    E: int
    F: int

    @property
    def euler(self) -> int:
        return self.V - self.E + self.F

    def identity_rhs(self) -> int:
        return 8 + sum((k - 4) * n for k, n in self.n_k.items() if k >= 5)

    def to_dict(self) -> dict:
        return {"n_k": {str(k): v for k, v in sorted(self.n_k.items())}, "V": self.V, "E": self.E, "F": self.F}


# --------------------------------------------------------------------------
# construction


def _vec(axis: int, sign: int = 1) -> tuple:
    v = [0, 0, 0]
    v[axis] = sign
    return tuple(v)


def _add(*ps) -> tuple:
    return tuple(sum(t) for t in zip(*ps))


def thicken(X: CubeComplex, check_clean: bool = True) -> Thickening:
    """Glue the shell of new cubes around ``X`` and build its outer surface."""
    if X.coords is None:
        raise MissingCoords("thickening needs lattice coordinates")
    if check_clean:
        rep = is_clean(X)
        if not rep.ok:
            raise NotClean(f"not clean: {[w.check for w in rep.witnesses][:5]}")
    at = {tuple(int(t) for t in p): v for v, p in enumerate(X.coords)}
    vox = voxels_of(X)

    sides = []
    side_at = {}
    for i, s in enumerate(X.squares):
        pts = [X.coords[v] for v in s]
        normal = next(k for k in range(3) if len({p[k] for p in pts}) == 1)
        base = tuple(min(p[k] for p in pts) for k in range(3))
        for sign in (1, -1):
            voxel = base if sign > 0 else _add(base, _vec(normal, -1))
            if voxel not in vox:
                side_at[(i, sign)] = len(sides)
                sides.append(Side(i, normal, sign))
    if not sides:
        raise NotClean("the complex has no boundary squares")

    vslot = {}
    eslot = {}
    for j, side in enumerate(sides):
        s = X.squares[side.square]
        for v in s:
            vslot[(j, v)] = len(vslot)
        for a, b in SQUARE_EDGES:
            eslot[(j, X.find_cell((s[a], s[b])))] = len(eslot)
    vuf, euf = _UnionFind(len(vslot)), _UnionFind(len(eslot))

    for ei, (p, q) in enumerate(X.edges):
        P, Q = X.coords[p], X.coords[q]
        alpha = next(k for k in range(3) if P[k] != Q[k])
        lo = P if P[alpha] < Q[alpha] else Q
        beta, gamma = (k for k in range(3) if k != alpha)
        dirs = [_vec(beta), _vec(gamma), _vec(beta, -1), _vec(gamma, -1)]
        ring = []  # angular sequence of side ids and filled markers
        for k in range(4):
            d, nxt, prv = dirs[k], dirs[(k + 1) % 4], dirs[(k - 1) % 4]
            far = (at.get(_add(P, d)), at.get(_add(Q, d)))
            sq = X.find_cell((p, q, *far)) if None not in far else None
            if sq is not None:
                nrm = gamma if k % 2 == 0 else beta
                back = side_at.get((sq, prv[nrm]))
                fore = side_at.get((sq, nxt[nrm]))
                if back is not None:
                    ring.append(back)
                ring.append(None)
                if fore is not None:
                    ring.append(fore)
            corner = _add(lo, tuple(min(0, a) + min(0, b) for a, b in zip(d, nxt)))
            if corner in vox:
                ring.append(None)
        n = len(ring)
        for i, tok in enumerate(ring):
            if tok is None:
                continue
            nxt_tok = ring[(i + 1) % n]
            if nxt_tok is not None and nxt_tok != tok:
                for v in (p, q):
                    vuf.union(vslot[(tok, v)], vslot[(nxt_tok, v)])
                euf.union(eslot[(tok, ei)], eslot[(nxt_tok, ei)])

    surface = _surface(X, sides, vslot, eslot, vuf, euf)
    T = Thickening(X, sides, surface)
    T.shell = _shell_complex(T)
    if T.shell is None:
        T.notes.append("outer surface has identifications a vertex-set complex cannot hold")
    return T


def _surface(X, sides, vslot, eslot, vuf, euf) -> Surface:
    roots = {}
    for (j, v), slot in sorted(vslot.items(), key=lambda kv: kv[1]):
        roots.setdefault(v, {}).setdefault(vuf.find(slot), None)
    name = {}
    pi = {}
    for v, rs in roots.items():
        for k, r in enumerate(rs):
            lab = f"{X.labels[v]}^{k}"
            name[r] = lab
            pi[lab] = X.labels[v]
    faces = []
    for j, side in enumerate(sides):
        faces.append(tuple(name[vuf.find(vslot[(j, v)])] for v in X.squares[side.square]))
    edges = {}
    for (j, e), slot in eslot.items():
        r = euf.find(slot)
        if r not in edges:
            a, b = X.edges[e]
            edges[r] = (name[vuf.find(vslot[(j, a)])], name[vuf.find(vslot[(j, b)])])
    return Surface(sorted(pi), [edges[r] for r in sorted(edges)], faces, pi)


def _shell_complex(T: Thickening) -> CubeComplex | None:
    X, S = T.base, T.surface
    labels = list(X.labels) + S.vertices
    idx = {lab: i for i, lab in enumerate(labels)}
    charts = [c for c in X.cubes]
    for side, outer in zip(T.sides, S.faces):
        inner = X.squares[side.square]
        charts.append(tuple(inner) + tuple(idx[o] for o in outer))
    if len({frozenset(c) for c in charts}) != len(charts):
        return None
    if len({frozenset(e) for e in S.edges}) != len(S.edges):
        return None
    try:
        Y = build(charts, labels=labels)
    except CubeError:
        return None
    outer = {frozenset(idx[o] for o in f) for f in S.faces}
    bd = combinatorial_boundary(Y, 3)
    got = {frozenset(Y.squares[i]) for d, i in bd if d == 2}
    if got != outer:
        return None
    return Y


# --------------------------------------------------------------------------
# counting


def shell_stats(T: Thickening, check: bool = True) -> ShellStats:
    """Degree histogram and cell counts of the outer surface.

    With ``check``, raises :class:`EulerViolation` unless the surface is a
    quadrangulated sphere satisfying the degree identity.
    """
    S = T.surface
    G = S.graph()
    n_k = Counter(G.degree(v) for v in G.labels)
    st = ShellStats(dict(sorted(n_k.items())), len(S.vertices), len(S.edges), len(S.faces))
    if check:
        if st.euler != 2:
            raise EulerViolation(f"V - E + F = {st.euler}")
        if 2 * st.F != st.E:
            raise EulerViolation(f"2F = {2 * st.F} but E = {st.E}")
        if n_k.get(3, 0) != st.identity_rhs():
            raise EulerViolation(f"n_3 = {n_k.get(3, 0)} but the degree identity gives {st.identity_rhs()}")
    return st


def boundary_skeleton(X: CubeComplex) -> SurfaceGraph:
    """1-skeleton of the combinatorial boundary of ``X``, on labels."""
    bd = combinatorial_boundary(X, 3)
    verts = [X.labels[i] for d, i in bd if d == 0]
    edges = [tuple(X.labels[v] for v in X.edges[i]) for d, i in bd if d == 1]
    return SurfaceGraph(verts, edges)


def shell_configuration_audit(T: Thickening, raise_on_violation: bool = False) -> dict:
    """Enumerate row configurations on the outer surface and check the bounds.

    Checked: every degree-3 vertex starts at least three configurations;
    every vertex of degree ``d >= 5`` ends at most ``2 * (d // 3)``; a good
    configuration exists; when a vertex of degree at least 5 exists, at
    least 24 configurations run between degree-3 vertices; every good
    configuration projects to the spine of a row configuration of the base
    boundary; degree-3 surface vertices project to degree-3 base vertices;
    the projection maps surface edges to base edges.
    """
    X, S = T.base, T.surface
    G = S.graph()
    base = boundary_skeleton(X)
    base_spines = {cfg.p for cfg, _ in row_configurations(base)}
    Xdeg = {X.labels[v]: X.degree(v) for v in range(X.n_vertices)}

    configs = [(cfg, good) for cfg, good in row_configurations(G)]
    starts = Counter(cfg.p[0] for cfg, _ in configs)
    ends = Counter(cfg.p[-1] for cfg, _ in configs)
    degree = {v: G.degree(v) for v in G.labels}
    failures = []

    for v, d in degree.items():
        if d < 3:
            failures.append({"check": "min_degree", "vertex": v, "degree": d})
        if d == 3 and starts[v] < 3:
            failures.append({"check": "starts", "vertex": v, "count": starts[v]})
        if d >= 5 and ends[v] > 2 * (d // 3):
            failures.append({"check": "ends", "vertex": v, "degree": d, "count": ends[v]})
        if d == 3 and Xdeg[S.pi[v]] != 3:
            failures.append({"check": "degree_transport", "vertex": v, "base_degree": Xdeg[S.pi[v]]})
    for a, b in S.edges:
        if S.pi[b] not in base.adj[S.pi[a]]:
            failures.append({"check": "combinatorial", "edge": [a, b]})

    good = [cfg for cfg, g in configs if g]
    if not good:
        failures.append({"check": "good_exists"})
    has_big = any(d >= 5 for d in degree.values())
    if has_big and len(good) < 24:
        failures.append({"check": "good_count", "count": len(good)})
    for cfg in good:
        spine = tuple(S.pi[p] for p in cfg.p)
        if spine not in base_spines:
            failures.append({"check": "projection", "spine": list(cfg.p), "image": list(spine)})

    report = {
        "configurations": len(configs),
        "good": len(good),
        "has_degree_5_plus": has_big,
        "degree3_vertices": sum(1 for d in degree.values() if d == 3),
        "min_starts": min((starts[v] for v, d in degree.items() if d == 3), default=None),
        "max_end_slack": min((2 * (d // 3) - ends[v] for v, d in degree.items() if d >= 5), default=None),
        "shell_complex": T.shell is not None,
        "failures": failures,
        "ok": not failures,
    }
    if raise_on_violation and failures:
        raise BoundViolation(str(failures[:3]))
    return report
