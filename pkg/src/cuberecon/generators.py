"""Test universe: voxel complexes, random CAT(0) complexes and named figures."""

from __future__ import annotations

import itertools
import random

from .complex import CubeComplex, build
from .errors import BudgetExhausted, CubeError, UnknownName
from .validate import check_contractible, check_flag_links, check_squares_filled, validate_cat0

FACE_STEPS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def point_label(p) -> str:
    return ":".join(str(int(t)) for t in p)


class _LatticeBuilder:
    """Collects lattice cells and numbers their corner points as they appear."""

    def __init__(self):
        self.points: dict = {}
        self.charts: list = []

    def vid(self, p) -> int:
        p = tuple(int(t) for t in p)
        if p not in self.points:
            self.points[p] = len(self.points)
        return self.points[p]

    def cube(self, base):
        x, y, z = base
        self.charts.append(
            tuple(self.vid((x + (m >> 2 & 1), y + (m >> 1 & 1), z + (m & 1))) for m in range(8))
        )

    def square(self, base, axes):
        """Unit square at ``base`` spanned by the two coordinate ``axes``."""
        i, j = axes
        corners = []
        for m in range(4):
            p = list(base)
            p[i] += m >> 1 & 1
            p[j] += m & 1
            corners.append(self.vid(p))
        self.charts.append(tuple(corners))

    def edge(self, a, b):
        self.charts.append((self.vid(a), self.vid(b)))

    def finish(self) -> CubeComplex:
        pts = sorted(self.points, key=self.points.get)
        X = build(self.charts, labels=[point_label(p) for p in pts], coords=pts)
        return X.canonical()


def from_voxels(voxels, squares=()) -> CubeComplex:
    """Closed unit cubes at integer positions, with lattice coordinates.

    ``squares`` optionally adds free unit squares as ``(base, axes)`` pairs.
    Vertex labels are ``"x:y:z"``.
    """
    lb = _LatticeBuilder()
    for v in sorted({tuple(int(t) for t in v) for v in voxels}):
        lb.cube(v)
    for base, axes in squares:
        lb.square(tuple(base), tuple(axes))
    return lb.finish()


def voxels_of(X: CubeComplex) -> set:
    """Lower corners of the cubes of a lattice-embedded complex."""
    out = set()
    for c in X.cubes:
        pts = [X.coords[v] for v in c]
        out.add(tuple(min(p[k] for p in pts) for k in range(3)))
    return out


def face_neighbors(v):
    return [tuple(a + b for a, b in zip(v, s)) for s in FACE_STEPS]


# --------------------------------------------------------------------------
# random complexes


def random_cat0(n: int, seed: int, budget: int = 1000) -> CubeComplex:
    """Grow ``n`` face-connected voxels, keeping the complex CAT(0) throughout."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    vox = {(0, 0, 0)}
    while len(vox) < n:
        frontier = sorted({w for v in vox for w in face_neighbors(v)} - vox)
        for _ in range(budget):
            cand = rng.choice(frontier)
            X = from_voxels(vox | {cand})
            if validate_cat0(X).ok:
                vox.add(cand)
                break
        else:
            raise BudgetExhausted(f"no acceptable voxel after {budget} proposals")
    return from_voxels(vox)


def random_tree(size: int, seed: int) -> CubeComplex:
    """Uniform labelled tree on ``size`` vertices via a Prufer sequence."""
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    names = [f"t{i}" for i in range(size)]
    if size == 1:
        return build([(0,)], labels=names)
    if size == 2:
        return build([(0, 1)], labels=names)
    seq = [rng.randrange(size) for _ in range(size - 2)]
    deg = [1] * size
    for s in seq:
        deg[s] += 1
    edges = []
    for s in seq:
        leaf = min(i for i in range(size) if deg[i] == 1)
        edges.append((leaf, s))
        deg[leaf] -= 1
        deg[s] -= 1
    u, w = [i for i in range(size) if deg[i] == 1]
    edges.append((u, w))
    return build(edges, labels=names)


def random_quad2d(size: int, seed: int, budget: int = 1000, extras: bool = True) -> CubeComplex:
    """CAT(0) square complex with ``size`` squares, grown one square at a time.

    A new square is glued along one edge or along a path of two edges, never
    onto an edge that already lies in two squares.  With ``extras``, some
    squares are instead hung from a single boundary vertex and a few pendant
    edges are attached at the end, always at boundary vertices.  Every move
    is checked against the flag, contractibility and filled-square tests.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    charts = [(0, 1, 2, 3)]
    nv = 4
    X = build(charts)
    n_wedge = rng.randrange(size // 8 + 1) if extras else 0
    n_pendant = rng.randrange(3) if extras else 0

    def attempt(make):
        nonlocal X, charts, nv
        for _ in range(budget):
            new, add_v = make()
            if new is None:
                continue
            try:
                Y = build(charts + new, labels=[str(i) for i in range(nv + add_v)])
            except CubeError:
                continue
            if _valid_2d(Y):
                charts, nv, X = charts + new, nv + add_v, Y
                return
        raise BudgetExhausted(f"no acceptable move after {budget} proposals")

    def grow():
        on_edge = {}
        for i in range(len(X.edges)):
            on_edge[i] = 0
        for s in X.squares:
            for e in ((s[0], s[1]), (s[2], s[3]), (s[0], s[2]), (s[1], s[3])):
                on_edge[X.find_cell(e)] += 1
        free = [X.edges[i] for i, k in on_edge.items() if k < 2]
        if rng.random() < 0.5:
            a, b = free[rng.randrange(len(free))]
            return [(a, b, nv, nv + 1)], 2
        y = rng.randrange(nv)
        nb = [w for w in X.adjacency[y] if on_edge[X.find_cell((y, w))] < 2]
        if len(nb) < 2:
            return None, 0
        x, z = rng.sample(nb, 2)
        return [(y, x, z, nv)], 1

    def boundary_vertex():
        from .complex import boundary_vertices

        bv = boundary_vertices(X, 2)
        return bv[rng.randrange(len(bv))]

    def wedge():
        v = boundary_vertex()
        return [(v, nv, nv + 1, nv + 2)], 3

    def pendant():
        return [(boundary_vertex(), nv)], 1

    for _ in range(size - 1 - n_wedge):
        attempt(grow)
    for _ in range(min(n_wedge, size - 1)):
        attempt(wedge)
    for _ in range(n_pendant):
        attempt(pendant)
    return X.relabel({i: f"q{i}" for i in range(X.n_vertices)})


def _valid_2d(X: CubeComplex) -> bool:
    return check_flag_links(X).ok and check_squares_filled(X).ok and check_contractible(X).ok


# --------------------------------------------------------------------------
# named examples


def _box(a, b, c):
    return set(itertools.product(range(a), range(b), range(c)))


def hidden_cube() -> CubeComplex:
    """A cube inside a larger cube, the gap filled by six frustum cubes."""
    labels = [f"i{m:03b}" for m in range(8)] + [f"o{m:03b}" for m in range(8)]

    def inner(bits):
        return bits[0] * 4 + bits[1] * 2 + bits[2]

    charts = [tuple(range(8))]
    for axis in range(3):
        rest = [k for k in range(3) if k != axis]
        for s in (0, 1):
            chart = []
            for m in range(8):
                t, b1, b2 = m >> 2 & 1, m >> 1 & 1, m & 1
                bits = [0, 0, 0]
                bits[axis] = s
                bits[rest[0]] = b1
                bits[rest[1]] = b2
                chart.append(inner(bits) + 8 * t)
            charts.append(tuple(chart))
    return build(charts, labels=labels).canonical()


def square_grid(a: int, b: int, holes=()) -> CubeComplex:
    """Planar ``a`` by ``b`` grid of squares, omitting the 2-cells in ``holes``."""
    lb = _LatticeBuilder()
    holes = set(holes)
    for i in range(a):
        for j in range(b):
            if (i, j) in holes:
                for p, q in (((i, j), (i + 1, j)), ((i, j), (i, j + 1)), ((i + 1, j), (i + 1, j + 1)), ((i, j + 1), (i + 1, j + 1))):
                    lb.edge((*p, 0), (*q, 0))
            else:
                lb.square((i, j, 0), (0, 1))
    return lb.finish()


def deg3_pattern() -> CubeComplex:
    """Two squares meeting along an edge, hung between two cubes.

    The vertex ``2:0:0`` has degree 3 and lies in no cube; its link is a
    path through ``2:1:0``.
    """
    return from_voxels(
        [(0, 0, 0), (3, 0, 0)],
        squares=[((1, 0, 0), (0, 1)), ((2, 0, 0), (0, 1))],
    )


def bridged_cubes() -> CubeComplex:
    """Two cubes joined by a free square: clean, with a free face."""
    return from_voxels([(0, 0, 0), (2, 0, 0)], squares=[((1, 0, 0), (0, 1))])


NAMED = {
    "single_cube": lambda: from_voxels([(0, 0, 0)]),
    "l_shape": lambda: from_voxels([(0, 0, 0), (1, 0, 0), (1, 1, 0)]),
    "fig2a": lambda: from_voxels(_box(3, 3, 3) - {(1, 1, 1), (1, 1, 2)}),
    "fig2b": lambda: from_voxels(_box(3, 3, 3) - {(1, 1, 0), (1, 1, 2)}),
    "hidden_cube": hidden_cube,
    "deg3_pattern": deg3_pattern,
    "square_ring": lambda: square_grid(3, 3, holes=[(1, 1)]),
    "square_disc": lambda: square_grid(3, 3),
    "bridged_cubes": bridged_cubes,
    "block_2x1x1": lambda: from_voxels(_box(2, 1, 1)),
    "block_2x2x1": lambda: from_voxels(_box(2, 2, 1)),
    "block_2x2x2": lambda: from_voxels(_box(2, 2, 2)),
    "block_3x3x3": lambda: from_voxels(_box(3, 3, 3)),
}


def named_example(name: str, k: int | None = None) -> CubeComplex:
    """A documented figure complex.

    ``row_k`` takes the row length either as ``k`` or in the name, as in
    ``"row_4"``.
    """
    if name.startswith("row_"):
        tail = name[4:]
        if tail != "k":
            try:
                k = int(tail)
            except ValueError:
                raise UnknownName(name) from None
        if k is None or k < 1:
            raise UnknownName(f"{name} needs a positive row length")
        return from_voxels([(i, 0, 0) for i in range(k)])
    try:
        return NAMED[name]()
    except KeyError:
        raise UnknownName(name) from None


NAMED_CAT0 = ("single_cube", "l_shape", "deg3_pattern", "square_disc", "bridged_cubes",
              "block_2x1x1", "block_2x2x1", "block_2x2x2", "block_3x3x3", "row_3")
